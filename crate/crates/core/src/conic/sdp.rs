//! Small complex semidefinite programs.
//!
//! Primal-dual interior point method on Hermitian PSD blocks, with an
//! internal nonnegative block holding inequality slacks. Search direction is
//! HKM with a Mehrotra predictor-corrector step.

use nalgebra::{Cholesky, DMatrix, DVector};

use super::dense::{congruence, inverse_cholesky_factor, inverse_from_factor, mul, mul3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::C64;

/// Constant coefficient matrix of a trace inner product.
#[derive(Debug, Clone, PartialEq)]
pub enum Coeff {
    /// Hermitian matrix.
    Dense(DMatrix<C64>),
    /// Real diagonal given as `(index, value)` pairs.
    Diagonal(Vec<(usize, f64)>),
}

impl Coeff {
    pub fn identity(n: usize) -> Self {
        Coeff::Diagonal((0..n).map(|i| (i, 1.0)).collect())
    }

    pub fn to_dense(&self, n: usize) -> DMatrix<C64> {
        match self {
            Coeff::Dense(m) => m.clone(),
            Coeff::Diagonal(d) => {
                let mut m = DMatrix::zeros(n, n);
                for &(i, v) in d {
                    m[(i, i)] += C64::new(v, 0.0);
                }
                m
            }
        }
    }

    fn scaled(&self, s: f64) -> Coeff {
        match self {
            Coeff::Dense(m) => Coeff::Dense(m * C64::new(s, 0.0)),
            Coeff::Diagonal(d) => Coeff::Diagonal(d.iter().map(|&(i, v)| (i, v * s)).collect()),
        }
    }

    fn norm_sq(&self) -> f64 {
        match self {
            Coeff::Dense(m) => m.norm_squared(),
            Coeff::Diagonal(d) => d.iter().map(|&(_, v)| v * v).sum(),
        }
    }

    /// `Re Tr(self · x)`.
    pub fn inner(&self, x: &DMatrix<C64>) -> f64 {
        match self {
            Coeff::Dense(a) => a.iter().zip(x.transpose().iter()).map(|(a, b)| (a * b).re).sum(),
            Coeff::Diagonal(d) => d.iter().map(|&(i, v)| v * x[(i, i)].re).sum(),
        }
    }

    fn add_to(&self, target: &mut DMatrix<C64>, s: f64) {
        match self {
            Coeff::Dense(m) => *target += m * C64::new(s, 0.0),
            Coeff::Diagonal(d) => {
                for &(i, v) in d {
                    target[(i, i)] += C64::new(v * s, 0.0);
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub block: usize,
    pub coeff: Coeff,
}

impl Term {
    pub fn new(block: usize, coeff: Coeff) -> Self {
        Term { block, coeff }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub terms: Vec<Term>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// `opt Σ Tr(C_k X_k) + c0` subject to trace constraints, all `X_k ⪰ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    pub dims: Vec<usize>,
    pub sense: Sense,
    pub objective: Vec<Term>,
    pub objective_constant: f64,
    pub constraints: Vec<Constraint>,
}

impl SdpProblem {
    pub fn new(dims: Vec<usize>, sense: Sense) -> Self {
        SdpProblem { dims, sense, objective: Vec::new(), objective_constant: 0.0, constraints: Vec::new() }
    }

    pub fn add_objective(&mut self, block: usize, coeff: Coeff) -> &mut Self {
        self.objective.push(Term::new(block, coeff));
        self
    }

    pub fn add_constraint(&mut self, terms: Vec<Term>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint { terms, relation, rhs });
        self
    }

    /// `diag(X_block) = values`.
    pub fn pin_diagonal(&mut self, block: usize, values: &[f64]) -> &mut Self {
        for (i, &v) in values.iter().enumerate() {
            self.add_constraint(vec![Term::new(block, Coeff::Diagonal(vec![(i, 1.0)]))], Relation::Eq, v);
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let check = |t: &Term| -> Result<()> {
            let n = *self
                .dims
                .get(t.block)
                .ok_or_else(|| Error::domain(format!("term refers to missing block {}", t.block)))?;
            match &t.coeff {
                Coeff::Dense(m) => {
                    if m.nrows() != n || m.ncols() != n {
                        return Err(Error::domain(format!("coefficient shape does not match block {}", t.block)));
                    }
                    let asym = (m - m.adjoint()).norm();
                    if asym > 1e-9 * (1.0 + m.norm()) {
                        return Err(Error::domain("coefficient matrix is not Hermitian"));
                    }
                }
                Coeff::Diagonal(d) => {
                    if d.iter().any(|&(i, _)| i >= n) {
                        return Err(Error::domain("diagonal index out of range"));
                    }
                }
            }
            Ok(())
        };
        if self.dims.iter().any(|&n| n == 0) {
            return Err(Error::domain("blocks must have positive dimension"));
        }
        for t in &self.objective {
            check(t)?;
        }
        for c in &self.constraints {
            if !c.rhs.is_finite() {
                return Err(Error::domain("constraint bound must be finite"));
            }
            for t in &c.terms {
                check(t)?;
            }
        }
        Ok(())
    }

    /// Objective value at `x` in the problem's own sense.
    pub fn objective_value(&self, x: &[DMatrix<C64>]) -> f64 {
        self.objective.iter().map(|t| t.coeff.inner(&x[t.block])).sum::<f64>() + self.objective_constant
    }

    /// Largest violation of any constraint at `x`.
    pub fn max_violation(&self, x: &[DMatrix<C64>]) -> f64 {
        self.constraints
            .iter()
            .map(|c| {
                let lhs: f64 = c.terms.iter().map(|t| t.coeff.inner(&x[t.block])).sum();
                match c.relation {
                    Relation::Le => (lhs - c.rhs).max(0.0),
                    Relation::Ge => (c.rhs - lhs).max(0.0),
                    Relation::Eq => (lhs - c.rhs).abs(),
                }
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub blocks: Vec<DMatrix<C64>>,
    pub objective: f64,
    pub max_violation: f64,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Normalize constraint rows, bounds and objective before solving.
    pub scaling: bool,
    pub step_fraction: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-8, max_iter: 120, scaling: true, step_fraction: 0.98 }
    }
}

struct Row {
    terms: Vec<Term>,
    slack: Option<(usize, f64)>,
    b: f64,
}

struct Standard {
    dims: Vec<usize>,
    n_lp: usize,
    c: Vec<DMatrix<C64>>,
    rows: Vec<Row>,
}

#[derive(Clone)]
struct Point {
    x: Vec<DMatrix<C64>>,
    xl: DVector<f64>,
    z: Vec<DMatrix<C64>>,
    zl: DVector<f64>,
    y: DVector<f64>,
}

fn herm(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

fn re_trace_prod(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter().zip(b.transpose().iter()).map(|(x, y)| (x * y).re).sum()
}

fn inner_dense(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x * y.conj()).re).sum()
}

/// Largest step keeping `m + a d` positive definite, given `L⁻¹` of `m`.
fn max_step(li: &DMatrix<C64>, d: &DMatrix<C64>) -> f64 {
    let min = herm(&congruence(li, d)).symmetric_eigenvalues().min();
    if min < 0.0 {
        -1.0 / min
    } else {
        f64::INFINITY
    }
}

fn max_step_lp(x: &DVector<f64>, dx: &DVector<f64>) -> f64 {
    x.iter()
        .zip(dx.iter())
        .filter(|(_, d)| **d < 0.0)
        .map(|(v, d)| -v / d)
        .fold(f64::INFINITY, f64::min)
}

impl Standard {
    fn m(&self) -> usize {
        self.rows.len()
    }

    fn apply(&self, x: &[DMatrix<C64>], xl: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.m(),
            self.rows.iter().map(|r| {
                let mut v: f64 = r.terms.iter().map(|t| t.coeff.inner(&x[t.block])).sum();
                if let Some((s, sign)) = r.slack {
                    v += sign * xl[s];
                }
                v
            }),
        )
    }

    /// `A(G)` for a not necessarily Hermitian `G`, real part of the trace.
    fn apply_general(&self, g: &[DMatrix<C64>], gl: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.m(),
            self.rows.iter().map(|r| {
                let mut v: f64 = r
                    .terms
                    .iter()
                    .map(|t| match &t.coeff {
                        Coeff::Dense(a) => re_trace_prod(a, &g[t.block]),
                        Coeff::Diagonal(d) => d.iter().map(|&(i, w)| w * g[t.block][(i, i)].re).sum(),
                    })
                    .sum();
                if let Some((s, sign)) = r.slack {
                    v += sign * gl[s];
                }
                v
            }),
        )
    }

    fn adjoint(&self, y: &DVector<f64>) -> (Vec<DMatrix<C64>>, DVector<f64>) {
        let mut out: Vec<DMatrix<C64>> = self.dims.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        let mut lp = DVector::zeros(self.n_lp);
        for (r, &yi) in self.rows.iter().zip(y.iter()) {
            for t in &r.terms {
                t.coeff.add_to(&mut out[t.block], yi);
            }
            if let Some((s, sign)) = r.slack {
                lp[s] += sign * yi;
            }
        }
        (out, lp)
    }

    fn schur(&self, p: &Point, zinv: &[DMatrix<C64>]) -> DMatrix<f64> {
        let m = self.m();
        let mut mat = DMatrix::<f64>::zeros(m, m);
        for (k, &n) in self.dims.iter().enumerate() {
            let on_block: Vec<(usize, &Coeff)> = self
                .rows
                .iter()
                .enumerate()
                .flat_map(|(i, r)| r.terms.iter().filter(|t| t.block == k).map(move |t| (i, &t.coeff)))
                .collect();
            if on_block.is_empty() {
                continue;
            }
            let x = &p.x[k];
            let zi = &zinv[k];
            // H[a,b] = Re(X[a,b] Zinv[b,a]) covers diagonal-diagonal pairs
            let h = DMatrix::<f64>::from_fn(n, n, |a, b| (x[(a, b)] * zi[(b, a)]).re);
            for &(j, cj) in &on_block {
                match cj {
                    Coeff::Dense(aj) => {
                        let t = mul3(x, aj, zi);
                        for &(i, ci) in &on_block {
                            match ci {
                                Coeff::Dense(ai) => mat[(i, j)] += re_trace_prod(ai, &t),
                                Coeff::Diagonal(d) => {
                                    let v: f64 = d.iter().map(|&(a, w)| w * t[(a, a)].re).sum();
                                    mat[(i, j)] += v;
                                    mat[(j, i)] += v;
                                }
                            }
                        }
                    }
                    Coeff::Diagonal(dj) => {
                        for &(i, ci) in &on_block {
                            if let Coeff::Diagonal(di) = ci {
                                let mut v = 0.0;
                                for &(a, wa) in di {
                                    for &(b, wb) in dj {
                                        v += wa * wb * h[(a, b)];
                                    }
                                }
                                mat[(i, j)] += v;
                            }
                        }
                    }
                }
            }
        }
        for (i, ri) in self.rows.iter().enumerate() {
            if let Some((s, si)) = ri.slack {
                for (j, rj) in self.rows.iter().enumerate() {
                    if let Some((t, sj)) = rj.slack {
                        if s == t {
                            mat[(i, j)] += si * sj * p.xl[s] / p.zl[s];
                        }
                    }
                }
            }
        }
        (&mat + mat.transpose()) * 0.5
    }
}

fn build(problem: &SdpProblem, scaling: bool) -> (Standard, f64, f64) {
    let dims = problem.dims.clone();
    let sign = match problem.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut c: Vec<DMatrix<C64>> = dims.iter().map(|&n| DMatrix::zeros(n, n)).collect();
    for t in &problem.objective {
        t.coeff.add_to(&mut c[t.block], sign);
    }
    let mut n_lp = 0;
    let mut rows = Vec::with_capacity(problem.constraints.len());
    for con in &problem.constraints {
        let slack = match con.relation {
            Relation::Le => Some((n_lp, 1.0)),
            Relation::Ge => Some((n_lp, -1.0)),
            Relation::Eq => None,
        };
        if slack.is_some() {
            n_lp += 1;
        }
        let mut row = Row { terms: con.terms.clone(), slack, b: con.rhs };
        if scaling {
            let nrm = row.terms.iter().map(|t| t.coeff.norm_sq()).sum::<f64>().sqrt();
            if nrm > 0.0 {
                row.terms = row.terms.iter().map(|t| Term::new(t.block, t.coeff.scaled(1.0 / nrm))).collect();
                row.b /= nrm;
            }
        }
        rows.push(row);
    }
    let (mut c_scale, mut b_scale) = (1.0, 1.0);
    if scaling {
        let cn = c.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt();
        if cn > 0.0 {
            c_scale = cn;
            for m in &mut c {
                *m /= C64::new(cn, 0.0);
            }
        }
        let bn = rows.iter().map(|r| r.b.abs()).fold(0.0, f64::max);
        if bn > 1.0 {
            b_scale = bn;
            for r in &mut rows {
                r.b /= bn;
            }
        }
    }
    (Standard { dims, n_lp, c, rows }, c_scale, b_scale)
}

/// Inverse Cholesky factors of the primal and dual blocks.
struct Factors {
    x: Vec<DMatrix<C64>>,
    z: Vec<DMatrix<C64>>,
}

impl Factors {
    fn new(p: &Point) -> Option<Self> {
        let x = p.x.iter().map(inverse_cholesky_factor).collect::<Option<Vec<_>>>()?;
        let z = p.z.iter().map(inverse_cholesky_factor).collect::<Option<Vec<_>>>()?;
        Some(Factors { x, z })
    }
}

struct Direction {
    dx: Vec<DMatrix<C64>>,
    dxl: DVector<f64>,
    dz: Vec<DMatrix<C64>>,
    dzl: DVector<f64>,
    dy: DVector<f64>,
}

struct Residuals {
    rd: Vec<DMatrix<C64>>,
    rdl: DVector<f64>,
}

impl Standard {
    fn b(&self) -> DVector<f64> {
        DVector::from_iterator(self.m(), self.rows.iter().map(|r| r.b))
    }

    #[allow(clippy::too_many_arguments)]
    fn direction(
        &self,
        p: &Point,
        zinv: &[DMatrix<C64>],
        chol: &Cholesky<f64, nalgebra::Dyn>,
        res: &Residuals,
        sigma_mu: f64,
        corr: Option<(&[DMatrix<C64>], &DVector<f64>)>,
    ) -> Direction {
        let mut g: Vec<DMatrix<C64>> = Vec::with_capacity(self.dims.len());
        for (k, &n) in self.dims.iter().enumerate() {
            let mut inner = mul(&p.x[k], &res.rd[k]) - DMatrix::<C64>::identity(n, n) * C64::new(sigma_mu, 0.0);
            if let Some((c, _)) = corr {
                inner += &c[k];
            }
            g.push(mul(&inner, &zinv[k]));
        }
        let gl = DVector::from_fn(self.n_lp, |s, _| {
            let mut v = p.xl[s] * res.rdl[s] - sigma_mu;
            if let Some((_, cl)) = corr {
                v += cl[s];
            }
            v / p.zl[s]
        });
        let rhs = self.b() + self.apply_general(&g, &gl);
        let dy = chol.solve(&rhs);
        let (aty, atyl) = self.adjoint(&dy);
        let mut dx = Vec::with_capacity(self.dims.len());
        let mut dz = Vec::with_capacity(self.dims.len());
        for k in 0..self.dims.len() {
            let t = mul3(&p.x[k], &aty[k], &zinv[k]);
            dx.push(herm(&(t - &p.x[k] - &g[k])));
            dz.push(&res.rd[k] - &aty[k]);
        }
        let dxl = DVector::from_fn(self.n_lp, |s, _| -p.xl[s] - gl[s] + p.xl[s] * atyl[s] / p.zl[s]);
        let dzl = &res.rdl - &atyl;
        Direction { dx, dxl, dz, dzl, dy }
    }

    fn steps(&self, p: &Point, f: &Factors, d: &Direction) -> (f64, f64) {
        let mut ap = max_step_lp(&p.xl, &d.dxl);
        let mut ad = max_step_lp(&p.zl, &d.dzl);
        for k in 0..self.dims.len() {
            ap = ap.min(max_step(&f.x[k], &d.dx[k]));
            ad = ad.min(max_step(&f.z[k], &d.dz[k]));
        }
        (ap, ad)
    }

    fn complementarity(&self, x: &[DMatrix<C64>], xl: &DVector<f64>, z: &[DMatrix<C64>], zl: &DVector<f64>) -> f64 {
        x.iter().zip(z.iter()).map(|(a, b)| inner_dense(a, b)).sum::<f64>() + xl.dot(zl)
    }
}

fn failure(problem: &SdpProblem, status: SdpStatus, iterations: usize, message: String) -> SdpSolution {
    let blocks: Vec<DMatrix<C64>> = problem.dims.iter().map(|&n| DMatrix::zeros(n, n)).collect();
    SdpSolution {
        status,
        objective: f64::NAN,
        max_violation: problem.max_violation(&blocks),
        blocks,
        iterations,
        primal_residual: f64::NAN,
        dual_residual: f64::NAN,
        gap: f64::NAN,
        message,
    }
}

/// Solves `problem`. Infeasibility and numerical trouble are reported in the
/// status; only a malformed problem is an error.
pub fn solve_sdp(problem: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution> {
    problem.validate()?;
    let (std, c_scale, b_scale) = build(problem, opts.scaling);
    let m = std.m();
    let n_tot = (std.dims.iter().sum::<usize>() + std.n_lp) as f64;
    let b = std.b();
    let b_norm = b.norm();
    let c_norm = std.c.iter().map(|c| c.norm_squared()).sum::<f64>().sqrt();

    let max_a = std.rows.iter().map(|r| r.terms.iter().map(|t| t.coeff.norm_sq()).sum::<f64>().sqrt()).fold(0.0, f64::max);
    let max_b = b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let nb = std.dims.iter().copied().max().unwrap_or(1).max(1) as f64;
    let xi = 10f64.max(nb.sqrt()).max(nb * (1.0 + max_b) / (1.0 + max_a));
    let eta = 10f64.max(nb.sqrt()).max((1.0 + max_a.max(c_norm)) / nb.sqrt());
    let mut p = Point {
        x: std.dims.iter().map(|&n| DMatrix::identity(n, n) * C64::new(xi, 0.0)).collect(),
        xl: DVector::from_element(std.n_lp, xi),
        z: std.dims.iter().map(|&n| DMatrix::identity(n, n) * C64::new(eta, 0.0)).collect(),
        zl: DVector::from_element(std.n_lp, eta),
        y: DVector::zeros(m),
    };

    let mut last = (f64::NAN, f64::NAN, f64::NAN);
    for iter in 0..opts.max_iter {
        let ax = std.apply(&p.x, &p.xl);
        let rp = &b - &ax;
        let (aty, atyl) = std.adjoint(&p.y);
        let res = Residuals {
            rd: (0..std.dims.len()).map(|k| &std.c[k] - &aty[k] - &p.z[k]).collect(),
            rdl: -&atyl - &p.zl,
        };
        let pobj: f64 = std.c.iter().zip(p.x.iter()).map(|(c, x)| inner_dense(c, x)).sum();
        let dobj = b.dot(&p.y);
        let rd_norm = (res.rd.iter().map(|r| r.norm_squared()).sum::<f64>() + res.rdl.norm_squared()).sqrt();
        let relp = rp.norm() / (1.0 + b_norm);
        let reld = rd_norm / (1.0 + c_norm);
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        last = (relp, reld, gap);
        if relp <= opts.tol && reld <= opts.tol && gap <= opts.tol {
            return Ok(finish(problem, &p, b_scale, SdpStatus::Optimal, iter, last, "converged".into()));
        }
        // Farkas-type certificates on the scaled problem
        let aty_z = ((0..std.dims.len()).map(|k| (&aty[k] + &p.z[k]).norm_squared()).sum::<f64>()
            + (&atyl + &p.zl).norm_squared())
        .sqrt();
        if dobj > 0.0 && aty_z / dobj < opts.tol && dobj > 1e6 {
            return Ok(finish(problem, &p, b_scale, SdpStatus::Infeasible, iter, last, format!("dual ray, b'y = {dobj:.3e}")));
        }
        if pobj < 0.0 && ax.norm() / (-pobj) < opts.tol && -pobj > 1e6 {
            return Ok(finish(problem, &p, b_scale, SdpStatus::Unbounded, iter, last, format!("primal ray, <C,X> = {pobj:.3e}")));
        }

        let mu = std.complementarity(&p.x, &p.xl, &p.z, &p.zl) / n_tot;
        let Some(factors) = Factors::new(&p) else {
            return Ok(failure(problem, SdpStatus::NumericFailure, iter, "iterate lost definiteness".into()));
        };
        let zinv: Vec<DMatrix<C64>> = factors.z.iter().map(|li| herm(&inverse_from_factor(li))).collect();
        let schur = std.schur(&p, &zinv);
        let chol = match Cholesky::new(schur.clone()) {
            Some(c) => c,
            None => {
                let reg = 1e-14 * schur.diagonal().iter().fold(1.0f64, |a, v| a.max(v.abs()));
                match Cholesky::new(schur + DMatrix::identity(m, m) * reg) {
                    Some(c) => c,
                    None => return Ok(failure(problem, SdpStatus::NumericFailure, iter, "Schur complement not positive definite".into())),
                }
            }
        };

        let pred = std.direction(&p, &zinv, &chol, &res, 0.0, None);
        let (ap, ad) = std.steps(&p, &factors, &pred);
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let xa: Vec<_> = (0..std.dims.len()).map(|k| &p.x[k] + &pred.dx[k] * C64::new(ap, 0.0)).collect();
        let za: Vec<_> = (0..std.dims.len()).map(|k| &p.z[k] + &pred.dz[k] * C64::new(ad, 0.0)).collect();
        let mu_aff = std.complementarity(&xa, &(&p.xl + &pred.dxl * ap), &za, &(&p.zl + &pred.dzl * ad)) / n_tot;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        let corr: Vec<DMatrix<C64>> = (0..std.dims.len()).map(|k| mul(&pred.dx[k], &pred.dz[k])).collect();
        let corrl = pred.dxl.component_mul(&pred.dzl);
        let d = std.direction(&p, &zinv, &chol, &res, sigma * mu, Some((&corr, &corrl)));
        let (ap, ad) = std.steps(&p, &factors, &d);
        let ap = (opts.step_fraction * ap).min(1.0);
        let ad = (opts.step_fraction * ad).min(1.0);
        for k in 0..std.dims.len() {
            p.x[k] = herm(&(&p.x[k] + &d.dx[k] * C64::new(ap, 0.0)));
            p.z[k] = herm(&(&p.z[k] + &d.dz[k] * C64::new(ad, 0.0)));
        }
        p.xl += &d.dxl * ap;
        p.zl += &d.dzl * ad;
        p.y += &d.dy * ad;
        if !p.y.iter().all(|v| v.is_finite()) {
            return Ok(failure(problem, SdpStatus::NumericFailure, iter, "non-finite iterate".into()));
        }
    }
    let _ = c_scale;
    Ok(finish(
        problem,
        &p,
        b_scale,
        SdpStatus::NumericFailure,
        opts.max_iter,
        last,
        format!("iteration limit: residuals p={:.2e} d={:.2e} gap={:.2e}", last.0, last.1, last.2),
    ))
}

fn finish(
    problem: &SdpProblem,
    p: &Point,
    b_scale: f64,
    status: SdpStatus,
    iterations: usize,
    res: (f64, f64, f64),
    message: String,
) -> SdpSolution {
    let blocks: Vec<DMatrix<C64>> = p.x.iter().map(|x| herm(x) * C64::new(b_scale, 0.0)).collect();
    SdpSolution {
        status,
        objective: problem.objective_value(&blocks),
        max_violation: problem.max_violation(&blocks),
        blocks,
        iterations,
        primal_residual: res.0,
        dual_residual: res.1,
        gap: res.2,
        message,
    }
}
