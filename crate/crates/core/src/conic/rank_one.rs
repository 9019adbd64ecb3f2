//! Rank-one gap, its spectral-norm linearization and vector recovery.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::conic::sdp::{Relation, Sense};
use crate::error::{Error, Result};
use crate::model::{cn01, substream_rng, C64};

fn eigen(q: &DMatrix<C64>) -> SymmetricEigen<C64, nalgebra::Dyn> {
    SymmetricEigen::new((q + q.adjoint()) * C64::new(0.5, 0.0))
}

fn top_index(ev: &DVector<f64>) -> usize {
    ev.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc })
        .0
}

/// `Tr(Q) - ‖Q‖₂`, the sum of every eigenvalue but the largest.
pub fn rank_one_gap(q: &DMatrix<C64>) -> Result<f64> {
    let ev = eigen(q).eigenvalues;
    let top = top_index(&ev);
    let scale = ev.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    if ev.iter().any(|&v| v < -1e-8 * scale) {
        return Err(Error::domain("matrix is not positive semidefinite"));
    }
    let rest: f64 = ev.iter().enumerate().filter(|&(i, _)| i != top).map(|(_, v)| v).sum();
    Ok(rest.max(0.0))
}

/// Affine minorant `‖Q_ref‖₂ + Tr(q qᴴ (Q - Q_ref))` of the spectral norm.
///
/// With a repeated top eigenvalue any top eigenvector is used; the bound
/// holds for each of them.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMinorant {
    pub q: DVector<C64>,
    pub norm: f64,
    pub reference: DMatrix<C64>,
}

impl SpectralMinorant {
    /// `q qᴴ`.
    pub fn projector(&self) -> DMatrix<C64> {
        &self.q * self.q.adjoint()
    }

    pub fn evaluate(&self, q_mat: &DMatrix<C64>) -> f64 {
        let d = q_mat - &self.reference;
        self.norm + (self.q.adjoint() * d * &self.q)[(0, 0)].re
    }
}

pub fn linearize_spectral_norm(q_ref: &DMatrix<C64>) -> SpectralMinorant {
    let e = eigen(q_ref);
    let top = top_index(&e.eigenvalues);
    SpectralMinorant {
        q: e.eigenvectors.column(top).into_owned(),
        norm: e.eigenvalues[top],
        reference: q_ref.clone(),
    }
}

/// `vᴴ A v (rel) rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadForm {
    pub matrix: DMatrix<C64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// Homogeneous quadratic program whose lifting produced the SDP solution.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneProblem {
    pub sense: Sense,
    pub objective: DMatrix<C64>,
    pub constraints: Vec<QuadForm>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankOneResult {
    pub v: DVector<C64>,
    pub objective: f64,
    /// 0 for the eigenvector, `k` for the k-th randomization.
    pub candidate: usize,
}

fn quad(a: &DMatrix<C64>, v: &DVector<C64>) -> f64 {
    (v.adjoint() * a * v)[(0, 0)].re
}

const FEAS_TOL: f64 = 1e-9;

/// Feasible range of `t = s²` for the scaled candidate `s v`.
fn scale_interval(p: &RankOneProblem, v: &DVector<C64>) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    for c in &p.constraints {
        let a = quad(&c.matrix, v);
        let slack = FEAS_TOL * (1.0 + c.rhs.abs());
        let tiny = a.abs() <= 1e-300;
        match c.relation {
            Relation::Le if tiny => {
                if c.rhs < -slack {
                    return None;
                }
            }
            Relation::Ge if tiny => {
                if c.rhs > slack {
                    return None;
                }
            }
            Relation::Eq if tiny => {
                if c.rhs.abs() > slack {
                    return None;
                }
            }
            Relation::Le => {
                if a > 0.0 {
                    hi = hi.min(c.rhs / a);
                } else {
                    lo = lo.max(c.rhs / a);
                }
            }
            Relation::Ge => {
                if a > 0.0 {
                    lo = lo.max(c.rhs / a);
                } else {
                    hi = hi.min(c.rhs / a);
                }
            }
            Relation::Eq => {
                let t = c.rhs / a;
                lo = lo.max(t);
                hi = hi.min(t);
            }
        }
    }
    if lo > hi * (1.0 + 1e-12) + 1e-300 {
        return None;
    }
    Some((lo, hi.max(lo)))
}

/// Best feasible rescaled candidate among the top eigenvector and
/// `n_randomizations` Gaussian draws `U Λ^{1/2} ξ`, `ξ ~ CN(0, I)`.
///
/// Each candidate is scaled by the feasible factor that is best for the
/// objective. Ties keep the lowest candidate index.
pub fn extract_rank_one(
    q: &DMatrix<C64>,
    problem: &RankOneProblem,
    n_randomizations: usize,
    seed: u64,
) -> Result<RankOneResult> {
    let e = eigen(q);
    let n = q.nrows();
    let top = top_index(&e.eigenvalues);
    let trace: f64 = e.eigenvalues.iter().map(|v| v.max(0.0)).sum();
    let mut first = e.eigenvectors.column(top).into_owned();
    if trace > 0.0 {
        first *= C64::new(trace.sqrt(), 0.0);
    }
    let root = DMatrix::from_fn(n, n, |i, j| e.eigenvectors[(i, j)] * e.eigenvalues[j].max(0.0).sqrt());
    let mut rng = substream_rng(seed, 77);

    let mut best: Option<RankOneResult> = None;
    for idx in 0..=n_randomizations {
        let v = if idx == 0 {
            first.clone()
        } else {
            let xi = DVector::from_fn(n, |_, _| cn01(&mut rng));
            &root * xi
        };
        if v.norm_squared() == 0.0 {
            continue;
        }
        let Some((lo, hi)) = scale_interval(problem, &v) else { continue };
        let o = quad(&problem.objective, &v);
        let want_large = matches!(problem.sense, Sense::Maximize) == (o >= 0.0);
        let t = if want_large { hi } else { lo };
        if !t.is_finite() {
            return Err(Error::Infeasible("objective unbounded along a candidate".into()));
        }
        let cand = &v * C64::new(t.sqrt(), 0.0);
        let val = o * t;
        let better = match &best {
            None => true,
            Some(b) => match problem.sense {
                Sense::Maximize => val > b.objective,
                Sense::Minimize => val < b.objective,
            },
        };
        if better {
            best = Some(RankOneResult { v: cand, objective: val, candidate: idx });
        }
    }
    best.ok_or_else(|| Error::Infeasible("no feasible rank-one candidate".into()))
}
