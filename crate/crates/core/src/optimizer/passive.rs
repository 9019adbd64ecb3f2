//! Joint reflect/transmit coefficient design: Dinkelbach iterations on the
//! lifted surface matrices, with a growing rank-one penalty.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::conic::{linearize_spectral_norm, rank_one_gap, solve_sdp, Coeff, Relation, SdpProblem, SdpStatus, Sense, SolverOptions, Term};
use crate::error::{Error, Result};
use crate::model::{StarRisState, C64};
use crate::optimizer::covert::phi_epsilon;
use crate::optimizer::{outer, Instance, Layout, OptimizerState, Tolerances};

/// Relative tightening of the passive constraints so that recovered
/// iterates stay feasible after solver round-off.
const MARGIN: f64 = 1e-7;

/// Normalized quadratic data of the passive subproblem over the active
/// reflect (`r_idx`) and transmit (`t_idx`) elements.
#[derive(Debug, Clone)]
pub struct PassiveData {
    pub r_idx: Vec<usize>,
    pub t_idx: Vec<usize>,
    pub coupled: bool,
    /// Bob's covert signal, in units of σ_b².
    pub c: DMatrix<C64>,
    /// Public-stream leakage to Bob.
    pub d: DMatrix<C64>,
    /// Jamming leakage to Bob including `P_j^max (1-ι)`.
    pub e: DMatrix<C64>,
    /// `F - (2^{R*}-1) G` in units of σ_c².
    pub qos: DMatrix<C64>,
    pub qos_rhs: f64,
    /// `l_rw |h_rc|²` on transmit elements.
    pub covert_weights: Vec<f64>,
    /// φ(ε); zero when the covert constraint is vacuous or frozen.
    pub phi: f64,
}

fn sub_outer(v: &DVector<C64>, idx: &[usize]) -> DMatrix<C64> {
    let s = DVector::from_fn(idx.len(), |k, _| v[idx[k]]);
    outer(&s)
}

impl PassiveData {
    pub fn new(inst: &Instance, state: &OptimizerState) -> Result<Self> {
        let (cfg, ch) = (inst.cfg, inst.ch);
        let n = ch.n();
        let r_idx = inst.layout.reflect_indices(n);
        let t_idx = inst.layout.transmit_indices(n);
        let hw_b = &ch.h_ar * &state.bf.w_b;
        let hw_c = &ch.h_ar * &state.bf.w_c;
        let rb = ch.h_rb.map(|z| z.conj());
        let rc = ch.h_rc.map(|z| z.conj());
        let c = sub_outer(&rb.component_mul(&hw_b), &r_idx) / C64::new(cfg.sigma_b2, 0.0);
        let d = sub_outer(&rb.component_mul(&hw_c), &r_idx) / C64::new(cfg.sigma_b2, 0.0);
        let jam = cfg.p_j_max * (1.0 - cfg.iota) / cfg.sigma_b2;
        let e = sub_outer(&rb.component_mul(&rc), &t_idx) * C64::new(jam, 0.0);
        let q = inst.qos_factor();
        let f = sub_outer(&rc.component_mul(&hw_c), &t_idx);
        let g = sub_outer(&rc.component_mul(&hw_b), &t_idx);
        let qos = (f - g * C64::new(q, 0.0)) / C64::new(cfg.sigma_c2, 0.0);
        let qos_rhs = q * (inst.sigma_star + cfg.sigma_c2) / cfg.sigma_c2;
        let covert_weights = t_idx.iter().map(|&i| ch.l_rw * ch.h_rc[i].norm_sqr()).collect();
        let (vb, vc) = (state.bf.varpi_b(), state.bf.varpi_c());
        let phi = if inst.layout == Layout::Star && vb > 0.0 {
            phi_epsilon(cfg.epsilon, vb, vc, inst.willie_gain(), cfg.p_j_max)?
        } else {
            0.0
        };
        Ok(PassiveData { r_idx, t_idx, coupled: inst.layout == Layout::Star, c, d, e, qos, qos_rhs, covert_weights, phi })
    }

    pub fn numerator(&self, q_r: &DMatrix<C64>) -> f64 {
        Coeff::Dense(self.c.clone()).inner(q_r)
    }

    pub fn denominator(&self, q_r: &DMatrix<C64>, q_t: &DMatrix<C64>) -> f64 {
        Coeff::Dense(self.d.clone()).inner(q_r) + Coeff::Dense(self.e.clone()).inner(q_t) + 1.0
    }

    /// Restriction of the lifted surface to the active elements.
    pub fn lift(&self, ris: &StarRisState) -> (DMatrix<C64>, DMatrix<C64>) {
        let vr = ris.theta_r_vec().map(|z| z.conj());
        let vt = ris.theta_t_vec().map(|z| z.conj());
        (sub_outer(&vr, &self.r_idx), sub_outer(&vt, &self.t_idx))
    }
}

/// Penalized Dinkelbach quotient `(num - ρ₁η_r - ρ₂η_t) / den`.
pub fn dinkelbach_quotient(numerator: f64, denominator: f64, penalty: f64) -> f64 {
    (numerator - penalty) / denominator
}

fn penalty(q_r: &DMatrix<C64>, q_t: &DMatrix<C64>, rho: (f64, f64)) -> Result<(f64, f64, f64)> {
    let (gr, gt) = (rank_one_gap(q_r)?, rank_one_gap(q_t)?);
    Ok((rho.0 * gr + rho.1 * gt, gr, gt))
}

/// Result of one convex inner problem.
#[derive(Debug, Clone)]
pub struct InnerStep {
    pub q_r: DMatrix<C64>,
    pub q_t: DMatrix<C64>,
    /// Optimal value of the linearized penalized objective.
    pub value: f64,
    /// Updated quotient at the new iterate.
    pub chi: f64,
}

fn solver_options() -> SolverOptions {
    SolverOptions { tol: 1e-9, max_iter: 150, ..SolverOptions::default() }
}

/// One Dinkelbach step at quotient `chi` and penalties `rho`, linearized at `(q_r, q_t)`.
pub fn passive_inner_step(
    data: &PassiveData,
    q_r: &DMatrix<C64>,
    q_t: &DMatrix<C64>,
    chi: f64,
    rho: (f64, f64),
) -> Result<InnerStep> {
    let (nr, nt) = (data.r_idx.len(), data.t_idx.len());
    let mr = linearize_spectral_norm(q_r);
    let mt = linearize_spectral_norm(q_t);
    let ir = DMatrix::<C64>::identity(nr, nr);
    let it = DMatrix::<C64>::identity(nt, nt);
    let obj_r = &data.c - &data.d * C64::new(chi, 0.0) - (ir - mr.projector()) * C64::new(rho.0, 0.0);
    let obj_t = -(&data.e * C64::new(chi, 0.0)) - (it - mt.projector()) * C64::new(rho.1, 0.0);

    let mut p = SdpProblem::new(vec![nr, nt], Sense::Maximize);
    p.add_objective(0, Coeff::Dense(obj_r));
    p.add_objective(1, Coeff::Dense(obj_t));
    p.objective_constant = -chi;
    if data.coupled {
        for i in 0..nr {
            p.add_constraint(
                vec![Term::new(0, Coeff::Diagonal(vec![(i, 1.0)])), Term::new(1, Coeff::Diagonal(vec![(i, 1.0)]))],
                Relation::Eq,
                1.0,
            );
        }
        if data.phi > 0.0 {
            let w: Vec<(usize, f64)> = data.covert_weights.iter().copied().enumerate().collect();
            let phi = data.phi * (1.0 + MARGIN);
            p.add_constraint(
                vec![Term::new(1, Coeff::Diagonal(w)), Term::new(0, Coeff::Diagonal((0..nr).map(|i| (i, -phi)).collect()))],
                Relation::Ge,
                0.0,
            );
        }
    } else {
        p.pin_diagonal(0, &vec![1.0; nr]);
        p.pin_diagonal(1, &vec![1.0; nt]);
    }
    p.add_constraint(vec![Term::new(1, Coeff::Dense(data.qos.clone()))], Relation::Ge, data.qos_rhs * (1.0 + MARGIN));

    let sol = solve_sdp(&p, &solver_options())?;
    match sol.status {
        SdpStatus::Optimal => {}
        SdpStatus::Infeasible => return Err(Error::Infeasible(sol.message)),
        s => return Err(Error::Solver(format!("{s:?}: {}", sol.message))),
    }
    let q_r = sol.blocks[0].clone();
    let q_t = sol.blocks[1].clone();
    let (pen, _, _) = penalty(&q_r, &q_t, rho)?;
    let chi = dinkelbach_quotient(data.numerator(&q_r), data.denominator(&q_r, &q_t), pen);
    Ok(InnerStep { q_r, q_t, value: sol.objective, chi })
}

/// Diagnostics of one passive design call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassiveOutcome {
    /// The recovered surface replaced the previous one.
    pub accepted: bool,
    /// Penalty loop met `eps_penalty`.
    pub converged: bool,
    pub v1: f64,
    pub v2: f64,
    pub chi: f64,
    pub rho: f64,
    pub penalty_iterations: usize,
    pub dinkelbach_iterations: usize,
    /// Quotient sequence of each inner loop.
    pub chi_trace: Vec<Vec<f64>>,
    /// Rank-one gap after each penalty iteration.
    pub v1_trace: Vec<f64>,
    pub phi: f64,
    pub message: String,
}

fn top_conj_vector(q: &DMatrix<C64>) -> DVector<C64> {
    let h = (q + q.adjoint()) * C64::new(0.5, 0.0);
    let e = SymmetricEigen::new(h);
    let k = e.eigenvalues.imax();
    let s = e.eigenvalues[k].max(0.0).sqrt();
    e.eigenvectors.column(k).map(|z| z.conj() * s)
}

/// Surface coefficients from the lifted matrices.
pub fn recover_surface(data: &PassiveData, q_r: &DMatrix<C64>, q_t: &DMatrix<C64>, prev: &StarRisState) -> Result<StarRisState> {
    let vr = top_conj_vector(q_r);
    let vt = top_conj_vector(q_t);
    let mut beta_r = prev.beta_r().clone();
    let mut phi_r = prev.phi_r().clone();
    let mut phi_t = prev.phi_t().clone();
    for (k, &i) in data.r_idx.iter().enumerate() {
        if data.coupled {
            beta_r[i] = vr[k].norm_sqr().clamp(0.0, 1.0);
        }
        phi_r[i] = vr[k].arg();
    }
    for (k, &i) in data.t_idx.iter().enumerate() {
        phi_t[i] = vt[k].arg();
    }
    StarRisState::new(beta_r, phi_r, phi_t)
}

/// Penalty outer loop around Dinkelbach inner loops, then rank-one recovery
/// with monotone acceptance against the incoming surface.
pub fn algorithm1_passive(inst: &Instance, state: &mut OptimizerState, tol: &Tolerances) -> Result<PassiveOutcome> {
    let data = PassiveData::new(inst, state)?;
    let (mut q_r, mut q_t) = data.lift(&state.ris);
    let mut rho = (tol.rho_init, tol.rho_init);
    let mut v1 = rank_one_gap(&q_r)?.max(rank_one_gap(&q_t)?);
    let mut out = PassiveOutcome {
        accepted: false,
        converged: false,
        v1,
        v2: 0.0,
        chi: 0.0,
        rho: rho.0,
        penalty_iterations: 0,
        dinkelbach_iterations: 0,
        chi_trace: Vec::new(),
        v1_trace: Vec::new(),
        phi: data.phi,
        message: String::new(),
    };
    let mut failed = None;
    let mut l = 0;
    // end of the previous penalty pass: (q_r, q_t, v1, chi)
    let mut kept: Option<(DMatrix<C64>, DMatrix<C64>, f64, f64)> = None;
    while (v1 > tol.eps_penalty || l == 0) && l < tol.max_penalty {
        let (pen, _, _) = penalty(&q_r, &q_t, rho)?;
        let mut chi = dinkelbach_quotient(data.numerator(&q_r), data.denominator(&q_r, &q_t), pen);
        let mut chis = vec![chi];
        let mut prev_value = 0.0;
        for k in 0..tol.max_dinkelbach {
            let step = match passive_inner_step(&data, &q_r, &q_t, chi, rho) {
                Ok(s) => s,
                Err(e @ (Error::Infeasible(_) | Error::Solver(_))) => {
                    failed = Some(e.to_string());
                    break;
                }
                Err(e) => return Err(e),
            };
            out.dinkelbach_iterations += 1;
            // the first step only enters the margin-tightened set; later
            // steps that lose ground to solver round-off are refused
            if k > 0 && step.chi < chi {
                break;
            }
            out.v2 = (step.value - prev_value).abs() / chi.abs().max(1.0);
            prev_value = step.value;
            q_r = step.q_r;
            q_t = step.q_t;
            chi = step.chi;
            chis.push(chi);
            if out.v2 <= tol.eps_dinkelbach {
                break;
            }
        }
        out.chi_trace.push(chis);
        v1 = rank_one_gap(&q_r)?.max(rank_one_gap(&q_t)?);
        match &kept {
            // a pass that widens the rank-one gap is dropped
            Some((r, t, g, c)) if v1 > *g => {
                q_r = r.clone();
                q_t = t.clone();
                v1 = *g;
                chi = *c;
            }
            _ => kept = Some((q_r.clone(), q_t.clone(), v1, chi)),
        }
        out.chi = chi;
        out.v1_trace.push(v1);
        out.rho = rho.0;
        l += 1;
        if failed.is_some() {
            break;
        }
        rho = (rho.0 * tol.omega, rho.1 * tol.omega);
    }
    out.v1 = v1;
    out.penalty_iterations = l;
    out.converged = v1 <= tol.eps_penalty && failed.is_none();
    state.q_r = q_r.clone();
    state.q_t = q_t.clone();
    state.chi = out.chi;
    state.rho = (out.rho, out.rho);
    if let Some(m) = failed {
        out.message = m;
        if out.dinkelbach_iterations == 0 {
            return Ok(out);
        }
    }

    let cand = recover_surface(&data, &q_r, &q_t, &state.ris)?;
    let old = inst.check(&state.ris, &state.bf);
    let new = inst.check(&cand, &state.bf);
    if !new.feasible() {
        out.message = format!("recovered surface infeasible: {new:?}");
    } else if old.feasible() && new.r_bb < old.r_bb {
        out.message = format!("objective would drop {} -> {}", old.r_bb, new.r_bb);
    } else {
        state.ris = cand;
        out.accepted = true;
    }
    Ok(out)
}
