//! SDR subproblems for the covert beamformer `w_b` and the public beamformer `w_c`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::conic::{
    extract_rank_one, solve_sdp, Coeff, QuadForm, RankOneProblem, Relation, SdpProblem, SdpStatus, Sense,
    SolverOptions, Term,
};
use crate::error::{Error, Result};
use crate::model::{cascade_vectors, Beamformers, StarRisState, C64};
use crate::optimizer::covert::{covert_power_cap, linearized_covert_cap};
use crate::optimizer::{outer, Instance, OptimizerState};

/// What a subproblem did to the iterate.
#[derive(Debug, Clone, PartialEq)]
pub enum ActiveOutcome {
    Accepted { objective: f64 },
    /// Candidate found but rejected by monotone acceptance.
    Kept { reason: String },
    /// The subproblem has no feasible point at the current iterate.
    Infeasible { reason: String },
}

impl ActiveOutcome {
    pub fn accepted(&self) -> bool {
        matches!(self, ActiveOutcome::Accepted { .. })
    }
}

pub(crate) fn lambda_max(m: &DMatrix<C64>) -> f64 {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    SymmetricEigen::new(h).eigenvalues.max()
}

fn vector_problem(sense: Sense, objective: &DMatrix<C64>, rows: &[(DMatrix<C64>, Relation, f64)]) -> (SdpProblem, RankOneProblem) {
    let m = objective.nrows();
    let mut sdp = SdpProblem::new(vec![m], sense);
    sdp.add_objective(0, Coeff::Dense(objective.clone()));
    let mut quad = Vec::new();
    for (a, rel, rhs) in rows {
        sdp.add_constraint(vec![Term::new(0, Coeff::Dense(a.clone()))], *rel, *rhs);
        quad.push(QuadForm { matrix: a.clone(), relation: *rel, rhs: *rhs });
    }
    (sdp, RankOneProblem { sense, objective: objective.clone(), constraints: quad })
}

fn solve_and_extract(
    sdp: &SdpProblem,
    r1: &RankOneProblem,
    n_rand: usize,
    seed: u64,
) -> Result<(DMatrix<C64>, DVector<C64>)> {
    let sol = solve_sdp(sdp, &SolverOptions::default())?;
    match sol.status {
        SdpStatus::Optimal => {}
        SdpStatus::Infeasible => return Err(Error::Infeasible(sol.message)),
        _ => return Err(Error::Solver(format!("{:?}: {}", sol.status, sol.message))),
    }
    let w = sol.blocks[0].clone();
    let r = extract_rank_one(&w, r1, n_rand, seed)?;
    Ok((w, r.v))
}

fn accept_if_better(
    inst: &Instance,
    state: &mut OptimizerState,
    lift: DMatrix<C64>,
    bf: Beamformers,
    is_wb: bool,
) -> ActiveOutcome {
    let old = inst.check(&state.ris, &state.bf);
    let new = inst.check(&state.ris, &bf);
    if !new.feasible() {
        return ActiveOutcome::Kept { reason: format!("recovered beamformer infeasible: {new:?}") };
    }
    if old.feasible() && new.r_bb < old.r_bb {
        return ActiveOutcome::Kept { reason: format!("objective would drop {} -> {}", old.r_bb, new.r_bb) };
    }
    state.bf = bf;
    if is_wb {
        state.w_b_lift = lift;
    } else {
        state.w_c_lift = lift;
    }
    ActiveOutcome::Accepted { objective: new.r_bb }
}

/// Maximizes Bob's covert signal power over `W_b` with `w_c` and the surface fixed.
pub fn solve_wb_subproblem(inst: &Instance, state: &mut OptimizerState, n_rand: usize, seed: u64) -> Result<ActiveOutcome> {
    let cfg = inst.cfg;
    let cas = cascade_vectors(inst.ch, &state.ris);
    let (scale, jam) = inst.covert_terms(&cas);
    let vc = state.bf.varpi_c();
    let budget = cfg.p_max - vc;
    let cap = if cfg.epsilon > 0.0 && jam > 0.0 {
        linearized_covert_cap(cfg.epsilon, state.bf.varpi_b(), vc, scale, jam)?
    } else {
        f64::INFINITY
    };
    let q = inst.qos_factor();
    let carol_signal = cas.carol_transmit.dot(&state.bf.w_c).norm_sqr();
    // leakage cap at Carol, in units of σ_c²
    let f = (carol_signal / q - inst.sigma_star - cfg.sigma_c2) / cfg.sigma_c2;
    let trace_cap = budget.min(cap);
    if f < 0.0 {
        return Ok(ActiveOutcome::Infeasible { reason: "Carol's QoS floor is unmet by w_c alone".into() });
    }
    if !(trace_cap > 0.0) {
        return Ok(ActiveOutcome::Infeasible { reason: "no power left for the covert stream".into() });
    }
    let a_mat = outer(&cas.bob_reflect.map(|z| z.conj())) / C64::new(cfg.sigma_b2, 0.0);
    let b_mat = outer(&cas.carol_transmit.map(|z| z.conj())) / C64::new(cfg.sigma_c2, 0.0);
    let m = a_mat.nrows();
    let rows = [(DMatrix::identity(m, m), Relation::Le, trace_cap), (b_mat, Relation::Le, f)];
    let (sdp, r1) = vector_problem(Sense::Maximize, &a_mat, &rows);
    let (lift, w_b) = match solve_and_extract(&sdp, &r1, n_rand, seed) {
        Ok(v) => v,
        Err(Error::Infeasible(m)) => return Ok(ActiveOutcome::Infeasible { reason: m }),
        Err(Error::Solver(m)) => return Ok(ActiveOutcome::Kept { reason: m }),
        Err(e) => return Err(e),
    };
    let bf = Beamformers::new(w_b, state.bf.w_c.clone());
    Ok(accept_if_better(inst, state, lift, bf, true))
}

/// Minimizes the public stream's leakage to Bob subject to Carol's QoS floor
/// and the covert lower bound on `ϖ_c`.
pub fn solve_wc_subproblem(inst: &Instance, state: &mut OptimizerState, n_rand: usize, seed: u64) -> Result<ActiveOutcome> {
    let cfg = inst.cfg;
    let cas = cascade_vectors(inst.ch, &state.ris);
    let (scale, jam) = inst.covert_terms(&cas);
    let vb = state.bf.varpi_b();
    let budget = cfg.p_max - vb;
    let floor_covert = if vb > 0.0 && jam > 0.0 { covert_power_cap(cfg.epsilon, vb, scale, jam).max(0.0) } else { 0.0 };
    let q = inst.qos_factor();
    let carol_leak = cas.carol_transmit.dot(&state.bf.w_b).norm_sqr();
    let f_hat = q * (carol_leak + inst.sigma_star + cfg.sigma_c2) / cfg.sigma_c2;
    let a_mat = outer(&cas.bob_reflect.map(|z| z.conj())) / C64::new(cfg.sigma_b2, 0.0);
    let b_mat = outer(&cas.carol_transmit.map(|z| z.conj())) / C64::new(cfg.sigma_c2, 0.0);
    let lmax = lambda_max(&b_mat);
    if !(lmax > 0.0) || budget < floor_covert.max(f_hat / lmax) {
        return Ok(ActiveOutcome::Infeasible { reason: "QoS floor or covert floor exceeds the power left".into() });
    }
    let m = a_mat.nrows();
    let mut rows = vec![(DMatrix::identity(m, m), Relation::Le, budget), (b_mat, Relation::Ge, f_hat)];
    if floor_covert > 0.0 {
        rows.push((DMatrix::identity(m, m), Relation::Ge, floor_covert));
    }
    let (sdp, r1) = vector_problem(Sense::Minimize, &a_mat, &rows);
    let (lift, w_c) = match solve_and_extract(&sdp, &r1, n_rand, seed) {
        Ok(v) => v,
        Err(Error::Infeasible(m)) => return Ok(ActiveOutcome::Infeasible { reason: m }),
        Err(Error::Solver(m)) => return Ok(ActiveOutcome::Kept { reason: m }),
        Err(e) => return Err(e),
    };
    let bf = Beamformers::new(state.bf.w_b.clone(), w_c);
    Ok(accept_if_better(inst, state, lift, bf, false))
}

/// Bob-signal matrix `A` and Carol-signal matrix `B` for the current surface.
pub fn active_matrices(inst: &Instance, ris: &StarRisState) -> (DMatrix<C64>, DMatrix<C64>) {
    let cas = cascade_vectors(inst.ch, ris);
    (outer(&cas.bob_reflect.map(|z| z.conj())), outer(&cas.carol_transmit.map(|z| z.conj())))
}
