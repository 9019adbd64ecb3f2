//! Outer alternating loop: `w_b`, then `w_c`, then the surface.

use nalgebra::{DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{cascade_vectors, Beamformers, StarRisState, C64};
use crate::optimizer::active::{solve_wb_subproblem, solve_wc_subproblem, ActiveOutcome};
use crate::optimizer::covert::covert_power_cap;
use crate::optimizer::passive::{algorithm1_passive, PassiveOutcome};
use crate::optimizer::{outer, ConstraintReport, Instance, Layout, OptimizerState, Tolerances, TraceRecord};

/// Output of [`algorithm2_alternating`].
#[derive(Debug, Clone)]
pub struct Solution {
    pub bf: Beamformers,
    pub ris: StarRisState,
    pub r_bb: f64,
    pub converged: bool,
    pub iterations: usize,
    pub trace: Vec<TraceRecord>,
    pub check: ConstraintReport,
    pub last_passive: Option<PassiveOutcome>,
    /// Active-step outcomes as `(w_b, w_c)` per iteration.
    pub active: Vec<(ActiveOutcome, ActiveOutcome)>,
    pub init_attempts: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum PhaseStart {
    /// Phases aligned to Bob on the reflect side and Carol on the transmit side.
    Coherent,
    Random(u64),
}

fn dominant(m: &nalgebra::DMatrix<C64>) -> DVector<C64> {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let e = SymmetricEigen::new(h);
    e.eigenvectors.column(e.eigenvalues.imax()).into_owned()
}

fn start_surface(inst: &Instance, start: PhaseStart) -> StarRisState {
    let n = inst.ch.n();
    let beta = inst.layout.initial_beta_r(n);
    match start {
        PhaseStart::Random(s) => {
            let r = StarRisState::random(n, s, 900);
            StarRisState::new(beta, r.phi_r().clone(), r.phi_t().clone()).expect("valid amplitudes")
        }
        PhaseStart::Coherent => {
            // align each element's cascade with the strongest Alice direction
            let ch = inst.ch;
            let u = dominant(&(ch.h_ar.adjoint() * &ch.h_ar));
            let hu = &ch.h_ar * u;
            let phi_r = DVector::from_fn(n, |i, _| -(ch.h_rb[i].conj() * hu[i]).arg());
            let phi_t = DVector::from_fn(n, |i, _| -(ch.h_rc[i].conj() * hu[i]).arg());
            StarRisState::new(beta, phi_r, phi_t).expect("valid amplitudes")
        }
    }
}

/// Dominant-eigenvector beamformers with a (2/3, 1/3) power split, repaired
/// by shrinking `ϖ_b` and raising `ϖ_c` toward the QoS and covert floors.
fn repaired_beamformers(inst: &Instance, ris: &StarRisState) -> Option<Beamformers> {
    let cfg = inst.cfg;
    let cas = cascade_vectors(inst.ch, ris);
    let ub = dominant(&outer(&cas.bob_reflect.map(|z| z.conj())));
    let uc = dominant(&outer(&cas.carol_transmit.map(|z| z.conj())));
    let gain_cc = cas.carol_transmit.dot(&uc).norm_sqr();
    let gain_cb = cas.carol_transmit.dot(&ub).norm_sqr();
    let (scale, jam) = inst.covert_terms(&cas);
    let q = inst.qos_factor();
    if !(gain_cc > 0.0) {
        return None;
    }
    let mut vb = cfg.p_max * 2.0 / 3.0;
    for _ in 0..200 {
        let qos_floor = q * (vb * gain_cb + inst.sigma_star + cfg.sigma_c2) / gain_cc;
        let covert_floor = if jam > 0.0 { covert_power_cap(cfg.epsilon, vb, scale, jam) } else { f64::INFINITY };
        let vc = (cfg.p_max / 3.0).max(qos_floor).max(covert_floor) * (1.0 + 1e-9);
        if vb + vc <= cfg.p_max {
            let bf = Beamformers::new(ub.clone() * C64::new(vb.sqrt(), 0.0), uc.clone() * C64::new(vc.sqrt(), 0.0));
            if inst.check(ris, &bf).feasible() {
                return Some(bf);
            }
        }
        vb *= 0.8;
    }
    None
}

/// Feasible starting point; the first attempt is coherent, later ones use
/// fresh random phases.
pub fn initialize(inst: &Instance, tol: &Tolerances, seed: u64) -> Result<(OptimizerState, usize)> {
    let attempts = tol.init_attempts.max(1);
    for k in 0..attempts {
        let start = if k == 0 { PhaseStart::Coherent } else { PhaseStart::Random(seed.wrapping_add(k as u64)) };
        let ris = start_surface(inst, start);
        if let Some(bf) = repaired_beamformers(inst, &ris) {
            return Ok((OptimizerState::new(bf, ris), k + 1));
        }
    }
    Err(Error::Infeasible(format!("no feasible starting point after {attempts} attempts")))
}

/// Runs the alternating loop from [`initialize`] until the squared objective
/// change drops below `eps_outer`.
pub fn algorithm2_alternating(inst: &Instance, tol: &Tolerances, seed: u64) -> Result<Solution> {
    tol.validate()?;
    let (state, attempts) = initialize(inst, tol, seed)?;
    algorithm2_from(inst, tol, state, attempts, seed)
}

/// Same as [`algorithm2_alternating`] from a given feasible state.
pub fn algorithm2_from(
    inst: &Instance,
    tol: &Tolerances,
    mut state: OptimizerState,
    init_attempts: usize,
    seed: u64,
) -> Result<Solution> {
    let start = inst.check(&state.ris, &state.bf);
    if !start.feasible() {
        return Err(Error::Infeasible(format!("starting point infeasible: {start:?}")));
    }
    let mut r_prev = start.r_bb;
    let mut active = Vec::new();
    let mut last_passive = None;
    let mut converged = false;
    state.trace.push(TraceRecord { iteration: 0, r_bb: r_prev, v: f64::NAN, v1: 0.0, v2: 0.0, chi: 0.0, rho: 0.0 });
    for m in 1..=tol.max_outer {
        let s = seed.wrapping_mul(1_000_003).wrapping_add(m as u64);
        let wb = solve_wb_subproblem(inst, &mut state, tol.n_randomizations, s)?;
        let wc = solve_wc_subproblem(inst, &mut state, tol.n_randomizations, s ^ 0x5a5a)?;
        active.push((wb, wc));
        let passive = algorithm1_passive(inst, &mut state, tol)?;
        let r = inst.check(&state.ris, &state.bf).r_bb;
        let v = (r - r_prev).powi(2);
        state.iteration = m;
        state.trace.push(TraceRecord {
            iteration: m,
            r_bb: r,
            v,
            v1: passive.v1,
            v2: passive.v2,
            chi: passive.chi,
            rho: passive.rho,
        });
        last_passive = Some(passive);
        r_prev = r;
        if v <= tol.eps_outer {
            converged = true;
            break;
        }
    }
    let check = inst.check(&state.ris, &state.bf);
    Ok(Solution {
        r_bb: check.r_bb,
        bf: state.bf,
        ris: state.ris,
        converged,
        iterations: state.iteration,
        trace: state.trace,
        check,
        last_passive,
        active,
        init_attempts,
    })
}

impl Layout {
    pub fn label(&self) -> &'static str {
        match self {
            Layout::Star => "star",
            Layout::Split => "ris",
        }
    }
}
