//! Alternating active/passive beamforming design under the covert and
//! outage-driven QoS constraints.

pub mod active;
pub mod alternating;
pub mod covert;
pub mod passive;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::detection::{avg_min_dep_lower_bound, AsymptoticParams};
use crate::error::{Error, Result};
use crate::model::{cascade_vectors, Beamformers, Cascade, ChannelSet, StarRisState, SystemConfig, C64};
use crate::outage::{rate_bounds_from_powers, solve_sigma_star, RateBounds};

pub use active::{solve_wb_subproblem, solve_wc_subproblem, ActiveOutcome};
pub use alternating::{algorithm2_alternating, initialize, Solution};
pub use covert::{covert_g, covert_power_cap, linearized_covert_cap, phi_epsilon, taylor_g};
pub use passive::{algorithm1_passive, passive_inner_step, PassiveOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Stop when the squared R_bb change between outer iterations is below this.
    pub eps_outer: f64,
    /// Largest rank-one gap accepted from the penalty loop.
    pub eps_penalty: f64,
    /// Dinkelbach stopping gap, relative to `max(1, |χ|)`.
    pub eps_dinkelbach: f64,
    pub omega: f64,
    pub rho_init: f64,
    pub max_outer: usize,
    pub max_penalty: usize,
    pub max_dinkelbach: usize,
    pub n_randomizations: usize,
    /// Fresh phase draws tried when the first initialization is infeasible.
    pub init_attempts: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_outer: 1e-4,
            eps_penalty: 1e-8,
            eps_dinkelbach: 1e-8,
            omega: 10.0,
            rho_init: 1e-3,
            max_outer: 50,
            max_penalty: 12,
            max_dinkelbach: 30,
            n_randomizations: 50,
            init_attempts: 20,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let pos = [self.eps_outer, self.eps_penalty, self.eps_dinkelbach, self.rho_init];
        if pos.iter().any(|v| !(*v > 0.0)) || !(self.omega > 1.0) {
            return Err(Error::Config("tolerances must be positive and omega > 1".into()));
        }
        if self.max_outer == 0 || self.max_penalty == 0 || self.max_dinkelbach == 0 {
            return Err(Error::Config("iteration caps must be positive".into()));
        }
        Ok(())
    }
}

/// Which surface elements reflect and which transmit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Layout {
    /// Every element splits energy, `β_r + β_t = 1`.
    Star,
    /// Two conventional surfaces: the first half only reflects, the second
    /// half only transmits.
    Split,
}

impl Layout {
    pub fn reflect_indices(&self, n: usize) -> Vec<usize> {
        match self {
            Layout::Star => (0..n).collect(),
            Layout::Split => (0..n / 2).collect(),
        }
    }

    pub fn transmit_indices(&self, n: usize) -> Vec<usize> {
        match self {
            Layout::Star => (0..n).collect(),
            Layout::Split => (n / 2..n).collect(),
        }
    }

    /// Starting amplitudes: even split, or the frozen 1/0 pattern.
    pub fn initial_beta_r(&self, n: usize) -> DVector<f64> {
        match self {
            Layout::Star => DVector::from_element(n, 0.5),
            Layout::Split => DVector::from_fn(n, |i, _| if i < n / 2 { 1.0 } else { 0.0 }),
        }
    }
}

/// One channel realization with everything the subproblems share.
#[derive(Debug, Clone)]
pub struct Instance<'a> {
    pub cfg: &'a SystemConfig,
    pub ch: &'a ChannelSet,
    pub layout: Layout,
    /// Carol's tolerable self-interference at outage level κ.
    pub sigma_star: f64,
}

impl<'a> Instance<'a> {
    pub fn new(cfg: &'a SystemConfig, ch: &'a ChannelSet, layout: Layout) -> Result<Self> {
        cfg.validate()?;
        if layout == Layout::Split && ch.n() % 2 != 0 {
            return Err(Error::domain("split surfaces need an even element count"));
        }
        let sigma_star = solve_sigma_star(cfg.kappa, cfg.phi_sic, cfg.p_j_max)?;
        Ok(Instance { cfg, ch, layout, sigma_star })
    }

    /// Willie's reflect-side path gain `l_ar l_rw`.
    pub fn willie_gain(&self) -> f64 {
        self.ch.l_ar * self.ch.l_rw
    }

    /// `2^{R*} - 1`.
    pub fn qos_factor(&self) -> f64 {
        self.cfg.r_star.exp2() - 1.0
    }

    /// `(a, j) = (g θ_r, P_j^max λ_rw)` for the covert constraint.
    pub fn covert_terms(&self, cas: &Cascade) -> (f64, f64) {
        (self.willie_gain() * cas.theta_r, self.cfg.p_j_max * cas.lambda_rw)
    }

    pub fn rates(&self, ris: &StarRisState, bf: &Beamformers) -> RateBounds {
        rate_bounds_from_powers(&cascade_vectors(self.ch, ris).powers(bf), self.cfg, self.sigma_star)
    }

    pub fn check(&self, ris: &StarRisState, bf: &Beamformers) -> ConstraintReport {
        let cas = cascade_vectors(self.ch, ris);
        let rates = rate_bounds_from_powers(&cas.powers(bf), self.cfg, self.sigma_star);
        let (vb, vc) = (bf.varpi_b(), bf.varpi_c());
        let a = AsymptoticParams::new(self.willie_gain(), cas.theta_r, cas.lambda_rw, vb, vc);
        let dep_bound = avg_min_dep_lower_bound(&a, vb, vc, self.cfg.p_j_max);
        let beta_sum_error = ris
            .beta_r()
            .iter()
            .zip(ris.beta_t().iter())
            .map(|(r, t)| (r + t - 1.0).abs())
            .fold(0.0, f64::max);
        ConstraintReport {
            power: vb + vc,
            dep_bound,
            r_bb: rates.r_bb,
            r_cc: rates.r_cc,
            beta_sum_error,
            power_ok: vb + vc <= self.cfg.p_max * (1.0 + FEAS_SLACK),
            covert_ok: dep_bound >= 1.0 - self.cfg.epsilon - FEAS_SLACK,
            qos_ok: rates.r_cc >= self.cfg.r_star - FEAS_SLACK,
        }
    }
}

/// Slack allowed when re-checking constraints on recovered iterates.
pub const FEAS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub power: f64,
    /// Lower bound on Willie's average minimum detection error.
    pub dep_bound: f64,
    pub r_bb: f64,
    pub r_cc: f64,
    pub beta_sum_error: f64,
    pub power_ok: bool,
    pub covert_ok: bool,
    pub qos_ok: bool,
}

impl ConstraintReport {
    pub fn feasible(&self) -> bool {
        self.power_ok && self.covert_ok && self.qos_ok
    }
}

/// One outer iteration of the alternating loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub r_bb: f64,
    /// Squared objective change.
    pub v: f64,
    /// Rank-one gap at the end of the passive step.
    pub v1: f64,
    /// Last Dinkelbach gap.
    pub v2: f64,
    pub chi: f64,
    pub rho: f64,
}

/// Iterate carried through the alternating loop.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    pub bf: Beamformers,
    pub ris: StarRisState,
    pub w_b_lift: DMatrix<C64>,
    pub w_c_lift: DMatrix<C64>,
    pub q_r: DMatrix<C64>,
    pub q_t: DMatrix<C64>,
    pub chi: f64,
    pub rho: (f64, f64),
    pub iteration: usize,
    pub trace: Vec<TraceRecord>,
}

impl OptimizerState {
    pub fn new(bf: Beamformers, ris: StarRisState) -> Self {
        let w_b_lift = outer(&bf.w_b);
        let w_c_lift = outer(&bf.w_c);
        let q_r = outer(&ris.theta_r_vec().map(|z| z.conj()));
        let q_t = outer(&ris.theta_t_vec().map(|z| z.conj()));
        OptimizerState { bf, ris, w_b_lift, w_c_lift, q_r, q_t, chi: 0.0, rho: (0.0, 0.0), iteration: 0, trace: Vec::new() }
    }
}

/// `v vᴴ`.
pub fn outer(v: &DVector<C64>) -> DMatrix<C64> {
    v * v.adjoint()
}
