//! How far the closed-form detection bound sits from the exact average.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detection::{avg_min_dep_lower_bound, avg_min_dep_quadrature, AsymptoticParams};
use crate::error::Result;
use crate::model::{cascade_vectors, Beamformers, StarRisState, SystemConfig};
use crate::optimizer::{Instance, Tolerances};

use super::sweep::{in_pool, realization_seed, run_one, Scheme};

/// `(ε_r, ε_a)`: Willie's best average detection probability, exact and
/// from the lower bound on the detection error.
pub fn tightness_pair(inst: &Instance, ris: &StarRisState, bf: &Beamformers) -> Result<(f64, f64)> {
    let cas = cascade_vectors(inst.ch, ris);
    let (vb, vc) = (bf.varpi_b(), bf.varpi_c());
    let a = AsymptoticParams::new(inst.willie_gain(), cas.theta_r, cas.lambda_rw, vb, vc);
    let exact = avg_min_dep_quadrature(&a, vb, vc, inst.cfg.p_j_max)?;
    let bound = avg_min_dep_lower_bound(&a, vb, vc, inst.cfg.p_j_max);
    Ok((1.0 - exact, 1.0 - bound))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TightnessReport {
    pub epsilon: f64,
    /// `(ε_r, ε_a)` of every successful realization.
    pub pairs: Vec<(f64, f64)>,
    pub mean_gap: f64,
    pub max_gap: f64,
    /// `ε_r <= ε_a` held in every realization.
    pub ordered: bool,
    /// Realizations where the optimizer found no design.
    pub failures: usize,
}

/// Optimizes `realizations` STAR-RIS instances and compares the two detection
/// probabilities at each optimum.
pub fn verify_dep_bound_tightness(
    cfg: &SystemConfig,
    realizations: usize,
    seed: u64,
    tol: &Tolerances,
    workers: usize,
) -> Result<TightnessReport> {
    cfg.validate()?;
    let logs = in_pool(workers, || {
        (0..realizations)
            .into_par_iter()
            .map(|r| run_one(cfg, Scheme::Star, realization_seed(seed, r), tol, true))
            .collect::<Vec<_>>()
    })?;
    let pairs: Vec<(f64, f64)> = logs
        .iter()
        .filter(|l| l.record.feasible)
        .filter_map(|l| Some((l.record.eps_r?, l.record.eps_a?)))
        .collect();
    let gaps: Vec<f64> = pairs.iter().map(|(r, a)| (r - a).abs()).collect();
    let mean_gap = if gaps.is_empty() { f64::NAN } else { gaps.iter().sum::<f64>() / gaps.len() as f64 };
    Ok(TightnessReport {
        epsilon: cfg.epsilon,
        mean_gap,
        max_gap: gaps.iter().copied().fold(f64::NAN, f64::max),
        ordered: pairs.iter().all(|(r, a)| r <= a),
        failures: realizations - pairs.len(),
        pairs,
    })
}
