//! Self-check suites behind `starcovert verify`.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::detection::{
    avg_min_dep_lower_bound, avg_min_dep_quadrature, dep_profile, min_dep, optimal_threshold, radiometer_monte_carlo,
    AsymptoticParams, DetectionParams, DetectionSource, RadiometerMode,
};
use crate::error::Result;
use crate::model::{substream_rng, SystemConfig};
use crate::optimizer::Tolerances;
use crate::outage::{outage_ab, outage_ac, OutageParams};

use super::tightness::verify_dep_bound_tightness;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub cases: usize,
    /// Largest observed deviation.
    pub worst: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl SuiteResult {
    fn new(name: &str, cases: usize, worst: f64, tolerance: f64) -> Self {
        SuiteResult { name: name.into(), cases, worst, tolerance, pass: worst <= tolerance }
    }
}

fn random_detection(seed: u64, i: u64) -> DetectionParams<f64> {
    let mut rng = substream_rng(seed, 1000 + i);
    let lambda = rng.random_range(0.1..2.0);
    let lambda_tilde = lambda * (1.0 + rng.random_range(0.1..2.0));
    let gamma = rng.random_range(0.2..2.0);
    let sigma_w2 = rng.random_range(0.0..0.5);
    DetectionParams::new(lambda, lambda_tilde, gamma, sigma_w2, 1.0).expect("valid by construction")
}

/// Closed-form false alarm and missed detection against the limiting radiometer.
pub fn dep_suite(cases: usize, trials: u64, seed: u64) -> Result<SuiteResult> {
    let mut worst = 0.0f64;
    for i in 0..cases as u64 {
        let p = random_detection(seed, i);
        let c = p.gamma * p.p_j_max;
        let tau = p.sigma_w2 + substream_rng(seed, 5000 + i).random_range(0.0..3.0) * c;
        let exact = dep_profile(tau, &p)?;
        let mc = radiometer_monte_carlo(&DetectionSource::Params(p), tau, trials, seed ^ i, RadiometerMode::Limiting)?;
        worst = worst.max((exact.p_fa - mc.p_fa).abs()).max((exact.p_md - mc.p_md).abs());
    }
    Ok(SuiteResult::new("dep", cases, worst, 0.005))
}

/// Optimal threshold against a dense grid.
pub fn threshold_suite(cases: usize, grid: usize, seed: u64) -> Result<SuiteResult> {
    let mut worst = 0.0f64;
    for i in 0..cases as u64 {
        let p = random_detection(seed, i);
        let c = p.gamma * p.p_j_max;
        let tau = optimal_threshold(&p)?;
        let best = min_dep(&p)?;
        let hi = p.sigma_w2 + c + 20.0 * p.lambda_tilde;
        let mut grid_min = f64::INFINITY;
        for k in 0..=grid {
            let t = p.sigma_w2 + (hi - p.sigma_w2) * k as f64 / grid as f64;
            grid_min = grid_min.min(dep_profile(t, &p)?.p_e);
        }
        let below = if tau < p.sigma_w2 + c { f64::INFINITY } else { 0.0 };
        worst = worst.max(best - grid_min).max(below);
    }
    Ok(SuiteResult::new("threshold", cases, worst, 1e-4))
}

/// Outage closed forms against direct sampling of the jamming power and the
/// self-interference gain.
pub fn outage_suite(cases: usize, draws: usize, seed: u64) -> Result<SuiteResult> {
    let mut worst = 0.0f64;
    for i in 0..cases as u64 {
        let mut rng = substream_rng(seed, 9000 + i);
        let p_j_max = rng.random_range(0.5..2.0);
        let phi_sic = rng.random_range(0.2..1.5);
        let p = OutageParams {
            upsilon: rng.random_range(-0.2..1.2) * p_j_max,
            gamma_cap: rng.random_range(0.0..3.0) * phi_sic * p_j_max,
            p_j_max,
            phi_sic,
            r_b: 1.0,
            r_c: 1.0,
        };
        let (mut ab, mut ac) = (0usize, 0usize);
        for _ in 0..draws {
            let pj = rng.random_range(0.0..p_j_max);
            let g: f64 = Exp1.sample(&mut rng);
            ab += usize::from(pj > p.upsilon);
            ac += usize::from(phi_sic * g * pj > p.gamma_cap);
        }
        let n = draws as f64;
        worst = worst.max((outage_ab(&p) - ab as f64 / n).abs()).max((outage_ac(&p) - ac as f64 / n).abs());
    }
    Ok(SuiteResult::new("outage", cases, worst, 0.005))
}

/// Lower bound never above the quadrature average.
pub fn bound_suite(cases: usize, seed: u64) -> Result<SuiteResult> {
    let mut worst = 0.0f64;
    for i in 0..cases as u64 {
        let mut rng = substream_rng(seed, 13000 + i);
        let (vb, vc) = (rng.random_range(0.01..2.0), rng.random_range(0.0..2.0));
        let a = AsymptoticParams::new(rng.random_range(0.1..2.0), rng.random_range(0.1..5.0), rng.random_range(0.05..5.0), vb, vc);
        let pj = rng.random_range(0.1..3.0);
        let q = avg_min_dep_quadrature(&a, vb, vc, pj)?;
        worst = worst.max(avg_min_dep_lower_bound(&a, vb, vc, pj) - q);
    }
    Ok(SuiteResult::new("bound-order", cases, worst, 1e-6))
}

/// Mean gap between exact and bounded detection probability at optimized designs.
pub fn tightness_suite(cfg: &SystemConfig, realizations: usize, seed: u64, workers: usize) -> Result<SuiteResult> {
    let r = verify_dep_bound_tightness(cfg, realizations, seed, &Tolerances::default(), workers)?;
    let worst = if r.ordered { r.mean_gap } else { f64::INFINITY };
    Ok(SuiteResult::new("bound-tightness", r.pairs.len(), worst, 0.02))
}
