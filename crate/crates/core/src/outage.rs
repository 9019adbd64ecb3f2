//! Outage probabilities under random jamming power and Carol's residual
//! self-interference, and the equivalent rate bounds.

use crate::error::{Error, Result};
use crate::model::{cascade_vectors, Beamformers, CascadePowers, ChannelSet, StarRisState, SystemConfig};
use crate::scalar::Real;
use crate::special::exp_integral_ei;

pub use crate::special::exp_integral_ei as ei;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageParams<T> {
    /// Υ: jamming power Bob tolerates at rate `r_b`
    pub upsilon: T,
    /// Γ: self-interference power Carol tolerates at rate `r_c`
    pub gamma_cap: T,
    pub p_j_max: T,
    pub phi_sic: T,
    pub r_b: T,
    pub r_c: T,
}

impl OutageParams<f64> {
    pub fn from_powers(pw: &CascadePowers, cfg: &SystemConfig, r_b: f64, r_c: f64) -> Self {
        OutageParams {
            upsilon: pw.upsilon(r_b, cfg.sigma_b2),
            gamma_cap: pw.gamma_cap(r_c, cfg.sigma_c2),
            p_j_max: cfg.p_j_max,
            phi_sic: cfg.phi_sic,
            r_b,
            r_c,
        }
    }
}

/// Outage probability at Bob.
pub fn outage_ab<T: Real>(p: &OutageParams<T>) -> T {
    let u = p.upsilon;
    if u < T::zero() {
        T::one()
    } else if u <= p.p_j_max {
        T::one() - u / p.p_j_max
    } else {
        T::zero()
    }
}

/// `e^{-z} + z Ei(-z)` for `z >= 0`.
fn ac_of_ratio<T: Real>(z: T) -> T {
    if z == T::zero() {
        return T::one();
    }
    let e = exp_integral_ei(-z).expect("negative argument");
    let v = (-z).exp() + z * e;
    v.max(T::zero()).min(T::one())
}

/// Outage probability at Carol.
pub fn outage_ac<T: Real>(p: &OutageParams<T>) -> T {
    let g = p.gamma_cap;
    if g < T::zero() {
        return T::one();
    }
    let scale = p.phi_sic * p.p_j_max;
    if !(scale > T::zero()) {
        return if g > T::zero() { T::zero() } else { T::one() };
    }
    ac_of_ratio(g / scale)
}

/// Γ at which Carol's outage equals `kappa`, by bisection.
pub fn solve_sigma_star<T: Real>(kappa: T, phi_sic: T, p_j_max: T) -> Result<T> {
    if !(kappa > T::zero() && kappa < T::one()) {
        return Err(Error::domain(format!("kappa must lie in (0,1), got {kappa}")));
    }
    let scale = phi_sic * p_j_max;
    if !(scale > T::zero()) {
        return Ok(T::zero());
    }
    let mut hi = T::one();
    let mut guard = 0;
    while ac_of_ratio(hi) >= kappa {
        hi = hi + hi;
        guard += 1;
        if guard > 2000 {
            return Err(Error::domain("no finite root for kappa"));
        }
    }
    let mut lo = T::zero();
    let tol = T::lit(1e-13).max(T::epsilon() * T::lit(4.0));
    for _ in 0..400 {
        let mid = T::lit(0.5) * (lo + hi);
        if ac_of_ratio(mid) > kappa {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= tol * hi {
            break;
        }
    }
    Ok(T::lit(0.5) * (lo + hi) * scale)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBounds {
    pub r_bb: f64,
    pub r_cc: f64,
}

/// `(R_bb, R_cc)` from precomputed cascade powers.
pub fn rate_bounds_from_powers(pw: &CascadePowers, cfg: &SystemConfig, sigma_star: f64) -> RateBounds {
    let jam = pw.bob_jam_gain * cfg.p_j_max * (1.0 - cfg.iota);
    RateBounds {
        r_bb: (1.0 + pw.bob_signal / (pw.bob_interference + jam + cfg.sigma_b2)).log2(),
        r_cc: (1.0 + pw.carol_signal / (pw.carol_interference + sigma_star + cfg.sigma_c2)).log2(),
    }
}

pub fn rate_bounds(
    ch: &ChannelSet,
    ris: &StarRisState,
    bf: &Beamformers,
    cfg: &SystemConfig,
    sigma_star: f64,
) -> RateBounds {
    rate_bounds_from_powers(&cascade_vectors(ch, ris).powers(bf), cfg, sigma_star)
}
