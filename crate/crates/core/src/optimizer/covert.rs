//! Scalar pieces of the covert constraint.
//!
//! With `a = g θ_r` (Willie's reflect-side scale) and `j = P_j^max λ_rw`, the
//! constraint reads `g(ϖ_b) = ϖ_b ln(1 + j / (a (ϖ_b + ϖ_c))) <= ε j / a`.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `ϖ_b ln(1 + j / (a (ϖ_b + ϖ_c)))`.
pub fn covert_g<T: Real>(varpi_b: T, varpi_c: T, scale: T, jam: T) -> T {
    if !(varpi_b > T::zero()) {
        return T::zero();
    }
    varpi_b * (jam / (scale * (varpi_b + varpi_c))).ln_1p()
}

/// `∂g/∂ϖ_b`.
pub fn covert_g_slope<T: Real>(varpi_b: T, varpi_c: T, scale: T, jam: T) -> T {
    let s = varpi_b + varpi_c;
    let k = jam / scale;
    (k / s).ln_1p() - varpi_b * k / (s * (s + k))
}

/// First-order expansion of [`covert_g`] around `varpi_b_ref`, evaluated at `varpi_b`.
pub fn taylor_g<T: Real>(varpi_b: T, varpi_b_ref: T, varpi_c: T, scale: T, jam: T) -> Result<T> {
    if !(varpi_b_ref > T::zero()) {
        return Err(Error::domain("expansion point must be positive"));
    }
    let g0 = covert_g(varpi_b_ref, varpi_c, scale, jam);
    Ok(g0 + covert_g_slope(varpi_b_ref, varpi_c, scale, jam) * (varpi_b - varpi_b_ref))
}

/// Largest `ϖ_b` allowed by the linearized constraint at `varpi_b_ref`.
pub fn linearized_covert_cap<T: Real>(epsilon: T, varpi_b_ref: T, varpi_c: T, scale: T, jam: T) -> Result<T> {
    let r = varpi_b_ref.max(T::lit(1e-8));
    let slope = covert_g_slope(r, varpi_c, scale, jam);
    let g0 = covert_g(r, varpi_c, scale, jam);
    let budget = epsilon * jam / scale;
    if !(slope > T::zero()) {
        return Err(Error::domain("covert constraint has no positive slope"));
    }
    Ok(r + (budget - g0) / slope)
}

/// `ϖ_c` at which the covert constraint is tight for the given `ϖ_b`; a lower
/// bound on `ϖ_c`.
pub fn covert_power_cap<T: Real>(epsilon: T, varpi_b: T, scale: T, jam: T) -> T {
    let k = jam / scale;
    k / (epsilon * k / varpi_b).exp_m1() - varpi_b
}

/// Covert-constraint left side as a function of `r = λ_rw / θ_r`.
fn ratio_lhs<T: Real>(r: T, varpi_b: T, varpi_c: T, gain: T, p_j_max: T) -> T {
    let s = varpi_b + varpi_c;
    let x = p_j_max * r / (gain * s);
    if x < T::lit(1e-8) {
        // ln(1+x)/x
        return varpi_b / s * (T::one() - x / T::lit(2.0) + x * x / T::lit(3.0));
    }
    varpi_b / s * x.ln_1p() / x
}

/// Smallest `λ_rw / θ_r` meeting the covert constraint, by bisection.
///
/// Returns 0 when every ratio satisfies it.
pub fn phi_epsilon<T: Real>(epsilon: T, varpi_b: T, varpi_c: T, gain: T, p_j_max: T) -> Result<T> {
    if !(varpi_b > T::zero()) {
        return Err(Error::domain("phi needs a positive covert power"));
    }
    if !(epsilon > T::zero()) {
        return Err(Error::domain("epsilon must be positive"));
    }
    if epsilon >= varpi_b / (varpi_b + varpi_c) {
        return Ok(T::zero());
    }
    let f = |r: T| ratio_lhs(r, varpi_b, varpi_c, gain, p_j_max);
    let unit = gain * (varpi_b + varpi_c) / p_j_max;
    let mut hi = unit;
    let mut guard = 0;
    while f(hi) > epsilon {
        hi = hi + hi;
        guard += 1;
        if guard > 3000 {
            return Err(Error::domain("no finite covert ratio"));
        }
    }
    let mut lo = T::zero();
    let tol = T::lit(1e-12).max(T::epsilon() * T::lit(8.0));
    for _ in 0..500 {
        let mid = T::lit(0.5) * (lo + hi);
        if f(mid) > epsilon {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= tol * hi {
            break;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_example() {
        let c: f64 = covert_power_cap(0.1, 1.0, 1.0, 1.0);
        assert!((c - 8.5083).abs() < 1e-4);
        assert!((covert_g(1.0, c, 1.0, 1.0) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn phi_example() {
        let p: f64 = phi_epsilon(0.3, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((p - 3.15).abs() < 0.01, "{p}");
        assert_eq!(phi_epsilon(0.5, 1.0, 1.0, 1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn linear_cap_is_conservative() {
        let cap: f64 = linearized_covert_cap(0.1, 3.0, 1.0, 1.0, 2.0).unwrap();
        assert!(covert_g(cap, 1.0, 1.0, 2.0) <= 0.2 + 1e-12);
    }
}
