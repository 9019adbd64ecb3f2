//! Scalar abstraction for the closed-form analytics.
//!
//! Everything that is pure scalar math (detection error, outage, the covert
//! constraint helpers, special functions) is written against [`Real`], so it
//! runs in `f32` or `f64`. Dense linear algebra (channels, SDP) is `f64`.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only if the target type cannot hold it,
    /// which never happens for the finite constants used in this crate.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `ln(e^u - 1)` for `u > 0`, without overflow for large `u`.
#[inline]
pub fn ln_expm1<T: Real>(u: T) -> T {
    if u > T::one() {
        u + (-(-u).exp()).ln_1p()
    } else {
        u.exp_m1().ln()
    }
}

/// `ln(1 - e^{-u})` for `u > 0`.
#[inline]
pub fn ln_one_minus_exp_neg<T: Real>(u: T) -> T {
    if u > T::LN_2() {
        (-(-u).exp()).ln_1p()
    } else {
        (-(-u).exp_m1()).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_expm1_matches_naive_in_safe_range() {
        for &u in &[0.01, 0.5, 1.0, 2.0, 10.0, 30.0] {
            let naive = (f64::exp(u) - 1.0).ln();
            assert!((ln_expm1(u) - naive).abs() < 1e-12 * naive.abs().max(1.0));
        }
        // ln u + u/2 + u²/24 near zero
        let u = 1e-6_f64;
        assert!((ln_expm1(u) - (u.ln() + u / 2.0 + u * u / 24.0)).abs() < 1e-15);
        // no overflow
        assert!((ln_expm1(1000.0_f64) - 1000.0).abs() < 1e-12);
        assert!((ln_expm1(1000.0_f32) - 1000.0).abs() < 1e-3);
    }

    #[test]
    fn ln_one_minus_exp_neg_small_and_large() {
        assert!((ln_one_minus_exp_neg(1e-8_f64) - (1e-8_f64).ln()).abs() < 1e-7);
        assert!(ln_one_minus_exp_neg(50.0_f64).abs() < 1e-20);
    }
}
