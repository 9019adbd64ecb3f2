//! Special functions and adaptive quadrature.

use crate::error::{Error, Result};
use crate::scalar::Real;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Exponential integral `Ei(x) = -∫_{-x}^∞ e^{-t}/t dt`, for `x < 0`.
///
/// Uses the power series of `E1` for `|x| <= 1` and a modified Lentz
/// continued fraction beyond. Non-negative arguments are rejected.
pub fn exp_integral_ei<T: Real>(x: T) -> Result<T> {
    if !(x < T::zero()) {
        return Err(Error::domain(format!(
            "Ei is only implemented for negative arguments, got {x}"
        )));
    }
    Ok(-exp_integral_e1(-x))
}

/// `E1(z)` for `z > 0`; `Ei(-z) = -E1(z)`.
fn exp_integral_e1<T: Real>(z: T) -> T {
    let eps = T::epsilon();
    if z <= T::one() {
        // E1(z) = -γ - ln z - Σ_{k≥1} (-z)^k / (k k!)
        let mut sum = T::zero();
        let mut term = T::one();
        let mut k = T::one();
        loop {
            term = term * (-z) / k;
            let contrib = term / k;
            sum = sum + contrib;
            if contrib.abs() <= eps * sum.abs() || k > T::lit(200.0) {
                break;
            }
            k = k + T::one();
        }
        -T::lit(EULER_GAMMA) - z.ln() - sum
    } else {
        let tiny = T::min_positive_value() / eps;
        let mut b = z + T::one();
        let mut c = T::one() / tiny;
        let mut d = T::one() / b;
        let mut h = d;
        let mut i = T::one();
        loop {
            let an = -i * i;
            b = b + T::lit(2.0);
            d = T::one() / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h = h * del;
            if (del - T::one()).abs() <= eps || i > T::lit(1000.0) {
                break;
            }
            i = i + T::one();
        }
        h * (-z).exp()
    }
}

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half_len * T::lit(XGK[j]);
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + T::lit(WGK[j]) * pair;
        if j % 2 == 1 {
            gauss = gauss + T::lit(WG[j / 2]) * pair;
        }
    }
    let value = kronrod * half_len;
    let err = ((kronrod - gauss) * half_len).abs();
    (value, err)
}

/// Result of [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    pub error_estimate: T,
    pub intervals: usize,
}

/// Globally adaptive Gauss-Kronrod (7/15) integration of `f` over `[a, b]`.
///
/// Subdivides the interval with the largest error estimate until the summed
/// estimate drops below `abs_tol`, or fails after `max_intervals` pieces.
pub fn integrate<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    abs_tol: T,
    max_intervals: usize,
) -> Result<Quadrature<T>> {
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(Error::domain("integration limits must be finite with a <= b"));
    }
    let (v0, e0) = gk15(&f, a, b);
    let mut pieces: Vec<(T, T, T, T)> = vec![(a, b, v0, e0)];
    loop {
        let total_err = pieces.iter().fold(T::zero(), |acc, p| acc + p.3);
        let total = pieces.iter().fold(T::zero(), |acc, p| acc + p.2);
        if !total.is_finite() {
            return Err(Error::Quadrature(format!(
                "non-finite integrand on [{a}, {b}] after {} intervals",
                pieces.len()
            )));
        }
        if total_err <= abs_tol {
            return Ok(Quadrature {
                value: total,
                error_estimate: total_err,
                intervals: pieces.len(),
            });
        }
        if pieces.len() >= max_intervals {
            return Err(Error::Quadrature(format!(
                "no convergence on [{a}, {b}]: error estimate {total_err} > {abs_tol} with {} intervals",
                pieces.len()
            )));
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let mid = T::lit(0.5) * (lo + hi);
        if !(mid > lo && mid < hi) {
            return Err(Error::Quadrature(format!(
                "interval [{lo}, {hi}] cannot be bisected further"
            )));
        }
        let (vl, el) = gk15(&f, lo, mid);
        let (vr, er) = gk15(&f, mid, hi);
        pieces.push((lo, mid, vl, el));
        pieces.push((mid, hi, vr, er));
    }
}
