//! Willie's radiometer: false alarm, missed detection, optimal threshold,
//! minimum detection error and its large-surface averages.

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp1, Gamma};

use crate::error::{Error, Result};
use crate::model::{cascade_vectors, cn01, substream_rng, Beamformers, ChannelSet, StarRisState};
use crate::scalar::{ln_expm1, Real};
use crate::special::integrate;

/// Scalar inputs of every detection-error formula.
///
/// `lambda` and `lambda_tilde` are the mean reflected powers at Willie under
/// silence and under covert transmission; `gamma` is the jamming path gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionParams<T> {
    pub lambda: T,
    pub lambda_tilde: T,
    pub gamma: T,
    pub sigma_w2: T,
    pub p_j_max: T,
    /// ϖ_b if known. Used to tell "no covert signal" apart from a bad input
    /// when `lambda_tilde == lambda`.
    pub covert_power: Option<T>,
}

impl<T: Real> DetectionParams<T> {
    pub fn new(lambda: T, lambda_tilde: T, gamma: T, sigma_w2: T, p_j_max: T) -> Result<Self> {
        let p = DetectionParams { lambda, lambda_tilde, gamma, sigma_w2, p_j_max, covert_power: None };
        p.validate()?;
        Ok(p)
    }

    pub fn with_covert_power(mut self, varpi_b: T) -> Self {
        self.covert_power = Some(varpi_b);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.lambda >= T::zero()) || !(self.lambda_tilde >= self.lambda) {
            return Err(Error::InconsistentParams(format!(
                "need lambda_tilde >= lambda >= 0, got lambda={}, lambda_tilde={}",
                self.lambda, self.lambda_tilde
            )));
        }
        if !(self.gamma >= T::zero()) || !(self.p_j_max >= T::zero()) || !(self.sigma_w2 >= T::zero()) {
            return Err(Error::domain("gamma, sigma_w2 and P_j_max must be non-negative"));
        }
        Ok(())
    }

    fn jamming(&self) -> Result<T> {
        self.validate()?;
        let c = self.gamma * self.p_j_max;
        if !(c > T::zero()) {
            return Err(Error::DegenerateJamming);
        }
        Ok(c)
    }

    /// True when both hypotheses coincide: no covert power reaches Willie.
    fn silent(&self) -> Result<bool> {
        if self.lambda_tilde > self.lambda {
            return Ok(false);
        }
        match self.covert_power {
            Some(w) if w > T::zero() => Err(Error::InconsistentParams(format!(
                "lambda_tilde == lambda although the covert power is {w}"
            ))),
            _ => Ok(true),
        }
    }
}

impl DetectionParams<f64> {
    /// Exact parameters for one channel realization, averaging over H_ar only.
    pub fn from_channels(
        ch: &ChannelSet,
        ris: &StarRisState,
        bf: &Beamformers,
        sigma_w2: f64,
        p_j_max: f64,
    ) -> Result<Self> {
        let cas = cascade_vectors(ch, ris);
        let scale = ch.l_ar * cas.willie_reflect_gain;
        let (wb, wc) = (bf.varpi_b(), bf.varpi_c());
        Ok(DetectionParams::new(scale * wc, scale * (wb + wc), cas.jam_willie.norm_sqr(), sigma_w2, p_j_max)?
            .with_covert_power(wb))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepProfile<T> {
    pub p_fa: T,
    pub p_md: T,
    pub p_e: T,
}

/// `t + lam * expm1(-t / lam)`, accurate when `t << lam`.
fn ramp_mass<T: Real>(t: T, lam: T) -> T {
    if lam <= T::zero() {
        return t;
    }
    let u = t / lam;
    if u < T::lit(1e-3) {
        let u2 = u * u;
        lam * u2 * (T::lit(0.5) - u / T::lit(6.0) + u2 / T::lit(24.0) - u2 * u / T::lit(120.0))
    } else {
        lam * (u + (-u).exp_m1())
    }
}

/// `Pr(X + c U > t)` for `X ~ Exp(lam)`, `U ~ U(0,1)` and `t >= c`.
fn upper_tail<T: Real>(t: T, lam: T, c: T) -> T {
    if lam <= T::zero() {
        return T::zero();
    }
    let log = lam.ln() - c.ln() - (t - c) / lam + (-(-c / lam).exp_m1()).ln();
    log.exp()
}

/// False alarm, missed detection and their sum at threshold `tau`.
pub fn dep_profile<T: Real>(tau: T, p: &DetectionParams<T>) -> Result<DepProfile<T>> {
    let c = p.jamming()?;
    p.silent()?;
    let t = tau - p.sigma_w2;
    let (p_fa, p_md) = if t < T::zero() {
        (T::one(), T::zero())
    } else if t < c {
        (
            T::one() - ramp_mass(t, p.lambda) / c,
            ramp_mass(t, p.lambda_tilde) / c,
        )
    } else {
        (
            upper_tail(t, p.lambda, c),
            T::one() - upper_tail(t, p.lambda_tilde, c),
        )
    };
    Ok(DepProfile { p_fa, p_md, p_e: p_fa + p_md })
}

/// `ln Δ` with `Δ = (e^{c/λ} - 1) / (e^{c/λ̃} - 1)`.
fn ln_delta<T: Real>(c: T, lam: T, lam_t: T) -> T {
    ln_expm1(c / lam) - ln_expm1(c / lam_t)
}

/// Threshold minimizing the detection error.
///
/// With `lambda == 0` the minimizer degenerates to `sigma_w2 + gamma P_j_max`.
/// Without any covert power every threshold above the noise floor gives
/// `P_e = 1`; the same boundary value is returned.
pub fn optimal_threshold<T: Real>(p: &DetectionParams<T>) -> Result<T> {
    let c = p.jamming()?;
    if p.silent()? || p.lambda == T::zero() {
        return Ok(p.sigma_w2 + c);
    }
    let (l, lt) = (p.lambda, p.lambda_tilde);
    let k = T::one() / (T::one() / l - T::one() / lt);
    Ok(k * ln_delta(c, l, lt) + p.sigma_w2)
}

/// Minimum detection error, evaluated in log space.
pub fn min_dep<T: Real>(p: &DetectionParams<T>) -> Result<T> {
    let c = p.jamming()?;
    if p.silent()? {
        return Ok(T::one());
    }
    let (l, lt) = (p.lambda, p.lambda_tilde);
    if l == T::zero() {
        return Ok(T::one() - upper_tail(c, lt, c));
    }
    let ld = ln_delta(c, l, lt);
    let e1 = lt.ln() + ln_expm1(c / lt) + (l / (l - lt)) * ld;
    let e2 = l.ln() + ln_expm1(c / l) + (lt / (l - lt)) * ld;
    Ok(T::one() - (e1.exp() - e2.exp()) / c)
}

/// Large-surface statistics seen from Alice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticParams<T> {
    pub lambda_a: T,
    pub lambda_tilde_a: T,
    pub theta_r: T,
    /// exponential mean of γ
    pub lambda_rw: T,
    /// l_ar · l_rw, the mean power gain of one reflected path to Willie
    pub path_gain: T,
}

impl<T: Real> AsymptoticParams<T> {
    /// Builds the parameters from scalars for given beamformer powers.
    pub fn new(path_gain: T, theta_r: T, lambda_rw: T, varpi_b: T, varpi_c: T) -> Self {
        let a = path_gain * theta_r;
        AsymptoticParams {
            lambda_a: a * varpi_c,
            lambda_tilde_a: a * (varpi_b + varpi_c),
            theta_r,
            lambda_rw,
            path_gain,
        }
    }

    /// `path_gain * theta_r`: mean reflected power at Willie per watt.
    pub fn reflect_scale(&self) -> T {
        self.path_gain * self.theta_r
    }
}

pub fn asymptotic_dep_params(ch: &ChannelSet, ris: &StarRisState, bf: &Beamformers) -> AsymptoticParams<f64> {
    let cas = cascade_vectors(ch, ris);
    AsymptoticParams::new(ch.l_ar * ch.l_rw, cas.theta_r, cas.lambda_rw, bf.varpi_b(), bf.varpi_c())
}

/// Asymptotic minimum detection error at normalized jamming `x = γ P_j_max / (g θ_r)`.
pub fn asymptotic_min_dep<T: Real>(x: T, varpi_b: T, varpi_c: T) -> T {
    if !(varpi_b > T::zero()) {
        return T::one();
    }
    let s = varpi_b + varpi_c;
    if !(x > T::zero()) {
        if varpi_c > T::zero() {
            let r = varpi_c / s;
            return T::one() - (varpi_b / s) * r.powf(varpi_c / varpi_b);
        }
        return T::zero();
    }
    if !(varpi_c > T::zero()) {
        let u = x / varpi_b;
        return T::one() - (-(-u).exp_m1()) / u;
    }
    let ld = ln_expm1(x / varpi_c) - ln_expm1(x / s);
    let log = (varpi_b / x).ln() - (varpi_c / varpi_b) * ld + ln_expm1(x / s);
    T::one() - log.exp()
}

const QUAD_UPPER: f64 = 28.0;

/// Average of the asymptotic minimum detection error over `γ ~ Exp(λ_rw)`.
pub fn avg_min_dep_quadrature<T: Real>(
    a: &AsymptoticParams<T>,
    varpi_b: T,
    varpi_c: T,
    p_j_max: T,
) -> Result<T> {
    if !(varpi_b > T::zero()) {
        return Ok(T::one());
    }
    let scale = a.reflect_scale();
    if !(scale > T::zero()) {
        return Err(Error::domain("reflected path gain must be positive"));
    }
    let k = p_j_max * a.lambda_rw / scale;
    if !(k > T::zero()) {
        return Ok(asymptotic_min_dep(T::zero(), varpi_b, varpi_c));
    }
    let upper = T::lit(QUAD_UPPER);
    let f = |u: T| asymptotic_min_dep(k * u, varpi_b, varpi_c) * (-u).exp();
    let q = integrate(f, T::zero(), upper, T::lit(1e-10).max(T::epsilon() * T::lit(10.0)), 400)?;
    // integrand is bounded by e^{-u}, so the tail is at most e^{-U}
    let tail = (-upper).exp() * asymptotic_min_dep(k * upper, varpi_b, varpi_c);
    Ok(q.value + tail)
}

/// Closed-form lower bound of [`avg_min_dep_quadrature`].
pub fn avg_min_dep_lower_bound<T: Real>(
    a: &AsymptoticParams<T>,
    varpi_b: T,
    varpi_c: T,
    p_j_max: T,
) -> T {
    if !(varpi_b > T::zero()) {
        return T::one();
    }
    let s = varpi_b + varpi_c;
    let k = p_j_max * a.lambda_rw / a.reflect_scale();
    if !(k > T::zero()) {
        return T::one() - varpi_b / s;
    }
    T::one() - (varpi_b / k) * (k / s).ln_1p()
}

/// Where the radiometer statistic comes from.
#[derive(Debug, Clone)]
pub enum DetectionSource<'a> {
    /// Exponential powers with means (λ, λ̃), exactly as modelled in the closed form.
    Params(DetectionParams<f64>),
    /// A fixed Willie link with a fresh Alice→RIS channel per trial.
    Channels {
        ch: &'a ChannelSet,
        ris: &'a StarRisState,
        bf: &'a Beamformers,
        sigma_w2: f64,
        p_j_max: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiometerMode {
    /// Infinitely many samples per slot: the statistic is the slot power itself.
    Limiting,
    /// Average of `K` samples per slot.
    SampleLevel(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiometerEstimate {
    pub p_fa: f64,
    pub p_md: f64,
    pub se_fa: f64,
    pub se_md: f64,
    pub trials: u64,
}

const BLOCK: u64 = 1 << 16;

enum Draw {
    Params { lambda: f64, lambda_tilde: f64 },
    Channels { scale: f64, wb: Vec<num_complex::Complex64>, wc: Vec<num_complex::Complex64> },
}

impl Draw {
    /// Signal power at Willie for one slot under H0 and H1.
    fn powers(&self, rng: &mut ChaCha20Rng) -> (f64, f64) {
        match self {
            Draw::Params { lambda, lambda_tilde } => {
                let e0: f64 = Exp1.sample(rng);
                let e1: f64 = Exp1.sample(rng);
                (lambda * e0, lambda_tilde * e1)
            }
            Draw::Channels { scale, wb, wc } => {
                let mut p0 = 0.0;
                let mut p1 = 0.0;
                // independent slots for the two hypotheses
                for slot in 0..2 {
                    let mut sb = num_complex::Complex64::new(0.0, 0.0);
                    let mut sc = sb;
                    for i in 0..wb.len() {
                        let x = cn01(rng) * scale;
                        sb += x * wb[i];
                        sc += x * wc[i];
                    }
                    if slot == 0 {
                        p0 = sc.norm_sqr();
                    } else {
                        p1 = sb.norm_sqr() + sc.norm_sqr();
                    }
                }
                (p0, p1)
            }
        }
    }
}

/// Empirical false alarm and missed detection rates of the threshold test.
///
/// Trials are split into fixed blocks with one generator substream per
/// block, so the result depends only on `(seed, n_trials)`.
pub fn radiometer_monte_carlo(
    source: &DetectionSource<'_>,
    tau: f64,
    n_trials: u64,
    seed: u64,
    mode: RadiometerMode,
) -> Result<RadiometerEstimate> {
    if n_trials == 0 {
        return Err(Error::domain("n_trials must be at least 1"));
    }
    let (draw, gamma, sigma_w2, p_j_max) = match source {
        DetectionSource::Params(p) => (
            Draw::Params { lambda: p.lambda, lambda_tilde: p.lambda_tilde },
            p.gamma,
            p.sigma_w2,
            p.p_j_max,
        ),
        DetectionSource::Channels { ch, ris, bf, sigma_w2, p_j_max } => {
            let cas = cascade_vectors(ch, ris);
            (
                Draw::Channels {
                    scale: (ch.l_ar * cas.willie_reflect_gain).sqrt(),
                    wb: bf.w_b.iter().copied().collect(),
                    wc: bf.w_c.iter().copied().collect(),
                },
                cas.jam_willie.norm_sqr(),
                *sigma_w2,
                *p_j_max,
            )
        }
    };
    let averager = match mode {
        RadiometerMode::Limiting => None,
        RadiometerMode::SampleLevel(0) => return Err(Error::domain("K must be at least 1")),
        RadiometerMode::SampleLevel(k) => Some((
            Gamma::new(k as f64, 1.0).map_err(|e| Error::domain(e.to_string()))?,
            k as f64,
        )),
    };
    let mut fa = 0u64;
    let mut md = 0u64;
    let blocks = n_trials.div_ceil(BLOCK);
    for b in 0..blocks {
        let mut rng = substream_rng(seed, 1000 + b);
        let len = BLOCK.min(n_trials - b * BLOCK);
        for _ in 0..len {
            let (s0, s1) = draw.powers(&mut rng);
            let j0 = gamma * p_j_max * rng.random::<f64>();
            let j1 = gamma * p_j_max * rng.random::<f64>();
            let mut v0 = s0 + j0 + sigma_w2;
            let mut v1 = s1 + j1 + sigma_w2;
            if let Some((g, k)) = &averager {
                // mean of K i.i.d. |CN(0, v)|² samples is v · Gamma(K, 1) / K
                v0 *= g.sample(&mut rng) / k;
                v1 *= g.sample(&mut rng) / k;
            }
            if v0 > tau {
                fa += 1;
            }
            if v1 <= tau {
                md += 1;
            }
        }
    }
    let n = n_trials as f64;
    let (p_fa, p_md) = (fa as f64 / n, md as f64 / n);
    Ok(RadiometerEstimate {
        p_fa,
        p_md,
        se_fa: (p_fa * (1.0 - p_fa) / n).sqrt(),
        se_md: (p_md * (1.0 - p_md) / n).sqrt(),
        trials: n_trials,
    })
}
