//! Physical system: configuration, channels, STAR-RIS state, beamformers.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub type C64 = Complex64;

/// All physical and algorithmic scalars. Powers are in watts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub m: usize,
    pub n: usize,
    pub p_max: f64,
    pub p_j_max: f64,
    pub sigma_b2: f64,
    pub sigma_c2: f64,
    pub sigma_w2: f64,
    pub phi_sic: f64,
    pub rho0: f64,
    pub alpha: f64,
    pub d_ar: f64,
    pub d_rb: f64,
    pub d_rc: f64,
    pub d_rw: f64,
    pub epsilon: f64,
    pub iota: f64,
    pub kappa: f64,
    pub r_star: f64,
    pub rng_seed: u64,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

impl Default for SystemConfig {
    /// Simulation defaults: M=3, N=30, P_max=3 dBw, P_j_max=0 dBw,
    /// noise -140 dBm everywhere, SIC -160 dB, rho0 -20 dB, alpha 2.6.
    fn default() -> Self {
        SystemConfig {
            m: 3,
            n: 30,
            p_max: db_to_linear(3.0),
            p_j_max: 1.0,
            sigma_b2: dbm_to_watts(-140.0),
            sigma_c2: dbm_to_watts(-140.0),
            sigma_w2: dbm_to_watts(-140.0),
            phi_sic: db_to_linear(-160.0),
            rho0: db_to_linear(-20.0),
            alpha: 2.6,
            d_ar: 500.0,
            d_rb: 100.0,
            d_rc: 150.0,
            d_rw: 80.0,
            epsilon: 0.1,
            iota: 0.1,
            kappa: 0.1,
            r_star: 4.0,
            rng_seed: 1,
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.m == 0 || self.n == 0 {
            return bad("M and N must be at least 1");
        }
        let positive = [
            ("P_max", self.p_max),
            ("P_j_max", self.p_j_max),
            ("sigma_b2", self.sigma_b2),
            ("sigma_c2", self.sigma_c2),
            ("sigma_w2", self.sigma_w2),
            ("rho0", self.rho0),
            ("alpha", self.alpha),
            ("d_ar", self.d_ar),
            ("d_rb", self.d_rb),
            ("d_rc", self.d_rc),
            ("d_rw", self.d_rw),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be strictly positive, got {v}")));
            }
        }
        for (name, v) in [("epsilon", self.epsilon), ("iota", self.iota), ("kappa", self.kappa)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0,1), got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.phi_sic) {
            return bad("phi_sic must lie in [0,1]");
        }
        if !(self.r_star >= 0.0 && self.r_star.is_finite()) {
            return bad("R_star must be non-negative");
        }
        Ok(())
    }

    pub fn path_gains(&self) -> Result<[f64; 4]> {
        Ok([
            path_loss_gain(self.d_ar, self.rho0, self.alpha)?,
            path_loss_gain(self.d_rb, self.rho0, self.alpha)?,
            path_loss_gain(self.d_rc, self.rho0, self.alpha)?,
            path_loss_gain(self.d_rw, self.rho0, self.alpha)?,
        ])
    }
}

/// Large-scale power gain `rho0 / d^alpha`.
pub fn path_loss_gain<T: Real>(d: T, rho0: T, alpha: T) -> Result<T> {
    if !(d > T::zero()) {
        return Err(Error::domain(format!("distance must be positive, got {d}")));
    }
    Ok(rho0 * d.powf(-alpha))
}

/// One realization of every channel. Entries already carry `sqrt(l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub h_ar: DMatrix<C64>,
    pub h_rb: DVector<C64>,
    pub h_rc: DVector<C64>,
    pub h_rw: DVector<C64>,
    pub h_cc: C64,
    pub l_ar: f64,
    pub l_rb: f64,
    pub l_rc: f64,
    pub l_rw: f64,
}

/// Substream ids used by [`generate_channels`].
pub mod stream {
    pub const H_AR: u64 = 0;
    pub const H_RB: u64 = 1;
    pub const H_RC: u64 = 2;
    pub const H_RW: u64 = 3;
    pub const H_CC: u64 = 4;
}

/// Seeded generator positioned on one substream.
pub fn substream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws a circularly symmetric CN(0, 1) sample.
pub fn cn01<R: rand::Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn cn_vector(rng: &mut ChaCha20Rng, len: usize, scale: f64) -> DVector<C64> {
    DVector::from_fn(len, |_, _| cn01(rng) * scale)
}

pub fn generate_channels(cfg: &SystemConfig, seed: u64) -> Result<ChannelSet> {
    cfg.validate()?;
    let [l_ar, l_rb, l_rc, l_rw] = cfg.path_gains()?;
    let (n, m) = (cfg.n, cfg.m);
    let mut rng = substream_rng(seed, stream::H_AR);
    let s = l_ar.sqrt();
    // column-major fill keeps the draw order independent of matrix layout quirks
    let h_ar = DMatrix::from_fn(n, m, |_, _| cn01(&mut rng) * s);
    let h_rb = cn_vector(&mut substream_rng(seed, stream::H_RB), n, l_rb.sqrt());
    let h_rc = cn_vector(&mut substream_rng(seed, stream::H_RC), n, l_rc.sqrt());
    let h_rw = cn_vector(&mut substream_rng(seed, stream::H_RW), n, l_rw.sqrt());
    let h_cc = cn01(&mut substream_rng(seed, stream::H_CC)) * cfg.phi_sic.sqrt();
    Ok(ChannelSet { h_ar, h_rb, h_rc, h_rw, h_cc, l_ar, l_rb, l_rc, l_rw })
}

impl ChannelSet {
    pub fn n(&self) -> usize {
        self.h_ar.nrows()
    }

    pub fn m(&self) -> usize {
        self.h_ar.ncols()
    }

    /// Same channels with a fresh Willie link.
    pub fn with_willie(&self, h_rw: DVector<C64>) -> Self {
        ChannelSet { h_rw, ..self.clone() }
    }
}

/// STAR-RIS coefficients under energy splitting. `beta_t` is always `1 - beta_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct StarRisState {
    beta_r: DVector<f64>,
    beta_t: DVector<f64>,
    phi_r: DVector<f64>,
    phi_t: DVector<f64>,
}

pub fn wrap_phase(p: f64) -> f64 {
    let w = p.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

impl StarRisState {
    pub fn new(beta_r: DVector<f64>, phi_r: DVector<f64>, phi_t: DVector<f64>) -> Result<Self> {
        let n = beta_r.len();
        if phi_r.len() != n || phi_t.len() != n {
            return Err(Error::domain("STAR-RIS vectors must share one length"));
        }
        if beta_r.iter().any(|b| !(0.0..=1.0).contains(b)) {
            return Err(Error::domain("beta_r entries must lie in [0,1]"));
        }
        let beta_t = beta_r.map(|b| 1.0 - b);
        Ok(StarRisState {
            beta_r,
            beta_t,
            phi_r: phi_r.map(wrap_phase),
            phi_t: phi_t.map(wrap_phase),
        })
    }

    /// Half/half split with uniform random phases.
    pub fn random(n: usize, seed: u64, stream: u64) -> Self {
        use rand::Rng;
        let mut rng = substream_rng(seed, stream);
        let phi_r = DVector::from_fn(n, |_, _| rng.random_range(0.0..TAU));
        let phi_t = DVector::from_fn(n, |_, _| rng.random_range(0.0..TAU));
        Self::new(DVector::from_element(n, 0.5), phi_r, phi_t).expect("valid by construction")
    }

    pub fn n(&self) -> usize {
        self.beta_r.len()
    }

    pub fn beta_r(&self) -> &DVector<f64> {
        &self.beta_r
    }

    pub fn beta_t(&self) -> &DVector<f64> {
        &self.beta_t
    }

    pub fn phi_r(&self) -> &DVector<f64> {
        &self.phi_r
    }

    pub fn phi_t(&self) -> &DVector<f64> {
        &self.phi_t
    }

    /// ϑ_r, the diagonal of Θ_r.
    pub fn theta_r_vec(&self) -> DVector<C64> {
        DVector::from_fn(self.n(), |i, _| C64::from_polar(self.beta_r[i].sqrt(), self.phi_r[i]))
    }

    pub fn theta_t_vec(&self) -> DVector<C64> {
        DVector::from_fn(self.n(), |i, _| C64::from_polar(self.beta_t[i].sqrt(), self.phi_t[i]))
    }

    /// θ_r = Σ β_r.
    pub fn theta_r_sum(&self) -> f64 {
        self.beta_r.sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Beamformers {
    pub w_b: DVector<C64>,
    pub w_c: DVector<C64>,
}

impl Beamformers {
    pub fn new(w_b: DVector<C64>, w_c: DVector<C64>) -> Self {
        Beamformers { w_b, w_c }
    }

    pub fn varpi_b(&self) -> f64 {
        self.w_b.norm_squared()
    }

    pub fn varpi_c(&self) -> f64 {
        self.w_c.norm_squared()
    }
}

/// Effective cascaded channels for one (channels, STAR-RIS) pair.
///
/// Row vectors are stored as plain vectors; the scalar channel seen by a
/// beamformer `w` is the unconjugated product `a.dot(w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cascade {
    /// ϑ_r^T Diag(h_rb^*) H_ar
    pub bob_reflect: DVector<C64>,
    /// ϑ_t^T Diag(h_rc^*) H_ar
    pub carol_transmit: DVector<C64>,
    /// ϑ_r^T Diag(h_rw^*) H_ar
    pub willie_reflect: DVector<C64>,
    /// h_rb^H Θ_t h_rc^*, Carol's jamming path to Bob
    pub jam_bob: C64,
    /// h_rw^H Θ_t h_rc^*, Carol's jamming path to Willie
    pub jam_willie: C64,
    /// ‖h_rw^H Θ_r‖²
    pub willie_reflect_gain: f64,
    pub theta_r: f64,
    /// exponential mean of |h_rw^H Θ_t h_rc^*|² over h_rw
    pub lambda_rw: f64,
}

fn weighted_row(theta: &DVector<C64>, h: &DVector<C64>, h_ar: &DMatrix<C64>) -> DVector<C64> {
    let coef = theta.component_mul(&h.map(|x| x.conj()));
    h_ar.transpose() * coef
}

pub fn cascade_vectors(ch: &ChannelSet, ris: &StarRisState) -> Cascade {
    let vr = ris.theta_r_vec();
    let vt = ris.theta_t_vec();
    let jam = |h: &DVector<C64>| {
        h.iter()
            .zip(vt.iter())
            .zip(ch.h_rc.iter())
            .map(|((a, t), c)| a.conj() * t * c.conj())
            .sum::<C64>()
    };
    let willie_reflect_gain = ch
        .h_rw
        .iter()
        .zip(ris.beta_r().iter())
        .map(|(h, b)| h.norm_sqr() * b)
        .sum();
    let lambda_rw = ch.l_rw
        * ch
            .h_rc
            .iter()
            .zip(ris.beta_t().iter())
            .map(|(h, b)| h.norm_sqr() * b)
            .sum::<f64>();
    Cascade {
        bob_reflect: weighted_row(&vr, &ch.h_rb, &ch.h_ar),
        carol_transmit: weighted_row(&vt, &ch.h_rc, &ch.h_ar),
        willie_reflect: weighted_row(&vr, &ch.h_rw, &ch.h_ar),
        jam_bob: jam(&ch.h_rb),
        jam_willie: jam(&ch.h_rw),
        willie_reflect_gain,
        theta_r: ris.theta_r_sum(),
        lambda_rw,
    }
}

/// Received powers that feed capacities, rate bounds and outage statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadePowers {
    pub bob_signal: f64,
    pub bob_interference: f64,
    pub bob_jam_gain: f64,
    pub carol_signal: f64,
    pub carol_interference: f64,
}

impl Cascade {
    pub fn powers(&self, bf: &Beamformers) -> CascadePowers {
        CascadePowers {
            bob_signal: self.bob_reflect.dot(&bf.w_b).norm_sqr(),
            bob_interference: self.bob_reflect.dot(&bf.w_c).norm_sqr(),
            bob_jam_gain: self.jam_bob.norm_sqr(),
            carol_signal: self.carol_transmit.dot(&bf.w_c).norm_sqr(),
            carol_interference: self.carol_transmit.dot(&bf.w_b).norm_sqr(),
        }
    }
}

impl CascadePowers {
    /// Υ: jamming power above which Bob's capacity falls below `r_b`.
    pub fn upsilon(&self, r_b: f64, sigma_b2: f64) -> f64 {
        let g = r_b.exp2() - 1.0;
        (self.bob_signal - g * (self.bob_interference + sigma_b2)) / (g * self.bob_jam_gain)
    }

    /// Γ: self-interference power Carol can absorb at rate `r_c`.
    pub fn gamma_cap(&self, r_c: f64, sigma_c2: f64) -> f64 {
        let g = r_c.exp2() - 1.0;
        (self.carol_signal - g * (self.carol_interference + sigma_c2)) / g
    }
}

/// Instantaneous capacities `(C_b, C_c)` at jamming power `p_j`.
pub fn capacities(
    ch: &ChannelSet,
    ris: &StarRisState,
    bf: &Beamformers,
    p_j: f64,
    cfg: &SystemConfig,
) -> (f64, f64) {
    let pw = cascade_vectors(ch, ris).powers(bf);
    let c_b = (1.0
        + pw.bob_signal / (pw.bob_interference + pw.bob_jam_gain * p_j + cfg.sigma_b2))
        .log2();
    let c_c = (1.0
        + pw.carol_signal / (pw.carol_interference + ch.h_cc.norm_sqr() * p_j + cfg.sigma_c2))
        .log2();
    (c_b, c_c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_loss_examples() {
        assert_eq!(path_loss_gain(1.0, 0.01, 2.6).unwrap(), 0.01);
        let g = path_loss_gain(100.0, 0.01, 2.6).unwrap();
        assert!((g - 0.01 * 100f64.powf(-2.6)).abs() < 1e-24);
        assert!(path_loss_gain(80.0, 0.01, 2.6).unwrap() > g);
        assert!(path_loss_gain(0.0, 0.01, 2.6).is_err());
        assert!(path_loss_gain(-1.0_f32, 0.01, 2.6).is_err());
    }

    #[test]
    fn defaults_validate() {
        SystemConfig::default().validate().unwrap();
        let mut c = SystemConfig::default();
        c.epsilon = 1.0;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn wrap_phase_range() {
        for p in [-7.0, -1e-18, 0.0, 3.0, TAU, 13.0] {
            let w = wrap_phase(p);
            assert!((0.0..TAU).contains(&w), "{p} -> {w}");
        }
    }
}
