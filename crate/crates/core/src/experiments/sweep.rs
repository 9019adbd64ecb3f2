//! Parameter sweeps over paired channel realizations.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{generate_channels, Beamformers, ChannelSet, StarRisState, SystemConfig, C64};
use crate::optimizer::{algorithm2_alternating, Instance, Layout, Tolerances};

use super::tightness::tightness_pair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepVar {
    PMax,
    Epsilon,
    N,
    M,
    RStar,
}

impl SweepVar {
    pub fn key(&self) -> &'static str {
        match self {
            SweepVar::PMax => "P_max",
            SweepVar::Epsilon => "epsilon",
            SweepVar::N => "N",
            SweepVar::M => "M",
            SweepVar::RStar => "R_star",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        [SweepVar::PMax, SweepVar::Epsilon, SweepVar::N, SweepVar::M, SweepVar::RStar]
            .into_iter()
            .find(|v| v.key().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("cannot sweep over `{s}`")))
    }

    /// `base` with this variable set to `value` (SI units).
    pub fn apply(&self, base: &SystemConfig, value: f64) -> Result<SystemConfig> {
        let mut cfg = base.clone();
        let count = |v: f64| {
            if v >= 1.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::Config(format!("{} must be a positive integer, got {v}", self.key())))
            }
        };
        match self {
            SweepVar::PMax => cfg.p_max = value,
            SweepVar::Epsilon => cfg.epsilon = value,
            SweepVar::N => cfg.n = count(value)?,
            SweepVar::M => cfg.m = count(value)?,
            SweepVar::RStar => cfg.r_star = value,
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    /// Energy-splitting STAR-RIS.
    Star,
    /// Two conventional surfaces of N/2 elements.
    Ris,
}

impl Scheme {
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::Star => "star",
            Scheme::Ris => "ris",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "star" | "star-ris" => Ok(Scheme::Star),
            "ris" | "conventional-ris" => Ok(Scheme::Ris),
            _ => Err(Error::Config(format!("unknown scheme `{s}`"))),
        }
    }

    pub fn layout(&self) -> Layout {
        match self {
            Scheme::Star => Layout::Star,
            Scheme::Ris => Layout::Split,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub base: SystemConfig,
    pub sweep: SweepVar,
    pub values: Vec<f64>,
    pub realizations: usize,
    pub seed: u64,
    pub schemes: Vec<Scheme>,
    pub tolerances: Tolerances,
    /// Also report the exact and bounded detection probabilities.
    pub tightness: bool,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// One realization of `base` without sweeping.
    pub fn single(base: SystemConfig, realizations: usize, seed: u64) -> Self {
        let values = vec![SweepVar::PMax.value_of(&base)];
        ExperimentConfig {
            base,
            sweep: SweepVar::PMax,
            values,
            realizations,
            seed,
            schemes: vec![Scheme::Star],
            tolerances: Tolerances::default(),
            tightness: false,
            workers: 0,
            out_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config("sweep value list is empty".into()));
        }
        if self.realizations == 0 {
            return Err(Error::Config("realization count must be at least 1".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::Config("no scheme selected".into()));
        }
        self.tolerances.validate()?;
        for &v in &self.values {
            let cfg = self.sweep.apply(&self.base, v)?;
            if self.schemes.contains(&Scheme::Ris) && cfg.n % 2 != 0 {
                return Err(Error::domain(format!("the two-surface baseline needs even N, got {}", cfg.n)));
            }
        }
        Ok(())
    }
}

impl SweepVar {
    pub fn value_of(&self, cfg: &SystemConfig) -> f64 {
        match self {
            SweepVar::PMax => cfg.p_max,
            SweepVar::Epsilon => cfg.epsilon,
            SweepVar::N => cfg.n as f64,
            SweepVar::M => cfg.m as f64,
            SweepVar::RStar => cfg.r_star,
        }
    }
}

/// Channel seed of realization `index`; shared by every scheme and sweep value.
pub fn realization_seed(seed: u64, index: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Channels of the two-surface baseline: the first N/2 elements only reflect,
/// the rest only transmit, on the same draws as the STAR-RIS run.
pub fn ris_baseline_channels(cfg: &SystemConfig, seed: u64) -> Result<(ChannelSet, Layout)> {
    if cfg.n % 2 != 0 {
        return Err(Error::domain(format!("the two-surface baseline needs even N, got {}", cfg.n)));
    }
    Ok((generate_channels(cfg, seed)?, Layout::Split))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub scheme: String,
    pub sweep_var: String,
    pub sweep_value: f64,
    pub realization: usize,
    pub channel_seed: u64,
    /// Zero when no feasible design was found.
    pub r_bb: f64,
    pub r_cc: f64,
    pub power: f64,
    pub dep_bound: f64,
    pub feasible: bool,
    pub power_ok: bool,
    pub covert_ok: bool,
    pub qos_ok: bool,
    pub converged: bool,
    pub outer_iterations: usize,
    pub init_attempts: usize,
    pub wall_time_s: f64,
    pub eps_r: Option<f64>,
    pub eps_a: Option<f64>,
    pub error: Option<String>,
}

/// Final design of one run, kept in the per-run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Design {
    pub w_b: Vec<[f64; 2]>,
    pub w_c: Vec<[f64; 2]>,
    pub beta_r: Vec<f64>,
    pub phi_r: Vec<f64>,
    pub phi_t: Vec<f64>,
}

impl Design {
    pub fn new(bf: &Beamformers, ris: &StarRisState) -> Self {
        let pack = |v: &nalgebra::DVector<C64>| v.iter().map(|z| [z.re, z.im]).collect();
        Design {
            w_b: pack(&bf.w_b),
            w_c: pack(&bf.w_c),
            beta_r: ris.beta_r().iter().copied().collect(),
            phi_r: ris.phi_r().iter().copied().collect(),
            phi_t: ris.phi_t().iter().copied().collect(),
        }
    }

    pub fn unpack(&self) -> Result<(Beamformers, StarRisState)> {
        let vec = |v: &[[f64; 2]]| nalgebra::DVector::from_iterator(v.len(), v.iter().map(|p| C64::new(p[0], p[1])));
        let real = |v: &[f64]| nalgebra::DVector::from_column_slice(v);
        let ris = StarRisState::new(real(&self.beta_r), real(&self.phi_r), real(&self.phi_t))?;
        Ok((Beamformers::new(vec(&self.w_b), vec(&self.w_c)), ris))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub record: ResultRecord,
    pub design: Option<Design>,
}

/// Optimizes one realization.
pub fn run_one(
    cfg: &SystemConfig,
    scheme: Scheme,
    channel_seed: u64,
    tol: &Tolerances,
    tightness: bool,
) -> RunLog {
    let start = Instant::now();
    let mut record = ResultRecord {
        scheme: scheme.label().into(),
        sweep_var: String::new(),
        sweep_value: f64::NAN,
        realization: 0,
        channel_seed,
        r_bb: 0.0,
        r_cc: 0.0,
        power: 0.0,
        dep_bound: 1.0,
        feasible: false,
        power_ok: false,
        covert_ok: false,
        qos_ok: false,
        converged: false,
        outer_iterations: 0,
        init_attempts: 0,
        wall_time_s: 0.0,
        eps_r: None,
        eps_a: None,
        error: None,
    };
    let outcome = (|| -> Result<Option<Design>> {
        let ch = match scheme {
            Scheme::Star => generate_channels(cfg, channel_seed)?,
            Scheme::Ris => ris_baseline_channels(cfg, channel_seed)?.0,
        };
        let inst = Instance::new(cfg, &ch, scheme.layout())?;
        let sol = algorithm2_alternating(&inst, tol, channel_seed)?;
        let c = sol.check;
        record.r_bb = if c.feasible() { c.r_bb } else { 0.0 };
        record.r_cc = c.r_cc;
        record.power = c.power;
        record.dep_bound = c.dep_bound;
        record.feasible = c.feasible();
        record.power_ok = c.power_ok;
        record.covert_ok = c.covert_ok;
        record.qos_ok = c.qos_ok;
        record.converged = sol.converged;
        record.outer_iterations = sol.iterations;
        record.init_attempts = sol.init_attempts;
        if tightness {
            let (r, a) = tightness_pair(&inst, &sol.ris, &sol.bf)?;
            record.eps_r = Some(r);
            record.eps_a = Some(a);
        }
        Ok(Some(Design::new(&sol.bf, &sol.ris)))
    })();
    let design = match outcome {
        Ok(d) => d,
        Err(e) => {
            record.error = Some(e.to_string());
            None
        }
    };
    record.wall_time_s = start.elapsed().as_secs_f64();
    RunLog { record, design }
}

pub(crate) fn in_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(job))
}

/// Runs every sweep value, realization and scheme. Output is ordered by sweep
/// value, realization, then scheme, whatever the worker count.
pub fn run_sweep(exp: &ExperimentConfig) -> Result<Vec<RunLog>> {
    exp.validate()?;
    let mut jobs = Vec::new();
    for &value in &exp.values {
        let cfg = exp.sweep.apply(&exp.base, value)?;
        for r in 0..exp.realizations {
            for &scheme in &exp.schemes {
                jobs.push((cfg.clone(), value, r, scheme));
            }
        }
    }
    in_pool(exp.workers, || {
        jobs.par_iter()
            .map(|(cfg, value, r, scheme)| {
                let mut log = run_one(cfg, *scheme, realization_seed(exp.seed, *r), &exp.tolerances, exp.tightness);
                log.record.sweep_var = exp.sweep.key().into();
                log.record.sweep_value = *value;
                log.record.realization = *r;
                log
            })
            .collect()
    })
}

/// Mean and standard error of R_bb at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub scheme: String,
    pub sweep_value: f64,
    pub mean: f64,
    pub stderr: f64,
    pub count: usize,
    pub feasible: usize,
}

/// Groups records by scheme and sweep value. Failed realizations enter with
/// `R_bb = 0`.
pub fn summarize(records: &[ResultRecord]) -> Vec<SeriesPoint> {
    let mut keys: Vec<(String, f64)> = Vec::new();
    for r in records {
        if !keys.iter().any(|(s, v)| *s == r.scheme && *v == r.sweep_value) {
            keys.push((r.scheme.clone(), r.sweep_value));
        }
    }
    keys.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    keys.into_iter()
        .map(|(scheme, value)| {
            let xs: Vec<&ResultRecord> =
                records.iter().filter(|r| r.scheme == scheme && r.sweep_value == value).collect();
            let n = xs.len() as f64;
            let mean = xs.iter().map(|r| r.r_bb).sum::<f64>() / n;
            let var = if xs.len() > 1 {
                xs.iter().map(|r| (r.r_bb - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            SeriesPoint {
                scheme,
                sweep_value: value,
                mean,
                stderr: (var / n).sqrt(),
                count: xs.len(),
                feasible: xs.iter().filter(|r| r.feasible).count(),
            }
        })
        .collect()
}

/// Re-checks a logged design against freshly generated channels.
pub fn recheck(exp_base: &SystemConfig, log: &RunLog) -> Result<bool> {
    let rec = &log.record;
    let Some(design) = &log.design else {
        return Ok(!rec.feasible);
    };
    let var = SweepVar::parse(&rec.sweep_var)?;
    let cfg = var.apply(exp_base, rec.sweep_value)?;
    let scheme = Scheme::parse(&rec.scheme)?;
    let ch = generate_channels(&cfg, rec.channel_seed)?;
    let inst = Instance::new(&cfg, &ch, scheme.layout())?;
    let (bf, ris) = design.unpack()?;
    let c = inst.check(&ris, &bf);
    let same_rate = !rec.feasible || (c.r_bb - rec.r_bb).abs() <= 1e-9 * (1.0 + rec.r_bb);
    Ok(c.feasible() == rec.feasible && same_rate)
}
