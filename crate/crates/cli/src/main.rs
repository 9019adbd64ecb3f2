use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use starcovert::detection::{
    avg_min_dep_lower_bound, avg_min_dep_quadrature, min_dep, optimal_threshold, AsymptoticParams, DetectionParams,
};
use starcovert::experiments::config::{load_config, parse_value};
use starcovert::experiments::verify::{bound_suite, dep_suite, outage_suite, threshold_suite, tightness_suite, SuiteResult};
use starcovert::experiments::{emit_results, run_sweep, summarize, ExperimentConfig, Scheme, SweepVar};
use starcovert::optimizer::{algorithm2_alternating, initialize, Instance, Tolerances};
use starcovert::outage::{outage_ab, outage_ac, OutageParams};
use starcovert::{cascade_vectors, generate_channels, SystemConfig};

#[derive(Parser)]
#[command(name = "starcovert", version, about = "Covert beamforming through a STAR-RIS")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Flat `key = value` system configuration
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl Common {
    fn system(&self) -> Result<SystemConfig> {
        match &self.config {
            Some(p) => Ok(load_config(p)?),
            None => Ok(SystemConfig::default()),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Log,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Dep,
    Threshold,
    Outage,
    Bound,
    Tightness,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form quantities at the starting design of one realization
    Analyze {
        #[command(flatten)]
        common: Common,
    },
    /// Oracle checks of the analytic results
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Optimized realizations for the tightness suite
        #[arg(long, default_value_t = 10)]
        realizations: usize,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Runs the alternating optimizer on one realization
    Optimize {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "star")]
        scheme: String,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Averages the optimized covert rate over a parameter sweep
    Sweep {
        #[command(flatten)]
        common: Common,
        /// `var=v1,v2,...` with var one of P_max, epsilon, N, M, R_star
        #[arg(long)]
        sweep: Option<String>,
        #[arg(long, default_value_t = 50)]
        realizations: usize,
        /// Comma list of `star` and `ris`
        #[arg(long, default_value = "star,ris")]
        scheme: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Worker threads, 0 for all cores
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Also record exact and bounded detection probabilities
        #[arg(long)]
        tightness: bool,
    },
}

fn parse_sweep(spec: &str) -> Result<(SweepVar, Vec<f64>)> {
    let (var, list) = spec.split_once('=').context("expected --sweep var=v1,v2,...")?;
    let var = SweepVar::parse(var)?;
    let values = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_value(var.key(), s))
        .collect::<starcovert::Result<Vec<f64>>>()?;
    if values.is_empty() {
        bail!("sweep value list is empty");
    }
    Ok((var, values))
}

fn analyze(common: &Common) -> Result<()> {
    let cfg = common.system()?;
    let ch = generate_channels(&cfg, common.seed)?;
    let inst = Instance::new(&cfg, &ch, Scheme::Star.layout())?;
    let (state, _) = initialize(&inst, &Tolerances::default(), common.seed)?;
    let (ris, bf) = (&state.ris, &state.bf);
    let cas = cascade_vectors(&ch, ris);
    let rates = inst.rates(ris, bf);
    let (vb, vc) = (bf.varpi_b(), bf.varpi_c());
    let a = AsymptoticParams::new(inst.willie_gain(), cas.theta_r, cas.lambda_rw, vb, vc);
    let pw = cas.powers(bf);
    let det = DetectionParams::from_channels(&ch, ris, bf, cfg.sigma_w2, cfg.p_j_max)?;
    let rows: Vec<(&str, f64)> = vec![
        ("sigma_star", inst.sigma_star),
        ("varpi_b", vb),
        ("varpi_c", vc),
        ("R_bb", rates.r_bb),
        ("R_cc", rates.r_cc),
        ("outage_ab(R_bb)", outage_ab(&OutageParams::from_powers(&pw, &cfg, rates.r_bb, rates.r_cc))),
        ("outage_ac(R_cc)", outage_ac(&OutageParams::from_powers(&pw, &cfg, rates.r_bb, rates.r_cc))),
        ("tau_star", optimal_threshold(&det)?),
        ("min_dep", min_dep(&det)?),
        ("avg_min_dep", avg_min_dep_quadrature(&a, vb, vc, cfg.p_j_max)?),
        ("avg_min_dep_bound", avg_min_dep_lower_bound(&a, vb, vc, cfg.p_j_max)),
    ];
    for (k, v) in rows {
        println!("{k:<20} {v:.6e}");
    }
    Ok(())
}

fn verify(common: &Common, suite: Suite, realizations: usize, workers: usize) -> Result<bool> {
    let seed = common.seed;
    let mut out: Vec<SuiteResult> = Vec::new();
    let want = |s: Suite| suite == Suite::All || suite == s;
    if want(Suite::Dep) {
        out.push(dep_suite(20, 1_000_000, seed)?);
    }
    if want(Suite::Threshold) {
        out.push(threshold_suite(100, 100_000, seed)?);
    }
    if want(Suite::Outage) {
        out.push(outage_suite(20, 1_000_000, seed)?);
    }
    if want(Suite::Bound) {
        out.push(bound_suite(100, seed)?);
    }
    if want(Suite::Tightness) {
        out.push(tightness_suite(&common.system()?, realizations, seed, workers)?);
    }
    for r in &out {
        let tag = if r.pass { "PASS" } else { "FAIL" };
        println!("{tag} {:<16} cases={:<5} worst={:.3e} tol={:.1e}", r.name, r.cases, r.worst, r.tolerance);
    }
    Ok(out.iter().all(|r| r.pass))
}

fn optimize(common: &Common, scheme: &str, format: Format) -> Result<()> {
    let cfg = common.system()?;
    let scheme = Scheme::parse(scheme)?;
    let ch = generate_channels(&cfg, common.seed)?;
    let inst = Instance::new(&cfg, &ch, scheme.layout())?;
    let sol = algorithm2_alternating(&inst, &Tolerances::default(), common.seed)?;
    match format {
        Format::Table => {
            println!("{:>4} {:>12} {:>11} {:>11} {:>11} {:>12} {:>10}", "iter", "R_bb", "v", "v1", "v2", "chi", "rho");
            for t in &sol.trace {
                println!(
                    "{:>4} {:>12.6} {:>11.3e} {:>11.3e} {:>11.3e} {:>12.5e} {:>10.1e}",
                    t.iteration, t.r_bb, t.v, t.v1, t.v2, t.chi, t.rho
                );
            }
            let c = sol.check;
            println!(
                "R_bb {:.6} R_cc {:.6} power {:.6} dep_bound {:.6} feasible {} converged {}",
                c.r_bb,
                c.r_cc,
                c.power,
                c.dep_bound,
                c.feasible(),
                sol.converged
            );
        }
        Format::Log => {
            for t in &sol.trace {
                println!("{}", serde_json::to_string(t)?);
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    common: &Common,
    spec: Option<&str>,
    realizations: usize,
    schemes: &str,
    out: Option<PathBuf>,
    format: Format,
    workers: usize,
    tightness: bool,
) -> Result<()> {
    let base = common.system()?;
    let (var, values) = match spec {
        Some(s) => parse_sweep(s)?,
        None => (SweepVar::PMax, vec![base.p_max]),
    };
    let schemes = schemes.split(',').map(Scheme::parse).collect::<starcovert::Result<Vec<_>>>()?;
    let exp = ExperimentConfig {
        sweep: var,
        values,
        realizations,
        seed: common.seed,
        schemes,
        tolerances: Tolerances::default(),
        tightness,
        workers,
        out_dir: out,
        base,
    };
    let logs = run_sweep(&exp)?;
    if let Some(dir) = &exp.out_dir {
        let files = emit_results(&logs, dir)?;
        eprintln!("wrote {} and {}", files.table.display(), files.log.display());
    }
    match format {
        Format::Table => {
            let records: Vec<_> = logs.iter().map(|l| l.record.clone()).collect();
            println!("{:<6} {:>12} {:>10} {:>10} {:>9}", "scheme", var.key(), "mean", "stderr", "feasible");
            for p in summarize(&records) {
                println!("{:<6} {:>12.5} {:>10.5} {:>10.5} {:>5}/{}", p.scheme, p.sweep_value, p.mean, p.stderr, p.feasible, p.count);
            }
        }
        Format::Log => {
            for l in &logs {
                println!("{}", serde_json::to_string(&l.record)?);
            }
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze { common } => analyze(&common),
        Command::Verify { common, suite, realizations, workers } => {
            if !verify(&common, suite, realizations, workers)? {
                std::process::exit(1);
            }
            Ok(())
        }
        Command::Optimize { common, scheme, format } => optimize(&common, &scheme, format),
        Command::Sweep { common, sweep: spec, realizations, scheme, out, format, workers, tightness } => {
            sweep(&common, spec.as_deref(), realizations, &scheme, out, format, workers, tightness)
        }
    }
}
