//! Config-driven sweeps, the two-surface baseline, bound tightness checks
//! and result files.

pub mod config;
pub mod output;
pub mod sweep;
pub mod tightness;
pub mod verify;

pub use config::{load_config, parse_config};
pub use output::{emit_results, read_log, read_table, write_table, EmittedFiles};
pub use sweep::{
    realization_seed, recheck, ris_baseline_channels, run_one, run_sweep, summarize, Design, ExperimentConfig, ResultRecord,
    RunLog, Scheme, SeriesPoint, SweepVar,
};
pub use tightness::{tightness_pair, verify_dep_bound_tightness, TightnessReport};
