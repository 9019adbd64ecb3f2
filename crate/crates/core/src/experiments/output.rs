//! Result tables, per-run logs and plot data.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::sweep::{summarize, ResultRecord, RunLog};

#[derive(Debug, Clone, PartialEq)]
pub struct EmittedFiles {
    pub table: PathBuf,
    pub log: PathBuf,
    pub plots: Vec<PathBuf>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

pub fn write_table(records: &[ResultRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for r in records {
        w.serialize(r).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_table(path: &Path) -> Result<Vec<ResultRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::io(path, e))?;
    r.deserialize().map(|row| row.map_err(|e| Error::io(path, e))).collect()
}

pub fn write_log(logs: &[RunLog], path: &Path) -> Result<()> {
    let mut w = create(path)?;
    for l in logs {
        let line = serde_json::to_string(l).map_err(|e| Error::io(path, e))?;
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_log(path: &Path) -> Result<Vec<RunLog>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    BufReader::new(f)
        .lines()
        .filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty()))
        .map(|l| {
            let l = l.map_err(|e| Error::io(path, e))?;
            serde_json::from_str(&l).map_err(|e| Error::io(path, e))
        })
        .collect()
}

/// Writes `results.csv`, `runs.jsonl` and one `plot_<scheme>.csv` per scheme
/// (sweep value, mean, standard error) into `dir`.
pub fn emit_results(logs: &[RunLog], dir: &Path) -> Result<EmittedFiles> {
    if logs.is_empty() {
        return Err(Error::Config("no records to emit".into()));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let records: Vec<ResultRecord> = logs.iter().map(|l| l.record.clone()).collect();
    let table = dir.join("results.csv");
    write_table(&records, &table)?;
    let log = dir.join("runs.jsonl");
    write_log(logs, &log)?;
    let series = summarize(&records);
    let mut schemes: Vec<&str> = series.iter().map(|p| p.scheme.as_str()).collect();
    schemes.dedup();
    let mut plots = Vec::new();
    for scheme in schemes {
        let path = dir.join(format!("plot_{scheme}.csv"));
        let mut w = csv::Writer::from_writer(create(&path)?);
        w.write_record(["sweep_value", "mean", "stderr"]).map_err(|e| Error::io(&path, e))?;
        for p in series.iter().filter(|p| p.scheme == scheme) {
            w.write_record([p.sweep_value.to_string(), p.mean.to_string(), p.stderr.to_string()])
                .map_err(|e| Error::io(&path, e))?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        plots.push(path);
    }
    Ok(EmittedFiles { table, log, plots })
}
