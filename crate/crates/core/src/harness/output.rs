//! Result tables and summaries.
//!
//! `results.csv` holds one [`ResultRow`] per line with the header
//! `axis,sweep_value,seed,scheme,status,feasible,secrecy_rate,iterations,worst_violation,num_vars,num_rows`.
//! `timings.csv` holds the wall times. `summary.json` echoes the
//! configuration and carries the aggregates, which are recomputable from
//! the two tables alone.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use super::config::ExperimentConfig;
use super::run::{Axis, Outcome, ResultRow, TimingRow};
use crate::baselines::Scheme;
use crate::Result;

pub const RESULTS_HEADER: &str =
    "axis,sweep_value,seed,scheme,status,feasible,secrecy_rate,iterations,worst_violation,num_vars,num_rows";

/// Per `(axis, sweep value, scheme)` statistics of the result rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub axis: Axis,
    pub sweep_value: f64,
    pub scheme: Scheme,
    pub trials: usize,
    pub feasible: usize,
    pub converged: usize,
    /// Mean secrecy rate over feasible rows; infeasible rows are excluded.
    pub mean_rate: Option<f64>,
    pub stderr_rate: Option<f64>,
    /// Mean over every row, an infeasible row counting as rate zero.
    pub mean_rate_all: f64,
    pub stderr_rate_all: f64,
    pub mean_iterations: Option<f64>,
    pub num_vars: usize,
    pub num_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingAggregate {
    pub axis: Axis,
    pub sweep_value: f64,
    pub scheme: Scheme,
    pub median_wall_time_s: f64,
    /// Median over runs that produced a feasible solution.
    pub median_feasible_wall_time_s: Option<f64>,
}

/// Mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return Some((mean, 0.0));
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Some((mean, (var / n).sqrt()))
}

pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

type Key = (Axis, u64, Scheme);

fn group<'a, T>(items: &'a [T], key: impl Fn(&T) -> Key) -> BTreeMap<Key, Vec<&'a T>> {
    let mut map: BTreeMap<Key, Vec<&T>> = BTreeMap::new();
    for it in items {
        map.entry(key(it)).or_default().push(it);
    }
    map
}

pub fn aggregate(rows: &[ResultRow]) -> Vec<Aggregate> {
    group(rows, |r| (r.axis, r.sweep_value.to_bits(), r.scheme))
        .into_iter()
        .map(|((axis, v, scheme), rs)| {
            let feas: Vec<&&ResultRow> = rs.iter().filter(|r| r.feasible).collect();
            let rates: Vec<f64> = feas.iter().map(|r| r.secrecy_rate).collect();
            let all: Vec<f64> = rs.iter().map(|r| if r.feasible { r.secrecy_rate } else { 0.0 }).collect();
            let iters: Vec<f64> = feas.iter().map(|r| r.iterations as f64).collect();
            let fs = mean_stderr(&rates);
            let (mean_all, se_all) = mean_stderr(&all).unwrap_or((0.0, 0.0));
            Aggregate {
                axis,
                sweep_value: f64::from_bits(v),
                scheme,
                trials: rs.len(),
                feasible: feas.len(),
                converged: rs.iter().filter(|r| r.status == "converged").count(),
                mean_rate: fs.map(|p| p.0),
                stderr_rate: fs.map(|p| p.1),
                mean_rate_all: mean_all,
                stderr_rate_all: se_all,
                mean_iterations: mean_stderr(&iters).map(|p| p.0),
                num_vars: rs.iter().map(|r| r.num_vars).max().unwrap_or(0),
                num_rows: rs.iter().map(|r| r.num_rows).max().unwrap_or(0),
            }
        })
        .collect()
}

pub fn aggregate_timings(rows: &[TimingRow]) -> Vec<TimingAggregate> {
    group(rows, |r| (r.axis, r.sweep_value.to_bits(), r.scheme))
        .into_iter()
        .map(|((axis, v, scheme), rs)| {
            let all: Vec<f64> = rs.iter().map(|r| r.wall_time_s).collect();
            let feas: Vec<f64> = rs.iter().filter(|r| r.feasible).map(|r| r.wall_time_s).collect();
            TimingAggregate {
                axis,
                sweep_value: f64::from_bits(v),
                scheme,
                median_wall_time_s: median(&all).unwrap_or(0.0),
                median_feasible_wall_time_s: median(&feas),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub command: String,
    pub version: &'static str,
    pub git_commit: Option<String>,
    pub rows: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub metadata: RunMetadata,
    pub config: ExperimentConfig,
    pub aggregates: Vec<Aggregate>,
    pub timings: Vec<TimingAggregate>,
}

fn git_commit() -> Option<String> {
    let out = std::process::Command::new("git").args(["rev-parse", "--short", "HEAD"]).output().ok()?;
    out.status.success().then(|| String::from_utf8_lossy(&out.stdout).trim().to_string())
}

pub fn summarize(command: &str, cfg: &ExperimentConfig, outcome: &Outcome) -> Summary {
    Summary {
        metadata: RunMetadata {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            git_commit: git_commit(),
            rows: outcome.rows.len(),
        },
        config: cfg.clone(),
        aggregates: aggregate(&outcome.rows),
        timings: aggregate_timings(&outcome.timings),
    }
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn read_timings(path: &Path) -> Result<Vec<TimingRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Writes `results.csv`, `timings.csv`, `summary.json` and any traces into `dir`.
pub fn emit_outputs(dir: &Path, summary: &Summary, outcome: &Outcome) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    if outcome.rows.is_empty() {
        std::fs::write(dir.join("results.csv"), format!("{RESULTS_HEADER}\n"))?;
    } else {
        write_csv(&dir.join("results.csv"), &outcome.rows)?;
    }
    write_csv(&dir.join("timings.csv"), &outcome.timings)?;
    std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(summary)? + "\n")?;
    for (stem, trace) in &outcome.traces {
        std::fs::write(dir.join(format!("{stem}.json")), trace.to_json()? + "\n")?;
    }
    Ok(())
}
