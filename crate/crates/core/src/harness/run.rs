//! Monte-Carlo orchestration. Every scheme of one task sees the same channel
//! realisation; tasks run on a bounded worker pool and are sorted by key
//! afterwards, so the output does not depend on scheduling.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::baselines::{run_scheme, Scheme};
use crate::channel::generate_channel_set;
use crate::model::NetworkConfig;
use crate::sca::{ScaStatus, ScaTrace, SubproblemLayout};
use crate::{Error, Result};

/// The swept quantity of a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Single,
    PThDbm,
    K,
}

impl Axis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Axis::Single => "p_th_dbm",
            Axis::PThDbm => "p_th_dbm",
            Axis::K => "k",
        }
    }
}

/// One scheme on one channel realisation. Wall time lives in [`TimingRow`]
/// so that result tables are reproducible byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub axis: Axis,
    pub sweep_value: f64,
    pub seed: u64,
    pub scheme: Scheme,
    pub status: String,
    pub feasible: bool,
    pub secrecy_rate: f64,
    pub iterations: usize,
    pub worst_violation: Option<f64>,
    pub num_vars: usize,
    pub num_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub axis: Axis,
    pub sweep_value: f64,
    pub seed: u64,
    pub scheme: Scheme,
    pub feasible: bool,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub rows: Vec<ResultRow>,
    pub timings: Vec<TimingRow>,
    /// File stem and trace of each SCA run, when requested.
    pub traces: Vec<(String, ScaTrace)>,
}

impl Outcome {
    fn extend(&mut self, other: Outcome) {
        self.rows.extend(other.rows);
        self.timings.extend(other.timings);
        self.traces.extend(other.traces);
    }

    fn sort(&mut self) {
        let key = |a: Axis, v: f64, s: u64, sc: Scheme| (a, v.to_bits(), s, sc);
        self.rows.sort_by_key(|r| key(r.axis, r.sweep_value, r.seed, r.scheme));
        self.timings.sort_by_key(|r| key(r.axis, r.sweep_value, r.seed, r.scheme));
        self.traces.sort_by(|a, b| a.0.cmp(&b.0));
    }
}

fn trace_stem(axis: Axis, value: f64, seed: u64, scheme: Scheme) -> String {
    match axis {
        Axis::Single if scheme == Scheme::Proposed => format!("trace_{seed}"),
        Axis::Single => format!("trace_{seed}_{scheme}"),
        Axis::PThDbm => format!("trace_{seed}_p{value}_{scheme}"),
        Axis::K => format!("trace_{seed}_k{value}_{scheme}"),
    }
}

/// Every scheme of `schemes` on the channel realisation `seed` of `net`.
pub fn run_single(
    cfg: &ExperimentConfig,
    net: &NetworkConfig,
    schemes: &[Scheme],
    axis: Axis,
    sweep_value: f64,
    seed: u64,
) -> Result<Outcome> {
    let ch = generate_channel_set(net, seed)?;
    let mut out = Outcome::default();
    for &scheme in schemes {
        let start = Instant::now();
        let (res, trace) = run_scheme(scheme, &ch, net, &cfg.sca)?;
        let wall = start.elapsed().as_secs_f64();
        let status = match &trace {
            Some(t) => t.status.as_str().to_string(),
            None if res.feasible => "closed_form".to_string(),
            None => "infeasible".to_string(),
        };
        let (num_vars, num_rows) = match &trace {
            Some(t) if t.status != ScaStatus::Infeasible => (t.num_vars, t.num_rows),
            Some(t) => {
                let l = SubproblemLayout::new(net.m, net.k, net.n_m, net.n_f, cfg.sca.q, t.with_an);
                let rows = SubproblemLayout::predicted_rows(net.m, net.k, net.n_m, net.n_f, cfg.sca.q, t.with_an);
                (l.num_vars, rows)
            }
            None => (0, 0),
        };
        out.rows.push(ResultRow {
            axis,
            sweep_value,
            seed,
            scheme,
            status,
            feasible: res.feasible,
            secrecy_rate: res.secrecy_rate,
            iterations: res.iterations,
            worst_violation: res.audit.as_ref().map(|a| a.worst_violation),
            num_vars,
            num_rows,
        });
        out.timings.push(TimingRow { axis, sweep_value, seed, scheme, feasible: res.feasible, wall_time_s: wall });
        if cfg.traces {
            if let Some(t) = trace {
                out.traces.push((trace_stem(axis, sweep_value, seed, scheme), t));
            }
        }
    }
    Ok(out)
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))
}

fn run_tasks<F>(cfg: &ExperimentConfig, tasks: Vec<(f64, u64)>, f: F) -> Result<Outcome>
where
    F: Fn(f64, u64) -> Result<Outcome> + Sync + Send,
{
    let parts: Vec<Result<Outcome>> = pool(cfg.jobs)?.install(|| tasks.par_iter().map(|&(v, s)| f(v, s)).collect());
    let mut out = Outcome::default();
    for p in parts {
        out.extend(p?);
    }
    out.sort();
    Ok(out)
}

fn seeds(cfg: &ExperimentConfig) -> impl Iterator<Item = u64> + Clone + '_ {
    (0..cfg.trials as u64).map(move |t| cfg.seed + t)
}

/// Every configured scheme at every budget of `sweep.p_th_dbm`, for `trials` seeds.
pub fn sweep_power(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let tasks: Vec<(f64, u64)> = cfg.sweep_p_th_dbm.iter().flat_map(|&p| seeds(cfg).map(move |s| (p, s))).collect();
    run_tasks(cfg, tasks, |p, s| {
        let net = cfg.network(p, cfg.k, cfg.n_f);
        run_single(cfg, &net, &cfg.schemes, Axis::PThDbm, p, s)
    })
}

/// The proposed scheme for every `K` of `sweep.k`, with `sweep.k_n_f` FBS antennas.
pub fn runtime_vs_k(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let tasks: Vec<(f64, u64)> = cfg.sweep_k.iter().flat_map(|&k| seeds(cfg).map(move |s| (k as f64, s))).collect();
    run_tasks(cfg, tasks, |k, s| {
        let net = cfg.network(cfg.p_th_dbm, k as usize, cfg.sweep_k_n_f);
        run_single(cfg, &net, &[Scheme::Proposed], Axis::K, k, s)
    })
}

/// The configured schemes on the base scenario for `trials` seeds.
pub fn run_batch(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let tasks: Vec<(f64, u64)> = seeds(cfg).map(|s| (cfg.p_th_dbm, s)).collect();
    run_tasks(cfg, tasks, |p, s| run_single(cfg, &cfg.base_network(), &cfg.schemes, Axis::Single, p, s))
}
