//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # reference scenario
//! network.n_f = 4
//! network.p_th_dbm = 40
//! sweep.p_th_dbm = 20, 25, 30, 35, 40, 45
//! run.schemes = proposed, no_an, zf
//! ```
//!
//! Keys are dotted, dB-valued keys end in `_db` or `_dbm`, lists are comma
//! separated, `#` starts a comment. Later assignments win, so command-line
//! overrides are applied with [`ExperimentConfig::set`] after the file.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::baselines::Scheme;
use crate::channel::PropagationParams;
use crate::model::{db_to_linear, dbm_to_watts, Distances, NetworkConfig};
use crate::sca::ScaConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub n_m: usize,
    pub n_f: usize,
    pub m: usize,
    pub k: usize,
    pub gamma_db: f64,
    pub p_th_dbm: f64,
    pub q_dbm: f64,
    pub xi: f64,
    pub noise_dbm: f64,
    pub distances: Distances,
    pub propagation: PropagationParams,
    pub sca: ScaConfig,
    pub sweep_p_th_dbm: Vec<f64>,
    pub sweep_k: Vec<usize>,
    /// FBS antennas used by the runtime sweep; at least `max(sweep_k) + 1`.
    pub sweep_k_n_f: usize,
    pub trials: usize,
    pub seed: u64,
    pub schemes: Vec<Scheme>,
    /// Worker threads; zero uses every core.
    pub jobs: usize,
    pub traces: bool,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_m: 10,
            n_f: 4,
            m: 2,
            k: 2,
            gamma_db: -10.0,
            p_th_dbm: 40.0,
            q_dbm: 15.0,
            xi: 0.6,
            noise_dbm: -100.0,
            distances: Distances::default(),
            propagation: PropagationParams::default(),
            sca: ScaConfig::default(),
            sweep_p_th_dbm: vec![20.0, 25.0, 30.0, 35.0, 40.0, 45.0],
            sweep_k: vec![1, 2, 3, 4],
            sweep_k_n_f: 5,
            trials: 50,
            seed: 0,
            schemes: Scheme::ALL.to_vec(),
            jobs: 0,
            traces: false,
            out: PathBuf::from("out"),
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::config(format!("{key}: cannot parse '{v}'")))
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse(key, s)).collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::config(format!("{key}: expected a boolean, got '{v}'"))),
    }
}

impl ExperimentConfig {
    /// Every recognised key.
    pub const KEYS: &'static [&'static str] = &[
        "network.n_m",
        "network.n_f",
        "network.m",
        "network.k",
        "network.gamma_db",
        "network.p_th_dbm",
        "network.q_dbm",
        "network.xi",
        "network.noise_dbm",
        "distances.mbs_m",
        "distances.fbs_mu_m",
        "distances.fbs_ir_m",
        "distances.fbs_er_m",
        "propagation.pathloss_intercept_db",
        "propagation.pathloss_slope_db",
        "propagation.shadow_sigma_db",
        "propagation.antenna_gain_db",
        "sca.eps",
        "sca.max_iters",
        "sca.q",
        "sca.eh_mode",
        "sca.objective_mode",
        "solver.tol_feas",
        "solver.tol_gap",
        "solver.max_iters",
        "sweep.p_th_dbm",
        "sweep.k",
        "sweep.k_n_f",
        "run.trials",
        "run.seed",
        "run.schemes",
        "run.jobs",
        "run.traces",
        "run.out",
    ];

    /// Applies one assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "network.n_m" => self.n_m = parse(key, v)?,
            "network.n_f" => self.n_f = parse(key, v)?,
            "network.m" => self.m = parse(key, v)?,
            "network.k" => self.k = parse(key, v)?,
            "network.gamma_db" => self.gamma_db = parse(key, v)?,
            "network.p_th_dbm" => self.p_th_dbm = parse(key, v)?,
            "network.q_dbm" => self.q_dbm = parse(key, v)?,
            "network.xi" => self.xi = parse(key, v)?,
            "network.noise_dbm" => self.noise_dbm = parse(key, v)?,
            "distances.mbs_m" => self.distances.mbs_m = parse(key, v)?,
            "distances.fbs_mu_m" => self.distances.fbs_mu_m = parse(key, v)?,
            "distances.fbs_ir_m" => self.distances.fbs_ir_m = parse(key, v)?,
            "distances.fbs_er_m" => self.distances.fbs_er_m = parse(key, v)?,
            "propagation.pathloss_intercept_db" => self.propagation.pathloss_intercept_db = parse(key, v)?,
            "propagation.pathloss_slope_db" => self.propagation.pathloss_slope_db = parse(key, v)?,
            "propagation.shadow_sigma_db" => self.propagation.shadow_sigma_db = parse(key, v)?,
            "propagation.antenna_gain_db" => self.propagation.antenna_gain_dbi = parse(key, v)?,
            "sca.eps" => self.sca.eps_sca = parse(key, v)?,
            "sca.max_iters" => self.sca.max_iters = parse(key, v)?,
            "sca.q" => self.sca.q = parse(key, v)?,
            "sca.eh_mode" => self.sca.eh_mode = v.parse()?,
            "sca.objective_mode" => self.sca.objective_mode = v.parse()?,
            "solver.tol_feas" => self.sca.solver.tol_feas = parse(key, v)?,
            "solver.tol_gap" => self.sca.solver.tol_gap = parse(key, v)?,
            "solver.max_iters" => self.sca.solver.max_iters = parse(key, v)?,
            "sweep.p_th_dbm" => self.sweep_p_th_dbm = parse_list(key, v)?,
            "sweep.k" => self.sweep_k = parse_list(key, v)?,
            "sweep.k_n_f" => self.sweep_k_n_f = parse(key, v)?,
            "run.trials" => self.trials = parse(key, v)?,
            "run.seed" => self.seed = parse(key, v)?,
            "run.schemes" => self.schemes = parse_list(key, v)?,
            "run.jobs" => self.jobs = parse(key, v)?,
            "run.traces" => self.traces = parse_bool(key, v)?,
            "run.out" => self.out = PathBuf::from(v),
            other => return Err(Error::config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::config(format!("override '{assignment}' is not of the form key=value")))?;
        self.set(k, v)
    }

    /// Defaults updated with the assignments in `text`.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("expected key = value, got '{line}'") })?;
            cfg.set(k, v).map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse_str(&std::fs::read_to_string(path)?)
    }

    /// Serialises every key, in a form [`parse_str`](Self::parse_str) reads back.
    pub fn to_text(&self) -> String {
        let list = |v: &[String]| v.join(", ");
        let f = |x: f64| format!("{x}");
        let pairs: Vec<(&str, String)> = vec![
            ("network.n_m", self.n_m.to_string()),
            ("network.n_f", self.n_f.to_string()),
            ("network.m", self.m.to_string()),
            ("network.k", self.k.to_string()),
            ("network.gamma_db", f(self.gamma_db)),
            ("network.p_th_dbm", f(self.p_th_dbm)),
            ("network.q_dbm", f(self.q_dbm)),
            ("network.xi", f(self.xi)),
            ("network.noise_dbm", f(self.noise_dbm)),
            ("distances.mbs_m", f(self.distances.mbs_m)),
            ("distances.fbs_mu_m", f(self.distances.fbs_mu_m)),
            ("distances.fbs_ir_m", f(self.distances.fbs_ir_m)),
            ("distances.fbs_er_m", f(self.distances.fbs_er_m)),
            ("propagation.pathloss_intercept_db", f(self.propagation.pathloss_intercept_db)),
            ("propagation.pathloss_slope_db", f(self.propagation.pathloss_slope_db)),
            ("propagation.shadow_sigma_db", f(self.propagation.shadow_sigma_db)),
            ("propagation.antenna_gain_db", f(self.propagation.antenna_gain_dbi)),
            ("sca.eps", f(self.sca.eps_sca)),
            ("sca.max_iters", self.sca.max_iters.to_string()),
            ("sca.q", self.sca.q.to_string()),
            ("sca.eh_mode", enum_name(&self.sca.eh_mode)),
            ("sca.objective_mode", enum_name(&self.sca.objective_mode)),
            ("solver.tol_feas", f(self.sca.solver.tol_feas)),
            ("solver.tol_gap", f(self.sca.solver.tol_gap)),
            ("solver.max_iters", self.sca.solver.max_iters.to_string()),
            ("sweep.p_th_dbm", list(&self.sweep_p_th_dbm.iter().map(|&x| f(x)).collect::<Vec<_>>())),
            ("sweep.k", list(&self.sweep_k.iter().map(|x| x.to_string()).collect::<Vec<_>>())),
            ("sweep.k_n_f", self.sweep_k_n_f.to_string()),
            ("run.trials", self.trials.to_string()),
            ("run.seed", self.seed.to_string()),
            ("run.schemes", list(&self.schemes.iter().map(|s| s.as_str().to_string()).collect::<Vec<_>>())),
            ("run.jobs", self.jobs.to_string()),
            ("run.traces", self.traces.to_string()),
            ("run.out", self.out.display().to_string()),
        ];
        pairs.into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::config("run.trials must be at least 1"));
        }
        if self.schemes.is_empty() {
            return Err(Error::config("run.schemes is empty"));
        }
        if self.sweep_p_th_dbm.is_empty() || !self.sweep_p_th_dbm.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::config("sweep.p_th_dbm must be nonempty and strictly increasing"));
        }
        if self.sweep_k.is_empty() || !self.sweep_k.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::config("sweep.k must be nonempty and strictly increasing"));
        }
        let k_max = *self.sweep_k.last().unwrap();
        if self.sweep_k_n_f < k_max + 1 {
            return Err(Error::config(format!(
                "sweep.k_n_f = {} is below max K + 1 = {}",
                self.sweep_k_n_f,
                k_max + 1
            )));
        }
        self.sca.validate()?;
        self.network(self.p_th_dbm, self.k, self.n_f).validate()
    }

    /// Network at budget `p_th_dbm` with `k` energy receivers and `n_f` FBS antennas.
    pub fn network(&self, p_th_dbm: f64, k: usize, n_f: usize) -> NetworkConfig {
        let noise = dbm_to_watts(self.noise_dbm);
        NetworkConfig {
            n_m: self.n_m,
            n_f,
            m: self.m,
            k,
            gamma: vec![db_to_linear(self.gamma_db); self.m],
            p_th: dbm_to_watts(p_th_dbm),
            q: vec![dbm_to_watts(self.q_dbm); k],
            xi: self.xi,
            sigma2_m: vec![noise; self.m],
            sigma2_i: noise,
            sigma2_e: vec![noise; k],
            distances: self.distances,
            propagation: self.propagation,
        }
    }

    /// The configured scenario.
    pub fn base_network(&self) -> NetworkConfig {
        self.network(self.p_th_dbm, self.k, self.n_f)
    }
}

fn enum_name<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_network_is_the_reference_scenario() {
        assert_eq!(ExperimentConfig::default().base_network(), NetworkConfig::default_scenario());
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = ExperimentConfig::default();
        cfg.set("sweep.p_th_dbm", "30, 35.5").unwrap();
        cfg.set("sca.objective_mode", "gamma").unwrap();
        cfg.set("run.schemes", "zf,proposed").unwrap();
        let back = ExperimentConfig::parse_str(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(cfg.to_text().lines().count(), ExperimentConfig::KEYS.len());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = ExperimentConfig::parse_str("# c\nnetwork.k = 2\nnetwork.bogus = 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(ExperimentConfig::parse_str("network.k 2").is_err());
    }
}
