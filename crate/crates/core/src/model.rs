//! Network configuration and exact evaluation of the physical-layer
//! quantities: SINRs, total power, harvested energy and secrecy rate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{complex_pairs, ChannelSet, PropagationParams};
use crate::{Error, Result};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

/// `aᴴw`.
pub fn inner(a: &[Complex64], w: &[Complex64]) -> Complex64 {
    a.iter().zip(w).map(|(a, w)| a.conj() * w).sum()
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

/// Transmitter-receiver distances in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distances {
    /// MBS to every receiver.
    pub mbs_m: f64,
    pub fbs_mu_m: f64,
    pub fbs_ir_m: f64,
    pub fbs_er_m: f64,
}

impl Default for Distances {
    fn default() -> Self {
        Self { mbs_m: 60.0, fbs_mu_m: 30.0, fbs_ir_m: 20.0, fbs_er_m: 5.0 }
    }
}

/// Scenario parameters. All powers are linear watts and all SINR targets linear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub n_m: usize,
    pub n_f: usize,
    pub m: usize,
    pub k: usize,
    /// Per-MU SINR targets.
    pub gamma: Vec<f64>,
    pub p_th: f64,
    /// Per-ER harvesting thresholds.
    pub q: Vec<f64>,
    pub xi: f64,
    pub sigma2_m: Vec<f64>,
    pub sigma2_i: f64,
    pub sigma2_e: Vec<f64>,
    pub distances: Distances,
    pub propagation: PropagationParams,
}

impl NetworkConfig {
    /// N_M = 10, N_F = 4, M = K = 2, Γ = −10 dB, Q = 15 dBm, ξ = 0.6,
    /// noise −100 dBm, P_th = 40 dBm.
    pub fn default_scenario() -> Self {
        let noise = dbm_to_watts(-100.0);
        Self {
            n_m: 10,
            n_f: 4,
            m: 2,
            k: 2,
            gamma: vec![db_to_linear(-10.0); 2],
            p_th: dbm_to_watts(40.0),
            q: vec![dbm_to_watts(15.0); 2],
            xi: 0.6,
            sigma2_m: vec![noise; 2],
            sigma2_i: noise,
            sigma2_e: vec![noise; 2],
            distances: Distances::default(),
            propagation: PropagationParams::default(),
        }
    }

    /// Changes the user counts, extending per-user vectors with their first entry.
    pub fn with_users(mut self, m: usize, k: usize) -> Self {
        fn fit(v: &mut Vec<f64>, n: usize, fallback: f64) {
            let fill = v.first().copied().unwrap_or(fallback);
            v.resize(n, fill);
        }
        let noise = self.sigma2_i;
        fit(&mut self.gamma, m, db_to_linear(-10.0));
        fit(&mut self.sigma2_m, m, noise);
        fit(&mut self.q, k, dbm_to_watts(15.0));
        fit(&mut self.sigma2_e, k, noise);
        self.m = m;
        self.k = k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::config(msg));
        if self.m == 0 {
            return fail("at least one macro user is required".into());
        }
        if self.n_m < self.m {
            return fail(format!("N_M = {} must be at least M = {}", self.n_m, self.m));
        }
        if self.n_f < self.k + 1 {
            return fail(format!("N_F = {} must be at least K + 1 = {}", self.n_f, self.k + 1));
        }
        if !(self.xi > 0.0 && self.xi <= 1.0) {
            return fail(format!("xi = {} must lie in (0, 1]", self.xi));
        }
        if !(self.p_th > 0.0 && self.p_th.is_finite()) {
            return fail(format!("P_th = {} must be positive", self.p_th));
        }
        if !(self.sigma2_i > 0.0 && self.sigma2_i.is_finite()) {
            return fail("sigma2_i must be positive".into());
        }
        for (name, v, n, allow_zero) in [
            ("gamma", &self.gamma, self.m, false),
            ("sigma2_m", &self.sigma2_m, self.m, false),
            ("q", &self.q, self.k, true),
            ("sigma2_e", &self.sigma2_e, self.k, false),
        ] {
            if v.len() != n {
                return fail(format!("{name} has {} entries, expected {n}", v.len()));
            }
            if v.iter().any(|&x| !x.is_finite() || x < 0.0 || (!allow_zero && x == 0.0)) {
                return fail(format!("{name} entries must be positive"));
            }
        }
        let d = &self.distances;
        if [d.mbs_m, d.fbs_mu_m, d.fbs_ir_m, d.fbs_er_m].iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return fail("distances must be positive".into());
        }
        self.propagation.validate()
    }
}

/// MBS beamformers, FBS information beamformer and the AN vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamformingSolution {
    #[serde(with = "complex_pairs::nested")]
    pub w_m: Vec<Vec<Complex64>>,
    #[serde(with = "complex_pairs")]
    pub w_i: Vec<Complex64>,
    #[serde(with = "complex_pairs")]
    pub v_e: Vec<Complex64>,
}

impl BeamformingSolution {
    pub fn zeros(cfg: &NetworkConfig) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self { w_m: vec![vec![z; cfg.n_m]; cfg.m], w_i: vec![z; cfg.n_f], v_e: vec![z; cfg.n_f] }
    }

    pub fn validate(&self, cfg: &NetworkConfig) -> Result<()> {
        let shapes_ok = self.w_m.len() == cfg.m
            && self.w_m.iter().all(|w| w.len() == cfg.n_m)
            && self.w_i.len() == cfg.n_f
            && self.v_e.len() == cfg.n_f;
        if !shapes_ok {
            return Err(Error::shape("beamforming solution does not match the network layout"));
        }
        let finite =
            self.w_m.iter().flatten().chain(&self.w_i).chain(&self.v_e).all(|c| c.re.is_finite() && c.im.is_finite());
        if !finite {
            return Err(Error::shape("beamforming solution has non-finite entries"));
        }
        Ok(())
    }

    pub fn scaled(&self, s: f64) -> Self {
        let f = |v: &Vec<Complex64>| v.iter().map(|c| c * s).collect::<Vec<_>>();
        Self { w_m: self.w_m.iter().map(f).collect(), w_i: f(&self.w_i), v_e: f(&self.v_e) }
    }
}

/// SINR of MU `m` (0-based).
pub fn sinr_mu(sol: &BeamformingSolution, ch: &ChannelSet, cfg: &NetworkConfig, m: usize) -> f64 {
    let h = &ch.h_m[m];
    let l = &ch.l_m[m];
    let signal = inner(h, &sol.w_m[m]).norm_sqr();
    let intra: f64 = (0..cfg.m).filter(|&i| i != m).map(|i| inner(h, &sol.w_m[i]).norm_sqr()).sum();
    let fbs = inner(l, &sol.w_i).norm_sqr() + inner(l, &sol.v_e).norm_sqr();
    signal / (intra + fbs + cfg.sigma2_m[m])
}

pub fn sinr_ir(sol: &BeamformingSolution, ch: &ChannelSet, cfg: &NetworkConfig) -> f64 {
    let signal = inner(&ch.h_i, &sol.w_i).norm_sqr();
    let mbs: f64 = sol.w_m.iter().map(|w| inner(&ch.h_i0, w).norm_sqr()).sum();
    signal / (mbs + inner(&ch.h_i, &sol.v_e).norm_sqr() + cfg.sigma2_i)
}

/// SINR of ER `k` (0-based) when it tries to decode the IR's data.
pub fn sinr_er(sol: &BeamformingSolution, ch: &ChannelSet, cfg: &NetworkConfig, k: usize) -> f64 {
    let g = &ch.g_k[k];
    let signal = inner(g, &sol.w_i).norm_sqr();
    let mbs: f64 = sol.w_m.iter().map(|w| inner(&ch.g_k0[k], w).norm_sqr()).sum();
    signal / (mbs + inner(g, &sol.v_e).norm_sqr() + cfg.sigma2_e[k])
}

pub fn total_power(sol: &BeamformingSolution) -> f64 {
    sol.w_m.iter().map(|w| norm_sqr(w)).sum::<f64>() + norm_sqr(&sol.w_i) + norm_sqr(&sol.v_e)
}

/// Energy harvested at ER `k`. The MBS signal is not counted.
pub fn harvested_energy(sol: &BeamformingSolution, ch: &ChannelSet, cfg: &NetworkConfig, k: usize) -> f64 {
    let g = &ch.g_k[k];
    cfg.xi * (inner(g, &sol.w_i).norm_sqr() + inner(g, &sol.v_e).norm_sqr() + cfg.sigma2_e[k])
}

/// `log2(1 + SINR_I) − max_k log2(1 + SINR_e,k)` without the clamp at zero.
pub fn secrecy_margin(sol: &BeamformingSolution, ch: &ChannelSet, cfg: &NetworkConfig) -> f64 {
    let ir = (1.0 + sinr_ir(sol, ch, cfg)).log2();
    let eve = (0..cfg.k).map(|k| (1.0 + sinr_er(sol, ch, cfg, k)).log2()).fold(0.0, f64::max);
    ir - eve
}

/// Secrecy rate in bit/s/Hz.
pub fn secrecy_rate(sol: &BeamformingSolution, ch: &ChannelSet, cfg: &NetworkConfig) -> f64 {
    secrecy_margin(sol, ch, cfg).max(0.0)
}

/// Signed slacks of the MU SINR, power and harvesting constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintAudit {
    /// `SINR_m − Γ_m`.
    pub sinr_slack: Vec<f64>,
    /// `P_th − P_tot`.
    pub power_slack: f64,
    /// `E_k − Q_k`.
    pub eh_slack: Vec<f64>,
    /// Largest violation relative to its threshold; zero when all hold.
    pub worst_violation: f64,
    pub feasible: bool,
}

/// Audits `sol` against the original nonconvex constraints. A constraint
/// counts as violated when its slack is below `−tol` times its threshold.
pub fn audit(sol: &BeamformingSolution, ch: &ChannelSet, cfg: &NetworkConfig, tol: f64) -> Result<ConstraintAudit> {
    sol.validate(cfg)?;
    ch.validate(cfg)?;
    let sinr_slack: Vec<f64> = (0..cfg.m).map(|m| sinr_mu(sol, ch, cfg, m) - cfg.gamma[m]).collect();
    let power_slack = cfg.p_th - total_power(sol);
    let eh_slack: Vec<f64> = (0..cfg.k).map(|k| harvested_energy(sol, ch, cfg, k) - cfg.q[k]).collect();

    let rel = |slack: f64, scale: f64| -slack / scale.max(f64::MIN_POSITIVE);
    let worst = sinr_slack
        .iter()
        .zip(&cfg.gamma)
        .map(|(s, g)| rel(*s, *g))
        .chain(std::iter::once(rel(power_slack, cfg.p_th)))
        .chain(eh_slack.iter().zip(&cfg.q).map(|(s, q)| rel(*s, *q)))
        .fold(0.0f64, f64::max);
    Ok(ConstraintAudit { sinr_slack, power_slack, eh_slack, worst_violation: worst, feasible: worst <= tol })
}
