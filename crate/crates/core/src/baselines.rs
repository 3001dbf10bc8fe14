//! Comparison schemes: the SCA design without artificial noise and a
//! zero-forcing design.
//!
//! Zero forcing places `w_I` in the null space of every ER and MU channel,
//! each `w_m` in the null space of the other macro users and the IR, and
//! `v_E` in the null space of the IR and the macro users, aimed at the ERs.
//! With every cross term removed the powers follow in closed form: each MU
//! gets exactly its SINR target, `v_E` exactly the weakest harvesting
//! requirement, and `w_I` the remaining budget.

use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelSet;
use crate::linalg::{dominant_direction, normalized, orthonormal_basis, project_out};
use crate::model::{audit, inner, secrecy_margin, BeamformingSolution, ConstraintAudit, NetworkConfig};
use crate::sca::{run_sca_with, ScaConfig, ScaTrace, AUDIT_TOL};
use crate::{Error, Result};

/// Headroom on the closed-form powers.
const ZF_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Proposed,
    NoAn,
    Zf,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Proposed, Scheme::NoAn, Scheme::Zf];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::NoAn => "no_an",
            Scheme::Zf => "zf",
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "proposed" => Ok(Scheme::Proposed),
            "no_an" | "no-an" => Ok(Scheme::NoAn),
            "zf" => Ok(Scheme::Zf),
            other => Err(Error::config(format!("unknown scheme '{other}'"))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of one scheme on one channel realisation. Every reported number
/// comes from the audit of `solution` against the original constraints.
#[derive(Debug, Clone, Serialize)]
pub struct BaselineResult {
    pub scheme: Scheme,
    pub solution: Option<BeamformingSolution>,
    /// Secrecy rate of `solution`, zero when infeasible.
    pub secrecy_rate: f64,
    pub feasible: bool,
    pub audit: Option<ConstraintAudit>,
    /// SCA iterations; zero for closed-form schemes.
    pub iterations: usize,
    pub message: Option<String>,
}

impl BaselineResult {
    fn infeasible(scheme: Scheme, reason: impl Into<String>) -> Self {
        Self {
            scheme,
            solution: None,
            secrecy_rate: 0.0,
            feasible: false,
            audit: None,
            iterations: 0,
            message: Some(reason.into()),
        }
    }

    /// Summarises an SCA trace.
    pub fn from_trace(scheme: Scheme, trace: &ScaTrace) -> Self {
        let feasible = trace.audit.as_ref().is_some_and(|a| a.feasible);
        Self {
            scheme,
            solution: trace.solution.clone(),
            secrecy_rate: if feasible { trace.secrecy_rate } else { 0.0 },
            feasible,
            audit: trace.audit.clone(),
            iterations: trace.iterations.len(),
            message: trace.message.clone(),
        }
    }

    pub fn worst_violation(&self) -> f64 {
        self.audit.as_ref().map_or(f64::INFINITY, |a| a.worst_violation)
    }
}

/// The SCA design with `v_E` removed; harvesting relies on `w_I` alone.
pub fn no_an_scheme(ch: &ChannelSet, cfg: &NetworkConfig, scfg: &ScaConfig) -> Result<(BaselineResult, ScaTrace)> {
    let trace = run_sca_with(ch, cfg, scfg, false)?;
    Ok((BaselineResult::from_trace(Scheme::NoAn, &trace), trace))
}

/// Runs `scheme`; SCA-based schemes also return their trace.
pub fn run_scheme(
    scheme: Scheme,
    ch: &ChannelSet,
    cfg: &NetworkConfig,
    scfg: &ScaConfig,
) -> Result<(BaselineResult, Option<ScaTrace>)> {
    match scheme {
        Scheme::Proposed => {
            let trace = run_sca_with(ch, cfg, scfg, true)?;
            Ok((BaselineResult::from_trace(Scheme::Proposed, &trace), Some(trace)))
        }
        Scheme::NoAn => no_an_scheme(ch, cfg, scfg).map(|(r, t)| (r, Some(t))),
        Scheme::Zf => zf_scheme(ch, cfg).map(|r| (r, None)),
    }
}

fn unit_in_null_space(target: &[Complex64], null_of: &[&[Complex64]]) -> Option<Vec<Complex64>> {
    let basis = orthonormal_basis(null_of);
    if basis.len() >= target.len() {
        return None;
    }
    normalized(&project_out(target, &basis))
}

fn scaled(u: &[Complex64], p: f64) -> Vec<Complex64> {
    u.iter().map(|c| c * p.sqrt()).collect()
}

/// Zero-forcing design with closed-form powers.
pub fn zf_scheme(ch: &ChannelSet, cfg: &NetworkConfig) -> Result<BaselineResult> {
    cfg.validate()?;
    ch.validate(cfg)?;
    let fail = |r: String| Ok(BaselineResult::infeasible(Scheme::Zf, r));

    let mut eaves: Vec<&[Complex64]> = ch.g_k.iter().map(|v| v.as_slice()).collect();
    eaves.extend(ch.l_m.iter().map(|v| v.as_slice()));
    let Some(u_i) = unit_in_null_space(&ch.h_i, &eaves) else {
        return fail(format!(
            "no direction for w_I orthogonal to {} ER and MU channels with N_F = {}",
            eaves.len(),
            cfg.n_f
        ));
    };

    let mut w_m = Vec::with_capacity(cfg.m);
    let mut mbs_power = 0.0;
    for m in 0..cfg.m {
        let mut others: Vec<&[Complex64]> = vec![&ch.h_i0];
        others.extend((0..cfg.m).filter(|&i| i != m).map(|i| ch.h_m[i].as_slice()));
        let Some(u) = unit_in_null_space(&ch.h_m[m], &others) else {
            return fail(format!("no zero-forcing direction for MU {m}"));
        };
        let g = inner(&ch.h_m[m], &u).norm_sqr();
        let p = cfg.gamma[m] * cfg.sigma2_m[m] / g * (1.0 + ZF_MARGIN);
        mbs_power += p;
        w_m.push(scaled(&u, p));
    }

    let mut protect: Vec<&[Complex64]> = vec![&ch.h_i];
    protect.extend(ch.l_m.iter().map(|v| v.as_slice()));
    let basis = orthonormal_basis(&protect);
    let mut an_power = 0.0;
    let mut v_e = vec![Complex64::new(0.0, 0.0); cfg.n_f];
    let needs: Vec<f64> = (0..cfg.k).map(|k| (cfg.q[k] / cfg.xi - cfg.sigma2_e[k]).max(0.0)).collect();
    if needs.iter().any(|&n| n > 0.0) {
        let Some(u_e) = dominant_direction(&ch.g_k, &basis, cfg.n_f) else {
            return fail("no AN direction orthogonal to the IR and the macro users".into());
        };
        for k in 0..cfg.k {
            let g = inner(&ch.g_k[k], &u_e).norm_sqr();
            if needs[k] > 0.0 {
                if !(g > 0.0) {
                    return fail(format!("ER {k} receives no AN power"));
                }
                an_power = f64::max(an_power, needs[k] / g);
            }
        }
        an_power *= 1.0 + ZF_MARGIN;
        v_e = scaled(&u_e, an_power);
    }

    let p_i = (cfg.p_th - mbs_power - an_power) * (1.0 - ZF_MARGIN);
    if !(p_i > 0.0) {
        return fail(format!(
            "MU and harvesting powers {:.3e} W exceed the budget {:.3e} W",
            mbs_power + an_power,
            cfg.p_th
        ));
    }
    let sol = BeamformingSolution { w_m, w_i: scaled(&u_i, p_i), v_e };
    let a = audit(&sol, ch, cfg, AUDIT_TOL)?;
    let margin = secrecy_margin(&sol, ch, cfg);
    Ok(BaselineResult {
        scheme: Scheme::Zf,
        secrecy_rate: if a.feasible { margin.max(0.0) } else { 0.0 },
        feasible: a.feasible,
        message: (!a.feasible).then(|| format!("audit violation {:.2e}", a.worst_violation)),
        audit: Some(a),
        solution: Some(sol),
        iterations: 0,
    })
}
