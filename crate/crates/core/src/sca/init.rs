//! Phase-1 construction of a feasible starting point.
//!
//! The FBS transmits `w_I = √(ρp)·u_I` and `v_E = √((1−ρ)p)·u_E` for a
//! handful of candidate directions and splits `ρ`. For each candidate the
//! smallest FBS power `p` meeting every harvesting threshold is computed in
//! closed form, the MBS beamformers are obtained from a power-minimisation
//! SOCP with the FBS interference fixed, and the candidate is kept if the
//! total power fits the budget. The feasible candidate with the highest
//! secrecy rate wins.

use num_complex::Complex64;
use serde::Serialize;

use super::expr::{LinExpr, ProgramBuilder};
use super::subproblem::{mu_sinr_soc, Beams, ExpansionPoint, Normalized};
use crate::channel::ChannelSet;
use crate::conic::{solve, SolverConfig};
use crate::linalg::{align_phase, dominant_direction, min_norm_solution, normalized, orthonormal_basis, project_out};
use crate::model::{audit, inner, secrecy_rate, total_power, BeamformingSolution, NetworkConfig};
use crate::sca::lift::{real_lift, taylor_quadratic_minorant, unstack};
use crate::Result;

const SPLITS: [f64; 6] = [0.5, 0.2, 0.8, 0.05, 0.95, 1.0];
const POWER_FRACTIONS: [f64; 2] = [0.1, 0.5];
/// Relative phase grid for the equalizing directions.
const PHASES: usize = 8;
/// Candidates, cheapest FBS power first, for which the MBS SOCP is solved.
const MAX_CANDIDATES: usize = 48;
/// Successive restrictions used to refine a harvesting beam.
const REFINE_ITERS: usize = 15;
/// Relative safety margin applied to the closed-form FBS power.
const MARGIN: f64 = 1e-7;
/// Relative inflation of the SINR targets in the MBS power minimisation,
/// absorbing the solver's residuals.
const SINR_MARGIN: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum InitOutcome {
    Feasible { point: ExpansionPoint, secrecy_rate: f64 },
    Infeasible { reason: String },
}

/// MBS beamformers of minimum total power meeting every MU SINR target when
/// MU `m` additionally sees `fbs_interference[m]` watts from the FBS.
/// `None` if the SOCP is infeasible.
pub fn mbs_power_min(
    ch: &ChannelSet,
    cfg: &NetworkConfig,
    fbs_interference: &[f64],
    solver: &SolverConfig,
) -> Result<Option<Vec<Vec<Complex64>>>> {
    let nc = Normalized::new(ch, cfg);
    let width = 2 * cfg.n_m;
    let t = cfg.m * width;
    let beams = Beams { w_m: (0..cfg.m).map(|m| m * width).collect(), w_i: 0, v_e: None };
    let mut pb = ProgramBuilder::new(t + 1);
    let mut power = vec![LinExpr::term(t, 1.0)];
    power.extend((0..t).map(|j| LinExpr::term(j, 1.0)));
    pb.soc("mbs power", power);
    for m in 0..cfg.m {
        let fixed = fbs_interference[m] / cfg.sigma2_m[m];
        let target = cfg.gamma[m] * (1.0 + SINR_MARGIN);
        let (cone, im) = mu_sinr_soc(&nc.h_m[m], &nc.l_m[m], target, m, &beams, Some(fixed));
        pb.soc(format!("SINR_{m}"), cone);
        pb.zero(format!("Im_{m}"), im);
    }
    pb.minimize(&LinExpr::term(t, 1.0));
    let (prog, _) = pb.build()?;
    let res = solve(&prog, solver)?;
    if !res.status.has_solution() {
        return Ok(None);
    }
    let mut w: Vec<Vec<Complex64>> = (0..cfg.m)
        .map(|m| unstack(&res.x[m * width..(m + 1) * width]).into_iter().map(|c| c * nc.sqrt_p).collect())
        .collect();
    for (m, wm) in w.iter_mut().enumerate() {
        align_phase(wm, &ch.h_m[m]);
    }
    Ok(Some(w))
}

/// Orthonormal bases of the subspaces a beam may be asked to avoid:
/// nothing, the macro users, the IR, and the IR together with the macro users.
fn avoid_sets(ch: &ChannelSet) -> [Vec<Vec<Complex64>>; 4] {
    let l: Vec<&[Complex64]> = ch.l_m.iter().map(|v| v.as_slice()).collect();
    let mut hl: Vec<&[Complex64]> = vec![&ch.h_i];
    hl.extend(l.iter().copied());
    [Vec::new(), orthonormal_basis(&l), orthonormal_basis(&[&ch.h_i]), orthonormal_basis(&hl)]
}

/// Harvesting beams for each avoid set: the dominant direction, the
/// equalizing directions and a refinement of the cheapest of them.
fn harvesting_directions(ch: &ChannelSet, cfg: &NetworkConfig, solver: &SolverConfig) -> Result<Vec<Vec<Complex64>>> {
    let n = ch.h_i.len();
    let mut dirs = Vec::new();
    for avoid in &avoid_sets(ch) {
        let mut set: Vec<Vec<Complex64>> = dominant_direction(&ch.g_k, avoid, n).into_iter().collect();
        set.extend(equalizing_directions(ch, cfg, avoid));
        let cheapest = set
            .iter()
            .filter_map(|u| min_fbs_power(ch, cfg, u, u, 1.0).map(|p| (p, u)))
            .min_by(|a, b| a.0.total_cmp(&b.0));
        if let Some((_, u)) = cheapest {
            if let Some(r) = refined_eh_beam(ch, cfg, avoid, u, solver)? {
                set.push(r);
            }
        }
        dirs.extend(set);
    }
    Ok(dirs)
}

/// Candidate `(u_I, u_E)` directions. Without AN `u_E` is empty.
fn fbs_directions(
    ch: &ChannelSet,
    cfg: &NetworkConfig,
    with_an: bool,
    solver: &SolverConfig,
) -> Result<(Vec<Vec<Complex64>>, Vec<Vec<Complex64>>)> {
    let g: Vec<&[Complex64]> = ch.g_k.iter().map(|v| v.as_slice()).collect();
    let l: Vec<&[Complex64]> = ch.l_m.iter().map(|v| v.as_slice()).collect();
    let gl: Vec<&[Complex64]> = g.iter().chain(&l).copied().collect();
    let mut u_is = Vec::new();
    for avoid in [Vec::new(), orthonormal_basis(&g), orthonormal_basis(&l), orthonormal_basis(&gl)] {
        u_is.extend(normalized(&project_out(&ch.h_i, &avoid)));
    }
    let harvesting = harvesting_directions(ch, cfg, solver)?;
    Ok(if with_an { (u_is, harvesting) } else { (u_is.into_iter().chain(harvesting).collect(), Vec::new()) })
}

/// Per-ER amplitude needed to reach its threshold with unit transmit power.
fn eh_amplitudes(cfg: &NetworkConfig) -> Vec<f64> {
    (0..cfg.k).map(|k| (cfg.q[k] / cfg.xi - cfg.sigma2_e[k]).max(0.0).sqrt()).collect()
}

/// Minimum-norm directions `u ⟂ avoid` with `g_kᴴu = d_k e^{jθ_k}` for a grid
/// of relative phases `θ_k = 2π·j·k / PHASES`.
fn equalizing_directions(ch: &ChannelSet, cfg: &NetworkConfig, avoid: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let d = eh_amplitudes(cfg);
    if d.iter().all(|&v| v == 0.0) {
        return Vec::new();
    }
    let phases = if cfg.k > 1 { PHASES } else { 1 };
    (0..phases)
        .filter_map(|j| {
            let target: Vec<Complex64> = d
                .iter()
                .enumerate()
                .map(|(k, &a)| Complex64::from_polar(a, std::f64::consts::TAU * (j * k) as f64 / PHASES as f64))
                .collect();
            min_norm_solution(&ch.g_k, &target, avoid).and_then(|u| normalized(&u))
        })
        .collect()
}

/// Locally power-minimal beam `u ⟂ avoid` meeting every harvesting
/// threshold on its own, by successive Taylor restrictions started from the
/// scaled `start`. Returns the unit direction.
fn refined_eh_beam(
    ch: &ChannelSet,
    cfg: &NetworkConfig,
    avoid: &[Vec<Complex64>],
    start: &[Complex64],
    solver: &SolverConfig,
) -> Result<Option<Vec<Complex64>>> {
    let need: Vec<f64> = (0..cfg.k).map(|k| (cfg.q[k] / cfg.xi - cfg.sigma2_e[k]).max(0.0)).collect();
    let Some(p) = min_fbs_power(ch, cfg, start, start, 1.0) else {
        return Ok(None);
    };
    let n = start.len();
    let mut u: Vec<Complex64> = start.iter().map(|c| c * p.sqrt()).collect();
    let mut power = p;
    for _ in 0..REFINE_ITERS {
        let mut pb = ProgramBuilder::new(2 * n + 1);
        let t = 2 * n;
        let mut norm = vec![LinExpr::term(t, 1.0)];
        norm.extend((0..2 * n).map(|j| LinExpr::term(j, 1.0)));
        pb.soc("beam power", norm);
        for (k, g) in ch.g_k.iter().enumerate() {
            if need[k] > 0.0 {
                pb.nonneg(format!("E_{k}"), taylor_quadratic_minorant(g, &u).to_expr(0) - need[k]);
            }
        }
        for (i, b) in avoid.iter().enumerate() {
            let lift = real_lift(b);
            pb.zero(format!("Re null_{i}"), lift.re_expr(0));
            pb.zero(format!("Im null_{i}"), lift.im_expr(0));
        }
        pb.minimize(&LinExpr::term(t, 1.0));
        let (prog, _) = pb.build()?;
        let res = solve(&prog, solver)?;
        if !res.status.has_solution() {
            break;
        }
        let next = unstack(&res.x[..2 * n]);
        let next_power = crate::model::norm_sqr(&next);
        let done = power - next_power <= 1e-6 * power;
        if next_power < power {
            u = next;
            power = next_power;
        }
        if done {
            break;
        }
    }
    Ok(normalized(&u))
}

/// Single-user bound on the MBS power: `|h_mᴴw_m|² ≤ ‖h_m‖²‖w_m‖²`.
fn mbs_lower_bound(ch: &ChannelSet, cfg: &NetworkConfig, w_i: &[Complex64], v_e: &[Complex64]) -> f64 {
    (0..cfg.m)
        .map(|m| {
            let interference = inner(&ch.l_m[m], w_i).norm_sqr() + inner(&ch.l_m[m], v_e).norm_sqr();
            cfg.gamma[m] * (interference + cfg.sigma2_m[m]) / crate::model::norm_sqr(&ch.h_m[m])
        })
        .sum()
}

/// Smallest FBS power meeting every threshold for the split `rho`;
/// `None` when some ER receives nothing.
fn min_fbs_power(ch: &ChannelSet, cfg: &NetworkConfig, u_i: &[Complex64], u_e: &[Complex64], rho: f64) -> Option<f64> {
    let mut p: f64 = 0.0;
    for k in 0..cfg.k {
        let need = cfg.q[k] / cfg.xi - cfg.sigma2_e[k];
        if need <= 0.0 {
            continue;
        }
        let gain = rho * inner(&ch.g_k[k], u_i).norm_sqr() + (1.0 - rho) * inner(&ch.g_k[k], u_e).norm_sqr();
        if !(gain > 0.0) {
            return None;
        }
        p = p.max(need / gain);
    }
    Some(p * (1.0 + MARGIN))
}

/// Feasible starting point for the full scheme.
pub fn initialize(ch: &ChannelSet, cfg: &NetworkConfig) -> Result<InitOutcome> {
    initialize_with(ch, cfg, true, &SolverConfig::default())
}

/// Phase-1 search. With `with_an = false` the AN vector is held at zero.
pub fn initialize_with(
    ch: &ChannelSet,
    cfg: &NetworkConfig,
    with_an: bool,
    solver: &SolverConfig,
) -> Result<InitOutcome> {
    cfg.validate()?;
    ch.validate(cfg)?;
    let zero = vec![Complex64::new(0.0, 0.0); cfg.n_f];
    let (u_is, u_es) = fbs_directions(ch, cfg, with_an, solver)?;
    let u_es: Vec<Vec<Complex64>> = if u_es.is_empty() { vec![zero.clone()] } else { u_es };
    let splits: &[f64] = if with_an { &SPLITS } else { &[1.0] };

    let mbs_only = mbs_power_min(ch, cfg, &vec![0.0; cfg.m], solver)?;
    let Some(mbs_only) = mbs_only else {
        return Ok(InitOutcome::Infeasible { reason: "macro-user SINR targets are infeasible".into() });
    };
    let mbs_floor: f64 = mbs_only.iter().map(|w| crate::model::norm_sqr(w)).sum();
    if mbs_floor > cfg.p_th {
        return Ok(InitOutcome::Infeasible {
            reason: format!("macro users alone need {mbs_floor:.3e} W, budget is {:.3e} W", cfg.p_th),
        });
    }

    // candidate FBS settings ranked by estimated total power, cheapest first
    let mut candidates: Vec<(f64, Vec<Complex64>, Vec<Complex64>)> = Vec::new();
    for u_i in &u_is {
        for u_e in &u_es {
            for &rho in splits {
                let Some(p_min) = min_fbs_power(ch, cfg, u_i, u_e, rho) else {
                    continue;
                };
                let mut levels = vec![p_min];
                levels.extend(POWER_FRACTIONS.iter().map(|f| f * cfg.p_th).filter(|&p| p > p_min));
                for p in levels.into_iter().filter(|&p| p > 0.0 && p < cfg.p_th - mbs_floor) {
                    let w_i: Vec<Complex64> = u_i.iter().map(|c| c * (rho * p).sqrt()).collect();
                    let v_e: Vec<Complex64> = u_e.iter().map(|c| c * ((1.0 - rho) * p).sqrt()).collect();
                    let total = p + mbs_lower_bound(ch, cfg, &w_i, &v_e).max(mbs_floor);
                    if total <= cfg.p_th {
                        candidates.push((total, w_i, v_e));
                    }
                }
            }
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut best: Option<(f64, BeamformingSolution)> = None;
    let mut reason = String::from("harvesting thresholds cannot be met within the power budget");
    for (_, w_i, v_e) in candidates.into_iter().take(MAX_CANDIDATES) {
        let interference: Vec<f64> =
            (0..cfg.m).map(|m| inner(&ch.l_m[m], &w_i).norm_sqr() + inner(&ch.l_m[m], &v_e).norm_sqr()).collect();
        let Some(w_m) = mbs_power_min(ch, cfg, &interference, solver)? else {
            continue;
        };
        let w_m = w_m.into_iter().map(|w| w.into_iter().map(|c| c * (1.0 + MARGIN)).collect()).collect();
        let sol = BeamformingSolution { w_m, w_i, v_e: if with_an { v_e } else { zero.clone() } };
        if total_power(&sol) > cfg.p_th {
            continue;
        }
        let a = audit(&sol, ch, cfg, 1e-9)?;
        if !a.feasible {
            reason = format!("candidate violates constraints by {:.2e}", a.worst_violation);
            continue;
        }
        let rate = secrecy_rate(&sol, ch, cfg);
        if best.as_ref().is_none_or(|(r, _)| rate > *r) {
            best = Some((rate, sol));
        }
    }
    Ok(match best {
        Some((rate, sol)) => {
            InitOutcome::Feasible { point: ExpansionPoint::from_solution(&sol, ch, cfg), secrecy_rate: rate }
        }
        // a point without AN is feasible for the full scheme too
        None if with_an => match initialize_with(ch, cfg, false, solver)? {
            InitOutcome::Infeasible { .. } => InitOutcome::Infeasible { reason },
            found => found,
        },
        None => InitOutcome::Infeasible { reason },
    })
}
