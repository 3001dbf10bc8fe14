//! Assembly of the convex SOCP restriction around an expansion point.
//!
//! All quantities are normalised before assembly: beamformers by `√P_th`
//! and every channel by `√P_th / σ_r` of its receiver, so that received
//! powers are expressed in units of the receiver noise and the total power
//! budget is one. Each scalar slack is further scaled by its value at the
//! expansion point so that the program variables are of unit order.

use std::f64::consts::LN_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::expr::{LinExpr, ProgramBuilder};
use super::layout::SubproblemLayout;
use super::lift::{quad_over_lin_minorant, real_lift, stack, taylor_quadratic_minorant, unstack, RealLift};
use crate::channel::{complex_pairs, ChannelSet};
use crate::conic::{ConicProgram, SolverConfig};
use crate::model::{inner, BeamformingSolution, NetworkConfig};
use crate::{Error, Result};

/// Linearisation of the harvested-energy constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EhMode {
    /// Separate minorants of `|g_kᴴw_I|²` and `|g_kᴴv_E|²`; a true lower bound of the harvested energy.
    #[default]
    Separated,
    /// One minorant of `|g_kᴴ(w_I + v_E)|²`, which includes a cross term.
    AsPrinted,
}

/// What the subproblem maximises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveMode {
    /// `γ_I − γ_E`.
    #[default]
    GammaDiff,
    /// The secrecy-rate slack `γ`.
    Gamma,
}

impl std::str::FromStr for EhMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "separated" => Ok(Self::Separated),
            "as_printed" | "as-printed" => Ok(Self::AsPrinted),
            _ => Err(Error::config(format!("unknown eh mode '{s}'"))),
        }
    }
}

impl std::str::FromStr for ObjectiveMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gamma_diff" | "gamma-diff" => Ok(Self::GammaDiff),
            "gamma" => Ok(Self::Gamma),
            _ => Err(Error::config(format!("unknown objective mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaConfig {
    /// Stop when the relative change of the subproblem objective falls below this.
    pub eps_sca: f64,
    pub max_iters: usize,
    /// Order of the exponential-cone approximation.
    pub q: usize,
    pub eh_mode: EhMode,
    pub objective_mode: ObjectiveMode,
    pub solver: SolverConfig,
}

impl Default for ScaConfig {
    fn default() -> Self {
        Self {
            eps_sca: 1e-4,
            max_iters: 30,
            q: 6,
            eh_mode: EhMode::Separated,
            objective_mode: ObjectiveMode::GammaDiff,
            solver: SolverConfig::default(),
        }
    }
}

impl ScaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_sca > 0.0) {
            return Err(Error::config("eps_sca must be positive"));
        }
        if self.q < 2 {
            return Err(Error::config(format!("q = {} must be at least 2", self.q)));
        }
        if self.max_iters == 0 {
            return Err(Error::config("max_iters must be at least 1"));
        }
        Ok(())
    }
}

/// Point around which the nonconvex terms are linearised. Beamformers are in
/// physical units; `mu_i`, `eta_i` and `gamma_e` are noise-normalised, so
/// `mu_i² / eta_i` is an SINR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionPoint {
    #[serde(with = "complex_pairs::nested")]
    pub w_m: Vec<Vec<Complex64>>,
    #[serde(with = "complex_pairs")]
    pub w_i: Vec<Complex64>,
    #[serde(with = "complex_pairs")]
    pub v_e: Vec<Complex64>,
    pub mu_i: f64,
    pub eta_i: f64,
    pub gamma_e: f64,
}

impl ExpansionPoint {
    /// Exact slack values of a beamforming solution.
    pub fn from_solution(sol: &BeamformingSolution, ch: &ChannelSet, cfg: &NetworkConfig) -> Self {
        let s2 = cfg.sigma2_i;
        let mbs: f64 = sol.w_m.iter().map(|w| inner(&ch.h_i0, w).norm_sqr()).sum();
        let an = inner(&ch.h_i, &sol.v_e).norm_sqr();
        let gamma_e = (0..cfg.k).map(|k| crate::model::sinr_er(sol, ch, cfg, k)).fold(0.0, f64::max);
        Self {
            w_m: sol.w_m.clone(),
            w_i: sol.w_i.clone(),
            v_e: sol.v_e.clone(),
            mu_i: inner(&ch.h_i, &sol.w_i).norm() / s2.sqrt(),
            eta_i: (mbs + an + s2) / s2,
            gamma_e,
        }
    }

    pub fn solution(&self) -> BeamformingSolution {
        BeamformingSolution { w_m: self.w_m.clone(), w_i: self.w_i.clone(), v_e: self.v_e.clone() }
    }
}

/// Channels scaled by `√P_th / σ_r` of the receiving node.
#[derive(Debug, Clone)]
pub(crate) struct Normalized {
    pub h_m: Vec<Vec<Complex64>>,
    pub l_m: Vec<Vec<Complex64>>,
    pub h_i0: Vec<Complex64>,
    pub h_i: Vec<Complex64>,
    pub g_k0: Vec<Vec<Complex64>>,
    pub g_k: Vec<Vec<Complex64>>,
    /// `Q_k / (ξ σ_k²)`.
    pub eh_target: Vec<f64>,
    pub sqrt_p: f64,
}

fn scaled(v: &[Complex64], s: f64) -> Vec<Complex64> {
    v.iter().map(|c| c * s).collect()
}

impl Normalized {
    pub(crate) fn new(ch: &ChannelSet, cfg: &NetworkConfig) -> Self {
        let sp = cfg.p_th.sqrt();
        let at = |s2: f64| sp / s2.sqrt();
        Self {
            h_m: (0..cfg.m).map(|m| scaled(&ch.h_m[m], at(cfg.sigma2_m[m]))).collect(),
            l_m: (0..cfg.m).map(|m| scaled(&ch.l_m[m], at(cfg.sigma2_m[m]))).collect(),
            h_i0: scaled(&ch.h_i0, at(cfg.sigma2_i)),
            h_i: scaled(&ch.h_i, at(cfg.sigma2_i)),
            g_k0: (0..cfg.k).map(|k| scaled(&ch.g_k0[k], at(cfg.sigma2_e[k]))).collect(),
            g_k: (0..cfg.k).map(|k| scaled(&ch.g_k[k], at(cfg.sigma2_e[k]))).collect(),
            eh_target: (0..cfg.k).map(|k| cfg.q[k] / (cfg.xi * cfg.sigma2_e[k])).collect(),
            sqrt_p: sp,
        }
    }
}

/// Noise-normalised slack values implied by an expansion point.
#[derive(Debug, Clone)]
pub(crate) struct PointValues {
    pub w_m: Vec<Vec<Complex64>>,
    pub w_i: Vec<Complex64>,
    pub v_e: Vec<Complex64>,
    pub s_i: f64,
    pub s_m: Vec<f64>,
    pub s_e: f64,
    pub mu_i: f64,
    pub eta_i: f64,
    pub gamma_i: f64,
    pub t_k: Vec<f64>,
    pub t_k0: Vec<Vec<f64>>,
    pub t_ek: Vec<f64>,
    pub gamma_e: f64,
}

impl PointValues {
    pub(crate) fn new(nc: &Normalized, pt: &ExpansionPoint, with_an: bool) -> Self {
        let w_m: Vec<_> = pt.w_m.iter().map(|w| scaled(w, 1.0 / nc.sqrt_p)).collect();
        let w_i = scaled(&pt.w_i, 1.0 / nc.sqrt_p);
        let v_e = if with_an { scaled(&pt.v_e, 1.0 / nc.sqrt_p) } else { vec![Complex64::new(0.0, 0.0); pt.w_i.len()] };
        let s_i = inner(&nc.h_i, &w_i).norm_sqr();
        Self {
            s_m: w_m.iter().map(|w| inner(&nc.h_i0, w).norm()).collect(),
            s_e: inner(&nc.h_i, &v_e).norm(),
            mu_i: pt.mu_i,
            eta_i: pt.eta_i,
            gamma_i: pt.mu_i * pt.mu_i / pt.eta_i,
            t_k: nc.g_k.iter().map(|g| inner(g, &w_i).norm()).collect(),
            t_k0: nc.g_k0.iter().map(|g| w_m.iter().map(|w| inner(g, w).norm_sqr()).collect()).collect(),
            t_ek: nc.g_k.iter().map(|g| inner(g, &v_e).norm_sqr()).collect(),
            gamma_e: pt.gamma_e,
            s_i,
            w_m,
            w_i,
            v_e,
        }
    }

    pub(crate) fn b_k(&self, k: usize) -> f64 {
        self.t_k0[k].iter().sum::<f64>() + self.t_ek.get(k).copied().unwrap_or(0.0) + 1.0
    }
}

/// `τ_j` reference magnitudes for the chain bounding `2^c` by `T_0 = 1 + γ_I`.
pub(crate) fn tau_scales(q: usize, gamma_i: f64) -> Vec<f64> {
    let t0 = 1.0 + gamma_i.max(0.0);
    let mut t = vec![1.0; q + 4];
    t[0] = t0;
    for (j, tj) in t.iter_mut().enumerate().skip(4) {
        *tj = t0.powf(0.5f64.powi((q + 4 - j) as i32));
    }
    t
}

/// Rows `[x + y, 2z, x − y]` of the cone `‖[2z, x − y]‖ ≤ x + y`,
/// equivalent to `z² ≤ xy` with `x, y ≥ 0`.
pub fn hyperbolic_rows(z: LinExpr, x: LinExpr, y: LinExpr) -> Vec<LinExpr> {
    vec![x.clone() + y.clone(), z * 2.0, x - y]
}

/// hyperbolic cone for `(z/Z)² ≤ (x/X)(y/Y)` with `Z² = XY`; the same set, with
/// each side of unit order near the reference.
pub fn hyperbolic_balanced(z: LinExpr, x: LinExpr, y: LinExpr, x_ref: f64, y_ref: f64) -> Vec<LinExpr> {
    let z_ref = (x_ref * y_ref).sqrt();
    hyperbolic_rows(z * (1.0 / z_ref), x * (1.0 / x_ref), y * (1.0 / y_ref))
}

/// Emits the SOC chain enforcing `1 + γ_I ≥ P(c ln2 / 2^q)^{2^q} ≈ 2^c`, where
/// `P` is the degree-four Taylor polynomial of the exponential. `tau` holds
/// `τ_0 … τ_{q+3}` and `tau_ref` their reference magnitudes.
pub fn exp_soc_block(
    pb: &mut ProgramBuilder,
    q: usize,
    c: &LinExpr,
    gamma_i: &LinExpr,
    tau: &[LinExpr],
    tau_ref: &[f64],
) -> Result<()> {
    if q < 2 {
        return Err(Error::config(format!("exponential approximation order q = {q} must be at least 2")));
    }
    if tau.len() != q + 4 || tau_ref.len() != q + 4 {
        return Err(Error::shape(format!("expected {} auxiliary variables", q + 4)));
    }
    let y = c.clone() * (LN_2 / 2f64.powi(q as i32));
    let one = LinExpr::constant(1.0);
    pb.nonneg("exp: tau_0 <= 1 + gamma_I", gamma_i.clone() + 1.0 - tau[0].clone());
    pb.soc("exp: (1 + y)^2 <= tau_1", hyperbolic_rows(y.clone() + 1.0, tau[1].clone(), one.clone()));
    pb.soc("exp: (5/6 + y/2)^2 <= tau_2", hyperbolic_rows(y * 0.5 + 5.0 / 6.0, tau[2].clone(), one.clone()));
    pb.soc("exp: tau_1^2 <= tau_3", hyperbolic_rows(tau[1].clone(), tau[3].clone(), one.clone()));
    pb.nonneg(
        "exp: tau_2 + tau_3/24 + 19/72 <= tau_4",
        tau[4].clone() - tau[2].clone() - tau[3].clone() * (1.0 / 24.0) - 19.0 / 72.0,
    );
    for j in 5..=q + 3 {
        pb.soc(
            format!("exp: tau_{}^2 <= tau_{j}", j - 1),
            hyperbolic_balanced(tau[j - 1].clone(), tau[j].clone(), one.clone(), tau_ref[j], 1.0),
        );
    }
    pb.soc(
        format!("exp: tau_{}^2 <= tau_0", q + 3),
        hyperbolic_balanced(tau[q + 3].clone(), tau[0].clone(), one, tau_ref[0], 1.0),
    );
    Ok(())
}

/// First program index of each stacked beamformer.
pub struct Beams {
    pub w_m: Vec<usize>,
    pub w_i: usize,
    pub v_e: Option<usize>,
}

impl Beams {
    pub fn of(l: &SubproblemLayout) -> Self {
        Self { w_m: l.w_m.iter().map(|r| r.start).collect(), w_i: l.w_i.start, v_e: l.v_e.as_ref().map(|r| r.start) }
    }
}

fn lift_pair(lift: &RealLift, offset: usize) -> [LinExpr; 2] {
    [lift.re_expr(offset), lift.im_expr(offset)]
}

/// SOC form of the SINR target of MU `m`:
/// `‖[h_mᴴw_i (i ≠ m), l_mᴴw_I, l_mᴴv_E, 1]‖ ≤ Re(h_mᴴw_m)/√Γ_m` and
/// `Im(h_mᴴw_m) = 0`, over normalised channels. `fixed_fbs` replaces the FBS
/// terms by a constant interference power when the FBS is not optimised.
pub fn mu_sinr_soc(
    h_m: &[Complex64],
    l_m: &[Complex64],
    gamma_m: f64,
    m: usize,
    beams: &Beams,
    fixed_fbs: Option<f64>,
) -> (Vec<LinExpr>, LinExpr) {
    let h = real_lift(h_m);
    let mut exprs = vec![h.re_expr(beams.w_m[m]) * (1.0 / gamma_m.sqrt())];
    for (i, &off) in beams.w_m.iter().enumerate() {
        if i != m {
            exprs.extend(lift_pair(&h, off));
        }
    }
    match fixed_fbs {
        Some(p) => exprs.push(LinExpr::constant((1.0 + p).sqrt())),
        None => {
            let l = real_lift(l_m);
            exprs.extend(lift_pair(&l, beams.w_i));
            if let Some(v) = beams.v_e {
                exprs.extend(lift_pair(&l, v));
            }
            exprs.push(LinExpr::constant(1.0));
        }
    }
    (exprs, h.im_expr(beams.w_m[m]))
}

/// The assembled program, its layout and the column scales needed to map
/// solver variables back to slack values.
#[derive(Debug, Clone)]
pub struct Subproblem {
    pub program: ConicProgram,
    pub layout: SubproblemLayout,
    /// Program variable `j` equals slack value / `scale[j]`.
    pub scale: Vec<f64>,
    pub(crate) sqrt_p: f64,
    pub(crate) objective_mode: ObjectiveMode,
}

/// Builds the convex restriction around `pt`. `with_an = false` removes the
/// AN vector together with every variable and row that depends on it.
pub fn build_subproblem(
    ch: &ChannelSet,
    cfg: &NetworkConfig,
    pt: &ExpansionPoint,
    scfg: &ScaConfig,
    with_an: bool,
) -> Result<Subproblem> {
    cfg.validate()?;
    ch.validate(cfg)?;
    scfg.validate()?;
    pt.solution().validate(cfg)?;
    if !(pt.eta_i > 0.0) || !pt.mu_i.is_finite() || !(pt.gamma_e >= 0.0) {
        return Err(Error::domain(format!(
            "expansion point needs eta_I > 0 and gamma_E >= 0, got eta_I = {}, gamma_E = {}",
            pt.eta_i, pt.gamma_e
        )));
    }
    let nc = Normalized::new(ch, cfg);
    let pv = PointValues::new(&nc, pt, with_an);
    let mut layout = SubproblemLayout::new(cfg.m, cfg.k, cfg.n_m, cfg.n_f, scfg.q, with_an);
    let l = &layout;

    let floor1 = |v: f64| v.max(1.0);
    let mut scale = vec![1.0; l.num_vars];
    scale[l.s_i] = floor1(pv.s_i);
    for (m, &i) in l.s_m.iter().enumerate() {
        scale[i] = floor1(pv.s_m[m]);
    }
    if let Some(i) = l.s_e {
        scale[i] = floor1(pv.s_e);
    }
    scale[l.mu_i] = floor1(pv.mu_i);
    scale[l.eta_i] = floor1(pv.eta_i);
    scale[l.gamma_i] = floor1(pv.gamma_i);
    scale[l.gamma_e] = floor1(pv.gamma_e);
    for k in 0..cfg.k {
        scale[l.t_k[k]] = floor1(pv.t_k[k]);
        for m in 0..cfg.m {
            scale[l.t_k0[k][m]] = floor1(pv.t_k0[k][m]);
        }
        if with_an {
            scale[l.t_ek[k]] = floor1(pv.t_ek[k]);
        }
    }
    let tau_ref = tau_scales(scfg.q, pv.gamma_i);
    for (j, &i) in l.tau.iter().enumerate() {
        scale[i] = tau_ref[j];
    }
    let var = |i: usize| LinExpr::term(i, scale[i]);
    let beams = Beams::of(l);
    let mut pb = ProgramBuilder::new(l.num_vars);

    // total power
    let mut power = vec![LinExpr::constant(1.0)];
    let beam_vars = l.w_m.iter().chain(std::iter::once(&l.w_i)).chain(l.v_e.iter());
    for r in beam_vars {
        power.extend(r.clone().map(|j| LinExpr::term(j, 1.0)));
    }
    pb.soc("power budget", power);

    // information receiver
    let h_i = real_lift(&nc.h_i);
    let h_i0 = real_lift(&nc.h_i0);
    for m in 0..cfg.m {
        let [re, im] = lift_pair(&h_i0, beams.w_m[m]);
        pb.soc(format!("|h_I0^H w_{m}| <= s_{m}"), vec![var(l.s_m[m]), re, im]);
    }
    if let (Some(v), Some(s_e)) = (beams.v_e, l.s_e) {
        let [re, im] = lift_pair(&h_i, v);
        pb.soc("|h_I^H v_E| <= s_E", vec![var(s_e), re, im]);
    }
    let f = taylor_quadratic_minorant(&nc.h_i, &pv.w_i);
    pb.nonneg("minorant |h_I^H w_I|^2 >= s_I", f.to_expr(beams.w_i) - var(l.s_i));
    pb.soc("mu_I^2 <= s_I", hyperbolic_balanced(var(l.mu_i), var(l.s_i), LinExpr::constant(1.0), scale[l.s_i], 1.0));
    let inv = 1.0 / scale[l.eta_i].sqrt();
    let mut interf: Vec<LinExpr> = l.s_m.iter().map(|&i| var(i) * inv).collect();
    if let Some(s_e) = l.s_e {
        interf.push(var(s_e) * inv);
    }
    interf.push(LinExpr::constant(inv));
    let mut rows = interf.iter().map(|e| e.clone() * 2.0).collect::<Vec<_>>();
    let x = var(l.eta_i) * (1.0 / scale[l.eta_i]);
    rows.insert(0, x.clone() + 1.0);
    rows.push(x - 1.0);
    pb.soc("sum s_m^2 + s_E^2 + 1 <= eta_I", rows);
    let (a_mu, a_eta) = quad_over_lin_minorant(pv.mu_i, pv.eta_i);
    pb.nonneg("minorant mu_I^2/eta_I >= gamma_I", var(l.mu_i) * a_mu + var(l.eta_i) * a_eta - var(l.gamma_i));

    // energy receivers as eavesdroppers
    for k in 0..cfg.k {
        let g = real_lift(&nc.g_k[k]);
        let [re, im] = lift_pair(&g, beams.w_i);
        pb.soc(format!("|g_{k}^H w_I| <= t_{k}"), vec![var(l.t_k[k]), re, im]);
    }
    for k in 0..cfg.k {
        for m in 0..cfg.m {
            let f = taylor_quadratic_minorant(&nc.g_k0[k], &pv.w_m[m]);
            pb.nonneg_rows(
                format!("minorant |g_{k},0^H w_{m}|^2 >= t_{k},0[{m}] >= 0"),
                vec![f.to_expr(beams.w_m[m]) - var(l.t_k0[k][m]), var(l.t_k0[k][m])],
            );
        }
        if let Some(v) = beams.v_e {
            let f = taylor_quadratic_minorant(&nc.g_k[k], &pv.v_e);
            pb.nonneg_rows(
                format!("minorant |g_{k}^H v_E|^2 >= t_e,{k} >= 0"),
                vec![f.to_expr(v) - var(l.t_ek[k]), var(l.t_ek[k])],
            );
        }
    }
    for k in 0..cfg.k {
        let mut b = LinExpr::constant(1.0);
        for m in 0..cfg.m {
            b = b + var(l.t_k0[k][m]);
        }
        if with_an {
            b = b + var(l.t_ek[k]);
        }
        let b_ref = pv.b_k(k).max(1.0);
        pb.soc(
            format!("t_{k}^2 <= gamma_E b_{k}"),
            hyperbolic_balanced(var(l.t_k[k]), var(l.gamma_e), b, scale[l.gamma_e], b_ref),
        );
    }

    // macro users
    for m in 0..cfg.m {
        let (cone, im) = mu_sinr_soc(&nc.h_m[m], &nc.l_m[m], cfg.gamma[m], m, &beams, None);
        pb.soc(format!("SINR_{m} >= Gamma_{m}"), cone);
        pb.zero(format!("Im(h_{m}^H w_{m}) = 0"), im);
    }

    // energy harvesting
    for k in 0..cfg.k {
        let target = nc.eh_target[k] - 1.0;
        let expr = match (scfg.eh_mode, beams.v_e) {
            (EhMode::Separated, Some(v)) => {
                taylor_quadratic_minorant(&nc.g_k[k], &pv.w_i).to_expr(beams.w_i)
                    + taylor_quadratic_minorant(&nc.g_k[k], &pv.v_e).to_expr(v)
            }
            (EhMode::AsPrinted, Some(v)) => {
                let sum: Vec<Complex64> = pv.w_i.iter().zip(&pv.v_e).map(|(a, b)| a + b).collect();
                let f = taylor_quadratic_minorant(&nc.g_k[k], &sum);
                f.to_expr(beams.w_i) + f.to_expr(v) - f.constant
            }
            (_, None) => taylor_quadratic_minorant(&nc.g_k[k], &pv.w_i).to_expr(beams.w_i),
        };
        pb.nonneg(format!("E_{k} >= Q_{k}"), (expr - target) * (1.0 / nc.eh_target[k].max(1.0)));
    }

    // secrecy rate
    let ge = pv.gamma_e;
    let secrecy = var(l.c) - (1.0 + ge).log2() - (var(l.gamma_e) - ge) * (1.0 / ((1.0 + ge) * LN_2)) - var(l.gamma);
    match scfg.objective_mode {
        ObjectiveMode::Gamma => pb.nonneg("c - log2(1 + gamma_E) >= gamma", secrecy),
        ObjectiveMode::GammaDiff => pb.zero("c - log2(1 + gamma_E) = gamma", secrecy),
    }
    pb.nonneg("gamma_E >= 0", var(l.gamma_e));
    let tau: Vec<LinExpr> = l.tau.iter().map(|&i| var(i)).collect();
    exp_soc_block(&mut pb, scfg.q, &var(l.c), &var(l.gamma_i), &tau, &tau_ref)?;

    let objective = match scfg.objective_mode {
        ObjectiveMode::GammaDiff => var(l.gamma_e) - var(l.gamma_i),
        ObjectiveMode::Gamma => -var(l.gamma),
    };
    pb.minimize(&objective);

    let (program, blocks) = pb.build()?;
    layout.rows = blocks;
    Ok(Subproblem { program, layout, scale, sqrt_p: nc.sqrt_p, objective_mode: scfg.objective_mode })
}

impl Subproblem {
    /// Slack value of variable `i` at program point `x`.
    pub fn value(&self, x: &[f64], i: usize) -> f64 {
        x[i] * self.scale[i]
    }

    /// Subproblem objective (to be maximised) at `x`.
    pub fn objective(&self, x: &[f64]) -> f64 {
        let l = &self.layout;
        match self.objective_mode {
            ObjectiveMode::GammaDiff => self.value(x, l.gamma_i) - self.value(x, l.gamma_e),
            ObjectiveMode::Gamma => self.value(x, l.gamma),
        }
    }

    /// Beamformers of `x` in physical units.
    pub fn solution(&self, x: &[f64]) -> BeamformingSolution {
        let l = &self.layout;
        let beam = |r: &std::ops::Range<usize>| -> Vec<Complex64> {
            unstack(&x[r.clone()]).into_iter().map(|c| c * self.sqrt_p).collect()
        };
        let n_f = l.w_i.len() / 2;
        BeamformingSolution {
            w_m: l.w_m.iter().map(beam).collect(),
            w_i: beam(&l.w_i),
            v_e: l.v_e.as_ref().map(beam).unwrap_or_else(|| vec![Complex64::new(0.0, 0.0); n_f]),
        }
    }

    /// Next expansion point: the optimiser's beamformers, `μ_I`, `η_I` and `γ_E`.
    pub fn expansion_point(&self, x: &[f64]) -> ExpansionPoint {
        let l = &self.layout;
        let sol = self.solution(x);
        ExpansionPoint {
            w_m: sol.w_m,
            w_i: sol.w_i,
            v_e: sol.v_e,
            mu_i: self.value(x, l.mu_i),
            eta_i: self.value(x, l.eta_i),
            gamma_e: self.value(x, l.gamma_e).max(0.0),
        }
    }
}

/// Program point reproducing the expansion point: every minorant row is
/// tight there. It is feasible whenever the point's slacks are consistent
/// (`μ̃² ≤ |h_Iᴴw̃_I|²`, `η̃` at least the IR interference plus noise,
/// `γ̃_E` at least every ER SINR) and the beamformers satisfy the original
/// constraints with `Im(h_mᴴw̃_m) = 0`.
pub fn lift_expansion_point(sp: &Subproblem, ch: &ChannelSet, cfg: &NetworkConfig, pt: &ExpansionPoint) -> Vec<f64> {
    let l = &sp.layout;
    let nc = Normalized::new(ch, cfg);
    let pv = PointValues::new(&nc, pt, l.with_an);
    let mut v = vec![0.0; l.num_vars];
    for (m, r) in l.w_m.iter().enumerate() {
        v[r.clone()].copy_from_slice(&stack(&pv.w_m[m]));
    }
    v[l.w_i.clone()].copy_from_slice(&stack(&pv.w_i));
    if let Some(r) = &l.v_e {
        v[r.clone()].copy_from_slice(&stack(&pv.v_e));
    }
    v[l.s_i] = pv.s_i;
    for (m, &i) in l.s_m.iter().enumerate() {
        v[i] = pv.s_m[m];
    }
    if let Some(i) = l.s_e {
        v[i] = pv.s_e;
    }
    v[l.mu_i] = pv.mu_i;
    v[l.eta_i] = pv.eta_i;
    v[l.gamma_i] = pv.gamma_i;
    v[l.gamma_e] = pv.gamma_e;
    for k in 0..l.k {
        v[l.t_k[k]] = pv.t_k[k];
        for m in 0..l.m {
            v[l.t_k0[k][m]] = pv.t_k0[k][m];
        }
        if l.with_an {
            v[l.t_ek[k]] = pv.t_ek[k];
        }
    }
    let c = (1.0 + pv.gamma_i).log2();
    v[l.c] = c;
    v[l.gamma] = c - (1.0 + pv.gamma_e).log2();
    let tau = exp_chain_values(l.q, c);
    for (j, &i) in l.tau.iter().enumerate() {
        v[i] = tau[j];
    }
    v.iter().zip(&sp.scale).map(|(v, s)| v / s).collect()
}

/// Smallest feasible `τ_0 … τ_{q+3}` of the exponential chain for a given `c`.
pub fn exp_chain_values(q: usize, c: f64) -> Vec<f64> {
    let y = c * LN_2 / 2f64.powi(q as i32);
    let mut t = vec![0.0; q + 4];
    t[1] = (1.0 + y).powi(2);
    t[2] = (5.0 / 6.0 + y / 2.0).powi(2);
    t[3] = t[1] * t[1];
    t[4] = t[2] + t[3] / 24.0 + 19.0 / 72.0;
    for j in 5..=q + 3 {
        t[j] = t[j - 1] * t[j - 1];
    }
    t[0] = t[q + 3] * t[q + 3];
    t
}
