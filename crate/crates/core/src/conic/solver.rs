//! Primal-dual interior-point method on the homogeneous self-dual embedding.
//!
//! Each iteration scales the cones with the Nesterov–Todd point, solves the
//! quasi-definite KKT system once for an affine (predictor) direction and once
//! more for a Mehrotra-corrected, centred direction.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::cones::ConeSet;
use super::equilibrate::Equilibration;
use super::ldl::DenseLdl;
use super::program::{ConicProgram, SparseMatrix};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tol_feas: f64,
    pub tol_gap: f64,
    pub tol_infeas: f64,
    /// Primal residual and gap accepted as `AlmostOptimal` when the
    /// iteration stalls before reaching the full tolerances.
    pub tol_reduced: f64,
    /// Dual residual accepted alongside `tol_reduced`.
    pub tol_reduced_dual: f64,
    pub max_iters: usize,
    /// Static regularisation added to both diagonal blocks of the KKT matrix.
    pub static_reg: f64,
    /// Maximum iterative-refinement passes per KKT solve.
    pub refine_steps: usize,
    pub equilibrate: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_feas: 1e-8,
            tol_gap: 1e-8,
            tol_infeas: 1e-8,
            tol_reduced: 1e-6,
            tol_reduced_dual: 1e-4,
            max_iters: 200,
            static_reg: 1e-8,
            refine_steps: 3,
            equilibrate: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    Optimal,
    /// Stalled at a point meeting the reduced tolerances but not the full ones.
    AlmostOptimal,
    PrimalInfeasible,
    DualInfeasible,
    MaxIterations,
    NumericalFailure,
}

impl SolverStatus {
    /// True for `Optimal` and `AlmostOptimal`.
    pub fn has_solution(&self) -> bool {
        matches!(self, SolverStatus::Optimal | SolverStatus::AlmostOptimal)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SolverStatus::Optimal => "optimal",
            SolverStatus::AlmostOptimal => "almost_optimal",
            SolverStatus::PrimalInfeasible => "primal_infeasible",
            SolverStatus::DualInfeasible => "dual_infeasible",
            SolverStatus::MaxIterations => "max_iters",
            SolverStatus::NumericalFailure => "numerical_failure",
        }
    }
}

/// Scale-normalised KKT residuals of a candidate `(x, s, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KktResiduals {
    /// `‖Ax + s − b‖∞ / max(1, ‖b‖∞, ‖Ax‖∞, ‖s‖∞)`
    pub primal: f64,
    /// `‖Aᵀz + c‖∞ / max(1, ‖c‖∞, ‖Aᵀz‖∞)`
    pub dual: f64,
    /// `|cᵀx + bᵀz| / max(1, |cᵀx|, |bᵀz|)`
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverResult {
    /// Primal point, or a dual-infeasibility certificate direction.
    pub x: Vec<f64>,
    pub s: Vec<f64>,
    /// Dual point, or a primal-infeasibility certificate (`Aᵀz = 0`, `bᵀz < 0`).
    pub z: Vec<f64>,
    pub status: SolverStatus,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub residuals: KktResiduals,
    pub iterations: usize,
    pub solve_time: f64,
}

/// Iterations without improvement after which a reduced-accuracy point is accepted.
const STALL_ITERS: usize = 20;

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// KKT residuals of `(x, s, z)` against the unscaled program.
pub fn residuals(prog: &ConicProgram, x: &[f64], s: &[f64], z: &[f64]) -> KktResiduals {
    let ax = prog.a.mul_vec(x);
    let rp: Vec<f64> = ax.iter().zip(s).zip(&prog.b).map(|((a, s), b)| a + s - b).collect();
    let atz = prog.a.tmul_vec(z);
    let rd: Vec<f64> = atz.iter().zip(&prog.c).map(|(a, c)| a + c).collect();
    let (pc, bz) = (dot(&prog.c, x), dot(&prog.b, z));
    KktResiduals {
        primal: norm_inf(&rp) / norm_inf(&prog.b).max(norm_inf(&ax)).max(norm_inf(s)).max(1.0),
        dual: norm_inf(&rd) / norm_inf(&prog.c).max(norm_inf(&atz)).max(1.0),
        gap: (pc + bz).abs() / pc.abs().max(bz.abs()).max(1.0),
    }
}

/// Solves `min cᵀx s.t. Ax + s = b, s ∈ K`.
pub fn solve(prog: &ConicProgram, cfg: &SolverConfig) -> Result<SolverResult> {
    prog.validate()?;
    let start = Instant::now();
    let mut res = if prog.num_rows() == 0 { solve_unconstrained(prog) } else { Ipm::new(prog, cfg).run() };
    res.solve_time = start.elapsed().as_secs_f64();
    Ok(res)
}

fn solve_unconstrained(prog: &ConicProgram) -> SolverResult {
    let n = prog.num_vars();
    let cn = dot(&prog.c, &prog.c).sqrt();
    let (x, status) = if cn == 0.0 {
        (vec![0.0; n], SolverStatus::Optimal)
    } else {
        (prog.c.iter().map(|c| -c / cn).collect(), SolverStatus::DualInfeasible)
    };
    let residuals = residuals(prog, &x, &[], &[]);
    SolverResult {
        primal_objective: dot(&prog.c, &x),
        dual_objective: 0.0,
        x,
        s: vec![],
        z: vec![],
        status,
        residuals,
        iterations: 0,
        solve_time: 0.0,
    }
}

struct Ipm<'a> {
    prog: &'a ConicProgram,
    cfg: &'a SolverConfig,
    eq: Equilibration,
    a: SparseMatrix,
    b: Vec<f64>,
    c: Vec<f64>,
    cones: ConeSet,
    kkt_base: Vec<f64>,
    kkt: Vec<f64>,
    signs: Vec<f64>,
    zero_rows: Vec<bool>,
    /// Elimination order: `order[p]` is the KKT index factored at position `p`.
    order: Vec<usize>,
    kkt_perm: Vec<f64>,
    ldl: DenseLdl,
    n: usize,
    m: usize,
}

#[derive(Clone)]
struct Iterate {
    x: Vec<f64>,
    s: Vec<f64>,
    z: Vec<f64>,
    tau: f64,
    kappa: f64,
}

struct Direction {
    x: Vec<f64>,
    s: Vec<f64>,
    z: Vec<f64>,
    tau: f64,
    kappa: f64,
}

enum Verdict {
    Continue,
    Done(SolverStatus),
}

impl<'a> Ipm<'a> {
    fn new(prog: &'a ConicProgram, cfg: &'a SolverConfig) -> Self {
        let (m, n) = (prog.num_rows(), prog.num_vars());
        let (eq, a, b, c) = if cfg.equilibrate {
            Equilibration::compute(prog, 25)
        } else {
            (Equilibration::identity(m, n), prog.a.clone(), prog.b.clone(), prog.c.clone())
        };
        let dim = n + m;
        let mut kkt_base = vec![0.0; dim * dim];
        for i in 0..n {
            kkt_base[i * dim + i] = cfg.static_reg;
        }
        for (i, j, v) in a.triplets() {
            kkt_base[(n + i) * dim + j] = v;
            kkt_base[j * dim + n + i] = v;
        }
        let cones = ConeSet::new(&prog.cones);
        let mut ones = vec![1.0; m];
        cones.clear_zero_rows(&mut ones);
        let zero_rows: Vec<bool> = ones.iter().map(|v| *v == 0.0).collect();
        // conic rows first (pivots −W²), then x (δI + AᵀW⁻²A), then equality rows
        let mut order: Vec<usize> = (0..m).filter(|&i| !zero_rows[i]).map(|i| n + i).collect();
        order.extend(0..n);
        order.extend((0..m).filter(|&i| zero_rows[i]).map(|i| n + i));
        let signs = order.iter().map(|&i| if i < n { 1.0 } else { -1.0 }).collect();
        Self {
            prog,
            cfg,
            eq,
            cones,
            zero_rows,
            order,
            kkt_perm: vec![0.0; dim * dim],
            a,
            b,
            c,
            kkt: kkt_base.clone(),
            kkt_base,
            signs,
            ldl: DenseLdl::new(dim),
            n,
            m,
        }
    }

    fn factor(&mut self) -> bool {
        let dim = self.n + self.m;
        self.kkt.copy_from_slice(&self.kkt_base);
        self.cones.write_neg_w2(&mut self.kkt, dim, self.n);
        // −W² is already negative definite on the non-zero cones
        for i in self.n..dim {
            if self.zero_rows[i - self.n] {
                self.kkt[i * dim + i] -= self.cfg.static_reg;
            }
        }
        for (p, &i) in self.order.iter().enumerate() {
            for (q, &j) in self.order[..=p].iter().enumerate() {
                // the assembled matrix is symmetric; read whichever triangle is filled
                self.kkt_perm[p * dim + q] = self.kkt[i.max(j) * dim + i.min(j)];
            }
        }
        self.ldl.factor(&self.kkt_perm, &self.signs, 1e-13, 2e-7);
        self.ldl.bumped < dim
    }

    /// Solves `[0 Aᵀ; A −W²] [x; z] = [rx; rz]` with iterative refinement
    /// against the unregularised matrix.
    fn solve_kkt(&self, rx: &[f64], rz: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (n, m) = (self.n, self.m);
        let mut sol: Vec<f64> = rx.iter().chain(rz).copied().collect();
        self.solve_permuted(&mut sol);
        let rhs_norm = norm_inf(rx).max(norm_inf(rz));
        let mut w2z = vec![0.0; m];
        let mut last = f64::INFINITY;
        for _ in 0..self.cfg.refine_steps {
            let (x, z) = sol.split_at(n);
            let atz = self.a.tmul_vec(z);
            let ax = self.a.mul_vec(x);
            self.cones.mul_w2(z, &mut w2z);
            let mut r: Vec<f64> = (0..n).map(|i| rx[i] - atz[i]).collect();
            r.extend((0..m).map(|i| rz[i] - (ax[i] - w2z[i])));
            let rn = norm_inf(&r);
            if rn <= 1e-14 * (1.0 + rhs_norm) || rn >= last {
                break;
            }
            last = rn;
            self.solve_permuted(&mut r);
            sol.iter_mut().zip(&r).for_each(|(s, d)| *s += d);
        }
        let z = sol.split_off(n);
        (sol, z)
    }

    fn solve_permuted(&self, v: &mut [f64]) {
        let mut p: Vec<f64> = self.order.iter().map(|&i| v[i]).collect();
        self.ldl.solve_in_place(&mut p);
        for (&i, x) in self.order.iter().zip(p) {
            v[i] = x;
        }
    }

    fn initial_point(&mut self) -> Iterate {
        let (n, m) = (self.n, self.m);
        // identity scaling on every non-zero cone
        self.cones = ConeSet::new(&self.prog.cones);
        self.factor();
        let (x, y) = self.solve_kkt(&vec![0.0; n], &self.b);
        let mut s: Vec<f64> = y.iter().map(|v| -v).collect();
        self.cones.clear_zero_rows(&mut s);
        let neg_c: Vec<f64> = self.c.iter().map(|v| -v).collect();
        let (_, mut z) = self.solve_kkt(&neg_c, &vec![0.0; m]);

        for v in [&mut s, &mut z] {
            let alpha = -self.cones.interior_margin(v);
            if alpha >= -1e-8 && alpha.is_finite() {
                self.cones.add_identity(v, 1.0 + alpha);
            }
        }
        Iterate { x, s, z, tau: 1.0, kappa: 1.0 }
    }

    fn mu(&self, it: &Iterate) -> f64 {
        (dot(&it.s, &it.z) + it.tau * it.kappa) / (self.cones.degree() as f64 + 1.0)
    }

    /// Convergence and infeasibility tests, measured on the unscaled program.
    fn check(&self, it: &Iterate) -> (Verdict, KktResiduals) {
        let (x, s, z) = self.eq.unscale(&it.x, &it.s, &it.z);
        let kappa = it.kappa / self.eq.k;
        let inv_tau = 1.0 / it.tau;
        let xs: Vec<f64> = x.iter().map(|v| v * inv_tau).collect();
        let ss: Vec<f64> = s.iter().map(|v| v * inv_tau).collect();
        let zs: Vec<f64> = z.iter().map(|v| v * inv_tau).collect();
        let r = residuals(self.prog, &xs, &ss, &zs);
        if r.primal <= self.cfg.tol_feas && r.dual <= self.cfg.tol_feas && r.gap <= self.cfg.tol_gap {
            return (Verdict::Done(SolverStatus::Optimal), r);
        }

        let tol = self.cfg.tol_infeas;
        let zn = norm_inf(&z);
        if zn > 0.0 {
            let bz = dot(&self.prog.b, &z) / zn;
            let atz = norm_inf(&self.prog.a.tmul_vec(&z)) / zn;
            if bz < -tol && atz <= -bz * tol && it.tau < kappa {
                return (Verdict::Done(SolverStatus::PrimalInfeasible), r);
            }
        }
        let xn = norm_inf(&x).max(norm_inf(&s));
        if xn > 0.0 {
            let cx = dot(&self.prog.c, &x) / xn;
            let ax = self.prog.a.mul_vec(&x);
            let axs: Vec<f64> = ax.iter().zip(&s).map(|(a, s)| (a + s) / xn).collect();
            if cx < -tol && norm_inf(&axs) <= -cx * tol && it.tau < kappa {
                return (Verdict::Done(SolverStatus::DualInfeasible), r);
            }
        }
        (Verdict::Continue, r)
    }

    fn result(&self, it: &Iterate, status: SolverStatus, r: KktResiduals, iterations: usize) -> SolverResult {
        let (x, s, z) = self.eq.unscale(&it.x, &it.s, &it.z);
        let scale = match status {
            SolverStatus::PrimalInfeasible => 1.0 / norm_inf(&z).max(f64::MIN_POSITIVE),
            SolverStatus::DualInfeasible => 1.0 / norm_inf(&x).max(norm_inf(&s)).max(f64::MIN_POSITIVE),
            _ => 1.0 / it.tau,
        };
        let x: Vec<f64> = x.iter().map(|v| v * scale).collect();
        let s: Vec<f64> = s.iter().map(|v| v * scale).collect();
        let z: Vec<f64> = z.iter().map(|v| v * scale).collect();
        SolverResult {
            primal_objective: dot(&self.prog.c, &x),
            dual_objective: -dot(&self.prog.b, &z),
            x,
            s,
            z,
            status,
            residuals: r,
            iterations,
            solve_time: 0.0,
        }
    }

    /// Newton direction for the given right-hand sides. `d_s` is the
    /// complementarity target in the scaled space (`λ ∘ (W⁻¹Δs + WΔz) = −d_s`).
    #[allow(clippy::too_many_arguments)]
    fn direction(
        &self,
        it: &Iterate,
        lambda: &[f64],
        const_sol: &(Vec<f64>, Vec<f64>),
        dx: &[f64],
        dz: &[f64],
        dtau: f64,
        ds: &[f64],
        dkappa: f64,
    ) -> Direction {
        let m = self.m;
        let mut lds = vec![0.0; m];
        self.cones.inv_circ(lambda, ds, &mut lds);
        let mut w_lds = vec![0.0; m];
        self.cones.mul_w(&lds, &mut w_lds);

        let rx: Vec<f64> = dx.iter().map(|v| -v).collect();
        let rz: Vec<f64> = dz.iter().zip(&w_lds).map(|(d, w)| -d + w).collect();
        let (x1, z1) = self.solve_kkt(&rx, &rz);
        let (x2, z2) = const_sol;

        let num = -dtau + dkappa / it.tau - dot(&self.c, &x1) - dot(&self.b, &z1);
        let den = dot(&self.c, x2) + dot(&self.b, z2) - it.kappa / it.tau;
        let d_tau = num / den;
        let x: Vec<f64> = x1.iter().zip(x2).map(|(a, b)| a + d_tau * b).collect();
        let z: Vec<f64> = z1.iter().zip(z2).map(|(a, b)| a + d_tau * b).collect();
        let mut w2z = vec![0.0; m];
        self.cones.mul_w2(&z, &mut w2z);
        let mut s: Vec<f64> = w_lds.iter().zip(&w2z).map(|(a, b)| -a - b).collect();
        self.cones.clear_zero_rows(&mut s);
        let d_kappa = -(dkappa + it.kappa * d_tau) / it.tau;
        Direction { x, s, z, tau: d_tau, kappa: d_kappa }
    }

    fn step_length(&self, it: &Iterate, d: &Direction) -> f64 {
        let mut a = self.cones.step_length(&it.s, &d.s, 1e6);
        a = a.min(self.cones.step_length(&it.z, &d.z, 1e6));
        if d.tau < 0.0 {
            a = a.min(-it.tau / d.tau);
        }
        if d.kappa < 0.0 {
            a = a.min(-it.kappa / d.kappa);
        }
        a
    }

    fn run(mut self) -> SolverResult {
        let (n, m) = (self.n, self.m);
        let mut it = self.initial_point();
        let mut lambda = vec![0.0; m];
        let mut last_r = residuals(self.prog, &[0.0].repeat(n), &[0.0].repeat(m), &[0.0].repeat(m));
        let mut best: Option<(f64, Iterate, KktResiduals, usize)> = None;

        for iter in 0..=self.cfg.max_iters {
            let (verdict, r) = self.check(&it);
            last_r = r;
            if let Verdict::Done(status) = verdict {
                return self.result(&it, status, r, iter);
            }
            let worst = (r.primal.max(r.gap) / self.cfg.tol_reduced).max(r.dual / self.cfg.tol_reduced_dual);
            if worst <= 1.0 && best.as_ref().is_none_or(|b| worst < b.0) {
                best = Some((worst, it.clone(), r, iter));
            }
            if iter == self.cfg.max_iters {
                break;
            }
            if let Some((_, _, _, at)) = &best {
                if iter >= at + STALL_ITERS {
                    break;
                }
            }

            // residuals of the embedding
            let atz = self.a.tmul_vec(&it.z);
            let rx: Vec<f64> = atz.iter().zip(&self.c).map(|(a, c)| a + c * it.tau).collect();
            let ax = self.a.mul_vec(&it.x);
            let rz: Vec<f64> = (0..m).map(|i| ax[i] + it.s[i] - self.b[i] * it.tau).collect();
            let rtau = dot(&self.c, &it.x) + dot(&self.b, &it.z) + it.kappa;
            let mu = self.mu(&it);

            if !self.cones.update_scaling(&it.s, &it.z, &mut lambda) || !self.factor() {
                return self.fallback(best, &it, SolverStatus::NumericalFailure, r, iter);
            }
            let neg_c: Vec<f64> = self.c.iter().map(|v| -v).collect();
            let const_sol = self.solve_kkt(&neg_c, &self.b);

            // predictor
            let mut ds_aff = vec![0.0; m];
            self.cones.circ(&lambda, &lambda, &mut ds_aff);
            let aff = self.direction(&it, &lambda, &const_sol, &rx, &rz, rtau, &ds_aff, it.tau * it.kappa);
            let alpha_aff = self.step_length(&it, &aff).min(1.0);
            let sigma = (1.0 - alpha_aff).powi(3);

            // corrector: λ∘λ + (W⁻¹Δs_a)∘(WΔz_a) − σμe
            let (mut ws, mut wz) = (vec![0.0; m], vec![0.0; m]);
            self.cones.mul_winv(&aff.s, &mut ws);
            self.cones.mul_w(&aff.z, &mut wz);
            let mut cross = vec![0.0; m];
            self.cones.circ(&ws, &wz, &mut cross);
            let mut e = vec![0.0; m];
            self.cones.identity(&mut e);
            let ds: Vec<f64> = (0..m).map(|i| ds_aff[i] + cross[i] - sigma * mu * e[i]).collect();
            let dk = it.tau * it.kappa + aff.tau * aff.kappa - sigma * mu;
            let f = 1.0 - sigma;
            let rx_c: Vec<f64> = rx.iter().map(|v| f * v).collect();
            let rz_c: Vec<f64> = rz.iter().map(|v| f * v).collect();
            let dir = self.direction(&it, &lambda, &const_sol, &rx_c, &rz_c, f * rtau, &ds, dk);

            let alpha = (0.99 * self.step_length(&it, &dir)).min(1.0);
            if !(alpha > 1e-10) {
                return self.fallback(best, &it, SolverStatus::NumericalFailure, r, iter);
            }
            for (v, d) in it.x.iter_mut().zip(&dir.x) {
                *v += alpha * d;
            }
            for (v, d) in it.s.iter_mut().zip(&dir.s) {
                *v += alpha * d;
            }
            for (v, d) in it.z.iter_mut().zip(&dir.z) {
                *v += alpha * d;
            }
            it.tau += alpha * dir.tau;
            it.kappa += alpha * dir.kappa;
            if !it.tau.is_finite() || it.x.iter().any(|v| !v.is_finite()) {
                return self.fallback(best, &it, SolverStatus::NumericalFailure, r, iter + 1);
            }
        }
        let iters = best.as_ref().map_or(self.cfg.max_iters, |b| (b.3 + STALL_ITERS).min(self.cfg.max_iters));
        self.fallback(best, &it, SolverStatus::MaxIterations, last_r, iters)
    }

    /// Returns the best reduced-accuracy iterate if there is one, otherwise
    /// `it` with `status`.
    fn fallback(
        &self,
        best: Option<(f64, Iterate, KktResiduals, usize)>,
        it: &Iterate,
        status: SolverStatus,
        r: KktResiduals,
        iterations: usize,
    ) -> SolverResult {
        match best {
            Some((_, b, br, _)) => self.result(&b, SolverStatus::AlmostOptimal, br, iterations),
            None => self.result(it, status, r, iterations),
        }
    }
}
