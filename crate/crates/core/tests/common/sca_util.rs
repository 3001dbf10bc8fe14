//! Random expansion points and small oracle programs for the SCA layer.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use secure_swipt::channel::ChannelSet;
use secure_swipt::conic::{solve, SolverConfig, SolverStatus};
use secure_swipt::model::{BeamformingSolution, NetworkConfig};
use secure_swipt::sca::expr::{LinExpr, ProgramBuilder};
use secure_swipt::sca::{exp_chain_values, exp_soc_block, hyperbolic_rows, ExpansionPoint, Subproblem};

pub fn cn(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

/// `|aᴴw|²` written out in real arithmetic.
pub fn abs2(a: &[Complex64], w: &[Complex64]) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (a, w) in a.iter().zip(w) {
        re += a.re * w.re + a.im * w.im;
        im += a.re * w.im - a.im * w.re;
    }
    re * re + im * im
}

/// Membership of the constant triple in the hyperbolic cone, via the crate's rows.
pub fn hyperbolic_member(z: f64, x: f64, y: f64) -> bool {
    let rows: Vec<f64> = hyperbolic_rows(LinExpr::constant(z), LinExpr::constant(x), LinExpr::constant(y))
        .iter()
        .map(|e| e.eval(&[]))
        .collect();
    rows[0] >= 0.0 && rows[1] * rows[1] + rows[2] * rows[2] <= rows[0] * rows[0]
}

/// Smallest `1 + γ_I` admitted by the exponential block for fixed `c`.
pub fn exp_block_bound(q: usize, c: f64) -> (SolverStatus, f64) {
    let n = q + 6;
    let target = 2f64.powf(c);
    let refs: Vec<f64> = exp_chain_values(q, c).iter().map(|v| v.max(1.0)).collect();
    let tau: Vec<LinExpr> = (0..q + 4).map(|j| LinExpr::term(2 + j, refs[j])).collect();
    let gamma_i = LinExpr::term(1, target);
    let mut pb = ProgramBuilder::new(n);
    pb.zero("c fixed", LinExpr::term(0, 1.0) - c);
    exp_soc_block(&mut pb, q, &LinExpr::term(0, 1.0), &gamma_i, &tau, &refs).unwrap();
    pb.minimize(&gamma_i);
    let (prog, _) = pb.build().unwrap();
    let cfg = SolverConfig { tol_feas: 1e-11, tol_gap: 1e-11, ..SolverConfig::default() };
    let r = solve(&prog, &cfg).unwrap();
    (r.status, 1.0 + gamma_i.eval(&r.x))
}

/// Random beamformers scaled to a fraction of the budget.
pub fn random_point(rng: &mut ChaCha8Rng, ch: &ChannelSet, cfg: &NetworkConfig) -> ExpansionPoint {
    let amp = cfg.p_th.sqrt() * 0.3;
    let sol = BeamformingSolution {
        w_m: (0..cfg.m).map(|_| cn(rng, cfg.n_m)).collect(),
        w_i: cn(rng, cfg.n_f),
        v_e: cn(rng, cfg.n_f),
    };
    ExpansionPoint::from_solution(&sol.scaled(amp), ch, cfg)
}

/// Rows that must be tight at the lifted expansion point: the first row of
/// every minorant block and the secrecy row, with their labels.
pub fn tight_rows(sp: &Subproblem) -> Vec<(usize, String)> {
    sp.layout
        .rows
        .iter()
        .filter(|b| b.label.starts_with("minorant") || b.label.starts_with("c - log2"))
        .map(|b| (b.rows.start, b.label.clone()))
        .collect()
}
