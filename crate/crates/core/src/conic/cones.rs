//! Cone-wise algebra for the interior-point iteration: Jordan products,
//! Nesterov–Todd scalings and step-length computations.

use std::ops::Range;

use super::program::{Cone, ConeLayout};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `x₀² − ‖x₁‖²`
fn soc_residual(x: &[f64]) -> f64 {
    x[0] * x[0] - dot(&x[1..], &x[1..])
}

#[derive(Debug, Clone)]
enum Scaling {
    Zero,
    /// `W = diag(w)`, `w = sqrt(s / z)`.
    Nonneg(Vec<f64>),
    /// `W = η W̄` with `W̄ = [w₀ w₁ᵀ; w₁ I + w₁w₁ᵀ/(1+w₀)]`.
    Soc {
        eta: f64,
        wbar: Vec<f64>,
    },
}

#[derive(Debug, Clone)]
struct Block {
    range: Range<usize>,
    scaling: Scaling,
}

#[derive(Debug, Clone)]
pub(crate) struct ConeSet {
    blocks: Vec<Block>,
    degree: usize,
    dim: usize,
}

impl ConeSet {
    pub(crate) fn new(layout: &ConeLayout) -> Self {
        let blocks = layout
            .ranges()
            .into_iter()
            .map(|(cone, range)| {
                let scaling = match cone {
                    Cone::Zero(_) => Scaling::Zero,
                    Cone::Nonneg(d) => Scaling::Nonneg(vec![1.0; d]),
                    Cone::Soc(d) => {
                        let mut wbar = vec![0.0; d];
                        wbar[0] = 1.0;
                        Scaling::Soc { eta: 1.0, wbar }
                    }
                };
                Block { range, scaling }
            })
            .collect();
        Self { blocks, degree: layout.degree(), dim: layout.dim() }
    }

    pub(crate) fn degree(&self) -> usize {
        self.degree
    }

    /// Largest `t` with `v − t·e ∈ K` over the non-zero cones (`+∞` if none).
    pub(crate) fn interior_margin(&self, v: &[f64]) -> f64 {
        let mut m = f64::INFINITY;
        for b in &self.blocks {
            let x = &v[b.range.clone()];
            match b.scaling {
                Scaling::Zero => {}
                Scaling::Nonneg(_) => m = x.iter().fold(m, |a, &xi| a.min(xi)),
                Scaling::Soc { .. } => m = m.min(x[0] - dot(&x[1..], &x[1..]).sqrt()),
            }
        }
        m
    }

    /// `v += t·e` on the non-zero cones.
    pub(crate) fn add_identity(&self, v: &mut [f64], t: f64) {
        for b in &self.blocks {
            match b.scaling {
                Scaling::Zero => {}
                Scaling::Nonneg(_) => v[b.range.clone()].iter_mut().for_each(|x| *x += t),
                Scaling::Soc { .. } => v[b.range.start] += t,
            }
        }
    }

    /// Zeroes the slack on equality rows.
    pub(crate) fn clear_zero_rows(&self, v: &mut [f64]) {
        for b in &self.blocks {
            if matches!(b.scaling, Scaling::Zero) {
                v[b.range.clone()].iter_mut().for_each(|x| *x = 0.0);
            }
        }
    }

    /// Recomputes the Nesterov–Todd scaling at `(s, z)` and writes `λ = W z`.
    /// Returns `false` if either point has left the cone interior.
    pub(crate) fn update_scaling(&mut self, s: &[f64], z: &[f64], lambda: &mut [f64]) -> bool {
        for b in &mut self.blocks {
            let r = b.range.clone();
            let (sb, zb) = (&s[r.clone()], &z[r.clone()]);
            match &mut b.scaling {
                Scaling::Zero => lambda[r].iter_mut().for_each(|l| *l = 0.0),
                Scaling::Nonneg(w) => {
                    for (k, (si, zi)) in sb.iter().zip(zb).enumerate() {
                        if *si <= 0.0 || *zi <= 0.0 {
                            return false;
                        }
                        w[k] = (si / zi).sqrt();
                        lambda[r.start + k] = (si * zi).sqrt();
                    }
                }
                Scaling::Soc { eta, wbar } => {
                    let (sres, zres) = (soc_residual(sb), soc_residual(zb));
                    if sres <= 0.0 || zres <= 0.0 || sb[0] <= 0.0 || zb[0] <= 0.0 {
                        return false;
                    }
                    let (sn, zn) = (sres.sqrt(), zres.sqrt());
                    let gamma = ((1.0 + dot(sb, zb) / (sn * zn)) / 2.0).sqrt();
                    wbar[0] = (sb[0] / sn + zb[0] / zn) / (2.0 * gamma);
                    for k in 1..wbar.len() {
                        wbar[k] = (sb[k] / sn - zb[k] / zn) / (2.0 * gamma);
                    }
                    // renormalise so that w̄ᵀJw̄ = 1 exactly
                    let wres = soc_residual(wbar);
                    if wres <= 0.0 {
                        return false;
                    }
                    let wn = wres.sqrt();
                    wbar.iter_mut().for_each(|v| *v /= wn);
                    *eta = (sres / zres).sqrt().sqrt();
                }
            }
        }
        let mut wz = vec![0.0; self.dim];
        self.mul_w(z, &mut wz);
        for b in &self.blocks {
            if !matches!(b.scaling, Scaling::Zero) {
                lambda[b.range.clone()].copy_from_slice(&wz[b.range.clone()]);
            }
        }
        true
    }

    /// `out = W x`
    pub(crate) fn mul_w(&self, x: &[f64], out: &mut [f64]) {
        for b in &self.blocks {
            let r = b.range.clone();
            match &b.scaling {
                Scaling::Zero => out[r].iter_mut().for_each(|o| *o = 0.0),
                Scaling::Nonneg(w) => {
                    for (k, i) in r.enumerate() {
                        out[i] = w[k] * x[i];
                    }
                }
                Scaling::Soc { eta, wbar } => {
                    let xb = &x[r.clone()];
                    let w1x1 = dot(&wbar[1..], &xb[1..]);
                    let coef = xb[0] + w1x1 / (1.0 + wbar[0]);
                    out[r.start] = eta * (wbar[0] * xb[0] + w1x1);
                    for k in 1..xb.len() {
                        out[r.start + k] = eta * (xb[k] + coef * wbar[k]);
                    }
                }
            }
        }
    }

    /// `out = W⁻¹ x`
    pub(crate) fn mul_winv(&self, x: &[f64], out: &mut [f64]) {
        for b in &self.blocks {
            let r = b.range.clone();
            match &b.scaling {
                Scaling::Zero => out[r].iter_mut().for_each(|o| *o = 0.0),
                Scaling::Nonneg(w) => {
                    for (k, i) in r.enumerate() {
                        out[i] = x[i] / w[k];
                    }
                }
                Scaling::Soc { eta, wbar } => {
                    // W̄⁻¹ = J W̄ J
                    let xb = &x[r.clone()];
                    let w1x1 = dot(&wbar[1..], &xb[1..]);
                    let coef = -xb[0] + w1x1 / (1.0 + wbar[0]);
                    out[r.start] = (wbar[0] * xb[0] - w1x1) / eta;
                    for k in 1..xb.len() {
                        out[r.start + k] = (xb[k] + coef * wbar[k]) / eta;
                    }
                }
            }
        }
    }

    /// Writes `−W²` for each block into the dense row-major matrix `kkt`
    /// (leading dimension `ld`) at diagonal offset `off`.
    pub(crate) fn write_neg_w2(&self, kkt: &mut [f64], ld: usize, off: usize) {
        for b in &self.blocks {
            let r = b.range.clone();
            match &b.scaling {
                Scaling::Zero => {}
                Scaling::Nonneg(w) => {
                    for (k, i) in r.enumerate() {
                        kkt[(off + i) * ld + off + i] = -w[k] * w[k];
                    }
                }
                Scaling::Soc { eta, wbar } => {
                    // W² = η²(2w̄w̄ᵀ − J)
                    let e2 = eta * eta;
                    let d = wbar.len();
                    for p in 0..d {
                        for q in 0..d {
                            let mut v = 2.0 * wbar[p] * wbar[q];
                            if p == q {
                                v += if p == 0 { -1.0 } else { 1.0 };
                            }
                            kkt[(off + r.start + p) * ld + off + r.start + q] = -e2 * v;
                        }
                    }
                }
            }
        }
    }

    /// `out = W² x`
    pub(crate) fn mul_w2(&self, x: &[f64], out: &mut [f64]) {
        let mut tmp = vec![0.0; x.len()];
        self.mul_w(x, &mut tmp);
        self.mul_w(&tmp, out);
    }

    /// Jordan product `out = u ∘ v`.
    pub(crate) fn circ(&self, u: &[f64], v: &[f64], out: &mut [f64]) {
        for b in &self.blocks {
            let r = b.range.clone();
            match b.scaling {
                Scaling::Zero => out[r].iter_mut().for_each(|o| *o = 0.0),
                Scaling::Nonneg(_) => {
                    for i in r {
                        out[i] = u[i] * v[i];
                    }
                }
                Scaling::Soc { .. } => {
                    let (ub, vb) = (&u[r.clone()], &v[r.clone()]);
                    out[r.start] = dot(ub, vb);
                    for k in 1..ub.len() {
                        out[r.start + k] = ub[0] * vb[k] + vb[0] * ub[k];
                    }
                }
            }
        }
    }

    /// Solves `λ ∘ out = d` blockwise.
    pub(crate) fn inv_circ(&self, lambda: &[f64], d: &[f64], out: &mut [f64]) {
        for b in &self.blocks {
            let r = b.range.clone();
            match b.scaling {
                Scaling::Zero => out[r].iter_mut().for_each(|o| *o = 0.0),
                Scaling::Nonneg(_) => {
                    for i in r {
                        out[i] = d[i] / lambda[i];
                    }
                }
                Scaling::Soc { .. } => {
                    let (lb, db) = (&lambda[r.clone()], &d[r.clone()]);
                    let det = soc_residual(lb);
                    let x0 = (lb[0] * db[0] - dot(&lb[1..], &db[1..])) / det;
                    out[r.start] = x0;
                    for k in 1..lb.len() {
                        out[r.start + k] = (db[k] - x0 * lb[k]) / lb[0];
                    }
                }
            }
        }
    }

    /// `out = e` on non-zero cones, 0 on equality rows.
    pub(crate) fn identity(&self, out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        self.add_identity(out, 1.0);
    }

    /// Largest `α ∈ [0, αmax]` with `x + α·dx` in the cone.
    pub(crate) fn step_length(&self, x: &[f64], dx: &[f64], alpha_max: f64) -> f64 {
        let mut alpha = alpha_max;
        for b in &self.blocks {
            let r = b.range.clone();
            match b.scaling {
                Scaling::Zero => {}
                Scaling::Nonneg(_) => {
                    for i in r {
                        if dx[i] < 0.0 {
                            alpha = alpha.min(-x[i] / dx[i]);
                        }
                    }
                }
                Scaling::Soc { .. } => {
                    alpha = alpha.min(soc_step(&x[r.clone()], &dx[r], alpha_max));
                }
            }
        }
        alpha.max(0.0)
    }
}

/// Smallest positive root of `res(x + α·d) = 0` for `x` interior to a SOC.
fn soc_step(x: &[f64], d: &[f64], alpha_max: f64) -> f64 {
    let a = soc_residual(d);
    let b = 2.0 * (x[0] * d[0] - dot(&x[1..], &d[1..]));
    let c = soc_residual(x).max(0.0);
    let disc = b * b - 4.0 * a * c;

    if (a > 0.0 && b > 0.0) || disc < 0.0 {
        // both roots negative or no real root: the ray never leaves the cone,
        // unless the whole cone flips sign through the origin (ruled out since
        // x₀ + αd₀ stays positive whenever the residual stays positive)
        return alpha_max;
    }
    if a == 0.0 {
        return if b < 0.0 { (-c / b).min(alpha_max) } else { alpha_max };
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let roots = [q / a, if q != 0.0 { c / q } else { f64::INFINITY }];
    roots.iter().copied().filter(|r| *r >= 0.0).fold(alpha_max, f64::min)
}
