//! Modified Ruiz equilibration of the constraint matrix.
//!
//! Rows belonging to one second-order cone share a single scale factor so
//! that the scaled slack stays in the same cone.

use super::program::{Cone, ConicProgram, SparseMatrix};

const MIN_SCALE: f64 = 1e-4;
const MAX_SCALE: f64 = 1e4;

#[derive(Debug, Clone)]
pub(crate) struct Equilibration {
    /// Row scaling `D`.
    pub(crate) d: Vec<f64>,
    /// Column scaling `E`.
    pub(crate) e: Vec<f64>,
    /// Objective scaling.
    pub(crate) k: f64,
}

impl Equilibration {
    pub(crate) fn identity(m: usize, n: usize) -> Self {
        Self { d: vec![1.0; m], e: vec![1.0; n], k: 1.0 }
    }

    /// Returns the scaling and the scaled data `(D A E, D b, k E c)`.
    pub(crate) fn compute(prog: &ConicProgram, iters: usize) -> (Self, SparseMatrix, Vec<f64>, Vec<f64>) {
        let (m, n) = (prog.num_rows(), prog.num_vars());
        let mut eq = Self::identity(m, n);
        let mut a = prog.a.clone();
        let ranges = prog.cones.ranges();

        for _ in 0..iters {
            let mut col = vec![0.0f64; n];
            let mut row = vec![0.0f64; m];
            for j in 0..n {
                for k in a.colptr[j]..a.colptr[j + 1] {
                    let v = a.nzval[k].abs();
                    col[j] = col[j].max(v);
                    row[a.rowval[k]] = row[a.rowval[k]].max(v);
                }
            }
            let mut ce: Vec<f64> = col.iter().map(|&v| if v > 0.0 { 1.0 / v.sqrt() } else { 1.0 }).collect();
            let mut rd: Vec<f64> = row.iter().map(|&v| if v > 0.0 { 1.0 / v.sqrt() } else { 1.0 }).collect();
            // (αD, E/α) scales A identically; fix α so the columns do not drift
            let g = (ce.iter().zip(&eq.e).map(|(c, e)| (c * e).ln()).sum::<f64>() / n.max(1) as f64).exp();
            ce.iter_mut().for_each(|v| *v /= g);
            rd.iter_mut().for_each(|v| *v *= g);
            for (cone, r) in &ranges {
                if let Cone::Soc(_) = cone {
                    let mean = rd[r.clone()].iter().sum::<f64>() / r.len() as f64;
                    rd[r.clone()].iter_mut().for_each(|v| *v = mean);
                }
            }
            let mut change = 0.0f64;
            for j in 0..n {
                let s = (eq.e[j] * ce[j]).clamp(MIN_SCALE, MAX_SCALE) / eq.e[j];
                eq.e[j] *= s;
                change = change.max((1.0 - s).abs());
                for k in a.colptr[j]..a.colptr[j + 1] {
                    a.nzval[k] *= s;
                }
            }
            let mut rs = vec![1.0; m];
            for i in 0..m {
                rs[i] = (eq.d[i] * rd[i]).clamp(MIN_SCALE, MAX_SCALE) / eq.d[i];
                eq.d[i] *= rs[i];
                change = change.max((1.0 - rs[i]).abs());
            }
            for k in 0..a.nnz() {
                a.nzval[k] *= rs[a.rowval[k]];
            }
            if change < 1e-3 {
                break;
            }
        }

        let b: Vec<f64> = prog.b.iter().zip(&eq.d).map(|(b, d)| b * d).collect();
        let mut c: Vec<f64> = prog.c.iter().zip(&eq.e).map(|(c, e)| c * e).collect();
        let cmax = c.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        eq.k = if cmax > 0.0 { (1.0 / cmax).clamp(MIN_SCALE, MAX_SCALE) } else { 1.0 };
        c.iter_mut().for_each(|v| *v *= eq.k);
        (eq, a, b, c)
    }

    /// Maps scaled iterates back: `x = E x̂`, `s = D⁻¹ ŝ`, `z = D ẑ / k`.
    pub(crate) fn unscale(&self, x: &[f64], s: &[f64], z: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        (
            x.iter().zip(&self.e).map(|(v, e)| v * e).collect(),
            s.iter().zip(&self.d).map(|(v, d)| v / d).collect(),
            z.iter().zip(&self.d).map(|(v, d)| v * d / self.k).collect(),
        )
    }
}
