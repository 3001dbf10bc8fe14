//! Affine expressions over program variables and a row-block program builder.

use std::ops::{Add, Mul, Neg, Range, Sub};

use serde::Serialize;

use crate::conic::{Cone, ConeLayout, ConicProgram, SparseMatrix};
use crate::Result;

/// `Σ coef·x[index] + constant`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinExpr {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl LinExpr {
    pub fn constant(v: f64) -> Self {
        Self { terms: Vec::new(), constant: v }
    }

    pub fn term(index: usize, coef: f64) -> Self {
        Self { terms: vec![(index, coef)], constant: 0.0 }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(i, a)| a * x[i]).sum::<f64>() + self.constant
    }

    /// Largest coefficient magnitude, constant excluded.
    pub fn max_coef(&self) -> f64 {
        self.terms.iter().fold(0.0, |m, &(_, a)| m.max(a.abs()))
    }
}

impl Add for LinExpr {
    type Output = LinExpr;
    fn add(mut self, rhs: LinExpr) -> LinExpr {
        self.terms.extend(rhs.terms);
        self.constant += rhs.constant;
        self
    }
}

impl Add<f64> for LinExpr {
    type Output = LinExpr;
    fn add(mut self, rhs: f64) -> LinExpr {
        self.constant += rhs;
        self
    }
}

impl Sub for LinExpr {
    type Output = LinExpr;
    fn sub(self, rhs: LinExpr) -> LinExpr {
        self + (-rhs)
    }
}

impl Sub<f64> for LinExpr {
    type Output = LinExpr;
    fn sub(self, rhs: f64) -> LinExpr {
        self + (-rhs)
    }
}

impl Neg for LinExpr {
    type Output = LinExpr;
    fn neg(self) -> LinExpr {
        self * -1.0
    }
}

impl Mul<f64> for LinExpr {
    type Output = LinExpr;
    fn mul(mut self, rhs: f64) -> LinExpr {
        self.terms.iter_mut().for_each(|t| t.1 *= rhs);
        self.constant *= rhs;
        self
    }
}

/// A labelled group of consecutive rows sharing one cone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowBlock {
    pub label: String,
    pub kind: &'static str,
    pub rows: Range<usize>,
}

/// Collects cone constraints `expr ∈ K` and a minimisation objective.
#[derive(Debug, Clone)]
pub struct ProgramBuilder {
    num_vars: usize,
    objective: Vec<f64>,
    rows: Vec<LinExpr>,
    cones: ConeLayout,
    blocks: Vec<RowBlock>,
}

impl ProgramBuilder {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
            cones: ConeLayout::default(),
            blocks: Vec::new(),
        }
    }

    pub fn minimize(&mut self, obj: &LinExpr) {
        self.objective.iter_mut().for_each(|c| *c = 0.0);
        for &(i, a) in &obj.terms {
            self.objective[i] += a;
        }
    }

    /// `expr = 0`.
    pub fn zero(&mut self, label: impl Into<String>, expr: LinExpr) {
        self.push(label.into(), Cone::Zero(1), vec![expr]);
    }

    /// `expr ≥ 0`.
    pub fn nonneg(&mut self, label: impl Into<String>, expr: LinExpr) {
        self.push(label.into(), Cone::Nonneg(1), vec![expr]);
    }

    /// Every `expr ≥ 0`, kept as one labelled block; rows are scaled one by one.
    pub fn nonneg_rows(&mut self, label: impl Into<String>, exprs: Vec<LinExpr>) {
        let n = exprs.len();
        let exprs = exprs
            .into_iter()
            .map(|e| {
                let m = e.max_coef();
                if m > 0.0 {
                    e * (1.0 / m)
                } else {
                    e
                }
            })
            .collect();
        self.push(label.into(), Cone::Nonneg(n), exprs);
    }

    /// `‖exprs[1..]‖ ≤ exprs[0]`.
    pub fn soc(&mut self, label: impl Into<String>, exprs: Vec<LinExpr>) {
        self.push(label.into(), Cone::Soc(exprs.len()), exprs);
    }

    /// `‖v‖² ≤ x·y` with `x, y ≥ 0`, as `‖[2v, x − y]‖ ≤ x + y`.
    pub fn rotated(&mut self, label: impl Into<String>, v: Vec<LinExpr>, x: LinExpr, y: LinExpr) {
        let mut exprs = Vec::with_capacity(v.len() + 2);
        exprs.push(x.clone() + y.clone());
        exprs.extend(v.into_iter().map(|e| e * 2.0));
        exprs.push(x - y);
        self.soc(label, exprs);
    }

    /// Every block is divided by its largest coefficient so that the
    /// assembled data is of unit order.
    fn push(&mut self, label: String, cone: Cone, exprs: Vec<LinExpr>) {
        let scale = exprs.iter().fold(0.0f64, |m, e| m.max(e.max_coef()));
        let scale = if scale > 0.0 { 1.0 / scale } else { 1.0 };
        let start = self.rows.len();
        self.rows.extend(exprs.into_iter().map(|e| e * scale));
        let kind = match cone {
            Cone::Zero(_) => "zero",
            Cone::Nonneg(_) => "nonneg",
            Cone::Soc(_) => "soc",
        };
        self.blocks.push(RowBlock { label, kind, rows: start..self.rows.len() });
        self.cones.push(cone);
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn blocks(&self) -> &[RowBlock] {
        &self.blocks
    }

    pub fn build(self) -> Result<(ConicProgram, Vec<RowBlock>)> {
        let mut trip = Vec::new();
        let mut b = Vec::with_capacity(self.rows.len());
        for (r, e) in self.rows.iter().enumerate() {
            trip.extend(e.terms.iter().map(|&(j, a)| (r, j, -a)));
            b.push(e.constant);
        }
        let a = SparseMatrix::from_triplets(self.rows.len(), self.num_vars, &trip)?;
        // positive rescaling leaves the minimiser unchanged
        let peak = self.objective.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let objective = if peak > 0.0 { self.objective.iter().map(|v| v / peak).collect() } else { self.objective };
        let prog = ConicProgram::new(objective, a, b, self.cones)?;
        Ok((prog, self.blocks))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_evaluation() {
        let e = LinExpr::term(0, 2.0) + LinExpr::term(1, -1.0) * 3.0 + 4.0;
        assert_eq!(e.eval(&[1.0, 2.0]), 2.0 - 6.0 + 4.0);
        assert_eq!((-e.clone()).eval(&[1.0, 2.0]), -0.0);
        assert_eq!(e.max_coef(), 3.0);
    }

    #[test]
    fn builder_maps_cone_membership_to_standard_form() {
        let mut pb = ProgramBuilder::new(2);
        pb.nonneg("x0 >= 1", LinExpr::term(0, 1.0) - 1.0);
        pb.soc("cone", vec![LinExpr::constant(2.0), LinExpr::term(0, 1.0), LinExpr::term(1, 1.0)]);
        let (prog, blocks) = pb.build().unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(prog.num_rows(), 4);
        // s = b − A x must reproduce the expressions
        let x = [3.0, -1.0];
        let ax = prog.a.mul_vec(&x);
        let s: Vec<f64> = prog.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        assert_eq!(s, vec![2.0, 2.0, 3.0, -1.0]);
    }
}
