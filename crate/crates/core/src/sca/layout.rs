//! Index map of the real decision variables of one convex subproblem.

use std::fmt::Write as _;
use std::ops::Range;

use serde::Serialize;

use super::expr::RowBlock;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubproblemLayout {
    pub m: usize,
    pub k: usize,
    pub n_m: usize,
    pub n_f: usize,
    pub q: usize,
    /// False when the AN vector is removed from the problem.
    pub with_an: bool,

    pub w_m: Vec<Range<usize>>,
    pub w_i: Range<usize>,
    pub v_e: Option<Range<usize>>,
    pub gamma: usize,
    pub gamma_i: usize,
    pub gamma_e: usize,
    pub s_i: usize,
    pub s_m: Vec<usize>,
    pub s_e: Option<usize>,
    pub mu_i: usize,
    pub eta_i: usize,
    pub t_k: Vec<usize>,
    /// `t_k0[k][m]`.
    pub t_k0: Vec<Vec<usize>>,
    pub t_ek: Vec<usize>,
    pub c: usize,
    /// `τ_0 … τ_{q+3}`.
    pub tau: Vec<usize>,
    pub num_vars: usize,
    /// Row blocks of the assembled program; empty until a program is built.
    pub rows: Vec<RowBlock>,
}

impl SubproblemLayout {
    pub fn new(m: usize, k: usize, n_m: usize, n_f: usize, q: usize, with_an: bool) -> Self {
        let mut next = 0;
        let mut take = |n: usize| {
            let r = next..next + n;
            next += n;
            r
        };
        let w_m = (0..m).map(|_| take(2 * n_m)).collect();
        let w_i = take(2 * n_f);
        let v_e = with_an.then(|| take(2 * n_f));
        let gamma = take(1).start;
        let gamma_i = take(1).start;
        let gamma_e = take(1).start;
        let s_i = take(1).start;
        let s_m = (0..m).map(|_| take(1).start).collect();
        let s_e = with_an.then(|| take(1).start);
        let mu_i = take(1).start;
        let eta_i = take(1).start;
        let t_k = (0..k).map(|_| take(1).start).collect();
        let t_k0 = (0..k).map(|_| (0..m).map(|_| take(1).start).collect()).collect();
        let t_ek = if with_an { (0..k).map(|_| take(1).start).collect() } else { Vec::new() };
        let c = take(1).start;
        let tau = (0..q + 4).map(|_| take(1).start).collect();
        Self {
            m,
            k,
            n_m,
            n_f,
            q,
            with_an,
            w_m,
            w_i,
            v_e,
            gamma,
            gamma_i,
            gamma_e,
            s_i,
            s_m,
            s_e,
            mu_i,
            eta_i,
            t_k,
            t_k0,
            t_ek,
            c,
            tau,
            num_vars: next,
            rows: Vec::new(),
        }
    }

    /// Closed-form variable count.
    pub fn predicted_vars(m: usize, k: usize, n_m: usize, n_f: usize, q: usize, with_an: bool) -> usize {
        let an = with_an as usize;
        let beams = 2 * (m * n_m + n_f + an * n_f);
        // γ, γ_I, γ_E, s_I, μ_I, η_I, c
        let scalars = 7 + m + an + k + k * m + an * k;
        beams + scalars + q + 4
    }

    /// Closed-form constraint row count.
    pub fn predicted_rows(m: usize, k: usize, n_m: usize, n_f: usize, q: usize, with_an: bool) -> usize {
        let an = with_an as usize;
        let power = 1 + 2 * (m * n_m + n_f + an * n_f);
        let ir = 3 * m + 3 * an + 1 + 3 + (3 + m + an) + 1;
        let er = 3 * k + 2 * (k * m + an * k) + 3 * k;
        let mu = m * (2 * (m - 1) + 2 + 2 * an + 2) + m;
        let eh = k;
        let secrecy = 2;
        let exp = 1 + 9 + 1 + 3 * (q - 1) + 3;
        power + ir + er + mu + eh + secrecy + exp
    }

    /// Names of every real variable, in index order.
    pub fn variable_names(&self) -> Vec<String> {
        let mut names = vec![String::new(); self.num_vars];
        let mut beam = |r: &Range<usize>, name: &str| {
            let n = r.len() / 2;
            for i in 0..n {
                names[r.start + i] = format!("Re {name}[{i}]");
                names[r.start + n + i] = format!("Im {name}[{i}]");
            }
        };
        for (m, r) in self.w_m.iter().enumerate() {
            beam(r, &format!("w_{m}"));
        }
        beam(&self.w_i, "w_I");
        if let Some(r) = &self.v_e {
            beam(r, "v_E");
        }
        let mut set = |i: usize, s: String| names[i] = s;
        set(self.gamma, "gamma".into());
        set(self.gamma_i, "gamma_I".into());
        set(self.gamma_e, "gamma_E".into());
        set(self.s_i, "s_I".into());
        for (m, &i) in self.s_m.iter().enumerate() {
            set(i, format!("s_{m}"));
        }
        if let Some(i) = self.s_e {
            set(i, "s_E".into());
        }
        set(self.mu_i, "mu_I".into());
        set(self.eta_i, "eta_I".into());
        for (k, &i) in self.t_k.iter().enumerate() {
            set(i, format!("t_{k}"));
        }
        for (k, row) in self.t_k0.iter().enumerate() {
            for (m, &i) in row.iter().enumerate() {
                set(i, format!("t_{k},0[{m}]"));
            }
        }
        for (k, &i) in self.t_ek.iter().enumerate() {
            set(i, format!("t_e,{k}"));
        }
        set(self.c, "c".into());
        for (j, &i) in self.tau.iter().enumerate() {
            set(i, format!("tau_{j}"));
        }
        names
    }

    /// Human-readable map of variable indices and row blocks.
    pub fn variable_map(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# subproblem layout: M={} K={} N_M={} N_F={} q={} an={}",
            self.m, self.k, self.n_m, self.n_f, self.q, self.with_an
        );
        let _ = writeln!(out, "# {} variables", self.num_vars);
        for (i, name) in self.variable_names().iter().enumerate() {
            let _ = writeln!(out, "x[{i}]\t{name}");
        }
        if !self.rows.is_empty() {
            let total = self.rows.last().map_or(0, |b| b.rows.end);
            let _ = writeln!(out, "# {total} rows");
            for b in &self.rows {
                let _ = writeln!(out, "rows[{}..{}]\t{}\t{}", b.rows.start, b.rows.end, b.kind, b.label);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indices_are_disjoint_and_contiguous() {
        for with_an in [true, false] {
            let l = SubproblemLayout::new(2, 3, 10, 4, 6, with_an);
            let names = l.variable_names();
            assert!(names.iter().all(|n| !n.is_empty()));
            let mut sorted = names.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), names.len());
            assert_eq!(l.num_vars, SubproblemLayout::predicted_vars(2, 3, 10, 4, 6, with_an));
        }
    }
}
