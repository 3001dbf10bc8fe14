//! Standard-form conic programs.
//!
//! A program is `minimize cᵀx subject to Ax + s = b, s ∈ K` where `K` is a
//! Cartesian product of zero cones (equalities), nonnegative orthants and
//! second-order cones `{(t, u) : ‖u‖ ≤ t}`, laid out in row order.

use std::fmt::Write as _;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One block of the cone product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cone {
    /// `s = 0`: the rows are equalities.
    Zero(usize),
    /// `s ≥ 0` componentwise.
    Nonneg(usize),
    /// `s₀ ≥ ‖s₁..‖`.
    Soc(usize),
}

impl Cone {
    pub fn dim(&self) -> usize {
        match *self {
            Cone::Zero(d) | Cone::Nonneg(d) | Cone::Soc(d) => d,
        }
    }

    /// Barrier degree contributed to the complementarity measure.
    pub fn degree(&self) -> usize {
        match *self {
            Cone::Zero(_) => 0,
            Cone::Nonneg(d) => d,
            Cone::Soc(_) => 1,
        }
    }

    fn tag(&self) -> &'static str {
        match self {
            Cone::Zero(_) => "zero",
            Cone::Nonneg(_) => "nonneg",
            Cone::Soc(_) => "soc",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConeLayout {
    pub blocks: Vec<Cone>,
}

impl ConeLayout {
    pub fn new(blocks: Vec<Cone>) -> Self {
        Self { blocks }
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(Cone::dim).sum()
    }

    pub fn degree(&self) -> usize {
        self.blocks.iter().map(Cone::degree).sum()
    }

    /// Row ranges of each block, in order.
    pub fn ranges(&self) -> Vec<(Cone, Range<usize>)> {
        let mut start = 0;
        self.blocks
            .iter()
            .map(|&cone| {
                let r = start..start + cone.dim();
                start = r.end;
                (cone, r)
            })
            .collect()
    }

    pub fn push(&mut self, cone: Cone) {
        // merge adjacent zero / nonneg blocks; SOC blocks stay separate
        match (self.blocks.last_mut(), cone) {
            (Some(Cone::Zero(d)), Cone::Zero(e)) => *d += e,
            (Some(Cone::Nonneg(d)), Cone::Nonneg(e)) => *d += e,
            _ => self.blocks.push(cone),
        }
    }
}

/// Compressed sparse column matrix with sorted, deduplicated row indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub colptr: Vec<usize>,
    pub rowval: Vec<usize>,
    pub nzval: Vec<f64>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, colptr: vec![0; ncols + 1], rowval: Vec::new(), nzval: Vec::new() }
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicate entries are
    /// summed and exact zeros dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for &(i, j, v) in triplets {
            if i >= nrows || j >= ncols {
                return Err(Error::program(format!("triplet ({i}, {j}) outside a {nrows}x{ncols} matrix")));
            }
            if !v.is_finite() {
                return Err(Error::program(format!("non-finite entry at ({i}, {j})")));
            }
            sorted.push((i, j, v));
        }
        sorted.sort_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));

        let mut colptr = vec![0usize; ncols + 1];
        let mut rowval = Vec::with_capacity(sorted.len());
        let mut nzval: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in sorted {
            if last == Some((i, j)) {
                *nzval.last_mut().expect("previous entry") += v;
            } else {
                rowval.push(i);
                nzval.push(v);
                colptr[j + 1] += 1;
                last = Some((i, j));
            }
        }
        for j in 0..ncols {
            colptr[j + 1] += colptr[j];
        }
        let mut m = Self { nrows, ncols, colptr, rowval, nzval };
        m.drop_zeros();
        Ok(m)
    }

    fn drop_zeros(&mut self) {
        if self.nzval.iter().all(|&v| v != 0.0) {
            return;
        }
        let mut colptr = vec![0usize; self.ncols + 1];
        let mut rowval = Vec::with_capacity(self.rowval.len());
        let mut nzval = Vec::with_capacity(self.nzval.len());
        for j in 0..self.ncols {
            for k in self.colptr[j]..self.colptr[j + 1] {
                if self.nzval[k] != 0.0 {
                    rowval.push(self.rowval[k]);
                    nzval.push(self.nzval[k]);
                }
            }
            colptr[j + 1] = rowval.len();
        }
        self.colptr = colptr;
        self.rowval = rowval;
        self.nzval = nzval;
    }

    pub fn nnz(&self) -> usize {
        self.nzval.len()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.ncols)
            .flat_map(move |j| (self.colptr[j]..self.colptr[j + 1]).map(move |k| (self.rowval[k], j, self.nzval[k])))
    }

    /// `y = A x`
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        for j in 0..self.ncols {
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            for k in self.colptr[j]..self.colptr[j + 1] {
                y[self.rowval[k]] += self.nzval[k] * xj;
            }
        }
        y
    }

    /// `y = Aᵀ z`
    pub fn tmul_vec(&self, z: &[f64]) -> Vec<f64> {
        (0..self.ncols)
            .map(|j| (self.colptr[j]..self.colptr[j + 1]).map(|k| self.nzval[k] * z[self.rowval[k]]).sum())
            .collect()
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.nrows * self.ncols];
        for (i, j, v) in self.triplets() {
            d[i * self.ncols + j] = v;
        }
        d
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConicProgram {
    pub c: Vec<f64>,
    pub a: SparseMatrix,
    pub b: Vec<f64>,
    pub cones: ConeLayout,
}

impl ConicProgram {
    pub fn new(c: Vec<f64>, a: SparseMatrix, b: Vec<f64>, cones: ConeLayout) -> Result<Self> {
        let p = Self { c, a, b, cones };
        p.validate()?;
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub fn num_rows(&self) -> usize {
        self.b.len()
    }

    pub fn validate(&self) -> Result<()> {
        let (m, n) = (self.b.len(), self.c.len());
        if self.a.nrows != m || self.a.ncols != n {
            return Err(Error::program(format!(
                "A is {}x{} but b has {m} rows and c has {n} entries",
                self.a.nrows, self.a.ncols
            )));
        }
        if self.cones.dim() != m {
            return Err(Error::program(format!("cone layout covers {} rows, program has {m}", self.cones.dim())));
        }
        if let Some(cone) = self.cones.blocks.iter().find(|c| c.dim() == 0) {
            return Err(Error::program(format!("empty {} cone block", cone.tag())));
        }
        if self.c.iter().chain(&self.b).chain(&self.a.nzval).any(|v| !v.is_finite()) {
            return Err(Error::program("non-finite data"));
        }
        if self.a.colptr.len() != n + 1 || self.a.colptr[n] != self.a.nnz() {
            return Err(Error::program("inconsistent column pointers"));
        }
        for j in 0..n {
            let rows = &self.a.rowval[self.a.colptr[j]..self.a.colptr[j + 1]];
            if rows.windows(2).any(|w| w[0] >= w[1]) || rows.iter().any(|&i| i >= m) {
                return Err(Error::program(format!("column {j} has unsorted or duplicate rows")));
            }
        }
        Ok(())
    }

    /// Plain-text sparse triplet dump.
    ///
    /// ```text
    /// conic-program v1
    /// vars <n> rows <m> nnz <nnz>
    /// cone <zero|nonneg|soc> <dim>     (one line per block, in row order)
    /// c <j> <value>                    (nonzero objective entries)
    /// b <i> <value>                    (nonzero right-hand side entries)
    /// a <i> <j> <value>                (COO triplets of A, column-major)
    /// ```
    ///
    /// Indices are zero-based; values use the shortest round-trip decimal form.
    pub fn to_triplet_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "conic-program v1");
        let _ = writeln!(out, "vars {} rows {} nnz {}", self.num_vars(), self.num_rows(), self.a.nnz());
        for cone in &self.cones.blocks {
            let _ = writeln!(out, "cone {} {}", cone.tag(), cone.dim());
        }
        for (j, v) in self.c.iter().enumerate().filter(|(_, v)| **v != 0.0) {
            let _ = writeln!(out, "c {j} {v:e}");
        }
        for (i, v) in self.b.iter().enumerate().filter(|(_, v)| **v != 0.0) {
            let _ = writeln!(out, "b {i} {v:e}");
        }
        for (i, j, v) in self.a.triplets() {
            let _ = writeln!(out, "a {i} {j} {v:e}");
        }
        out
    }

    pub fn from_triplet_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let perr = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };

        match lines.next() {
            Some((_, "conic-program v1")) => {}
            Some((line, _)) => return Err(perr(line, "expected header `conic-program v1`")),
            None => return Err(perr(0, "empty input")),
        }
        let (line, dims) = lines.next().ok_or_else(|| perr(1, "missing dimension line"))?;
        let tok: Vec<&str> = dims.split_whitespace().collect();
        if tok.len() != 6 || tok[0] != "vars" || tok[2] != "rows" || tok[4] != "nnz" {
            return Err(perr(line, "expected `vars <n> rows <m> nnz <k>`"));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| perr(line, "bad integer"));
        let (n, m, nnz) = (num(tok[1])?, num(tok[3])?, num(tok[5])?);

        let mut cones = ConeLayout::default();
        let mut c = vec![0.0; n];
        let mut b = vec![0.0; m];
        let mut trip = Vec::with_capacity(nnz);
        for (line, l) in lines {
            let tok: Vec<&str> = l.split_whitespace().collect();
            let idx = |s: &str| s.parse::<usize>().map_err(|_| perr(line, "bad index"));
            let val = |s: &str| s.parse::<f64>().map_err(|_| perr(line, "bad value"));
            match tok.as_slice() {
                ["cone", kind, d] => {
                    let d = idx(d)?;
                    cones.blocks.push(match *kind {
                        "zero" => Cone::Zero(d),
                        "nonneg" => Cone::Nonneg(d),
                        "soc" => Cone::Soc(d),
                        _ => return Err(perr(line, "unknown cone kind")),
                    });
                }
                ["c", j, v] => {
                    let j = idx(j)?;
                    *c.get_mut(j).ok_or_else(|| perr(line, "objective index out of range"))? = val(v)?;
                }
                ["b", i, v] => {
                    let i = idx(i)?;
                    *b.get_mut(i).ok_or_else(|| perr(line, "rhs index out of range"))? = val(v)?;
                }
                ["a", i, j, v] => trip.push((idx(i)?, idx(j)?, val(v)?)),
                _ => return Err(perr(line, "unrecognised record")),
            }
        }
        if trip.len() != nnz {
            return Err(perr(0, "triplet count does not match header"));
        }
        let a = SparseMatrix::from_triplets(m, n, &trip)?;
        Self::new(c, a, b, cones)
    }
}
