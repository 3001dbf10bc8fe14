//! Dense LDLᵀ for quasi-definite KKT matrices.
//!
//! Quasi-definite matrices `[H Aᵀ; A −G]` with `H, G ≻ 0` admit an LDLᵀ
//! factorisation under any symmetric permutation, so no pivoting is done.
//! Pivots whose sign disagrees with the expected inertia are replaced by a
//! small value of the correct sign (dynamic regularisation).

#[derive(Debug, Clone)]
pub(crate) struct DenseLdl {
    n: usize,
    /// Row-major; strictly lower part holds L, diagonal unused.
    l: Vec<f64>,
    d: Vec<f64>,
    /// Number of pivots that had to be regularised in the last factorisation.
    pub(crate) bumped: usize,
}

impl DenseLdl {
    pub(crate) fn new(n: usize) -> Self {
        Self { n, l: vec![0.0; n * n], d: vec![0.0; n], bumped: 0 }
    }

    /// Factors the symmetric row-major matrix `k` (only the lower triangle is read).
    /// `signs[i]` is the expected pivot sign.
    pub(crate) fn factor(&mut self, k: &[f64], signs: &[f64], eps: f64, delta: f64) {
        let n = self.n;
        debug_assert_eq!(k.len(), n * n);
        self.l.copy_from_slice(k);
        self.bumped = 0;
        let mut v = vec![0.0; n];
        for j in 0..n {
            // v_p = L[j,p] D[p]
            let row_j = &self.l[j * n..j * n + j];
            let mut dj = self.l[j * n + j];
            for p in 0..j {
                v[p] = row_j[p] * self.d[p];
                dj -= row_j[p] * v[p];
            }
            if signs[j] * dj < eps {
                dj = signs[j] * delta;
                self.bumped += 1;
            }
            self.d[j] = dj;
            // column j of L below the diagonal
            for i in j + 1..n {
                let row_i = &mut self.l[i * n..i * n + j + 1];
                let s: f64 = row_i[..j].iter().zip(&v[..j]).map(|(a, b)| a * b).sum();
                row_i[j] = (row_i[j] - s) / dj;
            }
        }
    }

    pub(crate) fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let s: f64 = row.iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
            x[i] -= s;
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n).rev() {
            let xi = x[i];
            if xi != 0.0 {
                let row = &self.l[i * n..i * n + i];
                for (xp, lp) in x[..i].iter_mut().zip(row) {
                    *xp -= lp * xi;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_a_quasi_definite_matrix() {
        // [2 1 1; 1 3 0; 1 0 -1]
        let k = [2.0, 1.0, 1.0, 1.0, 3.0, 0.0, 1.0, 0.0, -1.0];
        let mut f = DenseLdl::new(3);
        f.factor(&k, &[1.0, 1.0, -1.0], 1e-13, 1e-7);
        assert_eq!(f.bumped, 0);
        let rhs = [1.0, 2.0, 3.0];
        let mut x = rhs;
        f.solve_in_place(&mut x);
        for i in 0..3 {
            let r: f64 = (0..3).map(|j| k[i * 3 + j] * x[j]).sum();
            assert!((r - rhs[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn wrong_sign_pivot_is_regularised() {
        let k = [0.0, 1.0, 1.0, 0.0];
        let mut f = DenseLdl::new(2);
        f.factor(&k, &[1.0, -1.0], 1e-13, 1e-7);
        assert_eq!(f.bumped, 1);
        let mut x = [1.0, 1.0];
        f.solve_in_place(&mut x);
        assert!(x.iter().all(|v| v.is_finite()));
    }
}
