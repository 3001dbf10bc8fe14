//! Small complex vector helpers: orthonormal bases, projections and the
//! dominant eigenvector of a sum of outer products.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::model::{inner, norm_sqr};

/// Orthonormal basis of `span(vs)` by modified Gram-Schmidt with one
/// reorthogonalisation pass. Directions below `1e-12` of their original
/// norm are dropped.
pub(crate) fn orthonormal_basis(vs: &[&[Complex64]]) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for v in vs {
        let n0 = norm_sqr(v).sqrt();
        if n0 == 0.0 {
            continue;
        }
        let mut u = v.to_vec();
        for _ in 0..2 {
            u = project_out(&u, &basis);
        }
        let n = norm_sqr(&u).sqrt();
        if n > 1e-12 * n0 {
            u.iter_mut().for_each(|c| *c /= n);
            basis.push(u);
        }
    }
    basis
}

/// Component of `v` orthogonal to the orthonormal `basis`.
pub(crate) fn project_out(v: &[Complex64], basis: &[Vec<Complex64>]) -> Vec<Complex64> {
    let mut u = v.to_vec();
    for b in basis {
        let p = inner(b, &u);
        u.iter_mut().zip(b).for_each(|(x, b)| *x -= b * p);
    }
    u
}

pub(crate) fn normalized(v: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = norm_sqr(v).sqrt();
    (n > 0.0 && n.is_finite()).then(|| v.iter().map(|c| c / n).collect())
}

/// Unit vector maximising `Σ_k |g_kᴴ u|²` over `u` orthogonal to `avoid`
/// (an orthonormal set). Returns `None` when the admissible subspace is
/// trivial or every `g_k` vanishes on it.
pub(crate) fn dominant_direction(gs: &[Vec<Complex64>], avoid: &[Vec<Complex64>], n: usize) -> Option<Vec<Complex64>> {
    let projected: Vec<Vec<Complex64>> = gs.iter().map(|g| project_out(g, avoid)).collect();
    let mut mat = DMatrix::<Complex64>::zeros(n, n);
    for g in &projected {
        for i in 0..n {
            for j in 0..n {
                mat[(i, j)] += g[i] * g[j].conj();
            }
        }
    }
    let eig = SymmetricEigen::new(mat);
    let (best, &lambda) = eig.eigenvalues.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    let scale: f64 = projected.iter().map(|g| norm_sqr(g)).sum();
    if !(lambda > 1e-12 * scale) {
        return None;
    }
    let u: Vec<Complex64> = eig.eigenvectors.column(best).iter().copied().collect();
    normalized(&project_out(&u, avoid))
}

/// Minimum-norm `u ⟂ avoid` with `g_kᴴu = d_k` for every `k`. `None` when the
/// projected channels are linearly dependent.
pub(crate) fn min_norm_solution(
    gs: &[Vec<Complex64>],
    d: &[Complex64],
    avoid: &[Vec<Complex64>],
) -> Option<Vec<Complex64>> {
    let k = gs.len();
    if k == 0 {
        return None;
    }
    let projected: Vec<Vec<Complex64>> = gs.iter().map(|g| project_out(g, avoid)).collect();
    let gram = DMatrix::<Complex64>::from_fn(k, k, |i, j| inner(&projected[i], &projected[j]));
    let rhs = nalgebra::DVector::<Complex64>::from_column_slice(d);
    let a = gram.cholesky()?.solve(&rhs);
    let n = gs[0].len();
    let mut u = vec![Complex64::new(0.0, 0.0); n];
    for (g, aj) in projected.iter().zip(a.iter()) {
        u.iter_mut().zip(g).for_each(|(x, g)| *x += g * aj);
    }
    u.iter().all(|c| c.re.is_finite() && c.im.is_finite()).then_some(u)
}

/// Rotates `w` so that `aᴴw` is real and nonnegative.
pub(crate) fn align_phase(w: &mut [Complex64], a: &[Complex64]) {
    let p = inner(a, w);
    if p.norm() > 0.0 {
        let rot = p.conj() / p.norm();
        w.iter_mut().for_each(|c| *c *= rot);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_is_orthonormal_and_drops_dependent_vectors() {
        let a = vec![c(1.0, 0.0), c(1.0, 1.0), c(0.0, 0.0)];
        let b = vec![c(0.0, 1.0), c(2.0, 0.0), c(1.0, 0.0)];
        let ab: Vec<_> = a.iter().zip(&b).map(|(x, y)| x + y * 2.0).collect();
        let basis = orthonormal_basis(&[&a, &b, &ab]);
        assert_eq!(basis.len(), 2);
        assert!((norm_sqr(&basis[0]) - 1.0).abs() < 1e-14);
        assert!(inner(&basis[0], &basis[1]).norm() < 1e-14);
    }

    #[test]
    fn dominant_direction_respects_the_excluded_subspace() {
        let g = vec![vec![c(3.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]];
        let avoid = orthonormal_basis(&[&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]]);
        let u = dominant_direction(&g, &avoid, 3).unwrap();
        assert!(u[0].norm() < 1e-12);
        assert!((u[1].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn min_norm_solution_meets_every_target() {
        let g = vec![vec![c(1.0, 0.5), c(0.0, 1.0), c(2.0, 0.0)], vec![c(0.0, -1.0), c(1.0, 1.0), c(0.5, 0.0)]];
        let avoid = orthonormal_basis(&[&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]]);
        let u = min_norm_solution(&g, &[c(1.0, 0.0), c(0.0, 2.0)], &avoid).unwrap();
        assert!((inner(&g[0], &u) - c(1.0, 0.0)).norm() < 1e-12);
        assert!((inner(&g[1], &u) - c(0.0, 2.0)).norm() < 1e-12);
        assert!(u[2].norm() < 1e-14);
    }

    #[test]
    fn phase_alignment_makes_the_gain_real() {
        let a = vec![c(1.0, 2.0), c(-1.0, 0.5)];
        let mut w = vec![c(0.3, -1.0), c(2.0, 2.0)];
        align_phase(&mut w, &a);
        let p = inner(&a, &w);
        assert!(p.im.abs() < 1e-14 && p.re > 0.0);
    }
}
