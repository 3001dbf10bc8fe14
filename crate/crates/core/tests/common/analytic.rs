//! Small SOCPs with known solutions.

use secure_swipt::conic::{Cone, ConeLayout, ConicProgram, SparseMatrix};

/// min cᵀx s.t. ‖x‖ ≤ 1; the optimum is −‖c‖ at x = −c/‖c‖.
pub fn norm_ball(c: &[f64]) -> ConicProgram {
    // s = (1, x) ∈ SOC
    let n = c.len();
    let trip: Vec<_> = (0..n).map(|j| (j + 1, j, -1.0)).collect();
    let a = SparseMatrix::from_triplets(n + 1, n, &trip).unwrap();
    let mut b = vec![0.0; n + 1];
    b[0] = 1.0;
    ConicProgram::new(c.to_vec(), a, b, ConeLayout::new(vec![Cone::Soc(n + 1)])).unwrap()
}

/// min t s.t. ‖x − a‖ ≤ t over (t, x).
pub fn projection(a: &[f64]) -> ConicProgram {
    let n = a.len();
    let mut trip = vec![(0, 0, -1.0)];
    trip.extend((0..n).map(|j| (j + 1, j + 1, -1.0)));
    let mat = SparseMatrix::from_triplets(n + 1, n + 1, &trip).unwrap();
    let mut b = vec![0.0];
    b.extend(a.iter().map(|v| -v));
    let mut c = vec![0.0; n + 1];
    c[0] = 1.0;
    ConicProgram::new(c, mat, b, ConeLayout::new(vec![Cone::Soc(n + 1)])).unwrap()
}

/// x ≥ 1 and x ≤ 0.
pub fn infeasible_pair() -> ConicProgram {
    let a = SparseMatrix::from_triplets(2, 1, &[(0, 0, -1.0), (1, 0, 1.0)]).unwrap();
    ConicProgram::new(vec![1.0], a, vec![-1.0, 0.0], ConeLayout::new(vec![Cone::Nonneg(2)])).unwrap()
}
