//! Random strictly feasible, bounded SOCP instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use secure_swipt::conic::{Cone, ConeLayout, ConicProgram, SparseMatrix};

pub struct RandomSocp {
    pub prog: ConicProgram,
    /// Strictly feasible primal point.
    pub x0: Vec<f64>,
}

fn interior_point(rng: &mut ChaCha8Rng, cone: Cone) -> Vec<f64> {
    match cone {
        Cone::Nonneg(d) => (0..d).map(|_| rng.random_range(0.2..2.0)).collect(),
        Cone::Soc(d) => {
            let tail: Vec<f64> = (1..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = tail.iter().map(|v| v * v).sum::<f64>().sqrt();
            let mut v = vec![norm + rng.random_range(0.2..1.5)];
            v.extend(tail);
            v
        }
        Cone::Zero(_) => unreachable!(),
    }
}

/// `x0` strictly feasible by construction and `c = −Aᵀz0` with `z0` interior
/// to the (self-dual) cone, so the optimum is finite and attained.
pub fn random_socp(seed: u64, n: usize) -> RandomSocp {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut blocks = vec![];
    let mut m = 0;
    while m < n + 2 {
        let cone = if rng.random_bool(0.3) {
            Cone::Nonneg(rng.random_range(1..=3))
        } else {
            Cone::Soc(rng.random_range(2..=5))
        };
        m += cone.dim();
        blocks.push(cone);
    }
    let mut trip = vec![];
    for i in 0..m {
        for j in 0..n {
            if rng.random_bool(0.6) {
                trip.push((i, j, rng.random_range(-1.0..1.0)));
            }
        }
    }
    // keep every column populated
    for j in 0..n {
        trip.push((j % m, j, 1.0));
    }
    let a = SparseMatrix::from_triplets(m, n, &trip).unwrap();
    let x0: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let s0: Vec<f64> = blocks.iter().flat_map(|&k| interior_point(&mut rng, k)).collect();
    let z0: Vec<f64> = blocks.iter().flat_map(|&k| interior_point(&mut rng, k)).collect();
    let ax0 = a.mul_vec(&x0);
    let b: Vec<f64> = ax0.iter().zip(&s0).map(|(p, q)| p + q).collect();
    let c: Vec<f64> = a.tmul_vec(&z0).iter().map(|v| -v).collect();
    let prog = ConicProgram::new(c, a, b, ConeLayout::new(blocks)).unwrap();
    RandomSocp { prog, x0 }
}
