//! Primal log-barrier method with damped Newton steps. Slow and simple, which
//! is the point: it shares no code with the primal-dual solver it checks.

use nalgebra::{DMatrix, DVector};
use secure_swipt::conic::{Cone, ConicProgram};

fn barrier_derivs(cones: &[Cone], s: &[f64]) -> Option<(f64, Vec<f64>, DMatrix<f64>)> {
    let m = s.len();
    let mut val = 0.0;
    let mut grad = vec![0.0; m];
    let mut hess = DMatrix::zeros(m, m);
    let mut off = 0;
    for cone in cones {
        match *cone {
            Cone::Nonneg(d) => {
                for i in off..off + d {
                    if s[i] <= 0.0 {
                        return None;
                    }
                    val -= s[i].ln();
                    grad[i] = -1.0 / s[i];
                    hess[(i, i)] = 1.0 / (s[i] * s[i]);
                }
                off += d;
            }
            Cone::Soc(d) => {
                let x = &s[off..off + d];
                let q = x[0] * x[0] - x[1..].iter().map(|v| v * v).sum::<f64>();
                if q <= 0.0 || x[0] <= 0.0 {
                    return None;
                }
                val -= q.ln();
                // J x
                let jx: Vec<f64> = (0..d).map(|k| if k == 0 { x[0] } else { -x[k] }).collect();
                for p in 0..d {
                    grad[off + p] = -2.0 * jx[p] / q;
                    for r in 0..d {
                        let jpr = if p == r {
                            if p == 0 {
                                1.0
                            } else {
                                -1.0
                            }
                        } else {
                            0.0
                        };
                        hess[(off + p, off + r)] = -2.0 * jpr / q + 4.0 * jx[p] * jx[r] / (q * q);
                    }
                }
                off += d;
            }
            Cone::Zero(_) => panic!("barrier oracle handles inequality cones only"),
        }
    }
    Some((val, grad, hess))
}

/// Minimises `cᵀx` from the strictly feasible `x0`; returns the optimal value.
pub fn barrier_minimize(prog: &ConicProgram, x0: &[f64]) -> f64 {
    let n = prog.num_vars();
    let a = DMatrix::from_row_slice(prog.num_rows(), n, &prog.a.to_dense());
    let b = DVector::from_column_slice(&prog.b);
    let c = DVector::from_column_slice(&prog.c);
    let nu: f64 = prog
        .cones
        .blocks
        .iter()
        .map(|k| match k {
            Cone::Soc(_) => 2.0,
            other => other.degree() as f64,
        })
        .sum();
    let mut x = DVector::from_column_slice(x0);
    let mut t = 1.0;
    let f = |x: &DVector<f64>, t: f64| -> Option<f64> {
        let s = &b - &a * x;
        barrier_derivs(&prog.cones.blocks, s.as_slice()).map(|(v, _, _)| t * c.dot(x) + v)
    };
    loop {
        for _ in 0..200 {
            let s = &b - &a * &x;
            let (_, g, h) = barrier_derivs(&prog.cones.blocks, s.as_slice()).expect("iterate left the domain");
            let grad = &c * t - a.transpose() * DVector::from_vec(g);
            let hess = a.transpose() * h * &a;
            let step = hess.cholesky().expect("Hessian not positive definite").solve(&(-&grad));
            let decrement = -grad.dot(&step);
            if decrement / 2.0 < 1e-13 {
                break;
            }
            let f0 = f(&x, t).unwrap();
            let mut alpha = 1.0;
            loop {
                let trial = &x + &step * alpha;
                if let Some(ft) = f(&trial, t) {
                    if ft <= f0 - 0.25 * alpha * decrement {
                        x = trial;
                        break;
                    }
                }
                alpha *= 0.5;
                if alpha < 1e-14 {
                    break;
                }
            }
        }
        let obj = c.dot(&x);
        if nu / t < 1e-10 * obj.abs().max(1.0) {
            return obj;
        }
        t *= 8.0;
    }
}
