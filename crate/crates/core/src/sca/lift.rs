//! Real representation of complex beamformers and the first-order minorants
//! used by the convex restriction.
//!
//! A complex vector `w ∈ Cⁿ` is stored as `[Re w; Im w] ∈ R²ⁿ`.

use num_complex::Complex64;

use super::expr::LinExpr;

/// Stacks `[Re w; Im w]`.
pub fn stack(w: &[Complex64]) -> Vec<f64> {
    w.iter().map(|c| c.re).chain(w.iter().map(|c| c.im)).collect()
}

/// Inverse of [`stack`].
pub fn unstack(x: &[f64]) -> Vec<Complex64> {
    let n = x.len() / 2;
    (0..n).map(|i| Complex64::new(x[i], x[n + i])).collect()
}

/// Coefficients of `Re(aᴴw)` and `Im(aᴴw)` as linear forms in the stacked `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealLift {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

pub fn real_lift(a: &[Complex64]) -> RealLift {
    // aᴴw = Σ (a_r u + a_i v) + j (a_r v − a_i u) for w = u + j v
    let re = a.iter().map(|c| c.re).chain(a.iter().map(|c| c.im)).collect();
    let im = a.iter().map(|c| -c.im).chain(a.iter().map(|c| c.re)).collect();
    RealLift { re, im }
}

impl RealLift {
    pub fn dim(&self) -> usize {
        self.re.len()
    }

    /// `(Re aᴴw, Im aᴴw)` for stacked `w`.
    pub fn eval(&self, w: &[f64]) -> (f64, f64) {
        let dot = |c: &[f64]| c.iter().zip(w).map(|(a, b)| a * b).sum::<f64>();
        (dot(&self.re), dot(&self.im))
    }

    /// `|aᴴw|` for stacked `w`.
    pub fn abs(&self, w: &[f64]) -> f64 {
        let (r, i) = self.eval(w);
        r.hypot(i)
    }

    /// `Re(aᴴw)` as an expression over the variables starting at `offset`.
    pub fn re_expr(&self, offset: usize) -> LinExpr {
        to_expr(&self.re, offset)
    }

    pub fn im_expr(&self, offset: usize) -> LinExpr {
        to_expr(&self.im, offset)
    }
}

fn to_expr(c: &[f64], offset: usize) -> LinExpr {
    LinExpr {
        terms: c.iter().enumerate().filter(|(_, a)| **a != 0.0).map(|(j, &a)| (offset + j, a)).collect(),
        constant: 0.0,
    }
}

/// Affine function `coefᵀw + constant` of a stacked beamformer.
#[derive(Debug, Clone, PartialEq)]
pub struct Affine {
    pub coef: Vec<f64>,
    pub constant: f64,
}

impl Affine {
    pub fn eval(&self, w: &[f64]) -> f64 {
        self.coef.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() + self.constant
    }

    pub fn to_expr(&self, offset: usize) -> LinExpr {
        to_expr(&self.coef, offset) + self.constant
    }
}

/// First-order lower bound of `|aᴴw|²` at `w̃`:
/// `2 Re{w̃ᴴ a aᴴ w} − |aᴴw̃|²`.
pub fn taylor_quadratic_minorant(a: &[Complex64], w_ref: &[Complex64]) -> Affine {
    let lift = real_lift(a);
    let p = super::super::model::inner(a, w_ref);
    let coef = lift.re.iter().zip(&lift.im).map(|(r, i)| 2.0 * (p.re * r + p.im * i)).collect();
    Affine { coef, constant: -p.norm_sqr() }
}

/// First-order lower bound of `μ²/η` at `(μ̃, η̃)`: returns the coefficients
/// `(2μ̃/η̃, −(μ̃/η̃)²)` of `μ` and `η`.
pub fn quad_over_lin_minorant(mu_ref: f64, eta_ref: f64) -> (f64, f64) {
    let r = mu_ref / eta_ref;
    (2.0 * r, -r * r)
}
