//! Normalized super-character values on the support of `Q` and the Fourier
//! upper bound for `‖Q^{*t} - μ‖`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{usage, Result};
use crate::group::PrimeModulus;
use crate::limits::Limits;
use crate::superclass::{enumerate_labels_checked, SuperClassLabel};
use crate::walk::closest_odd_sqrt;

/// `θ(x) = exp(2πi·x/p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdditiveCharacter {
    p: PrimeModulus,
}

impl AdditiveCharacter {
    pub fn new(p: PrimeModulus) -> Self {
        Self { p }
    }

    pub fn eval(&self, x: i64) -> Complex64 {
        let x = self.p.reduce(x);
        Complex64::from_polar(1.0, TAU * x as f64 / self.p.get() as f64)
    }

    /// Real part of `θ(x)`.
    pub fn cos(&self, x: i64) -> f64 {
        (TAU * self.p.reduce(x) as f64 / self.p.get() as f64).cos()
    }
}

/// False when `D` has a box right of `(i, i+1)` in row `i`, or above it in
/// column `i+1`. The box `(i, i+1)` itself is allowed.
pub fn restricted_region_ok(label: &SuperClassLabel, i: usize) -> bool {
    label
        .cells()
        .iter()
        .all(|&((r, c), _)| !((r == i && c > i + 1) || (c == i + 1 && r < i)))
}

/// `|D_i|`, the boxes strictly above and right of `(i, i+1)`, and `φ(i, i+1)`
/// (0 when that box is not in `D`).
fn local_data(label: &SuperClassLabel, i: usize) -> (u32, u32) {
    let mut above_right = 0;
    let mut phi = 0;
    for &((r, c), v) in label.cells() {
        if r < i && c > i + 1 {
            above_right += 1;
        }
        if (r, c) == (i, i + 1) {
            phi = v;
        }
    }
    (above_right, phi)
}

/// The super-character of `label` divided by its degree, at any element of
/// the class of `I + coeff·E(i, i+1)`.
pub fn normalized_char_value(label: &SuperClassLabel, i: usize, coeff: i64) -> Complex64 {
    if !restricted_region_ok(label, i) {
        return Complex64::new(0.0, 0.0);
    }
    let (k, phi) = local_data(label, i);
    let theta = AdditiveCharacter::new(label.modulus());
    theta.eval(coeff * phi as i64) * (label.modulus().get() as f64).powi(-(k as i32))
}

/// `Q̂(D, φ) / p^{d(D)}`, a real number in `[-1, 1]`.
pub fn q_hat_normalized(label: &SuperClassLabel) -> f64 {
    let (n, p) = (label.dim(), label.modulus());
    let a = closest_odd_sqrt(p) as i64;
    let theta = AdditiveCharacter::new(p);
    let sum: f64 = (1..n)
        .filter(|&i| restricted_region_ok(label, i))
        .map(|i| {
            let (k, phi) = local_data(label, i);
            let phi = phi as i64;
            (p.get() as f64).powi(-(k as i32)) * (theta.cos(phi) + theta.cos(a * phi))
        })
        .sum();
    sum / (2 * (n - 1)) as f64
}

/// Per-label data for the bound: `(p^{-i(D)}, q̂)` over labels with `D ≠ ∅`.
fn bound_terms(n: usize, p: PrimeModulus, limits: &Limits) -> Result<Vec<(f64, f64)>> {
    let pf = p.get() as f64;
    Ok(enumerate_labels_checked(n, p, limits)?
        .filter(|l| !l.is_empty())
        .map(|l| (pf.powi(-(l.statistics().i_stat as i32)), q_hat_normalized(&l)))
        .collect())
}

fn bound_at(terms: &[(f64, f64)], t: u64) -> f64 {
    terms
        .iter()
        .map(|&(w, q)| if q == 0.0 && t > 0 { 0.0 } else { w * (q * q).powf(t as f64) })
        .sum()
}

/// `Σ_{D ≠ ∅, φ} p^{-i(D)} (Q̂(D,φ)/p^{d(D)})^{2t}`, an upper bound for
/// `4‖Q^{*t} - μ‖²_TV`.
pub fn upper_bound_rhs(n: usize, p: PrimeModulus, t: u64, limits: &Limits) -> Result<f64> {
    if n < 2 {
        return usage(format!("dimension {n} is below 2"));
    }
    Ok(bound_at(&bound_terms(n, p, limits)?, t))
}

/// [`upper_bound_rhs`] at each `t` in `ts`, enumerating labels once.
pub fn upper_bound_curve(n: usize, p: PrimeModulus, ts: &[u64], limits: &Limits) -> Result<Vec<f64>> {
    if n < 2 {
        return usage(format!("dimension {n} is below 2"));
    }
    let terms = bound_terms(n, p, limits)?;
    Ok(ts.iter().map(|&t| bound_at(&terms, t)).collect())
}
