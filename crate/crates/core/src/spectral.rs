//! Closed-form spectra of the abelian walks, dense spectra of small
//! transition matrices, and the eigenvalue bound on total variation.

use std::f64::consts::TAU;

use crate::error::Result;
use crate::group::PrimeModulus;
use crate::limits::Limits;
use crate::walk::{build_kernel, WalkKernel, WalkSpec};

/// `(1/2)cos(2πx/p) + (1/2)cos(2πxa/p)`.
pub fn k_eigenvalue(x: u32, p: PrimeModulus, a: u32) -> f64 {
    let q = p.get() as f64;
    let x = (x % p.get()) as f64;
    let xa = ((x as u64 * a as u64) % p.get() as u64) as f64;
    0.5 * (TAU * x / q).cos() + 0.5 * (TAU * xa / q).cos()
}

/// `(1/2N) Σ_j (cos(2πx_j a/p) + cos(2πx_j/p))`.
pub fn product_eigenvalue(xs: &[u32], p: PrimeModulus, a: u32) -> f64 {
    xs.iter().map(|&x| k_eigenvalue(x, p, a)).sum::<f64>() / xs.len() as f64
}

/// Eigenvalues sorted in descending order, with multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Largest `‖Av - λv‖` over the computed pairs; 0 for closed forms.
    pub max_residual: f64,
}

impl Spectrum {
    pub fn from_values(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        Self {
            eigenvalues,
            max_residual: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn top(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn min(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }
}

/// Spectrum of `K` on `Z/p`, from the cosine formula.
pub fn k_spectrum(p: PrimeModulus, a: u32) -> Spectrum {
    Spectrum::from_values((0..p.get()).map(|x| k_eigenvalue(x, p, a)).collect())
}

/// Spectrum of the product walk on `(Z/p)^N`, from the cosine formula.
pub fn product_spectrum(big_n: usize, p: PrimeModulus, a: u32) -> Spectrum {
    let q = p.get() as u64;
    let total = q.pow(big_n as u32);
    let mut xs = vec![0u32; big_n];
    let values = (0..total)
        .map(|code| {
            let mut rest = code;
            for x in xs.iter_mut() {
                *x = (rest % q) as u32;
                rest /= q;
            }
            product_eigenvalue(&xs, p, a)
        })
        .collect();
    Spectrum::from_values(values)
}

/// Dense row-major transition matrix `M[x][y] = k(x⁻¹y)`.
pub fn transition_matrix(kernel: &WalkKernel, limits: &Limits) -> Result<(usize, Vec<f64>)> {
    let space = kernel.space();
    let order = space.checked_order(limits)?;
    Limits::check("dense eigensolve states", order as u128, limits.max_dense_states)?;
    let len = order as usize;
    let mut m = vec![0.0; len * len];
    for x in 0..order {
        for &(g, _) in kernel.support() {
            let y = space.mul(x, g);
            m[x as usize * len + y as usize] += kernel.probability(g);
        }
    }
    Ok((len, m))
}

/// All eigenpairs of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues (unsorted) and the row-major matrix whose column `k`
/// is the eigenvector of eigenvalue `k`. Sweeps stop once the off-diagonal
/// Frobenius norm falls below `1e-12`.
pub fn jacobi_eigen(len: usize, mut a: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    const TOL: f64 = 1e-12;
    const MAX_SWEEPS: usize = 100;
    let mut v = vec![0.0; len * len];
    for k in 0..len {
        v[k * len + k] = 1.0;
    }
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..len)
            .flat_map(|i| (0..len).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * len + j] * a[i * len + j])
            .sum::<f64>()
            .sqrt();
        if off < TOL {
            break;
        }
        for p in 0..len {
            for q in p + 1..len {
                let apq = a[p * len + q];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[p * len + p], a[q * len + q]);
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // A ← Jᵀ A J with J the (p, q) rotation
                for k in 0..len {
                    let (akp, akq) = (a[k * len + p], a[k * len + q]);
                    a[k * len + p] = c * akp - s * akq;
                    a[k * len + q] = s * akp + c * akq;
                }
                for k in 0..len {
                    let (apk, aqk) = (a[p * len + k], a[q * len + k]);
                    a[p * len + k] = c * apk - s * aqk;
                    a[q * len + k] = s * apk + c * aqk;
                }
                a[p * len + q] = 0.0;
                a[q * len + p] = 0.0;
                for k in 0..len {
                    let (vkp, vkq) = (v[k * len + p], v[k * len + q]);
                    v[k * len + p] = c * vkp - s * vkq;
                    v[k * len + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..len).map(|k| a[k * len + k]).collect(), v)
}

/// Numeric spectrum of a walk's transition matrix.
pub fn transition_spectrum(spec: &WalkSpec, limits: &Limits) -> Result<Spectrum> {
    kernel_spectrum(&build_kernel(spec)?, limits)
}

pub fn kernel_spectrum(kernel: &WalkKernel, limits: &Limits) -> Result<Spectrum> {
    let (len, m) = transition_matrix(kernel, limits)?;
    let (values, vectors) = jacobi_eigen(len, m.clone());
    let mut max_residual: f64 = 0.0;
    for (k, &lambda) in values.iter().enumerate() {
        let mut r2 = 0.0;
        for i in 0..len {
            let av: f64 = (0..len).map(|j| m[i * len + j] * vectors[j * len + k]).sum();
            let d = av - lambda * vectors[i * len + k];
            r2 += d * d;
        }
        max_residual = max_residual.max(r2.sqrt());
    }
    let mut s = Spectrum::from_values(values);
    s.max_residual = max_residual;
    Ok(s)
}

/// `Σ_{i ≥ 1} λ_i^{2t}`, an upper bound for `4‖P^{*t} - μ‖²_TV`.
pub fn eigen_tv_bound(spectrum: &Spectrum, t: u64) -> f64 {
    spectrum.eigenvalues[1..]
        .iter()
        .map(|&l| if l == 0.0 && t > 0 { 0.0 } else { (l * l).powf(t as f64) })
        .sum()
}

/// Largest elementwise gap between two spectra of equal length.
pub fn spectrum_distance(a: &Spectrum, b: &Spectrum) -> f64 {
    assert_eq!(a.len(), b.len(), "spectra of different sizes");
    a.eigenvalues
        .iter()
        .zip(&b.eigenvalues)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::closest_odd_sqrt;

    fn pm(p: u32) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn k_eigenvalue_examples() {
        let p = pm(5);
        assert_eq!(k_eigenvalue(0, p, 3), 1.0);
        assert!((k_eigenvalue(1, p, 3) + 0.25).abs() < 1e-15);
        for q in [5, 7, 11, 13] {
            let p = pm(q);
            let a = closest_odd_sqrt(p);
            for x in 1..q {
                assert!((k_eigenvalue(x, p, a) - k_eigenvalue(q - x, p, a)).abs() < 1e-15);
            }
            assert_eq!(product_eigenvalue(&[2], p, a), k_eigenvalue(2, p, a));
            assert_eq!(product_eigenvalue(&[0, 0, 0], p, a), 1.0);
        }
    }

    #[test]
    fn jacobi_on_a_known_matrix() {
        // [[2,1],[1,2]] has eigenvalues 3 and 1
        let (vals, _) = jacobi_eigen(2, vec![2.0, 1.0, 1.0, 2.0]);
        let s = Spectrum::from_values(vals);
        assert!((s.eigenvalues[0] - 3.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn k_spectrum_matches_eigensolve() {
        for q in [5, 7, 11] {
            let p = pm(q);
            let numeric = transition_spectrum(&WalkSpec::k(p), &Limits::default()).unwrap();
            let closed = k_spectrum(p, closest_odd_sqrt(p));
            assert!(spectrum_distance(&numeric, &closed) < 1e-9);
            assert!(numeric.max_residual < 1e-8);
            assert!((numeric.top() - 1.0).abs() < 1e-9);
            assert!(numeric.min() > -1.0 + 1e-6);
        }
    }

    #[test]
    fn p_walk_on_cycle() {
        let p = pm(5);
        let numeric = transition_spectrum(&WalkSpec::p(2, p), &Limits::default()).unwrap();
        let closed = Spectrum::from_values((0..5).map(|x| (TAU * x as f64 / 5.0).cos()).collect());
        assert!(spectrum_distance(&numeric, &closed) < 1e-9);
    }

    #[test]
    fn product_spectrum_matches_eigensolve() {
        let p = pm(5);
        let numeric = transition_spectrum(&WalkSpec::product_q(2, p), &Limits::default()).unwrap();
        let closed = product_spectrum(2, p, 3);
        assert_eq!(numeric.len(), 25);
        assert!(spectrum_distance(&numeric, &closed) < 1e-9);
        assert!(numeric.max_residual < 1e-8);
    }

    #[test]
    fn eigen_bound_basics() {
        let s = k_spectrum(pm(5), 3);
        assert_eq!(eigen_tv_bound(&s, 0), 4.0);
        let direct: f64 = (1..5).map(|x| k_eigenvalue(x, pm(5), 3).powi(6)).sum();
        assert!((eigen_tv_bound(&s, 3) - direct).abs() < 1e-15);
    }

    #[test]
    fn dense_budget() {
        let limits = Limits { max_dense_states: 100, ..Limits::default() };
        assert!(transition_spectrum(&WalkSpec::p(3, pm(5)), &limits).is_err());
    }
}
