//! The comparison constant `A` between the walks `Q` and `P`, its spectral
//! certificate, and the resulting bound on `P^{*t}`.

use rayon::prelude::*;

use crate::error::{usage, Result};
use crate::group::{GeneratorStep, PrimeModulus, Sign};
use crate::limits::Limits;
use crate::paths::{word_class_element, word_stats};
use crate::spectral::kernel_spectrum;
use crate::superclass::conjugacy_class_elements;
use crate::walk::{build_kernel, closest_odd_sqrt, Walk, WalkSpec};

/// One row of the load table.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorLoad {
    pub step: GeneratorStep,
    /// `Σ_g |g|·N(g, z)·Q(g)`.
    pub load: f64,
    /// `1/P(z)`.
    pub inv_p: f64,
    /// `load / P(z)`.
    pub product: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub n: usize,
    pub p: PrimeModulus,
    /// `A = max_z load(z) / P(z)`.
    pub constant: f64,
    /// `A` as the exact fraction `constant_num / constant_den`.
    pub constant_num: u128,
    pub constant_den: u128,
    pub argmax: GeneratorStep,
    pub loads: Vec<GeneratorLoad>,
    pub words: usize,
    pub max_length: usize,
    pub max_multiplicity: usize,
}

/// The distinct class coefficients among `±1, ±a`, first spelling kept.
pub fn class_coefficients(p: PrimeModulus) -> Vec<i64> {
    let a = closest_odd_sqrt(p) as i64;
    let mut seen = Vec::new();
    let mut out = Vec::new();
    for c in [1, -1, a, -a] {
        let r = p.reduce(c);
        if !seen.contains(&r) {
            seen.push(r);
            out.push(c);
        }
    }
    out
}

/// `A` from the fixed words of [`word_class_element`], one per element of
/// the support of `Q`.
pub fn comparison_constant(n: usize, p: PrimeModulus, limits: &Limits) -> Result<ComparisonReport> {
    if n < 2 {
        return usage(format!("dimension {n} is below 2"));
    }
    let per_class = (p.get() as u128).pow(n as u32 - 2);
    Limits::check("class-element words", 4 * (n as u128 - 1) * per_class, limits.max_words)?;
    let spec = WalkSpec::q(n, p);
    spec.space().checked_order(limits)?;
    let kernel = build_kernel(&spec)?;
    let gens = GeneratorStep::all(n);
    let index = |s: GeneratorStep| 2 * (s.row - 1) + (s.sign == Sign::Minus) as usize;

    let mut jobs = Vec::new();
    for i in 1..n {
        for c in class_coefficients(p) {
            jobs.push((i, c));
        }
    }
    // (Σ |g|·N(g,z)·weight(g) per generator, words, max length, max multiplicity)
    type Acc = (Vec<u128>, usize, usize, usize);
    let zero = || -> Acc { (vec![0; gens.len()], 0, 0, 0) };
    let merge = |mut x: Acc, y: Acc| -> Acc {
        x.0.iter_mut().zip(&y.0).for_each(|(a, b)| *a += b);
        (x.0, x.1 + y.1, x.2.max(y.2), x.3.max(y.3))
    };
    let partials: Vec<Acc> = jobs
        .par_iter()
        .map(|&(i, c)| -> Result<Acc> {
            let mut acc = zero();
            for b in conjugacy_class_elements(i, p.reduce(c), n, p)? {
                let w = word_class_element(&b, i, c)?;
                let stats = word_stats(&w);
                let weight = kernel.weight(b.encode_index()) as u128;
                for (&step, &count) in &stats.multiplicity {
                    acc.0[index(step)] += stats.length as u128 * count as u128 * weight;
                }
                acc.1 += 1;
                acc.2 = acc.2.max(stats.length);
                acc.3 = acc.3.max(stats.max_multiplicity());
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let (loads_num, words, max_length, max_multiplicity) = partials.into_iter().fold(zero(), merge);

    let denom = kernel.denominator() as u128;
    let inv_p = 2 * (n as u128 - 1);
    let loads: Vec<GeneratorLoad> = gens
        .iter()
        .zip(&loads_num)
        .map(|(&step, &num)| GeneratorLoad {
            step,
            load: num as f64 / denom as f64,
            inv_p: inv_p as f64,
            product: (num * inv_p) as f64 / denom as f64,
        })
        .collect();
    let (best, &best_num) = loads_num
        .iter()
        .enumerate()
        .max_by_key(|&(k, v)| (*v, std::cmp::Reverse(k)))
        .expect("at least one generator");
    let g = gcd(best_num * inv_p, denom);
    Ok(ComparisonReport {
        n,
        p,
        constant: loads[best].product,
        constant_num: best_num * inv_p / g,
        constant_den: denom / g,
        argmax: gens[best],
        loads,
        words,
        max_length,
        max_multiplicity,
    })
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// Outcome of checking `1 - β_i(Q) ≤ A·(1 - β_i(P))` index by index.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralCheck {
    pub holds: bool,
    /// `min_i A·(1 - β_i(P)) - (1 - β_i(Q))`.
    pub min_slack: f64,
    pub worst_index: usize,
    pub pairs: usize,
}

/// Spectral consequence of the comparison: both spectra sorted descending.
pub fn spectral_comparison_check(n: usize, p: PrimeModulus, constant: f64, limits: &Limits) -> Result<SpectralCheck> {
    let sp = kernel_spectrum(&build_kernel(&WalkSpec::p(n, p))?, limits)?;
    let sq = kernel_spectrum(&build_kernel(&WalkSpec::q(n, p))?, limits)?;
    let mut min_slack = f64::INFINITY;
    let mut worst_index = 0;
    for (k, (bp, bq)) in sp.eigenvalues.iter().zip(&sq.eigenvalues).enumerate() {
        let slack = constant * (1.0 - bp) - (1.0 - bq);
        if slack < min_slack {
            min_slack = slack;
            worst_index = k;
        }
    }
    Ok(SpectralCheck {
        holds: min_slack >= -1e-9,
        min_slack,
        worst_index,
        pairs: sp.len(),
    })
}

/// Number of `Q` steps used at time `t`: `⌊t / 2A⌋`.
pub fn q_steps(t: u64, constant: f64) -> u64 {
    (t as f64 / (2.0 * constant)).floor() as u64
}

/// `|G|·(e^{-t/A} + ‖Q^{*⌊t/2A⌋} - μ‖²₂)`.
pub fn main_bound_rhs(n: usize, p: PrimeModulus, t: u64, constant: f64, limits: &Limits) -> Result<f64> {
    Ok(main_bound_curve(n, p, &[t], constant, limits)?[0])
}

/// [`main_bound_rhs`] at each `t`, evolving `Q` once.
pub fn main_bound_curve(n: usize, p: PrimeModulus, ts: &[u64], constant: f64, limits: &Limits) -> Result<Vec<f64>> {
    if !(constant > 0.0) {
        return usage(format!("comparison constant {constant} must be positive"));
    }
    let walk = Walk::new(WalkSpec::q(n, p), limits)?;
    let order = walk.order() as f64;
    let max_steps = ts.iter().map(|&t| q_steps(t, constant)).max().unwrap_or(0);
    let mut l2 = Vec::with_capacity(max_steps as usize + 1);
    let mut d = walk.start();
    for s in 0..=max_steps {
        if s > 0 {
            d = walk.step(&d)?;
        }
        l2.push(d.l2_distance_sq());
    }
    Ok(ts
        .iter()
        .map(|&t| order * ((-(t as f64) / constant).exp() + l2[q_steps(t, constant) as usize]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(p: u32) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn constant_for_the_cycle() {
        let r = comparison_constant(2, pm(5), &Limits::default()).unwrap();
        assert_eq!((r.constant_num, r.constant_den), (5, 1));
        assert_eq!(r.constant, 5.0);
        assert_eq!(r.loads[0].load, 2.5);
        assert_eq!(r.words, 4);
    }

    #[test]
    fn degenerate_modulus_merges_classes() {
        assert_eq!(class_coefficients(pm(3)), vec![1, -1]);
        let r = comparison_constant(3, pm(3), &Limits::default()).unwrap();
        assert!(r.constant.is_finite() && r.constant >= 1.0);
        assert_eq!(r.words, 12);
    }

    #[test]
    fn constant_within_envelope() {
        let r = comparison_constant(3, pm(5), &Limits::default()).unwrap();
        assert_eq!(r.words, 40);
        assert!(r.constant >= 1.0 && r.constant <= 30.0 * 5.0 * 9.0);
    }

    #[test]
    fn spectral_check_small() {
        let r = comparison_constant(2, pm(5), &Limits::default()).unwrap();
        let c = spectral_comparison_check(2, pm(5), r.constant, &Limits::default()).unwrap();
        assert!(c.holds);
        assert_eq!(c.pairs, 5);
    }

    #[test]
    fn main_bound_at_zero() {
        let v = main_bound_rhs(3, pm(3), 0, 4.0, &Limits::default()).unwrap();
        assert!((v - 53.0).abs() < 1e-12);
        let ts: Vec<u64> = (0..200).step_by(5).collect();
        let curve = main_bound_curve(3, pm(5), &ts, 10.0, &Limits::default()).unwrap();
        assert!(curve.windows(2).all(|w| w[1] <= w[0]));
    }
}
