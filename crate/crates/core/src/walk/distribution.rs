use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{usage, Result};

use super::space::ClassPartition;

#[derive(Clone, Debug)]
enum Repr {
    Dense(Vec<f64>),
    Classes(Arc<ClassPartition>, Vec<f64>),
}

/// A probability vector over a whole group.
///
/// Values are held as the excess `d(g) - 1/|G|` over the uniform measure.
/// Convolution with a kernel maps excesses to excesses, so distances to
/// uniform keep full relative precision even when they are far below
/// `1/|G|`. Distributions that are constant on conjugacy classes may be held
/// per class.
#[derive(Clone, Debug)]
pub struct GroupDistribution {
    order: u64,
    repr: Repr,
}

impl GroupDistribution {
    pub fn point_mass(order: u64, idx: u64) -> Self {
        let mu = 1.0 / order as f64;
        let mut excess = vec![-mu; order as usize];
        excess[idx as usize] = 1.0 - mu;
        Self {
            order,
            repr: Repr::Dense(excess),
        }
    }

    pub fn uniform(order: u64) -> Self {
        Self {
            order,
            repr: Repr::Dense(vec![0.0; order as usize]),
        }
    }

    /// From explicit probabilities; they must sum to 1 within `1e-12`.
    pub fn from_probabilities(values: Vec<f64>) -> Result<Self> {
        let order = values.len() as u64;
        if order == 0 {
            return usage("empty distribution");
        }
        if values.iter().any(|&v| !(v >= 0.0)) {
            return usage("negative or NaN probability");
        }
        let mass: f64 = values.iter().sum();
        if (mass - 1.0).abs() > 1e-12 {
            return usage(format!("probabilities sum to {mass}, not 1"));
        }
        let mu = 1.0 / order as f64;
        Ok(Self {
            order,
            repr: Repr::Dense(values.into_iter().map(|v| v - mu).collect()),
        })
    }

    pub(crate) fn from_dense_excess(excess: Vec<f64>) -> Self {
        Self {
            order: excess.len() as u64,
            repr: Repr::Dense(excess),
        }
    }

    pub(crate) fn from_class_excess(order: u64, classes: Arc<ClassPartition>, excess: Vec<f64>) -> Self {
        Self {
            order,
            repr: Repr::Classes(classes, excess),
        }
    }

    pub(crate) fn dense_excess(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Dense(e) => Some(e),
            Repr::Classes(..) => None,
        }
    }

    pub(crate) fn class_excess(&self) -> Option<(&Arc<ClassPartition>, &[f64])> {
        match &self.repr {
            Repr::Classes(c, e) => Some((c, e)),
            Repr::Dense(_) => None,
        }
    }

    /// The same distribution held per class, when it is constant on the
    /// classes of `classes` (exact equality on representatives is assumed).
    pub(crate) fn compress(&self, classes: &Arc<ClassPartition>) -> Self {
        let excess = (0..classes.len())
            .map(|c| self.excess(classes.representative(c)))
            .collect();
        Self::from_class_excess(self.order, classes.clone(), excess)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    #[inline]
    pub fn excess(&self, idx: u64) -> f64 {
        match &self.repr {
            Repr::Dense(e) => e[idx as usize],
            Repr::Classes(c, e) => e[c.class_of(idx)],
        }
    }

    #[inline]
    pub fn probability(&self, idx: u64) -> f64 {
        1.0 / self.order as f64 + self.excess(idx)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.order).map(|g| self.probability(g)).collect()
    }

    pub fn total_mass(&self) -> f64 {
        (0..self.order).map(|g| self.probability(g)).sum()
    }

    /// `(1/2) Σ_g |d(g) - 1/|G||`.
    pub fn tv_distance(&self) -> f64 {
        0.5 * match &self.repr {
            Repr::Dense(e) => e.iter().map(|x| x.abs()).sum::<f64>(),
            Repr::Classes(c, e) => e
                .iter()
                .enumerate()
                .map(|(k, x)| c.size(k) as f64 * x.abs())
                .sum::<f64>(),
        }
    }

    /// `Σ_g (d(g) - 1/|G|)²`.
    pub fn l2_distance_sq(&self) -> f64 {
        match &self.repr {
            Repr::Dense(e) => e.iter().map(|x| x * x).sum(),
            Repr::Classes(c, e) => e
                .iter()
                .enumerate()
                .map(|(k, x)| c.size(k) as f64 * x * x)
                .sum(),
        }
    }
}

pub fn tv_distance(d: &GroupDistribution) -> f64 {
    d.tv_distance()
}

pub fn l2_distance_sq(d: &GroupDistribution) -> f64 {
    d.l2_distance_sq()
}

/// Exact distribution: `counts[g] / denominator`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalDistribution {
    counts: Vec<BigUint>,
    denom: BigUint,
}

fn ratio(num: &BigInt, den: &BigInt) -> f64 {
    // bring both sides into f64 exponent range before dividing
    let shift = den.bits().saturating_sub(1000) as usize;
    let (n, d) = (num >> shift, den >> shift);
    n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
}

impl RationalDistribution {
    pub fn point_mass(order: u64, idx: u64) -> Self {
        let mut counts = vec![BigUint::zero(); order as usize];
        counts[idx as usize] = BigUint::from(1u8);
        Self {
            counts,
            denom: BigUint::from(1u8),
        }
    }

    pub(crate) fn from_parts(counts: Vec<BigUint>, denom: BigUint) -> Self {
        Self { counts, denom }
    }

    pub fn order(&self) -> u64 {
        self.counts.len() as u64
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn denominator(&self) -> &BigUint {
        &self.denom
    }

    pub fn mass_is_exact(&self) -> bool {
        self.counts.iter().sum::<BigUint>() == self.denom
    }

    pub fn probability(&self, idx: u64) -> f64 {
        ratio(&BigInt::from(self.counts[idx as usize].clone()), &BigInt::from(self.denom.clone()))
    }

    /// Numerators of `|G|·d(g) - 1` over the common denominator `denominator`.
    fn scaled_excess(&self) -> impl Iterator<Item = BigInt> + '_ {
        let order = BigUint::from(self.order());
        let den = BigInt::from(self.denom.clone());
        self.counts
            .iter()
            .map(move |c| BigInt::from(c * &order) - &den)
    }

    /// Total variation distance, evaluated exactly and rounded once.
    pub fn tv_distance(&self) -> f64 {
        let sum: BigInt = self.scaled_excess().map(|x| x.abs()).sum();
        let den = BigInt::from(2u8) * BigInt::from(self.order()) * BigInt::from(self.denom.clone());
        ratio(&sum, &den)
    }

    pub fn l2_distance_sq(&self) -> f64 {
        let sum: BigInt = self.scaled_excess().map(|x| &x * &x).sum();
        let g = BigInt::from(self.order());
        let d = BigInt::from(self.denom.clone());
        ratio(&sum, &(&g * &g * &d * &d))
    }

    pub fn to_float(&self) -> GroupDistribution {
        let order = BigInt::from(self.order());
        let den = &order * BigInt::from(self.denom.clone());
        GroupDistribution::from_dense_excess(self.scaled_excess().map(|x| ratio(&x, &den)).collect())
    }
}
