//! Walk kernels on `U_n(Z/pZ)` and `(Z/pZ)^N`, exact evolution of the
//! distribution from the identity, and distances to uniform.
//!
//! Convolution is pull-based: each output cell sums its inputs in the fixed
//! kernel order, so results do not depend on how the output range is split
//! across threads.

mod distribution;
mod kernel;
mod space;

use std::sync::Arc;

use num_bigint::BigUint;
use rayon::prelude::*;

pub use distribution::{l2_distance_sq, tv_distance, GroupDistribution, RationalDistribution};
pub use kernel::{build_kernel, closest_odd_sqrt, WalkKernel, WalkKind, WalkSpec};
pub use space::{ClassPartition, StateSpace};

use crate::error::{usage, Error, Result};
use crate::group::GeneratorStep;
use crate::limits::Limits;
use space::RightMulTable;

const CHUNK: usize = 4096;

/// A walk ready to evolve: its kernel plus lookup tables for `y ↦ y·g⁻¹`.
pub struct Walk {
    spec: Option<WalkSpec>,
    kernel: WalkKernel,
    order: u64,
    table: RightMulTable,
    probs: Vec<f64>,
    weights: Vec<u64>,
    classes: Option<Arc<ClassPartition>>,
}

impl Walk {
    pub fn new(spec: WalkSpec, limits: &Limits) -> Result<Self> {
        spec.validate()?;
        spec.space().checked_order(limits)?;
        let kernel = build_kernel(&spec)?;
        let mut walk = Self::from_kernel(kernel, limits)?;
        walk.spec = Some(spec);
        if spec.kind == WalkKind::Q {
            walk.classes = walk.conjugacy_classes();
        }
        Ok(walk)
    }

    pub fn from_kernel(kernel: WalkKernel, limits: &Limits) -> Result<Self> {
        let space = kernel.space();
        let order = space.checked_order(limits)?;
        let inverses: Vec<u64> = kernel.support().iter().map(|&(g, _)| space.inv(g)).collect();
        let table = RightMulTable::new(&space, &inverses);
        let denom = kernel.denominator() as f64;
        let probs = kernel.support().iter().map(|&(_, w)| w as f64 / denom).collect();
        let weights = kernel.support().iter().map(|&(_, w)| w).collect();
        Ok(Self {
            spec: None,
            kernel,
            order,
            table,
            probs,
            weights,
            classes: None,
        })
    }

    /// The conjugacy partition, when the kernel is constant on it.
    fn conjugacy_classes(&self) -> Option<Arc<ClassPartition>> {
        let StateSpace::Unitri { n, p } = self.kernel.space() else {
            return None;
        };
        let space = self.kernel.space();
        let gens: Vec<u64> = (1..n)
            .map(|i| GeneratorStep::plus(i).matrix(n, p).expect("valid").encode_index())
            .collect();
        let invariant = self.kernel.support().iter().all(|&(g, w)| {
            gens.iter()
                .all(|&s| self.kernel.weight(space.mul(space.mul(space.inv(s), g), s)) == w)
        });
        invariant.then(|| Arc::new(ClassPartition::conjugacy(n, p, self.order)))
    }

    pub fn spec(&self) -> Option<&WalkSpec> {
        self.spec.as_ref()
    }

    pub fn kernel(&self) -> &WalkKernel {
        &self.kernel
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// The conjugacy classes used for compressed evolution, if any.
    pub fn classes(&self) -> Option<&Arc<ClassPartition>> {
        self.classes.as_ref()
    }

    /// `δ_I`.
    pub fn start(&self) -> GroupDistribution {
        let d = GroupDistribution::point_mass(self.order, 0);
        match &self.classes {
            Some(c) => d.compress(c),
            None => d,
        }
    }

    /// One convolution with the kernel: `out(y) = Σ_g d(y·g⁻¹)·k(g)`.
    pub fn step(&self, d: &GroupDistribution) -> Result<GroupDistribution> {
        if d.order() != self.order {
            return usage(format!(
                "distribution over {} states, walk over {}",
                d.order(),
                self.order
            ));
        }
        if let (Some(classes), Some((held, excess))) = (&self.classes, d.class_excess()) {
            if Arc::ptr_eq(classes, held) {
                let out = self.pull(classes.len(), |c| classes.representative(c), |y| {
                    excess[classes.class_of(y)]
                });
                return Ok(GroupDistribution::from_class_excess(self.order, classes.clone(), out));
            }
        }
        let out = match d.dense_excess() {
            Some(e) => self.pull(self.order as usize, |y| y as u64, |y| e[y as usize]),
            None => self.pull(self.order as usize, |y| y as u64, |y| d.excess(y)),
        };
        Ok(GroupDistribution::from_dense_excess(out))
    }

    fn pull<S, V>(&self, len: usize, state: S, value: V) -> Vec<f64>
    where
        S: Fn(usize) -> u64 + Sync,
        V: Fn(u64) -> f64 + Sync,
    {
        let mut out = vec![0.0; len];
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            let mut rows = Vec::new();
            for (k, cell) in chunk.iter_mut().enumerate() {
                self.table.rows(state(c * CHUNK + k), &mut rows);
                let mut acc = 0.0;
                for (s, &w) in self.probs.iter().enumerate() {
                    acc += value(self.table.apply(&rows, s)) * w;
                }
                *cell = acc;
            }
        });
        out
    }

    /// Distribution after `t` steps from the identity.
    pub fn distribution(&self, t: u64) -> GroupDistribution {
        let mut d = self.start();
        for _ in 0..t {
            d = self.step(&d).expect("orders agree");
        }
        d
    }

    /// `(t, tv, l2²)` for `t = 0..=t_max`.
    pub fn curve(&self, t_max: u64) -> Vec<CurvePoint> {
        let mut d = self.start();
        let mut out = Vec::with_capacity(t_max as usize + 1);
        for t in 0..=t_max {
            if t > 0 {
                d = self.step(&d).expect("orders agree");
            }
            out.push(CurvePoint {
                t,
                tv: d.tv_distance(),
                l2_sq: d.l2_distance_sq(),
            });
        }
        out
    }

    pub fn rational_start(&self) -> RationalDistribution {
        RationalDistribution::point_mass(self.order, 0)
    }

    /// Exact convolution; the denominator grows by the kernel denominator.
    pub fn rational_step(&self, d: &RationalDistribution) -> Result<RationalDistribution> {
        if d.order() != self.order {
            return usage("distribution and walk orders differ");
        }
        let counts = d.counts();
        let mut out = vec![BigUint::default(); self.order as usize];
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            let mut rows = Vec::new();
            for (k, cell) in chunk.iter_mut().enumerate() {
                self.table.rows((c * CHUNK + k) as u64, &mut rows);
                let mut acc = BigUint::default();
                for (s, &w) in self.weights.iter().enumerate() {
                    acc += &counts[self.table.apply(&rows, s) as usize] * w;
                }
                *cell = acc;
            }
        });
        Ok(RationalDistribution::from_parts(
            out,
            d.denominator() * self.kernel.denominator(),
        ))
    }

    pub fn rational_distribution(&self, t: u64) -> RationalDistribution {
        let mut d = self.rational_start();
        for _ in 0..t {
            d = self.rational_step(&d).expect("orders agree");
        }
        d
    }

    /// Smallest `t` with `TV(t) < eps`, searching at most `max_steps` steps.
    pub fn mixing_time(&self, eps: f64, max_steps: u64) -> Result<u64> {
        if !(eps > 0.0 && eps < 1.0) {
            return usage(format!("eps = {eps} must lie in (0, 1)"));
        }
        let mut d = self.start();
        for t in 0..=max_steps {
            if t > 0 {
                d = self.step(&d)?;
            }
            if d.tv_distance() < eps {
                return Ok(t);
            }
        }
        Err(Error::Capacity {
            what: "mixing-time search steps",
            requested: max_steps as u128 + 1,
            limit: max_steps as u128,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub t: u64,
    pub tv: f64,
    pub l2_sq: f64,
}

/// One convolution of an arbitrary distribution with an arbitrary kernel.
pub fn convolve_step(d: &GroupDistribution, k: &WalkKernel) -> Result<GroupDistribution> {
    let walk = Walk::from_kernel(k.clone(), &Limits::default())?;
    walk.step(d)
}

/// The distribution after `t` steps of `spec` from the identity.
pub fn exact_distribution(spec: &WalkSpec, t: u64, limits: &Limits) -> Result<GroupDistribution> {
    Ok(Walk::new(*spec, limits)?.distribution(t))
}

/// As [`exact_distribution`], in exact rational arithmetic.
pub fn exact_distribution_rational(
    spec: &WalkSpec,
    t: u64,
    limits: &Limits,
) -> Result<RationalDistribution> {
    Ok(Walk::new(*spec, limits)?.rational_distribution(t))
}

/// `t_mix(eps)` from the identity; translation invariance makes every start
/// state equivalent.
pub fn mixing_time(spec: &WalkSpec, eps: f64, limits: &Limits) -> Result<u64> {
    Walk::new(*spec, limits)?.mixing_time(eps, limits.max_steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::PrimeModulus;

    fn pm(p: u32) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn point_mass_convolves_to_kernel() {
        let spec = WalkSpec::q(3, pm(5));
        let k = build_kernel(&spec).unwrap();
        let d = convolve_step(&GroupDistribution::point_mass(125, 0), &k).unwrap();
        for g in 0..125 {
            assert!((d.probability(g) - k.probability(g)).abs() < 1e-15);
        }
    }

    #[test]
    fn uniform_is_stationary() {
        let k = build_kernel(&WalkSpec::p(3, pm(3))).unwrap();
        let d = convolve_step(&GroupDistribution::uniform(27), &k).unwrap();
        assert_eq!(d.tv_distance(), 0.0);
    }

    #[test]
    fn two_steps_of_p_on_z5() {
        let d = exact_distribution(&WalkSpec::p(2, pm(5)), 2, &Limits::default()).unwrap();
        let expect = [0.5, 0.0, 0.25, 0.25, 0.0];
        for (g, e) in expect.iter().enumerate() {
            assert!((d.probability(g as u64) - e).abs() < 1e-15);
        }
    }

    #[test]
    fn k_one_step_is_kernel() {
        let d = exact_distribution(&WalkSpec::k(pm(5)), 1, &Limits::default()).unwrap();
        assert!((d.probability(0)).abs() < 1e-15);
        for g in 1..5 {
            assert!((d.probability(g) - 0.25).abs() < 1e-15);
        }
        let d0 = exact_distribution(&WalkSpec::k(pm(5)), 0, &Limits::default()).unwrap();
        assert!((d0.probability(0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn compressed_and_dense_q_agree() {
        let limits = Limits::default();
        let walk = Walk::new(WalkSpec::q(3, pm(5)), &limits).unwrap();
        assert!(walk.classes().is_some());
        let dense = Walk::from_kernel(walk.kernel().clone(), &limits).unwrap();
        assert!(dense.classes().is_none());
        let (a, b) = (walk.distribution(7), dense.distribution(7));
        for g in 0..125 {
            assert!((a.probability(g) - b.probability(g)).abs() < 1e-15);
        }
        assert!((a.tv_distance() - b.tv_distance()).abs() < 1e-15);
    }

    #[test]
    fn capacity_guard() {
        let limits = Limits {
            max_states: 100,
            ..Limits::default()
        };
        let err = Walk::new(WalkSpec::p(3, pm(5)), &limits).err().unwrap();
        assert!(matches!(err, crate::Error::Capacity { .. }));
        let huge = WalkSpec::p(12, pm(7));
        assert!(matches!(
            Walk::new(huge, &Limits::default()),
            Err(crate::Error::Capacity { .. })
        ));
    }

    #[test]
    fn mixing_time_boundaries() {
        let spec = WalkSpec::k(pm(5));
        let limits = Limits::default();
        // TV(0) = 0.8, so any eps above it is met immediately
        assert_eq!(mixing_time(&spec, 0.9, &limits).unwrap(), 0);
        assert!(mixing_time(&spec, 0.79, &limits).unwrap() > 0);
        assert!(mixing_time(&spec, 0.0, &limits).is_err());
        assert!(mixing_time(&spec, 1.0, &limits).is_err());
    }
}
