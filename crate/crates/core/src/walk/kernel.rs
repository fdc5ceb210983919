use std::collections::BTreeMap;
use std::fmt;

use crate::error::{usage, Result};
use crate::group::{PrimeModulus, UniTriMatrix};
use crate::superclass::conjugacy_class_elements;

use super::space::StateSpace;

/// `⌊√p⌋` when odd, otherwise `⌊√p⌋ + 1`.
pub fn closest_odd_sqrt(p: PrimeModulus) -> u32 {
    let r = p.get().isqrt();
    if r % 2 == 1 {
        r
    } else {
        r + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WalkKind {
    /// Uniform on the `2(n-1)` generators `I ± E(i, i+1)`.
    P,
    /// Uniform over the classes `C_i(±1)` and `C_i(±a)`.
    Q,
    /// `±1, ±a` on `Z/pZ`.
    K,
    /// `±e_i, ±a·e_i` on `(Z/pZ)^N`.
    ProductQ,
}

impl fmt::Display for WalkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WalkKind::P => "P",
            WalkKind::Q => "Q",
            WalkKind::K => "K",
            WalkKind::ProductQ => "productQ",
        })
    }
}

impl std::str::FromStr for WalkKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "P" | "p" => Ok(WalkKind::P),
            "Q" | "q" => Ok(WalkKind::Q),
            "K" | "k" => Ok(WalkKind::K),
            "productQ" | "productq" | "ProductQ" => Ok(WalkKind::ProductQ),
            _ => usage(format!("unknown walk {s:?}; expected P, Q, K or productQ")),
        }
    }
}

/// Which kernel to build. `dim` is `n` for `P`/`Q`, `N` for `ProductQ`, and 1
/// for `K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WalkSpec {
    pub kind: WalkKind,
    pub dim: usize,
    pub p: PrimeModulus,
}

impl WalkSpec {
    pub fn p(n: usize, p: PrimeModulus) -> Self {
        Self { kind: WalkKind::P, dim: n, p }
    }

    pub fn q(n: usize, p: PrimeModulus) -> Self {
        Self { kind: WalkKind::Q, dim: n, p }
    }

    pub fn k(p: PrimeModulus) -> Self {
        Self { kind: WalkKind::K, dim: 1, p }
    }

    pub fn product_q(big_n: usize, p: PrimeModulus) -> Self {
        Self {
            kind: WalkKind::ProductQ,
            dim: big_n,
            p,
        }
    }

    pub fn a(&self) -> u32 {
        closest_odd_sqrt(self.p)
    }

    pub fn space(&self) -> StateSpace {
        match self.kind {
            WalkKind::P | WalkKind::Q => StateSpace::Unitri { n: self.dim, p: self.p },
            WalkKind::K => StateSpace::Torus { dim: 1, p: self.p },
            WalkKind::ProductQ => StateSpace::Torus { dim: self.dim, p: self.p },
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match self.kind {
            WalkKind::P | WalkKind::Q if self.dim < 2 => {
                usage(format!("walk {} needs n >= 2, got {}", self.kind, self.dim))
            }
            WalkKind::ProductQ if self.dim < 1 => usage("productQ needs N >= 1"),
            WalkKind::K if self.dim != 1 => usage("walk K lives on Z/pZ (dim 1)"),
            _ => Ok(()),
        }
    }
}

/// A symmetric probability measure on a [`StateSpace`], stored as integer
/// weights over a common denominator so the mass is exactly 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkKernel {
    space: StateSpace,
    support: Vec<(u64, u64)>,
    denom: u64,
}

impl WalkKernel {
    pub(crate) fn from_weights(space: StateSpace, weights: BTreeMap<u64, u64>) -> Self {
        let denom = weights.values().sum();
        Self {
            space,
            support: weights.into_iter().filter(|&(_, w)| w > 0).collect(),
            denom,
        }
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    /// `(state index, weight)` pairs sorted by index; probabilities are
    /// `weight / denominator`.
    pub fn support(&self) -> &[(u64, u64)] {
        &self.support
    }

    pub fn denominator(&self) -> u64 {
        self.denom
    }

    pub fn weight(&self, idx: u64) -> u64 {
        self.support
            .binary_search_by_key(&idx, |&(g, _)| g)
            .map_or(0, |k| self.support[k].1)
    }

    pub fn probability(&self, idx: u64) -> f64 {
        self.weight(idx) as f64 / self.denom as f64
    }

    pub fn is_symmetric(&self) -> bool {
        self.support
            .iter()
            .all(|&(g, w)| self.weight(self.space.inv(g)) == w)
    }
}

pub fn build_kernel(spec: &WalkSpec) -> Result<WalkKernel> {
    spec.validate()?;
    let p = spec.p;
    let a = spec.a() as i64;
    let space = spec.space();
    let mut weights: BTreeMap<u64, u64> = BTreeMap::new();
    match spec.kind {
        WalkKind::P => {
            let n = spec.dim;
            for i in 1..n {
                for x in [1, -1] {
                    let g = UniTriMatrix::elementary(n, p, i, i + 1, x)?;
                    *weights.entry(g.encode_index()).or_default() += 1;
                }
            }
        }
        WalkKind::Q => {
            let n = spec.dim;
            for i in 1..n {
                // coinciding classes (a = 1) accumulate weight
                for x in [1, -1, a, -a] {
                    for g in conjugacy_class_elements(i, p.reduce(x), n, p)? {
                        *weights.entry(g.encode_index()).or_default() += 1;
                    }
                }
            }
        }
        WalkKind::K | WalkKind::ProductQ => {
            for k in 0..spec.dim {
                for x in [1, -1, a, -a] {
                    let mut digits = vec![0u32; spec.dim];
                    digits[k] = p.reduce(x);
                    *weights.entry(space.index_of(&digits)).or_default() += 1;
                }
            }
        }
    }
    Ok(WalkKernel::from_weights(space, weights))
}
