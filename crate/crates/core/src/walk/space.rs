//! State spaces indexed densely, and precomputed right-multiplication tables.

use crate::error::{Error, Result};
use crate::group::{strict_len, GeneratorStep, PrimeModulus, UniTriMatrix};
use crate::limits::Limits;

/// The group a walk runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateSpace {
    /// `U_n(Z/pZ)`, indexed by [`UniTriMatrix::encode_index`].
    Unitri { n: usize, p: PrimeModulus },
    /// `(Z/pZ)^dim`, coordinate `k` as base-p digit `k`.
    Torus { dim: usize, p: PrimeModulus },
}

impl StateSpace {
    pub fn modulus(&self) -> PrimeModulus {
        match *self {
            StateSpace::Unitri { p, .. } | StateSpace::Torus { p, .. } => p,
        }
    }

    /// Number of base-p digits in a state index.
    pub fn digits(&self) -> usize {
        match *self {
            StateSpace::Unitri { n, .. } => strict_len(n),
            StateSpace::Torus { dim, .. } => dim,
        }
    }

    /// Group order, or `None` on `u64` overflow.
    pub fn order(&self) -> Option<u64> {
        (self.modulus().get() as u64).checked_pow(self.digits() as u32)
    }

    pub(crate) fn checked_order(&self, limits: &Limits) -> Result<u64> {
        let order = self.order().ok_or(Error::Capacity {
            what: "state space",
            requested: u128::MAX,
            limit: limits.max_states as u128,
        })?;
        Limits::check("state space", order as u128, limits.max_states)?;
        Ok(order)
    }

    /// Digit blocks `(offset, width)` such that right multiplication by any
    /// fixed element maps each block of the product from the same block of
    /// the left factor alone. For `U_n` these are the matrix rows.
    pub(crate) fn blocks(&self) -> Vec<(usize, usize)> {
        match *self {
            StateSpace::Unitri { n, .. } => {
                let mut offset = 0;
                (1..n)
                    .map(|i| {
                        let width = n - i;
                        let b = (offset, width);
                        offset += width;
                        b
                    })
                    .collect()
            }
            StateSpace::Torus { dim, .. } => (0..dim).map(|k| (k, 1)).collect(),
        }
    }

    pub fn digits_of(&self, idx: u64) -> Vec<u32> {
        let p = self.modulus().get() as u64;
        let mut rest = idx;
        (0..self.digits())
            .map(|_| {
                let d = (rest % p) as u32;
                rest /= p;
                d
            })
            .collect()
    }

    pub fn index_of(&self, digits: &[u32]) -> u64 {
        let p = self.modulus().get() as u64;
        digits.iter().rev().fold(0u64, |acc, &d| acc * p + d as u64)
    }

    pub fn matrix(&self, idx: u64) -> Option<UniTriMatrix> {
        match *self {
            StateSpace::Unitri { n, p } => UniTriMatrix::decode_index(idx, n, p).ok(),
            StateSpace::Torus { .. } => None,
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        match *self {
            StateSpace::Unitri { n, p } => {
                let x = UniTriMatrix::decode_index(a, n, p).expect("index in range");
                let y = UniTriMatrix::decode_index(b, n, p).expect("index in range");
                x.mul_unchecked(&y).encode_index()
            }
            StateSpace::Torus { p, .. } => {
                let (x, y) = (self.digits_of(a), self.digits_of(b));
                let sum: Vec<u32> = x.iter().zip(&y).map(|(&u, &v)| p.add(u, v)).collect();
                self.index_of(&sum)
            }
        }
    }

    pub fn inv(&self, a: u64) -> u64 {
        match *self {
            StateSpace::Unitri { n, p } => UniTriMatrix::decode_index(a, n, p)
                .expect("index in range")
                .inverse()
                .encode_index(),
            StateSpace::Torus { p, .. } => {
                let neg: Vec<u32> = self.digits_of(a).into_iter().map(|d| p.neg(d)).collect();
                self.index_of(&neg)
            }
        }
    }
}

struct Block {
    stride: u64,
    radix: u64,
    /// `table[code * count + s]` is the contribution of this block of
    /// `y · elements[s]` when this block of `y` has digit code `code`.
    table: Vec<u64>,
}

/// Lookup tables for `y ↦ y · g` over a fixed list of elements `g`.
pub(crate) struct RightMulTable {
    count: usize,
    blocks: Vec<Block>,
}

impl RightMulTable {
    pub(crate) fn new(space: &StateSpace, elements: &[u64]) -> Self {
        let p = space.modulus().get() as u64;
        let digits = space.digits();
        let count = elements.len();
        let blocks = space
            .blocks()
            .into_iter()
            .map(|(offset, width)| {
                let radix = p.pow(width as u32);
                let stride = p.pow(offset as u32);
                let mut table = vec![0u64; radix as usize * count];
                let mut y_digits = vec![0u32; digits];
                for code in 0..radix {
                    let mut rest = code;
                    for d in &mut y_digits[offset..offset + width] {
                        *d = (rest % p) as u32;
                        rest /= p;
                    }
                    let y = space.index_of(&y_digits);
                    for (s, &g) in elements.iter().enumerate() {
                        let prod = space.mul(y, g);
                        let new_code = (prod / stride) % radix;
                        table[code as usize * count + s] = new_code * stride;
                    }
                }
                Block { stride, radix, table }
            })
            .collect();
        Self { count, blocks }
    }

    /// Per-block row offsets into the tables for the state `y`.
    #[inline]
    pub(crate) fn rows(&self, y: u64, out: &mut Vec<usize>) {
        out.clear();
        out.extend(
            self.blocks
                .iter()
                .map(|b| ((y / b.stride) % b.radix) as usize * self.count),
        );
    }

    /// Index of `y · elements[s]`, given `rows(y)`.
    #[inline]
    pub(crate) fn apply(&self, rows: &[usize], s: usize) -> u64 {
        self.blocks
            .iter()
            .zip(rows)
            .map(|(b, &r)| b.table[r + s])
            .sum()
    }
}

/// Conjugacy classes of `U_n`, found as orbits of conjugation by the
/// generators `I + E(i, i+1)` (which generate the group).
#[derive(Debug)]
pub struct ClassPartition {
    class_of: Vec<u32>,
    reps: Vec<u64>,
    sizes: Vec<u64>,
}

impl ClassPartition {
    pub(crate) fn conjugacy(n: usize, p: PrimeModulus, order: u64) -> Self {
        let len = order as usize;
        let mut parent: Vec<u32> = (0..len as u32).collect();
        fn find(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                let up = parent[parent[x as usize] as usize];
                parent[x as usize] = up;
                x = up;
            }
            x
        }
        let gens: Vec<(UniTriMatrix, UniTriMatrix)> = (1..n)
            .map(|i| {
                let s = GeneratorStep::plus(i).matrix(n, p).expect("valid generator");
                let si = s.inverse();
                (s, si)
            })
            .collect();
        for y in 0..order {
            let m = UniTriMatrix::decode_index(y, n, p).expect("index in range");
            for (s, si) in &gens {
                let c = si.mul_unchecked(&m).mul_unchecked(s).encode_index();
                let (a, b) = (find(&mut parent, y as u32), find(&mut parent, c as u32));
                if a != b {
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    parent[hi as usize] = lo;
                }
            }
        }
        let mut class_of = vec![u32::MAX; len];
        let mut reps = Vec::new();
        let mut sizes = Vec::new();
        for y in 0..len {
            let root = find(&mut parent, y as u32) as usize;
            if class_of[root] == u32::MAX {
                class_of[root] = reps.len() as u32;
                reps.push(root as u64);
                sizes.push(0);
            }
            let c = class_of[root];
            class_of[y] = c;
            sizes[c as usize] += 1;
        }
        Self {
            class_of,
            reps,
            sizes,
        }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    #[inline]
    pub fn class_of(&self, idx: u64) -> usize {
        self.class_of[idx as usize] as usize
    }

    pub fn representative(&self, class: usize) -> u64 {
        self.reps[class]
    }

    pub fn size(&self, class: usize) -> u64 {
        self.sizes[class]
    }
}
