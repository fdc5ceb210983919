//! Exact arithmetic in the group of unipotent upper-triangular matrices over
//! Z/pZ, its superdiagonal generators, and the canonical state index.
//!
//! Positions are 1-based `(i, j)` with `i < j`, matching the usual matrix
//! notation. Strictly-upper entries are stored row-major:
//! `(1,2), (1,3), …, (1,n), (2,3), …, (n-1,n)`. The same order, read as base-p
//! digits with the least significant digit first, is the state index used by
//! every dense distribution in this crate.

use std::fmt;
use std::str::FromStr;

use crate::error::{usage, Error, Result};

/// An odd prime modulus small enough that products of two residues fit in `u64`
/// with room to spare.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeModulus(u32);

impl PrimeModulus {
    pub const MAX: u32 = 1 << 15;

    pub fn new(p: u32) -> Result<Self> {
        if p < 3 || p.is_multiple_of(2) {
            return usage(format!("modulus {p} is not an odd prime"));
        }
        if p >= Self::MAX {
            return usage(format!("modulus {p} exceeds {}", Self::MAX));
        }
        let mut d = 3;
        while d * d <= p {
            if p.is_multiple_of(d) {
                return usage(format!("modulus {p} is not prime ({d} divides it)"));
            }
            d += 2;
        }
        Ok(Self(p))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.0 as i64) as u32
    }

    #[inline]
    pub fn add(self, x: u32, y: u32) -> u32 {
        ((x as u64 + y as u64) % self.0 as u64) as u32
    }

    #[inline]
    pub fn sub(self, x: u32, y: u32) -> u32 {
        ((x as u64 + self.0 as u64 - (y % self.0) as u64) % self.0 as u64) as u32
    }

    #[inline]
    pub fn mul(self, x: u32, y: u32) -> u32 {
        ((x as u64 * y as u64) % self.0 as u64) as u32
    }

    #[inline]
    pub fn neg(self, x: u32) -> u32 {
        self.sub(0, x)
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(self, x: u32) -> Option<u32> {
        let (mut r0, mut r1) = (self.0 as i64, (x % self.0) as i64);
        let (mut s0, mut s1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        (r0 == 1).then(|| self.reduce(s0))
    }

    pub fn div(self, x: u32, y: u32) -> Option<u32> {
        self.inv(y).map(|yi| self.mul(x, yi))
    }

    /// The representative of `x` in `(-p/2, p/2)`.
    pub fn centered(self, x: u32) -> i64 {
        let x = (x % self.0) as i64;
        if 2 * x > self.0 as i64 {
            x - self.0 as i64
        } else {
            x
        }
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Number of strictly-upper positions of an `n × n` matrix.
#[inline]
pub fn strict_len(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Storage offset of the 1-based position `(i, j)`, `i < j`.
#[inline]
pub fn position(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(1 <= i && i < j && j <= n);
    (i - 1) * n - (i - 1) * i / 2 + (j - i - 1)
}

/// All strictly-upper positions in storage order.
pub fn positions(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..n).flat_map(move |i| (i + 1..=n).map(move |j| (i, j)))
}

/// `p^(n(n-1)/2)`, or `None` when it does not fit in a `u64`.
pub fn group_order(n: usize, p: PrimeModulus) -> Option<u64> {
    (p.get() as u64).checked_pow(strict_len(n) as u32)
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return usage(format!("dimension {n} is below 2"));
    }
    Ok(())
}

/// An element of the unipotent upper-triangular group `U_n(Z/pZ)`.
///
/// Only the strictly-upper entries are stored; they are always reduced.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UniTriMatrix {
    n: usize,
    p: PrimeModulus,
    entries: Vec<u32>,
}

impl UniTriMatrix {
    pub fn identity(n: usize, p: PrimeModulus) -> Result<Self> {
        check_dim(n)?;
        Ok(Self {
            n,
            p,
            entries: vec![0; strict_len(n)],
        })
    }

    /// Builds a matrix whose `(i, j)` entry is `f(i, j)` reduced mod p.
    pub fn from_fn(n: usize, p: PrimeModulus, mut f: impl FnMut(usize, usize) -> i64) -> Result<Self> {
        check_dim(n)?;
        let entries = positions(n).map(|(i, j)| p.reduce(f(i, j))).collect();
        Ok(Self { n, p, entries })
    }

    /// `I + x·E(i, j)`.
    pub fn elementary(n: usize, p: PrimeModulus, i: usize, j: usize, x: i64) -> Result<Self> {
        check_dim(n)?;
        if !(1 <= i && i < j && j <= n) {
            return usage(format!("({i},{j}) is not a strictly-upper position for n = {n}"));
        }
        let mut m = Self::identity(n, p)?;
        m.entries[position(n, i, j)] = p.reduce(x);
        Ok(m)
    }

    pub(crate) fn from_entries(n: usize, p: PrimeModulus, entries: Vec<u32>) -> Self {
        debug_assert_eq!(entries.len(), strict_len(n));
        Self { n, p, entries }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    /// Strictly-upper entries in storage order.
    #[inline]
    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// Full-matrix entry at the 1-based `(i, j)`: 1 on the diagonal, 0 below.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.entries[position(self.n, i, j)],
            std::cmp::Ordering::Equal => 1,
            std::cmp::Ordering::Greater => 0,
        }
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, x: u32) {
        self.entries[position(self.n, i, j)] = x % self.p.get();
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return usage(format!("dimension mismatch: {} vs {}", self.n, other.n));
        }
        if self.p != other.p {
            return usage(format!("modulus mismatch: {} vs {}", self.p, other.p));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let (n, p) = (self.n, self.p.get() as u64);
        let mut entries = Vec::with_capacity(self.entries.len());
        for i in 1..n {
            for j in i + 1..=n {
                let mut acc = self.get(i, j) as u64 + other.get(i, j) as u64;
                for k in i + 1..j {
                    acc += self.get(i, k) as u64 * other.get(k, j) as u64;
                }
                entries.push((acc % p) as u32);
            }
        }
        Self::from_entries(n, self.p, entries)
    }

    /// The group inverse, by back substitution on `A·X = I`.
    pub fn inverse(&self) -> Self {
        let (n, p) = (self.n, self.p);
        let mut inv = Self::from_entries(n, p, vec![0; self.entries.len()]);
        for j in 2..=n {
            for i in (1..j).rev() {
                // X[i][j] = -(A[i][j] + Σ_{i<k<j} A[i][k] X[k][j])
                let mut acc = self.get(i, j) as u64;
                for k in i + 1..j {
                    acc += self.get(i, k) as u64 * inv.get(k, j) as u64;
                }
                inv.set(i, j, p.neg((acc % p.get() as u64) as u32));
            }
        }
        inv
    }

    /// `self⁻¹ · other⁻¹ · self · other`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self
            .inverse()
            .mul_unchecked(&other.inverse())
            .mul_unchecked(self)
            .mul_unchecked(other))
    }

    /// Right multiplication by the generator `I + sign·E(i, i+1)`: adds
    /// `sign` times column `i` to column `i + 1`.
    pub(crate) fn mul_generator(&mut self, step: GeneratorStep) {
        let (n, p) = (self.n, self.p);
        let i = step.row;
        debug_assert!(i >= 1 && i < n);
        for r in 1..=i {
            let add = self.get(r, i);
            if add == 0 {
                continue;
            }
            let pos = position(n, r, i + 1);
            self.entries[pos] = match step.sign {
                Sign::Plus => p.add(self.entries[pos], add),
                Sign::Minus => p.sub(self.entries[pos], add),
            };
        }
    }

    /// Canonical state index: entries in storage order as base-p digits,
    /// least significant first.
    pub fn encode_index(&self) -> u64 {
        let p = self.p.get() as u64;
        self.entries.iter().rev().fold(0u64, |acc, &d| acc * p + d as u64)
    }

    pub fn decode_index(k: u64, n: usize, p: PrimeModulus) -> Result<Self> {
        check_dim(n)?;
        let order = group_order(n, p);
        if order.is_some_and(|order| k >= order) {
            return usage(format!("index {k} out of range for n = {n}, p = {p}"));
        }
        let q = p.get() as u64;
        let mut rest = k;
        let entries = (0..strict_len(n))
            .map(|_| {
                let d = (rest % q) as u32;
                rest /= q;
                d
            })
            .collect();
        Ok(Self::from_entries(n, p, entries))
    }
}

impl fmt::Display for UniTriMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.n {
            let row: Vec<String> = (1..=self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Free-function spelling of [`UniTriMatrix::mul`].
pub fn mat_mul(a: &UniTriMatrix, b: &UniTriMatrix) -> Result<UniTriMatrix> {
    a.mul(b)
}

pub fn mat_inv(a: &UniTriMatrix) -> UniTriMatrix {
    a.inverse()
}

pub fn commutator(x: &UniTriMatrix, y: &UniTriMatrix) -> Result<UniTriMatrix> {
    x.commutator(y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// The generator `I + sign·E(row, row+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratorStep {
    pub row: usize,
    pub sign: Sign,
}

impl GeneratorStep {
    pub fn new(row: usize, sign: Sign) -> Self {
        Self { row, sign }
    }

    pub fn plus(row: usize) -> Self {
        Self::new(row, Sign::Plus)
    }

    pub fn minus(row: usize) -> Self {
        Self::new(row, Sign::Minus)
    }

    pub fn inverse(self) -> Self {
        Self::new(self.row, self.sign.flip())
    }

    /// All `2(n-1)` generators, ordered by row then `+` before `-`.
    pub fn all(n: usize) -> Vec<Self> {
        (1..n).flat_map(|i| [Self::plus(i), Self::minus(i)]).collect()
    }

    pub fn matrix(self, n: usize, p: PrimeModulus) -> Result<UniTriMatrix> {
        UniTriMatrix::elementary(n, p, self.row, self.row + 1, self.sign.as_i64())
    }
}

impl fmt::Display for GeneratorStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.sign {
            Sign::Plus => '+',
            Sign::Minus => '-',
        };
        write!(f, "{s}{}", self.row)
    }
}

impl FromStr for GeneratorStep {
    type Err = Error;

    fn from_str(tok: &str) -> Result<Self> {
        let sign = match tok.chars().next() {
            Some('+') => Sign::Plus,
            Some('-') => Sign::Minus,
            _ => return usage(format!("bad generator token {tok:?}")),
        };
        match tok[1..].parse::<usize>() {
            Ok(row) if row >= 1 => Ok(Self::new(row, sign)),
            _ => usage(format!("bad generator token {tok:?}")),
        }
    }
}

/// A word in the generators, evaluated left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GeneratorWord {
    steps: Vec<GeneratorStep>,
}

impl GeneratorWord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_steps(steps: Vec<GeneratorStep>) -> Self {
        Self { steps }
    }

    /// `count` copies of one step.
    pub fn repeat(step: GeneratorStep, count: usize) -> Self {
        Self {
            steps: vec![step; count],
        }
    }

    pub fn steps(&self) -> &[GeneratorStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn parity(&self) -> usize {
        self.steps.len() % 2
    }

    pub fn push(&mut self, step: GeneratorStep) {
        self.steps.push(step);
    }

    pub fn append(&mut self, other: &GeneratorWord) {
        self.steps.extend_from_slice(&other.steps);
    }

    pub fn concat(&self, other: &GeneratorWord) -> Self {
        let mut w = self.clone();
        w.append(other);
        w
    }

    /// Reversed word with every step inverted; evaluates to the inverse.
    pub fn inverse(&self) -> Self {
        Self {
            steps: self.steps.iter().rev().map(|s| s.inverse()).collect(),
        }
    }

    /// `h · self · h⁻¹`.
    pub fn conjugated_by(&self, h: &GeneratorWord) -> Self {
        let mut w = h.clone();
        w.append(self);
        w.append(&h.inverse());
        w
    }

    /// `[x, y] = x⁻¹ y⁻¹ x y` as a word.
    pub fn commutator(x: &GeneratorWord, y: &GeneratorWord) -> Self {
        let mut w = x.inverse();
        w.append(&y.inverse());
        w.append(x);
        w.append(y);
        w
    }

    pub fn eval(&self, n: usize, p: PrimeModulus) -> Result<UniTriMatrix> {
        let mut m = UniTriMatrix::identity(n, p)?;
        for &step in &self.steps {
            if step.row == 0 || step.row >= n {
                return usage(format!("generator row {} out of range for n = {n}", step.row));
            }
            m.mul_generator(step);
        }
        Ok(m)
    }
}

impl FromIterator<GeneratorStep> for GeneratorWord {
    fn from_iter<I: IntoIterator<Item = GeneratorStep>>(iter: I) -> Self {
        Self {
            steps: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, step) in self.steps.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            step.fmt(f)?;
        }
        Ok(())
    }
}

impl FromStr for GeneratorWord {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        line.split_whitespace().map(str::parse).collect()
    }
}

pub fn eval_word(w: &GeneratorWord, n: usize, p: PrimeModulus) -> Result<UniTriMatrix> {
    w.eval(n, p)
}
