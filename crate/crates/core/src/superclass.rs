//! Conjugacy classes of superdiagonal elements, super-class labels `(D, φ)`
//! and the canonical form of the two-sided action of `G × G` on `g - I`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{usage, Result};
use crate::group::{group_order, position, positions, strict_len, PrimeModulus, UniTriMatrix};
use crate::limits::Limits;

/// All elements of the conjugacy class of `I + x·E(i, i+1)`.
///
/// Such an element has `x` at `(i, i+1)`, free entries `a_1..a_{i-1}` above
/// it in column `i+1`, free entries `b_1..b_{n-i-1}` to its right in row `i`,
/// and `x⁻¹ a_j b_k` at `(j, i+1+k)`. Elements are listed with `a_1` varying
/// fastest, then the `b`s.
pub fn conjugacy_class_elements(i: usize, x: u32, n: usize, p: PrimeModulus) -> Result<Vec<UniTriMatrix>> {
    check_row(i, n)?;
    let x = x % p.get();
    let Some(x_inv) = p.inv(x) else {
        return usage("class parameter x must be nonzero");
    };
    let free = n - 2;
    let q = p.get() as u64;
    let count = q.pow(free as u32);
    let mut out = Vec::with_capacity(count as usize);
    let mut params = vec![0u32; free];
    for code in 0..count {
        let mut rest = code;
        for v in params.iter_mut() {
            *v = (rest % q) as u32;
            rest /= q;
        }
        let (a, b) = params.split_at(i - 1);
        out.push(class_element(i, x, x_inv, a, b, n, p));
    }
    Ok(out)
}

fn check_row(i: usize, n: usize) -> Result<()> {
    if n < 2 || i == 0 || i >= n {
        return usage(format!("row {i} out of range 1..{} for n = {n}", n.saturating_sub(1)));
    }
    Ok(())
}

fn class_element(i: usize, x: u32, x_inv: u32, a: &[u32], b: &[u32], n: usize, p: PrimeModulus) -> UniTriMatrix {
    let mut m = UniTriMatrix::from_entries(n, p, vec![0; strict_len(n)]);
    m.set(i, i + 1, x);
    for (j, &aj) in a.iter().enumerate() {
        m.set(j + 1, i + 1, aj);
        for (k, &bk) in b.iter().enumerate() {
            m.set(j + 1, i + 2 + k, p.mul(x_inv, p.mul(aj, bk)));
        }
    }
    for (k, &bk) in b.iter().enumerate() {
        m.set(i, i + 2 + k, bk);
    }
    m
}

/// The free parameters `(a, b)` of `m` as an element of the conjugacy class
/// of `I + x·E(i, i+1)`, or `None` when `m` is not in that class.
pub fn class_parameters(m: &UniTriMatrix, i: usize, x: u32) -> Option<(Vec<u32>, Vec<u32>)> {
    let (n, p) = (m.dim(), m.modulus());
    check_row(i, n).ok()?;
    let x = x % p.get();
    let x_inv = p.inv(x)?;
    if m.get(i, i + 1) != x {
        return None;
    }
    let a: Vec<u32> = (1..i).map(|j| m.get(j, i + 1)).collect();
    let b: Vec<u32> = (i + 2..=n).map(|c| m.get(i, c)).collect();
    (class_element(i, x, x_inv, &a, &b, n, p) == *m).then_some((a, b))
}

/// `I + g·(m - I)·h`: the two-sided action on the additive part of `m`.
pub fn two_sided_action(g: &UniTriMatrix, m: &UniTriMatrix, h: &UniTriMatrix) -> Result<UniTriMatrix> {
    g.mul(m)?;
    m.mul(h)?;
    let (n, p) = (m.dim(), m.modulus());
    let q = p.get() as u64;
    // (gN)[r][c] = Σ_{r ≤ k < c} g[r][k] N[k][c]
    let mut gn = vec![0u32; strict_len(n)];
    for (r, c) in positions(n) {
        let acc: u64 = (r..c).map(|k| g.get(r, k) as u64 * m.get(k, c) as u64).sum();
        gn[position(n, r, c)] = (acc % q) as u32;
    }
    let gn_at = |r: usize, c: usize| if r < c { gn[position(n, r, c)] } else { 0 };
    let entries = positions(n)
        .map(|(r, c)| {
            let acc: u64 = (r + 1..=c).map(|k| gn_at(r, k) as u64 * h.get(k, c) as u64).sum();
            (acc % q) as u32
        })
        .collect();
    Ok(UniTriMatrix::from_entries(n, p, entries))
}

/// A super-class label: a non-attacking set `D` of strictly-upper positions
/// with a nonzero residue `φ` on each. Labels order by `D`, then by `φ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SuperClassLabel {
    n: usize,
    p: PrimeModulus,
    /// `((row, col), φ)` sorted by position.
    cells: Vec<((usize, usize), u32)>,
}

/// Statistics of a label's shape `D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassStatistics {
    /// `Σ (c - r - 1)` over boxes.
    pub d: u32,
    /// Pairs of boxes `(r, c), (r', c')` with `r < r' < c < c'`.
    pub i_stat: u32,
    /// `log_p` of the super-class size.
    pub size_exponent: u32,
}

impl SuperClassLabel {
    pub fn new(n: usize, p: PrimeModulus, cells: impl IntoIterator<Item = ((usize, usize), u32)>) -> Result<Self> {
        let mut cells: Vec<_> = cells.into_iter().collect();
        cells.sort_unstable();
        for (k, &((r, c), v)) in cells.iter().enumerate() {
            if !(1 <= r && r < c && c <= n) {
                return usage(format!("({r},{c}) is not strictly upper for n = {n}"));
            }
            if v == 0 || v >= p.get() {
                return usage(format!("φ({r},{c}) = {v} is not a nonzero residue mod {p}"));
            }
            if cells[..k].iter().any(|&((r2, c2), _)| r2 == r || c2 == c) {
                return usage(format!("({r},{c}) attacks another box"));
            }
        }
        Ok(Self { n, p, cells })
    }

    pub fn empty(n: usize, p: PrimeModulus) -> Self {
        Self { n, p, cells: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[((usize, usize), u32)] {
        &self.cells
    }

    pub fn shape(&self) -> Vec<(usize, usize)> {
        self.cells.iter().map(|&(rc, _)| rc).collect()
    }

    pub fn phi(&self, r: usize, c: usize) -> Option<u32> {
        self.cells.iter().find(|&&(rc, _)| rc == (r, c)).map(|&(_, v)| v)
    }

    pub fn statistics(&self) -> ClassStatistics {
        shape_statistics(self.n, &self.shape())
    }

    /// `I + Σ_{(r,c) ∈ D} φ(r,c)·E(r,c)`.
    pub fn representative(&self) -> UniTriMatrix {
        let mut m = UniTriMatrix::from_entries(self.n, self.p, vec![0; strict_len(self.n)]);
        for &((r, c), v) in &self.cells {
            m.set(r, c, v);
        }
        m
    }
}

impl Ord for SuperClassLabel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let key = |l: &Self| (l.n, l.p, l.shape());
        key(self)
            .cmp(&key(other))
            .then_with(|| self.cells.iter().map(|c| c.1).cmp(other.cells.iter().map(|c| c.1)))
    }
}

impl PartialOrd for SuperClassLabel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SuperClassLabel {
    /// `(1,2)=1;(2,4)=3`, or `empty`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cells.is_empty() {
            return f.write_str("empty");
        }
        for (k, ((r, c), v)) in self.cells.iter().enumerate() {
            if k > 0 {
                f.write_str(";")?;
            }
            write!(f, "({r},{c})={v}")?;
        }
        Ok(())
    }
}

pub fn d_statistic(label: &SuperClassLabel) -> u32 {
    label.statistics().d
}

pub fn i_statistic(label: &SuperClassLabel) -> u32 {
    label.statistics().i_stat
}

pub fn shape_statistics(n: usize, shape: &[(usize, usize)]) -> ClassStatistics {
    let d = shape.iter().map(|&(r, c)| (c - r - 1) as u32).sum();
    let mut i_stat = 0;
    let mut below_right = 0;
    for &(r, c) in shape {
        for &(r2, c2) in shape {
            if r < r2 && r2 < c && c < c2 {
                i_stat += 1;
            }
            if r < r2 && c < c2 {
                below_right += 1;
            }
        }
    }
    // arm (right in the row) plus leg (up the column), less the cells shared
    let hooks: u32 = shape.iter().map(|&(r, c)| ((n - c) + (r - 1)) as u32).sum();
    ClassStatistics {
        d,
        i_stat,
        size_exponent: hooks - below_right,
    }
}

/// Every non-attacking set of strictly-upper positions, each sorted, the
/// whole list in lexicographic order (so `∅` first).
pub fn enumerate_shapes(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn grow(
        cells: &[(usize, usize)],
        from: usize,
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        out.push(current.clone());
        for k in from..cells.len() {
            let (r, c) = cells[k];
            if current.iter().any(|&(r2, c2)| r2 == r || c2 == c) {
                continue;
            }
            current.push((r, c));
            grow(cells, k + 1, current, out);
            current.pop();
        }
    }
    let cells: Vec<_> = positions(n).collect();
    let mut out = Vec::new();
    grow(&cells, 0, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Number of labels, `Σ_D (p-1)^{|D|}`.
pub fn label_count(n: usize, p: PrimeModulus) -> u128 {
    enumerate_shapes(n)
        .iter()
        .map(|d| (p.get() as u128 - 1).pow(d.len() as u32))
        .sum()
}

/// Labels in lexicographic order of `D`, then of `φ` read box by box.
pub fn enumerate_labels(n: usize, p: PrimeModulus) -> impl Iterator<Item = SuperClassLabel> {
    enumerate_shapes(n).into_iter().flat_map(move |shape| {
        let q = p.get() as u64 - 1;
        let total = q.pow(shape.len() as u32);
        (0..total).map(move |code| {
            // first box is the most significant digit
            let mut rest = code;
            let mut values = vec![0u32; shape.len()];
            for v in values.iter_mut().rev() {
                *v = (rest % q) as u32 + 1;
                rest /= q;
            }
            SuperClassLabel {
                n,
                p,
                cells: shape.iter().copied().zip(values).collect(),
            }
        })
    })
}

/// Enumerates labels after checking their number against the budget.
pub fn enumerate_labels_checked(
    n: usize,
    p: PrimeModulus,
    limits: &Limits,
) -> Result<impl Iterator<Item = SuperClassLabel>> {
    if n < 2 {
        return usage(format!("dimension {n} is below 2"));
    }
    Limits::check("super-class labels", label_count(n, p), limits.max_labels)?;
    Ok(enumerate_labels(n, p))
}

/// `Σ_{(D,φ)} p^{2d(D) - i(D)}`, exactly.
///
/// Terms are aggregated per shape; if some exponent were negative the sum is
/// carried with a common power of `p` and divided out at the end.
pub fn degree_identity_sum(n: usize, p: PrimeModulus) -> BigUint {
    let shapes = enumerate_shapes(n);
    let exps: Vec<i64> = shapes
        .iter()
        .map(|d| {
            let s = shape_statistics(n, d);
            2 * s.d as i64 - s.i_stat as i64
        })
        .collect();
    let shift = exps.iter().map(|&e| (-e).max(0)).max().unwrap_or(0) as u32;
    let pb = BigUint::from(p.get());
    let mut total = BigUint::zero();
    for (d, &e) in shapes.iter().zip(&exps) {
        let mult = BigUint::from(p.get() - 1).pow(d.len() as u32);
        total += mult * pb.pow((e + shift as i64) as u32);
    }
    let scale = pb.pow(shift);
    if scale.is_one() {
        total
    } else {
        total / scale
    }
}

/// Canonical label of the two-sided orbit of `m - I`.
///
/// Columns are scanned left to right. In each column the bottom-most nonzero
/// entry becomes a pivot; the column above it is cleared with row operations
/// (left multiplication) and its row to the right with column operations
/// (right multiplication). A cleared pivot row stays zero, so one pass leaves
/// at most one nonzero entry per row and column.
pub fn canonical_form(m: &UniTriMatrix) -> SuperClassLabel {
    let (n, p) = (m.dim(), m.modulus());
    let mut a = m.entries().to_vec();
    let at = |r: usize, c: usize| position(n, r, c);
    let mut cells = Vec::new();
    for c in 2..=n {
        let Some(r) = (1..c).rev().find(|&r| a[at(r, c)] != 0) else {
            continue;
        };
        let v = a[at(r, c)];
        let v_inv = p.inv(v).expect("nonzero pivot");
        for r2 in 1..r {
            let f = p.mul(a[at(r2, c)], v_inv);
            if f == 0 {
                continue;
            }
            // row r2 -= f·row r; row r is zero left of column c
            for k in c..=n {
                let x = a[at(r, k)];
                if x != 0 {
                    a[at(r2, k)] = p.sub(a[at(r2, k)], p.mul(f, x));
                }
            }
        }
        for c2 in c + 1..=n {
            let f = p.mul(a[at(r, c2)], v_inv);
            if f == 0 {
                continue;
            }
            // col c2 -= f·col c; col c is now just the pivot
            a[at(r, c2)] = 0;
        }
        cells.push(((r, c), v));
    }
    cells.sort_unstable();
    SuperClassLabel { n, p, cells }
}

/// Groups every element of `G` by its canonical label.
pub fn superclass_partition(
    n: usize,
    p: PrimeModulus,
    limits: &Limits,
) -> Result<BTreeMap<SuperClassLabel, Vec<u64>>> {
    let order = group_order(n, p).unwrap_or(u64::MAX);
    Limits::check("state space", order as u128, limits.max_states)?;
    let mut out: BTreeMap<SuperClassLabel, Vec<u64>> = BTreeMap::new();
    for k in 0..order {
        let m = UniTriMatrix::decode_index(k, n, p)?;
        out.entry(canonical_form(&m)).or_default().push(k);
    }
    Ok(out)
}
