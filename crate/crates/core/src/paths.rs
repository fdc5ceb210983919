//! Explicit generator words: second-diagonal entries from commutators, the
//! conjugation ladder `A_i`, and odd-length words for every element of the
//! classes `C_i(±1)` and `C_i(±a)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{usage, Result};
use crate::group::{GeneratorStep, GeneratorWord, PrimeModulus, Sign, UniTriMatrix};
use crate::superclass::class_parameters;
use crate::walk::closest_odd_sqrt;

fn check_row(i: usize, max: usize, what: &str) -> Result<()> {
    if i == 0 || i > max {
        return usage(format!("{what}: row {i} out of range 1..={max}"));
    }
    Ok(())
}

/// `I + c·E(i, i+1)` as `min(c, p-c)` copies of one generator.
pub fn word_superdiag_power(i: usize, c: u32, n: usize, p: PrimeModulus) -> Result<GeneratorWord> {
    check_row(i, n.saturating_sub(1), "superdiagonal power")?;
    let c = c % p.get();
    let back = p.get() - c;
    Ok(if c <= back {
        GeneratorWord::repeat(GeneratorStep::plus(i), c as usize)
    } else {
        GeneratorWord::repeat(GeneratorStep::minus(i), back as usize)
    })
}

/// `[I + u·E(i+1, i+2), I - v·E(i, i+1)] = I + uv·E(i, i+2)`, length `2u + 2v`.
fn commutator_word(i: usize, u: usize, v: usize) -> GeneratorWord {
    let x = GeneratorWord::repeat(GeneratorStep::plus(i + 1), u);
    let y = GeneratorWord::repeat(GeneratorStep::minus(i), v);
    GeneratorWord::commutator(&x, &y)
}

/// `I + b·E(i, i+2)`, with `b` read as an integer in `[0, p)`.
///
/// `s = ⌊√b⌋` gives `s²` from a commutator of length `4s`; the remainder
/// `r = b - s² ≤ 2s` comes from a second commutator of length `2 + 2r`.
pub fn word_second_diag(i: usize, b: u32, n: usize, p: PrimeModulus) -> Result<GeneratorWord> {
    check_row(i, n.saturating_sub(2), "second diagonal")?;
    let b = b % p.get();
    let s = b.isqrt();
    let r = b - s * s;
    let mut w = commutator_word(i, s as usize, s as usize);
    if r > 0 {
        w.append(&commutator_word(i, 1, r as usize));
    }
    Ok(w)
}

/// The shorter of `word_second_diag(c)` and the inverse of
/// `word_second_diag(p - c)`; both evaluate to `I + c·E(i, i+2)`.
fn second_diag_short(i: usize, c: u32, n: usize, p: PrimeModulus) -> Result<GeneratorWord> {
    let c = c % p.get();
    let up = word_second_diag(i, c, n, p)?;
    if c == 0 {
        return Ok(up);
    }
    let down = word_second_diag(i, p.get() - c, n, p)?.inverse();
    Ok(if down.len() < up.len() { down } else { up })
}

/// The ladder `A_i`: the seed `I + sign·k·E(i, i+1)` (as `k` repeated steps)
/// conjugated by `(I + E(1,2))⋯(I + E(i-1,i))`. It evaluates to the matrix
/// with `sign·k` at `(1, i+1), …, (i, i+1)`; its length `2(i-1) + k` is odd
/// for odd `k`.
pub fn word_ai(i: usize, n: usize, sign: Sign, k: u32) -> Result<GeneratorWord> {
    check_row(i, n.saturating_sub(1), "ladder")?;
    let seed = GeneratorWord::repeat(GeneratorStep::new(i, sign), k as usize);
    let h: GeneratorWord = (1..i).map(GeneratorStep::plus).collect();
    Ok(seed.conjugated_by(&h))
}

/// Seed for class parameter `coeff`: `coeff = sign·k` with `k ∈ {1, a}`.
fn seed_for(coeff: i64, p: PrimeModulus) -> Result<(Sign, u32)> {
    let a = closest_odd_sqrt(p) as i64;
    match coeff {
        1 => Ok((Sign::Plus, 1)),
        -1 => Ok((Sign::Minus, 1)),
        c if c == a => Ok((Sign::Plus, a as u32)),
        c if c == -a => Ok((Sign::Minus, a as u32)),
        _ => usage(format!("class coefficient {coeff} is not ±1 or ±{a}")),
    }
}

/// Builds `I + v·w^T` with `v` supported on rows `≤ col0 - 1` and `w` on the
/// columns `col0, col0 + 2, …`, `w[col0] = 1`, as a word acting on the current
/// matrix by conjugations with second-diagonal elements.
struct ChainBuilder<'a> {
    n: usize,
    p: PrimeModulus,
    word: &'a mut GeneratorWord,
}

impl ChainBuilder<'_> {
    /// Conjugates by `I + c·E(j, j+2)`.
    fn conjugate(&mut self, j: usize, c: u32) -> Result<()> {
        if c.is_multiple_of(self.p.get()) {
            return Ok(());
        }
        let h = second_diag_short(j, c, self.n, self.p)?;
        *self.word = self.word.conjugated_by(&h);
        Ok(())
    }

    /// Sets `w` on columns `col0 + 2, col0 + 4, …` to `targets`, given
    /// `w[col0] = 1` and zeros beyond. Conjugation by `I + c·E(m-2, m)`
    /// subtracts `c·w[m-2]` from `w[m]`.
    fn fill(&mut self, col0: usize, targets: &[u32]) -> Result<()> {
        let p = self.p;
        let mut current = vec![1u32];
        for (k, &t) in targets.iter().enumerate() {
            let m = col0 + 2 * (k + 1);
            // zero targets hold 1 until the chain has moved past them
            let later_nonzero = targets[k + 1..].iter().any(|&x| x != 0);
            let want = if t == 0 && later_nonzero { 1 } else { t };
            let prev = current[k];
            if want != 0 {
                let c = p.neg(p.div(want, prev).expect("nonzero link"));
                self.conjugate(m - 2, c)?;
            }
            current.push(want);
        }
        for (k, &t) in targets.iter().enumerate().rev() {
            if current[k + 1] != t {
                let m = col0 + 2 * (k + 1);
                let c = p.div(p.sub(current[k + 1], t), current[k]).expect("nonzero link");
                self.conjugate(m - 2, c)?;
                current[k + 1] = t;
            }
        }
        Ok(())
    }
}

/// An odd-length word for `b ∈ C_i(coeff)`, `coeff ∈ {±1, ±a}`.
///
/// `b = I + u·w^T` with `u` on rows `≤ i` and `w` on columns `> i`; splitting
/// `w` into odd columns `i+1, i+3, …` and even columns `i+2, i+4, …` gives
/// `b = B₁·B₂`. `B₁` starts from the ladder `A_i` (odd length), `B₂` from
/// `A_{i+1}` with its seed removed (even length).
pub fn word_class_element(b: &UniTriMatrix, i: usize, coeff: i64) -> Result<GeneratorWord> {
    let (n, p) = (b.dim(), b.modulus());
    check_row(i, n - 1, "class element")?;
    let (sign, k) = seed_for(coeff, p)?;
    let x = p.reduce(coeff);
    let Some((a, bs)) = class_parameters(b, i, x) else {
        return usage(format!("matrix is not in the class of I + {coeff}·E({i},{})", i + 1));
    };
    let x_inv = p.inv(x).expect("nonzero");
    // u = (a_1..a_{i-1}, x); w[i+1+k] = b_k / x
    let u: Vec<u32> = a.iter().copied().chain([x]).collect();
    let w: Vec<u32> = bs.iter().map(|&v| p.mul(v, x_inv)).collect();
    let odd: Vec<u32> = w.iter().skip(1).step_by(2).copied().collect();
    let even: Vec<u32> = w.iter().step_by(2).copied().collect();

    let mut w1 = build_b1(n, p, i, sign, k, &u, &odd)?;
    w1.append(&build_b2(n, p, i, &u, &even)?);
    Ok(w1)
}

/// `I + u·(e_{i+1} + Σ odd_k e_{i+1+2k})^T`, odd length.
fn build_b1(n: usize, p: PrimeModulus, i: usize, sign: Sign, k: u32, u: &[u32], odd: &[u32]) -> Result<GeneratorWord> {
    let x = u[i - 1];
    let x_inv = p.inv(x).expect("nonzero");
    let mut word = word_ai(i, n, sign, k)?;
    // column i+1 is x on rows 1..=i; move rows j ≤ i-2 to a_j using row j+2
    let mut chain = ChainBuilder { n, p, word: &mut word };
    for j in 1..i.saturating_sub(1) {
        chain.conjugate(j, p.mul(p.sub(u[j - 1], x), x_inv))?;
    }
    if i >= 2 {
        let d = p.sub(u[i - 2], x);
        if d != 0 {
            let left = second_diag_short(i - 1, d, n, p)?;
            word = left.concat(&word);
        }
    }
    ChainBuilder { n, p, word: &mut word }.fill(i + 1, odd)?;
    Ok(word)
}

/// `I + u·(Σ even_k e_{i+2+2k})^T`, even length.
fn build_b2(n: usize, p: PrimeModulus, i: usize, u: &[u32], even: &[u32]) -> Result<GeneratorWord> {
    let Some(first_nonzero) = even.iter().position(|&v| v != 0) else {
        return Ok(GeneratorWord::new());
    };
    if first_nonzero == 0 {
        let tau = even[0];
        let tau_inv = p.inv(tau).expect("nonzero");
        let rest: Vec<u32> = even[1..].iter().map(|&v| p.mul(v, tau_inv)).collect();
        return column_piece(n, p, i, u, tau, &rest);
    }
    // column i+2 is empty: build it as 1 and cancel with a -1 piece
    let mut word = column_piece(n, p, i, u, 1, &even[1..])?;
    word.append(&column_piece(n, p, i, u, p.neg(1), &[])?);
    Ok(word)
}

/// `I + (τ·u)(e_{i+2} + Σ rest_k e_{i+2+2k})^T` starting from `A_{i+1}`.
fn column_piece(n: usize, p: PrimeModulus, i: usize, u: &[u32], tau: u32, rest: &[u32]) -> Result<GeneratorWord> {
    let mut word = word_ai(i + 1, n, Sign::Plus, 1)?;
    let target: Vec<u32> = u.iter().map(|&v| p.mul(v, tau)).collect();
    let mut chain = ChainBuilder { n, p, word: &mut word };
    // rows j ≤ i-1 use row j+2 (still 1)
    for j in 1..i {
        chain.conjugate(j, p.sub(target[j - 1], 1))?;
    }
    let d = p.sub(target[i - 1], 1);
    if d != 0 {
        word = second_diag_short(i, d, n, p)?.concat(&word);
    }
    // drop the seed at (i+1, i+2)
    word = GeneratorWord::from_steps(vec![GeneratorStep::minus(i + 1)]).concat(&word);
    ChainBuilder { n, p, word: &mut word }.fill(i + 2, rest)?;
    Ok(word)
}

/// Length, parity and per-generator counts `N(g, z)` of a word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordStats {
    pub length: usize,
    pub parity: usize,
    pub multiplicity: BTreeMap<GeneratorStep, usize>,
}

impl WordStats {
    pub fn count(&self, step: GeneratorStep) -> usize {
        self.multiplicity.get(&step).copied().unwrap_or(0)
    }

    pub fn max_multiplicity(&self) -> usize {
        self.multiplicity.values().copied().max().unwrap_or(0)
    }
}

pub fn word_stats(w: &GeneratorWord) -> WordStats {
    let mut multiplicity = BTreeMap::new();
    for &s in w.steps() {
        *multiplicity.entry(s).or_insert(0) += 1;
    }
    WordStats {
        length: w.len(),
        parity: w.parity(),
        multiplicity,
    }
}

/// One word per line.
pub fn format_words<'a>(words: impl IntoIterator<Item = &'a GeneratorWord>) -> String {
    let mut out = String::new();
    for w in words {
        writeln!(out, "{w}").expect("write to string");
    }
    out
}

/// Parses the one-word-per-line format; blank lines are empty words.
pub fn parse_words(text: &str) -> Result<Vec<GeneratorWord>> {
    text.lines().map(str::parse).collect()
}
