//! Permutations, ordinal pattern extraction, the sign matrix of a pattern,
//! level counts and the almost-consecutive predicate.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// An ordinal pattern in one-line notation, values `1..=m`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    values: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from one-line notation, checking it is a bijection on `1..=m`.
    pub fn new(values: Vec<usize>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        let m = values.len();
        let mut seen = vec![false; m];
        for &v in &values {
            if v == 0 || v > m {
                return Err(Error::NotABijection(format!("value {v} out of range 1..={m}")));
            }
            if seen[v - 1] {
                return Err(Error::NotABijection(format!("value {v} repeats")));
            }
            seen[v - 1] = true;
        }
        Ok(Self { values })
    }

    pub fn identity(m: usize) -> Self {
        Self { values: (1..=m).collect() }
    }

    /// Pattern length m.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of steps, m - 1.
    pub fn steps(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// π(i) for 1-based position `i`.
    pub fn at(&self, i: usize) -> usize {
        self.values[i - 1]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (pos, &v) in self.values.iter().enumerate() {
            inv[v - 1] = pos + 1;
        }
        Self { values: inv }
    }

    /// The product `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::SizeMismatch { left: self.len(), right: other.len() });
        }
        Ok(Self { values: other.values.iter().map(|&v| self.values[v - 1]).collect() })
    }

    /// One-line notation read right to left.
    pub fn reverse(&self) -> Self {
        Self { values: self.values.iter().rev().copied().collect() }
    }

    /// Values replaced by `m + 1 - v`; the pattern of the negated walk.
    pub fn complement(&self) -> Self {
        let m = self.len();
        Self { values: self.values.iter().map(|&v| m + 1 - v).collect() }
    }

    /// Position of this permutation in lexicographic order of S_m (0-based).
    pub fn lex_rank(&self) -> usize {
        let m = self.len();
        let mut rank = 0;
        for i in 0..m {
            let smaller_after = self.values[i + 1..].iter().filter(|&&v| v < self.values[i]).count();
            rank = rank * (m - i) + smaller_after;
        }
        rank
    }

    /// Inverse of [`Permutation::lex_rank`].
    pub fn from_lex_rank(m: usize, mut rank: usize) -> Self {
        let mut digits = vec![0usize; m];
        for i in (0..m).rev() {
            let base = m - i;
            digits[i] = rank % base;
            rank /= base;
        }
        let mut pool: Vec<usize> = (1..=m).collect();
        let values = digits.into_iter().map(|d| pool.remove(d)).collect();
        Self { values }
    }

    /// All of S_m in lexicographic order.
    pub fn all(m: usize) -> impl Iterator<Item = Permutation> {
        let mut next = Some(Self::identity(m));
        std::iter::from_fn(move || {
            let current = next.take()?;
            let mut values = current.values.clone();
            if next_permutation(&mut values) {
                next = Some(Self { values });
            }
            Some(current)
        })
    }
}

/// Advances `v` to its lexicographic successor; false when `v` was the last one.
pub(crate) fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

impl fmt::Display for Permutation {
    /// Contiguous digits for m ≤ 9, comma separated beyond.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= 9 {
            for v in &self.values {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
            f.write_str(&parts.join(","))
        }
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_permutation(s)
    }
}

/// Parses `"2413"` (m ≤ 9) or `"10,1,2,..."`.
pub fn parse_permutation(text: &str) -> Result<Permutation> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::EmptyInput);
    }
    let values: Vec<usize> = if text.contains(',') {
        text.split(',')
            .map(|tok| {
                let tok = tok.trim();
                tok.parse::<usize>()
                    .map_err(|_| Error::NotABijection(format!("cannot parse {tok:?}")))
            })
            .collect::<Result<_>>()?
    } else {
        text.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as usize)
                    .ok_or_else(|| Error::NotABijection(format!("unexpected character {c:?}")))
            })
            .collect::<Result<_>>()?
    };
    if !text.contains(',') && values.len() > 9 {
        return Err(Error::NotABijection(
            "patterns longer than 9 must be comma separated".into(),
        ));
    }
    Permutation::new(values)
}

/// How equal values in real data are ranked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    /// Any tie is an error.
    Reject,
    /// The earlier index ranks lower.
    #[default]
    StableLeft,
}

impl FromStr for TiePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reject" => Ok(Self::Reject),
            "stable-left" => Ok(Self::StableLeft),
            other => Err(Error::InvalidArgument(format!("unknown tie policy {other:?}"))),
        }
    }
}

/// The ordinal pattern of `positions`: π(i) is the rank of `positions[i]`, 1 = smallest.
pub fn ordinal_pattern(positions: &[f64], policy: TiePolicy) -> Result<Permutation> {
    let m = positions.len();
    if m < 2 {
        return Err(Error::TooShort { len: m, min: 2 });
    }
    if positions.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidArgument("NaN in positions".into()));
    }
    let mut values = vec![1usize; m];
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            if positions[j] < positions[i] {
                values[i] += 1;
            } else if positions[j] == positions[i] {
                match policy {
                    TiePolicy::Reject => {
                        return Err(Error::TieDetected { first: i.min(j), second: i.max(j) })
                    }
                    TiePolicy::StableLeft if j < i => values[i] += 1,
                    TiePolicy::StableLeft => {}
                }
            }
        }
    }
    Ok(Permutation { values })
}

/// Walk positions `0, x1, x1 + x2, ...` for the given steps.
pub fn walk_positions(steps: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(steps.len() + 1);
    let mut z = 0.0;
    out.push(z);
    for &x in steps {
        z += x;
        out.push(z);
    }
    out
}

/// The pattern in S_{n+1} of the walk generated by `n` steps.
pub fn pattern_from_steps(steps: &[f64], policy: TiePolicy) -> Result<Permutation> {
    if steps.is_empty() {
        return Err(Error::TooShort { len: 0, min: 1 });
    }
    ordinal_pattern(&walk_positions(steps), policy)
}

/// Lexicographic rank of the pattern of `positions`, or `None` on any tie.
///
/// Hot path for simulation; avoids allocating a [`Permutation`].
pub(crate) fn pattern_rank_of_positions(positions: &[f64]) -> Option<usize> {
    let m = positions.len();
    let mut rank = 0usize;
    for i in 0..m {
        let zi = positions[i];
        let mut smaller_after = 0;
        for &zj in &positions[i + 1..] {
            if zj < zi {
                smaller_after += 1;
            } else if zj == zi {
                return None;
            }
        }
        rank = rank * (m - i) + smaller_after;
    }
    Some(rank)
}

/// The (m-1)×(m-1) matrix over {-1, 0, +1} whose row i spans the levels
/// between π(i) and π(i+1), signed by direction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignMatrix {
    n: usize,
    entries: Vec<i8>,
}

impl SignMatrix {
    pub fn from_rows(rows: &[Vec<i8>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("sign matrix must be square".into()));
        }
        Ok(Self { n, entries: rows.concat() })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        Self { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry at 0-based (row, col).
    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.entries[row * self.n + col]
    }

    pub fn row(&self, row: usize) -> &[i8] {
        &self.entries[row * self.n..(row + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<i8>> {
        (0..self.n).map(|r| self.row(r).to_vec()).collect()
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|r| self.row(r).iter().zip(x).map(|(&a, &b)| f64::from(a) * b).sum())
            .collect()
    }

    /// Integer matrix product; entries of products of sign matrices stay in {-1, 0, 1}.
    pub fn multiply(&self, other: &Self) -> Vec<i64> {
        let n = self.n;
        let mut out = vec![0i64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = i64::from(self.get(i, k));
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * i64::from(other.get(k, j));
                }
            }
        }
        out
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> i64 {
        let n = self.n;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<i128> = self.entries.iter().map(|&e| i128::from(e)).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if a[k * n + k] == 0 {
                let Some(p) = (k + 1..n).find(|&r| a[r * n + k] != 0) else {
                    return 0;
                };
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                sign = -sign;
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i * n + j] = (a[i * n + j] * pivot - a[i * n + k] * a[k * n + j]) / prev;
                }
                a[i * n + k] = 0;
            }
            prev = pivot;
        }
        (sign * a[n * n - 1]) as i64
    }

    /// Sum of |entries| per column.
    pub fn column_abs_sums(&self) -> Vec<u32> {
        (0..self.n)
            .map(|c| (0..self.n).map(|r| u32::from(self.get(r, c).unsigned_abs())).sum())
            .collect()
    }
}

/// Builds L_π.
pub fn sign_matrix(pi: &Permutation) -> SignMatrix {
    let n = pi.steps();
    let mut entries = vec![0i8; n * n];
    for i in 0..n {
        let (a, b) = (pi.values[i], pi.values[i + 1]);
        let (lo, hi, sign) = if a < b { (a, b, 1) } else { (b, a, -1) };
        for level in lo..hi {
            entries[i * n + (level - 1)] = sign;
        }
    }
    SignMatrix { n, entries }
}

/// lev(π)_j: how many consecutive pairs of π straddle level j.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LevelVector {
    counts: Vec<u32>,
}

impl LevelVector {
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn product(&self) -> u128 {
        self.counts.iter().map(|&c| u128::from(c)).product()
    }
}

pub fn level_vector(pi: &Permutation) -> LevelVector {
    let n = pi.steps();
    let mut counts = vec![0u32; n];
    for w in pi.values.windows(2) {
        let (lo, hi) = (w[0].min(w[1]), w[0].max(w[1]));
        for level in lo..hi {
            counts[level - 1] += 1;
        }
    }
    LevelVector { counts }
}

/// True iff values i and i+1 sit at most two positions apart for every i.
pub fn is_almost_consecutive(pi: &Permutation) -> bool {
    let inv = pi.inverse();
    inv.values.windows(2).all(|w| w[0].abs_diff(w[1]) <= 2)
}
