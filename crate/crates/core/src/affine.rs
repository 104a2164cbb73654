//! Exact uniform-step probabilities by counting alcoves of the affine type A
//! arrangement inside the polytope of steps of a pattern.
//!
//! An alcove is identified by its address: one integer per positive root
//! (i, j), 1 ≤ i < j ≤ m, with k(i, j) < x_i + … + x_{j-1} < k(i, j) + 1 in
//! step coordinates. Group elements are never built; addresses are the only
//! representation.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{PatternDistribution, Rational};
use crate::guard;
use crate::perm::{factorial, Permutation};

/// Positive root ε_i − ε_j, written (i, j).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Root {
    pub i: usize,
    pub j: usize,
}

impl Root {
    pub fn new(i: usize, j: usize) -> Result<Self> {
        if i == 0 || i >= j {
            return Err(Error::InvalidArgument(format!("({i},{j}) is not a positive root")));
        }
        Ok(Self { i, j })
    }

    pub fn is_simple(self) -> bool {
        self.j == self.i + 1
    }

    /// Root-poset order: (i', j') ≤ (i, j) iff [i', j'] ⊆ [i, j].
    pub fn below(self, other: Root) -> bool {
        other.i <= self.i && self.j <= other.j
    }

    fn len(self) -> usize {
        self.j - self.i
    }
}

impl PartialOrd for Root {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical root order: by height j − i, then by i.
impl Ord for Root {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.len(), self.i).cmp(&(other.len(), other.i))
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

/// Index of `(i, j)` in canonical root order for pattern length `m`.
fn root_index(m: usize, i: usize, j: usize) -> usize {
    let d = j - i;
    // roots of height d' number m - d'
    let offset: usize = (1..d).map(|h| m - h).sum();
    offset + (i - 1)
}

/// All positive roots for pattern length `m` (rank m − 1) in canonical order.
pub fn positive_roots(m: usize) -> Vec<Root> {
    (1..m).flat_map(|d| (1..=m - d).map(move |i| Root { i, j: i + d })).collect()
}

/// Integer labels on the positive roots of rank n = m − 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlcoveAddress {
    m: usize,
    values: Vec<i64>,
}

impl AlcoveAddress {
    /// The fundamental alcove: all zeros.
    pub fn zero(m: usize) -> Self {
        Self { m, values: vec![0; m * (m - 1) / 2] }
    }

    /// Builds an address from `((i, j), k)` pairs; roots not listed are 0.
    pub fn from_entries(m: usize, entries: &[((usize, usize), i64)]) -> Result<Self> {
        let mut a = Self::zero(m);
        for &((i, j), k) in entries {
            if i == 0 || i >= j || j > m {
                return Err(Error::InvalidArgument(format!("({i},{j}) is not a root for m = {m}")));
            }
            a.set(i, j, k);
        }
        Ok(a)
    }

    /// Address of the alcove containing the step vector `x` (which must avoid every hyperplane).
    pub fn of_point(x: &[f64]) -> Self {
        let m = x.len() + 1;
        let mut a = Self::zero(m);
        for i in 1..m {
            let mut s = 0.0;
            for j in i + 1..=m {
                s += x[j - 2];
                a.set(i, j, s.floor() as i64);
            }
        }
        a
    }

    /// Pattern length m; the rank is m − 1.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.values[root_index(self.m, i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: i64) {
        let idx = root_index(self.m, i, j);
        self.values[idx] = k;
    }

    /// Values in canonical root order.
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn entries(&self) -> impl Iterator<Item = (Root, i64)> + '_ {
        positive_roots(self.m).into_iter().zip(self.values.iter().copied())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&k| k >= 0)
    }

    /// Pointwise ≤.
    pub fn pointwise_le(&self, other: &Self) -> bool {
        self.m == other.m && self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for AlcoveAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries().map(|(r, k)| format!("{r}={k}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Shi's criterion: k(i,t) + k(t,j) ≤ k(i,j) ≤ k(i,t) + k(t,j) + 1 for all i < t < j.
pub fn shi_valid(k: &AlcoveAddress) -> bool {
    let m = k.m;
    for i in 1..=m {
        for j in i + 2..=m {
            let kij = k.get(i, j);
            for t in i + 1..j {
                let s = k.get(i, t) + k.get(t, j);
                if kij < s || kij > s + 1 {
                    return false;
                }
            }
        }
    }
    true
}

/// A down-closed set of positive roots.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RootIdeal {
    m: usize,
    members: Vec<bool>,
}

impl RootIdeal {
    /// Checks that `roots` is down-closed.
    pub fn new(m: usize, roots: impl IntoIterator<Item = Root>) -> Result<Self> {
        let ideal = Self::from_roots(m, roots)?;
        for r in ideal.roots() {
            let below_missing = (r.i..r.j)
                .flat_map(|a| (a + 1..=r.j).map(move |b| Root { i: a, j: b }))
                .any(|s| !ideal.contains(s));
            if below_missing {
                return Err(Error::InvalidArgument(format!("root set is not down-closed at {r}")));
            }
        }
        Ok(ideal)
    }

    /// Downward closure of `generators`.
    pub fn generated_by(m: usize, generators: impl IntoIterator<Item = Root>) -> Result<Self> {
        let gens = Self::from_roots(m, generators)?;
        let mut members = vec![false; gens.members.len()];
        for (idx, r) in positive_roots(m).into_iter().enumerate() {
            members[idx] = gens.roots().any(|g| r.below(g));
        }
        Ok(Self { m, members })
    }

    fn from_roots(m: usize, roots: impl IntoIterator<Item = Root>) -> Result<Self> {
        let mut members = vec![false; m * (m - 1) / 2];
        for r in roots {
            if r.j > m || r.i == 0 || r.i >= r.j {
                return Err(Error::InvalidArgument(format!("{r} is not a root for m = {m}")));
            }
            members[root_index(m, r.i, r.j)] = true;
        }
        Ok(Self { m, members })
    }

    /// The whole of Φ⁺.
    pub fn full(m: usize) -> Self {
        Self { m, members: vec![true; m * (m - 1) / 2] }
    }

    /// Just the simple roots.
    pub fn simple(m: usize) -> Self {
        Self::from_roots(m, (1..m).map(|i| Root { i, j: i + 1 })).expect("simple roots are roots")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn contains(&self, r: Root) -> bool {
        r.j <= self.m && r.i >= 1 && r.i < r.j && self.members[root_index(self.m, r.i, r.j)]
    }

    pub fn roots(&self) -> impl Iterator<Item = Root> + '_ {
        positive_roots(self.m).into_iter().zip(&self.members).filter(|(_, &b)| b).map(|(r, _)| r)
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains_simple_roots(&self) -> bool {
        (1..self.m).all(|i| self.contains(Root { i, j: i + 1 }))
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.m == other.m && self.members.iter().zip(&other.members).all(|(&a, &b)| !a || b)
    }
}

/// Roots (min, max) of each pair of adjacent values of π.
pub fn consecutive_roots(pi: &Permutation) -> BTreeSet<Root> {
    pi.values()
        .windows(2)
        .map(|w| Root { i: w[0].min(w[1]), j: w[0].max(w[1]) })
        .collect()
}

/// Downward closure of the consecutive roots of π.
pub fn root_ideal(pi: &Permutation) -> RootIdeal {
    RootIdeal::generated_by(pi.len(), consecutive_roots(pi)).expect("consecutive roots are roots")
}

/// The pointwise-largest Shi-valid address vanishing on `ideal`:
/// k(i, j) is one less than the fewest ideal roots that tile [i, j).
pub fn sommers_max_address(ideal: &RootIdeal) -> Result<AlcoveAddress> {
    let m = ideal.m;
    if let Some(i) = (1..m).find(|&i| !ideal.contains(Root { i, j: i + 1 })) {
        return Err(Error::MissingSimpleRoots(i, i + 1));
    }
    let mut out = AlcoveAddress::zero(m);
    // pieces(i, j) filled in order of increasing height
    let mut pieces = AlcoveAddress::zero(m);
    for r in positive_roots(m) {
        let best = if ideal.contains(r) {
            1
        } else {
            (r.i + 1..r.j).map(|t| pieces.get(r.i, t) + pieces.get(t, r.j)).min().expect("height ≥ 2")
        };
        pieces.set(r.i, r.j, best);
        out.set(r.i, r.j, best - 1);
    }
    Ok(out)
}

/// The weak order on alcoves, read off addresses: root by root, nonnegative
/// entries must grow and nonpositive entries must shrink. Entries of strictly
/// opposite sign make the pair incomparable.
pub fn weak_leq(ku: &AlcoveAddress, kw: &AlcoveAddress) -> Result<bool> {
    if ku.m != kw.m {
        return Err(Error::SizeMismatch { left: ku.m, right: kw.m });
    }
    if !shi_valid(ku) || !shi_valid(kw) {
        return Err(Error::NotAnAddress);
    }
    Ok(ku.values.iter().zip(&kw.values).all(|(&a, &b)| {
        if a >= 0 && b >= 0 {
            a <= b
        } else if a <= 0 && b <= 0 {
            a >= b
        } else {
            false
        }
    }))
}

/// Depth-first enumeration of nonnegative Shi-valid addresses with per-root upper bounds.
struct ShiSearch {
    /// For each root in canonical order, index pairs of (i,t), (t,j) splits.
    splits: Vec<Vec<(usize, usize)>>,
    upper: Vec<i64>,
    current: Vec<i64>,
}

impl ShiSearch {
    fn new(m: usize, upper: Vec<i64>) -> Self {
        let splits = positive_roots(m)
            .into_iter()
            .map(|r| {
                (r.i + 1..r.j).map(|t| (root_index(m, r.i, t), root_index(m, t, r.j))).collect()
            })
            .collect();
        let len = upper.len();
        Self { splits, upper, current: vec![0; len] }
    }

    fn run(&mut self, visit: &mut dyn FnMut(&[i64])) {
        self.descend(0, visit);
    }

    fn descend(&mut self, depth: usize, visit: &mut dyn FnMut(&[i64])) {
        if depth == self.current.len() {
            visit(&self.current);
            return;
        }
        let (mut lo, mut hi) = (0i64, self.upper[depth]);
        for &(a, b) in &self.splits[depth] {
            let s = self.current[a] + self.current[b];
            lo = lo.max(s);
            hi = hi.min(s + 1);
        }
        for k in lo..=hi {
            self.current[depth] = k;
            self.descend(depth + 1, visit);
        }
    }
}

fn check_alcove_size(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::TooShort { len: m, min: 2 });
    }
    guard::check(m, guard::ALCOVE_MAX)
}

/// Number of alcoves in the polytope of steps of π: nonnegative Shi-valid
/// addresses vanishing on the root ideal of π.
pub fn count_alcoves(pi: &Permutation) -> Result<u64> {
    let m = pi.len();
    check_alcove_size(m)?;
    let ideal = root_ideal(pi);
    let upper = ideal.members.iter().map(|&b| if b { 0 } else { i64::MAX }).collect();
    let mut count = 0u64;
    ShiSearch::new(m, upper).run(&mut |_| count += 1);
    Ok(count)
}

/// K_π / (2^n n!), the exact probability of π under uniform steps on [−1, 1].
pub fn uniform_probability(pi: &Permutation) -> Result<Rational> {
    let k = count_alcoves(pi)?;
    let n = pi.steps();
    let denom = (BigInt::from(1) << n) * BigInt::from(factorial(n));
    Ok(Rational::new(BigInt::from(k), denom))
}

/// Full exact uniform-step distribution over S_m.
pub fn pattern_distribution_uniform(m: usize) -> Result<PatternDistribution> {
    check_alcove_size(m)?;
    let probs = (0..factorial(m))
        .into_par_iter()
        .map(|r| uniform_probability(&Permutation::from_lex_rank(m, r)))
        .collect::<Result<Vec<_>>>()?;
    PatternDistribution::exact(m, probs)
}

/// Default cap on ∏(kw + 1) for [`enumerate_interval`].
pub const INTERVAL_CAP: u128 = 1 << 40;

/// Every Shi-valid address between zero and `kw` pointwise, in lexicographic
/// order over the canonical root order: the weak-order interval [1, w].
pub fn enumerate_interval(kw: &AlcoveAddress) -> Result<Vec<AlcoveAddress>> {
    enumerate_interval_capped(kw, INTERVAL_CAP)
}

pub fn enumerate_interval_capped(kw: &AlcoveAddress, cap: u128) -> Result<Vec<AlcoveAddress>> {
    if !shi_valid(kw) || !kw.is_nonnegative() {
        return Err(Error::NotAnAddress);
    }
    let bound = kw
        .values
        .iter()
        .try_fold(1u128, |acc, &k| acc.checked_mul(k as u128 + 1))
        .unwrap_or(u128::MAX);
    if bound > cap {
        return Err(Error::SizeTooLarge {
            size: usize::try_from(bound).unwrap_or(usize::MAX),
            limit: usize::try_from(cap).unwrap_or(usize::MAX),
        });
    }
    let m = kw.m;
    let mut out = Vec::new();
    ShiSearch::new(m, kw.values.clone())
        .run(&mut |vals| out.push(AlcoveAddress { m, values: vals.to_vec() }));
    Ok(out)
}

/// True iff 1 and m are adjacent in π.
pub fn has_extreme_adjacency(pi: &Permutation) -> bool {
    let m = pi.len();
    pi.values().windows(2).any(|w| w[0].min(w[1]) == 1 && w[0].max(w[1]) == m)
}
