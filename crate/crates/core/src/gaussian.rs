//! Comparing normal-step pattern probabilities through level matrices.
//!
//! If lev(π)_{i,j} ≤ lev(τ)_{i,j} entrywise then ℙ(π) ≥ ℙ(τ) for mean-zero
//! normal steps. Patterns whose sign matrices agree up to row and column
//! permutations have equal probability for every step density. The order
//! closure combines both relations.

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::guard;
use crate::perm::{next_permutation, sign_matrix, Permutation, SignMatrix};

/// Upper-triangular counts lev(π)_{i,j}, i ≤ j, of consecutive pairs straddling both levels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LevelMatrix {
    n: usize,
    entries: Vec<u32>,
}

impl LevelMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry for 1-based levels; symmetric in its arguments.
    pub fn get(&self, i: usize, j: usize) -> u32 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.entries[(a - 1) * self.n + (b - 1)]
    }

    pub fn diagonal(&self) -> Vec<u32> {
        (1..=self.n).map(|j| self.get(j, j)).collect()
    }

    /// Rows of the upper triangle, zero below the diagonal.
    pub fn rows(&self) -> Vec<Vec<u32>> {
        (0..self.n).map(|r| self.entries[r * self.n..(r + 1) * self.n].to_vec()).collect()
    }

    fn le(&self, other: &Self) -> bool {
        self.entries.iter().zip(&other.entries).all(|(a, b)| a <= b)
    }
}

pub fn level_matrix(pi: &Permutation) -> LevelMatrix {
    let n = pi.steps();
    let mut entries = vec![0u32; n * n];
    for w in pi.values().windows(2) {
        let (lo, hi) = (w[0].min(w[1]), w[0].max(w[1]));
        for i in lo..hi {
            for j in i..hi {
                entries[(i - 1) * n + (j - 1)] += 1;
            }
        }
    }
    LevelMatrix { n, entries }
}

fn same_size(pi: &Permutation, tau: &Permutation) -> Result<()> {
    if pi.len() != tau.len() {
        return Err(Error::SizeMismatch { left: pi.len(), right: tau.len() });
    }
    Ok(())
}

/// lev(π) ≤ lev(τ) entrywise; implies ℙ(π) ≥ ℙ(τ) for normal steps.
pub fn lev_dominates(pi: &Permutation, tau: &Permutation) -> Result<bool> {
    same_size(pi, tau)?;
    Ok(level_matrix(pi).le(&level_matrix(tau)))
}

fn sorted_rows(rows: &[&[i8]]) -> Vec<Vec<i8>> {
    let mut v: Vec<Vec<i8>> = rows.iter().map(|r| r.to_vec()).collect();
    v.sort_unstable();
    v
}

fn permuted_columns(mat: &SignMatrix, cols: &[usize]) -> Vec<Vec<i8>> {
    (0..mat.dim()).map(|r| cols.iter().map(|&c| mat.get(r, c)).collect()).collect()
}

/// Support counts per row and per column, each sorted: invariant under row/column permutations.
fn support_profile(mat: &SignMatrix) -> (Vec<usize>, Vec<usize>) {
    let n = mat.dim();
    let mut rows: Vec<usize> = (0..n).map(|r| mat.row(r).iter().filter(|&&e| e != 0).count()).collect();
    let mut cols: Vec<usize> = (0..n).map(|c| (0..n).filter(|&r| mat.get(r, c) != 0).count()).collect();
    rows.sort_unstable();
    cols.sort_unstable();
    (rows, cols)
}

/// True iff L_π arises from L_τ by permuting rows and columns (signs untouched).
pub fn l_equivalent(pi: &Permutation, tau: &Permutation) -> Result<bool> {
    same_size(pi, tau)?;
    let a = sign_matrix(pi);
    let b = sign_matrix(tau);
    if support_profile(&a) != support_profile(&b) {
        return Ok(false);
    }
    let target = sorted_rows(&(0..a.dim()).map(|r| a.row(r)).collect::<Vec<_>>());
    let mut cols: Vec<usize> = (0..b.dim()).collect();
    loop {
        let mut rows = permuted_columns(&b, &cols);
        rows.sort_unstable();
        if rows == target {
            return Ok(true);
        }
        if !next_permutation(&mut cols) {
            return Ok(false);
        }
    }
}

/// Representative of the class of `mat` under row and column permutations:
/// the least row-sorted matrix over all column orders.
fn canonical_form(mat: &SignMatrix) -> Vec<Vec<i8>> {
    let mut cols: Vec<usize> = (0..mat.dim()).collect();
    let mut best: Option<Vec<Vec<i8>>> = None;
    loop {
        let mut rows = permuted_columns(mat, &cols);
        rows.sort_unstable();
        if best.as_ref().is_none_or(|b| rows < *b) {
            best = Some(rows);
        }
        if !next_permutation(&mut cols) {
            return best.unwrap_or_default();
        }
    }
}

/// Verdict on ℙ(π) versus ℙ(τ) for normal steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparison {
    /// ℙ(π) ≥ ℙ(τ).
    GreaterOrEqual,
    /// ℙ(π) ≤ ℙ(τ).
    LessOrEqual,
    Equal,
    Incomparable,
}

impl Comparison {
    /// The verdict for the swapped pair.
    pub fn flip(self) -> Self {
        match self {
            Self::GreaterOrEqual => Self::LessOrEqual,
            Self::LessOrEqual => Self::GreaterOrEqual,
            other => other,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::GreaterOrEqual => "GreaterOrEqual",
            Self::LessOrEqual => "LessOrEqual",
            Self::Equal => "Equal",
            Self::Incomparable => "Incomparable",
        }
    }
}

/// The closure of lev-dominance and L-equivalence over S_m.
///
/// π ⩽ τ (so ℙ(π) ≥ ℙ(τ)) iff τ is reachable from π. Nodes are
/// L-equivalence classes; an edge A → B exists when some π ∈ A has
/// lev(π) ≤ lev(τ) for some τ ∈ B. Reachability sets are computed lazily per
/// class and never change once written.
pub struct OrderClosure {
    m: usize,
    class_of: Vec<usize>,
    members: Vec<Vec<usize>>,
    edges: Vec<Vec<usize>>,
    levels: Vec<LevelMatrix>,
    reach: Vec<OnceLock<Vec<bool>>>,
}

impl OrderClosure {
    pub fn build(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::TooShort { len: m, min: 2 });
        }
        guard::check(m, guard::CLOSURE_MAX)?;
        let perms: Vec<Permutation> = Permutation::all(m).collect();
        let levels: Vec<LevelMatrix> = perms.iter().map(level_matrix).collect();
        let canon: Vec<Vec<Vec<i8>>> =
            perms.par_iter().map(|pi| canonical_form(&sign_matrix(pi))).collect();

        let mut ids: HashMap<&Vec<Vec<i8>>, usize> = HashMap::new();
        let mut class_of = Vec::with_capacity(perms.len());
        let mut members: Vec<Vec<usize>> = Vec::new();
        for (r, c) in canon.iter().enumerate() {
            let next = ids.len();
            let id = *ids.entry(c).or_insert(next);
            if id == members.len() {
                members.push(Vec::new());
            }
            members[id].push(r);
            class_of.push(id);
        }

        let per_source: Vec<Vec<usize>> = (0..perms.len())
            .into_par_iter()
            .map(|a| {
                let mut out: Vec<usize> = (0..perms.len())
                    .filter(|&b| class_of[a] != class_of[b] && levels[a].le(&levels[b]))
                    .map(|b| class_of[b])
                    .collect();
                out.sort_unstable();
                out.dedup();
                out
            })
            .collect();
        let mut edges = vec![Vec::new(); members.len()];
        for (a, targets) in per_source.into_iter().enumerate() {
            edges[class_of[a]].extend(targets);
        }
        for e in &mut edges {
            e.sort_unstable();
            e.dedup();
        }
        let reach = (0..members.len()).map(|_| OnceLock::new()).collect();
        Ok(Self { m, class_of, members, edges, levels, reach })
    }

    /// Shared closure for `m`, built once per process.
    pub fn cached(m: usize) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<OrderClosure>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(c) = cache.lock().expect("closure cache poisoned").get(&m) {
            return Ok(Arc::clone(c));
        }
        let built = Arc::new(Self::build(m)?);
        let mut guard = cache.lock().expect("closure cache poisoned");
        Ok(Arc::clone(guard.entry(m).or_insert(built)))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of L-equivalence classes.
    pub fn class_count(&self) -> usize {
        self.members.len()
    }

    /// Class index of `pi`.
    pub fn class_of(&self, pi: &Permutation) -> usize {
        self.class_of[pi.lex_rank()]
    }

    /// Members of class `id`, as patterns.
    pub fn class_members(&self, id: usize) -> Vec<Permutation> {
        self.members[id].iter().map(|&r| Permutation::from_lex_rank(self.m, r)).collect()
    }

    fn reachable(&self, from: usize) -> &[bool] {
        self.reach[from].get_or_init(|| {
            let mut seen = vec![false; self.members.len()];
            let mut queue = VecDeque::from([from]);
            seen[from] = true;
            while let Some(c) = queue.pop_front() {
                for &d in &self.edges[c] {
                    if !seen[d] {
                        seen[d] = true;
                        queue.push_back(d);
                    }
                }
            }
            seen
        })
    }

    /// π ⩽ τ in the closure.
    pub fn precedes(&self, pi: &Permutation, tau: &Permutation) -> bool {
        self.reachable(self.class_of(pi))[self.class_of(tau)]
    }

    pub fn compare(&self, pi: &Permutation, tau: &Permutation) -> Result<Comparison> {
        same_size(pi, tau)?;
        if pi.len() != self.m {
            return Err(Error::SizeMismatch { left: pi.len(), right: self.m });
        }
        Ok(match (self.precedes(pi, tau), self.precedes(tau, pi)) {
            (true, true) => Comparison::Equal,
            (true, false) => Comparison::GreaterOrEqual,
            (false, true) => Comparison::LessOrEqual,
            (false, false) => Comparison::Incomparable,
        })
    }

    /// Pairs (π, τ) with lev(π) ≤ lev(τ), lev(π) ≠ lev(τ), that also satisfy τ ⩽ π.
    ///
    /// Strict dominance forces ℙ(π) > ℙ(τ), so any pair here would be a
    /// contradiction in the closure. Quadratic in m!; meant for small m.
    pub fn strict_cycles(&self) -> Vec<(Permutation, Permutation)> {
        let n = self.levels.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.levels[a] != self.levels[b]
                    && self.levels[a].le(&self.levels[b])
                    && self.reachable(self.class_of[b])[self.class_of[a]]
                {
                    out.push((Permutation::from_lex_rank(self.m, a), Permutation::from_lex_rank(self.m, b)));
                }
            }
        }
        out
    }
}

/// Closure verdict for normal-step probabilities of π and τ.
pub fn compare(pi: &Permutation, tau: &Permutation) -> Result<Comparison> {
    same_size(pi, tau)?;
    OrderClosure::cached(pi.len())?.compare(pi, tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::laplace_probability;
    use crate::perm::level_vector;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn level_matrix_of_315624() {
        let lev = level_matrix(&p("315624"));
        assert_eq!(
            lev.rows(),
            vec![
                vec![2, 2, 1, 1, 0],
                vec![0, 4, 3, 2, 1],
                vec![0, 0, 3, 2, 1],
                vec![0, 0, 0, 2, 1],
                vec![0, 0, 0, 0, 2],
            ]
        );
        let id = level_matrix(&Permutation::identity(5));
        for i in 1..=4 {
            for j in i..=4 {
                assert_eq!(id.get(i, j), u32::from(i == j));
            }
        }
    }

    #[test]
    fn diagonal_is_level_vector() {
        for pi in Permutation::all(5) {
            let lev = level_matrix(&pi);
            assert_eq!(lev.diagonal(), level_vector(&pi).counts());
            for i in 1..=4 {
                for j in i..=4 {
                    assert!(lev.get(i, j) <= lev.get(i, i).min(lev.get(j, j)));
                }
            }
        }
    }

    #[test]
    fn dominance_examples() {
        let id = Permutation::identity(5);
        for tau in Permutation::all(5) {
            assert!(lev_dominates(&id, &tau).unwrap());
            assert!(lev_dominates(&tau, &tau).unwrap());
        }
        assert!(matches!(
            lev_dominates(&p("315624"), &Permutation::identity(7)),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn dominance_is_transitive() {
        let all: Vec<_> = Permutation::all(5).map(|pi| level_matrix(&pi)).collect();
        for a in &all {
            for b in all.iter().filter(|b| a.le(b)) {
                for c in all.iter().filter(|c| b.le(c)) {
                    assert!(a.le(c));
                }
            }
        }
    }

    #[test]
    fn l_equivalence_examples() {
        assert!(l_equivalent(&p("2413"), &p("2413")).unwrap());
        // L_123 = I and L_321 has −1 entries; no row/column permutation changes signs
        assert!(!l_equivalent(&p("123"), &p("321")).unwrap());
        assert!(matches!(l_equivalent(&p("12"), &p("123")), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn l_equivalence_search_agrees_with_canonical_forms() {
        for m in 3..=5 {
            let all: Vec<_> = Permutation::all(m).collect();
            let canon: Vec<_> = all.iter().map(|pi| canonical_form(&sign_matrix(pi))).collect();
            for (a, pa) in all.iter().enumerate() {
                for (b, pb) in all.iter().enumerate() {
                    let eq = l_equivalent(pa, pb).unwrap();
                    assert_eq!(eq, canon[a] == canon[b], "{pa} {pb}");
                    if eq {
                        assert_eq!(laplace_probability(pa), laplace_probability(pb));
                        let mut la = level_vector(pa).counts().to_vec();
                        let mut lb = level_vector(pb).counts().to_vec();
                        la.sort_unstable();
                        lb.sort_unstable();
                        assert_eq!(la, lb);
                    }
                }
            }
        }
    }

    #[test]
    fn compare_examples() {
        let id = Permutation::identity(5);
        for tau in Permutation::all(5) {
            let v = compare(&id, &tau).unwrap();
            assert!(matches!(v, Comparison::GreaterOrEqual | Comparison::Equal), "{tau}: {v:?}");
            assert_eq!(compare(&tau, &tau).unwrap(), Comparison::Equal);
        }
        assert!(matches!(compare(&p("12"), &p("123")), Err(Error::SizeMismatch { .. })));
        assert!(matches!(
            compare(&Permutation::identity(9), &Permutation::identity(9)),
            Err(Error::SizeTooLarge { .. })
        ));
    }

    #[test]
    fn compare_is_antisymmetric() {
        let closure = OrderClosure::build(5).unwrap();
        for a in Permutation::all(5) {
            for b in Permutation::all(5) {
                assert_eq!(closure.compare(&a, &b).unwrap(), closure.compare(&b, &a).unwrap().flip());
            }
        }
    }

    #[test]
    fn no_strict_cycles_small() {
        for m in 2..=5 {
            let closure = OrderClosure::build(m).unwrap();
            assert!(closure.strict_cycles().is_empty(), "m = {m}");
        }
    }

    #[test]
    fn reverse_has_same_level_matrix() {
        for pi in Permutation::all(5) {
            assert_eq!(level_matrix(&pi), level_matrix(&pi.reverse()));
            assert_eq!(compare(&pi, &pi.reverse()).unwrap(), Comparison::Equal);
        }
    }
}
