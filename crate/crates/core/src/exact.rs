//! Exact pattern probabilities: Laplace steps, and almost-consecutive
//! patterns under any symmetric continuous step density.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::guard;
use crate::montecarlo::Estimate;
use crate::perm::{factorial, is_almost_consecutive, level_vector, Permutation};

/// Arbitrary-precision fraction, always in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

/// Formats as `"p/q"`, including `"1/1"` and `"0/1"`.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistributionKind {
    Exact,
    Empirical,
}

#[derive(Debug, Clone, PartialEq)]
enum Data {
    Exact(Vec<Rational>),
    Empirical { counts: Vec<u64>, total: u64 },
}

/// A distribution over S_m, stored densely in lexicographic order of patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternDistribution {
    m: usize,
    data: Data,
}

impl PatternDistribution {
    pub fn exact(m: usize, probabilities: Vec<Rational>) -> Result<Self> {
        check_dense_len(m, probabilities.len())?;
        Ok(Self { m, data: Data::Exact(probabilities) })
    }

    /// Empirical distribution from occurrence counts; needs at least one observation.
    pub fn empirical(m: usize, counts: Vec<u64>) -> Result<Self> {
        check_dense_len(m, counts.len())?;
        let total = counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidArgument("no observations".into()));
        }
        Ok(Self { m, data: Data::Empirical { counts, total } })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn kind(&self) -> DistributionKind {
        match self.data {
            Data::Exact(_) => DistributionKind::Exact,
            Data::Empirical { .. } => DistributionKind::Empirical,
        }
    }

    /// Number of entries, m!.
    pub fn len(&self) -> usize {
        match &self.data {
            Data::Exact(p) => p.len(),
            Data::Empirical { counts, .. } => counts.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Probability (or relative frequency) of `pi`; 0 for patterns of another size.
    pub fn probability(&self, pi: &Permutation) -> f64 {
        if pi.len() != self.m {
            return 0.0;
        }
        self.probability_at(pi.lex_rank())
    }

    fn probability_at(&self, rank: usize) -> f64 {
        match &self.data {
            Data::Exact(p) => rational_to_f64(&p[rank]),
            Data::Empirical { counts, total } => counts[rank] as f64 / *total as f64,
        }
    }

    pub fn exact_probability(&self, pi: &Permutation) -> Option<&Rational> {
        match &self.data {
            Data::Exact(p) if pi.len() == self.m => Some(&p[pi.lex_rank()]),
            _ => None,
        }
    }

    pub fn estimate(&self, pi: &Permutation) -> Option<Estimate> {
        match &self.data {
            Data::Empirical { counts, total } if pi.len() == self.m => {
                Some(Estimate::from_counts(counts[pi.lex_rank()], *total))
            }
            _ => None,
        }
    }

    /// Dense floating view in lexicographic pattern order.
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.len()).map(|r| self.probability_at(r)).collect()
    }

    /// `(pattern, probability)` in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (Permutation, f64)> + '_ {
        Permutation::all(self.m).enumerate().map(|(r, pi)| (pi, self.probability_at(r)))
    }

    pub fn exact_values(&self) -> Option<&[Rational]> {
        match &self.data {
            Data::Exact(p) => Some(p),
            Data::Empirical { .. } => None,
        }
    }

    pub fn counts(&self) -> Option<&[u64]> {
        match &self.data {
            Data::Exact(_) => None,
            Data::Empirical { counts, .. } => Some(counts),
        }
    }

    /// Number of observations behind an empirical distribution.
    pub fn total(&self) -> Option<u64> {
        match &self.data {
            Data::Exact(_) => None,
            Data::Empirical { total, .. } => Some(*total),
        }
    }

    /// Exact sum of an exact distribution.
    pub fn exact_sum(&self) -> Option<Rational> {
        self.exact_values().map(|p| p.iter().fold(Rational::zero(), |acc, x| acc + x))
    }
}

fn check_dense_len(m: usize, len: usize) -> Result<()> {
    let expected = factorial(m);
    if len != expected {
        return Err(Error::SizeMismatch { left: len, right: expected });
    }
    Ok(())
}

/// 1 / (2^n ∏ lev(π)_j).
fn level_formula(pi: &Permutation) -> Rational {
    let lev = level_vector(pi);
    let denom = lev
        .counts()
        .iter()
        .fold(BigInt::one() << pi.steps(), |acc, &c| acc * BigInt::from(c));
    Rational::new(BigInt::one(), denom)
}

/// Exact probability of `pi` for a walk with mean-zero Laplace steps.
pub fn laplace_probability(pi: &Permutation) -> Rational {
    level_formula(pi)
}

/// Result of the universal formula, which only applies to almost-consecutive patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UniversalProbability {
    Exact(Rational),
    NotApplicable,
}

impl UniversalProbability {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            Self::Exact(r) => Some(r),
            Self::NotApplicable => None,
        }
    }
}

/// Probability of `pi` valid for every symmetric continuous step density,
/// when `pi` is almost consecutive.
pub fn symmetric_universal_probability(pi: &Permutation) -> UniversalProbability {
    if is_almost_consecutive(pi) {
        UniversalProbability::Exact(level_formula(pi))
    } else {
        UniversalProbability::NotApplicable
    }
}

fn check_distribution_size(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::TooShort { len: m, min: 2 });
    }
    guard::check(m, guard::DISTRIBUTION_MAX)
}

/// The full exact Laplace distribution over S_m.
pub fn pattern_distribution_laplace(m: usize) -> Result<PatternDistribution> {
    check_distribution_size(m)?;
    let probs: Vec<Rational> = (0..factorial(m))
        .into_par_iter()
        .map(|r| laplace_probability(&Permutation::from_lex_rank(m, r)))
        .collect();
    PatternDistribution::exact(m, probs)
}

/// p_m: probability that a length-m window of any symmetric-step walk is almost consecutive.
pub fn almost_consecutive_mass(m: usize) -> Result<Rational> {
    check_distribution_size(m)?;
    Ok(Permutation::all(m)
        .filter(is_almost_consecutive)
        .fold(Rational::zero(), |acc, pi| acc + level_formula(&pi)))
}
