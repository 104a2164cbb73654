//! Ordinal analysis of observed series: sliding-window pattern frequencies,
//! permutation entropy and a KL fingerprint against exact walk references.

use crate::affine::pattern_distribution_uniform;
use crate::error::{Error, Result};
use crate::exact::{
    almost_consecutive_mass, pattern_distribution_laplace, rational_to_f64, PatternDistribution,
    Rational,
};
use crate::guard;
use crate::perm::{factorial, is_almost_consecutive, ordinal_pattern, Permutation, TiePolicy};

/// A finite-valued observed series.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    samples: Vec<f64>,
}

impl TimeSeries {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if let Some(pos) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::Ingest { line: pos + 1, token: samples[pos].to_string() });
        }
        Ok(Self { samples })
    }

    /// Parses one value per line, or a single comma-separated line. Blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut samples = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            for token in line.split(',') {
                let token = token.trim();
                match token.parse::<f64>() {
                    Ok(x) if x.is_finite() => samples.push(x),
                    _ => return Err(Error::Ingest { line: k + 1, token: token.to_string() }),
                }
            }
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Relative frequencies of the patterns of all length-`m` windows (stride 1).
///
/// Under [`TiePolicy::Reject`] windows containing ties are skipped and do not
/// count towards the total.
pub fn pattern_frequencies(series: &TimeSeries, m: usize, policy: TiePolicy) -> Result<PatternDistribution> {
    if m < 2 {
        return Err(Error::TooShort { len: m, min: 2 });
    }
    guard::check(m, guard::DISTRIBUTION_MAX)?;
    if series.len() < m {
        return Err(Error::TooShort { len: series.len(), min: m });
    }
    let mut counts = vec![0u64; factorial(m)];
    for window in series.samples.windows(m) {
        match ordinal_pattern(window, policy) {
            Ok(pi) => counts[pi.lex_rank()] += 1,
            Err(Error::TieDetected { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    PatternDistribution::empirical(m, counts)
        .map_err(|_| Error::InvalidArgument("every window contains a tie".into()))
}

/// Shannon entropy in nats over the nonzero entries.
pub fn permutation_entropy(dist: &PatternDistribution) -> f64 {
    -dist.probabilities().into_iter().filter(|&p| p > 0.0).map(|p| p * p.ln()).sum::<f64>()
}

/// Σ P(π) ln(P(π)/Q(π)); terms with P(π) = 0 contribute nothing.
pub fn kl_divergence(p: &PatternDistribution, q: &PatternDistribution) -> Result<f64> {
    if p.m() != q.m() {
        return Err(Error::SizeMismatch { left: p.m(), right: q.m() });
    }
    let mut total = 0.0;
    for (rank, (pp, qq)) in p.probabilities().into_iter().zip(q.probabilities()).enumerate() {
        if pp == 0.0 {
            continue;
        }
        if qq <= 0.0 {
            return Err(Error::UnsupportedReference(Permutation::from_lex_rank(p.m(), rank).to_string()));
        }
        total += pp * (pp / qq).ln();
    }
    // rounding can leave a tiny negative residue for equal inputs
    Ok(total.max(0.0))
}

/// KL divergence of the observed distribution from each exact reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceDivergence {
    pub laplace: f64,
    /// Absent when m exceeds the alcove enumeration guard.
    pub uniform: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FingerprintReport {
    pub window: usize,
    pub empirical: PatternDistribution,
    pub divergence: ReferenceDivergence,
    pub entropy: f64,
    /// Observed frequency of almost-consecutive patterns.
    pub ac_mass_observed: f64,
    /// p_m, identical for every symmetric step density.
    pub ac_mass_expected: Rational,
}

/// Compares the window-`m` patterns of `series` with exact random-walk references.
pub fn fingerprint(series: &TimeSeries, m: usize, policy: TiePolicy) -> Result<FingerprintReport> {
    let empirical = pattern_frequencies(series, m, policy)?;
    let laplace = kl_divergence(&empirical, &pattern_distribution_laplace(m)?)?;
    let uniform = match pattern_distribution_uniform(m) {
        Ok(reference) => Some(kl_divergence(&empirical, &reference)?),
        Err(Error::SizeTooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    let ac_mass_observed = empirical
        .iter()
        .filter(|(pi, _)| is_almost_consecutive(pi))
        .map(|(_, p)| p)
        .sum();
    Ok(FingerprintReport {
        window: m,
        entropy: permutation_entropy(&empirical),
        divergence: ReferenceDivergence { laplace, uniform },
        ac_mass_observed,
        ac_mass_expected: almost_consecutive_mass(m)?,
        empirical,
    })
}

/// Floating value of p_m, for callers that only need the number.
pub fn expected_ac_mass(m: usize) -> Result<f64> {
    Ok(rational_to_f64(&almost_consecutive_mass(m)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn series(xs: &[f64]) -> TimeSeries {
        TimeSeries::new(xs.to_vec()).unwrap()
    }

    #[test]
    fn increasing_series() {
        let d = pattern_frequencies(&series(&[1.0, 2.0, 3.0, 4.0, 5.0]), 3, TiePolicy::Reject).unwrap();
        assert_eq!(d.probability(&p("123")), 1.0);
        assert_eq!(d.total(), Some(3));
    }

    #[test]
    fn alternating_series_with_ties() {
        let s = series(&[0.0, 1.0, 0.0, 1.0, 0.0, 1.0]);
        let d = pattern_frequencies(&s, 3, TiePolicy::StableLeft).unwrap();
        assert_eq!(d.probability(&p("132")), 0.5);
        assert_eq!(d.probability(&p("213")), 0.5);
        assert!(pattern_frequencies(&s, 3, TiePolicy::Reject).is_err());
        let s = series(&[0.0, 1.0, 0.0, 2.0]);
        let d = pattern_frequencies(&s, 3, TiePolicy::Reject).unwrap();
        assert_eq!(d.total(), Some(1));
        assert_eq!(d.probability(&p("213")), 1.0);
    }

    #[test]
    fn frequency_errors() {
        assert!(matches!(
            pattern_frequencies(&series(&[1.0, 2.0]), 3, TiePolicy::Reject),
            Err(Error::TooShort { .. })
        ));
        assert!(matches!(
            pattern_frequencies(&series(&[1.0; 20]), 12, TiePolicy::StableLeft),
            Err(Error::SizeTooLarge { .. })
        ));
    }

    #[test]
    fn entropy_examples() {
        let point = PatternDistribution::empirical(3, vec![5, 0, 0, 0, 0, 0]).unwrap();
        assert_eq!(permutation_entropy(&point), 0.0);
        let uniform = PatternDistribution::empirical(3, vec![1; 6]).unwrap();
        assert!((permutation_entropy(&uniform) - 6f64.ln()).abs() < 1e-12);
        let laplace = pattern_distribution_laplace(3).unwrap();
        let expected = 2.0 * 0.25 * 4f64.ln() + 4.0 * 0.125 * 8f64.ln();
        assert!((permutation_entropy(&laplace) - expected).abs() < 1e-12);
        assert!((expected - 1.7329).abs() < 1e-4);
    }

    #[test]
    fn kl_examples() {
        let q = pattern_distribution_laplace(4).unwrap();
        assert!(kl_divergence(&q, &q).unwrap().abs() < 1e-12);
        let point = PatternDistribution::empirical(3, vec![1, 0, 0, 0, 0, 0]).unwrap();
        let uniform = PatternDistribution::empirical(3, vec![1; 6]).unwrap();
        assert!((kl_divergence(&point, &uniform).unwrap() - 6f64.ln()).abs() < 1e-12);
        let holey = PatternDistribution::empirical(3, vec![0, 1, 1, 1, 1, 1]).unwrap();
        assert_eq!(kl_divergence(&uniform, &holey), Err(Error::UnsupportedReference("123".into())));
        assert!(matches!(kl_divergence(&point, &q), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn parse_series() {
        let s = TimeSeries::parse(" 1.5\n2\n\n-3e2 \n").unwrap();
        assert_eq!(s.samples(), &[1.5, 2.0, -300.0]);
        let s = TimeSeries::parse("1, 2.5 ,3\n").unwrap();
        assert_eq!(s.samples(), &[1.0, 2.5, 3.0]);
        assert_eq!(
            TimeSeries::parse("1\n2\nabc\n"),
            Err(Error::Ingest { line: 3, token: "abc".into() })
        );
        assert!(matches!(TimeSeries::parse("1\nNaN\n"), Err(Error::Ingest { line: 2, .. })));
        assert!(matches!(TimeSeries::parse("inf"), Err(Error::Ingest { line: 1, .. })));
        assert!(TimeSeries::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn fingerprint_of_small_series() {
        let xs: Vec<f64> = (0..50).map(|k| ((k * 37) % 11) as f64 + 0.01 * k as f64).collect();
        let report = fingerprint(&series(&xs), 4, TiePolicy::StableLeft).unwrap();
        assert_eq!(report.ac_mass_expected, almost_consecutive_mass(4).unwrap());
        assert!(report.divergence.laplace >= 0.0);
        assert!(report.divergence.uniform.unwrap() >= 0.0);
        assert!(report.entropy >= 0.0 && report.entropy <= (24f64).ln() + 1e-12);
        assert!((0.0..=1.0).contains(&report.ac_mass_observed));
        assert_eq!(expected_ac_mass(4).unwrap(), 2.0 / 3.0);
    }
}
