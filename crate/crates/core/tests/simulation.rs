use ordpat::analysis::{fingerprint, pattern_frequencies, TimeSeries};
use ordpat::exact::{laplace_probability, rational_to_f64, symmetric_universal_probability};
use ordpat::montecarlo::{
    batch_rng, estimate_distribution, estimate_probability, sample_steps, simulate_walk, StepDistribution,
};
use ordpat::{Permutation, TiePolicy};

const WALK_LEN: usize = 1_000_000;

fn walk(dist: StepDistribution, seed: u64) -> TimeSeries {
    TimeSeries::new(simulate_walk(dist, WALK_LEN, seed)).unwrap()
}

#[test]
fn long_walks_carry_the_universal_almost_consecutive_mass() {
    for (k, dist) in StepDistribution::ALL.into_iter().enumerate() {
        let report = fingerprint(&walk(dist, 40 + k as u64), 4, TiePolicy::Reject).unwrap();
        let expected = rational_to_f64(&report.ac_mass_expected);
        assert!(
            (report.ac_mass_observed - expected).abs() < 0.01,
            "{}: {} vs {expected}",
            dist.name(),
            report.ac_mass_observed
        );
    }
}

#[test]
fn fingerprint_identifies_the_step_law() {
    let uniform = fingerprint(&walk(StepDistribution::UniformPm1, 41), 4, TiePolicy::Reject).unwrap();
    let d = uniform.divergence;
    assert!(d.uniform.unwrap() < d.laplace, "{d:?}");
    let laplace = fingerprint(&walk(StepDistribution::LaplaceUnit, 42), 4, TiePolicy::Reject).unwrap();
    let d = laplace.divergence;
    assert!(d.laplace < d.uniform.unwrap(), "{d:?}");
}

#[test]
fn white_noise_has_flat_patterns() {
    let mut rng = batch_rng(3, 0);
    let noise = sample_steps(StepDistribution::NormalUnit, WALK_LEN, &mut rng);
    let freq = pattern_frequencies(&TimeSeries::new(noise).unwrap(), 3, TiePolicy::Reject).unwrap();
    let n = freq.total().unwrap() as f64;
    let p = 1.0 / 6.0;
    // overlapping windows are dependent: widen the i.i.d. band threefold
    let tol = 3.0 * 4.0 * (p * (1.0 - p) / n).sqrt();
    for (pi, f) in freq.iter() {
        assert!((f - p).abs() < tol, "{pi}: {f}");
    }
}

#[test]
fn laplace_estimates_match_exact_values_over_s5() {
    let est = estimate_distribution(StepDistribution::LaplaceUnit, 5, 1_000_000, 55).unwrap();
    for pi in Permutation::all(5) {
        let z = est.estimate(&pi).unwrap().z_score(rational_to_f64(&laplace_probability(&pi)));
        assert!(z < 4.0, "{pi}: z = {z}");
    }
}

#[test]
fn universal_pattern_under_every_sampler() {
    let pi: Permutation = "1423".parse().unwrap();
    let exact = rational_to_f64(symmetric_universal_probability(&pi).value().unwrap());
    assert_eq!(exact, 1.0 / 48.0);
    for dist in StepDistribution::ALL {
        let est = estimate_probability(dist, &pi, 2_000_000, 1423).unwrap();
        assert!(est.z_score(exact) < 4.0, "{}: {est:?}", dist.name());
    }
}

#[test]
fn single_pattern_and_full_distribution_estimates_agree() {
    // same seed means the same walks, so the counts coincide exactly
    let pi: Permutation = "2413".parse().unwrap();
    let one = estimate_probability(StepDistribution::NormalUnit, &pi, 300_000, 9).unwrap();
    let all = estimate_distribution(StepDistribution::NormalUnit, 4, 300_000, 9).unwrap();
    assert_eq!(Some(one), all.estimate(&pi));
}
