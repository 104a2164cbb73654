use ordpat::affine::{count_alcoves, enumerate_interval, root_ideal, sommers_max_address, AlcoveAddress};
use ordpat::analysis::{pattern_frequencies, TimeSeries};
use ordpat::exact::laplace_probability;
use ordpat::gaussian::{compare, Comparison};
use ordpat::perm::{walk_positions, SignMatrix};
use ordpat::{ordinal_pattern, pattern_from_steps, sign_matrix, Permutation, TiePolicy};
use proptest::prelude::*;

fn permutation(m: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Permutation> {
    m.prop_flat_map(|m| Just((1..=m).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|v| Permutation::new(v).unwrap())
}

fn distinct_reals(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::hash_set(-10_000i32..10_000, len)
        .prop_map(|s| s.into_iter().map(|k| k as f64 / 7.0).collect())
}

proptest! {
    #[test]
    fn pattern_invariant_under_affine_maps(xs in distinct_reals(2..9), shift in -50.0..50.0f64, scale in 0.01..100.0f64) {
        let a = ordinal_pattern(&xs, TiePolicy::Reject).unwrap();
        let ys: Vec<f64> = xs.iter().map(|x| scale * x + shift).collect();
        prop_assert_eq!(ordinal_pattern(&ys, TiePolicy::Reject).unwrap(), a);
    }

    #[test]
    fn frequencies_invariant_under_monotone_map(xs in distinct_reals(6..40), m in 2usize..5) {
        let series = TimeSeries::new(xs.clone()).unwrap();
        let warped = TimeSeries::new(xs.iter().map(|x| x * x * x + x).collect()).unwrap();
        prop_assert_eq!(
            pattern_frequencies(&series, m, TiePolicy::Reject).unwrap(),
            pattern_frequencies(&warped, m, TiePolicy::Reject).unwrap()
        );
    }

    #[test]
    fn sign_matrix_maps_positive_gaps_into_the_region(pi in permutation(2..=8), gaps in prop::collection::vec(0.01..5.0f64, 7)) {
        let l = sign_matrix(&pi);
        let steps = l.apply(&gaps[..pi.steps()]);
        prop_assert_eq!(pattern_from_steps(&steps, TiePolicy::Reject).unwrap(), pi.clone());
        // walk positions of those steps have consecutive sorted gaps equal to the input
        let mut z = walk_positions(&steps);
        z.sort_by(f64::total_cmp);
        for (j, w) in z.windows(2).enumerate() {
            prop_assert!((w[1] - w[0] - gaps[j]).abs() < 1e-9);
        }
    }

    #[test]
    fn sign_matrix_is_unimodular(pi in permutation(2..=9)) {
        prop_assert_eq!(sign_matrix(&pi).determinant().abs(), 1);
    }

    #[test]
    fn inverse_matrix_of_inverse_pattern(pi in permutation(2..=7)) {
        let prod = sign_matrix(&pi.inverse()).multiply(&sign_matrix(&pi));
        let id = SignMatrix::identity(pi.steps());
        let expected: Vec<i64> = id.entries().iter().map(|&e| e as i64).collect();
        prop_assert_eq!(prod, expected);
    }

    #[test]
    fn laplace_symmetries(pi in permutation(2..=8)) {
        let p = laplace_probability(&pi);
        prop_assert_eq!(&laplace_probability(&pi.reverse()), &p);
        prop_assert_eq!(&laplace_probability(&pi.complement()), &p);
    }

    #[test]
    fn uniform_symmetries(pi in permutation(2..=6)) {
        let k = count_alcoves(&pi).unwrap();
        prop_assert_eq!(count_alcoves(&pi.reverse()).unwrap(), k);
        prop_assert_eq!(count_alcoves(&pi.complement()).unwrap(), k);
    }

    #[test]
    fn compare_is_antisymmetric(pi in permutation(4..=4), tau in permutation(4..=4)) {
        prop_assert_eq!(compare(&pi, &tau).unwrap(), compare(&tau, &pi).unwrap().flip());
        prop_assert_eq!(compare(&pi, &pi).unwrap(), Comparison::Equal);
    }

    #[test]
    fn alcove_of_point_in_polytope_lies_below_maximum(pi in permutation(3..=6), gaps in prop::collection::vec(0.001..1.0f64, 5)) {
        let y = &gaps[..pi.steps()];
        let steps = sign_matrix(&pi).apply(y);
        prop_assume!(steps.iter().all(|s| s.abs() < 1.0));
        let top = sommers_max_address(&root_ideal(&pi)).unwrap();
        prop_assert!(AlcoveAddress::of_point(y).pointwise_le(&top));
    }
}

#[test]
fn interval_length_matches_alcove_count() {
    for m in 3..=6 {
        for pi in Permutation::all(m) {
            let top = sommers_max_address(&root_ideal(&pi)).unwrap();
            let interval = enumerate_interval(&top).unwrap();
            assert_eq!(interval.len() as u64, count_alcoves(&pi).unwrap(), "{pi}");
        }
    }
}
