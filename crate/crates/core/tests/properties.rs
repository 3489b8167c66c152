//! Randomized properties of needs distributions and trust.

mod common;

use common::props::*;
use proptest::prelude::*;
use rne_rescue::needs::{GroupNeedsMatrix, WeightVector};
use rne_rescue::trust::{group_group_trust, LogBase, RneConfig};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn rne_is_non_negative_and_zero_only_on_equal((p, q) in positive_pair()) {
        gibbs(&p, &q)?;
    }

    #[test]
    fn smoothed_rne_stays_finite_and_non_negative(
        (p, q) in positive_pair(),
        mask in prop::collection::vec(any::<bool>(), 1..8),
    ) {
        gibbs_smoothed(&p, &q, &mask)?;
    }

    #[test]
    fn trust_ignores_positive_scale((a, b, w) in needs_triple(), c in 1e-3f64..1e3) {
        scale_invariance(&a, &b, &w, c)?;
    }

    #[test]
    fn log_bases_differ_by_a_constant((p, q) in positive_pair()) {
        base_conversion(&p, &q)?;
    }

    #[test]
    fn distributions_are_normalized((a, b, w) in needs_triple()) {
        normalization(&a, &b, &w)?;
    }

    #[test]
    fn relabelling_categories_keeps_trust((a, b, w) in needs_triple(), shift in 0usize..8) {
        permutation_equivariance(&a, &b, &w, shift)?;
    }

    #[test]
    fn sorting_is_idempotent((p, _) in positive_pair()) {
        sort_idempotence(&p)?;
    }
}

#[test]
fn worked_group_pair_is_asymmetric() {
    let g1 = GroupNeedsMatrix::from_rows(vec![vec![82.0, 114.0, 24.0], vec![79.0, 117.0, 23.0]]).unwrap();
    let g2 = GroupNeedsMatrix::from_rows(vec![vec![40.0, 56.0, 12.0], vec![56.0, 48.0, 15.0]]).unwrap();
    let w = WeightVector::new(vec![6.0, 4.0, 2.0]).unwrap();
    let cfg = RneConfig::default().with_log_base(LogBase::Ten).with_truncation(2);
    let ab = group_group_trust(&g1, &g2, &w, &cfg).unwrap().value();
    let ba = group_group_trust(&g2, &g1, &w, &cfg).unwrap().value();
    assert!((ab - ba).abs() > 1e-3, "{ab} vs {ba}");
}
