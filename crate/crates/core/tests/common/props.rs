//! Trust properties as reusable checks, so the property suite and the
//! acceptance gate run the same assertions.

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rne_rescue::needs::{
    group_distribution, normalize_needs, sort_distribution, GroupNeedsMatrix, NeedsDistribution, NeedsVector,
    WeightVector,
};
use rne_rescue::trust::{agent_agent_trust, rne, LogBase, RneConfig};

/// Independent reference: Σ p ln(p/q) with the 0·ln 0 = 0 convention.
pub fn kl_oracle(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| a * (a / b).ln())
        .sum()
}

fn normalized(raw: &[f64]) -> Vec<f64> {
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

/// Two positive raw vectors of the same length, 2..=8.
pub fn positive_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..=8).prop_flat_map(|n| {
        (
            prop::collection::vec(1e-3f64..100.0, n),
            prop::collection::vec(1e-3f64..100.0, n),
        )
    })
}

/// Needs, trustee needs and weights of one length.
pub fn needs_triple() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    (2usize..=8).prop_flat_map(|n| {
        (
            prop::collection::vec(1e-2f64..200.0, n),
            prop::collection::vec(1e-2f64..200.0, n),
            prop::collection::vec(0.1f64..10.0, n),
        )
    })
}

/// Non-negativity, zero on identical inputs, Pinsker's lower bound, and
/// agreement with the reference sum.
pub fn gibbs(p: &[f64], q: &[f64]) -> Result<(), TestCaseError> {
    let cfg = RneConfig::default();
    let pd = NeedsDistribution::from_probs(normalized(p)).unwrap();
    let qd = NeedsDistribution::from_probs(normalized(q)).unwrap();
    let d = rne(&pd, &qd, &cfg).unwrap().value();
    prop_assert!(d >= -1e-12, "negative rne {d}");
    let same = rne(&pd, &pd, &cfg).unwrap().value();
    prop_assert!(same.abs() <= 1e-12, "rne(p, p) = {same}");
    let l1: f64 = pd.probs().iter().zip(qd.probs()).map(|(a, b)| (a - b).abs()).sum();
    prop_assert!(d >= 0.5 * l1 * l1 - 1e-12, "rne {d} below Pinsker bound for l1 {l1}");
    prop_assert!((d - kl_oracle(pd.probs(), qd.probs())).abs() <= 1e-12);
    Ok(())
}

/// Same as [`gibbs`] for the smoothed regime: zero out some trustee
/// components, per `mask`.
pub fn gibbs_smoothed(p: &[f64], q: &[f64], mask: &[bool]) -> Result<(), TestCaseError> {
    let mut q: Vec<f64> = q.iter().zip(mask.iter().cycle()).map(|(&x, &z)| if z { 0.0 } else { x }).collect();
    if q.iter().all(|&x| x == 0.0) {
        q[0] = 1.0;
    }
    let cfg = RneConfig::default();
    let pd = NeedsDistribution::from_probs(normalized(p)).unwrap();
    let qd = NeedsDistribution::from_probs(normalized(&q)).unwrap();
    let d = rne(&pd, &qd, &cfg).unwrap();
    prop_assert!(!d.is_infinite());
    prop_assert!(d.value() >= -1e-9, "negative smoothed rne {}", d.value());
    prop_assert!(rne(&qd, &qd, &cfg).unwrap().value().abs() <= 1e-9);
    Ok(())
}

/// Scaling either agent's needs by `c` leaves trust unchanged.
pub fn scale_invariance(a: &[f64], b: &[f64], w: &[f64], c: f64) -> Result<(), TestCaseError> {
    let cfg = RneConfig::default();
    let w = WeightVector::new(w.to_vec()).unwrap();
    let a = NeedsVector::new(a.to_vec()).unwrap();
    let b = NeedsVector::new(b.to_vec()).unwrap();
    let t = agent_agent_trust(&a, &b, &w, &cfg).unwrap().value();
    let ta = agent_agent_trust(&a.scaled(c).unwrap(), &b, &w, &cfg).unwrap().value();
    let tb = agent_agent_trust(&a, &b.scaled(c).unwrap(), &w, &cfg).unwrap().value();
    prop_assert!((t - ta).abs() <= 1e-12, "{t} vs {ta}");
    prop_assert!((t - tb).abs() <= 1e-12, "{t} vs {tb}");
    Ok(())
}

/// rne in base 10 and 2 equal the natural-log value over ln 10 and ln 2.
pub fn base_conversion(p: &[f64], q: &[f64]) -> Result<(), TestCaseError> {
    let pd = NeedsDistribution::from_probs(normalized(p)).unwrap();
    let qd = NeedsDistribution::from_probs(normalized(q)).unwrap();
    let nat = rne(&pd, &qd, &RneConfig::default()).unwrap().value();
    let ten = rne(&pd, &qd, &RneConfig::default().with_log_base(LogBase::Ten))
        .unwrap()
        .value();
    let two = rne(&pd, &qd, &RneConfig::default().with_log_base(LogBase::Two))
        .unwrap()
        .value();
    prop_assert!((ten - nat / std::f64::consts::LN_10).abs() <= 1e-12);
    prop_assert!((two - nat / std::f64::consts::LN_2).abs() <= 1e-12);
    Ok(())
}

/// Agent and group distributions sum to one and match weighted masses.
pub fn normalization(a: &[f64], b: &[f64], w: &[f64]) -> Result<(), TestCaseError> {
    let wv = WeightVector::new(w.to_vec()).unwrap();
    let d = normalize_needs(&NeedsVector::new(a.to_vec()).unwrap(), &wv).unwrap();
    prop_assert!((d.mass() - 1.0).abs() <= 1e-9);
    let masses: Vec<f64> = a.iter().zip(w).map(|(x, y)| x * y).collect();
    for (got, want) in d.probs().iter().zip(normalized(&masses)) {
        prop_assert!((got - want).abs() <= 1e-12);
    }
    let g = GroupNeedsMatrix::from_rows(vec![a.to_vec(), b.to_vec()]).unwrap();
    let gd = group_distribution(&g, &wv).unwrap();
    prop_assert!((gd.mass() - 1.0).abs() <= 1e-9);
    prop_assert!(gd.probs().iter().all(|&x| x > 0.0));
    Ok(())
}

/// Relabelling the categories consistently leaves trust unchanged.
pub fn permutation_equivariance(a: &[f64], b: &[f64], w: &[f64], shift: usize) -> Result<(), TestCaseError> {
    let rot = |v: &[f64]| {
        let mut v = v.to_vec();
        let k = shift % v.len();
        v.rotate_left(k);
        v.reverse();
        v
    };
    let cfg = RneConfig::default();
    let t = |a: Vec<f64>, b: Vec<f64>, w: Vec<f64>| {
        agent_agent_trust(
            &NeedsVector::new(a).unwrap(),
            &NeedsVector::new(b).unwrap(),
            &WeightVector::new(w).unwrap(),
            &cfg,
        )
        .unwrap()
        .value()
    };
    let before = t(a.to_vec(), b.to_vec(), w.to_vec());
    let after = t(rot(a), rot(b), rot(w));
    prop_assert!((before - after).abs() <= 1e-12, "{before} vs {after}");
    Ok(())
}

/// Sorting is idempotent, keeps the multiset and leaves a descending list.
pub fn sort_idempotence(p: &[f64]) -> Result<(), TestCaseError> {
    let d = NeedsDistribution::from_probs(normalized(p)).unwrap();
    let once = sort_distribution(&d);
    let twice = sort_distribution(&once);
    prop_assert_eq!(&once, &twice);
    prop_assert!(once.probs().windows(2).all(|w| w[0] >= w[1]));
    let mut a = d.probs().to_vec();
    let mut b = once.probs().to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    prop_assert_eq!(a, b);
    Ok(())
}
