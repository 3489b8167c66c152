use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{needs_matrix, split_by_role, GroupAssignment, RobotSnapshot, Role, Strategy};
use crate::error::{Error, Result};
use crate::needs::WeightVector;
use crate::trust::{group_group_trust, intra_group_trust, RneConfig, TrustValue};

/// An equal split of a member set. `score` is the trust from `half_a` to
/// `half_b` once the split has been evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bipartition {
    pub half_a: Vec<String>,
    pub half_b: Vec<String>,
    pub score: Option<TrustValue>,
}

impl Bipartition {
    fn members(&self) -> impl Iterator<Item = &String> {
        self.half_a.iter().chain(&self.half_b)
    }

    fn score_value(&self) -> f64 {
        self.score.map_or(f64::NEG_INFINITY, TrustValue::value)
    }
}

/// Index sets of size `m` over `0..n` that contain index 0, in
/// lexicographic order. Each one names `half_a` of a distinct unordered
/// split, so there are `C(n-1, m-1)` of them.
fn first_halves(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0];
    extend_halves(1, n, m, &mut current, &mut out);
    out
}

fn extend_halves(next: usize, n: usize, m: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if current.len() == m {
        out.push(current.clone());
        return;
    }
    let still_needed = m - current.len();
    for i in next..=(n - still_needed) {
        current.push(i);
        extend_halves(i + 1, n, m, current, out);
        current.pop();
    }
}

/// Every way of splitting `members` into two halves of size `m`.
///
/// Mirror images are listed once: `half_a` always holds the smallest id.
/// Output is ordered by the id sequence of `half_a`.
pub fn all_bipartitions(members: &[RobotSnapshot], m: usize) -> Result<Vec<Bipartition>> {
    if m == 0 {
        return Err(Error::Partition("partition point must be at least 1".into()));
    }
    if members.len() != 2 * m {
        return Err(Error::Partition(format!(
            "{} members cannot be split into two halves of {m}",
            members.len()
        )));
    }
    let mut ids: Vec<&str> = members.iter().map(|r| r.id.as_str()).collect();
    ids.sort_unstable();
    if ids.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Partition("duplicate member id".into()));
    }

    Ok(first_halves(ids.len(), m)
        .into_iter()
        .map(|half| {
            let in_a: BTreeSet<usize> = half.into_iter().collect();
            let (a, b): (Vec<_>, Vec<_>) = ids
                .iter()
                .enumerate()
                .partition(|(i, _)| in_a.contains(i));
            Bipartition {
                half_a: a.into_iter().map(|(_, id)| id.to_string()).collect(),
                half_b: b.into_iter().map(|(_, id)| id.to_string()).collect(),
                score: None,
            }
        })
        .collect())
}

fn lookup<'a>(
    roster: &BTreeMap<&str, &'a RobotSnapshot>,
    ids: &[String],
) -> Result<Vec<&'a RobotSnapshot>> {
    ids.iter()
        .map(|id| {
            roster
                .get(id.as_str())
                .copied()
                .ok_or_else(|| Error::Partition(format!("unknown member {id}")))
        })
        .collect()
}

fn index(robots: &[RobotSnapshot]) -> BTreeMap<&str, &RobotSnapshot> {
    robots.iter().map(|r| (r.id.as_str(), r)).collect()
}

fn score_halves(
    roster: &BTreeMap<&str, &RobotSnapshot>,
    half_a: &[String],
    half_b: &[String],
    weights: &WeightVector,
    cfg: &RneConfig,
) -> Result<TrustValue> {
    let a = needs_matrix(lookup(roster, half_a)?)?;
    let b = needs_matrix(lookup(roster, half_b)?)?;
    group_group_trust(&a, &b, weights, cfg)
}

/// The split of a single-role group whose halves differ most in needs,
/// i.e. with the largest trust value from `half_a` to `half_b`.
///
/// Ties keep the earliest split in enumeration order.
pub fn best_split(
    members: &[RobotSnapshot],
    weights: &WeightVector,
    cfg: &RneConfig,
) -> Result<Bipartition> {
    let first = members
        .first()
        .ok_or_else(|| Error::Degenerate("no members to split".into()))?;
    if members.iter().any(|r| r.role != first.role) {
        return Err(Error::Partition("best_split expects a single role".into()));
    }
    if !members.len().is_multiple_of(2) {
        return Err(Error::Partition(format!(
            "{} members cannot be split evenly",
            members.len()
        )));
    }
    let roster = index(members);
    let mut best: Option<Bipartition> = None;
    for mut split in all_bipartitions(members, members.len() / 2)? {
        split.score = Some(score_halves(&roster, &split.half_a, &split.half_b, weights, cfg)?);
        if best
            .as_ref()
            .is_none_or(|b| split.score_value() > b.score_value())
        {
            best = Some(split);
        }
    }
    best.ok_or_else(|| Error::Degenerate("no split available".into()))
}

fn union_sorted(a: &[String], b: &[String]) -> Vec<String> {
    let mut out: Vec<String> = a.iter().chain(b).cloned().collect();
    out.sort();
    out
}

/// Joins two splits of disjoint pools into one split of their union.
///
/// Both pairings `(a1+b1 | a2+b2)` and `(a1+b2 | a2+b1)` are scored by the
/// trust from the side holding `a1` to the other side; the larger wins and
/// ties go to the first pairing.
pub fn merge_step(
    split_a: &Bipartition,
    split_b: &Bipartition,
    robots: &[RobotSnapshot],
    weights: &WeightVector,
    cfg: &RneConfig,
) -> Result<Bipartition> {
    let pool_a: BTreeSet<&String> = split_a.members().collect();
    if split_b.members().any(|id| pool_a.contains(id)) {
        return Err(Error::Partition("merged splits share members".into()));
    }
    let roster = index(robots);
    let candidates = [
        (
            union_sorted(&split_a.half_a, &split_b.half_a),
            union_sorted(&split_a.half_b, &split_b.half_b),
        ),
        (
            union_sorted(&split_a.half_a, &split_b.half_b),
            union_sorted(&split_a.half_b, &split_b.half_a),
        ),
    ];
    let mut best: Option<Bipartition> = None;
    for (half_a, half_b) in candidates {
        let score = score_halves(&roster, &half_a, &half_b, weights, cfg)?;
        let merged = Bipartition {
            half_a,
            half_b,
            score: Some(score),
        };
        if best
            .as_ref()
            .is_none_or(|b| merged.score_value() > b.score_value())
        {
            best = Some(merged);
        }
    }
    Ok(best.expect("two candidates were scored"))
}

/// Bottom-up trust grouping.
///
/// Each role is split on its own, carriers are merged with suppliers, and
/// the result is merged with observers. Of the two final halves, the one
/// with the lower mean pairwise RNE (the more mutually trusting group) takes
/// the hard task.
pub fn rne_grouping(
    robots: &[RobotSnapshot],
    weights: &WeightVector,
    cfg: &RneConfig,
) -> Result<GroupAssignment> {
    let by_role = split_by_role(robots)?;
    let mut diagnostics = BTreeMap::new();
    let mut merged: Option<Bipartition> = None;

    for (role, members) in by_role {
        if members.is_empty() {
            continue;
        }
        let owned: Vec<RobotSnapshot> = members.into_iter().cloned().collect();
        let split = best_split(&owned, weights, cfg)?;
        diagnostics.insert(format!("{role}_split"), split.score_value());
        merged = Some(match merged {
            None => split,
            Some(acc) => {
                let next = merge_step(&acc, &split, robots, weights, cfg)?;
                let key = match role {
                    Role::Supplier => "carrier_supplier_merge".to_string(),
                    Role::Observer => "final_merge".to_string(),
                    Role::Carrier => "merge".to_string(),
                };
                diagnostics.insert(key, next.score_value());
                next
            }
        });
    }

    let final_split =
        merged.ok_or_else(|| Error::Degenerate("cannot group an empty roster".into()))?;
    diagnostics.insert("inter_group".into(), final_split.score_value());

    let roster = index(robots);
    let intra = |ids: &[String]| -> Result<Option<f64>> {
        if ids.len() < 2 {
            return Ok(None);
        }
        Ok(Some(intra_group_trust(
            &needs_matrix(lookup(&roster, ids)?)?,
            weights,
            cfg,
        )?))
    };
    let intra_a = intra(&final_split.half_a)?;
    let intra_b = intra(&final_split.half_b)?;

    // Ties (and halves too small to score) keep half_a on the hard task.
    let a_is_hard = match (intra_a, intra_b) {
        (Some(a), Some(b)) => !(b < a),
        _ => true,
    };
    let (hard, easy, intra_hard, intra_easy) = if a_is_hard {
        (final_split.half_a, final_split.half_b, intra_a, intra_b)
    } else {
        (final_split.half_b, final_split.half_a, intra_b, intra_a)
    };
    if let Some(v) = intra_hard {
        diagnostics.insert("intra_hard".into(), v);
    }
    if let Some(v) = intra_easy {
        diagnostics.insert("intra_easy".into(), v);
    }

    Ok(GroupAssignment {
        hard_group: hard,
        easy_group: easy,
        strategy: Strategy::Rne,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Cell;
    use crate::grouping::default_weights;

    fn robot(id: &str, role: Role, needs: [f64; 7]) -> RobotSnapshot {
        RobotSnapshot::new(id, role, needs.to_vec(), Cell::new(0, 0)).unwrap()
    }

    fn plain(ids: &[&str]) -> Vec<RobotSnapshot> {
        ids.iter()
            .map(|id| robot(id, Role::Carrier, [1.0; 7]))
            .collect()
    }

    fn halves(b: &Bipartition) -> (Vec<&str>, Vec<&str>) {
        (
            b.half_a.iter().map(String::as_str).collect(),
            b.half_b.iter().map(String::as_str).collect(),
        )
    }

    #[test]
    fn four_members_give_three_splits() {
        let splits = all_bipartitions(&plain(&["d", "b", "a", "c"]), 2).unwrap();
        let got: Vec<_> = splits.iter().map(halves).collect();
        assert_eq!(
            got,
            vec![
                (vec!["a", "b"], vec!["c", "d"]),
                (vec!["a", "c"], vec!["b", "d"]),
                (vec!["a", "d"], vec!["b", "c"]),
            ]
        );
    }

    #[test]
    fn two_members_give_one_split() {
        let splits = all_bipartitions(&plain(&["b", "a"]), 1).unwrap();
        assert_eq!(splits.len(), 1);
        assert_eq!(halves(&splits[0]), (vec!["a"], vec!["b"]));
    }

    #[test]
    fn six_members_give_ten_splits() {
        let splits = all_bipartitions(&plain(&["a", "b", "c", "d", "e", "f"]), 3).unwrap();
        assert_eq!(splits.len(), 10);
    }

    #[test]
    fn odd_or_mismatched_counts_are_rejected() {
        assert!(matches!(
            all_bipartitions(&plain(&["a", "b", "c"]), 1),
            Err(Error::Partition(_))
        ));
        assert!(matches!(all_bipartitions(&plain(&[]), 0), Err(Error::Partition(_))));
        assert!(matches!(
            best_split(&plain(&["a", "b", "c"]), &default_weights(), &RneConfig::default()),
            Err(Error::Partition(_))
        ));
        assert!(matches!(
            best_split(&[], &default_weights(), &RneConfig::default()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn identical_pair_split_scores_zero() {
        let best = best_split(&plain(&["a", "b"]), &default_weights(), &RneConfig::default())
            .unwrap();
        assert_eq!(best.score.unwrap().value(), 0.0);
    }

    #[test]
    fn identical_members_fall_back_to_first_split() {
        let best = best_split(&plain(&["d", "c", "b", "a"]), &default_weights(), &RneConfig::default())
            .unwrap();
        assert_eq!(halves(&best), (vec!["a", "b"], vec!["c", "d"]));
    }

    #[test]
    fn high_and_low_carriers_are_separated() {
        let c = |id: &str, hp: f64, eng: f64| {
            robot(id, Role::Carrier, [hp, 0.9, 2.0, eng, 2.0, 6.0, 0.01])
        };
        let members = vec![c("a", 90.0, 90.0), c("b", 30.0, 30.0), c("c", 88.0, 88.0), c("d", 28.0, 28.0)];
        let w = default_weights();
        let cfg = RneConfig::default();
        let best = best_split(&members, &w, &cfg).unwrap();
        assert_eq!(halves(&best), (vec!["a", "c"], vec!["b", "d"]));

        // Every candidate scores strictly below the separating split.
        for split in all_bipartitions(&members, 2).unwrap() {
            if split.half_a != best.half_a {
                let roster = index(&members);
                let s = score_halves(&roster, &split.half_a, &split.half_b, &w, &cfg).unwrap();
                assert!(s.value() < best.score.unwrap().value());
            }
        }
    }

    #[test]
    fn merge_prefers_first_pairing_on_ties() {
        let robots = plain(&["a", "b", "c", "d"]);
        let sa = Bipartition {
            half_a: vec!["a".into()],
            half_b: vec!["b".into()],
            score: None,
        };
        let sb = Bipartition {
            half_a: vec!["c".into()],
            half_b: vec!["d".into()],
            score: None,
        };
        let merged = merge_step(&sa, &sb, &robots, &default_weights(), &RneConfig::default())
            .unwrap();
        assert_eq!(halves(&merged), (vec!["a", "c"], vec!["b", "d"]));
    }

    #[test]
    fn merge_aligns_high_with_high() {
        let c = |id: &str, lvl: f64| robot(id, Role::Carrier, [lvl, 0.9, 2.0, lvl, 2.0, 6.0, 0.01]);
        let s = |id: &str, lvl: f64| robot(id, Role::Supplier, [lvl, 0.9, 2.0, lvl, 20.0, 1.0, 0.01]);
        let robots = vec![c("c1", 95.0), c("c2", 35.0), s("s1", 95.0), s("s2", 35.0)];
        let carriers = Bipartition {
            half_a: vec!["c1".into()],
            half_b: vec!["c2".into()],
            score: None,
        };
        // Supplier split listed "low first" so the aligned merge is the
        // second pairing.
        let suppliers = Bipartition {
            half_a: vec!["s2".into()],
            half_b: vec!["s1".into()],
            score: None,
        };
        let w = default_weights();
        let cfg = RneConfig::default();
        let merged = merge_step(&carriers, &suppliers, &robots, &w, &cfg).unwrap();
        assert_eq!(halves(&merged), (vec!["c1", "s1"], vec!["c2", "s2"]));

        let roster = index(&robots);
        let other = score_halves(
            &roster,
            &["c1".to_string(), "s2".to_string()],
            &["c2".to_string(), "s1".to_string()],
            &w,
            &cfg,
        )
        .unwrap();
        assert!(merged.score.unwrap().value() > other.value());
    }

    #[test]
    fn merge_rejects_overlapping_pools() {
        let robots = plain(&["a", "b"]);
        let s = Bipartition {
            half_a: vec!["a".into()],
            half_b: vec!["b".into()],
            score: None,
        };
        assert!(matches!(
            merge_step(&s, &s, &robots, &default_weights(), &RneConfig::default()),
            Err(Error::Partition(_))
        ));
    }

    #[test]
    fn merge_with_observer_pair_scores_both_pairings() {
        let c = |id: &str, lvl: f64| robot(id, Role::Carrier, [lvl, 0.9, 2.0, lvl, 2.0, 6.0, 0.01]);
        let o = |id: &str, lvl: f64| robot(id, Role::Observer, [lvl / 2.0, 0.6, 12.0, lvl, 0.0, 0.0, 10.0]);
        let robots = vec![c("c1", 90.0), c("c2", 40.0), o("o1", 80.0), o("o2", 60.0)];
        let w = default_weights();
        let cfg = RneConfig::default();
        let cs = Bipartition {
            half_a: vec!["c1".into()],
            half_b: vec!["c2".into()],
            score: None,
        };
        let os = Bipartition {
            half_a: vec!["o1".into()],
            half_b: vec!["o2".into()],
            score: None,
        };
        let merged = merge_step(&cs, &os, &robots, &w, &cfg).unwrap();
        let roster = index(&robots);
        let s = |a: [&str; 2], b: [&str; 2]| {
            score_halves(
                &roster,
                &a.map(String::from),
                &b.map(String::from),
                &w,
                &cfg,
            )
            .unwrap()
            .value()
        };
        let first = s(["c1", "o1"], ["c2", "o2"]);
        let second = s(["c1", "o2"], ["c2", "o1"]);
        assert_eq!(merged.score.unwrap().value(), first.max(second));
    }
}
