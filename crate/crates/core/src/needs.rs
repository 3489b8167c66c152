//! Needs vectors, priority weights and the weighted needs distributions that
//! every trust computation consumes.
//!
//! A needs vector `n` combined with weights `w` gives the distribution
//! `d_k = n_k * w_k / sum_k(n_k * w_k)`. For a group, the member rows are
//! summed column-wise first and the same normalisation is applied to the
//! column sums. That reading of the matrix formula is the one that
//! reproduces the published group distributions, e.g. the two rows
//! `[82,114,24]` and `[79,117,23]` with weights `[6,4,2]` give column sums
//! `[161,231,47]`, weighted masses `[966,924,94]` and the distribution
//! `(0.4869, 0.4657, 0.0474)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when checking that a distribution sums to one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Ordered, non-negative needs magnitudes of one agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeedsVector {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    values: Vec<f64>,
}

impl NeedsVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let v = Self {
            labels: None,
            values,
        };
        v.validate()?;
        Ok(v)
    }

    pub fn with_labels(values: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        let v = Self {
            labels: Some(labels),
            values,
        };
        v.validate()?;
        Ok(v)
    }

    /// Re-checks the invariants. Needed after deserialisation.
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Degenerate("needs vector is empty".into()));
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.values.len() {
                return Err(Error::Dimension {
                    expected: self.values.len(),
                    actual: labels.len(),
                });
            }
        }
        for (k, &v) in self.values.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Domain(format!(
                    "need {k} must be a finite non-negative number, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self {
            labels: self.labels.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
        .checked()
    }

    fn checked(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    /// Total weighted needs mass `sum_k(n_k * w_k)`.
    pub fn weighted_mass(&self, weights: &WeightVector) -> Result<f64> {
        check_len(weights.len(), self.len())?;
        Ok(self
            .values
            .iter()
            .zip(weights.values())
            .map(|(n, w)| n * w)
            .sum())
    }
}

/// Strictly positive priority weights, one per need category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    weights: Vec<f64>,
}

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        let w = Self { weights };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.is_empty() {
            return Err(Error::Degenerate("weight vector is empty".into()));
        }
        for (k, &w) in self.weights.iter().enumerate() {
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::Domain(format!(
                    "weight {k} must be strictly positive, got {w}"
                )));
            }
        }
        Ok(())
    }

    pub fn values(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Probabilities derived from weighted needs.
///
/// `normalized` is false only for distributions produced by
/// [`NeedsDistribution::truncated`], whose mass is generally below one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeedsDistribution {
    probs: Vec<f64>,
    normalized: bool,
}

impl NeedsDistribution {
    /// Builds a normalized distribution from raw probabilities, checking the
    /// unit-mass invariant.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        check_probs(&probs)?;
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::Domain(format!(
                "distribution must sum to 1, sums to {total}"
            )));
        }
        Ok(Self {
            probs,
            normalized: true,
        })
    }

    /// Wraps probabilities that are not required to sum to one, such as
    /// distributions that were rounded by hand.
    pub fn unnormalized(probs: Vec<f64>) -> Result<Self> {
        check_probs(&probs)?;
        Ok(Self {
            probs,
            normalized: false,
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Floors every probability to `decimals` places. The result is flagged
    /// as unnormalized.
    pub fn truncated(&self, decimals: u32) -> Self {
        let scale = 10f64.powi(decimals as i32);
        Self {
            probs: self
                .probs
                .iter()
                .map(|p| {
                    // Guard against 0.48 * 100 = 47.999999.
                    let scaled = p * scale;
                    let nearest = scaled.round();
                    let floored = if (scaled - nearest).abs() < 1e-9 {
                        nearest
                    } else {
                        scaled.floor()
                    };
                    floored / scale
                })
                .collect(),
            normalized: false,
        }
    }
}

/// Needs of every member of a group, one row per member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupNeedsMatrix {
    rows: Vec<NeedsVector>,
}

impl GroupNeedsMatrix {
    pub fn new(rows: Vec<NeedsVector>) -> Result<Self> {
        let g = Self { rows };
        g.validate()?;
        Ok(g)
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(
            rows.into_iter()
                .map(NeedsVector::new)
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let first = self
            .rows
            .first()
            .ok_or_else(|| Error::Degenerate("group has no members".into()))?;
        for row in &self.rows {
            row.validate()?;
            check_len(first.len(), row.len())?;
        }
        Ok(())
    }

    pub fn rows(&self) -> &[NeedsVector] {
        &self.rows
    }

    pub fn members(&self) -> usize {
        self.rows.len()
    }

    /// Needs space dimension `j`.
    pub fn dimension(&self) -> usize {
        self.rows.first().map_or(0, NeedsVector::len)
    }

    /// Column sums `sum_i n_ik`.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.dimension()];
        for row in &self.rows {
            for (s, v) in sums.iter_mut().zip(row.values()) {
                *s += v;
            }
        }
        sums
    }
}

/// Normalizes one agent's needs against the priority weights.
pub fn normalize_needs(needs: &NeedsVector, weights: &WeightVector) -> Result<NeedsDistribution> {
    needs.validate()?;
    check_len(weights.len(), needs.len())?;
    weighted_distribution(needs.values(), weights.values())
}

/// Distribution of a whole group, taken over the column sums of its needs
/// matrix.
pub fn group_distribution(
    group: &GroupNeedsMatrix,
    weights: &WeightVector,
) -> Result<NeedsDistribution> {
    group.validate()?;
    check_len(weights.len(), group.dimension())?;
    weighted_distribution(&group.column_sums(), weights.values())
}

fn weighted_distribution(needs: &[f64], weights: &[f64]) -> Result<NeedsDistribution> {
    let masses: Vec<f64> = needs.iter().zip(weights).map(|(n, w)| n * w).collect();
    let total: f64 = masses.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::Degenerate(
            "weighted needs mass is zero; distribution is undefined".into(),
        ));
    }
    Ok(NeedsDistribution {
        probs: masses.into_iter().map(|m| m / total).collect(),
        normalized: true,
    })
}

/// Reorders probabilities in descending order. Category alignment is lost.
pub fn sort_distribution(dist: &NeedsDistribution) -> NeedsDistribution {
    let mut probs = dist.probs.clone();
    probs.sort_by(|a, b| b.total_cmp(a));
    NeedsDistribution {
        probs,
        normalized: dist.normalized,
    }
}

/// Behaviour weights paired with the probability that each behaviour is
/// appropriate given the agent's current observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectationTerms {
    pub weights: Vec<f64>,
    pub probs: Vec<f64>,
}

impl ExpectationTerms {
    pub fn new(weights: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        let t = Self { weights, probs };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.is_empty() {
            return Err(Error::Degenerate("expectation has no terms".into()));
        }
        check_len(self.weights.len(), self.probs.len())?;
        check_probs(&self.probs)
    }
}

/// Needs expectation `sum_i weight_i * prob_i`, or 0 when the level below is
/// not satisfied.
pub fn needs_expectation(terms: &ExpectationTerms, lower_gate: bool) -> Result<f64> {
    terms.validate()?;
    if !lower_gate {
        return Ok(0.0);
    }
    Ok(terms
        .weights
        .iter()
        .zip(&terms.probs)
        .map(|(w, p)| w * p)
        .sum())
}

/// The four levels of the needs hierarchy, each computed only when the
/// levels beneath it are satisfied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeedsLevels {
    pub safety: f64,
    pub basic: f64,
    pub capability: f64,
    pub teaming: f64,
    /// `[safety, basic, capability, teaming]`
    pub gate_satisfied: [bool; 4],
}

/// Expectation terms for each level plus the minimum value a level must
/// reach before the next one is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeedsHierarchy {
    pub safety: ExpectationTerms,
    pub basic: ExpectationTerms,
    pub capability: ExpectationTerms,
    pub teaming: ExpectationTerms,
    /// Satisfaction thresholds for safety, basic and capability.
    pub thresholds: [f64; 3],
}

impl NeedsHierarchy {
    pub fn evaluate(&self) -> Result<NeedsLevels> {
        let levels = [&self.safety, &self.basic, &self.capability, &self.teaming];
        let mut values = [0.0; 4];
        let mut satisfied = [false; 4];
        let mut gate = true;
        for (i, terms) in levels.into_iter().enumerate() {
            values[i] = needs_expectation(terms, gate)?;
            satisfied[i] = gate && self.thresholds.get(i).is_none_or(|&t| values[i] >= t);
            gate = satisfied[i];
        }
        Ok(NeedsLevels {
            safety: values[0],
            basic: values[1],
            capability: values[2],
            teaming: values[3],
            gate_satisfied: satisfied,
        })
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::Dimension { expected, actual });
    }
    Ok(())
}

fn check_probs(probs: &[f64]) -> Result<()> {
    for (k, &p) in probs.iter().enumerate() {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!(
                "probability {k} must lie in [0, 1], got {p}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w642() -> WeightVector {
        WeightVector::new(vec![6.0, 4.0, 2.0]).unwrap()
    }

    fn assert_probs(actual: &NeedsDistribution, expected: &[f64], tol: f64) {
        assert_eq!(actual.len(), expected.len());
        for (a, e) in actual.probs().iter().zip(expected) {
            assert!((a - e).abs() <= tol, "{:?} vs {:?}", actual.probs(), expected);
        }
    }

    #[test]
    fn normalizes_weighted_needs() {
        let d = normalize_needs(&NeedsVector::new(vec![86.0, 120.0, 30.0]).unwrap(), &w642())
            .unwrap();
        assert_probs(&d, &[0.4886, 0.4545, 0.0568], 5e-5);
        let d = normalize_needs(&NeedsVector::new(vec![20.0, 30.0, 10.0]).unwrap(), &w642())
            .unwrap();
        assert_probs(&d, &[0.4615, 0.4615, 0.0769], 5e-5);
        assert!(d.is_normalized());
    }

    #[test]
    fn uniform_needs_give_uniform_distribution() {
        let d = normalize_needs(
            &NeedsVector::new(vec![5.0; 3]).unwrap(),
            &WeightVector::new(vec![1.0; 3]).unwrap(),
        )
        .unwrap();
        assert_probs(&d, &[1.0 / 3.0; 3], 1e-15);
    }

    #[test]
    fn rejects_mismatched_and_degenerate_inputs() {
        let n = NeedsVector::new(vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            normalize_needs(&n, &w642()),
            Err(Error::Dimension { expected: 3, actual: 2 })
        ));
        let zero = NeedsVector::new(vec![0.0; 3]).unwrap();
        assert!(matches!(normalize_needs(&zero, &w642()), Err(Error::Degenerate(_))));
        assert!(NeedsVector::new(vec![1.0, -1.0]).is_err());
        assert!(NeedsVector::new(vec![]).is_err());
        assert!(WeightVector::new(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn group_distribution_uses_column_sums() {
        let g1 = GroupNeedsMatrix::from_rows(vec![
            vec![82.0, 114.0, 24.0],
            vec![79.0, 117.0, 23.0],
        ])
        .unwrap();
        let g2 = GroupNeedsMatrix::from_rows(vec![
            vec![40.0, 56.0, 12.0],
            vec![56.0, 48.0, 15.0],
        ])
        .unwrap();
        assert_probs(&group_distribution(&g1, &w642()).unwrap(), &[0.4869, 0.4657, 0.0474], 5e-5);
        assert_probs(&group_distribution(&g2, &w642()).unwrap(), &[0.5507, 0.3977, 0.0516], 5e-5);
    }

    #[test]
    fn single_member_group_collapses_to_agent() {
        let n = NeedsVector::new(vec![86.0, 120.0, 30.0]).unwrap();
        let g = GroupNeedsMatrix::new(vec![n.clone()]).unwrap();
        assert_eq!(
            group_distribution(&g, &w642()).unwrap(),
            normalize_needs(&n, &w642()).unwrap()
        );
    }

    #[test]
    fn empty_group_is_degenerate() {
        assert!(matches!(GroupNeedsMatrix::new(vec![]), Err(Error::Degenerate(_))));
        assert!(matches!(
            GroupNeedsMatrix::from_rows(vec![vec![1.0, 2.0], vec![1.0]]),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn sort_is_descending_and_idempotent() {
        let d = NeedsDistribution::from_probs(vec![0.1, 0.6, 0.3]).unwrap();
        let s = sort_distribution(&d);
        assert_eq!(s.probs(), &[0.6, 0.3, 0.1]);
        assert_eq!(sort_distribution(&s), s);

        let already = NeedsDistribution::from_probs(vec![0.4886, 0.4545, 0.0569]).unwrap();
        assert_eq!(sort_distribution(&already), already);
    }

    #[test]
    fn truncation_floors_to_decimals() {
        let d = NeedsDistribution::from_probs(vec![0.4869, 0.4657, 0.0474]).unwrap();
        let t = d.truncated(2);
        assert_eq!(t.probs(), &[0.48, 0.46, 0.04]);
        assert!(!t.is_normalized());
        let d = NeedsDistribution::from_probs(vec![0.5507, 0.3977, 0.0516]).unwrap();
        assert_eq!(d.truncated(2).probs(), &[0.55, 0.39, 0.05]);
    }

    #[test]
    fn expectation_is_gated_dot_product() {
        let t = ExpectationTerms::new(vec![2.0, 3.0], vec![0.5, 0.5]).unwrap();
        assert_eq!(needs_expectation(&t, true).unwrap(), 2.5);
        assert_eq!(needs_expectation(&t, false).unwrap(), 0.0);
        let certain = ExpectationTerms::new(vec![4.0], vec![1.0]).unwrap();
        assert_eq!(needs_expectation(&certain, true).unwrap(), 4.0);
        assert!(ExpectationTerms::new(vec![1.0], vec![1.5]).is_err());
        assert!(ExpectationTerms::new(vec![1.0, 2.0], vec![0.5]).is_err());
    }

    #[test]
    fn hierarchy_stops_at_first_unsatisfied_level() {
        let terms = |w: f64, p: f64| ExpectationTerms::new(vec![w], vec![p]).unwrap();
        let h = NeedsHierarchy {
            safety: terms(1.0, 0.9),
            basic: terms(1.0, 0.2),
            capability: terms(2.0, 1.0),
            teaming: terms(3.0, 1.0),
            thresholds: [0.5, 0.5, 0.5],
        };
        let levels = h.evaluate().unwrap();
        assert_eq!(levels.gate_satisfied, [true, false, false, false]);
        assert_eq!(levels.basic, 0.2);
        assert_eq!(levels.capability, 0.0);
        assert_eq!(levels.teaming, 0.0);
    }
}
