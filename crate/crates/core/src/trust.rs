//! Relative Needs Entropy (RNE) trust.
//!
//! Trust from a trustor with needs distribution `p` to a trustee with
//! distribution `q` is the relative entropy `sum_k p_k * log(p_k / q_k)`.
//! Lower values mean better aligned needs and therefore higher trust. The
//! measure is asymmetric: `T(a||b)` and `T(b||a)` generally differ.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::needs::{
    group_distribution, normalize_needs, sort_distribution, GroupNeedsMatrix, NeedsDistribution,
    NeedsVector, WeightVector,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "natural", alias = "e")]
    Natural,
    #[serde(rename = "10")]
    Ten,
    #[serde(rename = "2")]
    Two,
}

impl LogBase {
    fn ln_base(self) -> f64 {
        match self {
            LogBase::Natural => 1.0,
            LogBase::Ten => std::f64::consts::LN_10,
            LogBase::Two => std::f64::consts::LN_2,
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "natural" | "e" | "ln" => Ok(LogBase::Natural),
            "10" => Ok(LogBase::Ten),
            "2" => Ok(LogBase::Two),
            other => Err(Error::Config(format!(
                "unknown log base {other:?}; expected natural, 10 or 2"
            ))),
        }
    }
}

/// Floor-truncation of distributions to a fixed number of decimals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub decimals: u32,
}

/// Numeric conventions for every trust computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RneConfig {
    pub log_base: LogBase,
    /// Additive smoothing applied when a trustee component is zero.
    pub epsilon: f64,
    pub smoothing_enabled: bool,
    /// Sort distributions descending before comparing them.
    pub sort_mode: bool,
    pub truncation: Option<Truncation>,
}

impl Default for RneConfig {
    fn default() -> Self {
        Self {
            log_base: LogBase::Natural,
            epsilon: 1e-9,
            smoothing_enabled: true,
            sort_mode: false,
            truncation: None,
        }
    }
}

impl RneConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::Config(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if let Some(t) = self.truncation {
            if t.decimals < 1 {
                return Err(Error::Config("truncation needs at least 1 decimal".into()));
            }
        }
        Ok(())
    }

    pub fn with_log_base(mut self, base: LogBase) -> Self {
        self.log_base = base;
        self
    }

    pub fn with_truncation(mut self, decimals: u32) -> Self {
        self.truncation = Some(Truncation { decimals });
        self
    }

    pub fn strict(mut self) -> Self {
        self.smoothing_enabled = false;
        self
    }

    /// Applies the configured sort and truncation to a freshly normalized
    /// distribution.
    pub fn prepare(&self, dist: NeedsDistribution) -> NeedsDistribution {
        let dist = if self.sort_mode {
            sort_distribution(&dist)
        } else {
            dist
        };
        match self.truncation {
            Some(t) => dist.truncated(t.decimals),
            None => dist,
        }
    }
}

/// An RNE trust value. `+inf` only arises in strict mode.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TrustValue(f64);

impl TrustValue {
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl From<TrustValue> for f64 {
    fn from(t: TrustValue) -> f64 {
        t.0
    }
}

impl fmt::Display for TrustValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}", self.0)
    }
}

/// Relative entropy of `q` from the point of view of `p`.
///
/// Terms with `p_k = 0` contribute nothing. When some `q_k = 0` while
/// `p_k > 0`, smoothing mode shifts both operands by `epsilon` and
/// renormalizes; strict mode returns `+inf`.
pub fn rne(p: &NeedsDistribution, q: &NeedsDistribution, cfg: &RneConfig) -> Result<TrustValue> {
    if p.len() != q.len() {
        return Err(Error::Dimension {
            expected: p.len(),
            actual: q.len(),
        });
    }
    if p.is_empty() {
        return Err(Error::Degenerate("empty distributions".into()));
    }
    if p.probs().iter().chain(q.probs()).any(|&x| x < 0.0) {
        return Err(Error::Domain("negative probability".into()));
    }

    let needs_smoothing = p
        .probs()
        .iter()
        .zip(q.probs())
        .any(|(&pk, &qk)| pk > 0.0 && qk == 0.0);
    if needs_smoothing && !cfg.smoothing_enabled {
        return Ok(TrustValue(f64::INFINITY));
    }

    let total = if needs_smoothing {
        let denom = 1.0 + cfg.epsilon * p.len() as f64;
        let smooth = |x: f64| (x + cfg.epsilon) / denom;
        relative_entropy_ln(
            p.probs().iter().map(|&x| smooth(x)),
            q.probs().iter().map(|&x| smooth(x)),
        )
    } else {
        relative_entropy_ln(p.probs().iter().copied(), q.probs().iter().copied())
    };
    Ok(TrustValue(total / cfg.log_base.ln_base()))
}

fn relative_entropy_ln(p: impl Iterator<Item = f64>, q: impl Iterator<Item = f64>) -> f64 {
    p.zip(q)
        .filter(|&(pk, _)| pk > 0.0)
        .map(|(pk, qk)| pk * (pk / qk).ln())
        .sum()
}

/// Trust from one agent to another, both described by raw needs.
pub fn agent_agent_trust(
    trustor: &NeedsVector,
    trustee: &NeedsVector,
    weights: &WeightVector,
    cfg: &RneConfig,
) -> Result<TrustValue> {
    let p = cfg.prepare(normalize_needs(trustor, weights)?);
    let q = cfg.prepare(normalize_needs(trustee, weights)?);
    rne(&p, &q, cfg)
}

/// Trust from an agent to a group.
pub fn agent_group_trust(
    trustor: &NeedsVector,
    group: &GroupNeedsMatrix,
    weights: &WeightVector,
    cfg: &RneConfig,
) -> Result<TrustValue> {
    let p = cfg.prepare(normalize_needs(trustor, weights)?);
    let q = cfg.prepare(group_distribution(group, weights)?);
    rne(&p, &q, cfg)
}

/// Trust from one group to another.
pub fn group_group_trust(
    trustor: &GroupNeedsMatrix,
    trustee: &GroupNeedsMatrix,
    weights: &WeightVector,
    cfg: &RneConfig,
) -> Result<TrustValue> {
    let p = cfg.prepare(group_distribution(trustor, weights)?);
    let q = cfg.prepare(group_distribution(trustee, weights)?);
    rne(&p, &q, cfg)
}

/// Mean agent-to-agent trust over all ordered member pairs. Lower scores mean
/// a more mutually trusting group.
pub fn intra_group_trust(
    group: &GroupNeedsMatrix,
    weights: &WeightVector,
    cfg: &RneConfig,
) -> Result<f64> {
    group.validate()?;
    let rows = group.rows();
    if rows.len() < 2 {
        return Err(Error::Degenerate(
            "intra-group trust needs at least two members".into(),
        ));
    }
    let dists = rows
        .iter()
        .map(|r| normalize_needs(r, weights).map(|d| cfg.prepare(d)))
        .collect::<Result<Vec<_>>>()?;
    let mut total = 0.0;
    let mut pairs = 0usize;
    for (i, p) in dists.iter().enumerate() {
        for (j, q) in dists.iter().enumerate() {
            if i != j {
                total += rne(p, q, cfg)?.value();
                pairs += 1;
            }
        }
    }
    Ok(total / pairs as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w642() -> WeightVector {
        WeightVector::new(vec![6.0, 4.0, 2.0]).unwrap()
    }

    fn needs(v: &[f64]) -> NeedsVector {
        NeedsVector::new(v.to_vec()).unwrap()
    }

    // Term-by-term evaluation, written separately from `rne`.
    fn kl_oracle(p: &[f64], q: &[f64]) -> f64 {
        let mut acc = 0.0;
        for k in 0..p.len() {
            if p[k] != 0.0 {
                acc += p[k] * (p[k].ln() - q[k].ln());
            }
        }
        acc
    }

    #[test]
    fn identical_distributions_have_zero_rne() {
        let p = NeedsDistribution::from_probs(vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(rne(&p, &p, &RneConfig::default()).unwrap().value(), 0.0);
        let r = needs(&[86.0, 120.0, 30.0]);
        assert_eq!(
            agent_agent_trust(&r, &r, &w642(), &RneConfig::default())
                .unwrap()
                .value(),
            0.0
        );
    }

    #[test]
    fn two_point_distribution_matches_oracle() {
        let p = NeedsDistribution::from_probs(vec![0.5, 0.5]).unwrap();
        let q = NeedsDistribution::from_probs(vec![0.25, 0.75]).unwrap();
        let v = rne(&p, &q, &RneConfig::default()).unwrap().value();
        assert!((v - 0.143841).abs() < 1e-6);
        assert!((v - kl_oracle(&[0.5, 0.5], &[0.25, 0.75])).abs() < 1e-15);
    }

    #[test]
    fn zero_trustor_components_contribute_nothing() {
        let p = NeedsDistribution::from_probs(vec![0.0, 1.0]).unwrap();
        let q = NeedsDistribution::from_probs(vec![0.5, 0.5]).unwrap();
        let v = rne(&p, &q, &RneConfig::default().strict()).unwrap();
        assert!((v.value() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn zero_trustee_component_is_infinite_in_strict_mode_and_finite_smoothed() {
        let p = NeedsDistribution::from_probs(vec![0.5, 0.5]).unwrap();
        let q = NeedsDistribution::from_probs(vec![1.0, 0.0]).unwrap();
        assert!(rne(&p, &q, &RneConfig::default().strict())
            .unwrap()
            .is_infinite());
        let smoothed = rne(&p, &q, &RneConfig::default()).unwrap().value();
        assert!(smoothed.is_finite() && smoothed > 0.0);
    }

    #[test]
    fn rejects_length_mismatch() {
        let p = NeedsDistribution::from_probs(vec![0.5, 0.5]).unwrap();
        let q = NeedsDistribution::from_probs(vec![1.0]).unwrap();
        assert!(matches!(
            rne(&p, &q, &RneConfig::default()),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn agent_agent_trust_reproduces_worked_example() {
        let cfg = RneConfig::default();
        let r1 = needs(&[86.0, 120.0, 30.0]);
        let r2 = needs(&[20.0, 30.0, 10.0]);
        let r3 = needs(&[80.0, 115.0, 25.0]);
        let t12 = agent_agent_trust(&r1, &r2, &w642(), &cfg).unwrap().value();
        let t13 = agent_agent_trust(&r1, &r3, &w642(), &cfg).unwrap().value();
        assert!((t12 - 0.00373).abs() < 1e-4);
        assert!((t13 - 0.0005).abs() < 1e-4);
        assert!(t13 < t12);
    }

    #[test]
    fn agent_group_trust_reproduces_worked_example() {
        let cfg = RneConfig::default();
        let r1 = needs(&[86.0, 120.0, 30.0]);
        let g1 = GroupNeedsMatrix::from_rows(vec![vec![82.0, 114.0, 24.0], vec![79.0, 117.0, 23.0]])
            .unwrap();
        let g2 = GroupNeedsMatrix::from_rows(vec![vec![40.0, 56.0, 12.0], vec![56.0, 48.0, 15.0]])
            .unwrap();
        let t1 = agent_group_trust(&r1, &g1, &w642(), &cfg).unwrap().value();
        let t2 = agent_group_trust(&r1, &g2, &w642(), &cfg).unwrap().value();
        assert!((t1 - 0.000915).abs() < 1.5e-4);
        assert!((t2 - 0.007674).abs() < 1.5e-4);

        let copies = GroupNeedsMatrix::new(vec![r1.clone(), r1.clone(), r1.clone()]).unwrap();
        assert!(agent_group_trust(&r1, &copies, &w642(), &cfg).unwrap().value().abs() < 1e-15);
    }

    #[test]
    fn group_group_trust_at_full_precision() {
        let g1 = GroupNeedsMatrix::from_rows(vec![vec![82.0, 114.0, 24.0], vec![79.0, 117.0, 23.0]])
            .unwrap();
        let g2 = GroupNeedsMatrix::from_rows(vec![vec![40.0, 56.0, 12.0], vec![56.0, 48.0, 15.0]])
            .unwrap();
        let v = group_group_trust(&g1, &g2, &w642(), &RneConfig::default())
            .unwrap()
            .value();
        let oracle = kl_oracle(
            &[966.0 / 1984.0, 924.0 / 1984.0, 94.0 / 1984.0],
            &[576.0 / 1046.0, 416.0 / 1046.0, 54.0 / 1046.0],
        );
        assert!((oracle - 0.0095349).abs() < 1e-6);
        assert!((v - oracle).abs() < 1e-12);
        assert_eq!(
            group_group_trust(&g1, &g1, &w642(), &RneConfig::default())
                .unwrap()
                .value(),
            0.0
        );
    }

    #[test]
    fn intra_group_trust_orders_example_pairs() {
        let cfg = RneConfig::default();
        let r1 = needs(&[86.0, 120.0, 30.0]);
        let r2 = needs(&[20.0, 30.0, 10.0]);
        let r3 = needs(&[80.0, 115.0, 25.0]);
        let g13 = GroupNeedsMatrix::new(vec![r1.clone(), r3.clone()]).unwrap();
        let g12 = GroupNeedsMatrix::new(vec![r1.clone(), r2.clone()]).unwrap();
        let s13 = intra_group_trust(&g13, &w642(), &cfg).unwrap();
        let s12 = intra_group_trust(&g12, &w642(), &cfg).unwrap();

        let d = |n: &NeedsVector| {
            normalize_needs(n, &w642()).unwrap().probs().to_vec()
        };
        let expected = 0.5 * (kl_oracle(&d(&r1), &d(&r3)) + kl_oracle(&d(&r3), &d(&r1)));
        assert!((s13 - expected).abs() < 1e-15);
        assert!(s12 > s13);

        let same = GroupNeedsMatrix::new(vec![r1.clone(), r1.clone()]).unwrap();
        assert_eq!(intra_group_trust(&same, &w642(), &cfg).unwrap(), 0.0);
        let single = GroupNeedsMatrix::new(vec![r1]).unwrap();
        assert!(matches!(
            intra_group_trust(&single, &w642(), &cfg),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn log_base_parses() {
        assert_eq!("10".parse::<LogBase>().unwrap(), LogBase::Ten);
        assert_eq!("natural".parse::<LogBase>().unwrap(), LogBase::Natural);
        assert!("7".parse::<LogBase>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(RneConfig::default().validate().is_ok());
        let bad = RneConfig {
            epsilon: 0.0,
            ..RneConfig::default()
        };
        assert!(bad.validate().is_err());
        assert!(RneConfig::default().with_truncation(0).validate().is_err());
    }
}
