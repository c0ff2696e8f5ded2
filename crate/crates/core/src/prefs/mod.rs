//! Alternatives, weighted preference profiles and the pairwise matrices
//! derived from them.
//!
//! Weights are exact rationals. Floating point only enters when a count
//! matrix is normalized into probabilities, so identities such as
//! `N(a,b) + N(b,a) + E(a,b) = n` hold exactly.

mod counts;
mod dataset;

pub use counts::{margin_matrix, pairwise_counts, selection_matrix, MarginMatrix, PairwiseCounts, SelectionMatrix};
pub use dataset::{
    empirical_counts, empirical_preference, sample_dataset, ComparisonDataset, ComparisonRecord,
};

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact nonnegative group weight.
pub type Weight = Rational64;

/// Ordered set of labelled alternatives. Cloning is cheap; all clones share
/// the same label storage and therefore the same index order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AlternativeSet {
    labels: Arc<[String]>,
}

impl AlternativeSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() < 2 {
            return Err(Error::InvalidAlternatives(format!(
                "need at least 2 alternatives, got {}",
                labels.len()
            )));
        }
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() {
                return Err(Error::InvalidAlternatives("empty label".into()));
            }
            if labels[..i].contains(label) {
                return Err(Error::InvalidAlternatives(format!("duplicate label `{label}`")));
            }
        }
        Ok(AlternativeSet {
            labels: labels.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn require(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::UnknownAlternative(label.to_string()))
    }
}

impl fmt::Debug for AlternativeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.labels.iter()).finish()
    }
}

/// A block of identical voters: one strict ranking (best first) and its weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankingGroup {
    pub ranking: Vec<usize>,
    pub weight: Weight,
}

impl RankingGroup {
    /// Position of each alternative in the ranking, 0 = most preferred.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.ranking.len()];
        for (rank, &alt) in self.ranking.iter().enumerate() {
            pos[alt] = rank;
        }
        pos
    }

    pub fn top(&self) -> usize {
        self.ranking[0]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceProfile {
    alternatives: AlternativeSet,
    groups: Vec<RankingGroup>,
}

impl PreferenceProfile {
    pub fn new(alternatives: AlternativeSet, groups: Vec<RankingGroup>) -> Result<Self> {
        let m = alternatives.len();
        let mut total = Weight::zero();
        for (g, group) in groups.iter().enumerate() {
            if group.weight.is_negative() {
                return Err(Error::InvalidProfile(format!("group {g} has negative weight")));
            }
            if group.ranking.len() != m {
                return Err(Error::InvalidProfile(format!(
                    "group {g} ranks {} of {m} alternatives",
                    group.ranking.len()
                )));
            }
            let mut seen = vec![false; m];
            for &alt in &group.ranking {
                if alt >= m || seen[alt] {
                    return Err(Error::InvalidProfile(format!(
                        "group {g} ranking is not a permutation"
                    )));
                }
                seen[alt] = true;
            }
            total += group.weight;
        }
        if !total.is_positive() {
            return Err(Error::InvalidProfile("total weight must be positive".into()));
        }
        Ok(PreferenceProfile {
            alternatives,
            groups,
        })
    }

    /// Convenience constructor from labels and `(ranking, weight)` pairs with
    /// integer weights.
    pub fn from_rankings(labels: &[&str], groups: &[(&[&str], i64)]) -> Result<Self> {
        let alternatives = AlternativeSet::new(labels.iter().copied())?;
        let groups = groups
            .iter()
            .map(|(ranking, weight)| {
                Ok(RankingGroup {
                    ranking: ranking
                        .iter()
                        .map(|l| alternatives.require(l))
                        .collect::<Result<_>>()?,
                    weight: Weight::from_integer(*weight),
                })
            })
            .collect::<Result<_>>()?;
        PreferenceProfile::new(alternatives, groups)
    }

    pub fn alternatives(&self) -> &AlternativeSet {
        &self.alternatives
    }

    pub fn groups(&self) -> &[RankingGroup] {
        &self.groups
    }

    pub fn total_weight(&self) -> Weight {
        self.groups.iter().map(|g| g.weight).sum()
    }

    /// Weight of voters ranking each alternative first.
    pub fn first_place_weights(&self) -> Vec<Weight> {
        let mut w = vec![Weight::zero(); self.alternatives.len()];
        for g in &self.groups {
            w[g.top()] += g.weight;
        }
        w
    }

    /// Every ranking inverted (worst becomes best).
    pub fn reversed(&self) -> Self {
        PreferenceProfile {
            alternatives: self.alternatives.clone(),
            groups: self
                .groups
                .iter()
                .map(|g| RankingGroup {
                    ranking: g.ranking.iter().rev().copied().collect(),
                    weight: g.weight,
                })
                .collect(),
        }
    }

    /// The profile induced on a subset of alternatives: each voter keeps the
    /// relative order of the retained labels. Labels keep the order given.
    pub fn restrict(&self, labels: &[&str]) -> Result<Self> {
        let keep: Vec<usize> = labels
            .iter()
            .map(|l| self.alternatives.require(l))
            .collect::<Result<_>>()?;
        let alternatives = AlternativeSet::new(labels.iter().copied())?;
        let groups = self
            .groups
            .iter()
            .map(|g| RankingGroup {
                ranking: g
                    .ranking
                    .iter()
                    .filter_map(|alt| keep.iter().position(|k| k == alt))
                    .collect(),
                weight: g.weight,
            })
            .collect();
        PreferenceProfile::new(alternatives, groups)
    }

    /// Weights scaled by the least common multiple of their denominators, for
    /// exact integer sampling.
    pub fn integer_weights(&self) -> Vec<u64> {
        let lcm = self
            .groups
            .iter()
            .fold(1i64, |acc, g| num_integer_lcm(acc, *g.weight.denom()));
        self.groups
            .iter()
            .map(|g| {
                let scaled = g.weight * Weight::from_integer(lcm);
                debug_assert!(scaled.is_integer());
                scaled.to_integer() as u64
            })
            .collect()
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ProfileFile = serde_json::from_str(text)?;
        file.into_profile()
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ProfileFile::from_profile(self))?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = self.to_json_string()?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

fn num_integer_lcm(a: i64, b: i64) -> i64 {
    fn gcd(mut a: i64, mut b: i64) -> i64 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a.abs()
    }
    a / gcd(a, b) * b
}

/// On-disk profile layout: `{"alternatives": [..], "groups": [{"ranking": [..], "weight": w}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileFile {
    alternatives: Vec<String>,
    groups: Vec<GroupFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupFile {
    ranking: Vec<String>,
    weight: serde_json::Value,
}

impl ProfileFile {
    fn into_profile(self) -> Result<PreferenceProfile> {
        let alternatives = AlternativeSet::new(self.alternatives)?;
        let groups = self
            .groups
            .into_iter()
            .map(|g| {
                let ranking = g
                    .ranking
                    .iter()
                    .map(|l| alternatives.require(l))
                    .collect::<Result<_>>()?;
                Ok(RankingGroup {
                    ranking,
                    weight: weight_from_json(&g.weight)?,
                })
            })
            .collect::<Result<_>>()?;
        PreferenceProfile::new(alternatives, groups)
    }

    fn from_profile(profile: &PreferenceProfile) -> Self {
        let labels = profile.alternatives();
        ProfileFile {
            alternatives: labels.labels().to_vec(),
            groups: profile
                .groups()
                .iter()
                .map(|g| GroupFile {
                    ranking: g.ranking.iter().map(|&i| labels.label(i).to_string()).collect(),
                    weight: weight_to_json(g.weight),
                })
                .collect(),
        }
    }
}

/// Accepts JSON numbers (read as exact decimals) and `"p/q"` strings.
fn weight_from_json(value: &serde_json::Value) -> Result<Weight> {
    let text = match value {
        serde_json::Value::Number(n) => n.to_string(),
        serde_json::Value::String(s) => s.clone(),
        other => {
            return Err(Error::InvalidProfile(format!("weight must be a number, got {other}")))
        }
    };
    parse_weight(&text).ok_or_else(|| Error::InvalidProfile(format!("unparseable weight `{text}`")))
}

fn weight_to_json(weight: Weight) -> serde_json::Value {
    if weight.is_integer() {
        return serde_json::Value::from(weight.to_integer());
    }
    let approx = *weight.numer() as f64 / *weight.denom() as f64;
    if parse_weight(&approx.to_string()) == Some(weight) {
        serde_json::Value::from(approx)
    } else {
        serde_json::Value::String(format!("{}/{}", weight.numer(), weight.denom()))
    }
}

/// Parses `"3"`, `"0.33"`, `"2.5e-1"` or `"1/3"` into an exact rational.
pub fn parse_weight(text: &str) -> Option<Weight> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: i64 = p.trim().parse().ok()?;
        let q: i64 = q.trim().parse().ok()?;
        return (q != 0).then(|| Weight::new(p, q));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut value = Weight::from_integer(digits.parse::<i64>().ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Weight::from_integer(10);
    for _ in 0..scale.unsigned_abs() {
        value = if scale > 0 { value * ten } else { value / ten };
    }
    Some(if negative { -value } else { value })
}

/// Converts an exact weight to `f64` for normalization.
pub(crate) fn weight_to_f64(weight: Weight) -> f64 {
    *weight.numer() as f64 / *weight.denom() as f64
}

pub(crate) fn half() -> Weight {
    Weight::new(1, 2)
}

pub(crate) fn one() -> Weight {
    Weight::one()
}
