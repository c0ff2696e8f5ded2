//! Probability distributions over an alternative set.

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::prefs::AlternativeSet;

const NEGATIVE_SLACK: f64 = 1e-12;
const SUM_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Lottery {
    alternatives: AlternativeSet,
    probabilities: Vec<f64>,
}

impl Lottery {
    /// Accepts entries down to -1e-12 (clamped to zero) and totals within
    /// 1e-9 of one (renormalized).
    pub fn new(alternatives: AlternativeSet, mut probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.len() != alternatives.len() {
            return Err(Error::DimensionMismatch {
                expected: alternatives.len(),
                found: probabilities.len(),
            });
        }
        for p in probabilities.iter_mut() {
            if !p.is_finite() {
                return Err(Error::NonFinite("lottery"));
            }
            if *p < -NEGATIVE_SLACK {
                return Err(Error::InvalidArgument(format!("negative probability {p}")));
            }
            *p = p.max(0.0);
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > SUM_SLACK {
            return Err(Error::InvalidArgument(format!("probabilities sum to {sum}")));
        }
        probabilities.iter_mut().for_each(|p| *p /= sum);
        Ok(Lottery {
            alternatives,
            probabilities,
        })
    }

    pub fn uniform(alternatives: AlternativeSet) -> Self {
        let m = alternatives.len();
        Lottery {
            alternatives,
            probabilities: vec![1.0 / m as f64; m],
        }
    }

    pub fn point_mass(alternatives: AlternativeSet, index: usize) -> Self {
        let mut probabilities = vec![0.0; alternatives.len()];
        probabilities[index] = 1.0;
        Lottery {
            alternatives,
            probabilities,
        }
    }

    /// Uniform over the given (nonempty) subset of indices.
    pub fn uniform_over(alternatives: AlternativeSet, indices: &[usize]) -> Self {
        assert!(!indices.is_empty(), "uniform_over needs at least one index");
        let mut probabilities = vec![0.0; alternatives.len()];
        for &i in indices {
            probabilities[i] = 1.0 / indices.len() as f64;
        }
        Lottery {
            alternatives,
            probabilities,
        }
    }

    pub fn alternatives(&self) -> &AlternativeSet {
        &self.alternatives
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probabilities[index]
    }

    /// Probability of the alternative named `label`.
    pub fn prob_of(&self, label: &str) -> Result<f64> {
        Ok(self.probabilities[self.alternatives.require(label)?])
    }

    /// First index of maximal probability.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probabilities.iter().enumerate() {
            if p > self.probabilities[best] {
                best = i;
            }
        }
        best
    }

    pub fn support(&self, threshold: f64) -> Vec<usize> {
        (0..self.probabilities.len())
            .filter(|&i| self.probabilities[i] > threshold)
            .collect()
    }

    /// Half the L1 distance.
    pub fn total_variation(&self, other: &Lottery) -> f64 {
        0.5 * self
            .probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }

    pub fn max_abs_diff(&self, other: &Lottery) -> f64 {
        self.probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `{"label": probability, ...}` in alternative order, 12 significant digits.
    pub fn to_json_value(&self) -> Value {
        let mut map = Map::new();
        for (label, &p) in self.alternatives.labels().iter().zip(&self.probabilities) {
            map.insert(label.clone(), Value::from(round_significant(p, 12)));
        }
        Value::Object(map)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("lottery values are finite")
    }

    /// Reads `{"label": probability}`; labels must match `alternatives` exactly.
    pub fn from_json_value(alternatives: &AlternativeSet, value: &Value) -> Result<Self> {
        let map = value
            .as_object()
            .ok_or_else(|| Error::InvalidArgument("lottery must be a JSON object".into()))?;
        if map.len() != alternatives.len() {
            return Err(Error::DimensionMismatch {
                expected: alternatives.len(),
                found: map.len(),
            });
        }
        let mut probabilities = vec![0.0; alternatives.len()];
        for (label, p) in map {
            let p = p
                .as_f64()
                .ok_or_else(|| Error::InvalidArgument(format!("probability of `{label}` is not a number")))?;
            probabilities[alternatives.require(label)?] = p;
        }
        Lottery::new(alternatives.clone(), probabilities)
    }
}

/// Rounds to `digits` significant decimal digits.
pub fn round_significant(value: f64, digits: usize) -> f64 {
    if value == 0.0 || !value.is_finite() {
        return value;
    }
    format!("{:.*e}", digits.saturating_sub(1), value)
        .parse()
        .expect("formatted float parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> AlternativeSet {
        AlternativeSet::new(["a", "b", "c"]).unwrap()
    }

    #[test]
    fn clamps_and_renormalizes() {
        let l = Lottery::new(abc(), vec![-1e-13, 0.5, 0.5 + 1e-10]).unwrap();
        assert_eq!(l.prob(0), 0.0);
        assert!((l.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(Lottery::new(abc(), vec![-1e-6, 0.5, 0.5]).is_err());
        assert!(Lottery::new(abc(), vec![0.2, 0.2, 0.2]).is_err());
        assert!(Lottery::new(abc(), vec![0.5, 0.5]).is_err());
        assert!(Lottery::new(abc(), vec![f64::NAN, 0.5, 0.5]).is_err());
    }

    #[test]
    fn json_uses_twelve_significant_digits() {
        let l = Lottery::uniform(abc());
        let text = l.to_json_string();
        assert_eq!(text, r#"{"a":0.333333333333,"b":0.333333333333,"c":0.333333333333}"#);
        let back = Lottery::from_json_value(&abc(), &serde_json::from_str(&text).unwrap()).unwrap();
        assert!(back.max_abs_diff(&l) < 1e-12);
    }

    #[test]
    fn distances_and_argmax() {
        let a = Lottery::point_mass(abc(), 1);
        let b = Lottery::uniform_over(abc(), &[0, 1]);
        assert_eq!(a.argmax(), 1);
        assert_eq!(b.argmax(), 0);
        assert!((a.total_variation(&b) - 0.5).abs() < 1e-15);
        assert_eq!(b.support(1e-7), vec![0, 1]);
    }

    #[test]
    fn rounding() {
        assert_eq!(round_significant(0.1234567890123456, 12), 0.123456789012);
        assert_eq!(round_significant(0.0, 12), 0.0);
        assert_eq!(round_significant(1.0, 12), 1.0);
    }
}
