//! Symmetric multiplicative-weights self-play.
//!
//! One weight vector plays against itself: at step `t` the strategy
//! `x_t ∝ exp(log w_t)` is scored against itself, `log w += η_t · A x_t`, and
//! the answer is the running average of the `x_t`. In a symmetric game with
//! value `v` the shared play earns exactly `v`, so the average strategy
//! guarantees at least `v - Regret_T / T`, i.e. its exploitability decays
//! like `range · sqrt(log m / T)`.

use crate::error::{Error, Result};
use crate::lottery::Lottery;
use crate::matrix::SquareMatrix;
use crate::prefs::AlternativeSet;

/// Step size per iteration. Payoffs are divided by their range
/// (`max - min`) first, so the same schedule works at any scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSchedule {
    Constant(f64),
    /// `η_t = scale / sqrt(t)`.
    InverseSqrt(f64),
    /// Regret-optimal fixed step for a known horizon: `sqrt(8 ln m / T)`.
    Horizon,
}

impl Default for StepSchedule {
    fn default() -> Self {
        StepSchedule::Constant(2.0)
    }
}

impl StepSchedule {
    fn step(&self, t: usize, horizon: usize, m: usize) -> f64 {
        match *self {
            StepSchedule::Constant(eta) => eta,
            StepSchedule::InverseSqrt(scale) => scale / (t as f64).sqrt(),
            StepSchedule::Horizon => (8.0 * (m as f64).ln() / horizon as f64).sqrt(),
        }
    }
}

/// Averaged strategy of multiplicative-weights self-play on `payoff`.
pub fn maximal_lottery_iterative(
    alternatives: &AlternativeSet,
    payoff: &SquareMatrix<f64>,
    iterations: usize,
    schedule: StepSchedule,
) -> Result<Lottery> {
    if iterations == 0 {
        return Err(Error::InvalidArgument("iterations must be positive".into()));
    }
    if payoff.size() != alternatives.len() {
        return Err(Error::DimensionMismatch {
            expected: alternatives.len(),
            found: payoff.size(),
        });
    }
    if !payoff.is_finite() {
        return Err(Error::NonFinite("payoff matrix"));
    }
    let m = payoff.size();
    let (lo, hi) = payoff
        .off_diagonal()
        .chain((0..m).map(|i| (i, i)))
        .map(|p| payoff[p])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let range = if hi > lo { hi - lo } else { 1.0 };

    let mut logits = vec![0.0; m];
    let mut average = vec![0.0; m];
    for t in 1..=iterations {
        let x = softmax(&logits);
        for (a, xi) in average.iter_mut().zip(&x) {
            *a += (xi - *a) / t as f64;
        }
        let eta = schedule.step(t, iterations, m) / range;
        for (l, u) in logits.iter_mut().zip(payoff.right_mul(&x)) {
            *l += eta * u;
        }
    }
    Lottery::new(alternatives.clone(), average)
}

pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / sum).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prefs::{margin_matrix, pairwise_counts, PreferenceProfile};
    use crate::solver::{verify_on_payoff, ITERATIVE_EPSILON};

    fn margin(profile: &PreferenceProfile) -> SquareMatrix<f64> {
        margin_matrix(&pairwise_counts(profile)).to_f64()
    }

    #[test]
    fn majority_split_concentrates_on_b() {
        let p = PreferenceProfile::from_rankings(
            &["R", "G", "B"],
            &[(&["R", "G", "B"], 2), (&["B", "R", "G"], 3)],
        )
        .unwrap();
        let m = margin(&p);
        let l = maximal_lottery_iterative(p.alternatives(), &m, 10_000, StepSchedule::default()).unwrap();
        assert!(l.prob(2) >= 0.98, "{l:?}");
        assert!(verify_on_payoff(&m, &l, ITERATIVE_EPSILON).unwrap().is_maximal, "{l:?}");
    }

    #[test]
    fn cycle_stays_uniform() {
        let p = PreferenceProfile::from_rankings(
            &["R", "G", "B"],
            &[(&["R", "B", "G"], 1), (&["G", "R", "B"], 1), (&["B", "G", "R"], 1)],
        )
        .unwrap();
        let m = margin(&p);
        let l = maximal_lottery_iterative(p.alternatives(), &m, 10_000, StepSchedule::default()).unwrap();
        assert!(l.max_abs_diff(&Lottery::uniform(p.alternatives().clone())) <= 0.01);
    }

    #[test]
    fn two_alternatives_strict_winner() {
        let p = PreferenceProfile::from_rankings(&["a", "b"], &[(&["a", "b"], 3), (&["b", "a"], 2)]).unwrap();
        let m = margin(&p);
        let l = maximal_lottery_iterative(p.alternatives(), &m, 10_000, StepSchedule::default()).unwrap();
        assert!(l.prob(0) >= 0.99);
    }

    #[test]
    fn zero_iterations_rejected() {
        let alts = AlternativeSet::new(["a", "b"]).unwrap();
        let m = SquareMatrix::filled(2, 0.0);
        assert!(maximal_lottery_iterative(&alts, &m, 0, StepSchedule::default()).is_err());
    }
}
