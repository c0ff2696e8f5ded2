//! Tabular self-play preference optimization.
//!
//! A softmax policy over the alternatives plays against itself. Each
//! iteration draws groups of `k` samples, scores every sample by its average
//! selection probability against the rest of its group, and moves the logits
//! by exponentiated gradient:
//!
//! ```text
//! logit(a) += step_size · (r̂(a) - mean reward of the batch)
//! ```
//!
//! The answer is the uniform mixture of the policies played, which
//! approximates the maximal lottery of the selection game.
//!
//! Each sample is drawn uniformly instead of from the policy with probability
//! `exploration` (10% by default), so alternatives the policy has abandoned
//! keep getting scored. Mixing per sample rather than per group keeps every
//! sample's co-samples distributed alike, so `r̂(a)` estimates the expected
//! reward of `a` against the sampling distribution without bias.

use std::io::Write;
use std::path::Path;

use rand::distr::{weighted::WeightedIndex, Bernoulli, Distribution, Uniform};

use crate::error::{Error, Result};
use crate::lottery::Lottery;
use crate::prefs::{AlternativeSet, SelectionMatrix};
use crate::rng::substream;
use crate::solver::iterative::softmax;

/// Softmax policy over a fixed alternative set.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularPolicy {
    alternatives: AlternativeSet,
    logits: Vec<f64>,
}

impl TabularPolicy {
    pub fn uniform(alternatives: AlternativeSet) -> Self {
        let logits = vec![0.0; alternatives.len()];
        TabularPolicy { alternatives, logits }
    }

    pub fn from_logits(alternatives: AlternativeSet, logits: Vec<f64>) -> Result<Self> {
        if logits.len() != alternatives.len() {
            return Err(Error::DimensionMismatch {
                expected: alternatives.len(),
                found: logits.len(),
            });
        }
        if logits.iter().any(|l| !l.is_finite()) {
            return Err(Error::NonFinite("logits"));
        }
        Ok(TabularPolicy { alternatives, logits })
    }

    pub fn logits(&self) -> &[f64] {
        &self.logits
    }

    pub fn probabilities(&self) -> Vec<f64> {
        softmax(&self.logits)
    }

    pub fn lottery(&self) -> Lottery {
        Lottery::new(self.alternatives.clone(), self.probabilities())
            .expect("softmax output is a distribution")
    }

    fn update(&mut self, step: &[f64]) {
        for (l, s) in self.logits.iter_mut().zip(step) {
            *l += s;
        }
        // keep logits bounded; softmax is shift invariant
        let max = self.logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.logits.iter_mut().for_each(|l| *l -= max);
    }
}

/// One logged iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub policy: Lottery,
    /// Uniform average of the policies of iterations `1..=iteration`.
    pub mixture: Lottery,
    /// Exact expected reward of each alternative against the distribution the
    /// batch was drawn from.
    pub expected_reward: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SelfPlayTrace {
    pub seed: Option<u64>,
    pub records: Vec<TraceRecord>,
}

impl SelfPlayTrace {
    /// A trace with a single record at iteration 0, for methods that do not
    /// iterate.
    pub fn single(lottery: &Lottery) -> Self {
        SelfPlayTrace {
            seed: None,
            records: vec![TraceRecord {
                iteration: 0,
                policy: lottery.clone(),
                mixture: lottery.clone(),
                expected_reward: Vec::new(),
            }],
        }
    }

    /// Writes `iteration,alternative,policy_prob,mixture_prob`, one row per
    /// alternative per record.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        w.write_record(["iteration", "alternative", "policy_prob", "mixture_prob"])?;
        for record in &self.records {
            let labels = record.policy.alternatives().labels();
            for (a, label) in labels.iter().enumerate() {
                w.write_record([
                    record.iteration.to_string(),
                    label.clone(),
                    format_prob(record.policy.prob(a)),
                    format_prob(record.mixture.prob(a)),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

fn format_prob(p: f64) -> String {
    format!("{:.12}", p)
}

/// `r_i = 1/(k-1) · Σ_{j≠i} P̃(a_i, a_j)`. Duplicates score 1/2 against each
/// other.
pub fn spo_reward(samples: &[usize], preference: &SelectionMatrix) -> Result<Vec<f64>> {
    let k = samples.len();
    if k < 2 {
        return Err(Error::InvalidArgument(format!("a sample group needs at least 2 samples, got {k}")));
    }
    let m = preference.len();
    if let Some(&bad) = samples.iter().find(|&&s| s >= m) {
        return Err(Error::InvalidArgument(format!("sample index {bad} out of range for {m} alternatives")));
    }
    Ok(group_rewards(samples, preference))
}

fn group_rewards(samples: &[usize], preference: &SelectionMatrix) -> Vec<f64> {
    let k = samples.len();
    (0..k)
        .map(|i| {
            let total: f64 = (0..k)
                .filter(|&j| j != i)
                .map(|j| preference.get(samples[i], samples[j]))
                .sum();
            total / (k - 1) as f64
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpoConfig {
    /// Samples per group.
    pub k: usize,
    pub iterations: usize,
    pub step_size: f64,
    /// Groups per iteration.
    pub batch: usize,
    /// Probability that a sample is drawn uniformly instead of from the policy.
    pub exploration: f64,
    /// Log every `log_stride`-th iteration (the first and last are always logged).
    pub log_stride: usize,
}

impl Default for SpoConfig {
    fn default() -> Self {
        SpoConfig {
            k: 2,
            iterations: 2000,
            step_size: 1.0,
            batch: 128,
            exploration: 0.1,
            log_stride: 10,
        }
    }
}

impl SpoConfig {
    fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidArgument(format!("k must be at least 2, got {}", self.k)));
        }
        if self.iterations == 0 || self.batch == 0 || self.log_stride == 0 {
            return Err(Error::InvalidArgument(
                "iterations, batch and log stride must be positive".into(),
            ));
        }
        if !(self.step_size.is_finite() && self.step_size > 0.0) {
            return Err(Error::InvalidArgument("step size must be positive and finite".into()));
        }
        if !(0.0..=1.0).contains(&self.exploration) {
            return Err(Error::InvalidArgument("exploration must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Runs sampled self-play and returns the mixture of the policies played
/// together with the trace. Iteration `t` uses RNG substream `t`.
pub fn spo_run(preference: &SelectionMatrix, config: &SpoConfig, seed: u64) -> Result<(Lottery, SelfPlayTrace)> {
    config.validate()?;
    let alternatives = preference.alternatives().clone();
    let m = alternatives.len();
    let uniform = Uniform::new(0, m).expect("at least two alternatives");
    let explore = Bernoulli::new(config.exploration).map_err(|e| Error::InvalidArgument(e.to_string()))?;

    let mut policy = TabularPolicy::uniform(alternatives.clone());
    let mut mixture = vec![0.0; m];
    let mut trace = SelfPlayTrace {
        seed: Some(seed),
        records: Vec::new(),
    };
    let mut group = vec![0; config.k];
    let mut reward_sum = vec![0.0; m];
    let mut reward_count = vec![0usize; m];

    for t in 1..=config.iterations {
        let probs = policy.probabilities();
        for (avg, p) in mixture.iter_mut().zip(&probs) {
            *avg += (p - *avg) / t as f64;
        }
        let sampler = WeightedIndex::new(&probs).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let mut rng = substream(seed, t as u64);

        reward_sum.iter_mut().for_each(|s| *s = 0.0);
        reward_count.iter_mut().for_each(|c| *c = 0);
        let mut batch_total = 0.0;
        for _ in 0..config.batch {
            for slot in group.iter_mut() {
                *slot = if explore.sample(&mut rng) {
                    uniform.sample(&mut rng)
                } else {
                    sampler.sample(&mut rng)
                };
            }
            for (&a, r) in group.iter().zip(group_rewards(&group, preference)) {
                reward_sum[a] += r;
                reward_count[a] += 1;
                batch_total += r;
            }
        }
        let baseline = batch_total / (config.batch * config.k) as f64;
        let step: Vec<f64> = reward_sum
            .iter()
            .zip(&reward_count)
            .map(|(&s, &c)| {
                if c == 0 {
                    0.0
                } else {
                    config.step_size * (s / c as f64 - baseline)
                }
            })
            .collect();

        if t == 1 || t == config.iterations || t % config.log_stride == 0 {
            let share = config.exploration;
            let sampling: Vec<f64> = probs.iter().map(|p| (1.0 - share) * p + share / m as f64).collect();
            trace.records.push(TraceRecord {
                iteration: t,
                policy: Lottery::new(alternatives.clone(), probs.clone())?,
                mixture: Lottery::new(alternatives.clone(), mixture.clone())?,
                expected_reward: preference.matrix().right_mul(&sampling),
            });
        }
        policy.update(&step);
    }
    Ok((Lottery::new(alternatives, mixture)?, trace))
}

/// Step of [`exact_best_response_dynamics`]. Selection probabilities lie in
/// `[0, 1]`, so no rescaling is needed.
pub const EXACT_DYNAMICS_STEP: f64 = 1.0;

/// Noise-free counterpart of [`spo_run`]: multiplicative weights on the exact
/// expected payoffs. The logits after `t` rounds are `η · t · P̃ q̄_t`, where
/// `q̄_t` is the opponent's running average, so each player responds softly
/// to the average of everything the other has played. Returns the average
/// strategy.
pub fn exact_best_response_dynamics(preference: &SelectionMatrix, iterations: usize) -> Result<Lottery> {
    if iterations == 0 {
        return Err(Error::InvalidArgument("iterations must be positive".into()));
    }
    let m = preference.len();
    let payoff = preference.matrix();
    let mut logits = vec![0.0; m];
    let mut average = vec![0.0; m];
    for t in 1..=iterations {
        let x = softmax(&logits);
        for (avg, xi) in average.iter_mut().zip(&x) {
            *avg += (xi - *avg) / t as f64;
        }
        for (l, u) in logits.iter_mut().zip(payoff.right_mul(&x)) {
            *l += EXACT_DYNAMICS_STEP * u;
        }
    }
    Lottery::new(preference.alternatives().clone(), average)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prefs::{pairwise_counts, selection_matrix, PreferenceProfile};
    use crate::solver::maximal_lottery_from_selection;

    fn majority_split() -> SelectionMatrix {
        let p = PreferenceProfile::from_rankings(
            &["R", "G", "B"],
            &[(&["R", "G", "B"], 2), (&["B", "R", "G"], 3)],
        )
        .unwrap();
        selection_matrix(&pairwise_counts(&p))
    }

    fn cycle() -> SelectionMatrix {
        let p = PreferenceProfile::from_rankings(
            &["R", "G", "B"],
            &[(&["R", "B", "G"], 1), (&["G", "R", "B"], 1), (&["B", "G", "R"], 1)],
        )
        .unwrap();
        selection_matrix(&pairwise_counts(&p))
    }

    #[test]
    fn pair_rewards_follow_selection_probability() {
        let p = majority_split();
        let r = spo_reward(&[2, 0], &p).unwrap();
        assert!((r[0] - 0.6).abs() < 1e-12 && (r[1] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn identical_samples_score_half() {
        let r = spo_reward(&[1, 1, 1, 1], &majority_split()).unwrap();
        assert!(r.iter().all(|&x| x == 0.5));
    }

    #[test]
    fn triple_on_cycle() {
        let r = spo_reward(&[0, 1, 2], &cycle()).unwrap();
        assert!((r[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn short_groups_rejected() {
        assert!(spo_reward(&[0], &majority_split()).is_err());
        let bad = SpoConfig { k: 1, ..SpoConfig::default() };
        assert!(spo_run(&majority_split(), &bad, 0).is_err());
    }

    #[test]
    fn majority_split_mixture_reaches_b() {
        let (mix, trace) = spo_run(&majority_split(), &SpoConfig::default(), 0).unwrap();
        assert!(mix.prob(2) >= 0.95, "{mix:?}");
        assert_eq!(trace.records.last().unwrap().mixture, mix);
    }

    #[test]
    fn trace_logs_stride_and_endpoints() {
        let config = SpoConfig {
            iterations: 25,
            log_stride: 10,
            ..SpoConfig::default()
        };
        let (_, trace) = spo_run(&majority_split(), &config, 3).unwrap();
        let its: Vec<usize> = trace.records.iter().map(|r| r.iteration).collect();
        assert_eq!(its, vec![1, 10, 20, 25]);
        let csv = trace.to_csv_string();
        assert!(csv.starts_with("iteration,alternative,policy_prob,mixture_prob\n1,R,"));
        assert_eq!(csv.lines().count(), 1 + 4 * 3);
    }

    #[test]
    fn exact_dynamics_match_lp() {
        for p in [majority_split(), cycle()] {
            let lp = maximal_lottery_from_selection(&p).unwrap();
            let l = exact_best_response_dynamics(&p, 5000).unwrap();
            assert!(l.max_abs_diff(&lp) <= 0.01, "{l:?} vs {lp:?}");
        }
    }

    #[test]
    fn exact_dynamics_fixed_point_on_ties() {
        let alts = AlternativeSet::new(["a", "b", "c", "d"]).unwrap();
        let l = exact_best_response_dynamics(&SelectionMatrix::uniform(alts.clone()), 100).unwrap();
        assert!(l.max_abs_diff(&Lottery::uniform(alts)) < 1e-15);
    }
}
