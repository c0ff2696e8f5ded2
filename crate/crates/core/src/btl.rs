//! Tabular Bradley–Terry–Luce reward fitting and greedy/softmax policies.
//!
//! Each alternative gets one reward `r(a)` and the model predicts
//! `P(a ≻ b) = σ(r(a) - r(b))`. The negative log-likelihood of the counts is
//!
//! ```text
//! L(r) = Σ_{a≠b} N(a, b) · -log σ(r(a) - r(b))
//! ```
//!
//! and its gradient is `∂L/∂r(a) = Σ_{b≠a} n_ab · (σ(r(a) - r(b)) - p̂(a, b))`
//! with `n_ab = N(a, b) + N(b, a)` and `p̂(a, b) = N(a, b) / n_ab`. When every
//! pair has the same total the stationarity condition says
//! `Σ_b σ(r(a) - r(b))` equals the normalized Borda score of `a`, and since
//! that sum is increasing in `r(a)` the fitted rewards order the alternatives
//! exactly as Borda does.
//!
//! Indifference mass, if present, is split evenly between the two directions
//! (`N(a, b) + E(a, b) / 2`).

use crate::error::{Error, Result};
use crate::lottery::Lottery;
use crate::prefs::{weight_to_f64, AlternativeSet, PairwiseCounts};
use crate::voting::borda_scores;

/// Fitted rewards, shifted to mean zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardVector {
    alternatives: AlternativeSet,
    rewards: Vec<f64>,
}

impl RewardVector {
    /// Stores `values` shifted to mean zero.
    pub fn new(alternatives: AlternativeSet, values: Vec<f64>) -> Result<Self> {
        if values.len() != alternatives.len() {
            return Err(Error::DimensionMismatch {
                expected: alternatives.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("rewards"));
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        Ok(RewardVector {
            alternatives,
            rewards: values.into_iter().map(|v| v - mean).collect(),
        })
    }

    pub fn alternatives(&self) -> &AlternativeSet {
        &self.alternatives
    }

    pub fn values(&self) -> &[f64] {
        &self.rewards
    }

    pub fn get(&self, index: usize) -> f64 {
        self.rewards[index]
    }

    /// `{"label": reward}` in alternative order.
    pub fn to_json_value(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (label, &r) in self.alternatives.labels().iter().zip(&self.rewards) {
            map.insert(label.clone(), serde_json::Value::from(r));
        }
        serde_json::Value::Object(map)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitDiagnostics {
    /// Infinity norm of the projected gradient at the returned point.
    pub final_gradient_norm: f64,
    pub iterations_used: usize,
    /// Gradient small enough and no reward pinned at the cap.
    pub converged: bool,
    /// Some reward sits at `±reward_cap`: the unconstrained MLE does not exist.
    pub capped: bool,
    pub loss: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    /// Initial (and maximal) step of the backtracking line search.
    pub learning_rate: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub reward_cap: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            learning_rate: 1.0,
            max_iterations: 200_000,
            tolerance: 1e-8,
            reward_cap: 30.0,
        }
    }
}

/// Counts converted to floating point once, row-major.
struct Tallies {
    size: usize,
    /// `N(a, b) + E(a, b) / 2`
    wins: Vec<f64>,
    totals: Vec<f64>,
}

impl Tallies {
    fn new(counts: &PairwiseCounts) -> Self {
        let m = counts.len();
        let mut wins = vec![0.0; m * m];
        let mut totals = vec![0.0; m * m];
        for a in 0..m {
            for b in 0..m {
                if a != b {
                    wins[a * m + b] = weight_to_f64(
                        counts.strict(a, b) + counts.indifferent(a, b) / crate::prefs::Weight::from_integer(2),
                    );
                    totals[a * m + b] = weight_to_f64(counts.pair_total(a, b));
                }
            }
        }
        Tallies { size: m, wins, totals }
    }

    /// Only the comparisons between members of the same component.
    fn within(&self, component: &[usize]) -> Tallies {
        let m = self.size;
        let keep = |i: usize| component[i / m] == component[i % m];
        Tallies {
            size: m,
            wins: self.wins.iter().enumerate().map(|(i, &w)| if keep(i) { w } else { 0.0 }).collect(),
            totals: self.totals.iter().enumerate().map(|(i, &t)| if keep(i) { t } else { 0.0 }).collect(),
        }
    }

    fn wins(&self, a: usize, b: usize) -> f64 {
        self.wins[a * self.size + b]
    }

    fn total(&self, a: usize, b: usize) -> f64 {
        self.totals[a * self.size + b]
    }

    fn loss(&self, rewards: &[f64]) -> f64 {
        let m = self.size;
        let mut loss = 0.0;
        for a in 0..m {
            for b in 0..m {
                let w = self.wins(a, b);
                if a != b && w > 0.0 {
                    loss += w * neg_log_sigmoid(rewards[a] - rewards[b]);
                }
            }
        }
        loss
    }

    fn gradient(&self, rewards: &[f64]) -> Vec<f64> {
        let m = self.size;
        (0..m)
            .map(|a| {
                (0..m)
                    .filter(|&b| b != a)
                    .map(|b| self.total(a, b) * sigmoid(rewards[a] - rewards[b]) - self.wins(a, b))
                    .sum()
            })
            .collect()
    }
}

fn check_rewards(rewards: &[f64], counts: &PairwiseCounts) -> Result<()> {
    if rewards.len() != counts.len() {
        return Err(Error::DimensionMismatch {
            expected: counts.len(),
            found: rewards.len(),
        });
    }
    if rewards.iter().any(|r| !r.is_finite()) {
        return Err(Error::NonFinite("rewards"));
    }
    Ok(())
}

/// `-log σ(x)` without overflow.
fn neg_log_sigmoid(x: f64) -> f64 {
    (-x).max(0.0) + (-x.abs()).exp().ln_1p()
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Bradley–Terry negative log-likelihood of `counts` under `rewards`.
pub fn btl_loss(rewards: &[f64], counts: &PairwiseCounts) -> Result<f64> {
    check_rewards(rewards, counts)?;
    Ok(Tallies::new(counts).loss(rewards))
}

pub fn btl_gradient(rewards: &[f64], counts: &PairwiseCounts) -> Result<Vec<f64>> {
    check_rewards(rewards, counts)?;
    Ok(Tallies::new(counts).gradient(rewards))
}

/// Projected gradient descent with backtracking on the box `[-cap, cap]^m`.
/// The result is shifted to mean zero.
///
/// When the MLE does not exist, every comparison between two strongly
/// connected components of the win digraph is unanimous in one direction and
/// its loss only vanishes in the limit. The descent then fits the comparisons
/// inside each component, and the components are pushed apart along the
/// divergent direction until some reward reaches the cap.
pub fn fit_btl(counts: &PairwiseCounts, config: &FitConfig) -> Result<(RewardVector, FitDiagnostics)> {
    if !(config.learning_rate > 0.0 && config.tolerance > 0.0 && config.reward_cap > 0.0) {
        return Err(Error::InvalidArgument(
            "learning rate, tolerance and reward cap must be positive".into(),
        ));
    }
    let m = counts.len();
    let any = (0..m).any(|a| counts.is_present(a));
    if !any {
        return Err(Error::InvalidCounts("no comparisons to fit".into()));
    }
    let cap = config.reward_cap;
    let tallies = Tallies::new(counts);
    let divergent = divergent_direction(&tallies);
    let (mut r, iterations) = match &divergent {
        Some((_, component)) => descend(&tallies.within(component), config),
        None => descend(&tallies, config),
    };
    if let Some((direction, _)) = &divergent {
        extend_to_cap(&mut r, direction, cap);
    }
    let loss = tallies.loss(&r);
    let pg_norm = projected_norm(&r, &tallies.gradient(&r), cap);
    let capped = r.iter().any(|v| v.abs() >= cap - 1e-9);
    let rewards = RewardVector::new(counts.alternatives().clone(), r)?;
    Ok((
        rewards,
        FitDiagnostics {
            final_gradient_norm: pg_norm,
            iterations_used: iterations,
            converged: pg_norm <= config.tolerance && !capped,
            capped,
            loss,
        },
    ))
}

fn descend(tallies: &Tallies, config: &FitConfig) -> (Vec<f64>, usize) {
    let cap = config.reward_cap;
    // a step of 1/L always decreases the loss, so backtracking stops there
    // even when the decrease is below floating point resolution
    let lipschitz = (0..tallies.size)
        .map(|a| (0..tallies.size).map(|b| tallies.total(a, b)).sum::<f64>() / 2.0)
        .fold(0.0, f64::max);
    let floor = if lipschitz > 0.0 {
        (1.0 / lipschitz).min(config.learning_rate)
    } else {
        config.learning_rate
    };
    let mut r = vec![0.0; tallies.size];
    let mut loss = tallies.loss(&r);
    let mut step = config.learning_rate;
    let mut iterations = 0;
    loop {
        let g = tallies.gradient(&r);
        if projected_norm(&r, &g, cap) <= config.tolerance || iterations >= config.max_iterations {
            return (r, iterations);
        }
        iterations += 1;
        // once the expected decrease is below what the loss can resolve the
        // line search only sees rounding noise, so take the safe step
        let g_sq: f64 = g.iter().map(|v| v * v).sum();
        if step * g_sq < 64.0 * f64::EPSILON * loss.max(1.0) {
            step = floor;
        }
        loop {
            let candidate: Vec<f64> = r
                .iter()
                .zip(&g)
                .map(|(ri, gi)| (ri - step * gi).clamp(-cap, cap))
                .collect();
            let new_loss = tallies.loss(&candidate);
            let (linear, sq): (f64, f64) = candidate
                .iter()
                .zip(&r)
                .zip(&g)
                .fold((0.0, 0.0), |(lin, sq), ((c, ri), gi)| {
                    let d = c - ri;
                    (lin + gi * d, sq + d * d)
                });
            if new_loss <= loss + linear + sq / (2.0 * step) || step <= floor {
                r = candidate;
                loss = new_loss;
                break;
            }
            step = (step * 0.5).max(floor);
        }
        step = (step * 2.0).min(config.learning_rate);
    }
}

/// Direction along which the likelihood keeps improving forever, if any.
///
/// With `a → b` whenever `a` won at least once against `b`, the MLE exists
/// iff every compared pair lies in one strongly connected component. If not,
/// ranking each alternative by how many alternatives it reaches gives a
/// direction that is constant inside components and increases along every
/// cross-component comparison, so the loss is nonincreasing along it.
fn divergent_direction(tallies: &Tallies) -> Option<(Vec<f64>, Vec<usize>)> {
    let m = tallies.size;
    let mut reach = vec![vec![false; m]; m];
    for (a, row) in reach.iter_mut().enumerate() {
        row[a] = true;
        for (b, cell) in row.iter_mut().enumerate() {
            if a != b && tallies.wins(a, b) > 0.0 {
                *cell = true;
            }
        }
    }
    for k in 0..m {
        let through = reach[k].clone();
        for row in reach.iter_mut().filter(|row| row[k]) {
            for (cell, &t) in row.iter_mut().zip(&through) {
                *cell |= t;
            }
        }
    }
    let split = (0..m).any(|a| {
        (0..m).any(|b| a != b && tallies.total(a, b) > 0.0 && !(reach[a][b] && reach[b][a]))
    });
    if !split {
        return None;
    }
    let level: Vec<f64> = reach.iter().map(|row| row.iter().filter(|&&x| x).count() as f64).collect();
    let mean = level.iter().sum::<f64>() / m as f64;
    // label each component by its smallest member
    let component = (0..m)
        .map(|a| (0..m).find(|&b| reach[a][b] && reach[b][a]).expect("a reaches itself"))
        .collect();
    Some((level.into_iter().map(|l| l - mean).collect(), component))
}

/// Moves `r` along `direction` until the first coordinate reaches `±cap`.
fn extend_to_cap(r: &mut [f64], direction: &[f64], cap: f64) {
    let mean = r.iter().sum::<f64>() / r.len() as f64;
    r.iter_mut().for_each(|v| *v -= mean);
    let step = r
        .iter()
        .zip(direction)
        .filter(|(_, d)| d.abs() > 1e-12)
        .map(|(v, d)| if *d > 0.0 { (cap - v) / d } else { (-cap - v) / d })
        .fold(f64::INFINITY, f64::min)
        .max(0.0);
    for (v, d) in r.iter_mut().zip(direction) {
        *v = (*v + step * d).clamp(-cap, cap);
    }
}

fn projected_norm(r: &[f64], g: &[f64], cap: f64) -> f64 {
    r.iter()
        .zip(g)
        .map(|(&ri, &gi)| {
            let blocked = (ri >= cap && gi < 0.0) || (ri <= -cap && gi > 0.0);
            if blocked {
                0.0
            } else {
                gi.abs()
            }
        })
        .fold(0.0, f64::max)
}

/// Reward differences below this count as ties.
pub const TIE_TOLERANCE: f64 = 1e-6;

/// Whether the rewards order every pair the way normalized Borda scores do;
/// Borda ties require `|Δr| <= 1e-6`.
pub fn check_borda_equivalence(rewards: &RewardVector, counts: &PairwiseCounts) -> bool {
    let borda = borda_scores(counts, true).scores;
    let m = counts.len();
    (0..m).all(|a| {
        (a + 1..m).all(|b| {
            let dr = rewards.get(a) - rewards.get(b);
            match borda[a].cmp(&borda[b]) {
                std::cmp::Ordering::Equal => dr.abs() <= TIE_TOLERANCE,
                std::cmp::Ordering::Greater => dr > 0.0,
                std::cmp::Ordering::Less => dr < 0.0,
            }
        })
    })
}

/// Inverse temperature of a softmax policy; `INFINITY` is the greedy limit.
pub fn softmax_policy(rewards: &RewardVector, beta: f64) -> Result<Lottery> {
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::InvalidArgument(format!("beta must be nonnegative, got {beta}")));
    }
    let values = rewards.values();
    let alternatives = rewards.alternatives().clone();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if beta.is_infinite() {
        let best: Vec<usize> = (0..values.len())
            .filter(|&i| max - values[i] <= 1e-9)
            .collect();
        return Ok(Lottery::uniform_over(alternatives, &best));
    }
    let exp: Vec<f64> = values.iter().map(|v| (beta * (v - max)).exp()).collect();
    let sum: f64 = exp.iter().sum();
    Lottery::new(alternatives, exp.into_iter().map(|e| e / sum).collect())
}

/// Per-alternative stationarity residual `Σ_b n_ab (σ(Δ) - p̂(a, b))`, i.e. the
/// gradient evaluated at the fitted rewards.
pub fn stationarity_residual(rewards: &RewardVector, counts: &PairwiseCounts) -> Vec<f64> {
    Tallies::new(counts).gradient(rewards.values())
}
