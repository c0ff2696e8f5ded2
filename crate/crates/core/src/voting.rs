//! Deterministic social choice functions over pairwise counts.
//!
//! Pairwise ties never count as a win: `a` beats `b` only when
//! `N(a, b) > N(b, a)`.

use num_traits::{Signed, Zero};

use crate::lottery::Lottery;
use crate::prefs::{weight_to_f64, PairwiseCounts, PreferenceProfile, Weight};

#[derive(Debug, Clone, PartialEq)]
pub struct BordaScores {
    pub scores: Vec<Weight>,
    pub normalized: bool,
}

impl BordaScores {
    pub fn to_f64(&self) -> Vec<f64> {
        self.scores.iter().map(|&s| weight_to_f64(s)).collect()
    }

    /// All indices attaining the maximal score.
    pub fn winners(&self) -> Vec<usize> {
        let best = self.scores.iter().max().copied().unwrap_or_else(Weight::zero);
        (0..self.scores.len()).filter(|&i| self.scores[i] == best).collect()
    }
}

/// Raw scores are strict win counts `Σ_b N(a, b)`. Normalized scores are
/// selection probabilities `Σ_b (N(a, b) + E(a, b) / 2) / n_ab`, so an
/// indifferent comparison is half a win; without indifference and with equal
/// pair totals this is the raw score over `n`.
pub fn borda_scores(counts: &PairwiseCounts, normalized: bool) -> BordaScores {
    let m = counts.len();
    let scores = (0..m)
        .map(|a| {
            (0..m)
                .filter(|&b| b != a)
                .map(|b| {
                    if !normalized {
                        counts.strict(a, b)
                    } else {
                        let total = counts.pair_total(a, b);
                        if total.is_positive() {
                            (counts.strict(a, b) + counts.indifferent(a, b) / Weight::from_integer(2)) / total
                        } else {
                            Weight::zero()
                        }
                    }
                })
                .sum()
        })
        .collect();
    BordaScores { scores, normalized }
}

/// Every alternative ranked first by at least half of the total weight.
/// More than one can qualify on an exact even split.
pub fn majority_winners(profile: &PreferenceProfile) -> Vec<usize> {
    let half = profile.total_weight() / Weight::from_integer(2);
    profile
        .first_place_weights()
        .iter()
        .enumerate()
        .filter(|(_, &w)| w >= half)
        .map(|(i, _)| i)
        .collect()
}

/// First alternative (by index) ranked first by at least half of the voters.
pub fn majority_winner(profile: &PreferenceProfile) -> Option<usize> {
    majority_winners(profile).first().copied()
}

pub fn beats(counts: &PairwiseCounts, a: usize, b: usize) -> bool {
    counts.strict(a, b) > counts.strict(b, a)
}

pub fn condorcet_winner(counts: &PairwiseCounts) -> Option<usize> {
    let m = counts.len();
    (0..m).find(|&a| (0..m).all(|b| b == a || beats(counts, a, b)))
}

/// Number of strict pairwise wins per alternative.
pub fn copeland_wins(counts: &PairwiseCounts) -> Vec<usize> {
    let m = counts.len();
    (0..m)
        .map(|a| (0..m).filter(|&b| b != a && beats(counts, a, b)).count())
        .collect()
}

/// Smallest nonempty set whose members each beat every non-member.
///
/// Dominant sets are nested, and every member of a dominant set has more
/// wins than any non-member, so the answer is the shortest dominant prefix
/// of the alternatives sorted by win count. Returned indices are sorted.
pub fn smith_set(counts: &PairwiseCounts) -> Vec<usize> {
    let m = counts.len();
    let wins = copeland_wins(counts);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| wins[b].cmp(&wins[a]).then(a.cmp(&b)));
    for k in 1..=m {
        let (inside, outside) = order.split_at(k);
        if inside
            .iter()
            .all(|&a| outside.iter().all(|&b| beats(counts, a, b)))
        {
            let mut set = inside.to_vec();
            set.sort_unstable();
            return set;
        }
    }
    unreachable!("the full set is always dominant")
}

/// Each alternative with the share of weight ranking it first.
pub fn random_dictatorship(profile: &PreferenceProfile) -> Lottery {
    let total = profile.total_weight();
    let probs = profile
        .first_place_weights()
        .into_iter()
        .map(|w| weight_to_f64(w / total))
        .collect();
    Lottery::new(profile.alternatives().clone(), probs).expect("first-place shares form a lottery")
}
