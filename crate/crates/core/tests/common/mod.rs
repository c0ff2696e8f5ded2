#![allow(dead_code)]

use maxlottery::matrix::SquareMatrix;
use maxlottery::prefs::{PairwiseCounts, PreferenceProfile, RankingGroup, Weight};
use maxlottery::AlternativeSet;
use proptest::prelude::*;

pub fn labels(m: usize) -> AlternativeSet {
    AlternativeSet::new((0..m).map(|i| format!("x{i}"))).unwrap()
}

fn groups(m: usize, max_groups: usize, max_weight: i64) -> impl Strategy<Value = Vec<RankingGroup>> {
    let ranking = Just((0..m).collect::<Vec<usize>>()).prop_shuffle();
    prop::collection::vec((ranking, 1..=max_weight), 1..=max_groups).prop_map(|gs| {
        gs.into_iter()
            .map(|(ranking, w)| RankingGroup {
                ranking,
                weight: Weight::from_integer(w),
            })
            .collect()
    })
}

/// Weighted strict-ranking profiles over `2..=max_m` alternatives.
pub fn profile(max_m: usize, max_groups: usize, max_weight: i64) -> impl Strategy<Value = PreferenceProfile> {
    (2..=max_m).prop_flat_map(move |m| {
        groups(m, max_groups, max_weight).prop_map(move |gs| PreferenceProfile::new(labels(m), gs).unwrap())
    })
}

/// Counts where every pair was compared `total` times, split at random into
/// wins, losses and indifference.
pub fn counts_with_indifference(max_m: usize, max_total: i64) -> impl Strategy<Value = PairwiseCounts> {
    split_counts(max_m, max_total, 0)
}

/// Like [`counts_with_indifference`], but each direction of every pair wins
/// at least once, so the Bradley–Terry MLE is finite.
pub fn interior_counts(max_m: usize, max_total: i64) -> impl Strategy<Value = PairwiseCounts> {
    split_counts(max_m, max_total.max(2), 1)
}

fn split_counts(max_m: usize, max_total: i64, min_wins: i64) -> impl Strategy<Value = PairwiseCounts> {
    (2..=max_m, 2 * min_wins.max(1)..=max_total).prop_flat_map(move |(m, total)| {
        let pairs = m * (m - 1) / 2;
        let cut = min_wins..=total - min_wins;
        prop::collection::vec((cut.clone(), cut), pairs).prop_map(move |splits| {
            let w = Weight::from_integer;
            let mut strict = SquareMatrix::filled(m, w(0));
            let mut indifferent = SquareMatrix::filled(m, w(0));
            let mut k = 0;
            for a in 0..m {
                for b in a + 1..m {
                    let (x, y) = splits[k];
                    k += 1;
                    let (lo, hi) = (x.min(y), x.max(y));
                    strict[(a, b)] = w(lo);
                    strict[(b, a)] = w(total - hi);
                    indifferent[(a, b)] = w(hi - lo);
                    indifferent[(b, a)] = w(hi - lo);
                }
            }
            PairwiseCounts::with_total(labels(m), strict, indifferent, w(total)).unwrap()
        })
    })
}

/// Smallest nonempty set whose members each strictly beat every non-member,
/// found by enumerating all subsets.
pub fn brute_force_smith(counts: &PairwiseCounts) -> Vec<usize> {
    let m = counts.len();
    let beats = |a: usize, b: usize| counts.strict(a, b) > counts.strict(b, a);
    let mut best: Option<Vec<usize>> = None;
    for mask in 1u32..(1 << m) {
        let inside: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        if best.as_ref().is_some_and(|b| b.len() <= inside.len()) {
            continue;
        }
        let dominant = inside
            .iter()
            .all(|&a| (0..m).filter(|i| mask & (1 << i) == 0).all(|b| beats(a, b)));
        if dominant {
            best = Some(inside);
        }
    }
    best.unwrap()
}

pub fn majority_split() -> PreferenceProfile {
    PreferenceProfile::from_rankings(&["R", "G", "B"], &[(&["R", "G", "B"], 2), (&["B", "R", "G"], 3)]).unwrap()
}

pub fn cycle() -> PreferenceProfile {
    PreferenceProfile::from_rankings(
        &["R", "G", "B"],
        &[(&["R", "B", "G"], 1), (&["G", "R", "B"], 1), (&["B", "G", "R"], 1)],
    )
    .unwrap()
}

pub fn two_way_split() -> PreferenceProfile {
    PreferenceProfile::from_rankings(&["R", "B"], &[(&["R", "B"], 2), (&["B", "R"], 3)]).unwrap()
}
