mod common;

use common::{counts_with_indifference, majority_split, cycle, two_way_split};
use maxlottery::prefs::{pairwise_counts, selection_matrix, SelectionMatrix};
use maxlottery::rng::substream;
use maxlottery::selfplay::{exact_best_response_dynamics, spo_reward, spo_run, SpoConfig};
use maxlottery::solver::{exploitability, maximal_lottery_from_selection};
use maxlottery::{Lottery, PreferenceProfile};
use proptest::prelude::*;
use rand::Rng;

fn selection(p: &PreferenceProfile) -> SelectionMatrix {
    selection_matrix(&pairwise_counts(p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rewards_are_probabilities(c in counts_with_indifference(6, 10), picks in prop::collection::vec(0usize..6, 2..8)) {
        let p = selection_matrix(&c);
        let samples: Vec<usize> = picks.iter().map(|&i| i % c.len()).collect();
        let r = spo_reward(&samples, &p).unwrap();
        prop_assert_eq!(r.len(), samples.len());
        prop_assert!(r.iter().all(|&v| (0.0..=1.0).contains(&v)));
        if samples.len() == 2 {
            prop_assert!((r[0] + r[1] - 1.0).abs() < 1e-12);
        }
    }
}

/// Batch means of a sample's reward against `k - 1` co-samples drawn from `q`
/// converge to `(P̃ q)(a)`.
#[test]
fn reward_estimates_match_expected_payoff() {
    let p = selection(&majority_split());
    let q = [0.2, 0.3, 0.5];
    let exact = p.matrix().right_mul(&q);
    let batch = 10_000;
    let mut rng = substream(11, 0);
    for k in [2usize, 3] {
        for a in 0..3 {
            let mut sum = 0.0;
            for _ in 0..batch {
                let mut group = vec![a];
                for _ in 1..k {
                    let u: f64 = rng.random();
                    group.push(if u < q[0] { 0 } else if u < q[0] + q[1] { 1 } else { 2 });
                }
                sum += spo_reward(&group, &p).unwrap()[0];
            }
            let mean = sum / batch as f64;
            // rewards lie in [0, 1], so the variance is at most 1/4
            let sigma = (0.25 / batch as f64).sqrt();
            assert!((mean - exact[a]).abs() <= 3.0 * sigma, "k={k} a={a} mean={mean} exact={}", exact[a]);
        }
    }
}

#[test]
fn runs_are_deterministic() {
    let p = selection(&cycle());
    let config = SpoConfig { iterations: 200, ..SpoConfig::default() };
    let (a, ta) = spo_run(&p, &config, 7).unwrap();
    let (b, tb) = spo_run(&p, &config, 7).unwrap();
    assert_eq!(a, b);
    assert_eq!(ta, tb);
    assert_eq!(ta.to_csv_string(), tb.to_csv_string());
    let (c, _) = spo_run(&p, &config, 8).unwrap();
    assert_ne!(a, c);
}

#[test]
fn trace_mixture_is_running_average_of_policies() {
    let p = selection(&majority_split());
    let config = SpoConfig { iterations: 50, log_stride: 1, ..SpoConfig::default() };
    let (_, trace) = spo_run(&p, &config, 1).unwrap();
    let mut sum = [0.0; 3];
    for (t, record) in trace.records.iter().enumerate() {
        assert_eq!(record.iteration, t + 1);
        for (a, s) in sum.iter_mut().enumerate() {
            *s += record.policy.prob(a);
            assert!((record.mixture.prob(a) - *s / (t + 1) as f64).abs() < 1e-12);
        }
    }
}

#[test]
fn spo_reaches_the_maximal_lottery_on_the_experiments() {
    for profile in [majority_split(), cycle(), two_way_split()] {
        let p = selection(&profile);
        let lp = maximal_lottery_from_selection(&p).unwrap();
        for seed in 0..3 {
            let (mixture, _) = spo_run(&p, &SpoConfig::default(), seed).unwrap();
            let tv = mixture.total_variation(&lp);
            assert!(tv <= 0.05, "seed {seed}: {mixture:?} vs {lp:?} (tv {tv})");
        }
    }
}

#[test]
fn exact_dynamics_exploitability_shrinks() {
    for profile in [majority_split(), cycle(), two_way_split()] {
        let p = selection(&profile);
        let short = exact_best_response_dynamics(&p, 500).unwrap();
        let long = exact_best_response_dynamics(&p, 5000).unwrap();
        let e_short = exploitability(p.matrix(), short.probabilities(), 0.5);
        let e_long = exploitability(p.matrix(), long.probabilities(), 0.5);
        assert!(e_long <= e_short + 1e-15, "{e_long} > {e_short}");
        let lp = maximal_lottery_from_selection(&p).unwrap();
        assert!(long.max_abs_diff(&lp) <= 0.01);
    }
}

#[test]
fn exact_dynamics_stay_uniform_on_ties() {
    let alts = common::labels(5);
    let l = exact_best_response_dynamics(&SelectionMatrix::uniform(alts.clone()), 5000).unwrap();
    assert!(l.max_abs_diff(&Lottery::uniform(alts)) < 1e-12);
}
