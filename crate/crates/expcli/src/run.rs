use anyhow::{Context, Result};
use indexmap::IndexMap;
use maxlottery::btl::{fit_btl, softmax_policy};
use maxlottery::prefs::{empirical_counts, margin_matrix, pairwise_counts, sample_dataset, selection_matrix, MarginMatrix};
use maxlottery::selfplay::{spo_run, SelfPlayTrace};
use maxlottery::solver::{maximal_lottery_from_selection, maximal_lottery_lp, verify_maximality, LP_EPSILON};
use maxlottery::voting::{borda_scores, condorcet_winner, majority_winners, random_dictatorship};
use maxlottery::{Lottery, PreferenceProfile};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, Method};
use crate::report::{
    lottery_map, point_mass_verdict, uniformity_verdict, BtlOutcome, Certificate, CountMatrices, ExperimentReport,
    MethodResult, Provenance, SeedRun, SpoOutcome, Verdicts,
};

/// Mixed into the dataset seed so self-play draws from a stream unrelated to
/// the one that sampled the data.
pub const SPO_SEED_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

/// Tolerance of the maximality certificate for lotteries that are not solved
/// exactly.
pub const SAMPLED_EPSILON: f64 = 1e-2;

pub fn spo_seed(seed: u64) -> u64 {
    seed ^ SPO_SEED_SALT
}

/// SHA-256 over the config with the population file replaced by its content
/// and the output directory dropped, so moving files around keeps the hash.
pub fn config_hash(config: &ExperimentConfig, population: &PreferenceProfile) -> Result<String> {
    let mut canonical = serde_json::to_value(config)?;
    let object = canonical.as_object_mut().context("config is not an object")?;
    object.remove("output_dir");
    object.insert("population".into(), serde_json::from_str(&population.to_json_string()?)?);
    Ok(hex::encode(Sha256::digest(serde_json::to_vec(&canonical)?)))
}

/// Samples one dataset per seed and runs every configured method on it.
/// Seeds run in parallel; the report is identical for any thread count.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let population = PreferenceProfile::load(&config.population)
        .with_context(|| format!("loading population {}", config.population.display()))?;
    let runs = config
        .seeds
        .par_iter()
        .map(|&seed| run_seed(config, &population, seed).with_context(|| format!("seed {seed}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport {
        experiment: config.name.clone(),
        provenance: Provenance {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_hash: config_hash(config, &population)?,
        },
        prompt: config.prompt.clone(),
        alternatives: population.alternatives().labels().to_vec(),
        population: serde_json::from_str(&population.to_json_string()?)?,
        dataset_size: config.dataset_size,
        methods: config.methods.clone(),
        btl: config.btl.clone(),
        spo: config.spo.clone(),
        runs,
    })
}

fn run_seed(config: &ExperimentConfig, population: &PreferenceProfile, seed: u64) -> Result<SeedRun> {
    let data = sample_dataset(population, config.dataset_size, seed, &config.name)?;
    let counts = empirical_counts(&data)?;
    let selection = selection_matrix(&counts);
    let margin = MarginMatrix::from_selection(&selection)?;
    let alternatives = population.alternatives().clone();
    let labels = alternatives.labels().to_vec();

    let mut results = IndexMap::new();
    let mut traces = IndexMap::new();
    for &method in &config.methods {
        let mut btl = None;
        let mut spo = None;
        let mut trace = None;
        let (lottery, epsilon) = match method {
            Method::Borda => {
                let winners = borda_scores(&counts, true).winners();
                (Lottery::uniform_over(alternatives.clone(), &winners), LP_EPSILON)
            }
            Method::BtlSoftmax => {
                let (rewards, diagnostics) = fit_btl(&counts, &config.btl.fit_config())?;
                let lottery = softmax_policy(&rewards, config.btl.beta.0)?;
                let values = labels.iter().cloned().zip(rewards.values().iter().copied()).collect();
                btl = Some(BtlOutcome::new(config.btl.beta, values, &diagnostics));
                (lottery, LP_EPSILON)
            }
            Method::MaximalLotteryLp => (maximal_lottery_from_selection(&selection)?, LP_EPSILON),
            Method::Spo => {
                let (mixture, t) = spo_run(&selection, &config.spo.spo_config(), spo_seed(seed))?;
                let last = t.records.last().map(|r| lottery_map(&r.policy)).unwrap_or_default();
                spo = Some(SpoOutcome {
                    iterations: config.spo.iterations,
                    last_policy: last,
                });
                trace = Some(t);
                (mixture, SAMPLED_EPSILON)
            }
            Method::RandomDictatorship => (random_dictatorship(population), LP_EPSILON),
        };
        let certificate = Certificate::from(verify_maximality(&margin, &lottery, epsilon)?);
        traces.insert(method, trace.unwrap_or_else(|| SelfPlayTrace::single(&lottery)));
        results.insert(
            method,
            MethodResult {
                lottery: lottery_map(&lottery),
                argmax: labels[lottery.argmax()].clone(),
                certificate,
                btl,
                spo,
            },
        );
    }

    let majority = match majority_winners(population)[..] {
        [w] if is_strict_majority(population, w) => Some(w),
        _ => None,
    };
    let population_lottery = maximal_lottery_lp(&margin_matrix(&pairwise_counts(population)))?;
    let uniform = Lottery::uniform(alternatives.clone());
    let verdicts = Verdicts {
        majority: point_mass_verdict(majority, &labels, &results),
        condorcet: point_mass_verdict(condorcet_winner(&counts), &labels, &results),
        cycle_uniformity: uniformity_verdict(population_lottery.max_abs_diff(&uniform) <= LP_EPSILON, &results),
    };

    Ok(SeedRun {
        seed,
        spo_seed: spo_seed(seed),
        counts: CountMatrices::from_counts(&counts),
        selection: selection.matrix().to_rows(),
        results,
        verdicts,
        traces,
    })
}

fn is_strict_majority(population: &PreferenceProfile, winner: usize) -> bool {
    population.first_place_weights()[winner] * 2 > population.total_weight()
}
