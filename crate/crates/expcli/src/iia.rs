use anyhow::{bail, Result};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::config::Method;
use crate::report::{ExperimentReport, VERDICT_TOLERANCE};

/// How one method's lotteries change when alternatives outside `shared` are
/// added to the population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IiaComparison {
    pub small: String,
    pub large: String,
    pub shared: Vec<String>,
    pub methods: IndexMap<Method, IiaMethodComparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IiaMethodComparison {
    /// No seed flips the argmax and no restricted probability moves by more
    /// than `VERDICT_TOLERANCE`.
    pub stable: bool,
    pub seeds: Vec<IiaSeedComparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IiaSeedComparison {
    pub seed_small: u64,
    pub seed_large: u64,
    /// Lotteries restricted to the shared alternatives and renormalized.
    /// Empty when a lottery puts no mass on them.
    pub small: IndexMap<String, f64>,
    pub large: IndexMap<String, f64>,
    pub max_abs_diff: Option<f64>,
    /// `|π_small(a)/π_small(b) - π_large(a)/π_large(b)|` for the first two
    /// shared alternatives, when both ratios exist.
    pub ratio_difference: Option<f64>,
    pub argmax_small: Option<String>,
    pub argmax_large: Option<String>,
    pub flip: bool,
}

/// Compares the lotteries of two reports on their shared alternatives. Runs
/// are paired in order; only methods present in both reports are compared.
pub fn compare_iia(small: &ExperimentReport, large: &ExperimentReport, shared: &[&str]) -> Result<IiaComparison> {
    if shared.len() < 2 {
        bail!("at least two shared alternatives are needed");
    }
    for label in shared {
        for report in [small, large] {
            if !report.alternatives.iter().any(|a| a == label) {
                bail!("alternative {label:?} is not in experiment {:?}", report.experiment);
            }
        }
    }
    let methods: Vec<Method> = small.methods.iter().copied().filter(|m| large.methods.contains(m)).collect();
    if methods.is_empty() {
        bail!("the reports share no method");
    }

    let mut out = IndexMap::new();
    for method in methods {
        let seeds: Vec<IiaSeedComparison> = small
            .runs
            .iter()
            .zip(&large.runs)
            .map(|(s, l)| {
                let ps = restrict(&s.results[&method].lottery, shared);
                let pl = restrict(&l.results[&method].lottery, shared);
                compare_pair(s.seed, l.seed, ps, pl)
            })
            .collect();
        let stable = seeds
            .iter()
            .all(|c| !c.flip && c.max_abs_diff.is_some_and(|d| d <= VERDICT_TOLERANCE));
        out.insert(method, IiaMethodComparison { stable, seeds });
    }
    Ok(IiaComparison {
        small: small.experiment.clone(),
        large: large.experiment.clone(),
        shared: shared.iter().map(|s| s.to_string()).collect(),
        methods: out,
    })
}

fn restrict(lottery: &IndexMap<String, f64>, shared: &[&str]) -> IndexMap<String, f64> {
    let mass: f64 = shared.iter().map(|a| lottery[*a]).sum();
    if mass <= 0.0 {
        return IndexMap::new();
    }
    shared.iter().map(|a| (a.to_string(), lottery[*a] / mass)).collect()
}

fn argmax(lottery: &IndexMap<String, f64>) -> Option<String> {
    let mut best: Option<(&String, f64)> = None;
    for (label, &p) in lottery {
        if best.is_none_or(|(_, b)| p > b) {
            best = Some((label, p));
        }
    }
    best.map(|(l, _)| l.clone())
}

fn compare_pair(
    seed_small: u64,
    seed_large: u64,
    small: IndexMap<String, f64>,
    large: IndexMap<String, f64>,
) -> IiaSeedComparison {
    let both = !small.is_empty() && !large.is_empty();
    let max_abs_diff = both.then(|| small.iter().map(|(a, p)| (p - large[a]).abs()).fold(0.0, f64::max));
    let ratio = |l: &IndexMap<String, f64>| {
        let (a, b) = (l.get_index(0)?.1, l.get_index(1)?.1);
        (*b > 0.0).then(|| a / b)
    };
    let ratio_difference = match (ratio(&small), ratio(&large)) {
        (Some(x), Some(y)) => Some((x - y).abs()),
        _ => None,
    };
    let argmax_small = argmax(&small);
    let argmax_large = argmax(&large);
    let flip = both && argmax_small != argmax_large;
    IiaSeedComparison {
        seed_small,
        seed_large,
        small,
        large,
        max_abs_diff,
        ratio_difference,
        argmax_small,
        argmax_large,
        flip,
    }
}
