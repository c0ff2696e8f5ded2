use indexmap::IndexMap;
use maxlottery::btl::FitDiagnostics;
use maxlottery::lottery::round_significant;
use maxlottery::prefs::PairwiseCounts;
use maxlottery::selfplay::SelfPlayTrace;
use maxlottery::solver::MaximalityReport;
use maxlottery::Lottery;
use serde::{Deserialize, Serialize};

use crate::config::{Beta, BtlSettings, Method, SpoSettings};

/// Distance from a point mass, or from uniform, that a verdict still accepts.
pub const VERDICT_TOLERANCE: f64 = 0.05;

/// Everything one `run` produced. Serialized as `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentReport {
    pub experiment: String,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt: Option<String>,
    pub alternatives: Vec<String>,
    /// The population, in the same format as population files.
    pub population: serde_json::Value,
    pub dataset_size: usize,
    pub methods: Vec<Method>,
    pub btl: BtlSettings,
    pub spo: SpoSettings,
    pub runs: Vec<SeedRun>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    /// SHA-256 of the canonical config, with the population inlined.
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedRun {
    /// Seed of the sampled dataset.
    pub seed: u64,
    /// Seed of the self-play run.
    pub spo_seed: u64,
    pub counts: CountMatrices,
    /// Empirical selection probabilities, row beats column.
    pub selection: Vec<Vec<f64>>,
    pub results: IndexMap<Method, MethodResult>,
    pub verdicts: Verdicts,
    #[serde(skip)]
    pub traces: IndexMap<Method, SelfPlayTrace>,
}

/// Record counts of the sampled dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountMatrices {
    /// `strict[a][b]`: records preferring `a` over `b`.
    pub strict: Vec<Vec<i64>>,
    pub indifferent: Vec<Vec<i64>>,
}

impl CountMatrices {
    pub fn from_counts(counts: &PairwiseCounts) -> Self {
        let m = counts.len();
        let grid = |f: &dyn Fn(usize, usize) -> i64| (0..m).map(|a| (0..m).map(|b| f(a, b)).collect()).collect();
        CountMatrices {
            strict: grid(&|a, b| counts.strict(a, b).to_integer()),
            indifferent: grid(&|a, b| counts.indifferent(a, b).to_integer()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodResult {
    pub lottery: IndexMap<String, f64>,
    pub argmax: String,
    /// Maximality check of the lottery against the empirical margin game.
    pub certificate: Certificate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub btl: Option<BtlOutcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spo: Option<SpoOutcome>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub worst_column_payoff: f64,
    pub epsilon: f64,
    pub is_maximal: bool,
}

impl From<MaximalityReport> for Certificate {
    fn from(r: MaximalityReport) -> Self {
        Certificate {
            worst_column_payoff: round_significant(r.worst_column_payoff, 12),
            epsilon: r.epsilon,
            is_maximal: r.is_maximal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BtlOutcome {
    pub beta: Beta,
    pub rewards: IndexMap<String, f64>,
    pub final_gradient_norm: f64,
    pub iterations_used: usize,
    pub converged: bool,
    pub capped: bool,
    pub loss: f64,
}

impl BtlOutcome {
    pub fn new(beta: Beta, rewards: IndexMap<String, f64>, d: &FitDiagnostics) -> Self {
        BtlOutcome {
            beta,
            rewards,
            final_gradient_norm: d.final_gradient_norm,
            iterations_used: d.iterations_used,
            converged: d.converged,
            capped: d.capped,
            loss: d.loss,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpoOutcome {
    pub iterations: usize,
    /// Policy of the last iteration; `lottery` holds the average.
    pub last_policy: IndexMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    Violated,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxiomVerdict {
    /// The alternative the axiom singles out, when it applies.
    pub subject: Option<String>,
    pub per_method: IndexMap<Method, Verdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Verdicts {
    /// The population's strict first-place majority winner must get
    /// probability at least `1 - VERDICT_TOLERANCE`.
    pub majority: AxiomVerdict,
    /// Same, for the Condorcet winner of the sampled data.
    pub condorcet: AxiomVerdict,
    /// When the population's maximal lottery is uniform, every alternative
    /// must get `1/m ± VERDICT_TOLERANCE`.
    pub cycle_uniformity: AxiomVerdict,
}

pub fn lottery_map(lottery: &Lottery) -> IndexMap<String, f64> {
    lottery
        .alternatives()
        .labels()
        .iter()
        .zip(lottery.probabilities())
        .map(|(l, &p)| (l.clone(), round_significant(p, 12)))
        .collect()
}

pub(crate) fn point_mass_verdict(
    subject: Option<usize>,
    labels: &[String],
    results: &IndexMap<Method, MethodResult>,
) -> AxiomVerdict {
    let per_method = results
        .iter()
        .map(|(&method, r)| {
            let verdict = match subject {
                None => Verdict::NotApplicable,
                Some(w) if r.lottery[&labels[w]] >= 1.0 - VERDICT_TOLERANCE => Verdict::Satisfied,
                Some(_) => Verdict::Violated,
            };
            (method, verdict)
        })
        .collect();
    AxiomVerdict {
        subject: subject.map(|w| labels[w].clone()),
        per_method,
    }
}

pub(crate) fn uniformity_verdict(applies: bool, results: &IndexMap<Method, MethodResult>) -> AxiomVerdict {
    let per_method = results
        .iter()
        .map(|(&method, r)| {
            let m = r.lottery.len() as f64;
            let verdict = if !applies {
                Verdict::NotApplicable
            } else if r.lottery.values().all(|&p| (p - 1.0 / m).abs() <= VERDICT_TOLERANCE) {
                Verdict::Satisfied
            } else {
                Verdict::Violated
            };
            (method, verdict)
        })
        .collect();
    AxiomVerdict {
        subject: None,
        per_method,
    }
}
