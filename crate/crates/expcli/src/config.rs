use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use maxlottery::btl::FitConfig;
use maxlottery::selfplay::SpoConfig;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Aggregation methods an experiment can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Borda,
    BtlSoftmax,
    MaximalLotteryLp,
    Spo,
    RandomDictatorship,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Borda,
        Method::BtlSoftmax,
        Method::MaximalLotteryLp,
        Method::Spo,
        Method::RandomDictatorship,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Borda => "borda",
            Method::BtlSoftmax => "btl_softmax",
            Method::MaximalLotteryLp => "maximal_lottery_lp",
            Method::Spo => "spo",
            Method::RandomDictatorship => "random_dictatorship",
        }
    }

    fn all() -> Vec<Method> {
        Self::ALL.to_vec()
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .with_context(|| {
                let known: Vec<&str> = Method::ALL.iter().map(|m| m.name()).collect();
                format!("unknown method {s:?}; expected one of {}", known.join(", "))
            })
    }
}

/// Inverse temperature, written as a number or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Beta(pub f64);

impl Default for Beta {
    fn default() -> Self {
        Beta(f64::INFINITY)
    }
}

impl Serialize for Beta {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Beta {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(Beta(v)),
            Raw::Text(t) if t == "inf" => Ok(Beta(f64::INFINITY)),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("beta must be a number or \"inf\", got {t:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BtlSettings {
    pub learning_rate: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub reward_cap: f64,
    pub beta: Beta,
}

impl Default for BtlSettings {
    fn default() -> Self {
        let fit = FitConfig::default();
        BtlSettings {
            learning_rate: fit.learning_rate,
            max_iterations: fit.max_iterations,
            tolerance: fit.tolerance,
            reward_cap: fit.reward_cap,
            beta: Beta::default(),
        }
    }
}

impl BtlSettings {
    pub fn fit_config(&self) -> FitConfig {
        FitConfig {
            learning_rate: self.learning_rate,
            max_iterations: self.max_iterations,
            tolerance: self.tolerance,
            reward_cap: self.reward_cap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpoSettings {
    pub k: usize,
    pub iterations: usize,
    pub step_size: f64,
    pub batch: usize,
    pub exploration: f64,
    pub log_stride: usize,
}

impl Default for SpoSettings {
    fn default() -> Self {
        let c = SpoConfig::default();
        SpoSettings {
            k: c.k,
            iterations: c.iterations,
            step_size: c.step_size,
            batch: c.batch,
            exploration: c.exploration,
            log_stride: c.log_stride,
        }
    }
}

impl SpoSettings {
    pub fn spo_config(&self) -> SpoConfig {
        SpoConfig {
            k: self.k,
            iterations: self.iterations,
            step_size: self.step_size,
            batch: self.batch,
            exploration: self.exploration,
            log_stride: self.log_stride,
        }
    }
}

fn default_dataset_size() -> usize {
    2048
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

/// One experiment: a population, how much data to sample from it, and which
/// methods to run on the sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    /// Population file; relative paths are resolved against the config file.
    pub population: PathBuf,
    /// Prompt shown to annotators. Carried through to the report, never used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt: Option<String>,
    #[serde(default = "default_dataset_size")]
    pub dataset_size: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "Method::all")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub btl: BtlSettings,
    #[serde(default)]
    pub spo: SpoSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// A config with default settings for `population`.
    pub fn new(name: impl Into<String>, population: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            name: name.into(),
            population: population.into(),
            prompt: None,
            dataset_size: default_dataset_size(),
            seeds: default_seeds(),
            methods: Method::all(),
            btl: BtlSettings::default(),
            spo: SpoSettings::default(),
            output_dir: None,
        }
    }

    /// Reads a config and resolves its relative paths against the file's
    /// directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut config: ExperimentConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        if config.population.is_relative() {
            config.population = base.join(&config.population);
        }
        if let Some(out) = &config.output_dir {
            if out.is_relative() {
                config.output_dir = Some(base.join(out));
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dataset_size == 0 {
            bail!("dataset size must be at least 1");
        }
        if self.methods.is_empty() {
            bail!("at least one method is required");
        }
        if self.seeds.is_empty() {
            bail!("at least one seed is required");
        }
        let mut seen = self.methods.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.methods.len() {
            bail!("methods are listed more than once");
        }
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        seeds.dedup();
        if seeds.len() != self.seeds.len() {
            bail!("seeds are listed more than once");
        }
        if !self.population.is_file() {
            bail!("population file {} does not exist", self.population.display());
        }
        Ok(())
    }
}
