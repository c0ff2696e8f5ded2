use std::io::{Read, Write};

use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{AlternativeSet, PairwiseCounts, PreferenceProfile, Weight};
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::rng::substream;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonRecord {
    pub prompt_id: String,
    pub preferred: usize,
    pub rejected: usize,
}

/// Pairwise comparison triplets `(prompt, preferred, rejected)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonDataset {
    alternatives: AlternativeSet,
    records: Vec<ComparisonRecord>,
    seed: Option<u64>,
    population: Option<PreferenceProfile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    prompt_id: String,
    preferred: String,
    rejected: String,
}

impl ComparisonDataset {
    /// Wraps externally obtained records. Every record must name two distinct
    /// valid alternatives.
    pub fn from_records(alternatives: AlternativeSet, records: Vec<ComparisonRecord>) -> Result<Self> {
        let m = alternatives.len();
        for (k, r) in records.iter().enumerate() {
            if r.preferred >= m || r.rejected >= m {
                return Err(Error::InvalidDataset(format!("record {k} has an invalid index")));
            }
            if r.preferred == r.rejected {
                return Err(Error::InvalidDataset(format!(
                    "record {k} prefers an alternative to itself"
                )));
            }
        }
        Ok(ComparisonDataset {
            alternatives,
            records,
            seed: None,
            population: None,
        })
    }

    pub fn alternatives(&self) -> &AlternativeSet {
        &self.alternatives
    }

    pub fn records(&self) -> &[ComparisonRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// The profile the records were sampled from, if any.
    pub fn population(&self) -> Option<&PreferenceProfile> {
        self.population.as_ref()
    }

    /// Writes `prompt_id,preferred,rejected` with LF line endings.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        for r in &self.records {
            out.serialize(CsvRow {
                prompt_id: r.prompt_id.clone(),
                preferred: self.alternatives.label(r.preferred).to_string(),
                rejected: self.alternatives.label(r.rejected).to_string(),
            })?;
        }
        if self.records.is_empty() {
            out.write_record(["prompt_id", "preferred", "rejected"])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R, alternatives: &AlternativeSet) -> Result<Self> {
        let mut input = csv::Reader::from_reader(reader);
        let headers = input.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["prompt_id", "preferred", "rejected"] {
            return Err(Error::InvalidDataset(format!(
                "expected header prompt_id,preferred,rejected, found {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut records = Vec::new();
        for row in input.deserialize() {
            let row: CsvRow = row?;
            records.push(ComparisonRecord {
                prompt_id: row.prompt_id,
                preferred: alternatives.require(&row.preferred)?,
                rejected: alternatives.require(&row.rejected)?,
            });
        }
        Self::from_records(alternatives.clone(), records)
    }

    fn mentions(&self, a: usize) -> bool {
        self.records.iter().any(|r| r.preferred == a || r.rejected == a)
    }
}

/// Draws `size` comparisons from `profile`.
///
/// Record `i` uses random stream `i` of `seed`: two distinct alternatives are
/// drawn uniformly in random presentation order, then a voter is drawn with
/// probability proportional to group weight, and that voter's higher-ranked
/// alternative becomes `preferred`.
pub fn sample_dataset(
    profile: &PreferenceProfile,
    size: usize,
    seed: u64,
    prompt_id: &str,
) -> Result<ComparisonDataset> {
    if size == 0 {
        return Err(Error::InvalidArgument("dataset size must be at least 1".into()));
    }
    let m = profile.alternatives().len();
    let weights = profile.integer_weights();
    let total: u64 = weights.iter().sum();
    let positions: Vec<Vec<usize>> = profile.groups().iter().map(|g| g.positions()).collect();

    let records = (0..size as u64)
        .map(|i| {
            let mut rng = substream(seed, i);
            let first = rng.random_range(0..m);
            let mut second = rng.random_range(0..m - 1);
            if second >= first {
                second += 1;
            }
            let mut ticket = rng.random_range(0..total);
            let group = weights
                .iter()
                .position(|&w| {
                    if ticket < w {
                        true
                    } else {
                        ticket -= w;
                        false
                    }
                })
                .expect("ticket falls inside the total weight");
            let pos = &positions[group];
            let (preferred, rejected) = if pos[first] < pos[second] {
                (first, second)
            } else {
                (second, first)
            };
            ComparisonRecord {
                prompt_id: prompt_id.to_string(),
                preferred,
                rejected,
            }
        })
        .collect();

    Ok(ComparisonDataset {
        alternatives: profile.alternatives().clone(),
        records,
        seed: Some(seed),
        population: Some(profile.clone()),
    })
}

/// Fraction of `{a, b}` records that prefer `a`.
///
/// Edge rules: `a == b` scores 1/2; if the pair never occurs, an alternative
/// that appears in some other record beats one that never appears, and
/// anything else scores 1/2.
pub fn empirical_preference(dataset: &ComparisonDataset, a: usize, b: usize) -> f64 {
    if a == b {
        return 0.5;
    }
    let (mut wins, mut total) = (0usize, 0usize);
    for r in dataset.records() {
        if (r.preferred, r.rejected) == (a, b) {
            wins += 1;
            total += 1;
        } else if (r.preferred, r.rejected) == (b, a) {
            total += 1;
        }
    }
    if total > 0 {
        return wins as f64 / total as f64;
    }
    match (dataset.mentions(a), dataset.mentions(b)) {
        (true, false) => 1.0,
        (false, true) => 0.0,
        _ => 0.5,
    }
}

/// Record counts per ordered pair; each pair keeps its own total.
pub fn empirical_counts(dataset: &ComparisonDataset) -> Result<PairwiseCounts> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let m = dataset.alternatives().len();
    let mut strict = SquareMatrix::filled(m, Weight::zero());
    for r in dataset.records() {
        strict[(r.preferred, r.rejected)] += Weight::from_integer(1);
    }
    PairwiseCounts::from_matrices(
        dataset.alternatives().clone(),
        strict,
        SquareMatrix::filled(m, Weight::zero()),
    )
}
