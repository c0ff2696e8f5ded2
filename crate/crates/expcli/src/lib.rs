//! Synthetic preference experiments: sample comparison data from a known
//! population, aggregate it with several methods, and record how each method
//! treats majority winners, Condorcet winners, cycles and irrelevant
//! alternatives.
//!
//! ```no_run
//! use expcli::{emit_report, run_experiment, ExperimentConfig};
//!
//! let config = ExperimentConfig::load("experiments/majority.json")?;
//! let report = run_experiment(&config)?;
//! emit_report(&report, "out/majority")?;
//! # Ok::<(), anyhow::Error>(())
//! ```

pub mod config;
pub mod emit;
pub mod iia;
pub mod report;
pub mod run;

pub use config::{Beta, BtlSettings, ExperimentConfig, Method, SpoSettings};
pub use emit::{emit_report, load_report, Manifest};
pub use iia::{compare_iia, IiaComparison};
pub use report::{ExperimentReport, Verdict, VERDICT_TOLERANCE};
pub use run::run_experiment;
