use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

use crate::report::ExperimentReport;

pub const REPORT_FILE: &str = "report.json";
pub const COUNTS_FILE: &str = "counts.csv";
pub const MANIFEST_FILE: &str = "manifest.txt";

/// Files written by [`emit_report`], with their SHA-256 digests, sorted by
/// name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<(String, String)>,
}

impl Manifest {
    /// `<digest>  <name>` lines, readable by `sha256sum -c`.
    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(name, digest)| format!("{digest}  {name}\n")).collect()
    }
}

pub fn trace_file_name(method: &str, seed: u64) -> String {
    format!("trace_{method}_seed{seed}.csv")
}

/// Writes `report.json`, `counts.csv`, one trace per method and seed, and
/// `manifest.txt` into `dir`. Writing the same report twice gives
/// byte-identical files.
pub fn emit_report(report: &ExperimentReport, dir: impl AsRef<Path>) -> Result<Manifest> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut files: Vec<(String, Vec<u8>)> = Vec::new();

    let mut json = serde_json::to_vec_pretty(report)?;
    json.push(b'\n');
    files.push((REPORT_FILE.into(), json));
    files.push((COUNTS_FILE.into(), counts_csv(report)?));
    for run in &report.runs {
        for (method, trace) in &run.traces {
            let mut buf = Vec::new();
            trace.write_csv(&mut buf)?;
            files.push((trace_file_name(method.name(), run.seed), buf));
        }
    }
    files.sort();

    let mut entries = Vec::new();
    for (name, bytes) in &files {
        write_file(&dir.join(name), bytes)?;
        entries.push((name.clone(), hex::encode(Sha256::digest(bytes))));
    }
    let manifest = Manifest { entries };
    write_file(&dir.join(MANIFEST_FILE), manifest.to_text().as_bytes())?;
    Ok(manifest)
}

pub fn load_report(path: impl AsRef<Path>) -> Result<ExperimentReport> {
    let path = resolve_report(path.as_ref());
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Accepts either a report file or the directory it was emitted into.
fn resolve_report(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(REPORT_FILE)
    } else {
        path.to_path_buf()
    }
}

/// `seed,alternative,opponent,strict,indifferent`, one row per ordered pair.
fn counts_csv(report: &ExperimentReport) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    writeln!(out, "seed,alternative,opponent,strict,indifferent")?;
    for run in &report.runs {
        for (a, label_a) in report.alternatives.iter().enumerate() {
            for (b, label_b) in report.alternatives.iter().enumerate() {
                if a != b {
                    writeln!(
                        out,
                        "{},{label_a},{label_b},{},{}",
                        run.seed, run.counts.strict[a][b], run.counts.indifferent[a][b]
                    )?;
                }
            }
        }
    }
    Ok(out)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}
