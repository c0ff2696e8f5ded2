use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use expcli::run::config_hash;
use expcli::{emit_report, load_report, run_experiment, ExperimentConfig, ExperimentReport, Method};
use maxlottery::PreferenceProfile;
use serde_json::Value;
use sha2::{Digest, Sha256};

fn experiments_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../experiments")
}

fn quick(name: &str) -> ExperimentConfig {
    let mut c = ExperimentConfig::load(experiments_dir().join(format!("{name}.json"))).unwrap();
    c.spo.iterations = 200;
    c.dataset_size = 512;
    c
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let config = quick("majority");
    let a = serde_json::to_string(&run_experiment(&config).unwrap()).unwrap();
    let b = serde_json::to_string(&run_experiment(&config).unwrap()).unwrap();
    assert_eq!(a, b);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let c = serde_json::to_string(&pool.install(|| run_experiment(&config)).unwrap()).unwrap();
    assert_eq!(a, c);
}

#[test]
fn emitted_files_match_the_manifest() {
    let mut config = quick("cyclic");
    config.methods = vec![Method::MaximalLotteryLp, Method::Spo];
    config.seeds = vec![0, 1, 2];
    let report = run_experiment(&config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let manifest = emit_report(&report, dir.path()).unwrap();

    let traces = manifest.entries.iter().filter(|(n, _)| n.starts_with("trace_")).count();
    assert_eq!(traces, 6);
    assert!(manifest.entries.len() >= 3);
    let names: Vec<&String> = manifest.entries.iter().map(|(n, _)| n).collect();
    assert!(names.windows(2).all(|w| w[0] < w[1]));
    assert!(names.contains(&&"trace_spo_seed2.csv".to_string()));

    let listed = fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
    assert_eq!(listed, manifest.to_text());
    for line in listed.lines() {
        let (digest, name) = line.split_once("  ").unwrap();
        let bytes = fs::read(dir.path().join(name)).unwrap();
        assert_eq!(digest, hex::encode(Sha256::digest(&bytes)));
    }

    let again = emit_report(&report, dir.path()).unwrap();
    assert_eq!(again, manifest);
}

#[test]
fn traces_and_counts_have_the_documented_layout() {
    let mut config = quick("majority");
    config.methods = vec![Method::Spo, Method::Borda];
    let report = run_experiment(&config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit_report(&report, dir.path()).unwrap();

    let spo = fs::read_to_string(dir.path().join("trace_spo_seed0.csv")).unwrap();
    let mut lines = spo.lines();
    assert_eq!(lines.next(), Some("iteration,alternative,policy_prob,mixture_prob"));
    let iterations: BTreeSet<usize> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(iterations.contains(&1) && iterations.contains(&200));
    assert!(!spo.contains('\r'));

    let borda = fs::read_to_string(dir.path().join("trace_borda_seed0.csv")).unwrap();
    assert_eq!(borda.lines().count(), 4);
    assert!(borda.lines().skip(1).all(|l| l.starts_with("0,")));

    let counts = fs::read_to_string(dir.path().join("counts.csv")).unwrap();
    let mut total = 0;
    for line in counts.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields[0] == "0" {
            total += fields[3].parse::<usize>().unwrap();
        }
    }
    assert_eq!(total, config.dataset_size);
}

#[test]
fn report_json_roundtrips() {
    let report = run_experiment(&quick("iia_small")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit_report(&report, dir.path()).unwrap();
    let back = load_report(dir.path()).unwrap();
    let strip = |r: &ExperimentReport| {
        let mut r = r.clone();
        r.runs.iter_mut().for_each(|run| run.traces.clear());
        r
    };
    assert_eq!(strip(&back), strip(&report));
}

/// Recomputes every verdict from the JSON alone: stored lotteries, stored
/// counts and the stored population.
fn check_verdicts(report: &Value) {
    let alternatives: Vec<&str> = report["alternatives"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    let m = alternatives.len();
    let groups = report["population"]["groups"].as_array().unwrap();
    let weight = |g: &Value| g["weight"].as_f64().unwrap();
    let total: f64 = groups.iter().map(weight).sum();
    let majority = alternatives.iter().copied().find(|a| {
        let top: f64 = groups.iter().filter(|g| g["ranking"][0] == *a).map(weight).sum();
        2.0 * top > total
    });
    for run in report["runs"].as_array().unwrap() {
        let strict = &run["counts"]["strict"];
        let n = |a: usize, b: usize| strict[a][b].as_i64().unwrap();
        let condorcet = (0..m).find(|&a| (0..m).all(|b| a == b || n(a, b) > n(b, a))).map(|a| alternatives[a]);
        let verdicts = &run["verdicts"];
        for (key, subject) in [("majority", majority), ("condorcet", condorcet)] {
            assert_eq!(verdicts[key]["subject"].as_str(), subject, "{key}");
            for (method, result) in run["results"].as_object().unwrap() {
                let expected = match subject {
                    None => "not_applicable",
                    Some(w) if result["lottery"][w].as_f64().unwrap() >= 0.95 => "satisfied",
                    Some(_) => "violated",
                };
                assert_eq!(verdicts[key]["per_method"][method], expected, "{key} {method}");
            }
        }
    }
}

#[test]
fn verdicts_are_recomputable_from_the_report() {
    for name in ["majority", "iia_small", "cyclic"] {
        let report = run_experiment(&quick(name)).unwrap();
        check_verdicts(&serde_json::to_value(&report).unwrap());
    }
}

#[test]
fn config_hash_ignores_paths_but_not_content() {
    let config = quick("majority");
    let population = PreferenceProfile::load(&config.population).unwrap();
    let base = config_hash(&config, &population).unwrap();

    let mut moved = config.clone();
    moved.output_dir = Some("/elsewhere".into());
    moved.population = experiments_dir().join("populations/majority.json");
    assert_eq!(config_hash(&moved, &population).unwrap(), base);

    let mut bigger = config.clone();
    bigger.dataset_size += 1;
    assert_ne!(config_hash(&bigger, &population).unwrap(), base);
    assert_eq!(base.len(), 64);
}

#[test]
fn invalid_configs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let path = dir.path().join(name);
        fs::write(&path, text).unwrap();
        path
    };
    fs::copy(experiments_dir().join("populations/majority.json"), dir.path().join("pop.json")).unwrap();
    assert!(ExperimentConfig::load(write("ok.json", r#"{"name": "x", "population": "pop.json"}"#)).is_ok());
    let bad = [
        r#"{"name": "x", "population": "missing.json"}"#,
        r#"{"name": "x", "population": "pop.json", "methods": ["ppo"]}"#,
        r#"{"name": "x", "population": "pop.json", "methods": []}"#,
        r#"{"name": "x", "population": "pop.json", "dataset_size": 0}"#,
        r#"{"name": "x", "population": "pop.json", "seeds": [1, 1]}"#,
        r#"{"name": "x", "population": "pop.json""#,
    ];
    for (i, text) in bad.iter().enumerate() {
        assert!(ExperimentConfig::load(write(&format!("bad{i}.json"), text)).is_err(), "{text}");
    }
    assert!(ExperimentConfig::load(dir.path().join("absent.json")).is_err());
}

fn cli(args: &[&str], cwd: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_expcli")).args(args).current_dir(cwd).output().unwrap()
}

#[test]
fn command_line_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let experiments = experiments_dir();
    let config = |name: &str| experiments.join(format!("{name}.json")).display().to_string();
    for (name, out) in [("iia_small", "small"), ("iia_large", "large")] {
        let o = cli(
            &["run", "--config", &config(name), "--seed", "0", "--seed", "1", "--out", out, "--methods", "btl_softmax,maximal_lottery_lp", "--dataset-size", "600"],
            dir.path(),
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let report = load_report(dir.path().join(out)).unwrap();
        assert_eq!(report.runs.len(), 2);
        assert_eq!(report.dataset_size, 600);
        assert_eq!(report.methods, vec![Method::BtlSoftmax, Method::MaximalLotteryLp]);
    }

    let o = cli(&["compare-iia", "--small", "small", "--large", "large/report.json", "--shared", "R,B", "--out", "iia.json"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let cmp: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(cmp["methods"]["maximal_lottery_lp"]["stable"], true);
    assert_eq!(cmp["methods"]["btl_softmax"]["seeds"][0]["flip"], true);
    assert!(dir.path().join("iia.json").is_file());

    let pop = experiments.join("populations/cycle.json").display().to_string();
    let o = cli(&["solve", "--profile", &pop], dir.path());
    assert!(o.status.success());
    let solved: Value = serde_json::from_slice(&o.stdout).unwrap();
    for a in ["R", "G", "B"] {
        assert!((solved["maximal_lottery"][a].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-9);
    }
    assert_eq!(solved["condorcet_winner"], Value::Null);
    assert_eq!(solved["smith_set"].as_array().unwrap().len(), 3);

    let o = cli(&["run", "--config", &config("majority"), "--methods", "ppo"], dir.path());
    assert!(!o.status.success());
    let o = cli(&["compare-iia", "--small", "small", "--large", "large", "--shared", "R,G"], dir.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("\"G\""));
}
