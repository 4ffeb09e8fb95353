use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn arn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = arn(args);
    assert!(
        out.status.success(),
        "arn {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Writes a random genome with several genes and returns its path.
fn genome(dir: &Path) -> std::path::PathBuf {
    let file = dir.join("genome.dna");
    let out = ok(&[
        "gen",
        "--length",
        "3000",
        "--seed",
        "3",
        "--out",
        path(&file),
    ]);
    assert!(out.starts_with("genes: "));
    file
}

fn assert_manifest_matches(dir: &Path) {
    let m = json(&dir.join("manifest.json"));
    let outputs = m["outputs"].as_array().unwrap();
    assert!(!outputs.is_empty());
    for entry in outputs {
        let bytes = fs::read(dir.join(entry["path"].as_str().unwrap())).unwrap();
        assert_eq!(
            entry["sha256"].as_str().unwrap(),
            hex::encode(Sha256::digest(&bytes))
        );
    }
}

#[test]
fn gen_is_seeded() {
    let a = ok(&["gen", "--length", "500", "--seed", "9"]);
    let b = ok(&["gen", "--length", "500", "--seed", "9"]);
    let c = ok(&["gen", "--length", "500", "--seed", "10"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(a.trim_end().len(), 500);
}

#[test]
fn parse_reports_gene_table() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("one.dna");
    fs::write(&file, "CCAGCTTAACCGTAGGTCGACC\n").unwrap();
    let table: Value = serde_json::from_str(&ok(&["parse", path(&file)])).unwrap();
    assert_eq!(table["gene_count"], 1);
    let g = &table["genes"][0];
    assert_eq!(g["promoter_start"], 2);
    assert_eq!(g["site_size"], 3);
    assert_eq!(g["locator"], "TAA");
    assert_eq!(g["enhancer"], "CCG");
    assert_eq!(g["inhibitor"], "TAG");
    assert_eq!(g["protein"], "CTG");
}

#[test]
fn invalid_base_is_a_one_line_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.dna");
    fs::write(&file, "ACGTN\n").unwrap();
    let out = arn(&["parse", path(&file)]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("arn: error[invalid-genome]:"), "{err}");
    assert!(err.contains("offset 4"), "{err}");
}

#[test]
fn zero_gene_simulation_fails() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("none.dna");
    fs::write(&file, "ACGTACGTACGT").unwrap();
    let out = arn(&[
        "simulate",
        path(&file),
        "--out-dir",
        path(&dir.path().join("o")),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("arn: error[no-genes]:"));
}

#[test]
fn simulate_writes_artifacts_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let g = genome(dir.path());
    let out = dir.path().join("sim");
    ok(&[
        "simulate",
        path(&g),
        "--out-dir",
        path(&out),
        "--cycles",
        "40",
        "--seed",
        "5",
    ]);
    let csv = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert_eq!(csv.lines().count(), 42);
    assert!(csv.starts_with("cycle,c_0,"));
    let run = json(&out.join("run.json"));
    assert_eq!(run["seed"], 5);
    assert!(fs::read_to_string(out.join("dynamics.svg"))
        .unwrap()
        .starts_with("<svg"));
    let m = json(&out.join("manifest.json"));
    assert_eq!(m["command"], "simulate");
    assert_eq!(m["seed"], 5);
    assert_eq!(m["config"]["cycles"], 40);
    assert_manifest_matches(&out);
}

#[test]
fn config_file_sits_between_defaults_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let g = genome(dir.path());
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# shorter run\ncycles = 30\nbeta = 1.5\nseed = 8\n").unwrap();
    let out = dir.path().join("sim");
    ok(&[
        "simulate",
        path(&g),
        "--out-dir",
        path(&out),
        "--config",
        path(&cfg),
        "--beta",
        "0.5",
    ]);
    let m = json(&out.join("manifest.json"));
    assert_eq!(m["config"]["cycles"], 30);
    assert_eq!(m["config"]["beta"], 0.5);
    assert_eq!(m["config"]["seed"], 8);
    assert_eq!(m["config"]["delta"], 1.0);

    fs::write(&cfg, "gamma = 2\n").unwrap();
    let bad = arn(&[
        "simulate",
        path(&g),
        "--out-dir",
        path(&out),
        "--config",
        path(&cfg),
    ]);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).starts_with("arn: error[invalid-config]:"));
}

#[test]
fn evolve_aggregates_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("evo");
    ok(&[
        "evolve",
        "--problem",
        "1",
        "--runs",
        "2",
        "--generations",
        "3",
        "--population",
        "6",
        "--genome-length",
        "2000",
        "--out-dir",
        path(&out),
    ]);
    for f in [
        "run_00/evolution.csv",
        "run_01/evolution.csv",
        "evolution_aggregate.csv",
    ] {
        let csv = fs::read_to_string(out.join(f)).unwrap();
        assert!(csv.starts_with("generation,best,median,q25,q75\n"));
        assert_eq!(csv.lines().count(), 5, "{f}");
    }
    let summary = json(&out.join("summary.json"));
    assert_eq!(summary["runs"].as_array().unwrap().len(), 2);
    let best = fs::read_to_string(out.join("best_genome.txt")).unwrap();
    assert_eq!(best.trim_end().len(), 2000);
    assert_manifest_matches(&out);

    let again = dir.path().join("evo2");
    ok(&[
        "evolve",
        "--problem",
        "1",
        "--runs",
        "2",
        "--generations",
        "3",
        "--population",
        "6",
        "--genome-length",
        "2000",
        "--out-dir",
        path(&again),
    ]);
    assert_eq!(
        fs::read(out.join("manifest.json")).unwrap(),
        fs::read(again.join("manifest.json")).unwrap()
    );
}

#[test]
fn unknown_problem_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = arn(&["evolve", "--problem", "3", "--out-dir", path(dir.path())]);
    assert!(!out.status.success());
}

#[test]
fn sweep_emits_one_trace_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let g = genome(dir.path());
    let out = dir.path().join("sweep");
    ok(&[
        "sweep",
        path(&g),
        "--param",
        "initial_concentration_mode",
        "--values",
        "uniform,random,0.3",
        "--cycles",
        "20",
        "--out-dir",
        path(&out),
    ]);
    for i in 0..3 {
        assert!(out.join(format!("run_{i:02}.csv")).exists());
    }
    let index = json(&out.join("sweep.json"));
    assert_eq!(index["runs"].as_array().unwrap().len(), 3);
    assert_eq!(
        fs::read_to_string(out.join("overlay.svg"))
            .unwrap()
            .matches("<polyline")
            .count(),
        3
    );
    assert_manifest_matches(&out);

    let bad = arn(&[
        "sweep",
        path(&g),
        "--param",
        "gamma",
        "--values",
        "1",
        "--out-dir",
        path(&out),
    ]);
    assert!(!bad.status.success());
}

#[test]
fn stats_prints_table() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&[
        "stats",
        "--lengths",
        "1000..3000:1000",
        "--trials",
        "10",
        "--out-dir",
        path(dir.path()),
    ]);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "length,trials,mean,rounded");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("1000,10,"));
    assert_eq!(
        fs::read_to_string(dir.path().join("gene_counts.csv")).unwrap(),
        stdout
    );
}

#[test]
fn mutstudy_mutates_cumulatively() {
    let dir = tempfile::tempdir().unwrap();
    let g = genome(dir.path());
    let out = dir.path().join("mut");
    ok(&[
        "mutstudy",
        path(&g),
        "--max-k",
        "3",
        "--cycles",
        "20",
        "--out-dir",
        path(&out),
    ]);
    let index = json(&out.join("mutations.json"));
    let runs = index["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 4);
    for (k, run) in runs.iter().enumerate() {
        assert_eq!(run["mutations"].as_array().unwrap().len(), k);
    }
    let original = fs::read_to_string(&g).unwrap();
    assert_eq!(
        fs::read_to_string(out.join("mutant_k0.dna")).unwrap(),
        original
    );
    let k3 = fs::read_to_string(out.join("mutant_k3.dna")).unwrap();
    let differing = original
        .bytes()
        .zip(k3.bytes())
        .filter(|(a, b)| a != b)
        .count();
    assert_eq!(differing, 3);
    assert_manifest_matches(&out);
}

#[test]
fn perturb_rejects_unknown_gene() {
    let dir = tempfile::tempdir().unwrap();
    let g = genome(dir.path());
    let out = arn(&[
        "perturb",
        path(&g),
        "--gene",
        "999",
        "--site",
        "inhibitor",
        "--dx",
        "-1",
        "--dy",
        "2",
        "--out-dir",
        path(&dir.path().join("p")),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("arn: error[invalid-config]:"));
}
