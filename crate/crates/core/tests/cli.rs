use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use haar_fluct::config::RunConfig;
use haar_fluct::perturb;

fn configs() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    v.sort();
    v
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_haar-fluct")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn shipped_configs_load() {
    let all = configs();
    assert_eq!(all.len(), 7);
    for path in all {
        let cfg = RunConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let spec = cfg.spec().unwrap();
        let limits = perturb::limiting_eigenvalues(&spec).unwrap();
        for e in &cfg.experiments {
            e.target.to_target().resolve(&limits).unwrap();
        }
    }
}

#[test]
fn limits_prints_json() {
    let out = cli(&["limits", "--config", s(&config("fig4.json"))]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["simple"], false);
    assert_eq!(doc["values"].as_array().unwrap().len(), 4);
    let mults: Vec<u64> = doc["clusters"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["multiplicity"].as_u64().unwrap())
        .collect();
    assert_eq!(mults.iter().sum::<u64>(), 4);
    assert!(mults.contains(&3));
}

#[test]
fn law_writes_density_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["law", "--config", s(&config("fig2.json")), "--out", s(dir.path())]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc[0]["law"]["law"], "exp_mixture");
    assert_eq!(doc[0]["scaling"], "N");
    let table = std::fs::read_to_string(dir.path().join("law_near2.csv")).unwrap();
    assert!(table.starts_with("x,density,cdf"));
    assert_eq!(table.lines().count(), 402);
}

#[test]
fn law_lists_joint_components() {
    let out = cli(&["law", "--config", s(&config("fig4.json")), "--filter", "near1_top"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let joint = doc[0]["joint"].as_array().unwrap();
    let mut parts: Vec<(String, String)> = joint
        .iter()
        .map(|c| (c["law"]["component"].as_str().unwrap().into(), c["scaling"].as_str().unwrap().into()))
        .collect();
    parts.sort();
    let want = [("xi1", "sqrt(N)"), ("xi2", "sqrt(N)"), ("xi3", "N"), ("zeta", "N")];
    assert_eq!(parts, want.map(|(a, b)| (a.to_string(), b.to_string())));
}

#[test]
fn simulate_is_reproducible_across_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = config("fig4.json");
    let common = ["simulate", "--config", s(&cfg), "--filter", "near2", "--samples", "120"];
    let one = cli(&[&common[..], &["--threads", "1", "--out", s(a.path())]].concat());
    let many = cli(&[&common[..], &["--threads", "4", "--out", s(b.path())]].concat());
    assert!(one.status.success() && many.status.success());
    let read = |d: &Path| std::fs::read_to_string(d.join("samples_near2.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
    assert_eq!(read(a.path()).lines().count(), 121);
    for f in ["hist_near2.csv", "report_near2.json"] {
        assert!(a.path().join(f).exists(), "{f}");
    }
    assert!(!a.path().join("samples_near1_top.csv").exists());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.path().join("report_near2.json")).unwrap()).unwrap();
    assert_eq!(report["num_samples"], 120);
    assert_eq!(report["law"]["component"], "zeta");
}

#[test]
fn seed_override_changes_samples() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = config("fig1.json");
    for (dir, seed) in [(&a, "5"), (&b, "6")] {
        let out = cli(&["simulate", "--config", s(&cfg), "--samples", "50", "--seed", seed, "--out", s(dir.path())]);
        assert!(out.status.success());
    }
    let read = |d: &Path| std::fs::read_to_string(d.join("samples_near4.csv")).unwrap();
    assert_ne!(read(a.path()), read(b.path()));
}

#[test]
fn hist_writes_overlay_and_density() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["hist", "--config", s(&config("fig3.json")), "--samples", "150", "--out", s(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let hist = std::fs::read_to_string(dir.path().join("hist_near2.csv")).unwrap();
    assert!(hist.starts_with("left,right,count,height,density"));
    assert!(dir.path().join("density_near2.csv").exists());
    assert!(!dir.path().join("samples_near2.csv").exists());
}

#[test]
fn invalid_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"model": {"kind": "conjugation", "alphas": [1], "betas": [1], "n": 10}}"#).unwrap();
    assert_eq!(cli(&["limits", "--config", s(&bad)]).status.code(), Some(1));
    assert_eq!(cli(&["limits"]).status.code(), Some(1));
    let missing = cli(&["simulate", "--config", s(&config("fig1.json")), "--filter", "nope"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nope"));
    assert_eq!(cli(&["verify", "--filter", "nope"]).status.code(), Some(1));
    let index = dir.path().join("index.json");
    std::fs::write(
        &index,
        r#"{"model": {"kind": "rotation", "alphas": [4, 2, 1], "n": 50}, "experiments": [{"target": {"index": 6}}]}"#,
    )
    .unwrap();
    let out = cli(&["simulate", "--config", s(&index)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("index"));
}

#[test]
fn verify_exit_codes() {
    let ok = cli(&["verify", "--filter", "trivial"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("PASS [ 5 trivial]"));
    let failing = cli(&["verify", "--filter", "1"]);
    assert_eq!(failing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&failing.stdout).contains("FAIL [ 1 fig1]"));
}
