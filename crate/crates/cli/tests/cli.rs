use std::path::Path;
use std::process::{Command, Output};

fn edibench(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edibench"))
        .args(args)
        .current_dir(dir)
        .env_remove("EDIBENCH_SEED")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn help_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    for sub in [vec![], vec!["calibrate"], vec!["sweep"], vec!["efficiency"], vec!["agree"], vec!["score"], vec!["gen"]] {
        let mut args = sub.clone();
        args.push("--help");
        let o = edibench(&args, dir.path());
        assert_eq!(o.status.code(), Some(0), "{sub:?}");
        assert!(!o.stdout.is_empty());
    }
    let o = edibench(&["--version"], dir.path());
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn help_lists_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let text = String::from_utf8(edibench(&["sweep", "--help"], dir.path()).stdout).unwrap();
    for needle in ["default: auto", "default: results.csv", "default: 0", "default: 20000", "0:0.5:0.1"] {
        assert!(text.contains(needle), "missing {needle} in\n{text}");
    }
}

#[test]
fn calibrate_writes_results() {
    let dir = tempfile::tempdir().unwrap();
    let o = edibench(&["calibrate", "--n", "10000", "--seeds", "3", "--out", "r.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert!(text.lines().count() > 1);
    assert!(text.contains("calibrate/111,0.0"));
    assert!(text.contains("dci_rf"));
}

#[test]
fn sweep_covers_the_alpha_grid() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sweep", "--family", "rotation", "--alphas", "0:1:0.25", "--n", "500", "--reps", "1", "--seeds", "1",
        "--metrics", "mig,zdiff", "--out", "r.csv",
    ];
    let o = edibench(&args, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = edi_core::io::read_results_csv(&dir.path().join("r.csv")).unwrap();
    let mut alphas: Vec<f64> = rows.iter().map(|r| r.alpha).collect();
    alphas.dedup();
    assert_eq!(alphas, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
}

#[test]
fn missing_input_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = edibench(&["score", "--input", "missing.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_one_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["sweep", "--family", "spiral"],
        vec!["sweep", "--family", "noise", "--alphas", "0:2:0.5"],
        vec!["sweep", "--family", "noise", "--alphas", "banana"],
        vec!["sweep", "--family", "noise", "--metrics", "edi,nope"],
        vec!["sweep", "--family", "noise", "--estimator", "ksg:0"],
        vec!["calibrate", "--seeds", "0"],
        vec!["calibrate", "--cases", "012"],
        vec!["calibrate", "--bogus-flag"],
        vec!["efficiency", "--n", "1000", "--sizes", "100,5000"],
        vec!["efficiency", "--timing-sizes", "10,5,20"],
        vec!["gen"],
    ];
    for args in cases {
        let mut full = args.clone();
        full.extend(["--out", "r.csv"]);
        let o = edibench(&full, dir.path());
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
        assert!(!dir.path().join("r.csv").exists(), "{args:?} left output behind");
    }
}

#[test]
fn gen_then_score_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let o = edibench(&["gen", "--case", "101", "--n", "800", "--out", "rep.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("rep.kinds.json").exists());
    let o = edibench(
        &["score", "--input", "rep.csv", "--estimator", "discrete", "--diagnostics", "diag.json", "--out", "s.csv"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = edi_core::io::read_results_csv(&dir.path().join("s.csv")).unwrap();
    assert!(rows.iter().any(|r| r.metric == "edi" && r.component == "comp"));
    let diag: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("diag.json")).unwrap()).unwrap();
    assert_eq!(diag["intensities"].as_array().unwrap().len(), 3);
}

#[test]
fn seed_variable_overrides_flag() {
    let dir = tempfile::tempdir().unwrap();
    let run = |env: Option<&str>, seed: &str, out: &str| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_edibench"));
        cmd.args(["gen", "--family", "noise", "--alpha", "0.3", "--n", "200", "--master-seed", seed, "--out", out])
            .current_dir(dir.path())
            .env_remove("EDIBENCH_SEED");
        if let Some(v) = env {
            cmd.env("EDIBENCH_SEED", v);
        }
        assert!(cmd.output().unwrap().status.success());
        std::fs::read(dir.path().join(out)).unwrap()
    };
    let by_flag = run(None, "42", "a.csv");
    let by_env = run(Some("42"), "7", "b.csv");
    let other = run(None, "7", "c.csv");
    assert_eq!(by_flag, by_env);
    assert_ne!(by_flag, other);
}
