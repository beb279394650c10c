use std::path::Path;
use std::process::{Command, Output};

use edge_aci::bayes::BayesNet;

fn aci(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aci"))
        .args(args)
        .current_dir(cwd)
        .env("ACI_LOG_LEVEL", "error")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn train_scratch_writes_one_row_per_round() {
    let dir = tempfile::tempdir().unwrap();
    let o = aci(
        &[
            "run",
            "train_scratch",
            "--rounds",
            "20",
            "--seed",
            "7",
            "--out",
            "out",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let trace = std::fs::read_to_string(dir.path().join("out/trace_seed7.csv")).unwrap();
    let lines: Vec<&str> = trace.lines().collect();
    assert_eq!(lines.len(), 21);
    assert!(lines[0].starts_with("round,surprise,pv,ra,learning_action"));
    assert!(dir.path().join("out/summary.csv").exists());
    assert!(dir.path().join("out/timing.csv").exists());
}

#[test]
fn unknown_scenario_fails_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let o = aci(&["run", "no_such_thing", "--out", "out"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("unknown scenario"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn missing_slo_file_leaves_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = aci(
        &[
            "run",
            "train_scratch",
            "--slos",
            "absent.json",
            "--out",
            "out",
        ],
        dir.path(),
    );
    assert!(!o.status.success());
    assert!(stderr(&o).contains("absent.json"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn exported_model_imports_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let o = aci(
        &[
            "export-model",
            "--rounds",
            "8",
            "--seed",
            "2",
            "--out",
            "m.json",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let path = dir.path().join("m.json");
    let model = BayesNet::load(&path).unwrap();
    let again = BayesNet::from_json(&model.to_json().unwrap()).unwrap();
    assert_eq!(model, again);
    let o = aci(&["import-model", "m.json"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("variables"));
}

#[test]
fn tampered_model_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = aci(
        &["export-model", "--rounds", "5", "--out", "m.json"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let path = dir.path().join("m.json");
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let cell = &mut doc["cpts"][0]["values"][0];
    *cell = serde_json::json!(cell.as_f64().unwrap() + 0.25);
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let o = aci(&["import-model", "m.json"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("CPT row not normalized"));
}

#[test]
fn merging_a_model_with_itself_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    assert!(aci(
        &["export-model", "--rounds", "6", "--out", "a.json"],
        dir.path()
    )
    .status
    .success());
    let o = aci(
        &[
            "merge-models",
            "a.json",
            "a.json",
            "--wa",
            "0.3",
            "--wb",
            "0.7",
            "--out",
            "m.json",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let a = BayesNet::load(dir.path().join("a.json")).unwrap();
    let m = BayesNet::load(dir.path().join("m.json")).unwrap();
    assert!(a.same_structure(&m));
    for (x, y) in a.cpts().iter().zip(m.cpts()) {
        for (p, q) in x.values().iter().zip(y.values()) {
            assert!((p - q).abs() <= 1e-12);
        }
    }
}

#[test]
fn classify_prints_every_device() {
    let dir = tempfile::tempdir().unwrap();
    let o = aci(&["classify"], dir.path());
    assert!(o.status.success());
    let out = String::from_utf8_lossy(&o.stdout);
    assert_eq!(out.lines().count(), 6);
    assert!(out.contains("Orin,3,2,5"));
}

#[test]
fn same_config_gives_identical_traces() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = aci(
            &[
                "run",
                "dist_shift",
                "--rounds",
                "12",
                "--seed",
                "4",
                "--out",
                out,
            ],
            dir.path(),
        );
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for name in ["trace_stream_seed4.csv", "trace_blur_seed4.csv"] {
        let a = std::fs::read(dir.path().join("a").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
}
