use std::path::Path;
use std::process::{Command, Output};

fn dmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dmc")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn synth_then_run_agrees() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data.bin");
    let out = tmp.path().join("results");
    assert!(dmc(&["synth", "--preset", "paper", "--out", s(&data)]).status.success());
    let run = dmc(&["run", "--input", s(&data), "--out", s(&out)]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["agreement"]["all_identical"], true);
    assert_eq!(report["n"], 23);
    assert_eq!(report["p"], 5000);
    for f in ["embedding.csv", "labels.json", "epsilon_scan.csv", "corr_all.csv", "corr_cluster0.csv", "corr_cluster1.csv"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let members: usize = report["correlation"]["clusters"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["members"].as_array().unwrap().len())
        .sum();
    assert_eq!(members, 23);
}

#[test]
fn missing_input_exits_2() {
    let out = dmc(&["run", "--input", "missing.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.csv"));
}

#[test]
fn zero_epsilon_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data.bin");
    assert!(dmc(&["synth", "--p", "50", "--out", s(&data)]).status.success());
    let out = dmc(&["run", "--input", s(&data), "--epsilon", "0", "--out", s(&tmp.path().join("r"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilon"));
    assert!(!tmp.path().join("r").exists());
}

#[test]
fn ragged_csv_exits_2_with_line() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("bad.csv");
    std::fs::write(&data, "0,1\n2\n").unwrap();
    let out = dmc(&["corr", "--input", s(&data)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn single_step_subcommands() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data.csv");
    assert!(dmc(&["synth", "--p", "200", "--seed", "4", "--out", s(&data)]).status.success());
    let input = ["--input", s(&data)];

    let scan = dmc(&[&["scan"][..], &input].concat());
    assert!(scan.status.success());
    let v: serde_json::Value = serde_json::from_slice(&scan.stdout).unwrap();
    assert!(v["epsilon"].as_f64().unwrap() > 0.0);

    let embed = dmc(&[&["embed", "--dims", "2"][..], &input].concat());
    assert!(embed.status.success());
    let text = String::from_utf8(embed.stdout).unwrap();
    assert_eq!(text.lines().count(), 23);
    assert!(text.lines().all(|l| l.split(',').count() == 2));

    let mut labels = Vec::new();
    for method in ["spectral", "kmeans", "hierarchical"] {
        let out = dmc(&[&["cluster", "--method", method][..], &input].concat());
        assert!(out.status.success());
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        labels.push(v["labels"].as_array().unwrap().len());
    }
    assert_eq!(labels, [23, 23, 23]);

    let pca_out = tmp.path().join("pca.bin");
    assert!(dmc(&[&["baseline", "--method", "kpca", "--out", s(&pca_out)][..], &input].concat()).status.success());
    assert!(std::fs::read(&pca_out).unwrap().starts_with(b"DMC1"));

    let corr = dmc(&[&["corr"][..], &input].concat());
    assert!(corr.status.success());
    assert_eq!(String::from_utf8(corr.stdout).unwrap().lines().count(), 23);
}

#[test]
fn figures_are_repeatable() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data.bin");
    assert!(dmc(&["synth", "--p", "300", "--seed", "2", "--out", s(&data)]).status.success());
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(dmc(&["run", "--input", s(&data), "--out", s(&a)]).status.success());
    assert!(dmc(&["--threads", "3", "run", "--input", s(&data), "--out", s(&b)]).status.success());
    for f in ["embedding.svg", "epsilon.svg", "dendrogram.svg", "corr.svg", "comparison.svg"] {
        let x = std::fs::read(a.join(f)).unwrap();
        assert_eq!(x, std::fs::read(b.join(f)).unwrap(), "{f}");
        assert!(x.starts_with(b"<svg"));
    }
}
