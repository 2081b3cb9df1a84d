mod common;

use std::process::Command;

use common::{fold_corpus, synthetic_pdb, write_corpus, Fold};

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wgraphlets"))
}

fn run_ok(cmd: &mut Command) -> String {
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn atlas_dump_reports_counts() {
    let json: serde_json::Value = serde_json::from_str(&run_ok(cli().args(["atlas", "dump"]))).unwrap();
    assert_eq!(json["graphlet_count"], 29);
    assert_eq!(json["graphlets"].as_array().unwrap().len(), 29);
}

#[test]
fn psn_build_writes_edge_dump() {
    let dir = tempfile::tempdir().unwrap();
    let pdb = dir.path().join("x.pdb");
    std::fs::write(&pdb, synthetic_pdb(Fold::Helix, 12, 'A', 1)).unwrap();
    let dump = run_ok(cli().args(["psn", "build", "--chain", "A", "--range", "2-11", "--pdb"]).arg(&pdb));
    let header: Vec<&str> = dump.lines().next().unwrap().split(' ').collect();
    assert_eq!(header[0], "10");
    assert_eq!(dump.lines().count(), 1 + header[1].parse::<usize>().unwrap());
}

#[test]
fn extract_evaluate_export_chain() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_corpus(dir.path(), "cli", &fold_corpus(4, 20));
    let vec_store = dir.path().join("vec");
    run_ok(
        cli()
            .args(["extract", "--measure", "graphlet35", "--workers", "2", "--manifest"])
            .arg(&manifest)
            .arg("--out")
            .arg(&vec_store),
    );
    let report = dir.path().join("report.json");
    run_ok(
        cli().args(["evaluate", "--folds", "2", "--seed", "1", "--store"]).arg(&vec_store).arg("--out").arg(&report),
    );
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["folds"].as_array().unwrap().len(), 2);

    let mat_store = dir.path().join("mat");
    run_ok(
        cli()
            .args(["extract", "--measure", "wegdvm", "--statistic", "sum", "--manifest"])
            .arg(&manifest)
            .arg("--out")
            .arg(&mat_store),
    );
    let out = cli().args(["evaluate", "--store"]).arg(&mat_store).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("export-dnn"));
    run_ok(cli().args(["export-dnn", "--store"]).arg(&mat_store).arg("--out").arg(dir.path().join("dnn")));
    assert!(dir.path().join("dnn/index.json").exists());
}

#[test]
fn bad_arguments_are_rejected() {
    assert!(!cli()
        .args(["extract", "--measure", "nonsense", "--manifest", "m", "--out", "o"])
        .output()
        .unwrap()
        .status
        .success());
    assert!(!cli()
        .args(["psn", "build", "--pdb", "/nonexistent.pdb", "--chain", "A"])
        .output()
        .unwrap()
        .status
        .success());
}
