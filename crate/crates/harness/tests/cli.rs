use std::path::Path;
use std::process::{Command, Output};

use nbw_core::checkpoint::{write_checkpoint, Checkpoint};
use nbw_core::gnn::{GcnModel, TrainConfig};
use nbw_core::{read_dataset, InitMode};
use nbw_harness::report::ExperimentReport;

fn nbwgnn(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nbwgnn"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn ok(o: &Output) {
    assert!(o.status.success(), "stdout:\n{}\nstderr:\n{}", stdout(o), stderr(o));
}

#[test]
fn generate_writes_balanced_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = nbwgnn(dir.path(), &["--seed", "4", "generate", "--property", "infb", "--size", "120"]);
    ok(&o);
    let path = dir.path().join("infb_120_3_9.nbwds");
    let ds = read_dataset(&path).unwrap();
    assert_eq!(ds.len(), 120);
    assert_eq!(ds.records.iter().filter(|r| r.label).count(), 60);
    assert!(stdout(&o).contains("PosLen1: 20"), "{}", stdout(&o));

    let again = dir.path().join("again.nbwds");
    ok(&nbwgnn(dir.path(), &["--seed", "4", "--out", "again.nbwds", "generate", "--property", "infb", "--size", "120"]));
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());

    let o = nbwgnn(dir.path(), &["check", "--file", "infb_120_3_9.nbwds"]);
    ok(&o);
    assert!(stdout(&o).contains("120/120 labels and buckets reproduced"));
    let o = nbwgnn(dir.path(), &["check", "--file", "infb_120_3_9.nbwds", "--index", "7"]);
    ok(&o);
    assert!(stdout(&o).starts_with("record 7:"));
}

#[test]
fn generate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = nbwgnn(
        dir.path(),
        &["generate", "--property", "infb", "--size", "12", "--p", "0", "0", "--max-attempts", "50"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bucket PosLen1 starved"), "{}", stderr(&o));

    let o = nbwgnn(dir.path(), &["generate", "--property", "infb", "--size", "11"]);
    assert_eq!(o.status.code(), Some(1));
    let o = nbwgnn(dir.path(), &["generate", "--property", "bogus"]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn check_inline_automaton() {
    let dir = tempfile::tempdir().unwrap();
    let finitely_many_a = r#"{"n":2,"transitions":[[0,0,0],[0,1,0],[0,1,1],[1,1,1]],"accepting":[1]}"#;
    let o = nbwgnn(dir.path(), &["check", "--automaton", finitely_many_a]);
    ok(&o);
    let s = stdout(&o);
    for line in [
        "empty: false",
        "min1b: true",
        "infb: true",
        "min_accepting_cycle_length: 1",
        "witness: prefix \"b\" cycle \"b\"",
    ] {
        assert!(s.contains(line), "missing {line:?} in\n{s}");
    }

    let o = nbwgnn(dir.path(), &["check", "--automaton", r#"{"n":1,"transitions":[[0,0,0]],"accepting":[0]}"#]);
    ok(&o);
    assert!(stdout(&o).contains("min1b: false"));

    let o = nbwgnn(dir.path(), &["check", "--automaton", r#"{"n":2,"transitions":[[0,0,5]]}"#]);
    assert_eq!(o.status.code(), Some(1));
    let o = nbwgnn(dir.path(), &["check", "--automaton", "{\"n\":2,\n\"transitions\":[[0,0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn train_and_eval() {
    let dir = tempfile::tempdir().unwrap();
    ok(&nbwgnn(dir.path(), &["--seed", "1", "generate", "--property", "min1b", "--size", "250"]));
    let train = |out: &str| {
        nbwgnn(
            dir.path(),
            &["--seed", "3", "--out", out, "train", "--train", "min1b_250_3_9.nbwds", "--epochs", "2"],
        )
    };
    ok(&train("a.ckpt"));
    ok(&train("b.ckpt"));
    assert_eq!(
        std::fs::read(dir.path().join("a.ckpt")).unwrap(),
        std::fs::read(dir.path().join("b.ckpt")).unwrap()
    );
    let history = std::fs::read_to_string(dir.path().join("a.ckpt.history.jsonl")).unwrap();
    assert_eq!(history.lines().count(), 2);

    let o = nbwgnn(dir.path(), &["train", "--train", "min1b_250_3_9.nbwds", "--n-add", "5"]);
    assert_eq!(o.status.code(), Some(1));

    let o = nbwgnn(dir.path(), &["eval", "--checkpoint", "a.ckpt", "--test", "min1b_250_3_9.nbwds"]);
    ok(&o);
    assert!(stdout(&o).starts_with("accuracy: "));

    // An all-zero model predicts class 0 everywhere.
    let zero = Checkpoint::new(GcnModel::<f64>::zeros(5, 20), 3, InitMode::Half, TrainConfig::default(), None);
    write_checkpoint(&zero, dir.path().join("zero.ckpt")).unwrap();
    let o = nbwgnn(dir.path(), &["eval", "--checkpoint", "zero.ckpt", "--test", "min1b_250_3_9.nbwds"]);
    ok(&o);
    assert!(stdout(&o).contains("accuracy: 0.5000 (125/250)"), "{}", stdout(&o));

    ok(&nbwgnn(dir.path(), &["generate", "--property", "min1b", "--size", "24", "--n-add", "1", "--out", "k1.nbwds"]));
    let o = nbwgnn(dir.path(), &["eval", "--checkpoint", "zero.ckpt", "--test", "k1.nbwds"]);
    assert_eq!(o.status.code(), Some(1));

    let o = nbwgnn(dir.path(), &["eval", "--checkpoint", "missing.ckpt", "--test", "k1.nbwds"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn training_loss_decreases() {
    let dir = tempfile::tempdir().unwrap();
    ok(&nbwgnn(dir.path(), &["generate", "--property", "infb", "--size", "1000"]));
    ok(&nbwgnn(dir.path(), &["--out", "m.ckpt", "train", "--train", "infb_1000_3_9.nbwds", "--epochs", "10"]));
    let history: Vec<serde_json::Value> = std::fs::read_to_string(dir.path().join("m.ckpt.history.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(history.len(), 10);
    let loss = |i: usize| history[i]["loss"].as_f64().unwrap();
    assert!(loss(9) < loss(0), "epoch 1 {} epoch 10 {}", loss(0), loss(9));
}

#[test]
fn table1_subset() {
    let dir = tempfile::tempdir().unwrap();
    let o = nbwgnn(
        dir.path(),
        &["table1", "--sizes", "250", "--runs", "2", "--epochs", "5", "--save-datasets", "data"],
    );
    ok(&o);
    let report = ExperimentReport::from_jsonl(&std::fs::read_to_string(dir.path().join("table1.jsonl")).unwrap()).unwrap();
    assert_eq!(report.cells.len(), 6);
    assert!(report.cells.iter().all(|c| c.runs == 2 && c.accuracies.len() == 2));
    assert!(report.cell("emptiness_250_3_9", "500_10_25").is_some());
    assert!(dir.path().join("table1.jsonl.txt").exists());
    assert!(dir.path().join("data/infb_250_3_9.nbwds").exists());
    assert!(dir.path().join("data/infb_500_10_25.nbwds").exists());
    assert!(stdout(&o).contains("infb_250_3_9: larger test automata scored >= smaller in"));
}

#[test]
fn sweep_single_value() {
    let dir = tempfile::tempdir().unwrap();
    let o = nbwgnn(
        dir.path(),
        &["--out", "s.jsonl", "sweep-nadd", "--values", "0,3", "--size", "250", "--runs", "1", "--epochs", "3", "--properties", "infb"],
    );
    ok(&o);
    let report = ExperimentReport::from_jsonl(&std::fs::read_to_string(dir.path().join("s.jsonl")).unwrap()).unwrap();
    assert_eq!(report.cells.len(), 2);
    assert_eq!(report.cells[0].n_add, Some(0));
    let plot = std::fs::read_to_string(dir.path().join("s.jsonl.plot.tsv")).unwrap();
    assert_eq!(plot.lines().count(), 3);
}

#[test]
fn config_file_and_unknown_key() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), r#"{"seed": 9, "n_add": 1}"#).unwrap();
    ok(&nbwgnn(dir.path(), &["--config", "c.json", "generate", "--property", "emptiness", "--size", "60"]));
    let ds = read_dataset(dir.path().join("emptiness_60_3_9.nbwds")).unwrap();
    assert_eq!(ds.header.spec.n_add, 1);
    assert_eq!(ds.header.spec.gen.seed, 9);

    std::fs::write(dir.path().join("bad.json"), r#"{"sead": 9}"#).unwrap();
    let o = nbwgnn(dir.path(), &["--config", "bad.json", "generate", "--property", "infb", "--size", "60"]);
    assert_eq!(o.status.code(), Some(1));
}
