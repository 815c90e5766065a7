use std::path::Path;
use std::process::{Command, Output};

use mcu_synth::circuit::{emit_json, parse_json};

fn mcu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcu-synth")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn synth_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("c.json");
    let o =
        mcu(&["synth", "--n", "5", "--u", "random(3)", "--flatten", "--merge", "--aggressive", "--out", path(&file)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("cnot=30 one_qubit=32"), "{text}");

    for mode in ["dense", "sampled"] {
        let o = mcu(&["verify", "--circuit", path(&file), "--n", "5", "--u", "random(3)", "--mode", mode]);
        assert_eq!(o.status.code(), Some(0), "{mode}");
    }
    let o = mcu(&["verify", "--circuit", path(&file), "--n", "5", "--u", "random(4)"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn broken_circuit_fails() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("c.json");
    assert!(mcu(&["synth", "--n", "7", "--u", "X", "--scheme", "poly", "--flatten", "--out", path(&file)])
        .status
        .success());
    let mut c = parse_json(&std::fs::read_to_string(&file).unwrap()).unwrap();
    let i = c.ops().iter().position(|g| g.kind_name() == "cnot").unwrap();
    c.remove(i);
    std::fs::write(&file, emit_json(&c).unwrap()).unwrap();
    let o = mcu(&["verify", "--circuit", path(&file), "--n", "7", "--u", "X"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("c.json");
    assert!(mcu(&["synth", "--n", "3", "--u", "H", "--flatten", "--out", path(&file)]).status.success());
    let text = std::fs::read_to_string(&file).unwrap();
    std::fs::write(&file, &text[..text.len() / 2]).unwrap();
    assert_eq!(mcu(&["verify", "--circuit", path(&file), "--n", "3", "--u", "H"]).status.code(), Some(2));

    let m = dir.path().join("m.json");
    std::fs::write(&m, "[[[1,0],[1,0]],[[0,0],[1,0]]]").unwrap();
    let spec = format!("file:{}", path(&m));
    assert_eq!(mcu(&["synth", "--n", "3", "--u", &spec]).status.code(), Some(2));
    assert_eq!(mcu(&["synth", "--n", "3", "--u", "nope"]).status.code(), Some(2));
    assert_eq!(mcu(&["synth", "--u", "H"]).status.code(), Some(2));
    assert_eq!(mcu(&["table", "--n-min", "5", "--n-max", "4"]).status.code(), Some(2));
}

#[test]
fn deterministic_output() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for f in [&a, &b] {
        let o = mcu(&[
            "synth",
            "--n",
            "8",
            "--u",
            "random(9)",
            "--scheme",
            "poly",
            "--flatten",
            "--merge",
            "--out",
            path(f),
        ]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn qasm_output() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("c.qasm");
    assert!(mcu(&["synth", "--n", "4", "--u", "T", "--flatten", "--merge", "--aggressive", "--out", path(&q)])
        .status
        .success());
    let text = std::fs::read_to_string(&q).unwrap();
    assert!(text.starts_with("OPENQASM 2.0;"));
    assert!(text.contains("qreg q[4];"));
    assert_eq!(text.lines().filter(|l| l.starts_with("cx ")).count(), 14);
}

#[test]
fn table_rows() {
    let o = mcu(&["table", "--n-min", "1", "--n-max", "6", "--format", "csv"]);
    assert!(o.status.success());
    let csv = String::from_utf8(o.stdout).unwrap();
    assert_eq!(csv.lines().count(), 13);
    let summary = String::from_utf8(o.stderr).unwrap();
    assert!(summary.contains("stated n > 8"));

    let o = mcu(&["table", "--n-min", "2", "--n-max", "3", "--format", "text", "--metric", "cnot"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("crossover (")).count(), 1);
}
