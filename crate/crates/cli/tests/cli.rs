//! End-to-end tests on the compiled binary: exit codes, determinism, file
//! output, and the round trip of emitted tables.

use std::process::{Command, Output};

use hecke_core::eigenform::{solve_eigenform, FormTableFile};

fn hecke(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hecke"))
        .args(args)
        .env_remove("HECKE_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 output")
}

#[test]
fn graph_dot_lists_every_vertex() {
    let out = hecke(&["graph", "--r", "2", "--D", "3", "--format", "dot"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let vertex_lines = text
        .lines()
        .filter(|l| l.trim_start().starts_with("\"e(") && !l.contains("->"))
        .count();
    assert_eq!(vertex_lines, 10);
    assert!(text.contains("digraph phi_2"));
}

#[test]
fn reruns_are_byte_identical() {
    for args in [
        vec!["graph", "--r", "1", "--D", "4"],
        vec!["eigenform", "--q0", "3", "--D", "4", "--lambda", "1/3,-2"],
        vec!["toroidal-check", "--q0", "2", "--D", "3", "--random", "4", "--seed", "9"],
    ] {
        let a = hecke(&args);
        let b = hecke(&args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn eigenform_output_round_trips() {
    let out = hecke(&["eigenform", "--q0", "2", "--D", "3", "--lambda", "3/2,5"]);
    assert!(out.status.success());
    let parsed: FormTableFile = serde_json::from_str(&stdout(&out)).expect("table json");
    let (table, pair) = parsed.to_table().unwrap();
    let again = solve_eigenform(&pair, table.q0, table.bound, table.value(&hecke_core::bundles::ProjectiveType::from_gaps(vec![0, 0])).unwrap());
    assert_eq!(table, again);
}

#[test]
fn verification_commands_pass() {
    assert!(hecke(&["oracle-verify", "--D", "3", "--q0", "2"]).status.success());
    assert!(hecke(&["cusp-check", "--D", "3", "--q0", "2"]).status.success());
    assert!(hecke(&["toroidal-check", "--q0", "2", "--D", "4", "--lambda", "1,1"]).status.success());
    assert!(hecke(&["--golden"]).status.success());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(hecke(&["graph", "--r", "9", "--D", "3"]).status.code(), Some(2));
    assert_eq!(hecke(&["graph", "--nope"]).status.code(), Some(2));
    assert_eq!(hecke(&["eigenform", "--q0", "2", "--D", "3", "--lambda", "0.5,1"]).status.code(), Some(2));
    assert_eq!(hecke(&["toroidal-check", "--q0", "2", "--D", "3"]).status.code(), Some(2));
    assert_eq!(hecke(&[]).status.code(), Some(2));
}

#[test]
fn out_dir_env_var_resolves_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_hecke"))
        .args(["graph", "--r", "3", "--D", "2", "--out", "loops.json"])
        .env("HECKE_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let written = std::fs::read_to_string(dir.path().join("loops.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&written).unwrap();
    assert_eq!(v["operator"], 3);
    assert_eq!(v["boundary"], serde_json::json!([]));
}

#[test]
fn csv_outputs_are_tabular() {
    let out = hecke(&["graph", "--r", "2", "--D", "2", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("src_g1,src_g2,dst_g1,dst_g2,weight,src_boundary\n"));
    assert!(text.lines().any(|l| l == "0,0,0,1,q^2+q+1,false"));

    let out = hecke(&["eigenform", "--q0", "2", "--D", "2", "--lambda", "0,0", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("g1,g2,value\n"));
    assert!(text.lines().any(|l| l == "1,2,-4/3"));
}
