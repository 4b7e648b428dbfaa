use std::fs;
use std::process::Command;

fn colorlab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_colorlab")).args(args).output().unwrap()
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(colorlab(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(colorlab(&["couple", "--gen", "path:n=3", "--replicas", "0"]).status.code(), Some(1));
    assert_eq!(colorlab(&["gap", "--gen", "wheel:n=5"]).status.code(), Some(1));
    assert_eq!(colorlab(&["gap", "--graph", "/nonexistent/graph.json"]).status.code(), Some(1));
    assert_eq!(colorlab(&["--help"]).status.code(), Some(0));
}

#[test]
fn single_vertex_tv_profile() {
    let dir = tempfile::tempdir().unwrap();
    let out = colorlab(&["mix", "--gen", "complete:n=1", "--lists", "k=2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let plots: Vec<_> = fs::read_dir(dir.path().join("plots")).unwrap().map(|e| e.unwrap().path()).collect();
    let dat = plots.iter().find(|p| p.extension().is_some_and(|e| e == "dat")).unwrap();
    assert_eq!(fs::read_to_string(dat).unwrap(), "0 0.5\n1 0\n");
    let csv = fs::read_to_string(dir.path().join("mix.csv")).unwrap();
    assert!(csv.starts_with("# colorlab: "));
}

#[test]
fn small_corpus_bounds_hold() {
    let out = colorlab(&["verify-bounds", "--gen", "corpus:n=4", "--replicas", "2", "--tech-samples", "100"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# file: verify_bounds.csv"));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("check,")).collect();
    assert!(!rows.iter().any(|l| l.ends_with(",violated")));
    let summary = text.split("# file: verify_bounds_summary.csv").nth(1).unwrap();
    let tallies: Vec<&str> = summary.lines().filter(|l| l.starts_with("lemma_gv,") || l.starts_with("tech,")).collect();
    assert_eq!(tallies.len(), 2);
    assert!(tallies.iter().all(|l| l.ends_with(",0")));
}

#[test]
fn graph_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p3.txt");
    fs::write(&path, "3 2\n0 1\n1 2\n").unwrap();
    let out = colorlab(&["gap", "--graph", path.to_str().unwrap(), "--colors", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("glauber") && text.contains("kempe"));
}
