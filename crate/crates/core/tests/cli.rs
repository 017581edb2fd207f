use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_treecut"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const TRIANGLE: &str = "c star with three leaves, all pairs requested\np tct 4 mct\ne 1 2\ne 1 3\ne 1 4\nq 2 3\nq 3 4\nq 2 4\n";

fn report(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn solve_min_on_star_triangle() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "tri.tct", TRIANGLE);
    let out = run(&["solve", "--input", f.to_str().unwrap(), "--min", "--json"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["status"], "optimal");
    assert_eq!(r["size"], 2);
    assert_eq!(r["cut"].as_array().unwrap().len(), 2);
    assert_eq!(r["stats"]["fallback"], 0);
}

#[test]
fn exit_code_matrix() {
    let dir = TempDir::new().unwrap();
    let tri = write(dir.path(), "tri.tct", TRIANGLE);
    let tri = tri.to_str().unwrap();
    let good = write(dir.path(), "good.cut", "1 2\n1 4\n");
    let bad = write(dir.path(), "bad.cut", "c only one edge\n1 2\n");
    let broken = write(dir.path(), "broken.tct", "p tct 3 mct\ne 1 2\ne 2 3 4\n");
    let cyclic = write(dir.path(), "cyclic.tct", "p tct 3 mct\ne 1 2\ne 2 1\n");
    let units = write(dir.path(), "units.tct", "p tct 3 mct\ne 1 2\ne 2 3\nq 1 2\nq 2 3\n");
    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["solve", "-i", tri, "--k", "2"], 0),
        (vec!["solve", "-i", tri, "--k", "1"], 1),
        (vec!["solve", "-i", tri, "--min"], 0),
        (vec!["verify", "-i", tri, "--cut", good.to_str().unwrap()], 0),
        (vec!["verify", "-i", tri, "--cut", bad.to_str().unwrap()], 1),
        (vec!["verify", "-i", tri, "--cut", good.to_str().unwrap(), "--k", "1"], 1),
        (vec!["solve", "-i", broken.to_str().unwrap(), "--min"], 2),
        (vec!["solve", "-i", cyclic.to_str().unwrap(), "--min"], 2),
        (vec!["solve", "-i", "/nonexistent/x.tct", "--min"], 2),
        (vec!["solve", "-i", tri, "--k", "2", "--min"], 2),
        (vec!["solve", "-i", tri, "--mode", "wgmwct"], 2),
        (vec!["frobnicate"], 2),
        (vec![], 2),
        (vec!["gen", "--gadget", "no-such-gadget"], 2),
        (vec!["reduce", "-i", tri], 0),
        (vec!["reduce", "-i", units.to_str().unwrap(), "--k", "1"], 1),
        (vec!["reduce", "-i", units.to_str().unwrap(), "--k", "2"], 0),
        (vec!["bench", "--from", "5", "--to", "5", "--count", "1"], 0),
        (vec!["bench", "--step", "0"], 2),
    ];
    for (args, want) in cases {
        let out = run(&args);
        assert_eq!(code(&out), want, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn errors_name_the_line() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "x.tct", "p tct 3 mct\ne 1 2\ne 2 3 4\n");
    let out = run(&["solve", "-i", f.to_str().unwrap(), "--min"]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn decision_reads_budget_from_file() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "k.tct", &format!("{TRIANGLE}k 1\n"));
    assert_eq!(code(&run(&["solve", "-i", f.to_str().unwrap()])), 1);
    let out = run(&["solve", "-i", f.to_str().unwrap(), "--k", "3", "--json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["status"], "yes");
}

#[test]
fn gadget_run_shows_case_firings() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("q.tct");
    let out = run(&["gen", "--gadget", "special-quadruple", "--output", f.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let out = run(&["solve", "-i", f.to_str().unwrap(), "--min", "--json"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    let rules = r["stats"]["rules"].as_object().unwrap();
    assert!(rules.keys().any(|k| k.starts_with("Case")), "{rules:?}");
    assert_eq!(r["stats"]["fallback"], 0);
    assert_eq!(r["size"], 4);
}

#[test]
fn gen_output_round_trips_through_the_parser() {
    for mode in ["mct", "gmwct", "wgmwct"] {
        let out = run(&["gen", "--seed", "5", "--edges", "9", "--mode", mode, "--q", "3", "--k", "4"]);
        assert_eq!(code(&out), 0);
        let text = String::from_utf8(out.stdout).unwrap();
        let inst = treecut::io::parse_instance(&text).unwrap();
        assert_eq!(treecut::io::write_instance(&inst), text);
        assert_eq!(inst.mode().as_str(), mode);
    }
}

#[test]
fn terminal_set_routes_agree() {
    let dir = TempDir::new().unwrap();
    for seed in 0..10 {
        let f = dir.path().join(format!("g{seed}.tct"));
        let s = seed.to_string();
        let out = run(&["gen", "--seed", &s, "--edges", "8", "--mode", "gmwct", "--q", "2", "-o", f.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
        let dp = report(&run(&["solve", "-i", f.to_str().unwrap(), "--min", "--json"]));
        let mct = report(&run(&["solve", "-i", f.to_str().unwrap(), "--min", "--json", "--mode", "mct"]));
        assert_eq!(dp["solver"], "dp");
        assert_eq!(mct["solver"], "branch");
        assert_eq!(dp["size"], mct["size"], "seed {seed}");
    }
}

#[test]
fn reduce_output_keeps_the_optimum() {
    let dir = TempDir::new().unwrap();
    for seed in 0..10 {
        let s = seed.to_string();
        let out = run(&["gen", "--seed", &s, "--edges", "10", "--requests", "8"]);
        let f = write(dir.path(), "r.tct", std::str::from_utf8(&out.stdout).unwrap());
        let orig = report(&run(&["solve", "-i", f.to_str().unwrap(), "--min", "--json"]));
        let red = report(&run(&["reduce", "-i", f.to_str().unwrap(), "--json"]));
        let g = write(dir.path(), "red.tct", red["instance"].as_str().unwrap());
        let after = report(&run(&["solve", "-i", g.to_str().unwrap(), "--min", "--json"]));
        let forced = red["forced_cuts"].as_array().unwrap().len() as u64;
        assert_eq!(orig["size"].as_u64().unwrap(), after["size"].as_u64().unwrap() + forced, "seed {seed}");
        assert!(red["violations"].as_array().unwrap().is_empty());
    }
}

#[test]
fn bench_prints_csv() {
    let out = run(&["bench", "--from", "6", "--to", "12", "--step", "6", "--count", "2"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,requests,k,nodes,leaves,bound,time_s");
    assert_eq!(lines.len(), 5);
    for l in &lines[1..] {
        let f: Vec<&str> = l.split(',').collect();
        assert_eq!(f.len(), 7);
        let leaves: u64 = f[4].parse().unwrap();
        let bound: u64 = f[5].parse().unwrap();
        assert!(leaves <= bound);
    }
}
