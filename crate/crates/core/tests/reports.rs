use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;

use purkit::dsl::{self, SystemFile};
use purkit::report::*;

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn load(name: &str) -> SystemFile {
    dsl::parse(&std::fs::read_to_string(corpus_dir().join(format!("{name}.pde"))).unwrap()).unwrap()
}

fn corpus_files() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "pde"))
        .collect();
    v.sort();
    v
}

fn tasks(s: &str) -> Options {
    Options { tasks: Some(parse_tasks(s).unwrap()), ..Options::default() }
}

#[test]
fn print_then_parse_is_identity() {
    for p in corpus_files() {
        let f = dsl::parse(&std::fs::read_to_string(&p).unwrap()).unwrap();
        let printed = dsl::print(&f);
        let again = dsl::parse(&printed).unwrap();
        assert_eq!(again, f, "{}", p.display());
        assert_eq!(dsl::print(&again), printed);
    }
}

#[test]
fn macaulay_from_source_text() {
    let f = dsl::parse("field rational(x1,x2,x3)\nunknowns y\neq D[3,3] y = 0\neq D[1,3] y - D[2] y = 0").unwrap();
    assert_eq!(f, {
        let mut g = load("ex3_2");
        g.name = None;
        g.field = dsl::FieldKind::Rational;
        g.sources.clear();
        g.tasks = None;
        for e in &mut g.equations {
            e.rhs = purkit::ore::Row::zero();
        }
        g
    });
}

#[test]
fn empty_task_set_gives_metadata_only() {
    let r = run_analysis(&load("ex3_1"), &tasks("")).unwrap();
    assert!(r.tasks.is_empty());
    let v = serde_json::to_value(&r).unwrap();
    let keys: BTreeSet<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, BTreeSet::from(["schema", "name", "field", "unknowns", "equations", "seed", "tasks"]));
    assert_eq!(v["schema"], 1);
}

#[test]
fn unknown_task_is_rejected() {
    assert_eq!(parse_tasks("involution, nonsense").unwrap_err(), "unknown task \"nonsense\"");
}

#[test]
fn example_3_1_report() {
    let r = run_analysis(&load("ex3_1"), &tasks("involution,purity,parametrize")).unwrap();
    let inv = r.involution.unwrap();
    assert_eq!(inv.tabular, ["1 2 3", "1 2 •", "1 2 •"]);
    assert_eq!(inv.characters, [3, 0, 0]);
    let p = r.parametrization.unwrap();
    assert_eq!(p.kind, "relative");
    assert_eq!(p.constraints.len(), 6);
    assert_eq!(p.inclusion.as_deref(), Some("equal"));
    assert!(p.verified);
    assert_eq!(r.purity.unwrap().pure, Some(2));
}

#[test]
fn lorenz_report() {
    let r = run_analysis(&load("prop4B1"), &tasks("involution,cc")).unwrap();
    assert_eq!(r.involution.unwrap().class_counts, [4, 2, 1, 1]);
    assert_eq!(r.cc.unwrap().rows, ["J4_4 + J3_3 + J2_2 + J1_1"]);
}

#[test]
fn order_bound_becomes_a_diagnostic() {
    let opts = Options { max_order: Some(1), ..tasks("involution") };
    let r = run_analysis(&load("ex3_2"), &opts).unwrap();
    assert!(r.involution.is_none());
    assert_eq!(r.diagnostics, [Diagnostic { task: Task::Involution, error: "order-bound".into() }]);
}

#[test]
fn reports_are_reproducible() {
    for name in ["ex3_3", "ex3_5", "ex4_a2"] {
        let f = load(name);
        let opts = Options { seed: Some(7), ..Options::default() };
        let a = run_analysis(&f, &opts).unwrap().to_json();
        let b = run_analysis(&f, &opts).unwrap().to_json();
        assert_eq!(a, b, "{name}");
    }
}

fn leaves(v: &serde_json::Value, out: &mut Vec<String>) {
    match v {
        serde_json::Value::String(s) => out.push(s.clone()),
        serde_json::Value::Number(n) => out.push(n.to_string()),
        serde_json::Value::Array(a) => a.iter().for_each(|x| leaves(x, out)),
        serde_json::Value::Object(o) => o.values().for_each(|x| leaves(x, out)),
        _ => {}
    }
}

#[test]
fn text_carries_the_json_data() {
    for p in corpus_files() {
        let f = dsl::parse(&std::fs::read_to_string(&p).unwrap()).unwrap();
        let r = run_analysis(&f, &Options::default()).unwrap();
        let text = r.to_text();
        let mut all = Vec::new();
        leaves(&serde_json::to_value(&r).unwrap(), &mut all);
        for leaf in all {
            assert!(text.contains(&leaf), "{}: {leaf:?} missing from text", p.display());
        }
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}

fn copy_corpus() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for p in std::fs::read_dir(corpus_dir()).unwrap() {
        let p = p.unwrap().path();
        std::fs::copy(&p, dir.path().join(p.file_name().unwrap())).unwrap();
    }
    dir
}

#[test]
fn shipped_corpus_passes() {
    let s = corpus_run(&corpus_dir()).unwrap();
    assert!(s.entries.len() >= 14);
    for e in &s.entries {
        assert_eq!(e.outcome, Outcome::Pass, "{}", e.file);
    }
    assert_eq!(s.exit_code(), 0);
    let names: Vec<&str> = s.entries.iter().map(|e| e.file.as_str()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn edited_golden_fails() {
    let dir = copy_corpus();
    let g = dir.path().join("ex3_1.golden.json");
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&g).unwrap()).unwrap();
    v["involution"]["characters"][0] = 4.into();
    std::fs::write(&g, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    std::fs::remove_file(dir.path().join("ex2_1.golden.json")).unwrap();
    let s = corpus_run(dir.path()).unwrap();
    let outcome = |f: &str| s.entries.iter().find(|e| e.file == f).unwrap().outcome.clone();
    assert_eq!(outcome("ex3_1.pde"), Outcome::Mismatch("$.involution.characters[0]".into()));
    assert_eq!(outcome("ex2_1.pde"), Outcome::Ungolden);
    assert_eq!(s.failed(), 2);
    assert_eq!(s.exit_code(), 1);
}

#[test]
fn empty_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let s = corpus_run(dir.path()).unwrap();
    assert_eq!(s.render(), "0 run\n");
    assert_eq!(s.exit_code(), 0);
}

fn purkit(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_purkit")).args(args).env_remove("PURKIT_SEED").output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn exit_codes() {
    let ex = corpus_dir().join("ex3_2.pde");
    let ex = ex.to_str().unwrap();
    assert_eq!(purkit(&["analyze", ex, "--tasks", "involution"]).0, 0);
    assert_eq!(purkit(&["analyze", ex, "--tasks", "involution", "--max-order", "1"]).0, 2);
    assert_eq!(purkit(&["analyze", ex, "--tasks", "bogus"]).0, 3);
    assert_eq!(purkit(&["frobnicate"]).0, 3);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pde");
    std::fs::write(&bad, "field constants(x1,x2,x3)\nunknowns y\neq D[9] y = 0\n").unwrap();
    assert_eq!(purkit(&["analyze", bad.to_str().unwrap()]).0, 3);
    assert_eq!(purkit(&["corpus", "run", dir.path().to_str().unwrap()]).0, 1);
    assert_eq!(purkit(&["corpus", "run", corpus_dir().to_str().unwrap()]).0, 0);
}

#[test]
fn seed_from_environment() {
    let ex = corpus_dir().join("ex3_5.pde");
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_purkit"));
        c.args(["analyze", ex.to_str().unwrap(), "--json", "--tasks", "involution"]);
        if let Some(f) = flag {
            c.args(["--seed", f]);
        }
        match env {
            Some(e) => c.env("PURKIT_SEED", e),
            None => c.env_remove("PURKIT_SEED"),
        };
        let v: serde_json::Value = serde_json::from_slice(&c.output().unwrap().stdout).unwrap();
        v["seed"].as_u64().unwrap()
    };
    assert_eq!(run(None, None), DEFAULT_SEED);
    assert_eq!(run(Some("42"), None), 42);
    assert_eq!(run(Some("42"), Some("9")), 9);
}

#[test]
fn adjoint_command_prints_a_system() {
    let (code, out) = purkit(&["adjoint", corpus_dir().join("ex4_a1_riccati.pde").to_str().unwrap()]);
    assert_eq!(code, 0);
    let f = dsl::parse(&out).unwrap();
    assert_eq!(f.unknowns, ["lambda"]);
    let names = f.names();
    let rows: Vec<String> = f.equations.iter().map(|e| names.row(&e.lhs)).collect();
    assert_eq!(rows, ["D[1,1] lambda", "D[1] lambda - (1/x)*lambda"]);
}
