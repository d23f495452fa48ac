use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use hyperovals::graph::{collinearity_graph, to_graph6, GraphJson};
use hyperovals::projgeom::GeometryTables;
use hyperovals::quadric::{QForm, Quadric};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperovals")).args(args).output().expect("binary runs")
}

fn run_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperovals"))
        .args(args)
        .env("HYPEROVAL_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn construct(dir: &Path, which: &[&str], name: &str) -> String {
    let path = dir.join(name).display().to_string();
    let mut args = vec!["construct"];
    args.extend(which);
    args.extend(["--out", &path]);
    let out = run(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn stats_counts() {
    let out = run(&["stats", "--q", "4"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(
        (v["points"].as_u64(), v["lines"].as_u64(), v["planes"].as_u64(), v["pencils"].as_u64()),
        (Some(85), Some(357), Some(85), Some(1785))
    );
    assert_eq!(v["pencils_per_line"], 25);
    let log = String::from_utf8_lossy(&out.stderr);
    assert!(log.contains("table_hash=") && log.contains("q=4"));
}

#[test]
fn quadric72_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let f = construct(dir.path(), &["quadric72"], "q72.json");
    let out = run(&["verify", "--in", &f]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!((v["ok"].as_bool(), v["size"].as_u64()), (Some(true), Some(72)));
}

#[test]
fn spread96_aut_and_census() {
    let dir = tempfile::tempdir().unwrap();
    let f = construct(dir.path(), &["spread96", "--orbit", "1"], "s96.json");
    let aut = json(&run(&["aut", "--in", &f]));
    assert_eq!(aut["order"], "3200");
    let census = json(&run(&["census", "--in", &f]));
    assert_eq!((census["point_cliques"].as_u64(), census["plane_cliques"].as_u64()), (Some(80), Some(80)));
    let local = run(&["local-check", "--in", &f]);
    assert_eq!(local.status.code(), Some(0));
    let prop3 = run(&["prop3", "--in", &f, "--line", "0"]);
    assert_eq!(prop3.status.code(), Some(0));
    assert_eq!(json(&prop3)["witnesses"].as_array().unwrap().len(), 1);
    for orbit in ["2", "3"] {
        let g = construct(dir.path(), &["spread96", "--orbit", orbit], &format!("s96-{orbit}.json"));
        assert_eq!(run(&["verify", "--in", &g]).status.code(), Some(0));
    }
}

#[test]
fn single_line_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let f = construct(dir.path(), &["quadric72"], "q72.json");
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
    v["lines"] = Value::from(vec![v["lines"][0].clone()]);
    v["encodings"] = Value::from(vec![v["encodings"][0].clone()]);
    v["size"] = 1.into();
    let one = dir.path().join("one.json");
    std::fs::write(&one, v.to_string()).unwrap();
    let out = run(&["verify", "--in", one.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let w = json(&out);
    assert_eq!(w["ok"], false);
    assert_eq!(w["violation"]["hits"].as_array().unwrap().len(), 1);
    assert_eq!(run(&["census", "--in", one.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(run(&["verify", "--in", "/nonexistent/x.json"]).status.code(), Some(2));
    assert_eq!(run(&["stats", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["construct", "spread96", "--orbit", "4"]).status.code(), Some(2));
    assert_eq!(run(&["generalize", "--q", "16"]).status.code(), Some(2));
    assert_eq!(run(&["search", "--budget-nodes", "0"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{\"q\": 4}").unwrap();
    assert_eq!(run(&["verify", "--in", junk.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn exported_graph_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let f = construct(dir.path(), &["quadric72"], "q72.json");
    let t = GeometryTables::build(4).unwrap();
    let g = collinearity_graph(&t, &Quadric::new(&t, QForm::standard_hyperbolic()).external_lines().unwrap());
    let g6 = run(&["graph", "--in", &f, "--format", "graph6"]);
    assert_eq!(String::from_utf8(g6.stdout).unwrap().trim_end(), to_graph6(&g));
    let js: GraphJson = serde_json::from_slice(&run(&["graph", "--in", &f, "--format", "json"]).stdout).unwrap();
    assert_eq!(js, GraphJson::from(&g));
}

#[test]
fn generalize_q8() {
    let v = json(&run(&["generalize", "--q", "8"]));
    assert_eq!(v["lines"], 1568);
    let keys: Vec<&String> = v["histogram"].as_object().unwrap().keys().collect();
    assert_eq!(keys, ["0", "4"]);
}

#[test]
fn search_report_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str| {
        vec![
            "search".to_string(),
            "--min-size".into(),
            "72".into(),
            "--max-size".into(),
            "72".into(),
            "--seed".into(),
            "first-line".into(),
            "--budget-nodes".into(),
            "100000".into(),
            "--max-found".into(),
            "2".into(),
            "--out".into(),
            out.into(),
        ]
    };
    let mut texts = Vec::new();
    for (i, threads) in ["1", "3", "1"].iter().enumerate() {
        let out = dir.path().join(format!("r{i}.json")).display().to_string();
        let a = args(&out);
        let a: Vec<&str> = a.iter().map(String::as_str).collect();
        assert!(run_env(&a, threads).status.success());
        texts.push(std::fs::read_to_string(&out).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    assert_eq!(texts[0], texts[2]);
    let v: Value = serde_json::from_str(&texts[0]).unwrap();
    assert_eq!(v["found"].as_array().unwrap().len(), 2);
    assert!(v["found"][0].as_array().unwrap().len() == 72);
    assert_eq!(v["exhausted"], false);
    assert!(v["nodes"].as_u64().unwrap() <= 100_000);
}

#[test]
fn pencil_pair_search_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = construct(dir.path(), &["spread96"], "s96.json");
    let out = run(&[
        "search", "--seed", "pencil-pair", "--seed-from", &f, "--min-size", "96", "--max-size", "96", "--max-found", "1",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["found"][0].as_array().unwrap().len(), 96);
    assert_eq!(v["config"]["seed"]["mode"], "pencil-pair");
}

#[test]
fn construct_is_byte_stable() {
    let a = run(&["construct", "spread96", "--orbit", "2"]).stdout;
    let b = run_env(&["construct", "spread96", "--orbit", "2"], "2").stdout;
    assert_eq!(a, b);
}
