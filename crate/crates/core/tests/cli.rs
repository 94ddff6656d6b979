use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aloha-aoi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

#[test]
fn solve_report_schema() {
    let v = json(&[
        "solve",
        "--topology",
        "line:7",
        "--p",
        "1",
        "--solver",
        "pgd",
    ]);
    for key in [
        "topology",
        "p",
        "q_star",
        "objective",
        "per_link",
        "residuals",
        "iterations",
        "converged",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["topology"]["n"], 7);
    assert_eq!(v["topology"]["edges"].as_array().unwrap().len(), 6);
    assert_eq!(v["per_link"].as_array().unwrap().len(), 12);
    let link = &v["per_link"][0];
    for key in ["receiver", "sender", "mu", "aoi"] {
        assert!(link.get(key).is_some());
    }
    let table = [0.36, 0.35, 0.34, 0.34, 0.34, 0.35, 0.36];
    for (q, want) in floats(&v["q_star"]).into_iter().zip(table) {
        assert!((q - want).abs() <= 0.01);
    }
}

#[test]
fn solve_with_closed_forms() {
    let v = json(&["solve", "--topology", "star:3", "--solver", "star"]);
    let q = floats(&v["q_star"]);
    assert!(q.iter().all(|x| (x - 0.381966).abs() < 1e-6));

    let v = json(&["solve", "--topology", "ring:6", "--solver", "d-regular"]);
    assert!(floats(&v["q_star"])
        .iter()
        .all(|x| (x - 1.0 / 3.0).abs() < 1e-12));

    let v = json(&[
        "solve",
        "--topology",
        "line:3",
        "--solver",
        "grid-oracle",
        "--resolution",
        "50",
    ]);
    assert_eq!(v["solver"], "grid-oracle");
}

#[test]
fn csv_outputs_have_headers() {
    let out = run(&["solve", "--topology", "ring:4", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("node,degree,q_star\n"));
    assert_eq!(text.lines().count(), 5);

    let out = run(&["sweep", "--kind", "line", "--from", "3", "--to", "5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n,q_closed_form,aoi_closed_form,aoi_optimal,relative_gap\n"));
    assert_eq!(text.lines().count(), 4);

    let out = run(&["sweep", "--kind", "presets"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 5);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["solve", "--topology", "line:5", "--solver", "d-regular"][..],
        &["solve", "--topology", "ring:5", "--solver", "star"],
        &["solve", "--topology", "nonsense:5"],
        &["simulate", "--topology", "ring:4"],
        &["sweep", "--kind", "star", "--from", "9", "--to", "4"],
        &["solve"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn simulate_two_node_degenerate() {
    let v = json(&[
        "simulate",
        "--topology",
        "line:2",
        "--q",
        "1,0",
        "--slots",
        "20000",
    ]);
    let links = v["per_link"].as_array().unwrap();
    let one_from_zero = links.iter().find(|l| l["receiver"] == 1).unwrap();
    assert_eq!(one_from_zero["aoi_empirical"], 1.0);
    let zero_from_one = links.iter().find(|l| l["receiver"] == 0).unwrap();
    assert!(zero_from_one["aoi_empirical"].is_null());
    assert_eq!(zero_from_one["deliveries"], 0);
}

#[test]
fn edges_file_and_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("net.txt");
    let out = run(&[
        "gen",
        "--topology",
        "grid:2x3",
        "--out",
        edges.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(fs::read(&edges).unwrap(), out.stdout);

    let a = json(&["solve", "--edges", edges.to_str().unwrap()]);
    let b = json(&["solve", "--topology", "grid:2x3"]);
    assert_eq!(a, b);

    let solved = dir.path().join("solve.json");
    assert!(run(&[
        "solve",
        "--topology",
        "ring:6",
        "--out",
        solved.to_str().unwrap()
    ])
    .status
    .success());
    let v = json(&[
        "simulate",
        "--topology",
        "ring:6",
        "--q-from",
        solved.to_str().unwrap(),
        "--slots",
        "1000000",
        "--seed",
        "42",
    ]);
    for link in v["per_link"].as_array().unwrap() {
        let aoi = link["aoi_empirical"].as_f64().unwrap();
        assert!((aoi - 6.75).abs() / 6.75 < 0.02, "{aoi}");
    }
}

#[test]
fn simulate_and_compare_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for (k, args) in [
        &[
            "simulate",
            "--topology",
            "star:6",
            "--q",
            "0.2",
            "--slots",
            "50000",
            "--seed",
            "9",
        ][..],
        &[
            "compare",
            "--topology",
            "line:5",
            "--slots",
            "50000",
            "--format",
            "csv",
            "--sim-tol",
            "0.5",
        ],
    ]
    .into_iter()
    .enumerate()
    {
        let first = dir.path().join(format!("{k}a"));
        let second = dir.path().join(format!("{k}b"));
        let mut with_out = args.to_vec();
        with_out.extend(["--out", first.to_str().unwrap()]);
        let a = run(&with_out);
        with_out.pop();
        with_out.push(second.to_str().unwrap());
        let b = run(&with_out);
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
    }
}

#[test]
fn compare_exit_code_tracks_tolerance() {
    let pass = run(&["compare", "--topology", "ring:6", "--slots", "1000000"]);
    assert_eq!(pass.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&pass.stdout).unwrap();
    assert_eq!(v["pass"], true);

    // a short run cannot meet a tight tolerance
    let fail = run(&[
        "compare",
        "--topology",
        "ring:6",
        "--slots",
        "3000",
        "--warmup",
        "100",
        "--sim-tol",
        "0.001",
    ]);
    assert_eq!(fail.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&fail.stdout).unwrap();
    assert_eq!(v["pass"], false);
}

#[test]
fn compare_star_and_line_shapes() {
    let v = json(&["compare", "--topology", "star:6", "--slots", "1000000"]);
    assert_eq!(v["pass"], true);
    let links = v["simulation"]["per_link"].as_array().unwrap();
    let hub_in = links.iter().find(|l| l["receiver"] == 0).unwrap()["mu_analytic"]
        .as_f64()
        .unwrap();
    let leaf_in = links.iter().find(|l| l["receiver"] == 1).unwrap()["mu_analytic"]
        .as_f64()
        .unwrap();
    assert!((hub_in - leaf_in).abs() > 1e-3);

    let v = json(&["compare", "--topology", "line:7", "--slots", "1000000"]);
    assert_eq!(v["pass"], true);
    let aoi = |r: u64, s: u64| {
        v["solve"]["per_link"]
            .as_array()
            .unwrap()
            .iter()
            .find(|l| l["receiver"] == r && l["sender"] == s)
            .unwrap()["aoi"]
            .as_f64()
            .unwrap()
    };
    assert!(aoi(0, 1) < aoi(2, 1));
    assert!(aoi(6, 5) < aoi(4, 5));
}
