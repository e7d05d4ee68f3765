use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bazverify")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = bin(&all);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

const SUBCOMMANDS: [&str; 11] = [
    "gtn", "xseries", "bound", "fs", "inverse-fs", "log-coeff", "conv-fs", "dist", "member", "lemma", "verify",
];

#[test]
fn help_exits_zero_everywhere() {
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
    for sub in SUBCOMMANDS {
        let out = bin(&[sub, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{sub}");
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn gtn_default_table() {
    let out = bin(&["gtn", "--varkappa", "1", "--max-n", "5"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "1, 1, 2, 4, 10, 26");
    let v = json(&["gtn", "--varkappa", "7/2", "--max-n", "3"]);
    assert_eq!(v["values"][3]["exact"], "23/2");
}

#[test]
fn json_outputs_parse_and_round_trip() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["xseries", "--varkappa", "2", "--order", "4"],
        vec!["bound", "a3", "--vartheta", "1"],
        vec!["fs", "--mu", "0.5,1", "--kappa", "0.5"],
        vec!["inverse-fs", "--hbar", "1"],
        vec!["log-coeff"],
        vec!["conv-fs", "--dist", "poisson", "--dist-param", "1", "--mu", "0.5"],
        vec!["conv-fs", "--dist", "custom", "--p2", "0.5", "--p3", "0.25"],
        vec!["dist", "--kind", "borel", "--param", "0.5", "--max-n", "6"],
        vec!["lemma", "--which", "3", "--v", "0.3,0.4", "--grid", "10"],
    ];
    for args in cases {
        let v = json(&args);
        let text = serde_json::to_string(&v).unwrap();
        assert_eq!(serde_json::from_str::<Value>(&text).unwrap(), v, "{args:?}");
    }
}

#[test]
fn documented_values() {
    assert_eq!(json(&["bound", "a2", "--vartheta", "0", "--kappa", "1"])["value"], 0.5);
    let fs = json(&["fs", "--mu", "0", "--vartheta", "0", "--kappa", "0", "--varkappa", "1"]);
    assert_eq!(fs["piecewise"]["branch"], "above-sigma2");
    assert_eq!(fs["piecewise"]["value"], 1.0);
    let d = json(&["dist", "--kind", "pascal", "--param", "0.5", "--s", "1", "--max-n", "3"]);
    assert_eq!(d["coefficients"][0]["value"], 0.25);
}

#[test]
fn member_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.txt");
    // a small perturbation of the identity
    std::fs::write(&path, "# a0..a4\n0\n1\n0.1\n0.01\n0\n").unwrap();
    let v = json(&["member", "--f-coeffs", path.to_str().unwrap()]);
    assert_eq!(v["member"], true);
    assert!(v["sup_norm"].as_f64().unwrap() < 1.0);
    let out = bin(&["member", "--f-coeffs", dir.path().join("missing").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["frobnicate"],
        vec!["fs"],
        vec!["fs", "--mu", "abc"],
        vec!["bound", "a2", "--vartheta", "-1"],
        vec!["dist", "--kind", "borel", "--param", "2"],
        vec!["verify", "--grid", "1"],
    ] {
        assert_eq!(bin(&args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn verify_writes_jsonl_and_never_overwrites() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("lemmas.jsonl");
    for _ in 0..2 {
        let out = bin(&["verify", "--suite", "lemmas", "--grid", "8", "--out", target.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(files.len(), 2);
    let text = std::fs::read_to_string(&files[0]).unwrap();
    let last: Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(last["kind"], "summary");
    assert_eq!(last["sound"], true);
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "kappa = 1\nvartheta = 1\nformat = json\n").unwrap();
    let c = cfg.to_str().unwrap();
    let out = bin(&["bound", "a2", "--config", c]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["value"], 0.25);
    let out = bin(&["bound", "a2", "--config", c, "--kappa", "0"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["value"], 0.5);
}
