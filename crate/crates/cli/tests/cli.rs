use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn maxmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxmod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn canonical(v: &Value) -> String {
    maxmod::report::canonical_json(v)
}

#[test]
fn classify_figure_cubic() {
    let out = maxmod(&["classify", "--poly", "1,0,1,1i"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["exceptional"], true);
    assert_eq!(v["magic"], "MAGIC");
    assert_eq!(v["conjecture_count"], 2);
}

#[test]
fn classify_two_term() {
    let v = stdout_json(&maxmod(&["--poly", "1,0,1", "classify"]));
    assert_eq!(v["mu"], 2);
    assert_eq!(v["predicted_count"], 2);
}

#[test]
fn classify_output_round_trips() {
    for spec in [
        "1,0,1,1i",
        "1,0,1,0.001+1i",
        "1,0,0,0,1,0,1",
        "2-i,0.5,1e-3,-3i",
    ] {
        let out = maxmod(&["classify", "--poly", spec]);
        let text = String::from_utf8(out.stdout).unwrap();
        let again: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(canonical(&again), text, "{spec}");
    }
}

#[test]
fn poly_file_matches_inline() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    fs::write(&path, r#"{"coeffs": [[1, 0], [0, 0], [1, 0], [0, 1]]}"#).unwrap();
    let a = maxmod(&["classify", "--poly-file", path.to_str().unwrap()]);
    let b = maxmod(&["classify", "--poly", "1,0,1,1i"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    let zero = maxmod(&["classify", "--poly", "0"]);
    assert_eq!(zero.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&zero.stderr).contains("ZeroPolynomial"));

    let bad = maxmod(&["classify", "--poly", "1,2x,3"]);
    assert_eq!(bad.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&bad.stderr);
    assert!(
        msg.contains("\"2x\"") && msg.contains("position 2"),
        "{msg}"
    );

    assert_eq!(
        maxmod(&["classify", "--poly", "0,0,5i"]).status.code(),
        Some(3)
    );

    let floor = maxmod(&["trace", "--poly", "1,0,0,0,1,0,1", "--rmin", "1e-3"]);
    assert_eq!(floor.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&floor.stderr).contains("r_min >= 5.62"));

    let io = maxmod(&[
        "trace",
        "--poly",
        "1,0,1",
        "--radii",
        "5",
        "--csv",
        "/nonexistent/dir/out.csv",
    ]);
    assert_eq!(io.status.code(), Some(6));
    let missing = maxmod(&["classify", "--poly-file", "/nonexistent/p.json"]);
    assert_eq!(missing.status.code(), Some(6));
}

#[test]
fn trace_figure_examples() {
    let a = maxmod(&[
        "trace", "--poly", "1,0,1,1i", "--rmin", "1e-3", "--rmax", "0.3",
    ]);
    assert_eq!(a.status.code(), Some(0));
    let v = stdout_json(&a);
    assert_eq!(v["trace"]["n_components"], 2);
    assert_eq!(v["agreement"], "CONFIRMED");

    let b = maxmod(&[
        "trace",
        "--poly",
        "1,0,1,0.001+1i",
        "--rmin",
        "1e-3",
        "--rmax",
        "0.05",
    ]);
    let v = stdout_json(&b);
    assert_eq!(v["trace"]["n_components"], 1);
    assert_eq!(v["agreement"], "CONFIRMED");
}

#[test]
fn trace_rotation_example() {
    let out = maxmod(&[
        "trace",
        "--poly",
        "1,0,0,0,1,0,1",
        "--rmin",
        "1e-2",
        "--rmax",
        "0.3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["trace"]["n_components"], 2);
    let mut rays: Vec<u64> = v["trace"]["curves"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["matched_j"].as_u64().unwrap())
        .collect();
    rays.sort_unstable();
    assert_eq!(rays, vec![0, 2]);
    for pair in v["trace"]["symmetry"].as_array().unwrap() {
        assert!(pair["max_deviation"].as_f64().unwrap() < 1e-9);
    }
}

#[test]
fn infinity_mode() {
    let out = maxmod(&["trace", "--poly", "i,1,0,1", "--infinity"]);
    let v = stdout_json(&out);
    assert_eq!(v["trace"]["at_infinity"], true);
    assert_eq!(v["trace"]["n_components"], 2);
    assert_eq!(v["classification"]["magic"], "MAGIC");
}

#[test]
fn csv_and_svg_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let svg = dir.path().join("s.svg");
    let out = maxmod(&[
        "trace",
        "--poly",
        "1,0,1,1i",
        "--radii",
        "50",
        "--csv",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    let n = v["trace"]["n_components"].as_u64().unwrap() as usize;
    assert!(v["trace"]["events"].as_array().unwrap().is_empty());

    let text = fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "r,theta,re,im,mod,curve_id");
    assert_eq!(rows.len() - 1, n * 50);
    let parsed: Vec<(f64, usize)> = rows[1..]
        .iter()
        .map(|row| {
            let f: Vec<&str> = row.split(',').collect();
            assert_eq!(f.len(), 6);
            // 17 significant digits
            assert_eq!(f[0].split('e').next().unwrap().len(), 18);
            (f[0].parse().unwrap(), f[5].parse().unwrap())
        })
        .collect();
    assert!(parsed
        .windows(2)
        .all(|w| w[0].1 < w[1].1 || (w[0].1 == w[1].1 && w[0].0 > w[1].0)));

    let plot = fs::read_to_string(&svg).unwrap();
    assert_eq!(plot.matches("<path").count(), n);
    assert!(plot.contains(r#"viewBox="0 0 1000 1000""#));
}

#[test]
fn hunt_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_maxmod"))
            .env("MAXMOD_THREADS", threads)
            .args([
                "hunt",
                "--family",
                "quartic",
                "--samples",
                "6",
                "--seed",
                "42",
                "--quiet",
                "--out",
            ])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        fs::read(&path).unwrap()
    };
    let a = run("a.jsonl", "1");
    let b = run("b.jsonl", "3");
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 6);
    for line in text.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        for key in [
            "coeffs",
            "exceptional",
            "magic",
            "mu",
            "n_components",
            "conjecture_holds",
            "on_locus",
        ] {
            assert!(v.get(key).is_some(), "{key} missing in {line}");
        }
    }
}

#[test]
fn hunt_appends_and_writes_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.jsonl");
    for _ in 0..2 {
        let out = maxmod(&[
            "hunt",
            "--samples",
            "2",
            "--seed",
            "1",
            "--quiet",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 4);
    let out = maxmod(&["hunt", "--samples", "2", "--seed", "1", "--quiet"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 2);
}

#[test]
fn hunt_off_locus_cubic_has_one_component() {
    let out = maxmod(&[
        "hunt",
        "--family",
        "cubic",
        "--samples",
        "4",
        "--locus-fraction",
        "0",
        "--quiet",
    ]);
    for line in String::from_utf8(out.stdout).unwrap().lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["exceptional"], false);
        assert_eq!(v["n_components"], 1);
        assert_eq!(v["conjecture_holds"], true);
    }
}

#[test]
fn unknown_family_is_rejected() {
    let out = maxmod(&["hunt", "--family", "quintic"]);
    assert_eq!(out.status.code(), Some(2));
}
