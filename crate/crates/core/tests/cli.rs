use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fneighbors(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fneighbors"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn identity_circle_is_its_own_witness() {
    let dir = tempfile::tempdir().unwrap();
    let out = fneighbors(
        dir.path(),
        &[
            "neighbors",
            "--samples",
            "256",
            "--out",
            "r.json",
            "--svg",
            "r.svg",
            "--csv",
            "r.csv",
            "--dump-certs",
            "c.json",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("D_f = 2.000000"));

    let r = json(&dir.path().join("r.json"));
    assert_eq!(r["passed"], true);
    assert!((r["result"]["d_f"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    // one certificate: all samples on the unit circle
    let w = &r["result"]["extremal"]["certificate"]["witness"]["sphere"];
    assert!((w["radius"].as_f64().unwrap() - 1.0).abs() < 1e-9);

    let certs = json(&dir.path().join("c.json"));
    assert_eq!(
        certs.as_array().unwrap().len(),
        r["result"]["certificates"].as_u64().unwrap() as usize
    );
    let svg = std::fs::read_to_string(dir.path().join("r.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    let csv = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("i,j,distance"));
    assert_eq!(csv.lines().count(), 1 + 256 * 255 / 2);
}

#[test]
fn report_goes_to_stdout_without_out() {
    let dir = tempfile::tempdir().unwrap();
    let out = fneighbors(dir.path(), &["neighbors", "--samples", "64", "--m-out", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["config"]["command"], "neighbors");
    assert!(String::from_utf8_lossy(&out.stderr).contains("D_f"));
}

#[test]
fn constant_map_has_one_coincidence_group() {
    let dir = tempfile::tempdir().unwrap();
    let map = r#"{"family":"constant","m_out":2,"params":[0.5,-1.0]}"#;
    let out = fneighbors(dir.path(), &["neighbors", "--samples", "128", "--map", map]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["result"]["d_f"].as_f64().unwrap(), 2.0);
    assert_eq!(r["result"]["coincidence_certificates"], 1);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["frobnicate"][..],
        &["neighbors", "--family", "circle_fourier"],
        &["verify-thm2", "--n", "1", "--m-out", "1", "--seed", "1"],
        &["verify-thm2", "--domain", "cube", "--seed", "1"],
        &["neighbors", "--map", "{not json"],
        &["neighbors", "--family", "no_such_family", "--seed", "1"],
        &["witness", "--cover", "three-arc", "--n", "2"],
        &["neighbors", "--config", "missing.json"],
    ] {
        let out = fneighbors(dir.path(), args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"domain": "sphere", "n": 1, "m_out": 2, "samples": 300, "seed": 4, "family": "circle_fourier", "degree": 2}"#,
    )
    .unwrap();
    let out = fneighbors(
        dir.path(),
        &[
            "neighbors",
            "--config",
            "cfg.json",
            "--samples",
            "200",
            "--out",
            "r.json",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&dir.path().join("r.json"));
    assert_eq!(r["config"]["domain"]["samples"], 200);
    assert_eq!(r["config"]["domain"]["seed"], 4);
    assert_eq!(r["config"]["degree"], 2);
    assert_eq!(r["config"]["family"], "circle_fourier");

    std::fs::write(dir.path().join("bad.json"), r#"{"sampels": 10}"#).unwrap();
    let out = fneighbors(dir.path(), &["neighbors", "--config", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_do_not_depend_on_threads_or_paths() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["verify-cube", "--samples", "512", "--trials", "2", "--seed", "3"];
    let a = fneighbors(
        dir.path(),
        &[&args[..], &["--threads", "1", "--out", "a.json"]].concat(),
    );
    let b = fneighbors(
        dir.path(),
        &[&args[..], &["--threads", "4", "--out", "sub-b.json"]].concat(),
    );
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(
        std::fs::read(dir.path().join("a.json")).unwrap(),
        std::fs::read(dir.path().join("sub-b.json")).unwrap()
    );
}

#[test]
fn degree_and_witness_on_arc_covers() {
    let dir = tempfile::tempdir().unwrap();
    let out = fneighbors(dir.path(), &["degree", "--cover", "three-arc", "--samples", "512"]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["result"]["class"], "non_null_homotopic");

    let out = fneighbors(dir.path(), &["degree", "--cover", "degenerate", "--samples", "512"]);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["result"]["class"], "null_homotopic");

    let out = fneighbors(
        dir.path(),
        &[
            "witness",
            "--cover",
            "three-arc",
            "--samples",
            "512",
            "--family",
            "circle_fourier",
            "--seed",
            "8",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn mu_writes_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = fneighbors(
        dir.path(),
        &[
            "mu",
            "--samples",
            "256",
            "--budget",
            "40",
            "--restarts",
            "2",
            "--seed",
            "1",
            "--csv",
            "t.csv",
            "--out",
            "r.json",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("evaluation,d_f"));
    let r = json(&dir.path().join("r.json"));
    assert!((r["result"]["lower_bound"].as_f64().unwrap() - 3f64.sqrt()).abs() < 1e-12);
    // running minima never increase
    let trace: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(trace.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn missing_witness_is_a_violation() {
    // the degenerate cover is null-homotopic, so nothing forces a witness
    let dir = tempfile::tempdir().unwrap();
    let out = fneighbors(
        dir.path(),
        &[
            "witness",
            "--cover",
            "degenerate",
            "--samples",
            "256",
            "--family",
            "circle_fourier",
            "--seed",
            "2",
            "--eps-witness",
            "1e-12",
            "--out",
            "r.json",
        ],
    );
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&dir.path().join("r.json"));
    assert_eq!(r["passed"], false);
    assert!(r["config"]["map"].is_null());
}
