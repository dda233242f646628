use serde_json::Value;
use std::fs;
use std::process::{Command, Output};

fn siegel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_siegel")).args(args).output().expect("spawn siegel")
}

fn ok(args: &[&str]) -> String {
    let out = siegel(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

#[test]
fn chars_and_coeffs() {
    let count = ok(&["chars", "count", "--D", "4", "--Q", "10"]);
    let line = count.lines().nth(1).unwrap();
    let n: u64 = line.split(',').next().unwrap().parse().unwrap();
    assert!(n > 0);
    let list = ok(&["chars", "list", "--D", "4", "--Q", "10"]);
    assert_eq!(list.lines().count() as u64, n + 1);

    let nu = ok(&["coeffs", "dump", "--kind", "nu", "--N", "12"]);
    assert_eq!(nu.lines().count(), 13);
    assert!(nu.lines().nth(1).unwrap().starts_with("1,1"));
    let check = ok(&["coeffs", "check", "--N", "5000"]);
    assert_eq!(check.matches("PASS").count(), 2, "{check}");
}

#[test]
fn lfunc_values() {
    let v = json(&["lfunc", "eval", "--q", "5", "--index", "1", "--s", "0.5+14.1i"]);
    assert_eq!(v["q"], 5);
    let re = v["value"][0].as_f64().unwrap();
    assert!(re.is_finite());
    let fe = json(&["lfunc", "fe-residual", "--trials", "4"]);
    assert!(fe["max_fe_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn zeros_and_sieve() {
    let scan = ok(&["zeros", "scan", "--q", "7", "--window", "0:10"]);
    assert_eq!(scan.lines().next().unwrap(), "gamma,source,simple,gap");
    let gammas: Vec<f64> = scan.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(!gammas.is_empty());
    assert!(gammas.windows(2).all(|w| w[0] <= w[1]));
    assert!(gammas.iter().all(|g| (0.0..=10.0).contains(g)));

    let gaps = json(&["zeros", "gaps", "--q", "7", "--window", "0:20"]);
    assert!(gaps["normalized"].as_array().unwrap().len() >= 2);

    let sv = json(&["sieve", "check", "--Q", "10", "--trials", "3"]);
    assert_eq!(sv["n"], 100);
    assert!(sv["max_random"].as_f64().unwrap() < 1.0);
}

#[test]
fn functionals() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("f.json");
    fs::write(&spec, r#"{"type":"polynomial","coeffs":[[1.0,0.0],[0.0,0.5]]}"#).unwrap();
    let phi = json(&["func", "phi", "--f", spec.to_str().unwrap(), "--q", "7", "--window", "0:10"]);
    assert!(phi["phi"]["decomposition_residual"].as_f64().unwrap() < 1e-10);

    let up = json(&["moll", "upsilon", "--q", "7", "--window", "0:10"]);
    assert!(up["upsilon"]["total"].as_f64().unwrap() >= 0.0);
    let diag = json(&["moll", "diag", "--q", "7", "--window", "0:10", "--grid", "8"]);
    assert_eq!(diag["grid"]["n_re"], 8);

    let report = dir.path().join("approx.json");
    ok(&["approx", "run", "--q", "7", "--window", "0:10", "--R", "10", "--report", report.to_str().unwrap()]);
    let saved: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(!saved["coefficients"].as_array().unwrap().is_empty());

    let bvp = json(&["bvp", "check", "--R", "10", "--polys", "3"]);
    assert_eq!(bvp["r"], 10.0);
}

#[test]
fn pipeline_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "d = 4\nq = 5\nwindow = [0.0, 10.0]\nmax_characters = 3\n").unwrap();
    let out = dir.path().join("run");
    let o = siegel(&["pipeline", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap(), "--workers", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("manifest.json").exists());
    let summary = ok(&["report", out.to_str().unwrap()]);
    assert!(!summary.is_empty());

    fs::write(out.join("zeros.csv"), "tampered\n").unwrap();
    let r = siegel(&["report", out.to_str().unwrap()]);
    let text = String::from_utf8_lossy(&r.stdout).to_string() + &String::from_utf8_lossy(&r.stderr);
    assert!(text.contains("zeros.csv"), "{text}");
}

#[test]
fn bad_input_fails_cleanly() {
    for args in [
        &["lfunc", "eval", "--q", "6", "--index", "1", "--s", "2"][..],
        &["coeffs", "dump", "--kind", "bogus"],
        &["zeros", "scan", "--q", "7", "--window", "10:0"],
        &["report", "/nonexistent/run"],
    ] {
        let o = siegel(args);
        assert!(!o.status.success(), "{args:?} should fail");
        assert!(!o.stderr.is_empty());
    }
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "d = 4\nq = 5\nmystery = 1\n").unwrap();
    assert!(!siegel(&["pipeline", "--config", cfg.to_str().unwrap()]).status.success());
}
