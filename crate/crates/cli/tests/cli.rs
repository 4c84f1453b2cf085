use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn relgauge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relgauge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_error(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let last = text.lines().last().expect("stderr is not empty");
    serde_json::from_str(last).expect("last stderr line is JSON")
}

#[test]
fn jm_exact_case() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "failures.csv", "epoch\n1\n3\n");
    let out = relgauge(&["fit", "jm", "--input", &input]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["model"], "jm");
    assert!((r["e0"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert!((r["k"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert!((r["var_e0"].as_f64().unwrap() - 8.0).abs() < 1e-6);
    assert!(
        r["residuals"]["likelihood_equation_relative"]
            .as_f64()
            .unwrap()
            <= 1e-9
    );
    assert_eq!(
        r["provenance"]["inputs_sha256"]["input"]
            .as_str()
            .unwrap()
            .len(),
        64
    );
}

#[test]
fn jm_without_growth_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "failures.csv", "epoch\n2\n3\n");
    let out = relgauge(&["fit", "jm", "--input", &input]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    assert_eq!(stderr_error(&out)["error"], "NoGrowthEvidence");
}

#[test]
fn unknown_flag_exits_1() {
    let out = relgauge(&["fit", "jm", "--input", "x.csv", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("Usage"));
    assert_eq!(stderr_error(&out)["error"], "UsageError");
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(relgauge(&["--help"]).status.code(), Some(0));
    let out = relgauge(&["--version"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "failures.csv", "epoch\n3\n2\n");
    let out = relgauge(&["fit", "jm", "--input", &input]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["error"], "NotMonotone");

    let bad = write(dir.path(), "bad.csv", "when\n1\n");
    assert_eq!(
        relgauge(&["fit", "jm", "--input", &bad]).status.code(),
        Some(2)
    );

    let missing = dir.path().join("nope.csv");
    let out = relgauge(&["fit", "jm", "--input", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["error"], "IoError");
}

#[test]
fn schumann_constructed_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "periods.csv",
        "tau,corrected,exposure,failures\n1,20,1000,10\n2,50,1600,10\n",
    );
    let out_path = dir.path().join("fit.json");
    let out = relgauge(&[
        "fit",
        "schumann",
        "--input",
        &input,
        "--instructions",
        "1000",
        "--confidence",
        "0.95",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!((r["e0"].as_f64().unwrap() - 100.0).abs() < 1e-7);
    assert!((r["c"].as_f64().unwrap() - 0.125).abs() < 1e-10);
    assert!((r["var_c"].as_f64().unwrap() - 0.015451).abs() < 1e-5);
    assert!((r["rho"].as_f64().unwrap() - 0.97439).abs() < 1e-4);
    assert_eq!(r["k"], 2);
    assert_eq!(r["ci"]["e0"].as_array().unwrap().len(), 2);
}

#[test]
fn weibull_fit_reports_form_and_warning() {
    let dir = tempfile::tempdir().unwrap();
    // intervals 1, 1.1, 0.9, 1.05: nearly constant, so m well above 1
    let input = write(dir.path(), "failures.csv", "epoch\n1\n2.1\n3\n4.05\n");
    let out = relgauge(&["fit", "weibull", "--input", &input, "--moment-form", "cv"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["moment_form"], "cv");
    assert!(r["m"].as_f64().unwrap() > 1.0);
    assert!(r["warning"].is_string());
    assert!(
        r["residuals"]["moment_equation_log"]
            .as_f64()
            .unwrap()
            .abs()
            < 1e-9
    );
}

#[test]
fn nelson_fit_with_simplified_block() {
    let dir = tempfile::tempdir().unwrap();
    let profile = write(
        dir.path(),
        "profile.csv",
        "run,p,y\n1,0.9,0\n1,0.1,1\n2,0.8,0\n2,0.2,1\n",
    );
    let runs = write(
        dir.path(),
        "runs.csv",
        "duration,outcome\n2,success\n3,FAILURE\n",
    );
    let weights = write(dir.path(), "w.csv", "weight\n1.5\n0.5\n");
    let out = relgauge(&[
        "fit",
        "nelson",
        "--profile",
        &profile,
        "--simplified",
        &runs,
        "--weights",
        &weights,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!((r["reliability"].as_f64().unwrap() - 0.72).abs() < 1e-12);
    assert_eq!(r["runs"].as_array().unwrap().len(), 2);
    assert!((r["simplified"]["reliability"].as_f64().unwrap() - 0.75).abs() < 1e-12);
    assert_eq!(r["simplified"]["run_summary"]["exposure"], 5.0);
}

#[test]
fn economics_and_faulttol() {
    let out = relgauge(&[
        "economics",
        "--eps0",
        "100",
        "--tau0",
        "10",
        "--size",
        "10000",
        "--tempo",
        "1000",
        "--cost-error",
        "7.389056",
        "--cost-test",
        "1",
        "--horizon",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!((r["tau_m"].as_f64().unwrap() - 20.0).abs() < 1e-6);
    assert_eq!(r["boundary"], false);

    let out = relgauge(&[
        "faulttol",
        "--total-time",
        "1000",
        "--overhead",
        "1",
        "--failure-rate",
        "0.001",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!((r["t_star"].as_f64().unwrap() - 22.11).abs() < 0.01);
    assert!(r.get("simulation").is_none());

    // simulating requires a seed
    let out = relgauge(&[
        "faulttol",
        "--total-time",
        "1000",
        "--overhead",
        "1",
        "--failure-rate",
        "0.001",
        "--simulate",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_requires_seed_and_round_trips() {
    assert_eq!(
        relgauge(&["simulate", "jm", "--e0", "50", "--k", "0.004", "--count", "40"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(relgauge(&["simulate", "nelson"]).status.code(), Some(1));

    let out = relgauge(&[
        "simulate", "jm", "--e0", "50", "--k", "0.004", "--count", "40", "--seed", "9",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["provenance"]["seed"], 9);
    let epochs = r["epochs"].as_array().unwrap();
    assert_eq!(epochs.len(), 40);

    // feed the simulated epochs back through the fitter
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("epoch\n");
    for e in epochs {
        csv.push_str(&format!("{}\n", e.as_f64().unwrap()));
    }
    let input = write(dir.path(), "failures.csv", &csv);
    let code = relgauge(&["fit", "jm", "--input", &input]).status.code();
    assert!(matches!(code, Some(0) | Some(3)));
}

#[test]
fn predict_verbs() {
    let r = report(&relgauge(&[
        "predict", "weibull", "--m", "1", "--lambda", "0.5", "--time", "2",
    ]));
    assert!((r["reliability"].as_f64().unwrap() - (-1.0f64).exp()).abs() < 1e-15);
    let r = report(&relgauge(&["predict", "nelson", "--q", "0.1,0.2"]));
    assert!((r["reliability"].as_f64().unwrap() - 0.72).abs() < 1e-15);
    let r = report(&relgauge(&[
        "predict", "jm", "--e0", "10", "--k", "0.1", "--index", "3", "--time", "1",
    ]));
    assert!((r["intensity"].as_f64().unwrap() - 0.8).abs() < 1e-15);
    let r = report(&relgauge(&[
        "predict",
        "schumann",
        "--e0",
        "100",
        "--c",
        "0.125",
        "--instructions",
        "1000",
        "--corrected",
        "20",
        "--time",
        "1",
    ]));
    assert!((r["mttf"].as_f64().unwrap() - 100.0).abs() < 1e-9);
}
