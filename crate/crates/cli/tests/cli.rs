use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vgcdf"))
        .args(args)
        .env_remove("VG_SERIES_MAX_TERMS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn cdf_values() {
    let o = run(&["cdf", "--nu", "0.5", "--alpha", "1", "--beta", "0.5", "--x", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0.25\n");

    let o = run(&["cdf", "--nu", "0.5", "--alpha", "1", "--beta", "0", "--x", "0"]);
    assert_eq!(stdout(&o), "0.5\n");

    let o = run(&["cdf", "--nu", "0.5", "--alpha", "1", "--beta", "0", "--x", "1"]);
    assert_eq!(stdout(&o), "0.8160602794\n");

    let o = run(&["cdf", "--nu", "0.5", "--alpha", "1", "--beta", "0", "--mu", "-1", "--x", "-2"]);
    assert_eq!(stdout(&o), "0.1839397206\n");
}

#[test]
fn formulas_agree() {
    let base = ["cdf", "--nu", "1.5", "--alpha", "2", "--beta", "0", "--x", "0.7"];
    let outputs: Vec<String> = ["auto", "eq1eq2", "eq3", "symmetric"]
        .iter()
        .map(|f| {
            let mut args = base.to_vec();
            args.extend(["--formula", f]);
            let o = run(&args);
            assert_eq!(o.status.code(), Some(0), "{f}");
            stdout(&o)
        })
        .collect();
    assert!(outputs.windows(2).all(|w| w[0] == w[1]), "{outputs:?}");

    let o = run(&["cdf", "--nu", "1.5", "--alpha", "2", "--beta", "0.5", "--x", "0.7", "--formula", "symmetric"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_record() {
    let o = run(&["cdf", "--nu", "2", "--alpha", "1", "--beta", "-0.3", "--x", "1.5", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1);
    let v: Value = serde_json::from_str(text.trim()).unwrap();
    let value = v["value"].as_f64().unwrap();
    assert!(value > 0.5 && value < 1.0);
    assert!(v["abs_err_est"].as_f64().unwrap() >= 0.0);
    assert!(v["terms_used"].as_u64().unwrap() > 0);
    assert_eq!(v["method"], "right_tail_series");
}

#[test]
fn bad_parameters_exit_two() {
    let o = run(&["cdf", "--nu", "0.5", "--alpha", "1", "--beta", "1.5", "--x", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("require 0 <= |beta| < alpha"), "{err}");

    let o = run(&["cdf", "--nu", "-0.5", "--alpha", "1", "--beta", "0", "--x", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nu > -1/2"));

    let o = run(&["cdf", "--nu", "1", "--alpha", "1", "--beta", "0", "--x", "0", "--tol", "-1"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["quantile", "--nu", "1", "--alpha", "1", "--beta", "0", "--q", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn convergence_failure_exits_three() {
    let o = Command::new(env!("CARGO_BIN_EXE_vgcdf"))
        .args(["cdf", "--nu", "2", "--alpha", "1", "--beta", "0.9", "--x", "1"])
        .env("VG_SERIES_MAX_TERMS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("did not converge"));

    let o = Command::new(env!("CARGO_BIN_EXE_vgcdf"))
        .args(["cdf", "--nu", "2", "--alpha", "1", "--beta", "0.9", "--x", "1"])
        .env("VG_SERIES_MAX_TERMS", "5000")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn table1_layouts() {
    let o = run(&["table1", "--csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[0], "beta,nu_-0.25,nu_0,nu_0.5,nu_1,nu_2,nu_3,nu_5");
    assert_eq!(lines[1], "0.05,0.4905,0.4841,0.4750,0.4682,0.4576,0.4492,0.4356");
    assert_eq!(lines[2].split(',').nth(4), Some("0.4364"));
    assert_eq!(lines[5].split(',').nth(7), Some("0.0016"));

    let o = run(&["table1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 6);
}

#[test]
fn product_normal() {
    let o = run(&["prodnormal", "--rho", "0.5", "--n", "1", "--prob-nonpositive"]);
    assert_eq!(stdout(&o), "0.3333333333\n");
    let o = run(&["prodnormal", "--rho", "0", "--n", "3", "--prob-nonpositive"]);
    assert_eq!(stdout(&o), "0.5\n");
    let o = run(&["prodnormal", "--rho", "0.5", "--n", "2", "--x", "0"]);
    assert_eq!(stdout(&o), "0.25\n");
    let o = run(&["prodnormal", "--rho", "-0.5", "--sigma-u", "2", "--sigma-v", "0.5", "--n", "2", "--x", "0", "--json"]);
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.75).abs() < 1e-14);

    for args in [
        &["prodnormal", "--rho", "1", "--x", "0"][..],
        &["prodnormal", "--rho", "0.2", "--n", "0", "--x", "0"],
        &["prodnormal", "--rho", "0.2", "--x", "0", "--prob-nonpositive"],
        &["prodnormal", "--rho", "0.2"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn quantile_and_pdf() {
    let o = run(&["quantile", "--nu", "0.5", "--alpha", "1", "--beta", "0", "--q", "0.5"]);
    assert_eq!(stdout(&o), "0\n");
    let o = run(&["quantile", "--nu", "0.5", "--alpha", "1", "--beta", "0", "--q", "0.8160602794142788"]);
    assert_eq!(stdout(&o), "1\n");
    let o = run(&["pdf", "--nu", "0.5", "--alpha", "1", "--beta", "0", "--x", "1"]);
    assert_eq!(stdout(&o), "0.1839397206\n");
}

#[test]
fn selfcheck_passes() {
    let o = run(&["selfcheck"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS")));

    let o = run(&["selfcheck", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let records: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(records.len() >= 5);
    for r in &records {
        assert!(r["family"].is_string());
        assert!(r["max_abs_dev"].as_f64().unwrap() <= r["threshold"].as_f64().unwrap());
        assert_eq!(r["pass"], true);
    }
}

#[test]
fn selfcheck_catches_injected_fault() {
    let o = run(&["selfcheck", "--inject-fault", "negate-s2", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let records: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let failed: Vec<&str> = records
        .iter()
        .filter(|r| r["pass"] == false)
        .map(|r| r["family"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"eq1eq2_vs_eq3"), "{failed:?}");
    assert!(!stdout(&run(&["selfcheck", "--help"])).contains("inject"));
}

#[test]
fn output_is_deterministic() {
    let args = ["cdf", "--nu", "3", "--alpha", "0.5", "--beta", "0.2", "--x", "4.2", "--json"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    assert_eq!(run(&["table1", "--csv"]).stdout, run(&["table1", "--csv"]).stdout);
}
