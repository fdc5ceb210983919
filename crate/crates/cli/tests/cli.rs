use std::f64::consts::TAU;
use std::path::PathBuf;
use std::process::Command as Process;

use unitri_cli::{main_with, Command, CliError, RunConfig};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Runs the front end in process: `(exit code, stdout, stderr)`.
fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("unitri").chain(args.iter().copied()).map(String::from);
    let code = main_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn rows(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(csv.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let body = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, body)
}

#[test]
fn tv_curve_for_the_cycle() {
    let (code, out, _) = run(&["tv-curve", "--n", "2", "--p", "5", "--walk", "K", "--t-max", "20"]);
    assert_eq!(code, 0);
    let (header, body) = rows(&out);
    assert_eq!(header, ["t", "tv", "l2sq"]);
    assert_eq!(body.len(), 21);
    let tv0: f64 = body[0][1].parse().unwrap();
    assert!((tv0 - 0.8).abs() < 1e-12);
}

#[test]
fn exact_tv_curve_rounds_once() {
    let (code, out, _) = run(&["tv-curve", "--config", fixture("tv_curve_k5.conf").to_str().unwrap()]);
    assert_eq!(code, 0);
    let (_, body) = rows(&out);
    assert_eq!(body[0][1], format!("{:.16e}", 1.0 - 1.0 / 5.0));
    assert_eq!(body[1][1], format!("{:.16e}", 0.2));
}

#[test]
fn superclasses_for_n3_p3() {
    let (code, out, err) = run(&["superclasses", "--n", "3", "--p", "3"]);
    assert_eq!(code, 0);
    let (header, body) = rows(&out);
    assert_eq!(header, ["label", "d", "i", "size_exponent", "weight"]);
    assert_eq!(body.len(), 11);
    let total: u64 = body.iter().map(|r| r[4].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 27);
    assert!(err.contains("labels=11 degree_sum=27"));
}

#[test]
fn bound_curve_matches_the_cycle_sum() {
    let (code, out, _) = run(&["bound-curve", "--n", "2", "--p", "5", "--t-max", "30"]);
    assert_eq!(code, 0);
    let (header, body) = rows(&out);
    assert_eq!(header, ["t", "rhs", "q_tv4", "main_rhs", "p_tv4"]);
    for row in body {
        let t: i32 = row[0].parse().unwrap();
        let rhs: f64 = row[1].parse().unwrap();
        // a = 3 at p = 5
        let want: f64 = (1..5)
            .map(|x| {
                let x = x as f64;
                (0.5 * ((TAU * x / 5.0).cos() + (TAU * 3.0 * x / 5.0).cos())).powi(2 * t)
            })
            .sum();
        assert!((rhs - want).abs() < 1e-12, "t={t}");
    }
}

#[test]
fn json_mirrors_csv() {
    let (_, csv_out, _) = run(&["compare", "--n", "3", "--p", "3"]);
    let (_, json_out, _) = run(&["compare", "--n", "3", "--p", "3", "--format", "json"]);
    let (header, body) = rows(&csv_out);
    let records: Vec<serde_json::Map<String, serde_json::Value>> = serde_json::from_str(&json_out).unwrap();
    assert_eq!(records.len(), body.len());
    for (rec, row) in records.iter().zip(&body) {
        assert_eq!(rec.keys().cloned().collect::<Vec<_>>(), header);
        assert_eq!(rec["generator"], row[0].as_str());
        for (k, name) in header.iter().enumerate().skip(1) {
            let a = rec[name].as_f64().unwrap();
            let b: f64 = row[k].parse().unwrap();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn spectrum_has_closed_form_column_for_product_walk() {
    let (code, out, _) = run(&["spectrum", "--walk", "productQ", "--n", "2", "--p", "5"]);
    assert_eq!(code, 0);
    let (_, body) = rows(&out);
    assert_eq!(body.len(), 25);
    for row in body {
        let (a, b): (f64, f64) = (row[1].parse().unwrap(), row[2].parse().unwrap());
        assert!((a - b).abs() < 1e-9);
    }
    let (_, out, _) = run(&["spectrum", "--walk", "P", "--n", "3", "--p", "3"]);
    assert!(rows(&out).1.iter().all(|r| r[2].is_empty()));
}

#[test]
fn words_are_verified() {
    let (code, out, err) = run(&["words", "--n", "4", "--p", "5"]);
    assert_eq!(code, 0, "{err}");
    let (_, body) = rows(&out);
    // 3 rows, 4 coefficients, 25 elements each
    assert_eq!(body.len(), 300);
    assert!(body.iter().all(|r| r[3].parse::<usize>().unwrap() % 2 == 1));
}

#[test]
fn verify_fixtures_pass() {
    for name in ["verify_n2_p5.conf", "verify_n3_p3.conf"] {
        let (code, out, err) = run(&["verify", "--config", fixture(name).to_str().unwrap()]);
        assert_eq!(code, 0, "{name}: {err}");
        let (header, body) = rows(&out);
        assert_eq!(header, ["check", "status", "detail"]);
        assert!(body.iter().all(|r| r[1] == "pass"), "{name}: {out}");
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::new(Command::TvCurve);
    cfg.n = 2;
    cfg.p = 7;
    cfg.t_max = 3;
    let path = dir.path().join("run.conf");
    std::fs::write(&path, cfg.to_text()).unwrap();
    let (_, out, _) = run(&["tv-curve", "--config", path.to_str().unwrap()]);
    assert_eq!(rows(&out).1.len(), 4);
    let (_, out, _) = run(&["tv-curve", "--config", path.to_str().unwrap(), "--t-max", "5"]);
    assert_eq!(rows(&out).1.len(), 6);
    let (_, out, _) = run(&["tv-curve", "--config", path.to_str().unwrap(), "--t", "2"]);
    assert_eq!(rows(&out).1[0][0], "2");
}

#[test]
fn out_flag_writes_file_and_output_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let base = ["tv-curve", "--n", "3", "--p", "5", "--walk", "Q", "--t-max", "15"];
    let with = |path: &PathBuf, jobs: &str| {
        let mut args = base.to_vec();
        args.extend(["--out", path.to_str().unwrap(), "--jobs", jobs]);
        let (code, out, _) = run(&args);
        assert_eq!(code, 0);
        assert!(out.is_empty());
    };
    with(&a, "1");
    with(&b, "4");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["tv-curve", "--p", "4"]).0, 1);
    assert_eq!(run(&["tv-curve", "--walk", "Z"]).0, 1);
    assert_eq!(run(&["nonsense"]).0, 1);
    assert_eq!(run(&["tv-curve", "--config", "/nonexistent/run.conf"]).0, 1);
    assert_eq!(run(&["tv-curve", "--n", "7", "--p", "7"]).0, 2);
    assert_eq!(CliError::Invariant(vec!["x".into()]).exit_code(), 3);
}

#[test]
fn budget_variable_is_honoured() {
    let bin = env!("CARGO_BIN_EXE_unitri");
    let status = Process::new(bin)
        .args(["tv-curve", "--n", "3", "--p", "5", "--t-max", "1"])
        .env("UNITRI_BUDGET_STATES", "100")
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    let status = Process::new(bin)
        .args(["tv-curve", "--n", "3", "--p", "5", "--t-max", "1"])
        .env("UNITRI_BUDGET_STATES", "125")
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    assert!(String::from_utf8(status.stdout).unwrap().starts_with("t,tv,l2sq\n"));
}
