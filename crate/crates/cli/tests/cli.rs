use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn mcslab(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mcslab"));
    cmd.args(args).env_remove("MCSLAB_THREADS");
    cmd
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().unwrap()
}

fn run_with_stdin(cmd: &mut Command, input: &str) -> Output {
    let mut child = cmd
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn footnote_reproduction_is_a_violation() {
    let out = run(&mut mcslab(&["reproduce", "footnote-counterexample"]));
    assert_eq!(code(&out), 2);
    let rows: Vec<Vec<f64>> = stdout(&out)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], 1.86);
    assert_eq!(rows[1][0], 2.49);
    assert!((rows[0][1] - 0.944).abs() < 0.002);
    assert!((rows[1][1] - 0.941).abs() < 0.002);

    let out = run(&mut mcslab(&[
        "reproduce",
        "footnote-counterexample",
        "--expect-violation",
    ]));
    assert_eq!(code(&out), 0);
}

#[test]
fn expect_violation_fails_when_everything_holds() {
    let out = run(&mut mcslab(&[
        "--expect-violation",
        "verify-mcs",
        "--preset",
        "quadratic-dara",
    ]));
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("expected a failing"));
}

#[test]
fn check_chew_preset_holds() {
    let out = run(&mut mcslab(&[
        "check",
        "--prop",
        "P1",
        "--preset",
        "chew-rdu-portfolio",
    ]));
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"], "holds-on-grid");
    assert_eq!(v["conclusion"], "U1 SC1 in theta");
}

#[test]
fn check_footnote_fails_with_witness() {
    let out = run(&mut mcslab(&[
        "check",
        "--preset",
        "footnote-counterexample",
    ]));
    assert_eq!(code(&out), 2);
    let report: mcslab::ConditionReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!report.holds());
    assert!(report.failing_leaves().iter().all(|l| l.witness.is_some()));
}

#[test]
fn malformed_json_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"preset\": ").unwrap();
    let out = run(&mut mcslab(&["check", "--config", path.to_str().unwrap()]));
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("schema error"));

    let out = run_with_stdin(
        &mut mcslab(&["verify-mcs", "--config", "-"]),
        r#"{"preset": "quadratic-dara", "grid": [1, 2]}"#,
    );
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("unknown field"));
}

#[test]
fn domain_errors_exit_one() {
    assert_eq!(code(&run(&mut mcslab(&["reproduce", "no-such-preset"]))), 1);
    let out = run(&mut mcslab(&[
        "check",
        "--preset",
        "kimball-precautionary",
        "--prop",
        "P1",
    ]));
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("conditions:"));
    let out = run(&mut mcslab(&[
        "verify-mcs",
        "--preset",
        "quadratic-dara",
        "--theta",
        "2,1",
    ]));
    assert_eq!(code(&out), 1);
}

#[test]
fn reports_round_trip_and_are_reproducible() {
    let args = ["verify-mcs", "--preset", "chew-rdu-portfolio"];
    let a = stdout(&run(&mut mcslab(&args)));
    let b = stdout(&run(mcslab(&args).env("MCSLAB_THREADS", "1")));
    assert_eq!(a, b);
    let path: mcslab::McsPath = serde_json::from_str(&a).unwrap();
    assert!(path.is_monotone());
    assert_eq!(serde_json::to_string_pretty(&path).unwrap() + "\n", a);

    let c = stdout(&run(&mut mcslab(&[
        "check",
        "--preset",
        "signal-portfolio",
    ])));
    let report: mcslab::ConditionReport = serde_json::from_str(&c).unwrap();
    assert_eq!(serde_json::to_string_pretty(&report).unwrap() + "\n", c);
}

#[test]
fn config_file_drives_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let target = dir.path().join("path.csv");
    let body = serde_json::json!({
        "command": "verify-mcs",
        "problem": {
            "kind": "portfolio-wealth", "r": 1.0,
            "returns": {"support": [0.5, 2.0], "probs": [0.5, 0.5]},
            "model": {"kind": "quadratic", "alpha": 0.42, "beta": 0.57}
        },
        "theta_grid": [1.86, 2.49],
        "output": {"path": target.to_str().unwrap(), "format": "csv"}
    });
    std::fs::write(&cfg, body.to_string()).unwrap();
    assert_eq!(code(&run(&mut mcslab(&["run", cfg.to_str().unwrap()]))), 2);
    let csv = std::fs::read_to_string(&target).unwrap();
    assert!(
        csv.starts_with("theta,x_lo,x_hi,value\n1.8600000000000001,0.944"),
        "{csv}"
    );
}

#[test]
fn digits_flag_controls_csv_precision() {
    let out = stdout(&run(&mut mcslab(&[
        "solve",
        "--preset",
        "quadratic-dara",
        "--format",
        "csv",
        "--digits",
        "4",
    ])));
    assert_eq!(out.lines().nth(1).unwrap(), "0.5000,0.5000,0.5000,0.5572");
}

#[test]
fn oracle_check_on_explicit_model() {
    let body = serde_json::json!({
        "model": {"kind": "rdu", "omega": "poly:0,0.5,0.5", "u": "log1p"},
        "oracle": {
            "lotteries": [{"support": [0.0, 1.0, 2.0], "probs": [0.2, 0.5, 0.3]}],
            "z_grid": [0.0, 0.5, 1.0, 1.5, 2.0]
        }
    });
    let out = run_with_stdin(
        &mut mcslab(&["oracle-check", "--config", "-"]),
        &body.to_string(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["max_error"].as_f64().unwrap() <= 1e-5);

    assert_eq!(
        code(&run(&mut mcslab(&[
            "oracle-check",
            "--preset",
            "gollier-ambiguity"
        ]))),
        1
    );
}

#[test]
fn search_finds_footnote_region() {
    let args = [
        "search",
        "--pair",
        "1.86:2.49",
        "--range",
        "0.3:0.5",
        "--range",
        "0.55:0.8",
        "--seed",
        "3",
    ];
    let out = run(&mut mcslab(&args));
    assert_eq!(code(&out), 2);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let params = v["found"]["params"].as_array().unwrap();
    assert!(params[0].as_f64().unwrap() < params[1].as_f64().unwrap());
    assert_eq!(stdout(&run(&mut mcslab(&args))), stdout(&out));

    let out = run(&mut mcslab(&[
        "search",
        "--pair",
        "1.86:2.49",
        "--range",
        "1:2",
        "--range",
        "0.2:0.9",
        "--budget",
        "100",
    ]));
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("\"found\": null"));
    assert_eq!(
        code(&run(&mut mcslab(&[
            "search", "--pair", "1:2", "--budget", "0"
        ]))),
        1
    );
}

#[test]
fn precautionary_reproduction_reports_motive() {
    let out = stdout(&run(&mut mcslab(&[
        "reproduce",
        "kreps-porteus-precautionary",
        "--format",
        "json",
    ])));
    let v: Value = serde_json::from_str(&out).unwrap();
    let m = &v["motive"][0];
    assert_eq!(m["positive"], true);
    assert!(m["y_with_risk"].as_f64().unwrap() >= m["y_without"].as_f64().unwrap());
}

#[test]
fn every_preset_reproduces() {
    let list = stdout(&run(&mut mcslab(&["reproduce", "list", "--format", "csv"])));
    for line in list.lines().skip(1) {
        let name = line.split(',').next().unwrap();
        let expected = if name == "footnote-counterexample" {
            2
        } else {
            0
        };
        assert_eq!(
            code(&run(&mut mcslab(&["reproduce", name]))),
            expected,
            "{name}"
        );
    }
}

#[test]
fn shipped_configs_run() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut names: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    names.sort();
    assert!(!names.is_empty());
    for path in names {
        let out = run(&mut mcslab(&["run", path.to_str().unwrap()]));
        let expected = if path.ends_with("footnote.json") { 2 } else { 0 };
        assert_eq!(code(&out), expected, "{}: {}", path.display(), stderr(&out));
    }
}
