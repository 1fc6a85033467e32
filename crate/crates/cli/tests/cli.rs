use std::process::{Command, Output};

use twoenv_cli::{run_cli, EXIT_OK, EXIT_USAGE};

const BIN: &str = env!("CARGO_BIN_EXE_twoenv");

fn twoenv(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn in_process(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_cli(
        std::iter::once("twoenv").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn exact_point_mass() {
    let out = twoenv(&[
        "exact",
        "--prior",
        "point:5.00",
        "--strategy",
        "never-switch",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "$7.50");

    let (code, json, _) = in_process(&[
        "exact",
        "--prior",
        "uniform:2,4",
        "--strategy",
        "random:1/3",
        "--format",
        "json",
    ]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["expected_payoff"]["dollars"], "4.50");
    assert_eq!(v["strategy"], "random:1/3");
}

#[test]
fn single_trial_has_two_outcomes() {
    let out = twoenv(&[
        "simulate",
        "--prior",
        "point:5.00",
        "--strategy",
        "always-switch",
        "--trials",
        "1",
        "--seed",
        "7",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let mean = v["mean_payoff"].as_f64().unwrap();
    assert!(mean == 5.0 || mean == 10.0, "{mean}");
    assert_eq!(v["trials"], 1);
    assert_eq!(v["exact_expected_payoff"]["dollars"], "7.50");
}

#[test]
fn compare_always_vs_never_is_zero() {
    let (code, json, _) = in_process(&[
        "compare",
        "--prior",
        "uniform:1.00,3.00",
        "--trials",
        "1000000",
        "--seed",
        "42",
        "--format",
        "json",
    ]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["strategy_a"], "always-switch");
    assert_eq!(v["strategy_b"], "never-switch");
    assert_eq!(v["exact_difference"]["num"], "0");
    // Exact per-trial variance of the difference: E[b^2] = (1 + 9) / 2 = 5.
    assert_eq!(v["exact_difference_variance"], "5");
    let sigma = (5.0f64 / 1e6).sqrt();
    assert!(v["mean_difference"].as_f64().unwrap().abs() < 4.0 * sigma);
}

#[test]
fn compare_equivalent_strategies_never_differ() {
    let (_, json, _) = in_process(&[
        "compare",
        "--prior",
        "point:5",
        "--strategy",
        "naive-bayesian",
        "--baseline",
        "always-switch",
        "--trials",
        "50000",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["differing_trials"], 0);
    assert_eq!(v["mean_difference"], 0.0);
}

#[test]
fn asymmetry_table() {
    let (code, text, _) = in_process(&["asymmetry", "--pair", "5.00"]);
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("-$3.75"));
    assert!(text.contains("+$7.50"));
    assert!(text.contains("= 2"));
    let (_, json, _) = in_process(&["asymmetry", "--pair", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["rows"][0]["error"]["dollars"], "-0.75");
    assert_eq!(v["rows"][1]["error"]["dollars"], "1.50");
    assert_eq!(v["magnitude_ratio"], "2");
}

#[test]
fn paper_check_formats() {
    let (code, json, _) = in_process(&["paper-check", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["sections"].as_array().unwrap().len(), 5);
    let (code, csv, _) = in_process(&["paper-check", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    assert!(csv.starts_with("section,identity,value,passed\n"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["simulate", "--prior", "point:5"],
        vec![
            "simulate",
            "--prior",
            "point:0",
            "--strategy",
            "never-switch",
        ],
        vec!["simulate", "--prior", "point:5", "--strategy", "random:2"],
        vec![
            "simulate",
            "--prior",
            "point:5",
            "--strategy",
            "never-switch",
            "--trials",
            "0",
        ],
        vec![
            "simulate",
            "--prior",
            "point:5",
            "--strategy",
            "never-switch",
            "--workers",
            "0",
        ],
        vec![
            "simulate",
            "--prior",
            "table:1=1/2,2=1/3",
            "--strategy",
            "never-switch",
        ],
        vec![
            "exact",
            "--prior",
            "uniform:1,1",
            "--strategy",
            "never-switch",
        ],
        vec!["asymmetry", "--pair", "1e3"],
        vec!["asymmetry"],
        vec!["frobnicate"],
        vec![],
    ] {
        let (code, _, err) = in_process(&args);
        assert_eq!(code, EXIT_USAGE, "{args:?}");
        assert!(!err.is_empty());
    }
    let (_, _, err) = in_process(&[
        "exact",
        "--prior",
        "uniform:1,1",
        "--strategy",
        "never-switch",
    ]);
    assert!(err.contains("listed twice"), "{err}");
}

#[test]
fn zero_pair_is_rejected() {
    let (code, _, err) = in_process(&["asymmetry", "--pair", "0"]);
    assert_eq!(code, 1);
    assert!(err.contains("positive"));
}

#[test]
fn help_succeeds() {
    let (code, out, _) = in_process(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("trial_index,base,held,observed,decision,payoff"));
}

#[test]
fn dump_trials_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trials.csv");
    let path_str = path.to_str().unwrap();
    let (code, summary, _) = in_process(&[
        "simulate",
        "--prior",
        "uniform:1,2.5",
        "--strategy",
        "random:1/2",
        "--trials",
        "500",
        "--seed",
        "3",
        "--format",
        "json",
        "--dump-trials",
        path_str,
    ]);
    assert_eq!(code, EXIT_OK);
    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(
        reader.headers().unwrap(),
        vec![
            "trial_index",
            "base",
            "held",
            "observed",
            "decision",
            "payoff"
        ]
    );
    let mut total = 0.0;
    let mut rows = 0;
    for rec in reader.records() {
        let rec = rec.unwrap();
        assert_eq!(rec[0].parse::<usize>().unwrap(), rows);
        let base: f64 = rec[1].parse().unwrap();
        let observed: f64 = rec[3].parse().unwrap();
        let payoff: f64 = rec[5].parse().unwrap();
        let expected_observed = if &rec[2] == "smaller" {
            base
        } else {
            2.0 * base
        };
        assert_eq!(observed, expected_observed);
        match &rec[4] {
            "stay" => assert_eq!(payoff, observed),
            "switch" => assert_eq!(payoff, 3.0 * base - observed),
            other => panic!("decision {other}"),
        }
        total += payoff;
        rows += 1;
    }
    assert_eq!(rows, 500);
    let v: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert!((v["mean_payoff"].as_f64().unwrap() - total / 500.0).abs() < 1e-9);
}

#[test]
fn csv_and_text_formats() {
    let (_, csv, _) = in_process(&[
        "simulate",
        "--prior",
        "point:5",
        "--strategy",
        "never-switch",
        "--trials",
        "10",
        "--format",
        "csv",
    ]);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "trials,mean_payoff,sample_variance,ci95_halfwidth,exact_expected_payoff,exact_payoff_variance,mean_switch_gain"
    );
    assert!(lines.next().unwrap().starts_with("10,"));
    let (_, text, _) = in_process(&[
        "simulate",
        "--prior",
        "point:5",
        "--strategy",
        "never-switch",
        "--trials",
        "10",
    ]);
    assert!(text.contains("exact expected payoff $7.50"));
    let (_, csv, _) = in_process(&[
        "exact",
        "--prior",
        "point:5",
        "--strategy",
        "never-switch",
        "--format",
        "csv",
    ]);
    assert_eq!(
        csv,
        "prior,strategy,expected_payoff,payoff_variance\ntable:5.00=1,never-switch,7.50,25/4\n"
    );
}
