use std::process::{Command, Output};

fn bcnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bcnet"))
        .args(args)
        .output()
        .expect("run bcnet")
}

fn stdout(args: &[&str]) -> String {
    let out = bcnet(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Header plus rows, split into cells.
fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect::<Vec<_>>());
    let header = lines.next().unwrap();
    (header, lines.collect())
}

fn column(text: &str, name: &str) -> Vec<f64> {
    let (header, rows) = table(text);
    let k = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

#[test]
fn point_header_is_pinned() {
    let out = stdout(&["point"]);
    assert_eq!(
        out.lines().next().unwrap(),
        "strategy,regime,lambda,r0,alpha,power,noise,beta,mean,variance,complete_outage,s0,s1,q,lambda_eps,c"
    );
}

#[test]
fn point_json_keys_are_pinned() {
    let out = stdout(&["point", "--format", "json", "--xi", "0.1", "--epsilon", "0.05"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    let mut expected = vec![
        "schema_version",
        "strategy",
        "regime",
        "lambda",
        "r0",
        "alpha",
        "power",
        "noise",
        "beta",
        "mean",
        "variance",
        "complete_outage",
        "s0",
        "s1",
        "q",
        "lambda_eps",
        "c",
    ];
    expected.sort_unstable();
    assert_eq!(keys, expected);
    assert_eq!(v["schema_version"], 1);
    // key order in the text follows the CSV columns
    assert!(out.starts_with(r#"{"schema_version":1,"strategy":"broadcast","regime":"interference-limited""#));
}

#[test]
fn broadcast_point_reports_last_layer() {
    let out = stdout(&[
        "point", "--lambda", "0.1", "--alpha", "4", "--r0", "1", "--power", "1", "--noise", "0",
    ]);
    let s1 = column(&out, "s1")[0];
    assert!((s1 - 16.4256).abs() < 1e-4, "{s1}");
    assert_eq!(table(&out).1[0][1], "interference-limited");
}

#[test]
fn malformed_flag_is_a_usage_error_without_output() {
    for args in [
        &["point", "--lambda", "abc"][..],
        &["point", "--strategy", "outage"],
        &["sweep", "--var", "lambda", "--grid", "1,0.5", "--metrics", "R_bs"],
        &["sweep", "--var", "lambda", "--grid", "1", "--metrics", "nope"],
        &["point", "--bogus"],
    ] {
        let out = bcnet(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn invalid_parameters_exit_nonzero() {
    let out = bcnet(&["point", "--alpha", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let out = bcnet(&["point", "--strategy", "outage-fixed"]);
    assert_eq!(out.status.code(), Some(2), "outage-fixed without a threshold");
}

#[test]
fn vanishing_fixed_threshold_has_vanishing_rate() {
    let out = stdout(&["point", "--strategy", "outage-fixed:1e-9"]);
    assert!(column(&out, "mean")[0] < 1e-8);
    let via_flag = stdout(&["point", "--strategy", "outage-fixed", "--beta", "1e-9"]);
    assert_eq!(out, via_flag);
}

#[test]
fn db_levels_convert_at_the_boundary() {
    let a = stdout(&["point", "--noise", "0dB", "--power", "3dB"]);
    let b = stdout(&["point", "--noise", "1", "--power", "1.99526231496888"]);
    assert_eq!(column(&a, "mean"), column(&b, "mean"));
    assert_eq!(table(&a).1[0][1], "general");
}

#[test]
fn single_point_sweep_matches_point() {
    let point = stdout(&["point", "--lambda", "0.05", "--xi", "0.1", "--epsilon", "0.05"]);
    let sweep = stdout(&[
        "sweep",
        "--var",
        "lambda",
        "--grid",
        "0.05",
        "--metrics",
        "R_bs,var_bs,complete_outage_bs,s0,s1,q,lambda_eps,c",
        "--xi",
        "0.1",
        "--epsilon",
        "0.05",
    ]);
    let (ph, prow) = table(&point);
    let (_, srow) = table(&sweep);
    let cell = |name: &str| prow[0][ph.iter().position(|h| h == name).unwrap()].clone();
    let expected: Vec<String> = [
        "lambda",
        "mean",
        "variance",
        "complete_outage",
        "s0",
        "s1",
        "q",
        "lambda_eps",
        "c",
    ]
    .iter()
    .map(|n| cell(n))
    .collect();
    assert_eq!(srow[0], expected);
}

#[test]
fn sweep_header_follows_requested_metrics() {
    let out = stdout(&["sweep", "--var", "xi", "--grid", "0.1,1", "--metrics", "q,R_bs"]);
    assert_eq!(out.lines().next().unwrap(), "xi,q,R_bs");
    assert_eq!(out.lines().count(), 3);
}

#[test]
fn broadcast_beats_optimal_outage_along_density_sweep() {
    let out = stdout(&[
        "sweep",
        "--var",
        "lambda",
        "--grid",
        "1e-3:1:13:log",
        "--metrics",
        "R_bs,R_os_opt,var_bs,var_os_opt",
    ]);
    let (bs, os) = (column(&out, "R_bs"), column(&out, "R_os_opt"));
    let (vbs, vos) = (column(&out, "var_bs"), column(&out, "var_os_opt"));
    assert_eq!(bs.len(), 13);
    for k in 0..bs.len() {
        assert!(bs[k] >= os[k] && vbs[k] <= vos[k], "row {k}");
    }
}

#[test]
fn capacity_grows_with_path_loss_exponent() {
    let out = stdout(&[
        "sweep",
        "--var",
        "alpha",
        "--grid",
        "3:6:7",
        "--metrics",
        "c",
        "--xi",
        "1",
        "--epsilon",
        "0.05",
    ]);
    let c = column(&out, "c");
    assert!(c.windows(2).all(|w| w[1] >= w[0]), "{c:?}");
}

#[test]
fn failed_points_leave_empty_cells() {
    let out = bcnet(&["sweep", "--var", "alpha", "--grid", "1.5,4", "--metrics", "R_bs"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "1.5,");
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let none = bcnet(&["sweep", "--var", "alpha", "--grid", "1.5", "--metrics", "R_bs"]);
    assert_eq!(none.status.code(), Some(3));
}

#[test]
fn sweep_json_rows() {
    let out = stdout(&[
        "sweep",
        "--var",
        "epsilon",
        "--grid",
        "0.05,0.1",
        "--metrics",
        "lambda_eps",
        "--xi",
        "0.1",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["variable"], "epsilon");
    let rows = v["rows"].as_array().unwrap();
    assert!(rows[1]["lambda_eps"].as_f64().unwrap() > rows[0]["lambda_eps"].as_f64().unwrap());
}

#[test]
fn simulate_dump_is_reproducible() {
    let args = ["simulate", "--lambda", "0.05", "--trials", "300", "--seed", "7"];
    let a = stdout(&args);
    assert_eq!(a.lines().next().unwrap(), "trial_index,S,R");
    assert_eq!(a.lines().count(), 301);
    let b = stdout(&[&args[..], &["--workers", "3"]].concat());
    assert_eq!(a, b);
    let os = stdout(&[
        "simulate",
        "--lambda",
        "0.05",
        "--trials",
        "300",
        "--seed",
        "7",
        "--strategy",
        "outage-fixed:2",
    ]);
    // same channel states, different rates
    assert_eq!(column(&a, "S"), column(&os, "S"));
    assert!(column(&os, "R")
        .iter()
        .all(|&r| r == 0.0 || (r - 3f64.ln()).abs() < 1e-15));
}

#[test]
fn validate_report_is_byte_identical_and_schema_pinned() {
    let dir = tempfile::tempdir().unwrap();
    let path = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let base = ["validate", "--trials", "20000", "--seed", "42"];
    for (name, workers) in [("a.json", "1"), ("b.json", "2")] {
        let out = bcnet(&[&base[..], &["--workers", workers, "--out", &path(name)]].concat());
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
    let a = std::fs::read(path("a.json")).unwrap();
    assert_eq!(a, std::fs::read(path("b.json")).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["schema_version"], 1);
    let checks = v["checks"].as_array().unwrap();
    let names: Vec<&str> = checks.iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(
        names,
        [
            "mean_bs",
            "variance_bs",
            "complete_outage_bs",
            "rate_outage_xi=0.1",
            "rate_outage_xi=1",
            "success_os_matched",
            "mean_os_opt",
            "variance_os_opt",
        ]
    );
    let mut keys: Vec<&String> = checks[0].as_object().unwrap().keys().collect();
    keys.sort();
    assert_eq!(keys, ["analytic", "half_width", "lambda", "mc", "name", "pass"]);
}

#[test]
fn corrupted_analytic_values_fail_validation() {
    let out = bcnet(&["validate", "--trials", "20000", "--perturb-analytic", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["all_pass"], false);
}
