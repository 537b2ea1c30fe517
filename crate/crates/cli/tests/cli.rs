use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nls-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data lines of a CSV report, without the timestamp line.
fn body(o: &Output) -> Vec<String> {
    let s = stdout(o);
    let mut lines = s.lines();
    assert!(lines.next().unwrap().starts_with("# generated_unix_time="));
    lines.map(String::from).collect()
}

fn column(lines: &[String], name: &str) -> Vec<String> {
    let header: Vec<&str> = lines[0].split(',').collect();
    let i = header
        .iter()
        .position(|h| *h == name)
        .expect("column present");
    lines[1..]
        .iter()
        .map(|l| l.split(',').nth(i).unwrap().to_string())
        .collect()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nls-lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn solve_reports_reference_constant() {
    let o = run(&["solve", "--q", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let lines = body(&o);
    let c: f64 = column(&lines, "c_eff")[0].parse().unwrap();
    assert!((c - 0.430375).abs() < 1e-4, "{c}");
    assert_eq!(column(&lines, "n_points")[0], "500");
}

#[test]
fn json_carries_metadata() {
    let o = run(&["solve", "--q", "10", "--n", "500", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "solve");
    assert_eq!(v["metadata"]["n_points"][0], 500);
    assert!(v["metadata"]["condition_estimate"][0].as_f64().unwrap() >= 1.0);
    assert!(v["metadata"]["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    assert!((v["records"][0]["c_eff"].as_f64().unwrap() - 0.430375).abs() < 1e-4);
}

#[test]
fn argument_errors_exit_two() {
    for args in [
        &["solve", "--q", "-1"][..],
        &["solve", "--q", "0"],
        &["solve", "--q-grid", "10:5:3"],
        &["solve", "--q", "1", "--workers", "0"],
        &["solve", "--q", "1", "--n", "0"],
        &["sweep", "--q", "abc"],
        &["plotdata", "edge", "--q", "5"],
        &["resurgence", "--q", "20,30"],
        &["frobnicate"],
    ] {
        let o = run(args);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn csv_is_deterministic_apart_from_timestamp() {
    let a = run(&["sweep", "--q-grid", "5:60:4"]);
    let b = run(&["sweep", "--q-grid", "5:60:4"]);
    assert_eq!(body(&a), body(&b));
    assert_eq!(body(&a).len(), 5);
}

#[test]
fn parallel_sweep_equals_serial() {
    let args = ["sweep", "--q", "40,3,17,8,25,1"];
    let serial = run(&[&args[..], &["--workers", "1"]].concat());
    let parallel = run(&[&args[..], &["--workers", "4"]].concat());
    assert_eq!(body(&serial), body(&parallel));
    let q: Vec<f64> = column(&body(&serial), "q")
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    assert_eq!(q, vec![1.0, 3.0, 8.0, 17.0, 25.0, 40.0]);
}

#[test]
fn output_file_is_written() {
    let p = tmp("solve.csv");
    let o = run(&["solve", "--q", "2", "--out", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&p).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("q,n_points,rho0"));
}

#[test]
fn checks_pass_under_default_profile() {
    let o = run(&["checks"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let lines = body(&o);
    assert!(lines.len() > 7);
    assert!(column(&lines, "passed").iter().all(|p| p == "true"));
}

#[test]
fn strict_profile_keeps_energy_and_factorisation() {
    let o = run(&["checks", "--profile", "strict", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["metadata"]["tolerance_scale"], 0.1);
    let recs = v["records"].as_array().unwrap();
    for name in ["energy_identity", "wh_factorisation_residual"] {
        let r = recs.iter().find(|r| r["check_name"] == name).unwrap();
        assert_eq!(r["passed"], true, "{name}");
    }
    // exit status mirrors the verdicts
    let all = recs.iter().all(|r| r["passed"] == true);
    assert_eq!(o.status.code(), Some(if all { 0 } else { 1 }));
}

/// Exit status is nonzero exactly when some cell fails.
fn assert_table_exit_matches(name: &str) -> bool {
    let o = run(&["tables", name, "--workers", "4"]);
    let lines = body(&o);
    let any_fail = column(&lines, "pass").iter().any(|p| p != "true");
    assert_eq!(
        o.status.code(),
        Some(if any_fail { 1 } else { 0 }),
        "{name}"
    );
    if any_fail {
        assert!(String::from_utf8_lossy(&o.stderr).contains("failing item"));
    }
    any_fail
}

#[test]
fn table_exit_status_tracks_cells() {
    assert!(!assert_table_exit_matches("ceff"));
    assert!(!assert_table_exit_matches("richardson"));
    assert!(!assert_table_exit_matches("density"));
    assert_table_exit_matches("eigenvalues");
}

#[test]
fn alternative_manifest_is_honoured() {
    let text = nls_lab_cli::golden::BUILTIN.replace("0.430375", "0.431375");
    let p = tmp("golden.toml");
    std::fs::write(&p, text).unwrap();
    let o = run(&["tables", "ceff", "--golden", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Q=10 c_eff"));

    let bad = tmp("bad.toml");
    std::fs::write(&bad, "schema_version = 7\n").unwrap();
    let o = run(&["tables", "ceff", "--golden", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn plotdata_columns() {
    let o = run(&["plotdata", "profile", "--q", "20"]);
    let lines = body(&o);
    assert_eq!(lines[0], "q,xi,xi_over_q,rho,inner_approx");
    assert_eq!(lines.len(), 402);

    let o = run(&["plotdata", "edge", "--q", "30,40"]);
    let lines = body(&o);
    assert_eq!(lines[0], "q,s,edge_profile");
    let s: Vec<f64> = column(&lines, "s")
        .iter()
        .map(|x| x.parse().unwrap())
        .collect();
    let v: Vec<f64> = column(&lines, "edge_profile")
        .iter()
        .map(|x| x.parse().unwrap())
        .collect();
    let at_ref = s.iter().zip(&v).filter(|(s, _)| **s == 10.0);
    for (_, v) in at_ref {
        assert!((v - 1.0).abs() < 1e-15);
    }

    let o = run(&["plotdata", "spectrum", "--q", "5,10"]);
    assert_eq!(body(&o)[0], "q,gap_0,gap_1,q_gap_0");

    let o = run(&["plotdata", "wh"]);
    let lines = body(&o);
    assert!(column(&lines, "factor_residual")
        .iter()
        .all(|r| r.parse::<f64>().unwrap() <= 1e-10));
}

#[test]
fn spectrum_columns_follow_top_k() {
    let o = run(&["spectrum", "--q", "5", "--top-k", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let lines = body(&o);
    assert_eq!(
        lines[0],
        "q,n_points,lambda_0,lambda_1,gap_0,gap_1,gap_ratio,log_fredholm,trace_residual"
    );
    assert_eq!(
        run(&["spectrum", "--q", "5", "--top-k", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn resurgence_reports_threshold_sensitivity() {
    let o = run(&[
        "resurgence",
        "--q-grid",
        "20:200:40",
        "--n-max",
        "4",
        "--workers",
        "4",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let lines = body(&o);
    // requested threshold plus two smaller ones, four orders each
    assert_eq!(lines.len(), 1 + 3 * 4);
    let thr: Vec<f64> = column(&lines, "svd_threshold")
        .iter()
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(thr[0], 1e-7);
    assert!(thr[4] < thr[0] && thr[8] < thr[4]);
}
