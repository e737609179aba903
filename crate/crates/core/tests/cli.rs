use std::io::Write;
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ising-lab"))
}

fn run_json(args: &[&str]) -> (i32, Value, String) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = bin().args(args).arg("--out").arg(&out).arg("--format").arg("json").output().unwrap();
    let text = std::fs::read_to_string(&out).unwrap_or_default();
    let v = serde_json::from_str(&text).unwrap_or(Value::Null);
    (o.status.code().unwrap(), v, String::from_utf8_lossy(&o.stderr).into_owned())
}

#[test]
fn default_verify_passes() {
    let (code, v, _) = run_json(&["verify"]);
    assert_eq!(code, 0);
    assert_eq!(v["all_pass"], true);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() > 100);
    let ids: Vec<&str> = checks.iter().map(|c| c["id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    for c in checks {
        assert!(!c["anchor"].as_str().unwrap().is_empty(), "{c}");
        assert_eq!(c["pass"], c["residual"].as_f64().unwrap() <= c["tolerance"].as_f64().unwrap());
    }
}

#[test]
fn larger_chain_with_grid_passes() {
    let (code, v, _) = run_json(&["verify", "--n-sites", "4", "--omega", "0.1,0.3,0.5"]);
    assert_eq!(code, 0, "{v}");
}

#[test]
fn mutation_exits_one_and_names_checks() {
    let o = bin().args(["verify", "--mutation", "dplus-sign", "--format", "text"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("table.plus_on_va"), "{stderr}");
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.lines().any(|l| l.starts_with("FAIL")));
}

#[test]
fn config_file_and_flag_precedence() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "n_sites = 2\nsuites = [\"ybe\", \"clifford\"]\nybe_samples = 5").unwrap();
    let path = f.path().to_str().unwrap();
    let (code, v, _) = run_json(&["verify", "--config", path]);
    assert_eq!(code, 0);
    assert_eq!(v["config"]["n_sites"], 2);
    let (_, v, _) = run_json(&["verify", "--config", path, "--n-sites", "3"]);
    assert_eq!(v["config"]["n_sites"], 3);
    assert_eq!(v["config"]["ybe_samples"], 5);
}

#[test]
fn bad_input_exits_two() {
    let o = bin().args(["verify", "--n-sites", "9"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "not_a_key = 3").unwrap();
    let o = bin().args(["verify", "--config"]).arg(f.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = bin().args(["charges", "--omega", "0.9"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn runs_are_deterministic() {
    let (_, a, _) = run_json(&["verify", "--suite", "ybe,rtt", "--seed", "11"]);
    let (_, b, _) = run_json(&["verify", "--suite", "ybe,rtt", "--seed", "11"]);
    let res = |v: &Value| v["checks"].as_array().unwrap().iter().map(|c| c["residual"].as_f64().unwrap()).collect::<Vec<_>>();
    assert_eq!(res(&a), res(&b));
}

#[test]
fn scan_csv_has_scaling_and_window() {
    let o = bin().args(["scan", "--n-sites", "3"]).output().unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,quantity,param,value,n,metric,flag"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    let first: Vec<f64> = rows.iter().filter(|r| r[1] == "trotter_error/first_order").map(|r| r[5].parse().unwrap()).collect();
    for w in first.windows(2) {
        let ratio = w[0] / w[1];
        assert!((1.6..=2.4).contains(&ratio), "{ratio}");
    }
    let link: Vec<&Vec<&str>> = rows.iter().filter(|r| r[1] == "floquet_phase_link").collect();
    for r in &link {
        let t: f64 = r[3].parse().unwrap();
        let m: f64 = r[5].parse().unwrap();
        assert!(m < 1e-10);
        assert_eq!(r[6] == "outside_window", t > std::f64::consts::FRAC_PI_4);
    }
    assert!(rows.iter().any(|r| r[6] == "skipped_outside_window"));
}

#[test]
fn charges_table_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("charges.json");
    let o = bin().args(["charges", "--n-sites", "4", "--omega", "0.3", "--out"]).arg(&out).output().unwrap();
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 8);
    for r in rows {
        assert_eq!(r["majorana_degree"], 2);
        assert!(r["term_count"].as_u64().unwrap() <= 8 * 4);
        let w = r["params"]["omega"].as_f64().unwrap();
        if w == 0.0 {
            assert_eq!(r["residuals"]["zero_omega_exact"], 0.0);
        } else {
            assert!(r["residuals"]["commute_v"].as_f64().unwrap() < 1e-9);
            assert!(r["residuals"]["commute_family"].as_f64().unwrap() < 1e-9);
            assert!(r["residuals"]["oracle_proportionality"].as_f64().unwrap() < 1e-6);
        }
    }
}

#[test]
fn csv_and_text_formats() {
    let o = bin().args(["verify", "--suite", "clifford", "--format", "csv"]).output().unwrap();
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("id,pass,residual,tolerance,wall_time_ms,params,anchor"));
    let o = bin().args(["charges", "--omega", "0.1", "--format", "csv"]).output().unwrap();
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("label,omega,N"));
}
