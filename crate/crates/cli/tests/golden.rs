use std::process::{Command, Output};

use serde_json::Value;

fn naive(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_naive"))
        .args(args)
        .env_remove("NAIVE_PREC")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let o = naive(args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("valid json")
}

/// Every leaf of a JSON document is a string, a bool or null.
fn no_bare_numbers(v: &Value) -> bool {
    match v {
        Value::Number(_) => false,
        Value::Array(a) => a.iter().all(no_bare_numbers),
        Value::Object(o) => o.values().all(no_bare_numbers),
        _ => true,
    }
}

#[test]
fn tau_out_of_range_exits_two() {
    let o = naive(&["report", "--tau", "0.3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("outside"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(naive(&["saddles"]).status.code(), Some(2));
    assert_eq!(naive(&["saddles", "--t", "1000", "--tau", "0.1"]).status.code(), Some(2));
    assert_eq!(naive(&["series", "G"]).status.code(), Some(2));
    assert_eq!(naive(&["psi", "--x", "zero"]).status.code(), Some(2));
    assert_eq!(naive(&["saddles", "--tau", "0.1", "--prec", "10"]).status.code(), Some(2));
}

#[test]
fn report_at_one_hundredth_passes() {
    let o = naive(&["report", "--tau", "0.01", "--skip", "realline"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.contains("J4 expansion vs printed"));
    assert!(text.contains("J2 expansion vs contour"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn report_at_t_1000_matches_the_printed_table() {
    let v = json(&["report", "--t", "1000", "--skip", "realline", "--json"]);
    assert_eq!(v["passed"], Value::Bool(true));
    let rows = v["rows"].as_array().unwrap();
    for name in ["J0 vs printed", "J1 vs printed", "J2 vs printed", "J3 vs printed", "J4 vs printed"] {
        let row = rows.iter().find(|r| r["name"] == name).unwrap_or_else(|| panic!("{name} missing"));
        assert_eq!(row["pass"], Value::Bool(true), "{row}");
    }
    assert!(no_bare_numbers(&v));
}

#[test]
fn series_q2() {
    let o = naive(&["series", "q2", "--order", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("tau^1 ") && lines[0].contains("5.00000000000000e-1i"), "{text}");
    assert!(lines[1].starts_with("tau^2 ") && lines[1].contains("1.25000000000000e-1i"), "{text}");
    assert!(!text.contains("MISMATCH"));
}

#[test]
fn series_a3_at_q1() {
    let v = json(&["series", "A", "--saddle", "q1", "--n", "3", "--json"]);
    let terms = v["terms"].as_array().unwrap();
    assert_eq!(terms[0]["exponent"], "0");
    assert_eq!(terms[0]["re"].as_str().unwrap().parse::<f64>().unwrap(), 1.0);
    // i tau^2 / (2 pi)
    assert_eq!(terms[1]["exponent"], "2");
    let im: f64 = terms[1]["im"].as_str().unwrap().parse().unwrap();
    assert!((im - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
    assert_eq!(v["mismatches"], "0");
    // the printed tau^8 term is generated even at the default order
    assert!(terms.iter().any(|t| t["exponent"] == "8" && !t["printed"].is_null()));
}

#[test]
fn series_e_at_q2() {
    let v = json(&["series", "E", "--saddle", "q2", "--json"]);
    let t1 = &v["terms"].as_array().unwrap()[1];
    assert_eq!(t1["exponent"], "1");
    let re: f64 = t1["re"].as_str().unwrap().parse().unwrap();
    let im: f64 = t1["im"].as_str().unwrap().parse().unwrap();
    assert!((re - 0.125).abs() < 1e-15);
    assert!((im + 47.0 * std::f64::consts::PI / 96.0).abs() < 1e-14);
}

#[test]
fn series_flags_the_a6_sign_slip() {
    let o = naive(&["series", "A", "--saddle", "q1", "--n", "6"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("MISMATCH"));
}

#[test]
fn json_output_parses_and_uses_strings() {
    for args in [
        &["saddles", "--tau", "0.05", "--json"][..],
        &["asymptotic", "--which", "j4", "--tau", "0.05", "--json"],
        &["psi", "--x", "0.5", "--json"],
        &["z0", "--t", "1000", "--json"],
        &["series", "F", "--saddle", "q1", "--json"],
    ] {
        let v = json(args);
        assert!(no_bare_numbers(&v), "{args:?}: {v}");
    }
}

#[test]
fn csv_integrate_has_six_rows() {
    let o = naive(&["integrate", "--tau", "0.1", "--csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "name,re,im,error");
    assert_eq!(lines.len(), 7);
    assert!(lines[6].starts_with("J0,"));
}

#[test]
fn precision_from_the_environment() {
    let run = |prec: &str| {
        Command::new(env!("CARGO_BIN_EXE_naive"))
            .args(["psi", "--x", "0.5", "--json"])
            .env("NAIVE_PREC", prec)
            .output()
            .unwrap()
    };
    let short: Value = serde_json::from_slice(&run("30").stdout).unwrap();
    let long: Value = serde_json::from_slice(&run("80").stdout).unwrap();
    let digits = |v: &Value| v["value_theta"].as_str().unwrap().len();
    assert!(digits(&long) > digits(&short) + 40);
    assert_eq!(run("12").status.code(), Some(2));
    // the flag wins over the variable
    let o = Command::new(env!("CARGO_BIN_EXE_naive"))
        .args(["psi", "--x", "0.5", "--json", "--prec", "30"])
        .env("NAIVE_PREC", "80")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(digits(&v), digits(&short));
}

#[test]
fn z0_grid_csv() {
    let o = naive(&["z0", "--grid", "1000", "1010", "11", "--csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 12);
    assert!(text.starts_with("t,z0\n1000,"));
}
