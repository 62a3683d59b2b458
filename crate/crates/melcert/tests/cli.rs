//! End-to-end checks of the command-line interface and its exit-code
//! protocol: 0 ok/certified, 2 usage, 3 inconclusive.

use std::process::Command;

fn melcert(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_melcert"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn elliptic_eval_prints_all_values() {
    let out = melcert(&["elliptic", "eval", "--k", "0.7071067811865476", "--u", "0"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for key in ["sn = 0", "cn = 1", "dn = 1", "K = 1.854", "E = "] {
        assert!(text.contains(key), "missing '{key}' in:\n{text}");
    }
}

#[test]
fn usage_errors_exit_2() {
    // modulus out of range
    let out = melcert(&["elliptic", "eval", "--k", "1.5", "--u", "0"]);
    assert_eq!(out.status.code(), Some(2));
    // malformed complex literal
    let out = melcert(&["elliptic", "eval", "--k", "0.5", "--u", "1+*i"]);
    assert_eq!(out.status.code(), Some(2));
    // unknown flag
    let out = melcert(&["certify", "--definitely-not-a-flag"]);
    assert_eq!(out.status.code(), Some(2));
    // unknown system selector
    let out = melcert(&[
        "certify", "--system", "mystery", "--l", "1", "--n", "1", "--nu", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certify_verdict_exit_codes() {
    let out = melcert(&[
        "certify", "--system", "duffing:a=0", "--l", "1", "--n", "1", "--nu", "1",
        "--delta", "0.1", "--beta", "1.0", "--phi-grid", "8",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"schema\": \"cert-v1\""));
    assert!(text.contains("\"verdict\": \"certified\""));
    assert!(text.contains("\"config\""));
    assert!(text.contains("\"tolerances\""));

    let out = melcert(&[
        "certify", "--system", "duffing:a=0", "--l", "1", "--n", "1", "--nu", "1",
        "--delta", "0.1", "--beta", "0", "--phi-grid", "8",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn certify_is_deterministic() {
    let args = [
        "certify", "--system", "duffing:a=1", "--l", "1", "--n", "1", "--nu", "1.3",
        "--delta", "0.1", "--beta", "1.0", "--phi-grid", "8",
    ];
    let a = melcert(&args);
    let b = melcert(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn melnikov_sweep_emits_csv() {
    let out = melcert(&[
        "melnikov", "sweep", "--system", "duffing:a=0", "--l", "1", "--n", "1",
        "--nu", "1", "--delta", "0", "--beta", "1", "--grid", "8",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("phi,M_quad,M_closed,abs_err"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 8);
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 4);
        let err: f64 = cols[3].parse().unwrap();
        assert!(err < 1e-6, "abs_err too large: {row}");
    }
    // the resolved config is echoed on stderr for CSV outputs
    let errtext = String::from_utf8(out.stderr).unwrap();
    assert!(errtext.contains("\"system\":\"duffing:a=0\""));
}

#[test]
fn resonance_solve_prints_param_star() {
    let out = melcert(&[
        "resonance", "solve", "--system", "duffing:a=0", "--l", "1", "--n", "1", "--nu", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("param_star = 1.1803"), "{text}");
    assert!(text.contains("residual = "));
}

#[test]
fn orbits_find_reports_orbit() {
    let out = melcert(&[
        "orbits", "find", "--system", "duffing:a=0", "--l", "1", "--n", "1", "--nu", "1",
        "--delta", "0", "--beta", "1", "--eps", "0.01", "--phi", "0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"stability\": \"elliptic\""), "{text}");
    assert!(text.contains("\"residual\""));
}
