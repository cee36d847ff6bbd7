//! End-to-end runs of the `fiberent` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fiberent"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_config(cmd: &str, config: &Path, extra: &[&str]) -> Output {
    let mut args = vec![cmd, "--config", config.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &Path, name: &str, json: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, json).unwrap();
    p
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).map(str::trim))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
}

#[test]
fn simulate_examples() {
    let o = run_config("simulate", &configs().join("simulate_ghz3_pdl_identity.json"), &[]);
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), "witness"), "-0.5");

    let o = run_config("simulate", &configs().join("simulate_w3_pmd.json"), &[]);
    let text = stdout(&o);
    let c: f64 = field(&text, "C_01").parse().unwrap();
    let v: f64 = field(&text, "witness").parse().unwrap();
    let e = (-1.0f64).exp();
    assert!((c - 2.0 / 3.0 * e).abs() < 1e-9);
    assert!((v - (1.0 - 2.0 * e) / 3.0).abs() < 1e-9);
    assert_eq!(field(&text, "esd"), "true");

    let o = run_config("simulate", &configs().join("simulate_ghz3_pdl_antialigned.json"), &[]);
    let text = stdout(&o);
    assert_eq!(field(&text, "witness"), "-0.5");
    assert_eq!(field(&text, "dsf"), "true");
}

#[test]
fn simulate_writes_csv_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("row.csv");
    let o = run_config(
        "simulate",
        &configs().join("simulate_w3_pmd.json"),
        &["--out", out.to_str().unwrap(), "--quiet"],
    );
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "state,effect,n_qubits,witness,neg_witness,fidelity,C_01,C_02,C_12,esd,dsf");
    assert!(lines[1].starts_with("w,pmd,3,0.0880803725524,"));
}

#[test]
fn simulate_large_register_uses_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let channels = vec![r#"{"pdl": 0.2}"#; 12].join(",");
    let cfg = write_config(
        dir.path(),
        "w12.json",
        &format!(r#"{{"state": "w", "n_qubits": 12, "effect": "pdl", "channels": [{channels}]}}"#),
    );
    let o = run_config("simulate", &cfg, &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // equal loss everywhere leaves the W state untouched
    let v: f64 = field(&stdout(&o), "witness").parse().unwrap();
    assert!((v + 1.0 / 12.0).abs() < 1e-12);
    assert!(stdout(&o).contains("C_10_11"));
}

#[test]
fn esd_examples() {
    let o = run_config("esd", &configs().join("esd_w3_pmd.json"), &[]);
    let t: f64 = field(&stdout(&o), "threshold").parse().unwrap();
    assert!((t - 2.0f64.ln().sqrt()).abs() < 1e-8);
    assert_eq!(field(&stdout(&o), "parameter"), "scale(dgd)");

    let o = run_config("esd", &configs().join("esd_w3_pdl.json"), &[]);
    let t: f64 = field(&stdout(&o), "threshold").parse().unwrap();
    assert!((t - 4.0f64.ln()).abs() < 1e-8);

    let o = run_config("esd", &configs().join("esd_ghz3_pmd.json"), &[]);
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), "threshold"), "none");
}

#[test]
fn esd_explicit_bracket() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "b.json",
        r#"{"state": "w", "n_qubits": 3, "effect": "pmd",
            "spectrum": {"kind": "uncorrelated", "bandwidths": [1, 1, 1]},
            "channels": [{"dgd": 0}, {"dgd": 0}, {"dgd": 0}],
            "esd": {"target": {"photon": 0, "param": "dgd"}, "lo": 1, "hi": 2}}"#,
    );
    let out = dir.path().join("esd.csv");
    let o = run_config("esd", &cfg, &["--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(out).unwrap();
    let (head, row) = csv.split_once('\n').unwrap();
    assert_eq!(head, "parameter,threshold");
    let t: f64 = row.trim().strip_prefix("dgd[0],").unwrap().parse().unwrap();
    // single delayed photon: 4/3·exp(-t²/2) = 1/3
    assert!((t - (2.0 * 4.0f64.ln()).sqrt()).abs() < 1e-8);
}

#[test]
fn dsf_check_reports() {
    let o = run_config("dsf-check", &configs().join("simulate_ghz3_pdl_antialigned.json"), &[]);
    assert_eq!(field(&stdout(&o), "dsf"), "true");
    let o = run_config("dsf-check", &configs().join("simulate_w3_pmd.json"), &[]);
    assert_eq!(field(&stdout(&o), "dsf"), "false");
}

#[test]
fn oracle_compare_examples() {
    for name in ["oracle_ghz3.json", "oracle_w3_correlated.json"] {
        let o = run_config("oracle-compare", &configs().join(name), &[]);
        assert!(o.status.success(), "{name}");
        assert!(stdout(&o).contains("pass"));
    }
    let dir = tempfile::tempdir().unwrap();
    let zero = write_config(
        dir.path(),
        "zero.json",
        r#"{"state": "w", "n_qubits": 3, "effect": "pmd",
            "spectrum": {"kind": "uncorrelated", "bandwidths": [1, 1, 1]},
            "channels": [{}, {}, {}]}"#,
    );
    let out = dir.path().join("dev.csv");
    let o = run_config("oracle-compare", &zero, &["--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(out).unwrap();
    let dev: f64 = csv.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!(dev < 1e-9, "{dev}");
}

#[test]
fn oracle_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // a delay near 2π/spacing aliases on the coarsest allowed grid
    let cfg = write_config(
        dir.path(),
        "alias.json",
        r#"{"state": "ghz", "n_qubits": 2, "effect": "pmd",
            "spectrum": {"kind": "uncorrelated", "bandwidths": [1, 1]},
            "channels": [{"dgd": 25.76}, {"dgd": 0}],
            "oracle": {"points": 41, "half_width": 5}}"#,
    );
    let o = run_config("oracle-compare", &cfg, &["--quiet"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("fail"));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            r#"{"state": "ghz", "n_qubits": 3, "effect": "pdl", "channels": [{}, {}]}"#,
            "channels: expected 3 entries",
        ),
        (r#"{"state": "ghz", "n_qubits": 3, "effect": "pdl", "channels": [{}, {}, {}],"#, "malformed"),
        (
            r#"{"state": "ghz", "n_qubits": 3, "effect": "pmd", "channels": [{}, {}, {}]}"#,
            "spectrum: required",
        ),
        (
            r#"{"state": "ghz", "n_qubits": 5, "effect": "pmd",
                "spectrum": {"kind": "correlated", "bandwidths": [1, 1, 1, 1, 1]},
                "channels": [{}, {}, {}, {}, {}]}"#,
            "at most 4",
        ),
    ];
    for (i, (json, needle)) in cases.iter().enumerate() {
        let cfg = write_config(dir.path(), &format!("bad{i}.json"), json);
        let cmd = if i == 3 { "oracle-compare" } else { "simulate" };
        let o = run_config(cmd, &cfg, &[]);
        assert_eq!(o.status.code(), Some(2), "case {i}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(needle), "case {i}: {err}");
    }
    // sweep without a sweep block
    let o = run_config("sweep", &configs().join("simulate_w3_pmd.json"), &[]);
    assert_eq!(o.status.code(), Some(2));
    // unknown flag
    assert_eq!(run(&["simulate", "--bogus"]).status.code(), Some(2));
}

#[test]
fn io_errors_exit_4() {
    let o = run(&["simulate", "--config", "/nonexistent/config.json"]);
    assert_eq!(o.status.code(), Some(4));
    let o = run_config(
        "simulate",
        &configs().join("simulate_w3_pmd.json"),
        &["--out", "/nonexistent/dir/out.csv"],
    );
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn sweep_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("sweep_w3_pdl.json");
    let mut outputs = Vec::new();
    for run_idx in 0..2 {
        let out = dir.path().join(format!("r{run_idx}.csv"));
        let o = run_config("sweep", &cfg, &["--out", out.to_str().unwrap(), "--quiet"]);
        assert!(o.status.success());
        outputs.push(std::fs::read(dir.path().join(format!("r{run_idx}_two-channel.csv"))).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert!(!outputs[0].contains(&b'\r'));
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    assert!(text.starts_with("param,witness,neg_witness,fidelity,C_01,C_02,C_12,esd,dsf\n"));
    assert_eq!(text.lines().count(), 302);
}

#[test]
fn identity_channel_two_point_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "id.json",
        r#"{"state": "w", "n_qubits": 3, "effect": "pmd",
            "spectrum": {"kind": "uncorrelated", "bandwidths": [1, 1, 1]},
            "channels": [{}, {}, {}],
            "sweep": {"grid": [0, 1]}}"#,
    );
    let o = run_config("sweep", &cfg, &[]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with("0,") || l.starts_with("1,")).collect();
    assert_eq!(rows.len(), 2);
    let strip = |r: &str| r.split_once(',').unwrap().1.to_string();
    assert_eq!(strip(rows[0]), strip(rows[1]));
}

#[test]
fn svg_has_one_polyline_per_series() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig.csv");
    let svg = dir.path().join("fig.svg");
    let o = run_config(
        "sweep",
        &configs().join("sweep_ghz3_pmd.json"),
        &["--out", out.to_str().unwrap(), "--svg", svg.to_str().unwrap()],
    );
    assert!(o.status.success());
    let text = std::fs::read_to_string(&svg).unwrap();
    let doc = roxmltree::Document::parse(&text).expect("valid XML");
    let polylines = doc.descendants().filter(|n| n.has_tag_name("polyline")).count();
    assert_eq!(polylines, 3);
    let labels: Vec<&str> = doc.descendants().filter_map(|n| n.text()).collect();
    assert!(labels.contains(&"-V"));
    assert!(labels.iter().any(|l| l.contains("dgd[0]") && l.contains("scale(dgd)")));
    for label in ["single", "equal-correlated", "equal-uncorrelated"] {
        assert!(dir.path().join(format!("fig_{label}.csv")).exists());
    }
}

#[test]
fn multi_series_sweep_needs_out() {
    let o = run_config("sweep", &configs().join("sweep_ghz3_pmd.json"), &[]);
    assert_eq!(o.status.code(), Some(2));
}
