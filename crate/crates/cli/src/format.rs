//! Fixed number formatting and CSV assembly.

use fiberent::analysis::SweepResult;
use fiberent::metrics::{photon_pairs, MetricsReport};

/// Significant digits written for every float.
pub const SIG_DIGITS: usize = 12;

/// Formats like C's `%.12g`: fixed notation for exponents in `[-4, 12)`,
/// scientific otherwise, trailing zeros removed.
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    // Rounding to 12 digits can bump the exponent (9.9999999999996 -> 10),
    // so take it from the rounded scientific form.
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIG_DIGITS as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Column name for the concurrence of photons `i < j`.
pub fn pair_column(i: usize, j: usize, n: usize) -> String {
    if n <= 10 {
        format!("C_{i}{j}")
    } else {
        format!("C_{i}_{j}")
    }
}

fn pair_columns(n: usize) -> Vec<String> {
    photon_pairs(n).map(|(i, j)| pair_column(i, j, n)).collect()
}

fn flag(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

pub fn sweep_csv(result: &SweepResult, n: usize) -> String {
    let mut out = String::from("param,witness,neg_witness,fidelity");
    for c in pair_columns(n) {
        out.push(',');
        out.push_str(&c);
    }
    out.push_str(",esd,dsf\n");
    for k in 0..result.len() {
        let mut row = vec![
            fmt_g(result.values[k]),
            fmt_g(result.witness[k]),
            fmt_g(-result.witness[k]),
            fmt_g(result.fidelity[k]),
        ];
        row.extend(photon_pairs(n).map(|p| fmt_g(result.concurrences[k][&p])));
        row.push(flag(result.esd[k]).into());
        row.push(flag(result.dsf[k]).into());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn simulate_csv(state: &str, effect: &str, report: &MetricsReport, dsf: bool) -> String {
    let n = report.n_qubits;
    let mut out = String::from("state,effect,n_qubits,witness,neg_witness,fidelity");
    for c in pair_columns(n) {
        out.push(',');
        out.push_str(&c);
    }
    out.push_str(",esd,dsf\n");
    let mut row = vec![
        state.to_string(),
        effect.to_string(),
        n.to_string(),
        fmt_g(report.witness_value),
        fmt_g(-report.witness_value),
        fmt_g(report.fidelity),
    ];
    row.extend(photon_pairs(n).map(|p| fmt_g(report.pair_concurrences[&p])));
    row.push(flag(report.esd_flag).into());
    row.push(flag(dsf).into());
    out.push_str(&row.join(","));
    out.push('\n');
    out
}
