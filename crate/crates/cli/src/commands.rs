//! The five subcommands. Each returns the text it would print so that the
//! binary stays a thin shell and tests can call commands directly.

use std::path::{Path, PathBuf};

use fiberent::analysis::{self, dsf_check, esd_threshold, find_esd, EsdQuery, DSF_TOL};
use fiberent::channels::apply_channel;
use fiberent::metrics::{closed_form_report, evaluate, MetricsReport};
use fiberent::oracle::{compare_pmd, MAX_GRID_QUBITS, ORACLE_TOL};
use fiberent::states::{witness_spec, PureState};

use crate::config::{EsdPlan, RunConfig};
use crate::error::CliError;
use crate::format::{fmt_g, pair_column, simulate_csv, sweep_csv};
use crate::svg::{line_chart, Series};

/// Largest register simulated through the full density matrix; above it
/// `simulate` uses the closed forms.
pub const MATRIX_ROUTE_MAX_QUBITS: usize = 10;

pub struct Outcome {
    /// Human-readable report for stdout.
    pub report: String,
    /// Nonzero when the command ran but its check failed.
    pub exit_code: i32,
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn state_name(cfg: &RunConfig) -> &'static str {
    match cfg.kind() {
        fiberent::states::StateKind::Ghz => "ghz",
        fiberent::states::StateKind::W => "w",
    }
}

fn effect_name(cfg: &RunConfig) -> &'static str {
    match cfg.effect() {
        fiberent::channels::Effect::Pmd => "pmd",
        fiberent::channels::Effect::Pdl => "pdl",
    }
}

fn header(cfg: &RunConfig) -> String {
    format!("{} state, N = {}, {}\n", cfg.kind(), cfg.n_qubits, cfg.effect())
}

/// Metrics for the configured network.
pub fn simulate_report(cfg: &RunConfig) -> Result<MetricsReport, CliError> {
    let network = cfg.network()?;
    let kind = cfg.kind();
    if cfg.n_qubits <= MATRIX_ROUTE_MAX_QUBITS {
        let state = PureState::of_kind(kind, cfg.n_qubits)?;
        let rho = apply_channel(&state, &network)?;
        Ok(evaluate(&rho, &witness_spec(kind, cfg.n_qubits)?)?)
    } else {
        Ok(closed_form_report(&network, kind)?)
    }
}

pub fn simulate(cfg: &RunConfig, out: Option<&Path>) -> Result<Outcome, CliError> {
    let report = simulate_report(cfg)?;
    let pure = witness_spec(cfg.kind(), cfg.n_qubits)?.pure_value();
    let dsf = (report.witness_value - pure).abs() <= DSF_TOL;
    let csv = simulate_csv(state_name(cfg), effect_name(cfg), &report, dsf);

    let mut text = header(cfg);
    text += &format!("witness   {}\n", fmt_g(report.witness_value));
    text += &format!("fidelity  {}\n", fmt_g(report.fidelity));
    for (&(i, j), c) in &report.pair_concurrences {
        text += &format!("{:<9} {}\n", pair_column(i, j, cfg.n_qubits), fmt_g(*c));
    }
    text += &format!("esd       {}\n", report.esd_flag);
    text += &format!("dsf       {dsf}\n");
    match out {
        Some(path) => write_file(path, &csv)?,
        None => text += &format!("\n{csv}"),
    }
    Ok(Outcome { report: text, exit_code: 0 })
}

/// Output path for one series: `<stem>_<label>.<ext>` when several series
/// share one `--out`.
pub fn series_path(out: &Path, label: &str) -> PathBuf {
    if label.is_empty() {
        return out.to_path_buf();
    }
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}_{label}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{label}"),
    };
    out.with_file_name(name)
}

pub fn sweep(cfg: &RunConfig, out: Option<&Path>, svg: Option<&Path>) -> Result<Outcome, CliError> {
    let plan = cfg.sweep_plan()?;
    let kind = cfg.kind();
    let multi = plan.series.len() > 1 || !plan.series[0].label.is_empty();
    if out.is_none() && multi {
        return Err(CliError::Config("sweep: several series need --out".into()));
    }

    let mut text = header(cfg);
    let mut results = Vec::with_capacity(plan.series.len());
    for s in &plan.series {
        let r = analysis::sweep(&s.network, kind, s.target, &plan.grid)?;
        let csv = sweep_csv(&r, cfg.n_qubits);
        let name = if s.label.is_empty() { "sweep" } else { &s.label };
        let first_esd = r.values.iter().zip(&r.esd).find(|(_, e)| **e).map(|(v, _)| *v);
        text += &format!(
            "{name}: {} over {} points in [{}, {}], witness {}, esd {}\n",
            r.parameter,
            r.len(),
            fmt_g(plan.grid[0]),
            fmt_g(plan.grid[plan.grid.len() - 1]),
            r.monotonicity,
            first_esd.map_or("never".to_string(), |v| format!("from {}", fmt_g(v))),
        );
        match out {
            Some(path) => write_file(&series_path(path, &s.label), &csv)?,
            None => text += &format!("\n{csv}"),
        }
        results.push(r);
    }

    if let Some(path) = svg {
        let neg: Vec<Vec<f64>> = results.iter().map(|r| r.neg_witness()).collect();
        let series: Vec<Series> = plan
            .series
            .iter()
            .zip(&results)
            .zip(&neg)
            .map(|((s, r), y)| Series {
                label: if s.label.is_empty() { "-V" } else { &s.label },
                x: &r.values,
                y,
            })
            .collect();
        // Series may scan different parameters; name the axis after all of them.
        let mut x_labels: Vec<&str> = results.iter().map(|r| r.parameter.as_str()).collect();
        x_labels.dedup();
        write_file(path, &line_chart(&series, &x_labels.join(" / "), "-V"))?;
    }
    Ok(Outcome { report: text, exit_code: 0 })
}

pub fn esd(cfg: &RunConfig, out: Option<&Path>) -> Result<Outcome, CliError> {
    let network = cfg.network()?;
    let kind = cfg.kind();
    let plan = cfg.esd_plan()?;
    let threshold = match plan {
        EsdPlan::Bracket { target, lo, hi } => esd_threshold(&EsdQuery {
            kind,
            config: network.clone(),
            target,
            bracket: (lo, hi),
        })?,
        EsdPlan::Expand { target, limit } => find_esd(kind, &network, target, limit)?,
    };
    let parameter = plan.target().label(network.effect);
    let value = threshold.map_or("none".to_string(), fmt_g);
    let mut text = header(cfg);
    text += &format!("parameter {parameter}\nthreshold {value}\n");
    if let Some(path) = out {
        write_file(path, &format!("parameter,threshold\n{parameter},{value}\n"))?;
    }
    Ok(Outcome { report: text, exit_code: 0 })
}

pub fn dsf(cfg: &RunConfig, out: Option<&Path>) -> Result<Outcome, CliError> {
    let r = dsf_check(&cfg.network()?, cfg.kind())?;
    let mut text = header(cfg);
    text += &format!(
        "witness   {}\npure      {}\ndsf       {}\n",
        fmt_g(r.witness_value),
        fmt_g(r.pure_value),
        r.is_dsf
    );
    if let Some(path) = out {
        write_file(
            path,
            &format!("witness,pure,dsf\n{},{},{}\n", fmt_g(r.witness_value), fmt_g(r.pure_value), r.is_dsf),
        )?;
    }
    Ok(Outcome { report: text, exit_code: 0 })
}

/// Analytic PMD output against the frequency-grid brute force. A deviation
/// above tolerance exits with the numerical-failure code.
pub fn oracle_compare(cfg: &RunConfig, out: Option<&Path>) -> Result<Outcome, CliError> {
    if cfg.effect() != fiberent::channels::Effect::Pmd {
        return Err(CliError::Config("effect: oracle-compare needs \"pmd\"".into()));
    }
    if cfg.n_qubits > MAX_GRID_QUBITS {
        return Err(CliError::Config(format!(
            "n_qubits: oracle-compare supports at most {MAX_GRID_QUBITS}, got {}",
            cfg.n_qubits
        )));
    }
    let grid = cfg.oracle_grid()?;
    let state = PureState::of_kind(cfg.kind(), cfg.n_qubits)?;
    let cmp = compare_pmd(&state, &cfg.network()?, &grid)?;
    let verdict = if cmp.passed { "pass" } else { "fail" };
    let mut text = header(cfg);
    text += &format!(
        "grid      {} points, half-width {}, {}\nmax |analytic - grid| {:e}\n{verdict} (tolerance {ORACLE_TOL:e})\n",
        grid.points,
        fmt_g(grid.half_width),
        if grid.correlated { "correlated" } else { "uncorrelated" },
        cmp.max_deviation,
    );
    if let Some(path) = out {
        write_file(path, &format!("max_deviation,passed\n{},{}\n", fmt_g(cmp.max_deviation), cmp.passed))?;
    }
    Ok(Outcome {
        report: text,
        exit_code: if cmp.passed { 0 } else { 3 },
    })
}
