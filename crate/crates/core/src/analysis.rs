//! Threshold searches, decoherence-free checks and parameter sweeps built on
//! the closed-form metrics.

use std::fmt;

use crate::channels::{Effect, NetworkConfig};
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::metrics::{closed_form_report, is_esd, witness_closed_form, PairConcurrences};
use crate::states::{witness_constant, StateKind};

/// Absolute bracket width at which bisection stops.
pub const BISECTION_TOL: f64 = 1e-10;
pub const BISECTION_MAX_ITERS: usize = 200;
/// Default upper limit when growing a bracket from zero.
pub const DEFAULT_BRACKET_LIMIT: f64 = 50.0;
/// A witness within this distance of its pure-state value counts as unaffected.
pub const DSF_TOL: f64 = 1e-10;
/// Slack for the monotonicity classification.
pub const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChannelParam {
    Dgd,
    Pdl,
}

impl ChannelParam {
    pub fn active_for(effect: Effect) -> Self {
        match effect {
            Effect::Pmd => ChannelParam::Dgd,
            Effect::Pdl => ChannelParam::Pdl,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ChannelParam::Dgd => "dgd",
            ChannelParam::Pdl => "pdl",
        }
    }
}

/// What a scan varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScanTarget {
    /// One channel parameter of one photon, set to the scan value.
    Channel { photon: usize, param: ChannelParam },
    /// The active parameter of every channel, multiplied by the scan value.
    /// A base of `τ = (1, 1, 0)` scanned to `t` gives `(t, t, 0)`.
    Scale,
}

impl ScanTarget {
    /// Base configuration with the scan value substituted.
    pub fn apply(&self, base: &NetworkConfig, value: f64) -> Result<NetworkConfig> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::Parameter(format!("scan value must be finite and non-negative, got {value}")));
        }
        let mut cfg = base.clone();
        match *self {
            ScanTarget::Channel { photon, param } => {
                let n = cfg.n_qubits;
                let ch = cfg.channels.get_mut(photon).ok_or_else(|| {
                    Error::Parameter(format!("photon {photon} out of range for {n} photons"))
                })?;
                match param {
                    ChannelParam::Dgd => ch.dgd = value,
                    ChannelParam::Pdl => ch.pdl = value,
                }
            }
            ScanTarget::Scale => {
                for ch in cfg.channels.iter_mut() {
                    match base.effect {
                        Effect::Pmd => ch.dgd *= value,
                        Effect::Pdl => ch.pdl *= value,
                    }
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn label(&self, effect: Effect) -> String {
        match *self {
            ScanTarget::Channel { photon, param } => format!("{}[{photon}]", param.name()),
            ScanTarget::Scale => format!("scale({})", ChannelParam::active_for(effect).name()),
        }
    }
}

/// Search for the parameter value at which the witness stops detecting
/// entanglement.
#[derive(Clone, Debug, PartialEq)]
pub struct EsdQuery {
    pub kind: StateKind,
    pub config: NetworkConfig,
    pub target: ScanTarget,
    pub bracket: (f64, f64),
}

fn check_bracket(lo: f64, hi: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi && lo >= 0.0) {
        return Err(Error::Bracket { lo, hi });
    }
    Ok(())
}

/// Bisection on a change of `f` between detecting (`f < 0`) and not
/// detecting entanglement (see [`is_esd`]).
///
/// Returns `None` if both endpoints fall on the same side.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64) -> Result<Option<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    check_bracket(lo, hi)?;
    let (mut lo, mut hi) = (lo, hi);
    let lo_dead = is_esd(f(lo)?);
    if lo_dead == is_esd(f(hi)?) {
        return Ok(None);
    }
    for _ in 0..BISECTION_MAX_ITERS {
        if hi - lo <= BISECTION_TOL {
            return Ok(Some(0.5 * (lo + hi)));
        }
        let mid = 0.5 * (lo + hi);
        if is_esd(f(mid)?) == lo_dead {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence(BISECTION_MAX_ITERS))
}

/// Witness as a function of the scan value.
fn witness_at(kind: StateKind, config: &NetworkConfig, target: ScanTarget, value: f64) -> Result<f64> {
    witness_closed_form(&target.apply(config, value)?, kind)
}

/// Scan value at which the witness reaches zero, or `None` if it keeps the
/// same sign over the whole bracket.
pub fn esd_threshold(q: &EsdQuery) -> Result<Option<f64>> {
    let (lo, hi) = q.bracket;
    bisect(|t| witness_at(q.kind, &q.config, q.target, t), lo, hi)
}

/// Grows `[0, hi]` geometrically from `hi = 1` until the witness changes sign
/// or `limit` is reached.
pub fn expand_bracket(kind: StateKind, config: &NetworkConfig, target: ScanTarget, limit: f64) -> Result<Option<(f64, f64)>> {
    check_bracket(0.0, limit)?;
    let dead0 = is_esd(witness_at(kind, config, target, 0.0)?);
    let (mut lo, mut hi) = (0.0, 1.0f64.min(limit));
    loop {
        if is_esd(witness_at(kind, config, target, hi)?) != dead0 {
            return Ok(Some((lo, hi)));
        }
        if hi >= limit {
            return Ok(None);
        }
        lo = hi;
        hi = (hi * 2.0).min(limit);
    }
}

/// [`esd_threshold`] over a bracket found by [`expand_bracket`].
pub fn find_esd(kind: StateKind, config: &NetworkConfig, target: ScanTarget, limit: f64) -> Result<Option<f64>> {
    match expand_bracket(kind, config, target, limit)? {
        Some(bracket) => esd_threshold(&EsdQuery {
            kind,
            config: config.clone(),
            target,
            bracket,
        }),
        None => Ok(None),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DsfResult {
    pub is_dsf: bool,
    pub witness_value: f64,
    pub pure_value: f64,
}

/// Whether the channel leaves the witness at its pure-state value.
pub fn dsf_check(config: &NetworkConfig, kind: StateKind) -> Result<DsfResult> {
    let witness_value = witness_closed_form(config, kind)?;
    let pure_value = witness_constant(kind, config.n_qubits) - 1.0;
    Ok(DsfResult {
        is_dsf: (witness_value - pure_value).abs() <= DSF_TOL,
        witness_value,
        pure_value,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Constant,
    Mixed,
}

impl fmt::Display for Monotonicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Monotonicity::Increasing => "increasing",
            Monotonicity::Decreasing => "decreasing",
            Monotonicity::Constant => "constant",
            Monotonicity::Mixed => "mixed",
        })
    }
}

/// Classifies a series. Steps within `MONOTONE_SLACK` count as flat; a
/// series is increasing if it never steps down and steps up at least once.
pub fn classify(series: &[f64]) -> Monotonicity {
    let mut up = false;
    let mut down = false;
    for w in series.windows(2) {
        let d = w[1] - w[0];
        if d > MONOTONE_SLACK {
            up = true;
        } else if d < -MONOTONE_SLACK {
            down = true;
        }
    }
    match (up, down) {
        (false, false) => Monotonicity::Constant,
        (true, false) => Monotonicity::Increasing,
        (false, true) => Monotonicity::Decreasing,
        (true, true) => Monotonicity::Mixed,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub parameter: String,
    pub values: Vec<f64>,
    pub witness: Vec<f64>,
    pub fidelity: Vec<f64>,
    pub concurrences: Vec<PairConcurrences>,
    pub esd: Vec<bool>,
    pub dsf: Vec<bool>,
    /// Shape of the witness series.
    pub monotonicity: Monotonicity,
}

impl SweepResult {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `−V` per point, the quantity usually plotted.
    pub fn neg_witness(&self) -> Vec<f64> {
        self.witness.iter().map(|v| -v).collect()
    }
}

/// `points` evenly spaced values from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (points - 1) as f64;
            (0..points)
                .map(|i| if i + 1 == points { stop } else { start + step * i as f64 })
                .collect()
        }
    }
}

pub fn sweep(config: &NetworkConfig, kind: StateKind, target: ScanTarget, grid: &[f64]) -> Result<SweepResult> {
    sweep_with_mode(ExecMode::default(), config, kind, target, grid)
}

/// Evaluates the closed-form metrics at every grid point. Points are
/// independent; the output follows grid order whatever the mode.
pub fn sweep_with_mode(
    mode: ExecMode,
    config: &NetworkConfig,
    kind: StateKind,
    target: ScanTarget,
    grid: &[f64],
) -> Result<SweepResult> {
    if grid.len() < 2 {
        return Err(Error::Parameter(format!("sweep needs at least 2 points, got {}", grid.len())));
    }
    if let Some(w) = grid.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::Parameter(format!(
            "sweep grid must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    config.validate()?;
    let pure = witness_constant(kind, config.n_qubits) - 1.0;
    let points = exec::map_slice(mode, grid, |&value| {
        let cfg = target.apply(config, value)?;
        closed_form_report(&cfg, kind)
    });

    let mut result = SweepResult {
        parameter: target.label(config.effect),
        values: grid.to_vec(),
        witness: Vec::with_capacity(grid.len()),
        fidelity: Vec::with_capacity(grid.len()),
        concurrences: Vec::with_capacity(grid.len()),
        esd: Vec::with_capacity(grid.len()),
        dsf: Vec::with_capacity(grid.len()),
        monotonicity: Monotonicity::Constant,
    };
    for report in points {
        let report = report?;
        result.dsf.push((report.witness_value - pure).abs() <= DSF_TOL);
        result.witness.push(report.witness_value);
        result.fidelity.push(report.fidelity);
        result.esd.push(report.esd_flag);
        result.concurrences.push(report.pair_concurrences);
    }
    result.monotonicity = classify(&result.witness);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::SpectralModel;
    use approx::assert_abs_diff_eq;

    fn unc(n: usize) -> SpectralModel {
        SpectralModel::uncorrelated(vec![1.0; n])
    }

    #[test]
    fn w_pmd_uniform_threshold() {
        let cfg = NetworkConfig::pmd(&[1.0; 3], unc(3)).unwrap();
        let q = EsdQuery {
            kind: StateKind::W,
            config: cfg,
            target: ScanTarget::Scale,
            bracket: (0.0, 5.0),
        };
        let t = esd_threshold(&q).unwrap().unwrap();
        assert_abs_diff_eq!(t, 2f64.ln().sqrt(), epsilon = 1e-9);
    }

    #[test]
    fn w_pdl_two_channel_threshold() {
        let cfg = NetworkConfig::pdl(&[1.0, 1.0, 0.0]).unwrap();
        let g = find_esd(StateKind::W, &cfg, ScanTarget::Scale, DEFAULT_BRACKET_LIMIT)
            .unwrap()
            .unwrap();
        assert_abs_diff_eq!(g, 4f64.ln(), epsilon = 1e-9);
    }

    #[test]
    fn ghz_never_dies() {
        let pmd = NetworkConfig::pmd(&[1.0; 3], unc(3)).unwrap();
        let pdl = NetworkConfig::pdl(&[1.0; 3]).unwrap();
        for cfg in [pmd, pdl] {
            let q = EsdQuery {
                kind: StateKind::Ghz,
                config: cfg.clone(),
                target: ScanTarget::Scale,
                bracket: (0.0, 30.0),
            };
            assert_eq!(esd_threshold(&q).unwrap(), None);
            assert_eq!(find_esd(StateKind::Ghz, &cfg, ScanTarget::Scale, 50.0).unwrap(), None);
        }
    }

    #[test]
    fn invalid_brackets() {
        let cfg = NetworkConfig::pdl(&[1.0; 3]).unwrap();
        for bracket in [(1.0, 1.0), (2.0, 1.0), (-1.0, 1.0), (0.0, f64::INFINITY)] {
            let q = EsdQuery {
                kind: StateKind::W,
                config: cfg.clone(),
                target: ScanTarget::Scale,
                bracket,
            };
            assert!(matches!(esd_threshold(&q), Err(Error::Bracket { .. })));
        }
    }

    #[test]
    fn dsf_examples() {
        let ghz = NetworkConfig::pmd(&[2.0; 3], SpectralModel::correlated(vec![1.0; 3])).unwrap();
        let r = dsf_check(&ghz, StateKind::Ghz).unwrap();
        assert!(r.is_dsf);
        assert_abs_diff_eq!(r.witness_value, -0.5, epsilon = 1e-15);

        let anti = NetworkConfig::pdl(&[-0.7, 0.3, 0.4]).unwrap();
        assert!(dsf_check(&anti, StateKind::Ghz).unwrap().is_dsf);

        let w = NetworkConfig::pmd(&[1.0, 1.0, 0.0], SpectralModel::correlated(vec![1.0; 3])).unwrap();
        assert!(!dsf_check(&w, StateKind::W).unwrap().is_dsf);
    }

    #[test]
    fn classify_series() {
        assert_eq!(classify(&[1.0, 1.0, 1.0]), Monotonicity::Constant);
        assert_eq!(classify(&[1.0, 2.0, 2.0]), Monotonicity::Increasing);
        assert_eq!(classify(&[3.0, 2.0, 1.0]), Monotonicity::Decreasing);
        assert_eq!(classify(&[1.0, 2.0, 1.0]), Monotonicity::Mixed);
        assert_eq!(classify(&[1.0, 1.0 + 1e-13]), Monotonicity::Constant);
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let cfg = NetworkConfig::pdl(&[0.0; 3]).unwrap();
        assert!(sweep(&cfg, StateKind::W, ScanTarget::Scale, &[1.0]).is_err());
        assert!(sweep(&cfg, StateKind::W, ScanTarget::Scale, &[1.0, 1.0]).is_err());
        assert!(sweep(&cfg, StateKind::W, ScanTarget::Scale, &[]).is_err());
        let target = ScanTarget::Channel {
            photon: 3,
            param: ChannelParam::Pdl,
        };
        assert!(sweep(&cfg, StateKind::W, target, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn single_channel_pmd_sweep_decays() {
        let cfg = NetworkConfig::pmd(&[0.0; 3], unc(3)).unwrap();
        let target = ScanTarget::Channel {
            photon: 0,
            param: ChannelParam::Dgd,
        };
        let res = sweep(&cfg, StateKind::Ghz, target, &linspace(0.0, 3.0, 31)).unwrap();
        assert_eq!(res.monotonicity, Monotonicity::Increasing);
        assert_abs_diff_eq!(res.witness[0], -0.5);
        assert!(res.dsf[0] && !res.dsf[1]);
        assert_eq!(res.parameter, "dgd[0]");
    }

    #[test]
    fn modes_give_identical_sweeps() {
        let cfg = NetworkConfig::pdl(&[1.0, 0.5, 0.0, 0.25]).unwrap();
        let grid = linspace(0.0, 6.0, 257);
        let a = sweep_with_mode(ExecMode::Sequential, &cfg, StateKind::W, ScanTarget::Scale, &grid).unwrap();
        let b = sweep_with_mode(ExecMode::Parallel, &cfg, StateKind::W, ScanTarget::Scale, &grid).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(0.0, 1.0, 11);
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[10], 1.0);
        assert_eq!(linspace(2.0, 3.0, 1), vec![2.0]);
    }
}
