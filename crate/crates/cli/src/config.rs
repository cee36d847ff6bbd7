//! Run configuration files (JSON) and their translation into library types.
//!
//! Parsing is strict: unknown fields are rejected, and every check that can
//! be made before running is made here so that a bad file fails with a
//! message naming the offending field.

use std::path::Path;

use serde::Deserialize;

use fiberent::analysis::{ChannelParam, ScanTarget, DEFAULT_BRACKET_LIMIT};
use fiberent::channels::{Alignment, Effect, FiberChannel, NetworkConfig, SpectralModel, SpectrumKind};
use fiberent::oracle::FrequencyGrid;
use fiberent::states::{StateKind, MAX_QUBITS};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateName {
    Ghz,
    W,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EffectName {
    Pmd,
    Pdl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumName {
    Uncorrelated,
    Correlated,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpec {
    pub kind: SpectrumName,
    pub bandwidths: Vec<f64>,
}

fn plus_one() -> i32 {
    1
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    #[serde(default)]
    pub dgd: f64,
    #[serde(default = "plus_one")]
    pub dgd_sign: i32,
    #[serde(default)]
    pub pdl: f64,
    #[serde(default = "plus_one")]
    pub pdl_sign: i32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamName {
    Dgd,
    Pdl,
}

/// `"scale"` or `{"photon": i, "param": "dgd" | "pdl"}`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum TargetSpec {
    Named(String),
    Channel { photon: usize, param: ParamName },
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSpec {
    pub label: String,
    pub channels: Option<Vec<ChannelSpec>>,
    pub spectrum: Option<SpectrumSpec>,
    pub target: Option<TargetSpec>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub target: Option<TargetSpec>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub points: Option<usize>,
    pub grid: Option<Vec<f64>>,
    #[serde(default)]
    pub series: Vec<SeriesSpec>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EsdSpec {
    pub target: Option<TargetSpec>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub limit: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    pub points: Option<usize>,
    pub half_width: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub state: StateName,
    pub n_qubits: usize,
    pub effect: EffectName,
    pub spectrum: Option<SpectrumSpec>,
    pub channels: Vec<ChannelSpec>,
    pub sweep: Option<SweepSpec>,
    pub esd: Option<EsdSpec>,
    pub oracle: Option<OracleSpec>,
}

/// One curve of a sweep, ready to run.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesPlan {
    /// Empty for the single unnamed series.
    pub label: String,
    pub network: NetworkConfig,
    pub target: ScanTarget,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPlan {
    pub grid: Vec<f64>,
    pub series: Vec<SeriesPlan>,
}

/// Either an explicit bracket or a search upward from zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EsdPlan {
    Bracket { target: ScanTarget, lo: f64, hi: f64 },
    Expand { target: ScanTarget, limit: f64 },
}

impl EsdPlan {
    pub fn target(&self) -> ScanTarget {
        match *self {
            EsdPlan::Bracket { target, .. } | EsdPlan::Expand { target, .. } => target,
        }
    }
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Parses and validates.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn kind(&self) -> StateKind {
        match self.state {
            StateName::Ghz => StateKind::Ghz,
            StateName::W => StateKind::W,
        }
    }

    pub fn effect(&self) -> Effect {
        match self.effect {
            EffectName::Pmd => Effect::Pmd,
            EffectName::Pdl => Effect::Pdl,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(2..=MAX_QUBITS).contains(&self.n_qubits) {
            return Err(invalid("n_qubits", format!("must be in 2..={MAX_QUBITS}, got {}", self.n_qubits)));
        }
        if self.effect == EffectName::Pmd && self.spectrum.is_none() {
            return Err(invalid("spectrum", "required for effect \"pmd\""));
        }
        self.network()?;
        if let Some(sweep) = &self.sweep {
            self.sweep_plan_from(sweep)?;
        }
        if let Some(esd) = &self.esd {
            self.esd_plan_from(esd)?;
        }
        if let Some(o) = &self.oracle {
            self.grid_from(o)?;
        }
        Ok(())
    }

    /// Base network described by the top-level fields.
    pub fn network(&self) -> Result<NetworkConfig, CliError> {
        self.network_with("", &self.channels, self.spectrum.as_ref())
    }

    fn network_with(
        &self,
        path: &str,
        channels: &[ChannelSpec],
        spectrum: Option<&SpectrumSpec>,
    ) -> Result<NetworkConfig, CliError> {
        let n = self.n_qubits;
        if channels.len() != n {
            return Err(invalid(
                &format!("{path}channels"),
                format!("expected {n} entries (n_qubits), got {}", channels.len()),
            ));
        }
        let mut out = Vec::with_capacity(n);
        for (i, ch) in channels.iter().enumerate() {
            let field = |name: &str| format!("{path}channels[{i}].{name}");
            for (name, v) in [("dgd", ch.dgd), ("pdl", ch.pdl)] {
                if !v.is_finite() || v < 0.0 {
                    return Err(invalid(&field(name), format!("must be finite and non-negative, got {v}")));
                }
            }
            let dgd_sign = Alignment::from_sign(ch.dgd_sign)
                .map_err(|_| invalid(&field("dgd_sign"), format!("must be 1 or -1, got {}", ch.dgd_sign)))?;
            let pdl_sign = Alignment::from_sign(ch.pdl_sign)
                .map_err(|_| invalid(&field("pdl_sign"), format!("must be 1 or -1, got {}", ch.pdl_sign)))?;
            out.push(FiberChannel {
                dgd: ch.dgd,
                dgd_sign,
                pdl: ch.pdl,
                pdl_sign,
            });
        }
        let spectrum = match spectrum {
            Some(s) => {
                let field = format!("{path}spectrum.bandwidths");
                if s.bandwidths.len() != n {
                    return Err(invalid(&field, format!("expected {n} entries, got {}", s.bandwidths.len())));
                }
                if let Some(w) = s.bandwidths.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
                    return Err(invalid(&field, format!("must be positive, got {w}")));
                }
                match s.kind {
                    SpectrumName::Uncorrelated => SpectralModel::uncorrelated(s.bandwidths.clone()),
                    SpectrumName::Correlated => SpectralModel::correlated(s.bandwidths.clone()),
                }
            }
            // Loss does not depend on frequency, so PDL runs need no spectrum.
            None => SpectralModel::uncorrelated(vec![1.0; n]),
        };
        NetworkConfig::new(out, spectrum, self.effect()).map_err(|e| invalid(path.trim_end_matches('.'), e))
    }

    fn target_from(&self, field: &str, spec: Option<&TargetSpec>) -> Result<ScanTarget, CliError> {
        match spec {
            None => Ok(ScanTarget::Scale),
            Some(TargetSpec::Named(s)) if s == "scale" => Ok(ScanTarget::Scale),
            Some(TargetSpec::Named(s)) => Err(invalid(field, format!("unknown target \"{s}\" (expected \"scale\" or {{photon, param}})"))),
            Some(TargetSpec::Channel { photon, param }) => {
                if *photon >= self.n_qubits {
                    return Err(invalid(
                        &format!("{field}.photon"),
                        format!("{photon} out of range for {} photons", self.n_qubits),
                    ));
                }
                let param = match param {
                    ParamName::Dgd => ChannelParam::Dgd,
                    ParamName::Pdl => ChannelParam::Pdl,
                };
                if param != ChannelParam::active_for(self.effect()) {
                    return Err(invalid(
                        &format!("{field}.param"),
                        format!("\"{}\" has no effect in a {} run", param.name(), self.effect()),
                    ));
                }
                Ok(ScanTarget::Channel { photon: *photon, param })
            }
        }
    }

    pub fn sweep_plan(&self) -> Result<SweepPlan, CliError> {
        let sweep = self.sweep.as_ref().ok_or_else(|| invalid("sweep", "block required for this command"))?;
        self.sweep_plan_from(sweep)
    }

    fn sweep_plan_from(&self, sweep: &SweepSpec) -> Result<SweepPlan, CliError> {
        let grid = match (&sweep.grid, sweep.start, sweep.stop, sweep.points) {
            (Some(g), None, None, None) => g.clone(),
            (None, Some(start), Some(stop), Some(points)) => {
                if !(start.is_finite() && stop.is_finite() && start < stop) {
                    return Err(invalid("sweep", format!("need finite start < stop, got {start} and {stop}")));
                }
                if points < 2 {
                    return Err(invalid("sweep.points", format!("need at least 2, got {points}")));
                }
                fiberent::analysis::linspace(start, stop, points)
            }
            _ => return Err(invalid("sweep", "give either \"grid\" or all of \"start\", \"stop\", \"points\"")),
        };
        if grid.len() < 2 {
            return Err(invalid("sweep.grid", format!("need at least 2 points, got {}", grid.len())));
        }
        if let Some(v) = grid.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(invalid("sweep.grid", format!("values must be finite and non-negative, got {v}")));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("sweep.grid", "must be strictly increasing"));
        }
        let base_target = self.target_from("sweep.target", sweep.target.as_ref())?;

        let mut series = Vec::new();
        if sweep.series.is_empty() {
            series.push(SeriesPlan {
                label: String::new(),
                network: self.network()?,
                target: base_target,
            });
        }
        for (i, s) in sweep.series.iter().enumerate() {
            let path = format!("sweep.series[{i}].");
            if s.label.is_empty() || !s.label.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
                return Err(invalid(
                    &format!("{path}label"),
                    format!("\"{}\" must be non-empty and use only letters, digits, '-' and '_'", s.label),
                ));
            }
            if sweep.series[..i].iter().any(|o| o.label == s.label) {
                return Err(invalid(&format!("{path}label"), format!("duplicate label \"{}\"", s.label)));
            }
            let channels = s.channels.as_deref().unwrap_or(&self.channels);
            let spectrum = s.spectrum.as_ref().or(self.spectrum.as_ref());
            let target = match &s.target {
                Some(t) => self.target_from(&format!("{path}target"), Some(t))?,
                None => base_target,
            };
            series.push(SeriesPlan {
                label: s.label.clone(),
                network: self.network_with(&path, channels, spectrum)?,
                target,
            });
        }
        Ok(SweepPlan { grid, series })
    }

    /// The `esd` block, or a search over the uniform scale when absent.
    pub fn esd_plan(&self) -> Result<EsdPlan, CliError> {
        match &self.esd {
            Some(esd) => self.esd_plan_from(esd),
            None => Ok(EsdPlan::Expand {
                target: ScanTarget::Scale,
                limit: DEFAULT_BRACKET_LIMIT,
            }),
        }
    }

    fn esd_plan_from(&self, esd: &EsdSpec) -> Result<EsdPlan, CliError> {
        let target = self.target_from("esd.target", esd.target.as_ref())?;
        match (esd.hi, esd.limit) {
            (Some(_), Some(_)) => Err(invalid("esd", "give either \"hi\" or \"limit\", not both")),
            (Some(hi), None) => {
                let lo = esd.lo.unwrap_or(0.0);
                if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) {
                    return Err(invalid("esd", format!("need 0 <= lo < hi, got [{lo}, {hi}]")));
                }
                Ok(EsdPlan::Bracket { target, lo, hi })
            }
            (None, limit) => {
                if esd.lo.is_some() {
                    return Err(invalid("esd.lo", "only meaningful together with \"hi\""));
                }
                let limit = limit.unwrap_or(DEFAULT_BRACKET_LIMIT);
                if !(limit.is_finite() && limit > 0.0) {
                    return Err(invalid("esd.limit", format!("must be positive, got {limit}")));
                }
                Ok(EsdPlan::Expand { target, limit })
            }
        }
    }

    /// Frequency grid for `oracle-compare`, correlated when the spectrum is.
    pub fn oracle_grid(&self) -> Result<FrequencyGrid, CliError> {
        match &self.oracle {
            Some(o) => self.grid_from(o),
            None => Ok(FrequencyGrid::default().with_correlated(self.correlated())),
        }
    }

    fn grid_from(&self, o: &OracleSpec) -> Result<FrequencyGrid, CliError> {
        let d = FrequencyGrid::default();
        FrequencyGrid::new(
            o.points.unwrap_or(d.points),
            o.half_width.unwrap_or(d.half_width),
            self.correlated(),
        )
        .map_err(|e| invalid("oracle", e))
    }

    fn correlated(&self) -> bool {
        self.spectrum
            .as_ref()
            .is_some_and(|s| s.kind == SpectrumName::Correlated)
    }
}

impl From<SpectrumKind> for SpectrumName {
    fn from(k: SpectrumKind) -> Self {
        match k {
            SpectrumKind::UncorrelatedGaussian => SpectrumName::Uncorrelated,
            SpectrumKind::CwPumpCorrelated => SpectrumName::Correlated,
        }
    }
}
