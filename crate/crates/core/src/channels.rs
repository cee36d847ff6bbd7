//! Fiber channels with first-order polarization mode dispersion (PMD) or
//! polarization-dependent loss (PDL), one fiber per photon.
//!
//! Both effects are modeled with their principal axes aligned to the
//! computational basis, so each channel is diagonal: PMD delays `|0⟩`
//! against `|1⟩` by the differential group delay (DGD) `τ`, and PDL scales
//! `|0⟩` by `e^{γ/2}` and `|1⟩` by `e^{−γ/2}`. A sign of −1 flips the
//! channel's vector relative to the shared basis.
//!
//! Tracing the PMD output over frequency turns every coherence
//! `ρ[b][b']` into `ρ[b][b'] · R(d ∘ s ∘ τ)` with `d_i = b_i − b'_i`, where `R`
//! is the characteristic function of the photons' joint spectrum.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qlinalg::{qubit_bit, ComplexMatrix, DensityMatrix};
use crate::states::PureState;

/// Shape of the joint spectral density of the photons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpectrumKind {
    /// Independent Gaussian spectra with rms widths `Δω_i`.
    UncorrelatedGaussian,
    /// Gaussian spectra constrained by a monochromatic pump, `Σ ω_i = 0`.
    CwPumpCorrelated,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralModel {
    pub kind: SpectrumKind,
    /// Per-photon rms bandwidths `Δω_i`.
    pub bandwidths: Vec<f64>,
}

impl SpectralModel {
    pub fn uncorrelated(bandwidths: Vec<f64>) -> Self {
        SpectralModel {
            kind: SpectrumKind::UncorrelatedGaussian,
            bandwidths,
        }
    }

    pub fn correlated(bandwidths: Vec<f64>) -> Self {
        SpectralModel {
            kind: SpectrumKind::CwPumpCorrelated,
            bandwidths,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.bandwidths.len() != n {
            return Err(Error::Dimension(format!(
                "spectrum lists {} bandwidths for {n} photons",
                self.bandwidths.len()
            )));
        }
        check_bandwidths(&self.bandwidths)
    }

    /// Spectral overlap `R` at the given signed delays.
    pub fn r(&self, signed_taus: &[f64]) -> Result<f64> {
        match self.kind {
            SpectrumKind::UncorrelatedGaussian => r_uncorrelated(signed_taus, &self.bandwidths),
            SpectrumKind::CwPumpCorrelated => r_correlated(signed_taus, &self.bandwidths),
        }
    }
}

/// Orientation of a channel's PMD or PDL vector relative to the basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Alignment {
    #[default]
    Aligned,
    AntiAligned,
}

impl Alignment {
    pub fn sign(self) -> f64 {
        match self {
            Alignment::Aligned => 1.0,
            Alignment::AntiAligned => -1.0,
        }
    }

    pub fn from_sign(s: i32) -> Result<Self> {
        match s {
            1 => Ok(Alignment::Aligned),
            -1 => Ok(Alignment::AntiAligned),
            other => Err(Error::Parameter(format!("sign must be +1 or -1, got {other}"))),
        }
    }
}

/// Per-photon fiber: DGD `τ ≥ 0` and loss coefficient `γ ≥ 0` (nepers).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct FiberChannel {
    pub dgd: f64,
    pub dgd_sign: Alignment,
    pub pdl: f64,
    pub pdl_sign: Alignment,
}

impl FiberChannel {
    pub fn pmd(dgd: f64) -> Self {
        FiberChannel {
            dgd,
            ..Default::default()
        }
    }

    pub fn pdl(pdl: f64) -> Self {
        FiberChannel {
            pdl,
            ..Default::default()
        }
    }

    pub fn with_pdl_sign(mut self, sign: Alignment) -> Self {
        self.pdl_sign = sign;
        self
    }

    pub fn with_dgd_sign(mut self, sign: Alignment) -> Self {
        self.dgd_sign = sign;
        self
    }

    pub fn signed_dgd(&self) -> f64 {
        self.dgd_sign.sign() * self.dgd
    }

    pub fn signed_pdl(&self) -> f64 {
        self.pdl_sign.sign() * self.pdl
    }

    fn validate(&self, idx: usize) -> Result<()> {
        for (name, v) in [("dgd", self.dgd), ("pdl", self.pdl)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Parameter(format!(
                    "channel {idx}: {name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Which channel effect a configuration exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Effect {
    Pmd,
    Pdl,
}

impl Effect {
    pub fn name(self) -> &'static str {
        match self {
            Effect::Pmd => "PMD",
            Effect::Pdl => "PDL",
        }
    }
}

impl fmt::Display for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One fiber per photon plus the photons' spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkConfig {
    pub n_qubits: usize,
    pub channels: Vec<FiberChannel>,
    pub spectrum: SpectralModel,
    pub effect: Effect,
}

impl NetworkConfig {
    pub fn new(channels: Vec<FiberChannel>, spectrum: SpectralModel, effect: Effect) -> Result<Self> {
        let cfg = NetworkConfig {
            n_qubits: channels.len(),
            channels,
            spectrum,
            effect,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// PMD network with aligned channels.
    pub fn pmd(dgds: &[f64], spectrum: SpectralModel) -> Result<Self> {
        Self::new(dgds.iter().map(|&t| FiberChannel::pmd(t)).collect(), spectrum, Effect::Pmd)
    }

    /// PDL network with the given signed loss coefficients; a negative entry
    /// means an anti-aligned channel of magnitude `|γ|`.
    pub fn pdl(signed_gammas: &[f64]) -> Result<Self> {
        let channels = signed_gammas
            .iter()
            .map(|&g| {
                let sign = if g < 0.0 {
                    Alignment::AntiAligned
                } else {
                    Alignment::Aligned
                };
                FiberChannel::pdl(g.abs()).with_pdl_sign(sign)
            })
            .collect::<Vec<_>>();
        let n = channels.len();
        Self::new(channels, SpectralModel::uncorrelated(vec![1.0; n]), Effect::Pdl)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=crate::states::MAX_QUBITS).contains(&self.n_qubits) {
            return Err(Error::QubitCount(self.n_qubits));
        }
        if self.channels.len() != self.n_qubits {
            return Err(Error::Dimension(format!(
                "{} channels for {} photons",
                self.channels.len(),
                self.n_qubits
            )));
        }
        for (i, ch) in self.channels.iter().enumerate() {
            ch.validate(i)?;
        }
        self.spectrum.validate(self.n_qubits)
    }

    pub fn signed_dgds(&self) -> Vec<f64> {
        self.channels.iter().map(FiberChannel::signed_dgd).collect()
    }

    pub fn signed_pdls(&self) -> Vec<f64> {
        self.channels.iter().map(FiberChannel::signed_pdl).collect()
    }
}

fn check_bandwidths(bandwidths: &[f64]) -> Result<()> {
    match bandwidths.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        Some(w) => Err(Error::Parameter(format!("bandwidth must be positive, got {w}"))),
        None => Ok(()),
    }
}

fn check_lengths(taus: &[f64], bandwidths: &[f64]) -> Result<()> {
    if taus.len() != bandwidths.len() {
        return Err(Error::Dimension(format!(
            "{} delays for {} bandwidths",
            taus.len(),
            bandwidths.len()
        )));
    }
    if let Some(t) = taus.iter().find(|t| !t.is_finite()) {
        return Err(Error::Parameter(format!("delay must be finite, got {t}")));
    }
    check_bandwidths(bandwidths)
}

/// `R = exp(−Σ Δω_i² τ_i² / 2)` for independent Gaussian spectra.
pub fn r_uncorrelated(signed_taus: &[f64], bandwidths: &[f64]) -> Result<f64> {
    check_lengths(signed_taus, bandwidths)?;
    let exponent: f64 = signed_taus
        .iter()
        .zip(bandwidths)
        .map(|(t, w)| (w * t).powi(2))
        .sum();
    Ok((-0.5 * exponent).exp())
}

/// `R` for pump-correlated Gaussian spectra:
/// `exp(−Σ_{i<j} Δω_i²Δω_j²(τ_i−τ_j)² / (2 Σ_i Δω_i²))`.
///
/// Only differences of delays enter, so a common delay on every photon
/// leaves `R = 1`.
pub fn r_correlated(signed_taus: &[f64], bandwidths: &[f64]) -> Result<f64> {
    check_lengths(signed_taus, bandwidths)?;
    let n = signed_taus.len();
    if n < 2 {
        return Err(Error::Dimension("correlated spectrum needs at least two photons".into()));
    }
    let var: Vec<f64> = bandwidths.iter().map(|w| w * w).collect();
    let total: f64 = var.iter().sum();
    let mut num = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            num += var[i] * var[j] * (signed_taus[i] - signed_taus[j]).powi(2);
        }
    }
    Ok((-num / (2.0 * total)).exp())
}

fn check_state(state: &PureState, config: &NetworkConfig, effect: Effect) -> Result<()> {
    config.validate()?;
    if config.effect != effect {
        return Err(Error::EffectMismatch {
            expected: effect.name(),
            found: config.effect.name(),
        });
    }
    if state.n_qubits() != config.n_qubits {
        return Err(Error::Dimension(format!(
            "{}-qubit state on a {}-photon network",
            state.n_qubits(),
            config.n_qubits
        )));
    }
    Ok(())
}

fn support(amps: &[Complex64]) -> Vec<usize> {
    (0..amps.len()).filter(|&i| amps[i].norm() > 0.0).collect()
}

/// Output state of the PMD network, traced over the frequency modes.
pub fn apply_pmd(state: &PureState, config: &NetworkConfig) -> Result<DensityMatrix> {
    check_state(state, config, Effect::Pmd)?;
    let n = config.n_qubits;
    let taus = config.signed_dgds();
    let amps = state.amplitudes();
    let idx = support(amps);
    let mut m = ComplexMatrix::zeros(state.dim(), state.dim());
    let mut delays = vec![0.0; n];
    for &row in &idx {
        for &col in &idx {
            for (q, d) in delays.iter_mut().enumerate() {
                let diff = qubit_bit(row, q, n) as f64 - qubit_bit(col, q, n) as f64;
                *d = diff * taus[q];
            }
            let r = if row == col { 1.0 } else { config.spectrum.r(&delays)? };
            m[(row, col)] = amps[row] * amps[col].conj() * r;
        }
    }
    DensityMatrix::new(n, m)
}

/// Output state of the PDL network, renormalized to unit trace.
///
/// Amplitudes are rescaled in log space relative to the largest exponent so
/// loss coefficients in the hundreds stay finite.
pub fn apply_pdl(state: &PureState, config: &NetworkConfig) -> Result<DensityMatrix> {
    check_state(state, config, Effect::Pdl)?;
    let amps = pdl_amplitudes(state, &config.signed_pdls());
    let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let scaled: Vec<Complex64> = amps.iter().map(|a| a / norm_sqr.sqrt()).collect();
    DensityMatrix::normalized(config.n_qubits, ComplexMatrix::outer(&scaled, &scaled))
}

/// Unnormalized filtered amplitudes, divided by `e^{max exponent}`.
fn pdl_amplitudes(state: &PureState, gammas: &[f64]) -> Vec<Complex64> {
    let n = state.n_qubits();
    let amps = state.amplitudes();
    let log_gain = |b: usize| -> f64 {
        (0..n)
            .map(|q| gammas[q] * (1.0 - 2.0 * qubit_bit(b, q, n) as f64) / 2.0)
            .sum()
    };
    let logs: Vec<Option<f64>> = amps
        .iter()
        .enumerate()
        .map(|(b, a)| (a.norm() > 0.0).then(|| log_gain(b)))
        .collect();
    let max = logs.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    amps.iter()
        .zip(&logs)
        .map(|(a, l)| match l {
            Some(l) => a * (l - max).exp(),
            None => Complex64::new(0.0, 0.0),
        })
        .collect()
}

/// Dispatches on `config.effect`.
pub fn apply_channel(state: &PureState, config: &NetworkConfig) -> Result<DensityMatrix> {
    match config.effect {
        Effect::Pmd => apply_pmd(state, config),
        Effect::Pdl => apply_pdl(state, config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{ghz_state, w_state};
    use approx::assert_abs_diff_eq;

    #[test]
    fn r_uncorrelated_values() {
        let w = [1.0, 1.0, 1.0];
        assert_eq!(r_uncorrelated(&[0.0; 3], &w).unwrap(), 1.0);
        assert_abs_diff_eq!(r_uncorrelated(&[1.0, 0.0, 0.0], &w).unwrap(), 0.606531, epsilon = 1e-6);
        assert_abs_diff_eq!(r_uncorrelated(&[1.0, -1.0, 1.0], &w).unwrap(), 0.223130, epsilon = 1e-6);
        assert!(matches!(r_uncorrelated(&[1.0], &w), Err(Error::Dimension(_))));
        assert!(r_uncorrelated(&[1.0], &[0.0]).is_err());
    }

    #[test]
    fn r_correlated_values() {
        let w = [1.0, 1.0, 1.0];
        for t in [-3.0, 0.0, 0.4, 17.0] {
            assert_eq!(r_correlated(&[t, t, t], &w).unwrap(), 1.0);
        }
        assert_abs_diff_eq!(r_correlated(&[1.0, 0.0, 0.0], &w).unwrap(), 0.716531, epsilon = 1e-6);
        assert_abs_diff_eq!(
            r_correlated(&[1.0, 0.0, 0.0], &[1.0, 2.0, 1.0]).unwrap(),
            (-5.0f64 / 12.0).exp(),
            epsilon = 1e-15
        );
        assert!(r_correlated(&[1.0], &[1.0]).is_err());
        assert!(r_correlated(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn pmd_ghz3_corner_elements() {
        let cfg = NetworkConfig::pmd(&[1.0, 1.0, 1.0], SpectralModel::uncorrelated(vec![1.0; 3])).unwrap();
        let rho = apply_pmd(&ghz_state(3).unwrap(), &cfg).unwrap();
        let r = (-1.5f64).exp();
        assert_abs_diff_eq!(rho.get(7, 0).re, 0.5 * r, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.get(0, 7).re, 0.5 * r, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.get(0, 0).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.get(7, 7).re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn pmd_w3_element_uses_signed_delays() {
        let taus = [0.3, 0.8, 1.1];
        let spec = SpectralModel::correlated(vec![1.0, 2.0, 0.5]);
        let cfg = NetworkConfig::pmd(&taus, spec.clone()).unwrap();
        let rho = apply_pmd(&w_state(3).unwrap(), &cfg).unwrap();
        // row |010⟩, column |001⟩
        let expected = spec.r(&[0.0, taus[1], -taus[2]]).unwrap() / 3.0;
        assert_abs_diff_eq!(rho.get(2, 1).re, expected, epsilon = 1e-15);
    }

    #[test]
    fn zero_parameters_are_identity_channels() {
        for n in 2..=5 {
            for psi in [ghz_state(n).unwrap(), w_state(n).unwrap()] {
                let pure = psi.density_matrix();
                let pmd = NetworkConfig::pmd(&vec![0.0; n], SpectralModel::uncorrelated(vec![1.0; n])).unwrap();
                assert_eq!(apply_pmd(&psi, &pmd).unwrap().matrix().max_abs_diff(pure.matrix()), 0.0);
                let pdl = NetworkConfig::pdl(&vec![0.0; n]).unwrap();
                assert!(apply_pdl(&psi, &pdl).unwrap().matrix().max_abs_diff(pure.matrix()) < 1e-15);
            }
        }
    }

    #[test]
    fn effect_and_size_mismatch_rejected() {
        let pdl = NetworkConfig::pdl(&[0.1, 0.2, 0.3]).unwrap();
        assert!(matches!(
            apply_pmd(&ghz_state(3).unwrap(), &pdl),
            Err(Error::EffectMismatch { .. })
        ));
        assert!(matches!(apply_pdl(&ghz_state(4).unwrap(), &pdl), Err(Error::Dimension(_))));
    }

    #[test]
    fn config_validation() {
        assert!(NetworkConfig::pmd(&[1.0, -0.5], SpectralModel::uncorrelated(vec![1.0; 2])).is_err());
        assert!(NetworkConfig::pmd(&[1.0, 0.5], SpectralModel::uncorrelated(vec![1.0; 3])).is_err());
        assert!(NetworkConfig::pmd(&[1.0], SpectralModel::uncorrelated(vec![1.0])).is_err());
        assert!(NetworkConfig::pdl(&[f64::NAN, 1.0]).is_err());
        assert!(Alignment::from_sign(0).is_err());
        assert_eq!(Alignment::from_sign(-1).unwrap(), Alignment::AntiAligned);
    }

    #[test]
    fn pdl_survives_huge_loss() {
        let cfg = NetworkConfig::pdl(&[400.0, 0.0, 0.0]).unwrap();
        let rho = apply_pdl(&w_state(3).unwrap(), &cfg).unwrap();
        assert!(rho.matrix().is_finite());
        // |100⟩ carries e^{-γ} relative weight and vanishes
        assert_abs_diff_eq!(rho.get(4, 4).re, 0.0, epsilon = 1e-300);
        assert_abs_diff_eq!(rho.get(1, 2).re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn pdl_maps_product_states_to_product_states() {
        // |+⟩⊗|0⟩⊗|+⟩
        let mut amps = vec![Complex64::new(0.0, 0.0); 8];
        for b in [0b000, 0b001, 0b100, 0b101] {
            amps[b] = Complex64::new(0.5, 0.0);
        }
        let psi = PureState::new(amps).unwrap();
        let cfg = NetworkConfig::pdl(&[0.7, 1.3, -0.4]).unwrap();
        let rho = apply_pdl(&psi, &cfg).unwrap();
        let a = rho.partial_trace(&[0]).unwrap();
        let bc = rho.partial_trace(&[1, 2]).unwrap();
        let product = crate::qlinalg::kron(a.matrix(), bc.matrix());
        assert!(product.max_abs_diff(rho.matrix()) < 1e-14);
    }
}
