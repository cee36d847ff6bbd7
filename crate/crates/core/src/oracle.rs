//! Brute-force references for the analytic channel and concurrence code.
//!
//! The PMD channel is rebuilt by applying the frequency-dependent
//! transmission phases on an explicit frequency grid and summing the
//! resulting projectors with the spectral weights (midpoint rule). The X-state
//! formula gives an eigen-solver-free concurrence for the sparse two-qubit
//! reductions that occur here.

use num_complex::Complex64;

use crate::channels::{Effect, NetworkConfig, SpectrumKind};
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::qlinalg::{kron, qubit_bit, ComplexMatrix, DensityMatrix};
use crate::states::PureState;

pub const MIN_POINTS: usize = 41;
pub const MIN_HALF_WIDTH: f64 = 5.0;
/// Largest register the frequency-grid channel accepts.
pub const MAX_GRID_QUBITS: usize = 4;
/// Pass threshold for elementwise agreement with the analytic channel.
pub const ORACLE_TOL: f64 = 1e-6;
/// Free axes allowed in a correlated-spectrum quadrature.
const MAX_CORRELATED_AXES: usize = 5;

/// Midpoint-rule grid shared by every frequency axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrequencyGrid {
    /// Nodes per axis (odd, so one node sits at zero detuning).
    pub points: usize,
    /// Half-width of each axis in units of the largest bandwidth.
    pub half_width: f64,
    /// Enforce `Σ ω_i = 0` by eliminating the last frequency.
    pub correlated: bool,
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        FrequencyGrid {
            points: 201,
            half_width: 6.0,
            correlated: false,
        }
    }
}

impl FrequencyGrid {
    pub fn new(points: usize, half_width: f64, correlated: bool) -> Result<Self> {
        let g = FrequencyGrid {
            points,
            half_width,
            correlated,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < MIN_POINTS || self.points % 2 == 0 {
            return Err(Error::Parameter(format!(
                "grid needs an odd point count ≥ {MIN_POINTS}, got {}",
                self.points
            )));
        }
        if !(self.half_width.is_finite() && self.half_width >= MIN_HALF_WIDTH) {
            return Err(Error::Parameter(format!(
                "grid half-width must be ≥ {MIN_HALF_WIDTH}, got {}",
                self.half_width
            )));
        }
        Ok(())
    }

    pub fn with_correlated(mut self, correlated: bool) -> Self {
        self.correlated = correlated;
        self
    }

    fn nodes(&self, max_bandwidth: f64) -> Vec<f64> {
        let w = self.half_width * max_bandwidth;
        let h = 2.0 * w / self.points as f64;
        (0..self.points).map(|k| -w + (k as f64 + 0.5) * h).collect()
    }
}

/// Power spectrum `|f(ω)|² = exp(−ω²/(2Δω²))` of one photon.
fn power(omega: f64, bandwidth: f64) -> f64 {
    (-omega * omega / (2.0 * bandwidth * bandwidth)).exp()
}

fn check_inputs(taus: &[f64], bandwidths: &[f64], grid: &FrequencyGrid) -> Result<f64> {
    grid.validate()?;
    if taus.len() != bandwidths.len() || taus.is_empty() {
        return Err(Error::Dimension(format!(
            "{} delays for {} bandwidths",
            taus.len(),
            bandwidths.len()
        )));
    }
    if bandwidths.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::Parameter("bandwidths must be positive".into()));
    }
    if grid.correlated && taus.len() < 2 {
        return Err(Error::Dimension("correlated grid needs at least two photons".into()));
    }
    Ok(bandwidths.iter().copied().fold(0.0, f64::max))
}

/// Decodes a flat index into per-axis node indices (first axis slowest).
fn unravel(mut flat: usize, points: usize, axes: usize, out: &mut [usize]) {
    for a in (0..axes).rev() {
        out[a] = flat % points;
        flat /= points;
    }
}

/// Quadrature of `∫ |f̃(ω)|² e^{i Σ ω_i τ_i} dω`, normalized by the same
/// quadrature at zero delay.
///
/// Independent spectra use the tensor-product rule, which factorizes into
/// one-dimensional sums. Correlated spectra substitute `ω_N = −Σ_{i<N} ω_i`
/// and sum over the remaining `N − 1` axes.
pub fn grid_r(taus: &[f64], bandwidths: &[f64], grid: &FrequencyGrid) -> Result<f64> {
    grid_r_with_mode(ExecMode::default(), taus, bandwidths, grid)
}

pub fn grid_r_with_mode(mode: ExecMode, taus: &[f64], bandwidths: &[f64], grid: &FrequencyGrid) -> Result<f64> {
    let wmax = check_inputs(taus, bandwidths, grid)?;
    let nodes = grid.nodes(wmax);
    if !grid.correlated {
        let mut r = Complex64::new(1.0, 0.0);
        for (&tau, &bw) in taus.iter().zip(bandwidths) {
            let mut num = Complex64::new(0.0, 0.0);
            let mut den = 0.0;
            for &w in &nodes {
                let p = power(w, bw);
                num += Complex64::from_polar(p, w * tau);
                den += p;
            }
            r *= num / den;
        }
        return Ok(r.re);
    }

    let n = taus.len();
    let axes = n - 1;
    if axes > MAX_CORRELATED_AXES {
        return Err(Error::QubitCount(n));
    }
    let p = grid.points;
    let total = p.pow(axes as u32);
    let zero = Pair(Complex64::new(0.0, 0.0), 0.0);
    let Pair(num, den) = exec::ordered_sum(mode, total, zero, |flat| {
        let mut idx = [0usize; MAX_CORRELATED_AXES];
        unravel(flat, p, axes, &mut idx[..axes]);
        let mut last = 0.0;
        let mut weight = 1.0;
        let mut phase = 0.0;
        for a in 0..axes {
            let w = nodes[idx[a]];
            last -= w;
            weight *= power(w, bandwidths[a]);
            phase += w * taus[a];
        }
        weight *= power(last, bandwidths[n - 1]);
        phase += last * taus[n - 1];
        Pair(Complex64::from_polar(weight, phase), weight)
    });
    Ok((num / den).re)
}

/// Weighted phase sum and weight sum.
#[derive(Clone, Copy, Debug)]
struct Pair(Complex64, f64);

impl std::ops::Add for Pair {
    type Output = Pair;

    fn add(self, o: Pair) -> Pair {
        Pair(self.0 + o.0, self.1 + o.1)
    }
}

/// Single-photon PMD transmission `diag(e^{−iωτ/2}, e^{iωτ/2})`.
fn pmd_unitary(omega: f64, signed_tau: f64) -> ComplexMatrix {
    let half = 0.5 * omega * signed_tau;
    ComplexMatrix::from_diag(&[Complex64::from_polar(1.0, -half), Complex64::from_polar(1.0, half)])
}

/// Embeds a single-qubit operator on qubit `q` of an `n`-qubit register.
fn embed(op: &ComplexMatrix, q: usize, n: usize) -> ComplexMatrix {
    (0..n).fold(ComplexMatrix::identity(1), |acc, i| {
        if i == q {
            kron(&acc, op)
        } else {
            kron(&acc, &ComplexMatrix::identity(2))
        }
    })
}

/// PMD network output built on a frequency grid.
///
/// The correlation setting of `grid` is taken from the configuration's
/// spectrum.
pub fn grid_apply_pmd(state: &PureState, config: &NetworkConfig, grid: &FrequencyGrid) -> Result<DensityMatrix> {
    grid_apply_pmd_with_mode(ExecMode::default(), state, config, grid)
}

pub fn grid_apply_pmd_with_mode(
    mode: ExecMode,
    state: &PureState,
    config: &NetworkConfig,
    grid: &FrequencyGrid,
) -> Result<DensityMatrix> {
    config.validate()?;
    let n = config.n_qubits;
    if n > MAX_GRID_QUBITS {
        return Err(Error::QubitCount(n));
    }
    if config.effect != Effect::Pmd {
        return Err(Error::EffectMismatch {
            expected: Effect::Pmd.name(),
            found: config.effect.name(),
        });
    }
    if state.n_qubits() != n {
        return Err(Error::Dimension(format!("{}-qubit state on a {n}-photon network", state.n_qubits())));
    }
    let grid = grid.with_correlated(config.spectrum.kind == SpectrumKind::CwPumpCorrelated);
    let taus = config.signed_dgds();
    let bws = &config.spectrum.bandwidths;
    let wmax = check_inputs(&taus, bws, &grid)?;
    let nodes = grid.nodes(wmax);
    let input = state.density_matrix().into_matrix();

    if !grid.correlated {
        // independent spectra: one weighted random-phase channel per photon
        let mut rho = input;
        for q in 0..n {
            let weights: Vec<f64> = nodes.iter().map(|&w| power(w, bws[q])).collect();
            let total: f64 = weights.iter().sum();
            let mut acc = ComplexMatrix::zeros(rho.rows(), rho.cols());
            for (&w, &p) in nodes.iter().zip(&weights) {
                let u = embed(&pmd_unitary(w, taus[q]), q, n);
                let term = &(&u * &rho) * &u.adjoint();
                acc = &acc + &term.scale(Complex64::new(p / total, 0.0));
            }
            rho = acc;
        }
        return DensityMatrix::new(n, rho);
    }

    // correlated spectra: joint phase per grid point on the (N-1)-axis grid
    let amps = state.amplitudes();
    let support: Vec<usize> = (0..amps.len()).filter(|&b| amps[b].norm() > 0.0).collect();
    let s = support.len();
    let axes = n - 1;
    let p = grid.points;
    let total = p.pow(axes as u32);
    let chunks = total.div_ceil(exec::REDUCE_CHUNK);
    let partials = exec::map_range(mode, chunks, |c| {
        let start = c * exec::REDUCE_CHUNK;
        let end = (start + exec::REDUCE_CHUNK).min(total);
        let mut acc = vec![Complex64::new(0.0, 0.0); s * s];
        let mut weight_sum = 0.0;
        let mut idx = [0usize; MAX_GRID_QUBITS];
        let mut omega = [0.0f64; MAX_GRID_QUBITS];
        let mut u = vec![Complex64::new(0.0, 0.0); s];
        for flat in start..end {
            unravel(flat, p, axes, &mut idx[..axes]);
            let mut last = 0.0;
            let mut weight = 1.0;
            for a in 0..axes {
                omega[a] = nodes[idx[a]];
                last -= omega[a];
                weight *= power(omega[a], bws[a]);
            }
            omega[axes] = last;
            weight *= power(last, bws[axes]);
            for (slot, &b) in u.iter_mut().zip(&support) {
                // |0⟩ picks up e^{-iωτ/2}, |1⟩ picks up e^{+iωτ/2}
                let phase: f64 = (0..n)
                    .map(|q| {
                        let sign = 2.0 * qubit_bit(b, q, n) as f64 - 1.0;
                        0.5 * sign * omega[q] * taus[q]
                    })
                    .sum();
                *slot = Complex64::from_polar(1.0, phase);
            }
            for i in 0..s {
                for j in 0..s {
                    acc[i * s + j] += u[i] * u[j].conj() * weight;
                }
            }
            weight_sum += weight;
        }
        (acc, weight_sum)
    });
    let mut acc = vec![Complex64::new(0.0, 0.0); s * s];
    let mut weight_sum = 0.0;
    for (part, w) in partials {
        for (a, b) in acc.iter_mut().zip(part) {
            *a += b;
        }
        weight_sum += w;
    }
    let mut rho = ComplexMatrix::zeros(input.rows(), input.cols());
    for (i, &bi) in support.iter().enumerate() {
        for (j, &bj) in support.iter().enumerate() {
            rho[(bi, bj)] = input[(bi, bj)] * acc[i * s + j] / weight_sum;
        }
    }
    DensityMatrix::new(n, rho)
}

/// Result of comparing the analytic PMD channel against the grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleComparison {
    pub max_deviation: f64,
    pub passed: bool,
}

pub fn compare_pmd(state: &PureState, config: &NetworkConfig, grid: &FrequencyGrid) -> Result<OracleComparison> {
    let analytic = crate::channels::apply_pmd(state, config)?;
    let brute = grid_apply_pmd(state, config, grid)?;
    let max_deviation = analytic.matrix().max_abs_diff(brute.matrix());
    Ok(OracleComparison {
        max_deviation,
        passed: max_deviation <= ORACLE_TOL,
    })
}

/// Largest modulus allowed outside the diagonal and anti-diagonal.
pub const X_SPARSITY_TOL: f64 = 1e-12;

/// Concurrence of a two-qubit X state,
/// `2·max{0, |ρ₁₄| − √(ρ₂₂ρ₃₃), |ρ₂₃| − √(ρ₁₁ρ₄₄)}`.
pub fn xstate_concurrence(rho2: &DensityMatrix) -> Result<f64> {
    if rho2.n_qubits() != 2 {
        return Err(Error::InvalidDensity(format!(
            "X-state formula needs 2 qubits, got {}",
            rho2.n_qubits()
        )));
    }
    for i in 0..4 {
        for j in 0..4 {
            if i != j && i + j != 3 && rho2.get(i, j).norm() > X_SPARSITY_TOL {
                return Err(Error::InvalidDensity(format!("entry ({i}, {j}) breaks X sparsity")));
            }
        }
    }
    let d = |i: usize| rho2.get(i, i).re.max(0.0);
    let outer = rho2.get(0, 3).norm() - (d(1) * d(2)).sqrt();
    let inner = rho2.get(1, 2).norm() - (d(0) * d(3)).sqrt();
    Ok(2.0 * outer.max(inner).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::SpectralModel;
    use crate::states::{ghz_state, w_state};
    use approx::assert_abs_diff_eq;

    #[test]
    fn grid_validation() {
        assert!(FrequencyGrid::new(40, 6.0, false).is_err());
        assert!(FrequencyGrid::new(42, 6.0, false).is_err());
        assert!(FrequencyGrid::new(41, 4.0, false).is_err());
        assert!(FrequencyGrid::new(41, 5.0, true).is_ok());
    }

    #[test]
    fn grid_r_zero_delay_is_one() {
        let g = FrequencyGrid::default();
        for correlated in [false, true] {
            let r = grid_r(&[0.0; 3], &[1.0, 2.0, 0.5], &g.with_correlated(correlated)).unwrap();
            assert_abs_diff_eq!(r, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn grid_r_reference_values() {
        let g = FrequencyGrid::default();
        let r = grid_r(&[1.0, 0.0, 0.0], &[1.0; 3], &g).unwrap();
        assert_abs_diff_eq!(r, 0.606531, epsilon = 1e-6);
        let r = grid_r(&[1.0, 0.0, 0.0], &[1.0; 3], &g.with_correlated(true)).unwrap();
        assert_abs_diff_eq!(r, 0.716531, epsilon = 1e-6);
    }

    #[test]
    fn grid_pmd_identity_at_zero_delay() {
        let g = FrequencyGrid::default();
        for spec in [SpectralModel::uncorrelated(vec![1.0; 3]), SpectralModel::correlated(vec![1.0; 3])] {
            let cfg = NetworkConfig::pmd(&[0.0; 3], spec).unwrap();
            let psi = w_state(3).unwrap();
            let rho = grid_apply_pmd(&psi, &cfg, &g).unwrap();
            assert!(rho.matrix().max_abs_diff(psi.density_matrix().matrix()) < 1e-9);
        }
    }

    #[test]
    fn grid_pmd_rejects_large_registers() {
        let cfg = NetworkConfig::pmd(&[0.1; 5], SpectralModel::uncorrelated(vec![1.0; 5])).unwrap();
        let err = grid_apply_pmd(&ghz_state(5).unwrap(), &cfg, &FrequencyGrid::default()).unwrap_err();
        assert_eq!(err, Error::QubitCount(5));
    }

    #[test]
    fn xstate_examples() {
        let bell = w_state(2).unwrap().density_matrix();
        assert_abs_diff_eq!(xstate_concurrence(&bell).unwrap(), 1.0, epsilon = 1e-12);
        let third = 1.0 / 3.0;
        let m = ComplexMatrix::from_real_rows(&[
            &[third, 0.0, 0.0, 0.0],
            &[0.0, third, third, 0.0],
            &[0.0, third, third, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
        ]);
        let rho = DensityMatrix::new(2, m).unwrap();
        assert_abs_diff_eq!(xstate_concurrence(&rho).unwrap(), 2.0 / 3.0, epsilon = 1e-12);
        let diag = ComplexMatrix::from_real_rows(&[
            &[0.1, 0.0, 0.0, 0.0],
            &[0.0, 0.2, 0.0, 0.0],
            &[0.0, 0.0, 0.3, 0.0],
            &[0.0, 0.0, 0.0, 0.4],
        ]);
        assert_eq!(xstate_concurrence(&DensityMatrix::new(2, diag).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn xstate_rejects_dense_input() {
        let m = ComplexMatrix::identity(4).scale(Complex64::new(0.25, 0.0));
        let mut m2 = m.clone();
        m2[(0, 1)] = Complex64::new(0.01, 0.0);
        m2[(1, 0)] = Complex64::new(0.01, 0.0);
        assert!(xstate_concurrence(&DensityMatrix::new(2, m2).unwrap()).is_err());
    }
}
