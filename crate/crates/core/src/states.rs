//! Input states and their fidelity-based witnesses.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qlinalg::DensityMatrix;

/// Largest register size handled by the dense representations.
pub const MAX_QUBITS: usize = 12;

/// Family of the multipartite input state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StateKind {
    Ghz,
    W,
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StateKind::Ghz => "GHZ",
            StateKind::W => "W",
        })
    }
}

fn check_range(n: usize) -> Result<()> {
    if (2..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::QubitCount(n))
    }
}

/// Unit-norm state vector over the `2^n` polarization basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Wraps `amplitudes`, rejecting vectors whose norm is off by more than 1e-12.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::Dimension(format!("state length {dim} is not 2^n")));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!("state norm {norm} is not 1")));
        }
        Ok(PureState {
            n_qubits: dim.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn of_kind(kind: StateKind, n: usize) -> Result<Self> {
        match kind {
            StateKind::Ghz => ghz_state(n),
            StateKind::W => w_state(n),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        DensityMatrix::from_pure(&self.amplitudes).expect("unit-norm state gives a valid projector")
    }
}

/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz_state(n: usize) -> Result<PureState> {
    check_range(n)?;
    let dim = 1usize << n;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[0] = a;
    amps[dim - 1] = a;
    Ok(PureState {
        n_qubits: n,
        amplitudes: amps,
    })
}

/// Equal superposition of the `n` single-excitation basis states.
pub fn w_state(n: usize) -> Result<PureState> {
    check_range(n)?;
    let dim = 1usize << n;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    let a = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    for q in 0..n {
        amps[1usize << q] = a;
    }
    Ok(PureState {
        n_qubits: n,
        amplitudes: amps,
    })
}

/// Witness `a0·I − |ψ⟩⟨ψ|` built around an ideal GHZ or W target.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessSpec {
    pub kind: StateKind,
    pub n_qubits: usize,
    /// Largest squared overlap of the target with a biseparable state.
    pub a0: f64,
    pub target: PureState,
}

impl WitnessSpec {
    /// Expectation value on the undisturbed target, `a0 − 1`.
    pub fn pure_value(&self) -> f64 {
        self.a0 - 1.0
    }
}

/// `a0 = 1/2` for GHZ and `(N−1)/N` for W.
pub fn witness_constant(kind: StateKind, n: usize) -> f64 {
    match kind {
        StateKind::Ghz => 0.5,
        StateKind::W => (n as f64 - 1.0) / n as f64,
    }
}

pub fn witness_spec(kind: StateKind, n: usize) -> Result<WitnessSpec> {
    let target = PureState::of_kind(kind, n)?;
    Ok(WitnessSpec {
        kind,
        n_qubits: n,
        a0: witness_constant(kind, n),
        target,
    })
}
