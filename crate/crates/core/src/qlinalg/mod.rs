//! Small dense complex linear algebra.
//!
//! Basis convention used throughout the crate: qubit 0 (photon A) is the most
//! significant bit of a basis index, so for three qubits index 4 is `|100⟩`.

mod eigen;
mod factor;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use eigen::{eigvals_general, eigvals_hermitian};
pub use factor::{psd_factor, singular_values, FACTOR_RANK_TOL};

/// Tolerance used for Hermiticity and unit-trace checks on density matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance used for the unit-trace check.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted for a positive semidefinite matrix.
pub const PSD_TOL: f64 = 1e-10;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![C0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C1;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Builds a matrix from real row slices. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        ComplexMatrix { rows: r, cols: c, data }
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for (i, ui) in u.iter().enumerate() {
            if *ui == C0 {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                m.data[i * v.len() + j] = ui * vj.conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj(&self) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].conj();
            }
        }
        t
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C0 {
                    continue;
                }
                let rrow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "cannot apply {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self − self†`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix dimensions must agree")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ai in 0..a.rows {
        for aj in 0..a.cols {
            let x = a[(ai, aj)];
            if x == C0 {
                continue;
            }
            for bi in 0..b.rows {
                for bj in 0..b.cols {
                    out[(ai * b.rows + bi, aj * b.cols + bj)] = x * b[(bi, bj)];
                }
            }
        }
    }
    out
}

/// Pauli Y.
pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_vec(
        2,
        2,
        vec![C0, Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), C0],
    )
    .expect("2x2")
}

/// Value of qubit `q` (0 = most significant) in basis index `index` of an
/// `n`-qubit register.
#[inline]
pub fn qubit_bit(index: usize, q: usize, n: usize) -> usize {
    (index >> (n - 1 - q)) & 1
}

/// Density operator on `n_qubits` qubits.
///
/// Construction checks shape, finiteness, Hermiticity and unit trace. Positive
/// semidefiniteness requires a diagonalization and is checked on demand by
/// [`DensityMatrix::validate_psd`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(n_qubits: usize, matrix: ComplexMatrix) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 16 {
            return Err(Error::InvalidDensity(format!("unsupported qubit count {n_qubits}")));
        }
        let dim = 1usize << n_qubits;
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(Error::Dimension(format!(
                "{n_qubits}-qubit density matrix must be {dim}x{dim}, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::NonFinite);
        }
        let herm = matrix.hermitian_deviation();
        if herm > HERMITIAN_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace();
        if (tr - C1).norm() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!(
                "trace is {}{:+}i, expected 1",
                tr.re, tr.im
            )));
        }
        Ok(DensityMatrix { n_qubits, matrix })
    }

    /// Normalizes `matrix` to unit trace before validating it.
    pub fn normalized(n_qubits: usize, matrix: ComplexMatrix) -> Result<Self> {
        let tr = matrix.trace().re;
        if !(tr.is_finite() && tr > 0.0) {
            return Err(Error::InvalidDensity(format!("cannot normalize trace {tr}")));
        }
        Self::new(n_qubits, matrix.scale(Complex64::new(1.0 / tr, 0.0)))
    }

    /// Pure-state projector `|ψ⟩⟨ψ|` for a unit vector.
    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::Dimension(format!("state length {dim} is not 2^n")));
        }
        Self::new(
            dim.trailing_zeros() as usize,
            ComplexMatrix::outer(amplitudes, amplitudes),
        )
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        eigvals_hermitian(&self.matrix)
    }

    /// Checks that no eigenvalue is below `-PSD_TOL`.
    pub fn validate_psd(&self) -> Result<()> {
        let ev = self.eigenvalues()?;
        let min = ev.last().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// Reduced state on the qubits in `keep`, in ascending qubit order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        partial_trace(self, keep)
    }
}

/// Traces out every qubit not listed in `keep`.
///
/// The kept qubits retain their relative order (smaller index = more
/// significant bit in the reduced basis), whatever order `keep` lists them in.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n_qubits;
    if keep.is_empty() {
        return Err(Error::QubitSelection("keep set is empty".into()));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() {
        return Err(Error::QubitSelection(format!("duplicate qubit in {keep:?}")));
    }
    if let Some(&q) = kept.iter().find(|&&q| q >= n) {
        return Err(Error::QubitSelection(format!(
            "qubit {q} out of range for {n}-qubit state"
        )));
    }
    let k = kept.len();
    let traced_mask: usize = (0..n)
        .filter(|q| !kept.contains(q))
        .map(|q| 1usize << (n - 1 - q))
        .sum();
    let reduce = |index: usize| -> usize {
        kept.iter()
            .fold(0usize, |acc, &q| (acc << 1) | qubit_bit(index, q, n))
    };
    let dim = rho.dim();
    let rdim = 1usize << k;
    let reduced_index: Vec<usize> = (0..dim).map(reduce).collect();
    let mut out = ComplexMatrix::zeros(rdim, rdim);
    let m = rho.matrix();
    for row in 0..dim {
        let traced = row & traced_mask;
        for col in 0..dim {
            if col & traced_mask != traced {
                continue;
            }
            out[(reduced_index[row], reduced_index[col])] += m[(row, col)];
        }
    }
    DensityMatrix::new(k, out)
}
