//! Factorizations that let square roots of spectra be read off without
//! squaring: a rank-revealing PSD factor and singular values by one-sided
//! Jacobi.

use num_complex::Complex64;

use super::{ComplexMatrix, PSD_TOL};
use crate::error::{Error, Result};

/// Schur-complement pivots at or below this fraction of the largest diagonal
/// entry end the factorization; they are rounding residue of an exactly
/// rank-deficient matrix.
pub const FACTOR_RANK_TOL: f64 = 1e-14;
const SVD_MAX_SWEEPS: usize = 60;

/// `Ψ` (n×r) with `ΨΨ† = m` for a Hermitian positive semidefinite `m`, by
/// diagonally pivoted Cholesky. The rank `r` stops at the first pivot not
/// above `FACTOR_RANK_TOL · max diag`; a pivot below `−PSD_TOL` is an error.
pub fn psd_factor(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = m.rows();
    let mut s = m.clone();
    let scale = (0..n).map(|i| s[(i, i)].re).fold(0.0, f64::max);
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    let mut done = vec![false; n];
    for _ in 0..n {
        let pick = (0..n)
            .filter(|&i| !done[i])
            .max_by(|&a, &b| s[(a, a)].re.total_cmp(&s[(b, b)].re));
        let Some(p) = pick else { break };
        let d = s[(p, p)].re;
        if d <= FACTOR_RANK_TOL * scale {
            let min = (0..n).filter(|&i| !done[i]).map(|i| s[(i, i)].re).fold(f64::INFINITY, f64::min);
            if min < -PSD_TOL {
                return Err(Error::InvalidDensity(format!("negative pivot {min:e}")));
            }
            break;
        }
        done[p] = true;
        let root = d.sqrt();
        let col: Vec<Complex64> = (0..n).map(|i| if done[i] && i != p { Complex64::new(0.0, 0.0) } else { s[(i, p)] / root }).collect();
        for i in (0..n).filter(|&i| !done[i]) {
            for j in (0..n).filter(|&j| !done[j]) {
                s[(i, j)] -= col[i] * col[j].conj();
            }
        }
        cols.push(col);
    }
    let r = cols.len();
    let mut psi = ComplexMatrix::zeros(n, r);
    for (k, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            psi[(i, k)] = *v;
        }
    }
    Ok(psi)
}

/// Singular values, descending, by one-sided (Hestenes) Jacobi: columns are
/// rotated pairwise until mutually orthogonal and the singular values are
/// their norms. Small singular values come out with absolute error of order
/// `ε‖m‖` rather than the `√ε‖m‖` of square-rooted eigenvalues of `m†m`.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let (rows, n) = (m.rows(), m.cols());
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..rows).map(|i| m[(i, j)]).collect()).collect();
    for _ in 0..SVD_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = cols[p].iter().zip(&cols[q]).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                // phase-align column q so that the overlap is real, then a
                // real rotation zeroes it
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let a = cols[p][i];
                    let b = cols[q][i] * phase;
                    cols[p][i] = a * c - b * s;
                    cols[q][i] = a * s + b * c;
                }
            }
        }
        if !rotated {
            let mut sv: Vec<f64> = cols
                .iter()
                .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
                .collect();
            sv.sort_by(|a, b| b.total_cmp(a));
            return Ok(sv);
        }
    }
    Err(Error::NoConvergence(SVD_MAX_SWEEPS))
}
