//! Eigenvalues of small dense complex matrices.
//!
//! Two independent routes: cyclic Jacobi rotations for Hermitian input and a
//! Hessenberg reduction followed by shifted complex QR for general input.

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

const HERMITIAN_INPUT_TOL: f64 = 1e-10;
const JACOBI_MAX_SWEEPS: usize = 100;
const QR_MAX_ITERS_PER_EIGENVALUE: usize = 200;

/// Real eigenvalues of a Hermitian matrix, sorted descending.
pub fn eigvals_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let scale = m.as_slice().iter().map(|z| z.norm()).fold(1.0, f64::max);
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_INPUT_TOL * scale {
        return Err(Error::NotHermitian(dev));
    }
    let n = m.rows();
    let mut a = m.clone();
    // symmetrize so rounding in the input cannot bias the rotations
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }

    let total: f64 = a.frobenius_norm().powi(2);
    let mut converged = n <= 1;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off <= 1e-30 * total || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(JACOBI_MAX_SWEEPS));
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    Ok(ev)
}

/// Annihilates `a[p][q]` with a unitary rotation in the (p, q) plane.
fn jacobi_rotate(a: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let n = a.rows();
    let e = apq / g;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let ec = e.conj();

    // A <- A V
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * ec * s;
        a[(k, q)] = akp * s + akq * ec * c;
    }
    // A <- V† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * e * s;
        a[(q, k)] = apk * s + aqk * e * c;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
}

/// Eigenvalues of a general square complex matrix, sorted by descending real
/// part (ties by descending imaginary part).
pub fn eigvals_general(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
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
    let (mut ev, active) = isolate(m);
    if !active.is_empty() {
        let k = active.len();
        let mut h = ComplexMatrix::zeros(k, k);
        for (r, &i) in active.iter().enumerate() {
            for (c, &j) in active.iter().enumerate() {
                h[(r, c)] = m[(i, j)];
            }
        }
        hessenberg(&mut h);
        ev.extend(hessenberg_qr(&mut h)?);
    }
    ev.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
    debug_assert_eq!(ev.len(), n);
    Ok(ev)
}

/// Splits off eigenvalues that a symmetric permutation exposes exactly: an
/// index whose row, or column, is zero off the diagonal within the remaining
/// set contributes its diagonal entry as an eigenvalue. Returns those values
/// and the indices left for the iterative solver.
///
/// Without this step an exactly decoupled zero eigenvalue comes back from QR
/// as rounding noise of order `ε‖A‖`, which a later square root would blow up
/// to `√ε`.
fn isolate(m: &ComplexMatrix) -> (Vec<Complex64>, Vec<usize>) {
    let zero = Complex64::new(0.0, 0.0);
    let mut active: Vec<usize> = (0..m.rows()).collect();
    let mut found = Vec::new();
    loop {
        let pick = active.iter().position(|&i| {
            let row = active.iter().all(|&j| j == i || m[(i, j)] == zero);
            let col = active.iter().all(|&j| j == i || m[(j, i)] == zero);
            row || col
        });
        match pick {
            Some(p) => {
                let i = active.remove(p);
                found.push(m[(i, i)]);
            }
            None => return (found, active),
        }
    }
}

/// In-place Householder reduction to upper Hessenberg form.
fn hessenberg(a: &mut ComplexMatrix) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let norm_x: f64 = ((k + 1)..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm_x;
        let mut v: Vec<Complex64> = ((k + 1)..n).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // A <- (I - 2vv†) A
        for j in 0..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(r, vr)| vr.conj() * a[(k + 1 + r, j)])
                .sum();
            for (r, vr) in v.iter().enumerate() {
                a[(k + 1 + r, j)] -= vr * dot * 2.0;
            }
        }
        // A <- A (I - 2vv†)
        for i in 0..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(r, vr)| a[(i, k + 1 + r)] * vr)
                .sum();
            for (r, vr) in v.iter().enumerate() {
                a[(i, k + 1 + r)] -= dot * vr.conj() * 2.0;
            }
        }
        for i in (k + 2)..n {
            a[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Eigenvalues of the trailing 2x2 block `[[a, b], [c, d]]`.
fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powi(2) + b * c;
    let root = disc.sqrt();
    (half_tr + root, half_tr - root)
}

/// Givens rotation `[[c, s], [-conj(s), c]]` mapping `(x, y)` to `(r, 0)`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if ax == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let r = ax.hypot(ay);
    (ax / r, (x / ax) * y.conj() / r)
}

fn hessenberg_qr(h: &mut ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = h.rows();
    let mut ev = Vec::with_capacity(n);
    if n == 0 {
        return Ok(ev);
    }
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iters_since_deflation = 0usize;
    let mut total_iters = 0usize;
    let cap = QR_MAX_ITERS_PER_EIGENVALUE * n;

    loop {
        if hi == 0 {
            ev.push(h[(0, 0)]);
            break;
        }
        // locate the start of the unreduced block ending at `hi`
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let thresh = if diag == 0.0 { eps } else { eps * diag };
            if sub <= thresh {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            ev.push(h[(hi, hi)]);
            hi -= 1;
            iters_since_deflation = 0;
            continue;
        }
        if lo + 1 == hi {
            let (l1, l2) = eig2(h[(lo, lo)], h[(lo, hi)], h[(hi, lo)], h[(hi, hi)]);
            ev.push(l1);
            ev.push(l2);
            if lo == 0 {
                break;
            }
            hi = lo - 1;
            iters_since_deflation = 0;
            continue;
        }

        total_iters += 1;
        iters_since_deflation += 1;
        if total_iters > cap {
            return Err(Error::NoConvergence(total_iters));
        }

        let shift = if iters_since_deflation % 11 == 10 {
            // exceptional shift breaks symmetric stalls
            h[(hi, hi)] + Complex64::new(h[(hi, hi - 1)].norm(), 0.0) * 0.75
        } else {
            let (l1, l2) = eig2(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            );
            if (l1 - h[(hi, hi)]).norm() <= (l2 - h[(hi, hi)]).norm() {
                l1
            } else {
                l2
            }
        };

        for i in lo..=hi {
            h[(i, i)] -= shift;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            rots.push((c, s));
        }
        for (off, &(c, s)) in rots.iter().enumerate() {
            let k = lo + off;
            let top = (k + 2).min(hi);
            for i in lo..=top {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += shift;
        }
    }
    Ok(ev)
}
