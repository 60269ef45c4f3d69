//! Dense Hermitian eigensolver: Householder reduction to a real symmetric
//! tridiagonal matrix followed by implicit QL iterations.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

const MAX_QL_SWEEPS: usize = 60;

/// Ascending eigenvalues of a Hermitian matrix, with eigenvectors as columns
/// when requested.
#[derive(Clone, Debug)]
pub struct HermitianSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<ComplexMatrix>,
}

/// Eigenvalues of the Hermitian part `(M + M^H)/2`, after checking that
/// `max |M - M^H| <= hermiticity_tol`.
pub fn hermitian_eigs(m: &ComplexMatrix, hermiticity_tol: f64) -> Result<HermitianSpectrum> {
    solve(m, hermiticity_tol, false)
}

/// As [`hermitian_eigs`], also returning orthonormal eigenvectors.
pub fn hermitian_eigh(m: &ComplexMatrix, hermiticity_tol: f64) -> Result<HermitianSpectrum> {
    solve(m, hermiticity_tol, true)
}

struct Householder {
    offset: usize,
    v: Vec<Complex64>,
    tau: f64,
}

fn solve(m: &ComplexMatrix, tol: f64, want_vectors: bool) -> Result<HermitianSpectrum> {
    if !m.is_square() {
        return Err(Error::InvalidArgument(format!(
            "eigensolver needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::InvalidArgument("eigensolver input has non-finite entries".into()));
    }
    let violation = m.hermiticity_violation();
    if violation > tol {
        return Err(Error::NonHermitianInput { violation, tol });
    }
    let n = m.rows();
    let mut a = m.add(&m.adjoint()).scale(Complex64::new(0.5, 0.0));

    let reflectors = tridiagonalize(&mut a);
    let mut diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let sub: Vec<Complex64> = (0..n.saturating_sub(1)).map(|i| a[(i + 1, i)]).collect();

    // diagonal unitary making the off-diagonal real and nonnegative
    let mut phases = vec![Complex64::new(1.0, 0.0); n];
    let mut off = vec![0.0; n];
    for (i, e) in sub.iter().enumerate() {
        let r = e.norm();
        off[i] = r;
        phases[i + 1] = if r > 0.0 { phases[i] * (e / r) } else { phases[i] };
    }

    let mut z = want_vectors.then(|| {
        let mut id = vec![0.0; n * n];
        for i in 0..n {
            id[i * n + i] = 1.0;
        }
        id
    });
    tridiagonal_ql(&mut diag, &mut off, z.as_deref_mut())?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();

    let eigenvectors = z.map(|z| {
        let mut x = ComplexMatrix::from_fn(n, n, |i, j| phases[i] * z[i * n + order[j]]);
        for h in reflectors.iter().rev() {
            apply_reflector(&mut x, h);
        }
        x
    });
    Ok(HermitianSpectrum { eigenvalues, eigenvectors })
}

fn apply_reflector(x: &mut ComplexMatrix, h: &Householder) {
    let cols = x.cols();
    let mut w = vec![Complex64::new(0.0, 0.0); cols];
    for (i, vi) in h.v.iter().enumerate() {
        let vc = vi.conj();
        for (wj, &a) in w.iter_mut().zip(x.row(h.offset + i)) {
            *wj += vc * a;
        }
    }
    for (i, &vi) in h.v.iter().enumerate() {
        let s = vi * h.tau;
        for (a, &wj) in x.row_mut(h.offset + i).iter_mut().zip(&w) {
            *a -= s * wj;
        }
    }
}

/// Reduces `a` in place to Hermitian tridiagonal form `Q^H a Q`, returning
/// the reflectors whose product is `Q`.
fn tridiagonalize(a: &mut ComplexMatrix) -> Vec<Householder> {
    let n = a.rows();
    let mut out = Vec::new();
    for k in 0..n.saturating_sub(2) {
        let off = k + 1;
        let r = n - off;
        let x: Vec<Complex64> = (off..n).map(|i| a[(i, k)]).collect();
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let alpha2 = tail + x[0].norm_sqr();
        let alpha = alpha2.sqrt();
        let x0 = x[0];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let beta = -phase * alpha;
        let mut v = x;
        v[0] = x0 - beta;
        let tau = 2.0 / (tail + v[0].norm_sqr());

        // p = tau S v, w = p - (tau/2)(v^H p) v
        let mut p = vec![Complex64::new(0.0, 0.0); r];
        for (i, pi) in p.iter_mut().enumerate() {
            let row = &a.row(off + i)[off..];
            *pi = row.iter().zip(&v).map(|(s, vj)| s * vj).sum::<Complex64>() * tau;
        }
        let vp: Complex64 = v.iter().zip(&p).map(|(vi, pi)| vi.conj() * pi).sum();
        let kk = vp.re * tau * 0.5;
        let w: Vec<Complex64> = p.iter().zip(&v).map(|(pi, vi)| pi - vi * kk).collect();
        for i in 0..r {
            let (vi, wi) = (v[i], w[i]);
            let row = &mut a.row_mut(off + i)[off..];
            for ((s, vj), wj) in row.iter_mut().zip(&v).zip(&w) {
                *s -= vi * wj.conj() + wi * vj.conj();
            }
        }
        a[(off, k)] = beta;
        a[(k, off)] = beta.conj();
        for i in off + 1..n {
            a[(i, k)] = Complex64::new(0.0, 0.0);
            a[(k, i)] = Complex64::new(0.0, 0.0);
        }
        out.push(Householder { offset: off, v, tau });
    }
    out
}

/// Implicit QL with Wilkinson-style shifts on a real symmetric tridiagonal
/// matrix. `off[i]` couples `i` and `i + 1`; `z` (row-major `n x n`)
/// accumulates the rotations.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let norm = d
        .iter()
        .zip(e.iter())
        .fold(0.0f64, |acc, (x, y)| acc.max(x.abs() + y.abs()));
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                // absolute threshold: clusters of tiny eigenvalues must still deflate
                if e[m].abs() <= f64::EPSILON * norm {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_SWEEPS {
                return Err(Error::DegenerateState(
                    "tridiagonal QL iteration did not converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let f = z[k * n + i + 1];
                        z[k * n + i + 1] = s * z[k * n + i] + c * f;
                        z[k * n + i] = c * z[k * n + i] - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
