use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Relative size of `|R_kk|` below which a column is treated as linearly
/// dependent on its predecessors.
pub const RANK_TOLERANCE: f64 = 1e-13;

struct Reflector {
    v: Vec<Complex64>,
    tau: f64,
}

impl Reflector {
    /// Applies `I - tau v v^H` to rows `offset..` and columns `col0..` of `m`.
    fn apply(&self, m: &mut ComplexMatrix, offset: usize, col0: usize) {
        let cols = m.cols();
        if self.tau == 0.0 || col0 >= cols {
            return;
        }
        let mut w = vec![Complex64::new(0.0, 0.0); cols - col0];
        for (i, vi) in self.v.iter().enumerate() {
            let vc = vi.conj();
            for (wj, &a) in w.iter_mut().zip(&m.row(offset + i)[col0..]) {
                *wj += vc * a;
            }
        }
        for (i, &vi) in self.v.iter().enumerate() {
            let s = vi * self.tau;
            for (a, &wj) in m.row_mut(offset + i)[col0..].iter_mut().zip(&w) {
                *a -= s * wj;
            }
        }
    }
}

/// Householder factorisation of the columns of `work` in place. Returns the
/// reflectors and the (complex) diagonal of R.
fn householder(work: &mut ComplexMatrix) -> (Vec<Reflector>, Vec<Complex64>) {
    let (m, n) = (work.rows(), work.cols());
    let mut reflectors = Vec::with_capacity(n);
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        let x: Vec<Complex64> = (k..m).map(|i| work[(i, k)]).collect();
        let alpha2: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        if alpha2 == 0.0 {
            reflectors.push(Reflector { v: Vec::new(), tau: 0.0 });
            diag.push(Complex64::new(0.0, 0.0));
            continue;
        }
        let alpha = alpha2.sqrt();
        let x0 = x[0];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let beta = -phase * alpha;
        let mut v = x;
        v[0] = x0 - beta;
        let vnorm2 = alpha2 - x0.norm_sqr() + v[0].norm_sqr();
        let refl = Reflector { v, tau: 2.0 / vnorm2 };
        refl.apply(work, k, k + 1);
        work[(k, k)] = beta;
        for i in k + 1..m {
            work[(i, k)] = Complex64::new(0.0, 0.0);
        }
        reflectors.push(refl);
        diag.push(beta);
    }
    (reflectors, diag)
}

fn check_rank(diag: &[Complex64]) -> Result<()> {
    let largest = diag.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if largest == 0.0 || !largest.is_finite() {
        return Err(Error::DegenerateState(
            "matrix columns vanish or are not finite".into(),
        ));
    }
    if let Some((k, z)) = diag
        .iter()
        .enumerate()
        .find(|(_, z)| z.norm() <= RANK_TOLERANCE * largest)
    {
        return Err(Error::DegenerateState(format!(
            "column {k} is numerically dependent (|R_kk| = {:e}, max {:e})",
            z.norm(),
            largest
        )));
    }
    Ok(())
}

fn thin_q(m: usize, n: usize, reflectors: &[Reflector], diag: &[Complex64]) -> ComplexMatrix {
    let mut q = ComplexMatrix::zeros(m, n);
    for k in 0..n {
        q[(k, k)] = Complex64::new(1.0, 0.0);
    }
    for (k, refl) in reflectors.iter().enumerate().rev() {
        refl.apply(&mut q, k, k);
    }
    // fix phases so that R has a real nonnegative diagonal
    let phases: Vec<Complex64> = diag.iter().map(|d| d / d.norm()).collect();
    for i in 0..m {
        for (z, p) in q.row_mut(i).iter_mut().zip(&phases) {
            *z *= p;
        }
    }
    q
}

/// Thin QR decomposition `M = Q R` of a tall matrix.
///
/// Q is `rows x cols` with orthonormal columns and R is `cols x cols` upper
/// triangular with a real nonnegative diagonal, which makes the pair unique.
/// A numerically rank-deficient `M` yields [`Error::DegenerateState`].
pub fn qr_decompose(m: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (rows, cols) = (m.rows(), m.cols());
    if rows < cols {
        return Err(Error::InvalidArgument(format!(
            "QR needs rows >= cols, got {rows}x{cols}"
        )));
    }
    if !m.is_finite() {
        return Err(Error::InvalidArgument("QR input has non-finite entries".into()));
    }
    let mut work = m.clone();
    let (reflectors, diag) = householder(&mut work);
    check_rank(&diag)?;
    let q = thin_q(rows, cols, &reflectors, &diag);
    let mut r = ComplexMatrix::zeros(cols, cols);
    for k in 0..cols {
        let p = (diag[k] / diag[k].norm()).conj();
        for j in k..cols {
            r[(k, j)] = work[(k, j)] * p;
        }
        r[(k, k)] = Complex64::new(diag[k].norm(), 0.0);
    }
    Ok((q, r))
}

/// The Q factor of [`qr_decompose`] alone.
pub fn orthonormalize(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (rows, cols) = (m.rows(), m.cols());
    if rows < cols {
        return Err(Error::InvalidArgument(format!(
            "QR needs rows >= cols, got {rows}x{cols}"
        )));
    }
    if !m.is_finite() {
        return Err(Error::DegenerateState("state matrix has non-finite entries".into()));
    }
    let mut work = m.clone();
    let (reflectors, diag) = householder(&mut work);
    check_rank(&diag)?;
    Ok(thin_q(rows, cols, &reflectors, &diag))
}
