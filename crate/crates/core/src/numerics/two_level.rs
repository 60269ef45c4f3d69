//! Closed-form algebra of 2x2 complex matrices spanned by the Pauli basis.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Below this modulus of `E = sqrt(d.d)` the exponential switches to its
/// second-order series.
pub const SERIES_CROSSOVER: f64 = 1e-8;

/// A 2x2 complex matrix over the (A, B) sublattice basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochMatrix(pub [[Complex64; 2]; 2]);

impl BlochMatrix {
    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self([[a, b], [c, d]])
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn sigma_x() -> Self {
        Self::new(ZERO, ONE, ONE, ZERO)
    }

    pub const fn sigma_y() -> Self {
        Self::new(ZERO, Complex64::new(0.0, -1.0), I, ZERO)
    }

    pub const fn sigma_z() -> Self {
        Self::new(ONE, ZERO, ZERO, Complex64::new(-1.0, 0.0))
    }

    /// `d . sigma = dx sx + dy sy + dz sz`.
    pub fn from_pauli(d: [Complex64; 3]) -> Self {
        let [dx, dy, dz] = d;
        Self::new(dz, dx - I * dy, dx + I * dy, -dz)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[i][j]
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let m = self.0;
        Self::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    /// Entry-wise complex conjugate (time reversal).
    pub fn conj(&self) -> Self {
        let m = self.0;
        Self::new(m[0][0].conj(), m[0][1].conj(), m[1][0].conj(), m[1][1].conj())
    }

    pub fn adjoint(&self) -> Self {
        let m = self.0;
        Self::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    /// Inverse via the adjugate; `None` for a singular matrix.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == ZERO || !det.is_finite() {
            return None;
        }
        let m = self.0;
        Some(Self::new(m[1][1], -m[0][1], -m[1][0], m[0][0]).scale(det.inv()))
    }

    /// Both eigenvalues from the characteristic polynomial, ordered by
    /// ascending imaginary part and then real part.
    pub fn eigenvalues(&self) -> [Complex64; 2] {
        let half_tr = self.trace() * 0.5;
        let disc = (half_tr * half_tr - self.det()).sqrt();
        let (a, b) = (half_tr + disc, half_tr - disc);
        let mut ev = [a, b];
        ev.sort_by(|x, y| {
            x.im.partial_cmp(&y.im)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(x.re.partial_cmp(&y.re).unwrap_or(std::cmp::Ordering::Equal))
        });
        ev
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.is_finite())
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(2, 2, |i, j| self.0[i][j])
    }
}

impl Mul for BlochMatrix {
    type Output = BlochMatrix;

    fn mul(self, rhs: BlochMatrix) -> BlochMatrix {
        let (a, b) = (self.0, rhs.0);
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Add for BlochMatrix {
    type Output = BlochMatrix;

    fn add(self, rhs: BlochMatrix) -> BlochMatrix {
        let (a, b) = (self.0, rhs.0);
        Self::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl Sub for BlochMatrix {
    type Output = BlochMatrix;

    fn sub(self, rhs: BlochMatrix) -> BlochMatrix {
        let (a, b) = (self.0, rhs.0);
        Self::new(a[0][0] - b[0][0], a[0][1] - b[0][1], a[1][0] - b[1][0], a[1][1] - b[1][1])
    }
}

/// `d . d` (bilinear, no conjugation).
#[inline]
pub fn pauli_dot(a: [Complex64; 3], b: [Complex64; 3]) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `cos(E)` and `sin(E)/E` for `E^2 = e_sq`. Both are even in `E`, so the
/// choice of square-root branch does not matter.
pub fn cos_and_sinc(e_sq: Complex64) -> (Complex64, Complex64) {
    let e = e_sq.sqrt();
    if e.norm() < SERIES_CROSSOVER {
        (ONE - e_sq * 0.5, ONE - e_sq / 6.0)
    } else {
        (e.cos(), e.sin() / e)
    }
}

/// `exp(-i d.sigma)` for a complex 3-vector `d`.
pub fn exp_two_level(d: [Complex64; 3]) -> Result<BlochMatrix> {
    if d.iter().any(|z| !z.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "two-level generator has non-finite components {d:?}"
        )));
    }
    Ok(exp_two_level_unchecked(d))
}

pub(crate) fn exp_two_level_unchecked(d: [Complex64; 3]) -> BlochMatrix {
    let gen = BlochMatrix::from_pauli(d);
    let e_sq = pauli_dot(d, d);
    let e = e_sq.sqrt();
    if e.norm() < SERIES_CROSSOVER {
        // (d.sigma)^2 = (d.d) I, nilpotent at an exceptional point
        BlochMatrix::identity() - gen.scale(I) - (gen * gen).scale(Complex64::new(0.5, 0.0))
    } else {
        BlochMatrix::identity().scale(e.cos()) - gen.scale(I * (e.sin() / e))
    }
}

/// Principal `arccos` with real part in `[0, pi]`.
pub fn complex_arccos(z: Complex64) -> Result<Complex64> {
    if !z.is_finite() {
        return Err(Error::InvalidArgument(format!("arccos argument {z} is not finite")));
    }
    let root = (ONE - z * z).sqrt();
    // (z + i root)(z - i root) = 1; take the factor without cancellation
    let plus = z + I * root;
    let minus = z - I * root;
    let mut w = if plus.norm() >= minus.norm() {
        -I * plus.ln()
    } else {
        I * minus.ln()
    };
    if w.re < 0.0 {
        w = -w;
    }
    if z.im == 0.0 && z.re.abs() <= 1.0 {
        w.im = 0.0;
    }
    Ok(w)
}
