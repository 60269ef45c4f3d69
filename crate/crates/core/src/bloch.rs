//! Momentum-space description of the two-step Floquet protocol.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{
    complex_arccos, cos_and_sinc, exp_two_level_unchecked, BlochMatrix,
};

/// Largest imaginary part of the raw `cos E` that is still attributed to
/// rounding.
pub const COS_REALITY_TOL: f64 = 1e-10;

/// Dimensionless couplings of one Floquet protocol: intracell hopping `j1`
/// in the first half period, intercell hopping `j2` in the second, and the
/// gain/loss strength `gamma` acting in both.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    j1: f64,
    j2: f64,
    gamma: f64,
}

impl ModelParams {
    pub fn new(j1: f64, j2: f64, gamma: f64) -> Result<Self> {
        if !(j1.is_finite() && j2.is_finite() && gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "model parameters must be finite, got j1={j1}, j2={j2}, gamma={gamma}"
            )));
        }
        if gamma < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "gamma must be >= 0, got {gamma}"
            )));
        }
        Ok(Self { j1, j2, gamma })
    }

    pub fn j1(&self) -> f64 {
        self.j1
    }

    pub fn j2(&self) -> f64 {
        self.j2
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Pauli vector of the first-half generator, `(J1, 0, i gamma)`.
    pub fn first_half_vector(&self) -> [Complex64; 3] {
        [
            Complex64::new(self.j1, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, self.gamma),
        ]
    }

    /// Pauli vector of the second-half generator at `k`, `(J2 cos k, J2 sin k, i gamma)`.
    pub fn second_half_vector(&self, k: Quasimomentum) -> [Complex64; 3] {
        let (s, c) = k.value().sin_cos();
        [
            Complex64::new(self.j2 * c, 0.0),
            Complex64::new(self.j2 * s, 0.0),
            Complex64::new(0.0, self.gamma),
        ]
    }
}

/// Quasimomentum wrapped into `[-pi, pi)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Quasimomentum(f64);

impl Quasimomentum {
    pub fn new(k: f64) -> Self {
        let wrapped = (k + PI).rem_euclid(2.0 * PI) - PI;
        // rem_euclid can return exactly 2 pi after rounding
        if wrapped >= PI {
            Self(-PI)
        } else {
            Self(wrapped)
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// The two Floquet bands `+-E(k)` and the real `cos E` they share.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuasienergyPair {
    pub e_plus: Complex64,
    pub e_minus: Complex64,
    pub cos_e: f64,
}

fn half(d: [Complex64; 3]) -> [Complex64; 3] {
    d.map(|z| z * 0.5)
}

/// `H1(k) = J1 sx + i gamma sz`.
pub fn bloch_h1(params: &ModelParams) -> BlochMatrix {
    BlochMatrix::from_pauli(params.first_half_vector())
}

/// `H2(k) = J2 cos k sx + J2 sin k sy + i gamma sz`.
pub fn bloch_h2(params: &ModelParams, k: Quasimomentum) -> BlochMatrix {
    BlochMatrix::from_pauli(params.second_half_vector(k))
}

/// `U(k) = exp(-i H2(k)) exp(-i H1(k))`.
pub fn bloch_floquet(params: &ModelParams, k: Quasimomentum) -> BlochMatrix {
    exp_two_level_unchecked(params.second_half_vector(k))
        * exp_two_level_unchecked(params.first_half_vector())
}

/// Floquet operator in the symmetric time frame,
/// `exp(-i H1/2) exp(-i H2) exp(-i H1/2)`.
pub fn symmetric_frame_floquet(params: &ModelParams, k: Quasimomentum) -> BlochMatrix {
    let half_first = exp_two_level_unchecked(half(params.first_half_vector()));
    half_first * exp_two_level_unchecked(params.second_half_vector(k)) * half_first
}

/// `max |sx conj(U) sx - U^{-1}|` for the symmetric-frame operator.
pub fn check_pt_symmetry(params: &ModelParams, k: Quasimomentum) -> f64 {
    pt_violation(&symmetric_frame_floquet(params, k))
}

/// PT relation residual of a unimodular 2x2 operator.
///
/// The inverse is taken as the adjugate. Dividing by a computed determinant
/// would cancel catastrophically once the entries grow large (strong gain).
pub fn pt_violation(u: &BlochMatrix) -> f64 {
    let sx = BlochMatrix::sigma_x();
    let adjugate = BlochMatrix::new(u.get(1, 1), -u.get(0, 1), -u.get(1, 0), u.get(0, 0));
    (sx * u.conj() * sx).max_abs_diff(&adjugate)
}

/// `cos E(k)` before its imaginary part is dropped.
///
/// `sin(E_i) n_i` is evaluated as `sinc(E_i) d_i`, which stays finite at the
/// exceptional points `J_i^2 = gamma^2`.
pub fn raw_cos_quasienergy(params: &ModelParams, k: Quasimomentum) -> Complex64 {
    let g2 = params.gamma * params.gamma;
    let e1_sq = Complex64::new(params.j1 * params.j1 - g2, 0.0);
    let e2_sq = Complex64::new(params.j2 * params.j2 - g2, 0.0);
    let (c1, s1) = cos_and_sinc(e1_sq);
    let (c2, s2) = cos_and_sinc(e2_sq);
    let d1_dot_d2 = params.j1 * params.j2 * k.value().cos() - g2;
    c1 * c2 - s1 * s2 * d1_dot_d2
}

/// Real `cos E(k)`.
pub fn cos_quasienergy(params: &ModelParams, k: Quasimomentum) -> f64 {
    let raw = raw_cos_quasienergy(params, k);
    debug_assert!(
        raw.im.abs() < COS_REALITY_TOL,
        "cos E has imaginary part {:e}",
        raw.im
    );
    raw.re
}

/// Quasienergy bands `+-E(k)` with `Re E_+ in [0, pi]`.
pub fn quasienergy(params: &ModelParams, k: Quasimomentum) -> QuasienergyPair {
    let mut cos_e = cos_quasienergy(params, k);
    if params.gamma == 0.0 {
        // unitary: |cos E| <= 1 up to rounding
        cos_e = cos_e.clamp(-1.0, 1.0);
    }
    // cos_e is finite for finite parameters
    let e_plus = complex_arccos(Complex64::new(cos_e, 0.0)).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
    QuasienergyPair {
        e_plus,
        e_minus: -e_plus,
        cos_e,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(j1: f64, j2: f64, gamma: f64) -> ModelParams {
        ModelParams::new(j1, j2, gamma).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0.0, 0.0, -0.1).is_err());
        assert!(ModelParams::new(f64::NAN, 0.0, 0.0).is_err());
        assert!(ModelParams::new(-1.0, -2.0, 0.0).is_ok());
    }

    #[test]
    fn quasimomentum_wraps() {
        assert_eq!(Quasimomentum::new(PI).value(), -PI);
        assert!((Quasimomentum::new(3.0 * PI + 0.5).value() - (-PI + 0.5)).abs() < 1e-12);
        assert!((Quasimomentum::new(-0.25).value() + 0.25).abs() < 1e-15);
    }

    #[test]
    fn first_half_hamiltonian() {
        assert_eq!(bloch_h1(&params(0.0, 0.0, 0.0)), BlochMatrix::zero());
        assert_eq!(bloch_h1(&params(1.0, 0.0, 0.0)), BlochMatrix::sigma_x());
        let h = bloch_h1(&params(0.1 * PI, 0.0, 0.5 * PI));
        let expected = BlochMatrix::new(
            c(0.0, 0.5 * PI),
            c(0.1 * PI, 0.0),
            c(0.1 * PI, 0.0),
            c(0.0, -0.5 * PI),
        );
        assert!(h.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn second_half_hamiltonian() {
        let p = params(0.3, 0.7, 0.2);
        let at_zero = bloch_h2(&p, Quasimomentum::new(0.0));
        assert!(at_zero.max_abs_diff(&bloch_h1(&params(0.7, 0.0, 0.2))) < 1e-15);
        let h = bloch_h2(&params(0.0, 0.7, 0.0), Quasimomentum::new(PI));
        assert!(h.max_abs_diff(&BlochMatrix::sigma_x().scale(c(-0.7, 0.0))) < 1e-15);
        for k in [-2.0, 0.3, 1.9] {
            let h = bloch_h2(&params(0.4, 0.0, 0.9), Quasimomentum::new(k));
            assert!(h.max_abs_diff(&BlochMatrix::sigma_z().scale(c(0.0, 0.9))) < 1e-15);
        }
    }

    #[test]
    fn floquet_reference_cases() {
        let u = bloch_floquet(&params(PI / 2.0, PI / 2.0, 0.0), Quasimomentum::new(0.0));
        assert!(u.max_abs_diff(&BlochMatrix::identity().scale(c(-1.0, 0.0))) < 1e-15);
        let u = bloch_floquet(&params(0.0, 0.0, 1.0), Quasimomentum::new(0.7));
        let e2 = 2.0_f64.exp();
        let expected = BlochMatrix::new(c(e2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0 / e2, 0.0));
        assert!(u.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn symmetric_frame_without_second_half() {
        let p = params(0.8, 0.0, 0.0);
        let u = symmetric_frame_floquet(&p, Quasimomentum::new(1.1));
        let expected = exp_two_level_unchecked([c(0.8, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(u.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn quasienergy_reference_cases() {
        let q = quasienergy(&params(PI / 2.0, PI / 2.0, 0.0), Quasimomentum::new(0.0));
        assert!((q.cos_e + 1.0).abs() < 1e-15);
        assert!((q.e_plus - c(PI, 0.0)).norm() < 1e-7);
        let q = quasienergy(&params(0.0, 0.0, 1.0), Quasimomentum::new(0.2));
        assert!((q.cos_e - 2.0_f64.cosh()).abs() < 1e-14);
        assert!((q.e_plus - c(0.0, 2.0)).norm() < 1e-14);
        assert_eq!(q.e_minus, -q.e_plus);
    }

    #[test]
    fn exceptional_points_are_finite() {
        for (j1, j2, g) in [(0.3, 0.5, 0.3), (0.7, -0.7, 0.7), (0.3, 0.3, 0.3)] {
            let p = params(j1, j2, g);
            for k in [-3.0, -1.0, 0.0, 2.5] {
                let k = Quasimomentum::new(k);
                let q = quasienergy(&p, k);
                assert!(q.e_plus.is_finite());
                let tr = bloch_floquet(&p, k).trace() * 0.5;
                assert!((tr - c(q.cos_e, 0.0)).norm() < 1e-10);
            }
        }
    }
}
