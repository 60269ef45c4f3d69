#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use nhfloquet::bloch::ModelParams;
use nhfloquet::numerics::ComplexMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `|J| <= j_max`, `0 <= gamma <= gamma_max`, all in units of pi.
pub fn random_params(rng: &mut impl Rng, j_max: f64, gamma_max: f64) -> ModelParams {
    ModelParams::new(
        rng.gen_range(-j_max..j_max) * PI,
        rng.gen_range(-j_max..j_max) * PI,
        rng.gen_range(0.0..gamma_max) * PI,
    )
    .unwrap()
}

pub fn pi_params(j1: f64, j2: f64, gamma: f64) -> ModelParams {
    ModelParams::new(j1 * PI, j2 * PI, gamma * PI).unwrap()
}

pub fn to_na(m: &ComplexMatrix) -> CMat {
    CMat::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

pub fn from_na(m: &CMat) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring a 30-term Taylor series.
pub fn expm(a: &CMat) -> CMat {
    let norm: f64 = a.iter().map(|z| z.norm()).sum::<f64>().max(1e-300);
    let squarings = (norm.log2().ceil().max(0.0) as i32) + 1;
    let scaled = a.scale(0.5f64.powi(squarings));
    let n = a.nrows();
    let mut term = CMat::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=30 {
        term = &term * &scaled / c(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Single-particle hopping matrices of the two driving steps under PBC,
/// site `2(n-1) + s` with `s = 0` for A and `s = 1` for B.
pub fn real_space_hamiltonians(p: &ModelParams, l_cells: usize) -> (CMat, CMat) {
    let n = 2 * l_cells;
    let mut h1 = CMat::zeros(n, n);
    let mut h2 = CMat::zeros(n, n);
    for cell in 0..l_cells {
        let a = 2 * cell;
        let b = a + 1;
        let a_next = (a + 2) % n;
        h1[(a, b)] += c(p.j1(), 0.0);
        h1[(b, a)] += c(p.j1(), 0.0);
        h2[(b, a_next)] += c(p.j2(), 0.0);
        h2[(a_next, b)] += c(p.j2(), 0.0);
        for h in [&mut h1, &mut h2] {
            h[(a, a)] += c(0.0, p.gamma());
            h[(b, b)] += c(0.0, -p.gamma());
        }
    }
    (h1, h2)
}

/// `exp(-i H2) exp(-i H1)` from dense exponentials.
pub fn dense_floquet(p: &ModelParams, l_cells: usize) -> CMat {
    let (h1, h2) = real_space_hamiltonians(p, l_cells);
    let mi = c(0.0, -1.0);
    expm(&(h2 * mi)) * expm(&(h1 * mi))
}

pub fn eigenvalues(m: &CMat) -> Vec<Complex64> {
    m.clone()
        .schur()
        .eigenvalues()
        .expect("Schur eigenvalues")
        .iter()
        .copied()
        .collect()
}

/// Largest distance in a greedy nearest-neighbour pairing of two multisets,
/// measured relative to `max(1, |b|)`.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut unused: Vec<Complex64> = b.to_vec();
    let mut worst: f64 = 0.0;
    for x in a {
        let (idx, d) = unused
            .iter()
            .enumerate()
            .map(|(i, y)| (i, (x - y).norm() / y.norm().max(1.0)))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        worst = worst.max(d);
        unused.swap_remove(idx);
    }
    worst
}

/// Projector `A (A^H A)^{-1} A^H` onto the column space of `A`.
pub fn column_projector(a: &CMat) -> CMat {
    let gram = a.adjoint() * a;
    let inv = gram.try_inverse().expect("full column rank");
    a * inv * a.adjoint()
}

/// Fock space of `n_modes` fermionic modes; basis state bit `i` is the
/// occupation of mode `i`, Jordan-Wigner ordered by mode index.
pub struct Fock {
    pub n_modes: usize,
}

impl Fock {
    pub fn dim(&self) -> usize {
        1 << self.n_modes
    }

    /// `c_i^dagger c_j` applied to basis state `s`: (sign, new state).
    fn hop(&self, i: usize, j: usize, s: usize) -> Option<(f64, usize)> {
        if s & (1 << j) == 0 {
            return None;
        }
        let s1 = s & !(1 << j);
        let sign_j = (s1 & ((1 << j) - 1)).count_ones();
        if s1 & (1 << i) != 0 {
            return None;
        }
        let sign_i = (s1 & ((1 << i) - 1)).count_ones();
        let sign = if (sign_i + sign_j) % 2 == 0 { 1.0 } else { -1.0 };
        Some((sign, s1 | (1 << i)))
    }

    /// Many-body matrix of `sum_ij h_ij c_i^dagger c_j`.
    pub fn quadratic(&self, h: &CMat) -> CMat {
        let d = self.dim();
        let mut m = CMat::zeros(d, d);
        for s in 0..d {
            for i in 0..self.n_modes {
                for j in 0..self.n_modes {
                    let hij = h[(i, j)];
                    if hij == c(0.0, 0.0) {
                        continue;
                    }
                    if let Some((sign, t)) = self.hop(i, j, s) {
                        m[(t, s)] += hij * sign;
                    }
                }
            }
        }
        m
    }

    /// Basis vector with the listed modes occupied.
    pub fn product_state(&self, occupied: &[usize]) -> CMat {
        let mut v = CMat::zeros(self.dim(), 1);
        let s = occupied.iter().fold(0usize, |acc, &i| acc | (1 << i));
        v[(s, 0)] = c(1.0, 0.0);
        v
    }

    /// Von Neumann entropy of modes `0..n_sub` of a normalized pure state.
    /// Leading modes are first in the Jordan-Wigner order, so the bipartition
    /// is a plain tensor split of the bit string.
    pub fn entropy_of_leading_modes(&self, psi: &CMat, n_sub: usize) -> f64 {
        let da = 1 << n_sub;
        let db = 1 << (self.n_modes - n_sub);
        let m = CMat::from_fn(da, db, |a, b| psi[(a | (b << n_sub), 0)]);
        let rho = &m * m.adjoint();
        let eig = nalgebra::SymmetricEigen::new(rho);
        eig.eigenvalues
            .iter()
            .filter(|&&p| p > 1e-15)
            .map(|&p| -p * p.ln())
            .sum()
    }
}

/// Normalizes a column vector.
pub fn normalized(v: CMat) -> CMat {
    let n = v.norm();
    v / c(n, 0.0)
}
