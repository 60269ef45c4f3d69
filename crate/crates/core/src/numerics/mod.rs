//! Dense complex linear-algebra kernels.

mod eigh;
mod lstsq;
mod matrix;
mod qr;
mod two_level;

pub use eigh::{hermitian_eigh, hermitian_eigs, HermitianSpectrum};
pub use lstsq::{linear_least_squares, LeastSquaresFit};
pub use matrix::ComplexMatrix;
pub use qr::{orthonormalize, qr_decompose, RANK_TOLERANCE};
pub use two_level::{
    complex_arccos, cos_and_sinc, exp_two_level, pauli_dot, BlochMatrix, SERIES_CROSSOVER,
};
pub(crate) use two_level::exp_two_level_unchecked;
