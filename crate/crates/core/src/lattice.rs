//! Real-space Floquet operator under periodic boundary conditions and the
//! stroboscopic evolution of a Slater determinant, kept normalised by a QR
//! step after every period.
//!
//! Sites are flattened as `2 (n - 1) + s` for unit cell `n = 1..L` and
//! sublattice `s = 0 (A), 1 (B)`.

use num_complex::Complex64;

use crate::bloch::ModelParams;
use crate::error::{Error, Result};
use crate::numerics::{exp_two_level_unchecked, orthonormalize, BlochMatrix, ComplexMatrix};

pub const ISOMETRY_TOL: f64 = 1e-10;

/// Lattice of `l_cells` unit cells holding `n_fermions` particles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticeSpec {
    l_cells: usize,
    n_fermions: usize,
}

impl LatticeSpec {
    pub fn new(l_cells: usize, n_fermions: usize) -> Result<Self> {
        if l_cells < 2 {
            return Err(Error::InvalidArgument(format!(
                "lattice needs at least 2 unit cells, got {l_cells}"
            )));
        }
        if n_fermions == 0 || n_fermions > 2 * l_cells {
            return Err(Error::InvalidFilling {
                n_fermions,
                n_sites: 2 * l_cells,
            });
        }
        Ok(Self { l_cells, n_fermions })
    }

    pub fn half_filled(l_cells: usize) -> Result<Self> {
        Self::new(l_cells, l_cells)
    }

    pub fn l_cells(&self) -> usize {
        self.l_cells
    }

    pub fn n_fermions(&self) -> usize {
        self.n_fermions
    }

    pub fn n_sites(&self) -> usize {
        2 * self.l_cells
    }
}

/// Flat index of sublattice `s` (0 = A, 1 = B) in 1-based cell `n`.
pub fn site_index(cell: usize, sublattice: usize) -> usize {
    2 * (cell - 1) + sublattice
}

/// Something that maps a single-particle frame forward by one period.
pub trait Propagator {
    fn dim(&self) -> usize;
    fn apply(&self, frame: &ComplexMatrix) -> ComplexMatrix;
}

impl Propagator for ComplexMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply(&self, frame: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(frame)
    }
}

/// The real-space Floquet operator in factored form.
///
/// Both half-period exponentials are block diagonal: `exp(-i H1)` over the
/// intracell pairs `(A_n, B_n)` and `exp(-i H2)` over the intercell pairs
/// `(B_n, A_{n+1})` with periodic wrap. Every block of a factor is the same
/// 2x2 matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct FloquetLattice {
    l_cells: usize,
    intracell: BlochMatrix,
    intercell: BlochMatrix,
}

impl FloquetLattice {
    pub fn new(params: &ModelParams, l_cells: usize) -> Result<Self> {
        if l_cells < 2 {
            return Err(Error::InvalidArgument(format!(
                "lattice needs at least 2 unit cells, got {l_cells}"
            )));
        }
        let (j1, j2, g) = (params.j1(), params.j2(), params.gamma());
        let zero = Complex64::new(0.0, 0.0);
        // pair (A_n, B_n): J1 sx + i gamma sz
        let intracell =
            exp_two_level_unchecked([Complex64::new(j1, 0.0), zero, Complex64::new(0.0, g)]);
        // pair (B_n, A_{n+1}): J2 sx - i gamma sz
        let intercell =
            exp_two_level_unchecked([Complex64::new(j2, 0.0), zero, Complex64::new(0.0, -g)]);
        Ok(Self { l_cells, intracell, intercell })
    }

    pub fn l_cells(&self) -> usize {
        self.l_cells
    }

    pub fn intracell_block(&self) -> &BlochMatrix {
        &self.intracell
    }

    pub fn intercell_block(&self) -> &BlochMatrix {
        &self.intercell
    }

    /// Dense `2L x 2L` matrix of the operator.
    pub fn to_dense(&self) -> ComplexMatrix {
        self.apply(&ComplexMatrix::identity(2 * self.l_cells))
    }

    fn apply_pairs(m: &mut ComplexMatrix, block: &BlochMatrix, pairs: impl Iterator<Item = (usize, usize)>) {
        let [[a, b], [c, d]] = block.0;
        for (p, q) in pairs {
            let (rp, rq) = m.row_pair_mut(p, q);
            for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = a * u + b * v;
                *y = c * u + d * v;
            }
        }
    }
}

impl Propagator for FloquetLattice {
    fn dim(&self) -> usize {
        2 * self.l_cells
    }

    fn apply(&self, frame: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(frame.rows(), self.dim(), "frame dimension mismatch");
        let l = self.l_cells;
        let n = 2 * l;
        let mut out = frame.clone();
        Self::apply_pairs(&mut out, &self.intracell, (0..l).map(|c| (2 * c, 2 * c + 1)));
        Self::apply_pairs(&mut out, &self.intercell, (0..l).map(|c| (2 * c + 1, (2 * c + 2) % n)));
        out
    }
}

/// Dense real-space Floquet operator `exp(-i H2) exp(-i H1)`.
pub fn real_space_floquet(params: &ModelParams, lattice: &LatticeSpec) -> ComplexMatrix {
    FloquetLattice::new(params, lattice.l_cells())
        .map(|f| f.to_dense())
        .unwrap_or_else(|_| unreachable!("LatticeSpec guarantees L >= 2"))
}

/// `2L x N` matrix with orthonormal columns spanning the occupied orbitals.
#[derive(Clone, Debug, PartialEq)]
pub struct IsometryFrame(ComplexMatrix);

impl IsometryFrame {
    /// Wraps `m` after checking `m^H m = I` to [`ISOMETRY_TOL`].
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.rows() < m.cols() {
            return Err(Error::InvalidArgument(format!(
                "isometry frame must be tall, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let defect = isometry_defect(&m);
        if !(defect <= ISOMETRY_TOL) {
            return Err(Error::InvalidArgument(format!(
                "frame is not isometric: max |F^H F - I| = {defect:e}"
            )));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn n_sites(&self) -> usize {
        self.0.rows()
    }

    pub fn n_fermions(&self) -> usize {
        self.0.cols()
    }

    pub fn isometry_defect(&self) -> f64 {
        isometry_defect(&self.0)
    }
}

fn isometry_defect(m: &ComplexMatrix) -> f64 {
    m.gram().max_abs_diff(&ComplexMatrix::identity(m.cols()))
}

/// Charge-density-wave frame: column `j` occupies site `(j + 1, B)`. Beyond
/// half filling the remaining columns occupy A sites in cell order.
pub fn initial_isometry(lattice: &LatticeSpec) -> IsometryFrame {
    let l = lattice.l_cells();
    let mut m = ComplexMatrix::zeros(lattice.n_sites(), lattice.n_fermions());
    for j in 0..lattice.n_fermions() {
        let row = if j < l { site_index(j + 1, 1) } else { site_index(j - l + 1, 0) };
        m[(row, j)] = Complex64::new(1.0, 0.0);
    }
    IsometryFrame(m)
}

/// Applies one period and re-orthonormalises the columns by QR.
pub fn evolve_one_period<P: Propagator + ?Sized>(u: &P, frame: &IsometryFrame) -> Result<IsometryFrame> {
    if u.dim() != frame.n_sites() {
        return Err(Error::InvalidArgument(format!(
            "propagator acts on {} sites but the frame has {}",
            u.dim(),
            frame.n_sites()
        )));
    }
    Ok(IsometryFrame(orthonormalize(&u.apply(frame.matrix()))?))
}

/// Single-particle correlator `C_{a b} = <c_a^dag c_b>`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix(ComplexMatrix);

impl CorrelationMatrix {
    /// Wraps an arbitrary matrix; used by tests and external inputs.
    pub fn from_matrix(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidArgument("correlation matrix must be square".into()));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn n_sites(&self) -> usize {
        self.0.rows()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// `max |C^2 - C|`.
    pub fn projector_defect(&self) -> f64 {
        (&self.0 * &self.0).max_abs_diff(&self.0)
    }

    /// Square block on flat sites `[first, first + len)`.
    pub fn block(&self, first: usize, len: usize) -> ComplexMatrix {
        self.0.block(first, first, len, len)
    }
}

/// `C_{a b} = [F F^H]_{b a}`.
pub fn correlation(frame: &IsometryFrame) -> CorrelationMatrix {
    CorrelationMatrix(frame.matrix().outer_gram().conj())
}

/// The block of [`correlation`] on flat sites `[first, first + len)`,
/// computed from the corresponding rows of the frame only.
pub fn correlation_block(frame: &IsometryFrame, first: usize, len: usize) -> ComplexMatrix {
    let rows = frame.matrix().block(first, 0, len, frame.n_fermions());
    rows.outer_gram().conj()
}

/// Iterates `propagator` from `initial` for `n_periods`, calling `visit` with
/// the period index and frame at periods `0, 1, ..., n_periods`.
pub fn evolve_frames<P, F>(propagator: &P, initial: IsometryFrame, n_periods: usize, mut visit: F) -> Result<()>
where
    P: Propagator + ?Sized,
    F: FnMut(usize, &IsometryFrame) -> Result<()>,
{
    let mut frame = initial;
    visit(0, &frame)?;
    for period in 1..=n_periods {
        frame = evolve_one_period(propagator, &frame)?;
        visit(period, &frame)?;
    }
    Ok(())
}

/// Correlation snapshots of the charge-density-wave state at the requested
/// periods, in the order requested.
pub fn stroboscopic_run(
    params: &ModelParams,
    lattice: &LatticeSpec,
    n_periods: usize,
    observers: &[usize],
) -> Result<Vec<CorrelationMatrix>> {
    if n_periods == 0 {
        return Err(Error::InvalidArgument("n_periods must be at least 1".into()));
    }
    if let Some(&bad) = observers.iter().find(|&&p| p > n_periods) {
        return Err(Error::InvalidArgument(format!(
            "observer period {bad} exceeds the run length {n_periods}"
        )));
    }
    let floquet = FloquetLattice::new(params, lattice.l_cells())?;
    let mut snapshots: Vec<Option<CorrelationMatrix>> = vec![None; observers.len()];
    let last = observers.iter().copied().max().unwrap_or(0);
    evolve_frames(&floquet, initial_isometry(lattice), last, |period, frame| {
        let wanted: Vec<usize> = observers
            .iter()
            .enumerate()
            .filter(|(_, &p)| p == period)
            .map(|(i, _)| i)
            .collect();
        if !wanted.is_empty() {
            let c = correlation(frame);
            for i in wanted {
                snapshots[i] = Some(c.clone());
            }
        }
        Ok(())
    })?;
    Ok(snapshots.into_iter().map(|s| s.expect("every observer visited")).collect())
}
