//! PT-phase diagnostics of the Bloch Floquet spectrum: the fraction of real
//! quasienergies, the dissipation gap and band-touching gap functions.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bloch::{cos_quasienergy, quasienergy, ModelParams, Quasimomentum};
use crate::error::{Error, Result};
use crate::sweep::{par_map_ordered, sweep_cells, Axis};

pub const DEFAULT_K_POINTS: usize = 4096;
pub const MIN_K_POINTS: usize = 64;
/// Half-width of the band around `|cos E| = 1` that counts with weight 1/2.
pub const DEFAULT_REALITY_TOL: f64 = 1e-9;
/// Dissipation gaps above this value count as open.
pub const GAP_TOL: f64 = 1e-9;

/// Midpoint grid `k_m = -pi + (m + 1/2) 2 pi / n` over the Brillouin zone.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KGrid {
    n_points: usize,
}

impl KGrid {
    pub fn new(n_points: usize) -> Result<Self> {
        if n_points < MIN_K_POINTS {
            return Err(Error::InvalidArgument(format!(
                "k grid needs at least {MIN_K_POINTS} points, got {n_points}"
            )));
        }
        Ok(Self { n_points })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn nodes(&self) -> impl Iterator<Item = Quasimomentum> + '_ {
        let dk = 2.0 * PI / self.n_points as f64;
        (0..self.n_points).map(move |m| Quasimomentum::new(-PI + (m as f64 + 0.5) * dk))
    }
}

impl Default for KGrid {
    fn default() -> Self {
        Self { n_points: DEFAULT_K_POINTS }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PtPhase {
    PtInvariant,
    PtBroken,
    PtMixed,
}

impl fmt::Display for PtPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PtPhase::PtInvariant => "PT_INVARIANT",
            PtPhase::PtBroken => "PT_BROKEN",
            PtPhase::PtMixed => "PT_MIXED",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PtDiagnostics {
    pub r_ratio: f64,
    pub dissipation_gap: f64,
    pub phase: PtPhase,
}

/// `(cos E - 1, cos E + 1)`: zeros mark band touchings at `E = 0` and `E = pi`.
pub fn gap_functions(params: &ModelParams, k: Quasimomentum) -> (f64, f64) {
    let c = cos_quasienergy(params, k);
    (c - 1.0, c + 1.0)
}

fn reality_weight(cos_e: f64, tol: f64) -> f64 {
    let a = cos_e.abs();
    if a < 1.0 - tol {
        1.0
    } else if a > 1.0 + tol {
        0.0
    } else {
        0.5
    }
}

/// Fraction of the Brillouin zone carrying real quasienergies.
pub fn real_ratio(params: &ModelParams, grid: &KGrid, reality_tol: f64) -> f64 {
    let total: f64 = grid
        .nodes()
        .map(|k| reality_weight(cos_quasienergy(params, k), reality_tol))
        .sum();
    total / grid.n_points() as f64
}

/// `min_k |Im E(k)|` over the grid.
pub fn dissipation_gap(params: &ModelParams, grid: &KGrid) -> f64 {
    grid.nodes()
        .map(|k| quasienergy(params, k).e_plus.im.abs())
        .fold(f64::INFINITY, f64::min)
}

pub fn classify_pt(params: &ModelParams, grid: &KGrid) -> PtDiagnostics {
    let r_ratio = real_ratio(params, grid, DEFAULT_REALITY_TOL);
    let dissipation_gap = dissipation_gap(params, grid);
    let resolution = 1.0 / grid.n_points() as f64;
    let phase = if r_ratio >= 1.0 - resolution {
        PtPhase::PtInvariant
    } else if r_ratio <= resolution {
        PtPhase::PtBroken
    } else {
        PtPhase::PtMixed
    };
    PtDiagnostics { r_ratio, dissipation_gap, phase }
}

/// One cell of a PT phase diagram.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PtRow {
    pub value1: f64,
    pub value2: f64,
    pub diagnostics: PtDiagnostics,
}

/// `R` and the dissipation gap over the product of two parameter axes, in
/// row-major order. Cells are evaluated in parallel on the ambient rayon pool.
pub fn sweep_pt_diagram(
    axis1: &Axis,
    axis2: &Axis,
    fixed: &ModelParams,
    grid: &KGrid,
) -> Result<Vec<PtRow>> {
    let cells = sweep_cells(axis1, axis2, fixed)?;
    Ok(par_map_ordered(&cells, |cell| PtRow {
        value1: cell.value1,
        value2: cell.value2,
        diagnostics: classify_pt(&cell.params, grid),
    }))
}

/// Quasimomenta in `(lo, hi)` where a gap function changes sign, refined by
/// bisection on `f` to absolute accuracy `tol`.
pub fn bisect_sign_changes(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    samples: usize,
    tol: f64,
) -> Vec<f64> {
    let step = (hi - lo) / samples as f64;
    let mut roots = Vec::new();
    let mut a = lo;
    let mut fa = f(a);
    for i in 1..=samples {
        let b = lo + step * i as f64;
        let fb = f(b);
        if fa == 0.0 {
            roots.push(a);
        } else if fa * fb < 0.0 {
            let (mut x0, mut x1, mut f0) = (a, b, fa);
            while x1 - x0 > tol {
                let mid = 0.5 * (x0 + x1);
                let fm = f(mid);
                if f0 * fm <= 0.0 {
                    x1 = mid;
                } else {
                    x0 = mid;
                    f0 = fm;
                }
            }
            roots.push(0.5 * (x0 + x1));
        }
        a = b;
        fa = fb;
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(j1: f64, j2: f64, gamma: f64) -> ModelParams {
        ModelParams::new(j1, j2, gamma).unwrap()
    }

    #[test]
    fn grid_avoids_high_symmetry_points() {
        assert!(KGrid::new(32).is_err());
        let g = KGrid::new(64).unwrap();
        let nodes: Vec<f64> = g.nodes().map(|k| k.value()).collect();
        assert_eq!(nodes.len(), 64);
        assert!(nodes.iter().all(|&k| k > -PI && k < PI && k.abs() > 1e-3));
        assert!(nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn gap_function_reference_cases() {
        let (_, dpi) = gap_functions(&params(PI / 2.0, PI / 2.0, 0.0), Quasimomentum::new(0.0));
        assert!(dpi.abs() < 1e-15);
        let (d0, _) = gap_functions(&params(0.0, 0.0, 0.0), Quasimomentum::new(1.0));
        assert_eq!(d0, 0.0);
    }

    #[test]
    fn ratio_limits() {
        let g = KGrid::default();
        assert_eq!(real_ratio(&params(1.3, -0.4, 0.0), &g, DEFAULT_REALITY_TOL), 1.0);
        assert_eq!(real_ratio(&params(0.0, 0.0, 1.0), &g, DEFAULT_REALITY_TOL), 0.0);
    }

    #[test]
    fn dissipation_gap_limits() {
        let g = KGrid::default();
        assert_eq!(dissipation_gap(&params(0.7, 2.0, 0.0), &g), 0.0);
        assert!((dissipation_gap(&params(0.0, 0.0, 1.0), &g) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn classification_limits() {
        let g = KGrid::default();
        assert_eq!(classify_pt(&params(0.4, 1.1, 0.0), &g).phase, PtPhase::PtInvariant);
        assert_eq!(classify_pt(&params(0.0, 0.0, 1.0), &g).phase, PtPhase::PtBroken);
    }

    #[test]
    fn bisection_finds_roots() {
        let roots = bisect_sign_changes(|x| x.sin(), -3.0, 3.5, 100, 1e-12);
        assert_eq!(roots.len(), 2);
        assert!(roots[0].abs() < 1e-11);
        assert!((roots[1] - PI).abs() < 1e-11);
    }
}
