//! Bipartite entanglement entropy of the evolved Gaussian state, steady-state
//! averages and the scaling fits used to tell area-law from volume-law phases.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bloch::ModelParams;
use crate::error::{Error, Result};
use crate::lattice::{
    correlation_block, evolve_frames, initial_isometry, CorrelationMatrix, FloquetLattice,
    IsometryFrame, LatticeSpec,
};
use crate::numerics::{hermitian_eigs, linear_least_squares, ComplexMatrix};
use crate::sweep::{par_map_ordered, sweep_cells, Axis};

/// Correlation eigenvalues are clipped into `[CLIP, 1 - CLIP]` before the
/// logarithms are taken.
pub const ZETA_CLIP: f64 = 1e-12;
/// Raw correlation eigenvalues further than this outside `[0, 1]` are errors.
pub const ZETA_RANGE_TOL: f64 = 1e-8;
pub const CORRELATION_HERMITICITY_TOL: f64 = 1e-10;
/// Gradients below this many nats per unit cell count as area law.
pub const G_FLOOR: f64 = 0.005;

pub const DEFAULT_PERIODS: usize = 1000;
pub const DEFAULT_WINDOW: (usize, usize) = (800, 1000);
pub const DEFAULT_SIZES: [usize; 4] = [40, 80, 120, 160];

/// Contiguous block of `length_cells` unit cells starting at the 1-based
/// `start_cell`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubsystemSpec {
    pub start_cell: usize,
    pub length_cells: usize,
}

impl SubsystemSpec {
    pub fn new(start_cell: usize, length_cells: usize) -> Self {
        Self { start_cell, length_cells }
    }

    /// The first `l` cells.
    pub fn leading(length_cells: usize) -> Self {
        Self::new(1, length_cells)
    }

    fn validate(&self, l_cells: usize) -> Result<()> {
        let ok = self.start_cell >= 1
            && self.length_cells >= 1
            && self.length_cells < l_cells
            && self.start_cell - 1 + self.length_cells <= l_cells;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "subsystem of {} cells from cell {} does not fit a proper part of {l_cells} cells",
                self.length_cells, self.start_cell
            )))
        }
    }

    fn first_site(&self) -> usize {
        2 * (self.start_cell - 1)
    }

    fn n_sites(&self) -> usize {
        2 * self.length_cells
    }
}

/// `-sum [z ln z + (1 - z) ln(1 - z)]` over correlation eigenvalues.
pub fn entropy_from_spectrum(zetas: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &z in zetas {
        if !(-ZETA_RANGE_TOL..=1.0 + ZETA_RANGE_TOL).contains(&z) {
            return Err(Error::SpectrumOutOfRange { value: z });
        }
        let z = z.clamp(ZETA_CLIP, 1.0 - ZETA_CLIP);
        s -= z * z.ln() + (1.0 - z) * (1.0 - z).ln();
    }
    Ok(s)
}

fn block_entropy(block: &ComplexMatrix) -> Result<f64> {
    let spectrum = hermitian_eigs(block, CORRELATION_HERMITICITY_TOL)?;
    entropy_from_spectrum(&spectrum.eigenvalues)
}

/// Entanglement entropy between `sub` and the rest of the chain.
pub fn entanglement_entropy(c: &CorrelationMatrix, sub: &SubsystemSpec) -> Result<f64> {
    if c.n_sites() % 2 != 0 {
        return Err(Error::InvalidArgument("correlation matrix must cover whole unit cells".into()));
    }
    sub.validate(c.n_sites() / 2)?;
    block_entropy(&c.block(sub.first_site(), sub.n_sites()))
}

/// [`entanglement_entropy`] evaluated straight from an isometry frame.
pub fn frame_entropy(frame: &IsometryFrame, sub: &SubsystemSpec) -> Result<f64> {
    sub.validate(frame.n_sites() / 2)?;
    block_entropy(&correlation_block(frame, sub.first_site(), sub.n_sites()))
}

/// Stroboscopic entropies `S(l T)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EntanglementTrace {
    pub periods: Vec<usize>,
    pub values: Vec<f64>,
}

impl EntanglementTrace {
    pub fn push(&mut self, period: usize, value: f64) {
        self.periods.push(period);
        self.values.push(value);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Mean and sample standard deviation of `values`.
pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Mean and sample standard deviation of the trace over periods
/// `window_start..=window_end`.
pub fn steady_state_ee(trace: &EntanglementTrace, window_start: usize, window_end: usize) -> Result<(f64, f64)> {
    let out_of_range = || Error::WindowOutOfRange {
        start: window_start,
        end: window_end,
        len: trace.len(),
    };
    if window_start >= window_end || window_end > trace.len() {
        return Err(out_of_range());
    }
    if !trace.periods.contains(&window_start) || !trace.periods.contains(&window_end) {
        return Err(out_of_range());
    }
    let window: Vec<f64> = trace
        .periods
        .iter()
        .zip(&trace.values)
        .filter(|(&p, _)| p >= window_start && p <= window_end)
        .map(|(_, &v)| v)
        .collect();
    Ok(mean_and_std(&window))
}

/// Evolution length and steady-state averaging window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvolutionSettings {
    pub periods: usize,
    pub window_start: usize,
    pub window_end: usize,
}

impl EvolutionSettings {
    pub fn new(periods: usize, window_start: usize, window_end: usize) -> Result<Self> {
        if periods == 0 || window_start >= window_end || window_end > periods {
            return Err(Error::WindowOutOfRange {
                start: window_start,
                end: window_end,
                len: periods,
            });
        }
        Ok(Self { periods, window_start, window_end })
    }

    fn in_window(&self, period: usize) -> bool {
        (self.window_start..=self.window_end).contains(&period)
    }
}

impl Default for EvolutionSettings {
    fn default() -> Self {
        Self {
            periods: DEFAULT_PERIODS,
            window_start: DEFAULT_WINDOW.0,
            window_end: DEFAULT_WINDOW.1,
        }
    }
}

/// Worst-case invariant residuals over the snapshots of one or more runs.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunDiagnostics {
    pub snapshots: usize,
    /// `max |F^H F - I|`.
    pub isometry_defect: f64,
    /// `max |tr C - N|`.
    pub trace_error: f64,
    /// Bound on `max |C^2 - C|`: `N` times the isometry defect, since each
    /// row of an isometric frame has norm at most one.
    pub projector_defect_bound: f64,
    /// `max |S(X) - S(complement of X)|`.
    pub complementarity_gap: f64,
    pub min_entropy: f64,
}

impl RunDiagnostics {
    fn new() -> Self {
        Self { min_entropy: f64::INFINITY, ..Default::default() }
    }

    fn observe_frame(&mut self, frame: &IsometryFrame) {
        let n = frame.n_fermions() as f64;
        let defect = frame.isometry_defect();
        let trace: f64 = frame.matrix().as_slice().iter().map(|z| z.norm_sqr()).sum();
        self.snapshots += 1;
        self.isometry_defect = self.isometry_defect.max(defect);
        self.trace_error = self.trace_error.max((trace - n).abs());
        self.projector_defect_bound = self.projector_defect_bound.max(n * defect);
    }

    fn observe_entropies(&mut self, s: f64, complement: f64) {
        self.complementarity_gap = self.complementarity_gap.max((s - complement).abs());
        self.min_entropy = self.min_entropy.min(s).min(complement);
    }

    pub fn merge(&self, other: &Self) -> Self {
        Self {
            snapshots: self.snapshots + other.snapshots,
            isometry_defect: self.isometry_defect.max(other.isometry_defect),
            trace_error: self.trace_error.max(other.trace_error),
            projector_defect_bound: self.projector_defect_bound.max(other.projector_defect_bound),
            complementarity_gap: self.complementarity_gap.max(other.complementarity_gap),
            min_entropy: self.min_entropy.min(other.min_entropy),
        }
    }
}

/// Entropy of cells `1..=l` and of the complementary cells `l+1..=L`.
fn entropy_pair(frame: &IsometryFrame, l: usize) -> Result<(f64, f64)> {
    let l_cells = frame.n_sites() / 2;
    let s = frame_entropy(frame, &SubsystemSpec::leading(l))?;
    let rest = frame_entropy(frame, &SubsystemSpec::new(l + 1, l_cells - l))?;
    Ok((s, rest))
}

/// Half-chain entropy trace of one half-filled run, recorded over the
/// averaging window. Frame invariants are checked after every period.
pub fn half_chain_trace(
    params: &ModelParams,
    l_cells: usize,
    settings: &EvolutionSettings,
) -> Result<(EntanglementTrace, RunDiagnostics)> {
    if l_cells % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "equal bipartition needs an even number of cells, got {l_cells}"
        )));
    }
    let lattice = LatticeSpec::half_filled(l_cells)?;
    let floquet = FloquetLattice::new(params, l_cells)?;
    let mut trace = EntanglementTrace::default();
    let mut diag = RunDiagnostics::new();
    evolve_frames(&floquet, initial_isometry(&lattice), settings.periods, |period, frame| {
        diag.observe_frame(frame);
        if settings.in_window(period) {
            let (s, rest) = entropy_pair(frame, l_cells / 2)?;
            diag.observe_entropies(s, rest);
            trace.push(period, s);
        }
        Ok(())
    })?;
    Ok((trace, diag))
}

/// Steady-state half-chain entropy at one system size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SizePoint {
    pub l_cells: usize,
    pub s_mean: f64,
    pub s_std: f64,
    pub diagnostics: RunDiagnostics,
}

/// Steady-state `S(L, L/2)` for each size; sizes are evaluated in parallel.
pub fn ee_vs_system_size(params: &ModelParams, sizes: &[usize], settings: &EvolutionSettings) -> Result<Vec<SizePoint>> {
    if sizes.is_empty() {
        return Err(Error::InvalidArgument("at least one system size is required".into()));
    }
    if let Some(&odd) = sizes.iter().find(|&&l| l % 2 != 0 || l < 2) {
        return Err(Error::InvalidArgument(format!(
            "system sizes must be even and at least 2, got {odd}"
        )));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("system sizes must be strictly ascending".into()));
    }
    par_map_ordered(sizes, |&l_cells| {
        let (trace, diagnostics) = half_chain_trace(params, l_cells, settings)?;
        let (s_mean, s_std) = mean_and_std(&trace.values);
        Ok(SizePoint { l_cells, s_mean, s_std, diagnostics })
    })
    .into_iter()
    .collect()
}

/// Window-averaged entropy profile `S(L, l)` for `l = 1..L-1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubsystemProfile {
    pub l_cells: usize,
    pub points: Vec<(usize, f64)>,
    pub diagnostics: RunDiagnostics,
}

/// Entropy for every subsystem size from one evolution.
pub fn ee_vs_subsystem(params: &ModelParams, l_cells: usize, settings: &EvolutionSettings) -> Result<SubsystemProfile> {
    if l_cells % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "profile runs need an even number of cells, got {l_cells}"
        )));
    }
    let lattice = LatticeSpec::half_filled(l_cells)?;
    let floquet = FloquetLattice::new(params, l_cells)?;
    let mut sums = vec![0.0; l_cells - 1];
    let mut count = 0usize;
    let mut diag = RunDiagnostics::new();
    evolve_frames(&floquet, initial_isometry(&lattice), settings.periods, |period, frame| {
        diag.observe_frame(frame);
        if !settings.in_window(period) {
            return Ok(());
        }
        let profile: Vec<f64> = (1..l_cells)
            .map(|l| frame_entropy(frame, &SubsystemSpec::leading(l)))
            .collect::<Result<_>>()?;
        for l in 1..l_cells {
            diag.observe_entropies(profile[l - 1], profile[l_cells - l - 1]);
        }
        for (acc, s) in sums.iter_mut().zip(&profile) {
            *acc += s;
        }
        count += 1;
        Ok(())
    })?;
    let points = sums
        .iter()
        .enumerate()
        .map(|(i, s)| (i + 1, s / count as f64))
        .collect();
    Ok(SubsystemProfile { l_cells, points, diagnostics: diag })
}

/// Linear fit `S(L, L/2) ~ g L + s0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub g: f64,
    pub s0: f64,
    pub g_stderr: f64,
    pub rss: f64,
}

pub fn fit_volume_law(points: &[(f64, f64)]) -> Result<ScalingFit> {
    let mut sizes: Vec<f64> = points.iter().map(|p| p.0).collect();
    sizes.sort_by(f64::total_cmp);
    sizes.dedup();
    if sizes.len() < 3 {
        return Err(Error::FitDegenerate(format!(
            "volume-law fit needs at least 3 distinct sizes, got {}",
            sizes.len()
        )));
    }
    let x: Vec<f64> = points.iter().map(|p| p.0).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();
    let fit = linear_least_squares(&[x, vec![1.0; points.len()]], &y)?;
    Ok(ScalingFit {
        g: fit.coefficients[0],
        s0: fit.coefficients[1],
        g_stderr: fit.standard_errors[0],
        rss: fit.residual_sum_of_squares,
    })
}

/// Fit `S(l) ~ g0 sin(pi l/L) + g1 ln sin(pi l/L) + g2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileFit {
    pub g0: f64,
    pub g1: f64,
    pub g2: f64,
    pub rss: f64,
    /// Number of points that entered the fit.
    pub n_points: usize,
}

/// Fits the profile over `2 <= l <= L - 2`; other points are ignored.
pub fn fit_subsystem_profile(points: &[(usize, f64)], l_cells: usize) -> Result<ProfileFit> {
    let interior: Vec<(usize, f64)> = points
        .iter()
        .copied()
        .filter(|&(l, _)| l >= 2 && l + 2 <= l_cells)
        .collect();
    if interior.len() < 4 {
        return Err(Error::FitDegenerate(format!(
            "profile fit needs at least 4 points with 2 <= l <= L-2, got {}",
            interior.len()
        )));
    }
    let chord: Vec<f64> = interior
        .iter()
        .map(|&(l, _)| (PI * l as f64 / l_cells as f64).sin())
        .collect();
    let log_chord: Vec<f64> = chord.iter().map(|s| s.ln()).collect();
    let y: Vec<f64> = interior.iter().map(|p| p.1).collect();
    let fit = linear_least_squares(&[chord, log_chord, vec![1.0; y.len()]], &y)?;
    Ok(ProfileFit {
        g0: fit.coefficients[0],
        g1: fit.coefficients[1],
        g2: fit.coefficients[2],
        rss: fit.residual_sum_of_squares,
        n_points: y.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EntanglementPhase {
    AreaLaw,
    VolumeLaw,
}

impl fmt::Display for EntanglementPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntanglementPhase::AreaLaw => "AREA_LAW",
            EntanglementPhase::VolumeLaw => "VOLUME_LAW",
        })
    }
}

/// Area law when `g < max(G_FLOOR, 3 g_stderr)`.
pub fn classify_entanglement(fit: &ScalingFit) -> EntanglementPhase {
    if fit.g < G_FLOOR.max(3.0 * fit.g_stderr) {
        EntanglementPhase::AreaLaw
    } else {
        EntanglementPhase::VolumeLaw
    }
}

/// Scaling fit, phase label and the size points behind them.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingOutcome {
    pub points: Vec<SizePoint>,
    pub fit: ScalingFit,
    pub phase: EntanglementPhase,
}

impl ScalingOutcome {
    pub fn diagnostics(&self) -> RunDiagnostics {
        self.points
            .iter()
            .fold(RunDiagnostics::new(), |acc, p| acc.merge(&p.diagnostics))
    }
}

/// Runs every size, fits the gradient and classifies it.
pub fn entanglement_scaling(params: &ModelParams, sizes: &[usize], settings: &EvolutionSettings) -> Result<ScalingOutcome> {
    let points = ee_vs_system_size(params, sizes, settings)?;
    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.l_cells as f64, p.s_mean)).collect();
    let fit = fit_volume_law(&xy)?;
    Ok(ScalingOutcome { points, fit, phase: classify_entanglement(&fit) })
}

/// One cell of an entanglement phase diagram. Failed cells keep their error
/// message.
#[derive(Clone, Debug, PartialEq)]
pub struct EntanglementRow {
    pub value1: f64,
    pub value2: f64,
    pub outcome: std::result::Result<(ScalingFit, EntanglementPhase), String>,
}

pub fn sweep_entanglement_diagram(
    axis1: &Axis,
    axis2: &Axis,
    fixed: &ModelParams,
    sizes: &[usize],
    settings: &EvolutionSettings,
) -> Result<Vec<EntanglementRow>> {
    let cells = sweep_cells(axis1, axis2, fixed)?;
    Ok(par_map_ordered(&cells, |cell| EntanglementRow {
        value1: cell.value1,
        value2: cell.value2,
        outcome: entanglement_scaling(&cell.params, sizes, settings)
            .map(|o| (o.fit, o.phase))
            .map_err(|e| e.to_string()),
    }))
}
