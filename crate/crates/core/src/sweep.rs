//! Parameter axes and the two-dimensional cell grids used by phase-diagram sweeps.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::ModelParams;
use crate::error::{Error, Result};

/// A model parameter that a sweep axis can vary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamName {
    J1,
    J2,
    Gamma,
}

impl ParamName {
    pub fn as_str(self) -> &'static str {
        match self {
            ParamName::J1 => "j1",
            ParamName::J2 => "j2",
            ParamName::Gamma => "gamma",
        }
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ParamName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "j1" => Ok(ParamName::J1),
            "j2" => Ok(ParamName::J2),
            "gamma" => Ok(ParamName::Gamma),
            other => Err(Error::Config(format!(
                "unknown axis parameter '{other}', expected one of j1, j2, gamma"
            ))),
        }
    }
}

/// Evenly spaced values of one parameter, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub param: ParamName,
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(param: ParamName, start: f64, end: f64, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(Error::Config(format!(
                "axis {param} needs at least 2 steps, got {steps}"
            )));
        }
        if !(start.is_finite() && end.is_finite()) {
            return Err(Error::Config(format!("axis {param} has a non-finite range")));
        }
        Ok(Self { param, start, end, steps })
    }

    pub fn values(&self) -> Vec<f64> {
        let span = self.end - self.start;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.end
                } else {
                    self.start + span * (i as f64) / last
                }
            })
            .collect()
    }
}

/// Replaces one coupling of `base`.
///
/// Gain/loss enters the dynamics only up to a sublattice relabelling, so a
/// negative axis value of `gamma` is evaluated at `|gamma|`.
pub fn with_param(base: &ModelParams, param: ParamName, value: f64) -> Result<ModelParams> {
    let (mut j1, mut j2, mut gamma) = (base.j1(), base.j2(), base.gamma());
    match param {
        ParamName::J1 => j1 = value,
        ParamName::J2 => j2 = value,
        ParamName::Gamma => gamma = value.abs(),
    }
    ModelParams::new(j1, j2, gamma)
}

/// One cell of a two-axis sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepCell {
    pub value1: f64,
    pub value2: f64,
    pub params: ModelParams,
}

/// Row-major cells of the Cartesian product `axis1 x axis2`.
pub fn sweep_cells(axis1: &Axis, axis2: &Axis, fixed: &ModelParams) -> Result<Vec<SweepCell>> {
    if axis1.param == axis2.param {
        return Err(Error::Config(format!(
            "sweep axes must differ, both are {}",
            axis1.param
        )));
    }
    let (v1, v2) = (axis1.values(), axis2.values());
    let mut cells = Vec::with_capacity(v1.len() * v2.len());
    for &a in &v1 {
        for &b in &v2 {
            let p = with_param(&with_param(fixed, axis1.param, a)?, axis2.param, b)?;
            cells.push(SweepCell { value1: a, value2: b, params: p });
        }
    }
    Ok(cells)
}

/// Maps `f` over `items` on the current rayon pool, keeping input order.
pub fn par_map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}
