//! Command dispatch and table serialization.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write as _;

use crate::bloch::{quasienergy, Quasimomentum};
use crate::entanglement::{
    entanglement_scaling, ee_vs_subsystem, fit_subsystem_profile, frame_entropy,
    sweep_entanglement_diagram, RunDiagnostics, SubsystemSpec,
};
use crate::error::{Error, Result};
use crate::lattice::{evolve_frames, initial_isometry, FloquetLattice, LatticeSpec};
use crate::spectral::{classify_pt, sweep_pt_diagram};

use super::config::{format_float, Command, OutputFormat, RunConfig};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(usize),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Cell::Float(x) => serde_json::Value::from(*x + 0.0),
            Cell::Int(i) => serde_json::Value::from(*i),
            Cell::Text(s) => serde_json::Value::from(s.as_str()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn render(&self, out: &mut String) {
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
    }
}

/// Output of one command: the main table followed by optional trailing
/// blocks (fit results, summaries).
#[derive(Clone, Debug)]
pub struct Report {
    pub config: RunConfig,
    pub tables: Vec<Table>,
    /// Invariant checks accumulated over all evolutions, if any were run.
    pub diagnostics: Option<RunDiagnostics>,
}

impl Report {
    /// Provenance header lines, each starting with `#`.
    pub fn header(&self) -> String {
        self.config.header()
    }

    /// CSV without the provenance header; blocks are separated by a blank line.
    pub fn body(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.tables.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            t.render(&mut out);
        }
        out
    }

    pub fn to_csv(&self) -> String {
        format!("{}{}", self.header(), self.body())
    }

    pub fn to_json(&self) -> String {
        let header: String = self
            .header()
            .lines()
            .map(|l| format!("{}\n", l.trim_start_matches('#').trim_start()))
            .collect();
        let config: toml::Table = header.parse().unwrap_or_default();
        let tables: Vec<serde_json::Value> = self
            .tables
            .iter()
            .map(|t| {
                serde_json::json!({
                    "columns": t.columns,
                    "rows": t.rows.iter()
                        .map(|r| r.iter().map(Cell::to_json).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                })
            })
            .collect();
        let doc = serde_json::json!({ "config": config, "tables": tables });
        let mut s = serde_json::to_string_pretty(&doc).unwrap_or_default();
        s.push('\n');
        s
    }

    pub fn render(&self) -> String {
        match self.config.format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

/// Runs the configured command on a pool of `config.workers` threads.
pub fn execute(config: &RunConfig) -> Result<Report> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("workers: cannot start thread pool: {e}")))?;
    pool.install(|| dispatch(config))
}

/// Executes and writes the result to `config.output`, or stdout.
pub fn run(config: &RunConfig) -> Result<Report> {
    let report = execute(config)?;
    let text = report.render();
    match &config.output {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
        })?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(report)
}

fn dispatch(cfg: &RunConfig) -> Result<Report> {
    let params = cfg.model_params()?;
    let mut diagnostics = None;
    let tables = match cfg.command {
        Command::Spectrum => {
            let mut t = Table::new(&["k", "reE_plus", "imE_plus", "reE_minus", "imE_minus", "cosE"]);
            for m in 0..cfg.k_points {
                let k = -PI + 2.0 * PI * m as f64 / cfg.k_points as f64;
                let q = quasienergy(&params, Quasimomentum::new(k));
                t.rows.push(vec![
                    Cell::Float(k),
                    Cell::Float(q.e_plus.re),
                    Cell::Float(q.e_plus.im),
                    Cell::Float(q.e_minus.re),
                    Cell::Float(q.e_minus.im),
                    Cell::Float(q.cos_e),
                ]);
            }
            vec![t]
        }
        Command::Ratio => {
            let d = classify_pt(&params, &cfg.k_grid()?);
            let mut t = Table::new(&["j1", "j2", "gamma", "R", "gap", "phase"]);
            t.rows.push(vec![
                Cell::Float(params.j1()),
                Cell::Float(params.j2()),
                Cell::Float(params.gamma()),
                Cell::Float(d.r_ratio),
                Cell::Float(d.dissipation_gap),
                Cell::Text(d.phase.to_string()),
            ]);
            vec![t]
        }
        Command::PtDiagram => {
            let (a1, a2) = axes(cfg)?;
            let rows = sweep_pt_diagram(&a1, &a2, &params, &cfg.k_grid()?)?;
            let mut t = Table::new(&[a1.param.as_str(), a2.param.as_str(), "R", "gap", "phase"]);
            for r in rows {
                t.rows.push(vec![
                    Cell::Float(r.value1),
                    Cell::Float(r.value2),
                    Cell::Float(r.diagnostics.r_ratio),
                    Cell::Float(r.diagnostics.dissipation_gap),
                    Cell::Text(r.diagnostics.phase.to_string()),
                ]);
            }
            vec![t]
        }
        Command::Evolve => {
            let lattice = LatticeSpec::new(cfg.l_cells, cfg.filling)?;
            let propagator = FloquetLattice::new(&params, cfg.l_cells)?;
            let sub = SubsystemSpec::leading(cfg.l_sub);
            let mut t = Table::new(&["period", "S"]);
            evolve_frames(&propagator, initial_isometry(&lattice), cfg.periods, |period, frame| {
                t.rows.push(vec![Cell::Int(period), Cell::Float(frame_entropy(frame, &sub)?)]);
                Ok(())
            })?;
            vec![t]
        }
        Command::EeScaling => {
            let outcome = entanglement_scaling(&params, &cfg.sizes, &cfg.evolution()?)?;
            diagnostics = Some(outcome.diagnostics());
            let mut t = Table::new(&["L", "S_mean", "S_std"]);
            for p in &outcome.points {
                t.rows.push(vec![Cell::Int(p.l_cells), Cell::Float(p.s_mean), Cell::Float(p.s_std)]);
            }
            let mut fit = Table::new(&["g", "s0", "g_stderr", "label"]);
            fit.rows.push(vec![
                Cell::Float(outcome.fit.g),
                Cell::Float(outcome.fit.s0),
                Cell::Float(outcome.fit.g_stderr),
                Cell::Text(outcome.phase.to_string()),
            ]);
            vec![t, fit]
        }
        Command::EeProfile => {
            let profile = ee_vs_subsystem(&params, cfg.l_cells, &cfg.evolution()?)?;
            diagnostics = Some(profile.diagnostics);
            let pf = fit_subsystem_profile(&profile.points, cfg.l_cells)?;
            let mut t = Table::new(&["l", "S_mean"]);
            for &(l, s) in &profile.points {
                t.rows.push(vec![Cell::Int(l), Cell::Float(s)]);
            }
            let mut fit = Table::new(&["g0", "g1", "g2", "rss", "n_points"]);
            fit.rows.push(vec![
                Cell::Float(pf.g0),
                Cell::Float(pf.g1),
                Cell::Float(pf.g2),
                Cell::Float(pf.rss),
                Cell::Int(pf.n_points),
            ]);
            vec![t, fit]
        }
        Command::EeDiagram => {
            let (a1, a2) = axes(cfg)?;
            let rows = sweep_entanglement_diagram(&a1, &a2, &params, &cfg.sizes, &cfg.evolution()?)?;
            let mut t = Table::new(&[a1.param.as_str(), a2.param.as_str(), "g", "label"]);
            let mut failed = 0;
            for r in &rows {
                let (g, label) = match &r.outcome {
                    Ok((fit, phase)) => (Cell::Float(fit.g), Cell::Text(phase.to_string())),
                    Err(msg) => {
                        failed += 1;
                        eprintln!(
                            "cell ({}, {}) failed: {msg}",
                            format_float(r.value1),
                            format_float(r.value2)
                        );
                        (Cell::Text(String::new()), Cell::Text("FAILED".into()))
                    }
                };
                t.rows.push(vec![Cell::Float(r.value1), Cell::Float(r.value2), g, label]);
            }
            let mut summary = Table::new(&["rows", "failed"]);
            summary.rows.push(vec![Cell::Int(rows.len()), Cell::Int(failed)]);
            vec![t, summary]
        }
    };
    Ok(Report {
        config: cfg.clone(),
        tables,
        diagnostics,
    })
}

fn axes(cfg: &RunConfig) -> Result<(crate::sweep::Axis, crate::sweep::Axis)> {
    match (cfg.axis1, cfg.axis2) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::Config("axis1/axis2: both sweep axes are required".into())),
    }
}
