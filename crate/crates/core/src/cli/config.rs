//! Run configuration: command-line flags, optional config file, validation.
//!
//! Config files are TOML whose keys mirror the long flag names. A CSV written
//! by this tool can also be passed back as a config file: its leading `#`
//! lines hold the resolved configuration.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::Parser;

use crate::bloch::ModelParams;
use crate::entanglement::{EvolutionSettings, DEFAULT_PERIODS, DEFAULT_SIZES, DEFAULT_WINDOW};
use crate::error::{Error, Result};
use crate::spectral::{KGrid, DEFAULT_K_POINTS};
use crate::sweep::{Axis, ParamName};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "NHFLOQUET_WORKERS";
pub const DEFAULT_L_CELLS: usize = 80;
pub const DEFAULT_SPECTRUM_K_POINTS: usize = 512;

const KNOWN_KEYS: &[&str] = &[
    "command",
    "j1",
    "j2",
    "gamma",
    "l",
    "filling",
    "l-sub",
    "sizes",
    "periods",
    "window-start",
    "window-end",
    "n-points",
    "k-points",
    "axis1",
    "axis2",
    "output",
    "format",
    "workers",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Ratio,
    PtDiagram,
    Evolve,
    EeScaling,
    EeProfile,
    EeDiagram,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Ratio => "ratio",
            Command::PtDiagram => "pt-diagram",
            Command::Evolve => "evolve",
            Command::EeScaling => "ee-scaling",
            Command::EeProfile => "ee-profile",
            Command::EeDiagram => "ee-diagram",
        }
    }

    fn is_sweep(self) -> bool {
        matches!(self, Command::PtDiagram | Command::EeDiagram)
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "spectrum" => Command::Spectrum,
            "ratio" => Command::Ratio,
            "pt-diagram" => Command::PtDiagram,
            "evolve" => Command::Evolve,
            "ee-scaling" => Command::EeScaling,
            "ee-profile" => Command::EeProfile,
            "ee-diagram" => Command::EeDiagram,
            other => {
                return Err(Error::Config(format!(
                    "command: unknown command '{other}', expected one of spectrum, ratio, \
                     pt-diagram, evolve, ee-scaling, ee-profile, ee-diagram"
                )))
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Fully resolved and validated configuration of one CLI invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub j1: Option<f64>,
    pub j2: Option<f64>,
    pub gamma: Option<f64>,
    pub l_cells: usize,
    pub filling: usize,
    pub l_sub: usize,
    pub sizes: Vec<usize>,
    pub periods: usize,
    pub window_start: usize,
    pub window_end: usize,
    pub n_points: usize,
    pub k_points: usize,
    pub axis1: Option<Axis>,
    pub axis2: Option<Axis>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub workers: usize,
}

impl RunConfig {
    /// Model parameters; swept parameters are set to zero placeholders.
    pub fn model_params(&self) -> Result<ModelParams> {
        let swept = |p: ParamName| {
            self.axis1.map(|a| a.param) == Some(p) || self.axis2.map(|a| a.param) == Some(p)
        };
        let get = |v: Option<f64>, p: ParamName| match v {
            Some(x) => Ok(x),
            None if swept(p) => Ok(0.0),
            None => Err(Error::Config(format!("{p}: missing required model parameter"))),
        };
        let (j1, j2, gamma) = (
            get(self.j1, ParamName::J1)?,
            get(self.j2, ParamName::J2)?,
            get(self.gamma, ParamName::Gamma)?,
        );
        ModelParams::new(j1, j2, gamma).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn evolution(&self) -> Result<EvolutionSettings> {
        EvolutionSettings::new(self.periods, self.window_start, self.window_end)
    }

    pub fn k_grid(&self) -> Result<KGrid> {
        KGrid::new(self.n_points).map_err(|e| Error::Config(format!("n-points: {e}")))
    }

    /// `# key = value` lines describing every resolved field; parsing these
    /// lines back yields the same configuration.
    pub fn header(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "# {k} = {v}");
        };
        line("command", quote(self.command.as_str()));
        for (k, v) in [("j1", self.j1), ("j2", self.j2), ("gamma", self.gamma)] {
            if let Some(x) = v {
                line(k, quote(&format_float(x)));
            }
        }
        line("l", self.l_cells.to_string());
        line("filling", self.filling.to_string());
        line("l-sub", self.l_sub.to_string());
        let sizes: Vec<String> = self.sizes.iter().map(|s| s.to_string()).collect();
        line("sizes", quote(&sizes.join(",")));
        line("periods", self.periods.to_string());
        line("window-start", self.window_start.to_string());
        line("window-end", self.window_end.to_string());
        line("n-points", self.n_points.to_string());
        line("k-points", self.k_points.to_string());
        for (k, a) in [("axis1", self.axis1), ("axis2", self.axis2)] {
            if let Some(a) = a {
                line(
                    k,
                    quote(&format!(
                        "{}:{}:{}:{}",
                        a.param,
                        format_float(a.start),
                        format_float(a.end),
                        a.steps
                    )),
                );
            }
        }
        if let Some(p) = &self.output {
            line("output", quote(&p.display().to_string()));
        }
        line(
            "format",
            quote(match self.format {
                OutputFormat::Csv => "csv",
                OutputFormat::Json => "json",
            }),
        );
        line("workers", self.workers.to_string());
        out
    }
}

fn quote(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

/// 17 significant digits; negative zero prints as zero.
pub fn format_float(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

/// Parses a real number, optionally suffixed with `pi` (`0.5pi`, `-pi`, `2*pi`).
pub fn parse_real(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim();
    let value = if let Some(coef) = t.strip_suffix("pi") {
        let coef = coef.trim().trim_end_matches('*').trim();
        let c = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| format!("'{s}' is not a number or a multiple of pi"))?,
        };
        c * PI
    } else {
        t.parse::<f64>().map_err(|_| format!("'{s}' is not a number or a multiple of pi"))?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn parse_axis(s: &str) -> std::result::Result<Axis, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 4 {
        return Err(format!("'{s}' should look like name:start:end:steps, e.g. j1:-3pi:3pi:61"));
    }
    let param = ParamName::from_str(parts[0]).map_err(|e| e.to_string())?;
    let start = parse_real(parts[1])?;
    let end = parse_real(parts[2])?;
    let steps = parts[3]
        .trim()
        .parse::<usize>()
        .map_err(|_| format!("steps '{}' is not a positive integer", parts[3]))?;
    Axis::new(param, start, end, steps).map_err(|e| e.to_string())
}

#[derive(Parser, Debug)]
#[command(
    name = "nhfloquet",
    version,
    about = "Floquet spectra, PT phase diagrams and entanglement scaling of a periodically quenched non-Hermitian SSH chain"
)]
struct Cli {
    /// spectrum | ratio | pt-diagram | evolve | ee-scaling | ee-profile | ee-diagram
    command: Option<String>,
    /// TOML config file, or a CSV previously written by this tool
    #[arg(long)]
    config: Option<PathBuf>,
    /// Intracell hopping J1 (radians, or with a `pi` suffix)
    #[arg(long, allow_hyphen_values = true)]
    j1: Option<String>,
    /// Intercell hopping J2
    #[arg(long, allow_hyphen_values = true)]
    j2: Option<String>,
    /// Gain/loss strength gamma >= 0
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    /// Number of unit cells for evolve and ee-profile
    #[arg(long)]
    l: Option<String>,
    /// Number of fermions for evolve (default: half filling)
    #[arg(long)]
    filling: Option<String>,
    /// Subsystem size in unit cells for evolve (default: L/2)
    #[arg(long = "l-sub")]
    l_sub: Option<String>,
    /// Comma-separated even system sizes for ee-scaling and ee-diagram
    #[arg(long)]
    sizes: Option<String>,
    /// Number of driving periods
    #[arg(long)]
    periods: Option<String>,
    /// First period of the steady-state window
    #[arg(long = "window-start")]
    window_start: Option<String>,
    /// Last period of the steady-state window
    #[arg(long = "window-end")]
    window_end: Option<String>,
    /// Quasimomentum grid size for R and the dissipation gap
    #[arg(long = "n-points")]
    n_points: Option<String>,
    /// Number of quasimomenta listed by spectrum
    #[arg(long = "k-points")]
    k_points: Option<String>,
    /// First sweep axis, name:start:end:steps
    #[arg(long, allow_hyphen_values = true)]
    axis1: Option<String>,
    /// Second sweep axis, name:start:end:steps
    #[arg(long, allow_hyphen_values = true)]
    axis2: Option<String>,
    /// Output file (default: stdout)
    #[arg(long, short)]
    output: Option<String>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    /// Worker threads for parallel sweeps
    #[arg(long)]
    workers: Option<String>,
}

impl Cli {
    fn into_map(self) -> BTreeMap<String, String> {
        let pairs = [
            ("command", self.command),
            ("j1", self.j1),
            ("j2", self.j2),
            ("gamma", self.gamma),
            ("l", self.l),
            ("filling", self.filling),
            ("l-sub", self.l_sub),
            ("sizes", self.sizes),
            ("periods", self.periods),
            ("window-start", self.window_start),
            ("window-end", self.window_end),
            ("n-points", self.n_points),
            ("k-points", self.k_points),
            ("axis1", self.axis1),
            ("axis2", self.axis2),
            ("output", self.output),
            ("format", self.format),
            ("workers", self.workers),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
            .collect()
    }
}

/// Keeps the leading `#` lines of a CSV and strips the comment marker.
fn header_as_toml(text: &str) -> String {
    text.lines()
        .take_while(|l| l.starts_with('#'))
        .map(|l| l.trim_start_matches('#').trim_start())
        .collect::<Vec<_>>()
        .join("\n")
}

fn toml_to_map(text: &str) -> Result<BTreeMap<String, String>> {
    let table: toml::Table = text
        .parse()
        .map_err(|e| Error::Config(format!("config file is not valid TOML: {e}")))?;
    let mut map = BTreeMap::new();
    for (key, value) in table {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(Error::Config(format!(
                "{key}: unknown key, expected one of {}",
                KNOWN_KEYS.join(", ")
            )));
        }
        let s = match value {
            toml::Value::String(s) => s,
            toml::Value::Integer(i) => i.to_string(),
            toml::Value::Float(f) => format!("{f:?}"),
            toml::Value::Array(items) => items
                .iter()
                .map(|v| match v {
                    toml::Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect::<Vec<_>>()
                .join(","),
            other => {
                return Err(Error::Config(format!(
                    "{key}: unsupported value {other}"
                )))
            }
        };
        map.insert(key, s);
    }
    Ok(map)
}

/// Reads a config file; CSV outputs of this tool are accepted through their
/// provenance header.
pub fn load_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    if text.trim_start().starts_with('#') {
        toml_to_map(&header_as_toml(text))
    } else {
        toml_to_map(text)
    }
}

/// Resolves a configuration from the provenance header of an output file.
pub fn config_from_header(text: &str) -> Result<RunConfig> {
    resolve(toml_to_map(&header_as_toml(text))?)
}

/// Parses `argv` (program name first) plus the optional `--config` file.
/// Flags override file keys. `--help` and `--version` print and exit.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => return Err(Error::Config(e.to_string().trim_end().to_string())),
    };
    let mut map = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::Config(format!("config: cannot read {}: {e}", path.display()))
            })?;
            load_config_file(&text)?
        }
        None => BTreeMap::new(),
    };
    map.extend(cli.into_map());
    resolve(map)
}

fn take<T>(
    map: &BTreeMap<String, String>,
    key: &str,
    parse: impl Fn(&str) -> std::result::Result<T, String>,
) -> Result<Option<T>> {
    map.get(key)
        .map(|v| parse(v).map_err(|e| Error::Config(format!("{key}: {e}"))))
        .transpose()
}

fn parse_count(s: &str) -> std::result::Result<usize, String> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| format!("'{s}' is not a non-negative integer"))
}

fn parse_sizes(s: &str) -> std::result::Result<Vec<usize>, String> {
    s.split(',')
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .map(parse_count)
        .collect()
}

fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&w| w >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Builds and validates a [`RunConfig`] from string-valued keys.
pub fn resolve(map: BTreeMap<String, String>) -> Result<RunConfig> {
    if let Some(k) = map.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
        return Err(config_err(format!("{k}: unknown key")));
    }
    let command = take(&map, "command", |s| Command::from_str(s).map_err(|e| e.to_string()))?
        .ok_or_else(|| config_err("command: missing, expected one of spectrum, ratio, pt-diagram, evolve, ee-scaling, ee-profile, ee-diagram"))?;

    let j1 = take(&map, "j1", parse_real)?;
    let j2 = take(&map, "j2", parse_real)?;
    let gamma = take(&map, "gamma", parse_real)?;
    if let Some(g) = gamma {
        if g < 0.0 {
            return Err(config_err(format!("gamma: must be >= 0, got {g}")));
        }
    }
    let l_cells = take(&map, "l", parse_count)?.unwrap_or(DEFAULT_L_CELLS);
    let filling = take(&map, "filling", parse_count)?.unwrap_or(l_cells);
    let l_sub = take(&map, "l-sub", parse_count)?.unwrap_or(l_cells / 2);
    let sizes = take(&map, "sizes", parse_sizes)?.unwrap_or_else(|| DEFAULT_SIZES.to_vec());
    let periods = take(&map, "periods", parse_count)?.unwrap_or(DEFAULT_PERIODS);
    let window_start = take(&map, "window-start", parse_count)?.unwrap_or(DEFAULT_WINDOW.0);
    let window_end = take(&map, "window-end", parse_count)?.unwrap_or(DEFAULT_WINDOW.1);
    let n_points = take(&map, "n-points", parse_count)?.unwrap_or(DEFAULT_K_POINTS);
    let k_points = take(&map, "k-points", parse_count)?.unwrap_or(DEFAULT_SPECTRUM_K_POINTS);
    let axis1 = take(&map, "axis1", parse_axis)?;
    let axis2 = take(&map, "axis2", parse_axis)?;
    let output = map.get("output").map(PathBuf::from);
    let format = match map.get("format").map(|s| s.as_str()) {
        None | Some("csv") => OutputFormat::Csv,
        Some("json") => OutputFormat::Json,
        Some(other) => return Err(config_err(format!("format: '{other}' is not csv or json"))),
    };
    let workers = take(&map, "workers", parse_count)?.unwrap_or_else(default_workers);

    let cfg = RunConfig {
        command,
        j1,
        j2,
        gamma,
        l_cells,
        filling,
        l_sub,
        sizes,
        periods,
        window_start,
        window_end,
        n_points,
        k_points,
        axis1,
        axis2,
        output,
        format,
        workers,
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<()> {
    if cfg.workers == 0 {
        return Err(config_err("workers: must be at least 1"));
    }
    if cfg.command.is_sweep() {
        let a1 = cfg.axis1.ok_or_else(|| config_err("axis1: required for sweeps, e.g. --axis1 j1:-3pi:3pi:61"))?;
        let a2 = cfg.axis2.ok_or_else(|| config_err("axis2: required for sweeps, e.g. --axis2 gamma:0:2pi:41"))?;
        if a1.param == a2.param {
            return Err(config_err(format!("axis2: must differ from axis1, both vary {}", a1.param)));
        }
    } else if cfg.axis1.is_some() || cfg.axis2.is_some() {
        return Err(config_err(format!(
            "axis1/axis2: only pt-diagram and ee-diagram take sweep axes, not {}",
            cfg.command.as_str()
        )));
    }
    cfg.model_params()?;

    let needs_evolution = matches!(
        cfg.command,
        Command::Evolve | Command::EeScaling | Command::EeProfile | Command::EeDiagram
    );
    if needs_evolution && cfg.periods == 0 {
        return Err(config_err("periods: must be at least 1"));
    }
    let windowed = matches!(cfg.command, Command::EeScaling | Command::EeProfile | Command::EeDiagram);
    if windowed {
        cfg.evolution().map_err(|_| {
            config_err(format!(
                "window-start/window-end: need window-start < window-end <= periods, got {}..{} with {} periods",
                cfg.window_start, cfg.window_end, cfg.periods
            ))
        })?;
    }
    match cfg.command {
        Command::Spectrum => {
            if cfg.k_points == 0 {
                return Err(config_err("k-points: must be at least 1"));
            }
        }
        Command::Ratio | Command::PtDiagram => {
            cfg.k_grid()?;
        }
        Command::Evolve => {
            if cfg.l_cells < 2 {
                return Err(config_err(format!("l: need at least 2 unit cells, got {}", cfg.l_cells)));
            }
            if cfg.filling == 0 || cfg.filling > 2 * cfg.l_cells {
                return Err(config_err(format!(
                    "filling: need 1 <= filling <= 2L = {}, got {}",
                    2 * cfg.l_cells,
                    cfg.filling
                )));
            }
            if cfg.l_sub == 0 || cfg.l_sub >= cfg.l_cells {
                return Err(config_err(format!(
                    "l-sub: need 1 <= l-sub <= L-1, got {}",
                    cfg.l_sub
                )));
            }
        }
        Command::EeProfile => {
            if cfg.l_cells < 6 || cfg.l_cells % 2 != 0 {
                return Err(config_err(format!(
                    "l: ee-profile needs an even L >= 6, got {}",
                    cfg.l_cells
                )));
            }
        }
        Command::EeScaling | Command::EeDiagram => {
            if cfg.sizes.len() < 3 {
                return Err(config_err("sizes: need at least 3 sizes for the gradient fit"));
            }
            if cfg.sizes.iter().any(|&l| l < 2 || l % 2 != 0) {
                return Err(config_err("sizes: every size must be even and at least 2"));
            }
            if cfg.sizes.windows(2).any(|w| w[0] >= w[1]) {
                return Err(config_err("sizes: must be strictly ascending"));
            }
        }
    }
    Ok(())
}
