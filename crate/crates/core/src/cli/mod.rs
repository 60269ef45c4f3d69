//! Command-line front end.

mod config;
mod run;

pub use config::{
    config_from_header, format_float, load_config_file, parse_config, parse_real, resolve, Command,
    OutputFormat, RunConfig, DEFAULT_L_CELLS, DEFAULT_SPECTRUM_K_POINTS, WORKERS_ENV,
};
pub use run::{execute, run, Cell, Report, Table};
