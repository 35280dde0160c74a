//! Command-line front end: dataset loading, the `fit`, `simulate`,
//! `ellipse` and `moments` commands, and their file formats.

pub mod args;
pub mod commands;
pub mod data;
mod output;

pub use commands::{cmd_ellipse, cmd_fit, cmd_moments, cmd_simulate, FitDocument, Outcome, Status};
pub use data::{apply_truncation, load_csv, ColumnSelector, DatasetFile};
pub use output::write_atomic;

use anyhow::Result;
use args::{with_config, Cli, Command};

/// Runs a parsed command line after folding in its `--config` file.
pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Fit(a) => {
            let cfg = a.common.config.clone();
            cmd_fit(with_config(a, cfg.as_ref(), args::FitArgs::merge)?)
        }
        Command::Simulate(a) => {
            let cfg = a.common.config.clone();
            cmd_simulate(with_config(a, cfg.as_ref(), args::SimulateArgs::merge)?)
        }
        Command::Ellipse(a) => {
            let cfg = a.common.config.clone();
            cmd_ellipse(with_config(a, cfg.as_ref(), args::EllipseArgs::merge)?)
        }
        Command::Moments(a) => {
            let cfg = a.common.config.clone();
            cmd_moments(with_config(a, cfg.as_ref(), args::MomentsArgs::merge)?)
        }
    }
}
