//! Experiment harness around the simulator core: configuration, the four
//! CLI subcommands, result-file IO and report emission (CSV + SVG).

pub mod commands;
pub mod config;
pub mod diag;
pub mod resultfile;
pub mod svg;

pub use commands::{cmd_merge, cmd_report, cmd_run, cmd_topology};
pub use config::{ConfigFile, ConfigLayers, ExperimentConfig, OverlaySource};
