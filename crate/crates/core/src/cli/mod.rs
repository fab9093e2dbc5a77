//! Scenario runner: JSON configuration, CSV/JSON outputs and the
//! `run`, `sweep`, `compare-pid` and `tune` commands.

mod commands;
mod config;
mod output;

pub use commands::{
    cmd_compare_pid, cmd_run, cmd_sweep, cmd_tune, read_output, EmittedFile, RunManifest, DEFAULT_COMPARE_TOLERANCE,
};
pub use config::{dump_config, load_config, parse_config};
pub use output::{format_number, trace_header, write_trace};
