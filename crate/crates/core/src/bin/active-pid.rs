use std::path::PathBuf;
use std::process::ExitCode;

use active_pid::cli::{cmd_compare_pid, cmd_run, cmd_sweep, cmd_tune, RunManifest};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "active-pid", version, about = "Closed-loop active-inference PID scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write trace.csv and metrics.json
    Run(Common),
    /// Run a scenario once per value of one parameter and write sweep.csv
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Dotted parameter path, e.g. plant.a_p or pi_w0
        #[arg(long)]
        param: String,
        /// Comma-separated values
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Vec<f64>,
    },
    /// Compare the clamped controller with a classical PID on the same errors
    ComparePid(Common),
    /// Learn precisions online and report the gain trajectory
    Tune(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Override a scalar parameter: path=value (repeatable)
    #[arg(long = "set", value_parser = parse_override)]
    set: Vec<(String, f64)>,
    #[arg(long)]
    tolerance: Option<f64>,
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (path, value) = s.split_once('=').ok_or("expected path=value")?;
    let value = value.trim().parse::<f64>().map_err(|e| format!("{value}: {e}"))?;
    Ok((path.trim().to_string(), value))
}

impl Common {
    fn manifest(self) -> RunManifest {
        let mut m = RunManifest::new(self.config, self.out);
        m.overrides = self.set;
        m.seed = self.seed;
        m.tolerance = self.tolerance;
        m
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(c) => cmd_run(&mut c.manifest()),
        Command::Sweep { common, param, values } => cmd_sweep(&mut common.manifest(), &param, &values),
        Command::ComparePid(c) => cmd_compare_pid(&mut c.manifest()),
        Command::Tune(c) => cmd_tune(&mut c.manifest()),
    };
    match result {
        Ok(0) => ExitCode::SUCCESS,
        Ok(code) => {
            eprintln!("tolerance not met");
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
