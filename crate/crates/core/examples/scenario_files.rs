//! Runs a bundled scenario file and writes the trace, metrics, normalised
//! config and checksummed manifest, as the `run` subcommand does.
//!
//! ```bash
//! cargo run --release --example scenario_files -- scenarios/setpoint_step.json /tmp/setpoint
//! ```

use std::path::PathBuf;

use active_pid::cli::{cmd_run, read_output, RunManifest};

fn main() -> active_pid::Result<()> {
    let mut args = std::env::args().skip(1);
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let config = args
        .next()
        .map_or(root.join("scenarios/step_disturbance.json"), PathBuf::from);
    let out = args
        .next()
        .map_or(std::env::temp_dir().join("active-pid-example"), PathBuf::from);

    let mut manifest = RunManifest::new(&config, &out);
    manifest.overrides.push(("sim.record_stride".into(), 100.0));
    cmd_run(&mut manifest)?;

    for file in &manifest.emitted {
        println!("{:<24} {:<6} {}", file.name, file.kind, file.checksum);
    }
    let metrics = read_output(&out, "metrics.json")?;
    println!(
        "{}",
        serde_json::to_string_pretty(&metrics["metrics"]).unwrap_or_default()
    );
    Ok(())
}
