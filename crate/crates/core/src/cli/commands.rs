use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use super::config::{dump_config, load_config};
use super::output::{format_number, write_sweep, write_trace};
use crate::controller::gains_from_precisions;
use crate::error::{Error, Result};
use crate::genmodel::PrecisionState;
use crate::simloop::{compare_with_pid, run_closed_loop, scenario_metrics, sweep, ScenarioConfig, Trajectory};

/// Default bound on the action deviation accepted by `compare-pid`.
pub const DEFAULT_COMPARE_TOLERANCE: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmittedFile {
    pub name: String,
    pub kind: String,
    /// Hex SHA-256 of the file contents.
    pub checksum: String,
}

/// Inputs and outputs of one command invocation.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub config_path: PathBuf,
    pub out_dir: PathBuf,
    pub overrides: Vec<(String, f64)>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub emitted: Vec<EmittedFile>,
}

impl RunManifest {
    pub fn new(config_path: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            config_path: config_path.into(),
            out_dir: out_dir.into(),
            overrides: Vec::new(),
            seed: None,
            tolerance: None,
            emitted: Vec::new(),
        }
    }

    /// The scenario with `--set` overrides and the seed override applied.
    pub fn scenario(&self) -> Result<ScenarioConfig> {
        let mut cfg = load_config(&self.config_path)?;
        for (path, value) in &self.overrides {
            cfg = cfg.with_param(path, *value)?;
        }
        if let Some(seed) = self.seed {
            cfg.sim.seed = seed;
        }
        cfg.normalise();
        Ok(cfg)
    }

    fn emit(&mut self, name: &str, kind: &str, bytes: &[u8]) -> Result<()> {
        fs::create_dir_all(&self.out_dir)?;
        let path = self.out_dir.join(name);
        fs::write(&path, bytes).map_err(|e| Error::Io(format!("writing {}: {e}", path.display())))?;
        let checksum = Sha256::digest(bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect::<String>();
        self.emitted.push(EmittedFile {
            name: name.to_string(),
            kind: kind.to_string(),
            checksum,
        });
        Ok(())
    }

    fn emit_json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
        text.push('\n');
        self.emit(name, "json", text.as_bytes())
    }

    fn emit_config(&mut self, cfg: &ScenarioConfig) -> Result<()> {
        let mut text = dump_config(cfg);
        text.push('\n');
        self.emit("normalised-config.json", "config", text.as_bytes())
    }

    fn emit_trace(&mut self, traj: &Trajectory) -> Result<()> {
        let mut buf = Vec::new();
        write_trace(&mut buf, traj)?;
        self.emit("trace.csv", "csv", &buf)
    }

    fn finish(&mut self) -> Result<()> {
        let listing = serde_json::to_string_pretty(&self.emitted).map_err(|e| Error::Io(e.to_string()))?;
        fs::write(self.out_dir.join("manifest.json"), listing + "\n")?;
        Ok(())
    }

    pub fn checksum(&self, name: &str) -> Option<&str> {
        self.emitted
            .iter()
            .find(|f| f.name == name)
            .map(|f| f.checksum.as_str())
    }
}

/// Runs one scenario: `trace.csv`, `metrics.json`, `normalised-config.json`.
pub fn cmd_run(manifest: &mut RunManifest) -> Result<i32> {
    let cfg = manifest.scenario()?;
    let traj = run_closed_loop(&cfg)?;
    let metrics = scenario_metrics(&cfg, &traj)?;
    let window = cfg.metrics_window();
    manifest.emit_trace(&traj)?;
    manifest.emit_json(
        "metrics.json",
        &json!({
            "window": [window.0, window.1],
            "reference": cfg.setpoint_at(window.1),
            "metrics": metrics,
        }),
    )?;
    manifest.emit_config(&cfg)?;
    manifest.finish()?;
    Ok(0)
}

/// One run per value of `path`: `sweep.csv`.
pub fn cmd_sweep(manifest: &mut RunManifest, path: &str, values: &[f64]) -> Result<i32> {
    let cfg = manifest.scenario()?;
    let rows = sweep(&cfg, path, values)?;
    let mut buf = Vec::new();
    write_sweep(&mut buf, &rows)?;
    manifest.emit("sweep.csv", "csv", &buf)?;
    manifest.emit_config(&cfg)?;
    manifest.finish()?;
    Ok(0)
}

/// Clamp-mode controller against the classical PID oracle.
///
/// Also repeats the comparison at half the step to estimate the first-order
/// constant `C` in `deviation <= C * dt`. Exits with 1 if the deviation at the
/// configured step exceeds the tolerance.
pub fn cmd_compare_pid(manifest: &mut RunManifest) -> Result<i32> {
    let cfg = manifest.scenario()?;
    let tolerance = manifest.tolerance.unwrap_or(DEFAULT_COMPARE_TOLERANCE);
    let cmp = compare_with_pid(&cfg)?;
    let mut half = cfg.clone();
    half.sim.dt /= 2.0;
    let cmp_half = compare_with_pid(&half)?;

    let mut buf = String::from("t,error,u_active,u_pid\n");
    for i in 0..cmp.t.len() {
        buf.push_str(&format!(
            "{},{},{},{}\n",
            format_number(cmp.t[i]),
            format_number(cmp.error[i]),
            format_number(cmp.u_active[i]),
            format_number(cmp.u_pid[i])
        ));
    }
    manifest.emit("compare.csv", "csv", buf.as_bytes())?;
    let pass = cmp.max_abs_deviation <= tolerance;
    let ratio = if cmp_half.max_abs_deviation > 0.0 {
        Some(cmp.max_abs_deviation / cmp_half.max_abs_deviation)
    } else {
        None
    };
    manifest.emit_json(
        "compare.json",
        &json!({
            "gains": cmp.gains,
            "dt": cfg.sim.dt,
            "max_abs_deviation": cmp.max_abs_deviation,
            "max_abs_deviation_half_dt": cmp_half.max_abs_deviation,
            "halving_ratio": ratio,
            "c_estimate": cmp.max_abs_deviation / cfg.sim.dt,
            "tolerance": tolerance,
            "pass": pass,
        }),
    )?;
    manifest.emit_config(&cfg)?;
    manifest.finish()?;
    Ok(if pass { 0 } else { 1 })
}

fn iae_between(traj: &Trajectory, start: f64, end: f64) -> f64 {
    traj.rows
        .iter()
        .filter(|r| r.t >= start && r.t <= end)
        .map(|r| (r.y - r.v).abs())
        .sum::<f64>()
        * traj.dt_record
}

/// Runs with precision learning on: `gains.csv`, `tune_report.json`, `trace.csv`.
pub fn cmd_tune(manifest: &mut RunManifest) -> Result<i32> {
    let mut cfg = manifest.scenario()?;
    cfg.controller.learn_precisions = true;
    cfg.validate()?;
    let traj = run_closed_loop(&cfg)?;
    let kappa_a = cfg.controller.kappa_a;
    let gains_at =
        |pi_z: &[f64], pi_w: &[f64]| gains_from_precisions(&PrecisionState::from_precisions(pi_z, pi_w), kappa_a);

    let depth = cfg.controller.depth;
    let mut buf = String::from("t,ki,kp,kd");
    for i in 0..depth - 1 {
        buf.push_str(&format!(",pi_w{i}"));
    }
    buf.push('\n');
    for r in &traj.rows {
        let g = gains_at(&r.pi_z, &r.pi_w)?;
        let mut fields = vec![r.t, g.ki, g.kp, g.kd];
        fields.extend(&r.pi_w);
        buf.push_str(&fields.into_iter().map(format_number).collect::<Vec<_>>().join(","));
        buf.push('\n');
    }
    manifest.emit("gains.csv", "csv", buf.as_bytes())?;

    let duration = cfg.sim.duration;
    let tail_start = 0.8 * duration;
    let tail: Vec<_> = traj.rows.iter().filter(|r| r.t >= tail_start).collect();
    let mse_eps_z: Vec<f64> = (0..depth)
        .map(|i| tail.iter().map(|r| r.eps_z[i].powi(2)).sum::<f64>() / tail.len().max(1) as f64)
        .collect();
    let first = &traj.rows[0];
    let last = traj.rows.last().expect("a run records at least one row");
    manifest.emit_json(
        "tune_report.json",
        &json!({
            "iae_first_20pct": iae_between(&traj, 0.0, 0.2 * duration),
            "iae_last_20pct": iae_between(&traj, tail_start, duration),
            "initial_gains": gains_at(&first.pi_z, &first.pi_w)?,
            "final_gains": gains_at(&last.pi_z, &last.pi_w)?,
            "final_pi_z": last.pi_z,
            "final_pi_w": last.pi_w,
            "final_variance_z": last.pi_z.iter().map(|p| 1.0 / p).collect::<Vec<_>>(),
            "mse_eps_z_last_20pct": mse_eps_z,
        }),
    )?;
    manifest.emit_trace(&traj)?;
    manifest.emit_config(&cfg)?;
    manifest.finish()?;
    Ok(0)
}

/// Reads a previously emitted JSON file from the output directory.
pub fn read_output(out_dir: &Path, name: &str) -> Result<serde_json::Value> {
    let text = fs::read_to_string(out_dir.join(name))?;
    serde_json::from_str(&text).map_err(|e| Error::Io(e.to_string()))
}
