#![allow(dead_code)]

pub mod fd;

use std::path::PathBuf;

use active_pid::cli::parse_config;
use active_pid::controller::{ControllerConfig, ControllerState};
use active_pid::gencoords::GeneralisedSignal;
use active_pid::genmodel::{GenerativeModel, PrecisionState};
use active_pid::simloop::{ScenarioConfig, Trajectory};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde_json::Value;

pub fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

pub fn bundled_scenarios() -> Vec<PathBuf> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(scenario_dir())
        .expect("scenario directory")
        .map(|e| e.expect("dir entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
}

pub fn scenario(name: &str) -> ScenarioConfig {
    let text = std::fs::read_to_string(scenario_dir().join(format!("{name}.json"))).expect("scenario file");
    parse_config(&text).expect("valid scenario")
}

pub fn config(doc: Value) -> ScenarioConfig {
    parse_config(&doc.to_string()).expect("valid config")
}

/// Clamp-mode loop on the default first-order plant with a unit load step at 10 s.
pub fn load_step(ki: f64, kp: f64, kd: f64) -> ScenarioConfig {
    config(serde_json::json!({
        "disturbance": { "kind": "step", "amplitude": 1.0, "onset": 10.0 },
        "controller": { "clamp_expectations": true, "pi_z": [ki, kp, kd] },
        "sim": { "duration": 60.0, "dt": 1e-3, "record_stride": 1 }
    }))
}

/// Unclamped loop with a unit set-point step at 5 s.
pub fn setpoint_step(pi_w0: f64) -> ScenarioConfig {
    config(serde_json::json!({
        "setpoints": [{ "time": 5.0, "value": 1.0 }],
        "controller": { "pi_z": [1.0, 1.0, 0.0], "pi_w": [pi_w0, 1.0] },
        "sim": { "duration": 60.0, "dt": 1e-3, "record_stride": 10 }
    }))
}

/// Rectangle-rule integral of `f(row)` over rows with `t >= start`.
pub fn integrate_from(traj: &Trajectory, start: f64, f: impl Fn(&active_pid::simloop::TrajectoryRow) -> f64) -> f64 {
    traj.rows.iter().filter(|r| r.t >= start - 1e-12).map(f).sum::<f64>() * traj.dt_record
}

/// 10-90% rise time of `xs` from `from` toward `to`, after `start`.
pub fn rise_time(ts: &[f64], xs: &[f64], start: f64, from: f64, to: f64) -> Option<f64> {
    let span = to - from;
    let crossing = |level: f64| {
        ts.iter()
            .zip(xs)
            .find(|(t, x)| **t >= start && (**x - from) / span >= level)
            .map(|(t, _)| *t)
    };
    Some(crossing(0.9)? - crossing(0.1)?)
}

pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n
}

/// Feeds clamped expectations at zero with observations whose orders are
/// independent Gaussian with the given standard deviations. The smoothed
/// squared errors start at their stationary values.
pub fn learn_on_stationary_errors(
    std: [f64; 3],
    pr: PrecisionState,
    kappa_pi: f64,
    steps: usize,
) -> (Vec<f64>, Vec<f64>) {
    let dt = 1e-3;
    let mut cfg = ControllerConfig::new(3);
    cfg.clamp_expectations = true;
    cfg.learn_precisions = true;
    cfg.kappa_pi = kappa_pi;
    cfg.tau_ema = 100.0;
    let m = GenerativeModel::new(1.0, 1.0, GeneralisedSignal::zeros(3));
    let mut state = ControllerState::new(GeneralisedSignal::zeros(3), 0.0, pr);
    state.ema_sq_z = std.iter().map(|s| s * s).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut sq_sum = [0.0; 3];
    for _ in 0..steps {
        let draws: Vec<f64> = std
            .iter()
            .map(|s| {
                let n: f64 = StandardNormal.sample(&mut rng);
                s * n
            })
            .collect();
        for (acc, d) in sq_sum.iter_mut().zip(&draws) {
            *acc += d * d;
        }
        let y = GeneralisedSignal::from_orders(&draws);
        state = state.step_fast(&cfg, &m, &y, dt).unwrap();
        state = state.step_slow(&cfg, &m, dt).unwrap();
    }
    let mean_sq = sq_sum.iter().map(|s| s / steps as f64).collect();
    (state.pr.pi_z(), mean_sq)
}
