//! Fixed-step closed-loop simulation, trajectory recording and metrics.
//!
//! A run is fully determined by its [`ScenarioConfig`]: plant and sensor noise
//! come from seeded generators, the controller and plant share one step `dt`,
//! and rows are recorded every `record_stride` ticks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::controller::{gains_from_precisions, ControllerConfig, ControllerState, Gains, PidState};
use crate::error::{Error, Result};
use crate::gencoords::{embed, sample_noise, GeneralisedSignal, DEFAULT_DEPTH, MAX_DEPTH};
use crate::genmodel::{
    free_energy_from_errors, prediction_errors, FreeEnergyBreakdown, GenerativeModel, PrecisionState,
};
use crate::plant::{
    disturbance_at, plant_step, DisturbanceKind, DisturbanceSpec, PlantSpec, PlantState, Sensor, SensorSpec,
};

/// Environment variable capping the number of threads used by [`sweep`].
pub const THREADS_ENV: &str = "ACTIVE_PID_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetpointChange {
    pub time: f64,
    pub value: f64,
}

/// Controller rates, generative model and initial precisions.
///
/// Depth-dependent fields left as `None` are filled by [`ScenarioConfig::normalise`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerSetup {
    pub kappa_x: f64,
    pub kappa_a: f64,
    /// Defaults to `kappa_x / 1000`.
    pub kappa_pi: Option<f64>,
    pub tau_ema: f64,
    pub dy_da: Option<Vec<f64>>,
    pub clamp_expectations: bool,
    pub u_max: Option<f64>,
    pub learn_precisions: bool,
    pub alpha: f64,
    pub obs_gain: f64,
    pub depth: usize,
    pub pi_z: Option<Vec<f64>>,
    pub pi_w: Option<Vec<f64>>,
    pub hyper_weight_z: Option<Vec<f64>>,
    pub hyper_weight_w: Option<Vec<f64>>,
    pub hyper_target_z: Option<Vec<f64>>,
    pub hyper_target_w: Option<Vec<f64>>,
    pub initial_action: f64,
    /// Derivative filter of the classical PID oracle, in samples.
    pub pid_filter: f64,
}

impl Default for ControllerSetup {
    fn default() -> Self {
        Self {
            kappa_x: 10.0,
            kappa_a: 1.0,
            kappa_pi: None,
            tau_ema: 5.0,
            dy_da: None,
            clamp_expectations: false,
            u_max: None,
            learn_precisions: false,
            alpha: 1.0,
            obs_gain: 1.0,
            depth: DEFAULT_DEPTH,
            pi_z: None,
            pi_w: None,
            hyper_weight_z: None,
            hyper_weight_w: None,
            hyper_target_z: None,
            hyper_target_w: None,
            initial_action: 0.0,
            pid_filter: 10.0,
        }
    }
}

fn or_fill(v: &Option<Vec<f64>>, len: usize, fill: f64) -> Vec<f64> {
    v.clone().unwrap_or_else(|| vec![fill; len])
}

impl ControllerSetup {
    /// Clamp-mode setup whose observation precisions realise the given PID gains.
    pub fn pid_limit(gains: Gains) -> Self {
        Self {
            clamp_expectations: true,
            pi_z: Some(vec![gains.ki, gains.kp, gains.kd]),
            ..Self::default()
        }
    }

    pub fn controller_config(&self) -> ControllerConfig {
        ControllerConfig {
            kappa_x: self.kappa_x,
            kappa_a: self.kappa_a,
            kappa_pi: self.kappa_pi.unwrap_or(self.kappa_x / 1000.0),
            tau_ema: self.tau_ema,
            dy_da: or_fill(&self.dy_da, self.depth, 1.0),
            clamp_expectations: self.clamp_expectations,
            u_max: self.u_max,
            learn_precisions: self.learn_precisions,
        }
    }

    pub fn precision_state(&self) -> PrecisionState {
        let p = self.depth;
        let dyn_len = p.saturating_sub(1);
        let pi_z = or_fill(&self.pi_z, p, 1.0);
        let pi_w = or_fill(&self.pi_w, dyn_len, 1.0);
        PrecisionState {
            log_pi_z: pi_z.iter().map(|v| v.ln()).collect(),
            log_pi_w: pi_w.iter().map(|v| v.ln()).collect(),
            hyper_weight_z: or_fill(&self.hyper_weight_z, p, 0.0),
            hyper_weight_w: or_fill(&self.hyper_weight_w, dyn_len, 0.0),
            hyper_target_z: or_fill(&self.hyper_target_z, p, 1.0),
            hyper_target_w: or_fill(&self.hyper_target_w, dyn_len, 1.0),
        }
    }

    pub fn model(&self, setpoint: f64) -> GenerativeModel {
        GenerativeModel::new(
            self.alpha,
            self.obs_gain,
            GeneralisedSignal::constant(setpoint, self.depth),
        )
    }

    fn normalise(&mut self) {
        let cfg = self.controller_config();
        let pr = self.precision_state();
        self.kappa_pi = Some(cfg.kappa_pi);
        self.dy_da = Some(cfg.dy_da);
        self.pi_z = Some(pr.pi_z());
        self.pi_w = Some(pr.pi_w());
        self.hyper_weight_z = Some(pr.hyper_weight_z);
        self.hyper_weight_w = Some(pr.hyper_weight_w);
        self.hyper_target_z = Some(pr.hyper_target_z);
        self.hyper_target_w = Some(pr.hyper_target_w);
    }

    fn validate(&self) -> Result<()> {
        let p = self.depth;
        if !(1..=MAX_DEPTH).contains(&p) {
            return Err(Error::invalid(
                "controller.depth",
                format!("must be in 1..={MAX_DEPTH}"),
            ));
        }
        for (name, v) in [("alpha", self.alpha), ("obs_gain", self.obs_gain)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("controller.{name}"), "must be finite and > 0"));
            }
        }
        if !self.initial_action.is_finite() {
            return Err(Error::invalid("controller.initial_action", "must be finite"));
        }
        if !(self.pid_filter >= 0.0) {
            return Err(Error::invalid("controller.pid_filter", "must be >= 0"));
        }
        let dyn_len = p - 1;
        let check = |name: &str, v: &Option<Vec<f64>>, len: usize, ok: fn(f64) -> bool, what: &str| match v {
            Some(v) if v.len() != len => Err(Error::invalid(
                format!("controller.{name}"),
                format!("must have {len} entries for depth {p}"),
            )),
            Some(v) if !v.iter().all(|x| ok(*x)) => Err(Error::invalid(format!("controller.{name}"), what.to_string())),
            _ => Ok(()),
        };
        let non_negative: fn(f64) -> bool = |x| x.is_finite() && x >= 0.0;
        let positive: fn(f64) -> bool = |x| x.is_finite() && x > 0.0;
        let finite: fn(f64) -> bool = f64::is_finite;
        check("dy_da", &self.dy_da, p, finite, "entries must be finite")?;
        check("pi_z", &self.pi_z, p, non_negative, "entries must be finite and >= 0")?;
        check(
            "pi_w",
            &self.pi_w,
            dyn_len,
            non_negative,
            "entries must be finite and >= 0",
        )?;
        check(
            "hyper_weight_z",
            &self.hyper_weight_z,
            p,
            non_negative,
            "entries must be >= 0",
        )?;
        check(
            "hyper_weight_w",
            &self.hyper_weight_w,
            dyn_len,
            non_negative,
            "entries must be >= 0",
        )?;
        check(
            "hyper_target_z",
            &self.hyper_target_z,
            p,
            positive,
            "entries must be > 0",
        )?;
        check(
            "hyper_target_w",
            &self.hyper_target_w,
            dyn_len,
            positive,
            "entries must be > 0",
        )?;
        self.controller_config().validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSettings {
    pub duration: f64,
    pub dt: f64,
    pub seed: u64,
    pub record_stride: usize,
    /// Start of the metrics window; defaults to the last disturbance onset or set-point change.
    pub metrics_start: Option<f64>,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self {
            duration: 60.0,
            dt: 1e-3,
            seed: 0,
            record_stride: 10,
            metrics_start: None,
        }
    }
}

impl SimSettings {
    /// Number of integration steps, tolerant of round-off in `duration / dt`.
    pub fn n_steps(&self) -> usize {
        (self.duration / self.dt * (1.0 + 1e-12)).floor() as usize
    }
}

/// Everything needed to reproduce one closed-loop run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub plant: PlantSpec,
    pub sensor: SensorSpec,
    pub disturbance: DisturbanceSpec,
    pub setpoints: Vec<SetpointChange>,
    pub controller: ControllerSetup,
    pub sim: SimSettings,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let sim = &self.sim;
        if !(sim.duration > 0.0 && sim.duration.is_finite()) {
            return Err(Error::invalid("sim.duration", "must be finite and > 0"));
        }
        if !(sim.dt > 0.0 && sim.dt <= sim.duration) {
            return Err(Error::invalid("sim.dt", "must satisfy 0 < dt <= duration"));
        }
        if sim.record_stride == 0 {
            return Err(Error::invalid("sim.record_stride", "must be >= 1"));
        }
        if let Some(t) = sim.metrics_start {
            if !(t >= 0.0 && t < sim.duration) {
                return Err(Error::invalid("sim.metrics_start", "must lie in [0, duration)"));
            }
        }
        if self.setpoints.windows(2).any(|w| w[1].time < w[0].time) {
            return Err(Error::invalid("setpoints", "times must be non-decreasing"));
        }
        if self
            .setpoints
            .iter()
            .any(|s| !s.time.is_finite() || !s.value.is_finite())
        {
            return Err(Error::invalid("setpoints", "entries must be finite"));
        }
        self.plant.validate()?;
        self.sensor.validate()?;
        self.disturbance.validate()?;
        self.controller.validate()
    }

    /// Makes every defaulted field explicit.
    pub fn normalise(&mut self) {
        self.controller.normalise();
    }

    pub fn setpoint_at(&self, t: f64) -> f64 {
        self.setpoints
            .iter()
            .take_while(|s| s.time <= t)
            .last()
            .map_or(0.0, |s| s.value)
    }

    /// Window `(start, end)` used for scenario-level metrics.
    pub fn metrics_window(&self) -> (f64, f64) {
        let start = self.sim.metrics_start.unwrap_or_else(|| {
            let last_setpoint = self
                .setpoints
                .iter()
                .filter(|s| s.time > 0.0)
                .map(|s| s.time)
                .fold(0.0, f64::max);
            let onset = if self.disturbance.kind == DisturbanceKind::None {
                0.0
            } else {
                self.disturbance.onset
            };
            last_setpoint.max(onset)
        });
        (start, self.sim.duration)
    }

    /// Sets a scalar field addressed by a dotted path such as `plant.a_p`
    /// or `controller.pi_w.0`. `pi_zN`, `pi_wN` are shorthands for the
    /// controller precisions.
    pub fn with_param(&self, path: &str, value: f64) -> Result<Self> {
        let mut cfg = self.clone();
        cfg.normalise();
        let mut doc = serde_json::to_value(&cfg).map_err(|e| Error::Io(e.to_string()))?;
        let full = expand_alias(path);
        let slot = resolve_path(&mut doc, &full).ok_or_else(|| Error::UnknownParamPath(path.to_string()))?;
        *slot = match slot {
            Value::Number(n) if n.is_u64() => {
                if value >= 0.0 && value.fract() == 0.0 {
                    Value::from(value as u64)
                } else {
                    return Err(Error::invalid(path, "must be a non-negative integer"));
                }
            }
            Value::Number(_) | Value::Null => serde_json::Number::from_f64(value)
                .map(Value::Number)
                .ok_or_else(|| Error::invalid(path, "must be finite"))?,
            _ => return Err(Error::UnknownParamPath(path.to_string())),
        };
        let out: ScenarioConfig = serde_json::from_value(doc).map_err(|_| Error::UnknownParamPath(path.to_string()))?;
        out.validate()?;
        Ok(out)
    }
}

fn expand_alias(path: &str) -> String {
    for prefix in ["pi_z", "pi_w"] {
        if let Some(idx) = path.strip_prefix(prefix) {
            if !idx.is_empty() && idx.chars().all(|c| c.is_ascii_digit()) {
                return format!("controller.{prefix}.{idx}");
            }
        }
    }
    path.to_string()
}

fn resolve_path<'a>(doc: &'a mut Value, path: &str) -> Option<&'a mut Value> {
    path.split('.').try_fold(doc, |node, key| match node {
        Value::Object(map) => map.get_mut(key),
        Value::Array(items) => key.parse::<usize>().ok().and_then(|i| items.get_mut(i)),
        _ => None,
    })
}

fn mix_seed(base: u64, stream: u64) -> u64 {
    // splitmix64 finaliser
    let mut z = base
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One recorded instant of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub y: f64,
    pub x_plant: f64,
    pub u: f64,
    pub v: f64,
    pub d: f64,
    pub mu_x: Vec<f64>,
    pub eps_z: Vec<f64>,
    pub eps_w: Vec<f64>,
    pub pi_z: Vec<f64>,
    pub pi_w: Vec<f64>,
    pub free_energy: FreeEnergyBreakdown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub depth: usize,
    /// Time between recorded rows.
    pub dt_record: f64,
    pub rows: Vec<TrajectoryRow>,
}

/// Per-tick record of the full simulation state, before striding.
#[derive(Debug, Clone)]
pub struct Tick {
    pub t: f64,
    pub y: f64,
    pub x_plant: f64,
    pub v: f64,
    pub d: f64,
    pub controller: ControllerState,
}

/// Step-by-step closed-loop simulation.
pub struct Simulation {
    cfg: ScenarioConfig,
    ctrl_cfg: ControllerConfig,
    base_model: GenerativeModel,
    plant: PlantState,
    sensor: Sensor,
    process_noise: Vec<f64>,
    window: Vec<f64>,
    state: ControllerState,
    k: usize,
    n_steps: usize,
}

impl Simulation {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let mut cfg = cfg.clone();
        cfg.normalise();
        let sim = &cfg.sim;
        let n_steps = sim.n_steps();
        let mut sensor_spec = cfg.sensor.clone();
        sensor_spec.meas_noise.seed = mix_seed(sim.seed, 2) ^ cfg.sensor.meas_noise.seed;
        let sensor = Sensor::new(&sensor_spec, n_steps + 1, sim.dt);
        let mut process_spec = cfg.plant.process_noise.clone();
        process_spec.seed = mix_seed(sim.seed, 1) ^ cfg.plant.process_noise.seed;
        let process_noise = sample_noise(&process_spec, n_steps.max(1), sim.dt);
        let setup = &cfg.controller;
        let base_model = setup.model(cfg.setpoint_at(0.0));
        let state = ControllerState::new(base_model.setpoint, setup.initial_action, setup.precision_state())
            .with_stationary_ema();
        Ok(Self {
            ctrl_cfg: setup.controller_config(),
            plant: cfg.plant.initial_state(),
            window: Vec::with_capacity(setup.depth),
            sensor,
            process_noise,
            base_model,
            state,
            k: 0,
            n_steps,
            cfg,
        })
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    /// Model with the set-point in force at `t`.
    pub fn model_at(&self, t: f64) -> GenerativeModel {
        let setpoint = GeneralisedSignal::constant(self.cfg.setpoint_at(t), self.cfg.controller.depth);
        self.base_model.with_setpoint(setpoint)
    }

    /// Runs one controller tick; the plant advances afterwards unless this was the last tick.
    /// Returns `None` once all `n_steps + 1` ticks are done.
    pub fn tick(&mut self) -> Result<Option<Tick>> {
        if self.k > self.n_steps {
            return Ok(None);
        }
        let dt = self.cfg.sim.dt;
        let depth = self.cfg.controller.depth;
        let t = self.k as f64 * dt;
        let v = self.cfg.setpoint_at(t);
        let d = disturbance_at(&self.cfg.disturbance, t);
        let x_plant = self.plant.x;
        let y = self.sensor.measure(self.cfg.plant.output(&self.plant), t);

        if self.window.is_empty() {
            // history before t = 0 is taken to be constant
            self.window.resize(depth, y);
        } else {
            self.window.rotate_left(1);
            self.window[depth - 1] = y;
        }
        let y_gen = embed(&self.window, dt, depth)?;
        let model = self.model_at(t);

        let mut state = std::mem::replace(
            &mut self.state,
            ControllerState::new(GeneralisedSignal::zeros(depth), 0.0, PrecisionState::unit(depth)),
        );
        state.t = t;
        state = state.step_fast(&self.ctrl_cfg, &model, &y_gen, dt)?;
        state = state.step_slow(&self.ctrl_cfg, &model, dt)?;
        self.state = state;

        if self.k < self.n_steps {
            let w = self.process_noise[self.k];
            self.plant = plant_step(self.plant, &self.cfg.plant, self.state.action, d, w, dt, t)?;
        }
        self.k += 1;
        Ok(Some(Tick {
            t,
            y,
            x_plant,
            v,
            d,
            controller: self.state.clone(),
        }))
    }

    pub(crate) fn record(&self, tick: &Tick) -> Result<TrajectoryRow> {
        let model = self.model_at(tick.t);
        let y_gen = embed(&self.window, self.cfg.sim.dt, self.cfg.controller.depth)?;
        let state = &tick.controller;
        let eps = prediction_errors(&model, &y_gen, &state.mu_x)?;
        let free_energy = free_energy_from_errors(&model, &eps, &state.pr, self.ctrl_cfg.learn_precisions);
        Ok(TrajectoryRow {
            t: tick.t,
            y: tick.y,
            x_plant: tick.x_plant,
            u: state.action,
            v: tick.v,
            d: tick.d,
            mu_x: state.mu_x.orders().to_vec(),
            eps_z: eps.z,
            eps_w: eps.w,
            pi_z: state.pr.pi_z(),
            pi_w: state.pr.pi_w(),
            free_energy,
        })
    }
}

/// Runs a scenario to completion and records every `record_stride`-th tick.
pub fn run_closed_loop(cfg: &ScenarioConfig) -> Result<Trajectory> {
    let mut sim = Simulation::new(cfg)?;
    let stride = cfg.sim.record_stride;
    let mut rows = Vec::with_capacity(sim.n_steps() / stride + 1);
    let mut k = 0;
    while let Some(tick) = sim.tick()? {
        if k % stride == 0 {
            rows.push(sim.record(&tick)?);
        }
        k += 1;
    }
    Ok(Trajectory {
        depth: cfg.controller.depth,
        dt_record: cfg.sim.dt * stride as f64,
        rows,
    })
}

/// Time-domain performance criteria over a window.
///
/// The error is the deviation of the measured output from its target,
/// `e = y - reference`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub iae: f64,
    pub ie: f64,
    pub overshoot_pct: f64,
    /// 10-90% rise time from the window start; `None` if 90% is never reached.
    pub rise_time_10_90: Option<f64>,
    /// Time from the window start after which the output stays in the 2% band.
    pub settling_time_2pct: Option<f64>,
    /// Mean error over the last 5% of the window.
    pub steady_state_error: f64,
    pub peak_u: f64,
}

/// Computes metrics over rows with `window.0 <= t <= window.1`.
///
/// Rise and overshoot are measured against the step from the first output in
/// the window to `reference`. When there is no step the settling band is 2%
/// of the peak deviation instead.
pub fn compute_metrics(traj: &Trajectory, window: (f64, f64), reference: f64) -> Result<Metrics> {
    let (start, end) = window;
    let eps_t = 1e-9 * traj.dt_record;
    let rows: Vec<&TrajectoryRow> = traj
        .rows
        .iter()
        .filter(|r| r.t >= start - eps_t && r.t <= end + eps_t)
        .collect();
    if rows.is_empty() {
        return Err(Error::EmptyWindow { start, end });
    }
    let h = traj.dt_record;
    let errors: Vec<f64> = rows.iter().map(|r| r.y - reference).collect();
    let iae = errors.iter().map(|e| e.abs()).sum::<f64>() * h;
    let ie = errors.iter().sum::<f64>() * h;
    let peak_u = rows.iter().map(|r| r.u.abs()).fold(0.0, f64::max);
    let t0 = rows[0].t;

    let y_start = rows[0].y;
    let step = reference - y_start;
    let (overshoot_pct, rise_time_10_90, band) = if step.abs() > 1e-12 {
        let dir = step.signum();
        let progress = |r: &&TrajectoryRow| (r.y - y_start) * dir / step.abs();
        let first_at = |level: f64| rows.iter().find(|r| progress(r) >= level).map(|r| r.t);
        let rise = match (first_at(0.1), first_at(0.9)) {
            (Some(a), Some(b)) => Some(b - a),
            _ => None,
        };
        let overshoot = errors.iter().map(|e| e * dir).fold(0.0, f64::max) / step.abs() * 100.0;
        (overshoot, rise, 0.02 * step.abs())
    } else {
        let peak = errors.iter().map(|e| e.abs()).fold(0.0, f64::max);
        (0.0, Some(0.0), 0.02 * peak)
    };
    let settling_time_2pct = match errors.iter().rposition(|e| e.abs() > band) {
        None => Some(0.0),
        Some(i) if i + 1 < rows.len() => Some(rows[i + 1].t - t0),
        Some(_) => None,
    };
    let tail = (rows.len() / 20).max(1);
    let steady_state_error = errors[errors.len() - tail..].iter().sum::<f64>() / tail as f64;

    Ok(Metrics {
        iae,
        ie,
        overshoot_pct,
        rise_time_10_90,
        settling_time_2pct,
        steady_state_error,
        peak_u,
    })
}

/// Metrics over the scenario's default window against the final set-point.
pub fn scenario_metrics(cfg: &ScenarioConfig, traj: &Trajectory) -> Result<Metrics> {
    let window = cfg.metrics_window();
    compute_metrics(traj, window, cfg.setpoint_at(window.1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub metrics: Metrics,
}

/// Runs `base` once per value of the parameter at `path`.
///
/// Runs execute in parallel (capped by [`THREADS_ENV`] when set); rows come
/// back in input order.
pub fn sweep(base: &ScenarioConfig, path: &str, values: &[f64]) -> Result<Vec<SweepRow>> {
    let configs = values
        .iter()
        .map(|&v| base.with_param(path, v))
        .collect::<Result<Vec<_>>>()?;
    let run = || {
        configs
            .par_iter()
            .zip(values)
            .map(|(cfg, &value)| {
                let traj = run_closed_loop(cfg)?;
                Ok(SweepRow {
                    value,
                    metrics: scenario_metrics(cfg, &traj)?,
                })
            })
            .collect::<Result<Vec<_>>>()
    };
    match std::env::var(THREADS_ENV).ok().and_then(|s| s.parse::<usize>().ok()) {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Io(e.to_string()))?
            .install(run),
        _ => run(),
    }
}

/// Actions of the clamped active-inference controller and a classical PID fed the same errors.
#[derive(Debug, Clone, PartialEq)]
pub struct PidComparison {
    pub gains: Gains,
    pub t: Vec<f64>,
    /// Control error `v - y` seen by both controllers.
    pub error: Vec<f64>,
    pub u_active: Vec<f64>,
    pub u_pid: Vec<f64>,
    pub max_abs_deviation: f64,
}

/// Runs `cfg` in clamp mode with learning off and replays its error signal
/// through a classical PID with gains read off the precisions.
pub fn compare_with_pid(cfg: &ScenarioConfig) -> Result<PidComparison> {
    let mut cfg = cfg.clone();
    cfg.controller.clamp_expectations = true;
    cfg.controller.learn_precisions = false;
    let setup = &cfg.controller;
    let gains = gains_from_precisions(&setup.precision_state(), setup.kappa_a)?;
    let mut pid = PidState::new(gains)
        .with_filter(setup.pid_filter)
        .with_bias(setup.initial_action)
        .with_saturation(setup.u_max);
    let dt = cfg.sim.dt;

    let mut sim = Simulation::new(&cfg)?;
    let n = sim.n_steps() + 1;
    let mut out = PidComparison {
        gains,
        t: Vec::with_capacity(n),
        error: Vec::with_capacity(n),
        u_active: Vec::with_capacity(n),
        u_pid: Vec::with_capacity(n),
        max_abs_deviation: 0.0,
    };
    while let Some(tick) = sim.tick()? {
        let error = tick.v - tick.y;
        let (next, u_pid) = pid.pid_step(error, dt);
        pid = next;
        let u_active = tick.controller.action;
        out.max_abs_deviation = out.max_abs_deviation.max((u_active - u_pid).abs());
        out.t.push(tick.t);
        out.error.push(error);
        out.u_active.push(u_active);
        out.u_pid.push(u_pid);
    }
    Ok(out)
}
