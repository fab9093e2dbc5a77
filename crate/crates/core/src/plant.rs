//! Ground-truth processes, load disturbances and sensors.
//!
//! The plant is deliberately separate from the controller's generative model
//! so that model mismatch can be studied by changing one without the other.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gencoords::{NoiseKind, NoiseSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PlantKind {
    #[default]
    FirstOrder,
    SecondOrder,
    NonlinearFirstOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlantSpec {
    pub kind: PlantKind,
    /// State rate (1/s), first-order kinds.
    pub a_p: f64,
    pub b_p: f64,
    pub c_p: f64,
    /// Natural frequency (rad/s), second order.
    pub omega: f64,
    /// Damping ratio, second order.
    pub zeta: f64,
    /// Strength of the `tanh` drift term, nonlinear kind.
    pub b_nl: f64,
    /// Driving noise; `sigma` is a density (units / sqrt(s)).
    pub process_noise: NoiseSpec,
    pub x0: f64,
    /// Initial velocity, second order.
    pub v0: f64,
}

impl Default for PlantSpec {
    fn default() -> Self {
        Self {
            kind: PlantKind::FirstOrder,
            a_p: -1.0,
            b_p: 1.0,
            c_p: 1.0,
            omega: 1.0,
            zeta: 0.7,
            b_nl: 0.0,
            process_noise: NoiseSpec::default(),
            x0: 0.0,
            v0: 0.0,
        }
    }
}

impl PlantSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("a_p", self.a_p),
            ("b_p", self.b_p),
            ("c_p", self.c_p),
            ("b_nl", self.b_nl),
            ("x0", self.x0),
            ("v0", self.v0),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("plant.{name}"), "must be finite"));
            }
        }
        if self.kind == PlantKind::SecondOrder {
            if !(self.omega > 0.0) {
                return Err(Error::invalid("plant.omega", "must be > 0"));
            }
            if !(self.zeta >= 0.0) {
                return Err(Error::invalid("plant.zeta", "must be >= 0"));
            }
        }
        self.process_noise.validate("plant.process_noise")
    }

    pub fn initial_state(&self) -> PlantState {
        PlantState {
            x: self.x0,
            v: if self.kind == PlantKind::SecondOrder {
                self.v0
            } else {
                0.0
            },
        }
    }

    pub fn output(&self, state: &PlantState) -> f64 {
        self.c_p * state.x
    }
}

/// Plant state: position and (second order only) velocity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlantState {
    pub x: f64,
    pub v: f64,
}

/// One Euler–Maruyama step. `w` is a noise sample already scaled as a density
/// sample (standard deviation `sigma / sqrt(dt)`), `d` the load disturbance.
pub fn plant_step(state: PlantState, spec: &PlantSpec, u: f64, d: f64, w: f64, dt: f64, t: f64) -> Result<PlantState> {
    let forcing = spec.b_p * (u + d) + w;
    let next = match spec.kind {
        PlantKind::FirstOrder => PlantState {
            x: state.x + dt * (spec.a_p * state.x + forcing),
            v: 0.0,
        },
        PlantKind::NonlinearFirstOrder => PlantState {
            x: state.x + dt * (spec.a_p * state.x + spec.b_nl * state.x.tanh() + forcing),
            v: 0.0,
        },
        PlantKind::SecondOrder => {
            let acc = -2.0 * spec.zeta * spec.omega * state.v - spec.omega.powi(2) * state.x + forcing;
            PlantState {
                x: state.x + dt * state.v,
                v: state.v + dt * acc,
            }
        }
    };
    if next.x.is_finite() && next.v.is_finite() {
        Ok(next)
    } else {
        Err(Error::PlantDiverged { t })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DisturbanceKind {
    #[default]
    None,
    Step,
    Ramp,
    Polynomial,
}

/// Additive load disturbance at the plant input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DisturbanceSpec {
    pub kind: DisturbanceKind,
    pub amplitude: f64,
    pub onset: f64,
    pub slope: f64,
    /// Polynomial coefficients, lowest power first.
    pub coefficients: Vec<f64>,
}

impl Default for DisturbanceSpec {
    fn default() -> Self {
        Self {
            kind: DisturbanceKind::None,
            amplitude: 0.0,
            onset: 0.0,
            slope: 0.0,
            coefficients: Vec::new(),
        }
    }
}

impl DisturbanceSpec {
    pub fn step(amplitude: f64, onset: f64) -> Self {
        Self {
            kind: DisturbanceKind::Step,
            amplitude,
            onset,
            ..Self::default()
        }
    }

    pub fn ramp(slope: f64, onset: f64) -> Self {
        Self {
            kind: DisturbanceKind::Ramp,
            slope,
            onset,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.onset >= 0.0) {
            return Err(Error::invalid("disturbance.onset", "must be >= 0"));
        }
        Ok(())
    }
}

pub fn disturbance_at(spec: &DisturbanceSpec, t: f64) -> f64 {
    let since = t - spec.onset;
    match spec.kind {
        DisturbanceKind::None => 0.0,
        DisturbanceKind::Step => {
            if since >= 0.0 {
                spec.amplitude
            } else {
                0.0
            }
        }
        DisturbanceKind::Ramp => spec.slope * since.max(0.0),
        DisturbanceKind::Polynomial => {
            if since < 0.0 {
                return 0.0;
            }
            spec.coefficients.iter().rev().fold(0.0, |acc, c| acc * since + c)
        }
    }
}

/// Linear change of measurement noise level over time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Volatility {
    pub start_sigma: f64,
    pub end_sigma: f64,
    pub t_start: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SensorSpec {
    /// Per-sample measurement noise.
    pub meas_noise: NoiseSpec,
    pub volatility: Option<Volatility>,
}

impl SensorSpec {
    pub fn validate(&self) -> Result<()> {
        self.meas_noise.validate("sensor.meas_noise")?;
        if let Some(v) = &self.volatility {
            if !(v.start_sigma >= 0.0 && v.end_sigma >= 0.0) {
                return Err(Error::invalid("sensor.volatility", "sigmas must be >= 0"));
            }
            if !(v.t_end >= v.t_start) {
                return Err(Error::invalid("sensor.volatility.t_end", "must be >= t_start"));
            }
        }
        Ok(())
    }

    /// Measurement noise standard deviation at time `t`.
    pub fn sigma_at(&self, t: f64) -> f64 {
        match &self.volatility {
            None => self.meas_noise.sigma,
            Some(v) => {
                if t <= v.t_start {
                    v.start_sigma
                } else if t >= v.t_end {
                    v.end_sigma
                } else {
                    let frac = (t - v.t_start) / (v.t_end - v.t_start);
                    v.start_sigma + frac * (v.end_sigma - v.start_sigma)
                }
            }
        }
    }
}

/// A sensor with its pre-drawn unit-variance noise path.
#[derive(Debug, Clone)]
pub struct Sensor {
    spec: SensorSpec,
    path: Vec<f64>,
    next: usize,
}

impl Sensor {
    /// Prepares noise for `n` measurements at step `dt`.
    pub fn new(spec: &SensorSpec, n: usize, dt: f64) -> Self {
        let silent = spec.meas_noise.sigma == 0.0
            && spec
                .volatility
                .as_ref()
                .is_none_or(|v| v.start_sigma == 0.0 && v.end_sigma == 0.0);
        let path = if silent {
            vec![0.0; n]
        } else {
            spec.meas_noise.unit_path(n, dt)
        };
        Self {
            spec: spec.clone(),
            path,
            next: 0,
        }
    }

    pub fn kind(&self) -> NoiseKind {
        self.spec.meas_noise.kind
    }

    /// Returns `x_out` plus the next noise sample at the level in force at `t`.
    pub fn measure(&mut self, x_out: f64, t: f64) -> f64 {
        let unit = self.path.get(self.next).copied().unwrap_or(0.0);
        self.next += 1;
        x_out + self.spec.sigma_at(t) * unit
    }
}
