//! Active-inference controller and the classical PID it reduces to.
//!
//! Three coupled gradient flows act on one free-energy functional:
//!
//! * recognition: expectations `mu_x` descend the free energy (fast),
//! * action: the control value descends it through the observations (fast),
//! * precision learning: log-precisions descend it using exponentially
//!   smoothed squared errors (slow).
//!
//! With expectations clamped to the set-trajectory the action law is a PID
//! controller in velocity form whose gains are `kappa_a` times the observation
//! precisions of orders 0, 1, 2 ([`gains_from_precisions`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gencoords::GeneralisedSignal;
use crate::genmodel::{
    grad_action_from_errors, grad_log_precisions, grad_mu_x_from_errors, prediction_errors, GenerativeModel,
    PrecisionState, PredictionErrors,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllerConfig {
    /// Recognition rate (1/s).
    pub kappa_x: f64,
    /// Action rate (1/s).
    pub kappa_a: f64,
    /// Precision learning rate (1/s).
    pub kappa_pi: f64,
    /// Time constant of the squared-error smoothing (s).
    pub tau_ema: f64,
    /// Sensitivity of each observation order to action.
    pub dy_da: Vec<f64>,
    /// Pin expectations to the set-trajectory (classical PID limit).
    pub clamp_expectations: bool,
    pub u_max: Option<f64>,
    pub learn_precisions: bool,
}

impl ControllerConfig {
    pub fn new(depth: usize) -> Self {
        let kappa_x = 10.0;
        Self {
            kappa_x,
            kappa_a: 1.0,
            kappa_pi: kappa_x / 1000.0,
            tau_ema: 5.0,
            dy_da: vec![1.0; depth],
            clamp_expectations: false,
            u_max: None,
            learn_precisions: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("controller.{name}"), "must be finite and > 0"))
            }
        };
        positive("kappa_x", self.kappa_x)?;
        positive("kappa_a", self.kappa_a)?;
        positive("tau_ema", self.tau_ema)?;
        if !(self.kappa_pi >= 0.0) {
            return Err(Error::invalid("controller.kappa_pi", "must be >= 0"));
        }
        if self.learn_precisions && self.kappa_pi > self.kappa_x / 100.0 {
            return Err(Error::invalid(
                "controller.kappa_pi",
                "must be <= kappa_x / 100 when learning precisions",
            ));
        }
        if let Some(u) = self.u_max {
            if !(u > 0.0) {
                return Err(Error::invalid("controller.u_max", "must be > 0"));
            }
        }
        Ok(())
    }
}

/// Expectations, action and learned precisions of one controller.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerState {
    pub mu_x: GeneralisedSignal,
    pub action: f64,
    pub pr: PrecisionState,
    pub ema_sq_z: Vec<f64>,
    pub ema_sq_w: Vec<f64>,
    pub t: f64,
}

impl ControllerState {
    pub fn new(mu_x: GeneralisedSignal, action: f64, pr: PrecisionState) -> Self {
        let p = mu_x.depth();
        Self {
            mu_x,
            action,
            pr,
            ema_sq_z: vec![0.0; p],
            ema_sq_w: vec![0.0; p - 1],
            t: 0.0,
        }
    }

    /// Smoothed squared errors seeded at the stationary values of the current precisions.
    pub fn with_stationary_ema(mut self) -> Self {
        let inv = |l: &f64| if l.is_finite() { (-l).exp() } else { 0.0 };
        self.ema_sq_z = self.pr.log_pi_z.iter().map(inv).collect();
        self.ema_sq_w = self.pr.log_pi_w.iter().map(inv).collect();
        self
    }

    fn check_finite(&self) -> Result<()> {
        let field = if !self.mu_x.is_finite() {
            Some("mu_x".to_string())
        } else if !self.action.is_finite() {
            Some("action".to_string())
        } else if let Some(f) = self.pr.non_finite_field() {
            Some(f)
        } else if !self.ema_sq_z.iter().chain(&self.ema_sq_w).all(|v| v.is_finite()) {
            Some("ema_sq".to_string())
        } else {
            None
        };
        match field {
            Some(field) => Err(Error::IntegrationDiverged { t: self.t, field }),
            None => Ok(()),
        }
    }

    /// One explicit Euler step of recognition and action.
    pub fn step_fast(
        mut self,
        cfg: &ControllerConfig,
        m: &GenerativeModel,
        y: &GeneralisedSignal,
        dt: f64,
    ) -> Result<Self> {
        let p = m.depth();
        self.pr.check_depth(p)?;
        if cfg.dy_da.len() != p {
            return Err(Error::DepthMismatch {
                expected: p,
                got: cfg.dy_da.len(),
            });
        }
        if cfg.clamp_expectations {
            self.mu_x = m.setpoint;
        } else {
            let eps = prediction_errors(m, y, &self.mu_x)?;
            let grad = grad_mu_x_from_errors(m, &eps, &self.pr);
            let drift = self.mu_x.shift();
            for (i, g) in grad.iter().enumerate() {
                self.mu_x[i] += dt * (drift[i] - cfg.kappa_x * g);
            }
        }

        let eps = prediction_errors(m, y, &self.mu_x)?;
        let delta = -dt * cfg.kappa_a * grad_action_from_errors(&eps, &self.pr, &cfg.dy_da);
        self.action = apply_action_step(self.action, delta, cfg.u_max);

        self.update_ema(&eps, dt / cfg.tau_ema);
        self.t += dt;
        self.check_finite()?;
        Ok(self)
    }

    fn update_ema(&mut self, eps: &PredictionErrors, rate: f64) {
        for (ema, e) in self.ema_sq_z.iter_mut().zip(&eps.z) {
            *ema += rate * (e * e - *ema);
        }
        for (ema, e) in self.ema_sq_w.iter_mut().zip(&eps.w) {
            *ema += rate * (e * e - *ema);
        }
    }

    /// One explicit Euler step of precision learning on the smoothed errors.
    ///
    /// Does nothing unless `cfg.learn_precisions` is set. Does not advance `t`
    /// (the fast step owns the clock).
    pub fn step_slow(mut self, cfg: &ControllerConfig, m: &GenerativeModel, dt: f64) -> Result<Self> {
        if !cfg.learn_precisions || cfg.kappa_pi == 0.0 {
            return Ok(self);
        }
        let (gz, gw) = grad_log_precisions(m, &self.pr, &self.ema_sq_z, &self.ema_sq_w)?;
        let rate = dt * cfg.kappa_pi;
        for (l, g) in self.pr.log_pi_z.iter_mut().zip(&gz) {
            *l -= rate * g;
        }
        for (l, g) in self.pr.log_pi_w.iter_mut().zip(&gw) {
            *l -= rate * g;
        }
        self.check_finite()?;
        Ok(self)
    }
}

/// Adds `delta` to the action, respecting saturation.
///
/// While saturated only steps that move the action inward are applied.
fn apply_action_step(action: f64, delta: f64, u_max: Option<f64>) -> f64 {
    match u_max {
        None => action + delta,
        Some(limit) => {
            if action.abs() >= limit && delta * action > 0.0 {
                action.clamp(-limit, limit)
            } else {
                (action + delta).clamp(-limit, limit)
            }
        }
    }
}

/// Integral, proportional and derivative gains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gains {
    pub ki: f64,
    pub kp: f64,
    pub kd: f64,
}

/// Reads PID gains off the observation precisions: `ki`, `kp`, `kd` are
/// `kappa_a` times the precisions of orders 0, 1, 2. Orders beyond the
/// embedding depth give zero gain.
pub fn gains_from_precisions(pr: &PrecisionState, kappa_a: f64) -> Result<Gains> {
    if pr.depth() < 1 {
        return Err(Error::DepthTooSmall { depth: 0, need: 1 });
    }
    let gain = |i: usize| pr.log_pi_z.get(i).map_or(0.0, |l| kappa_a * l.exp());
    Ok(Gains {
        ki: gain(0),
        kp: gain(1),
        kd: gain(2),
    })
}

/// Observation precisions that realise the given gains for action rate `kappa_a`.
pub fn precisions_from_gains(gains: Gains, kappa_a: f64) -> [f64; 3] {
    [gains.ki / kappa_a, gains.kp / kappa_a, gains.kd / kappa_a]
}

/// Classical PID with rectangle-rule integral and a first-order filtered derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct PidState {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    pub integral: f64,
    pub prev_error: Option<f64>,
    /// Filtered derivative of the error.
    pub derivative: f64,
    /// Derivative filter time constant in samples (`0` disables filtering).
    pub n_filt: f64,
    /// Constant added to the output.
    pub bias: f64,
    pub u_max: Option<f64>,
}

impl PidState {
    pub fn new(gains: Gains) -> Self {
        Self {
            kp: gains.kp,
            ki: gains.ki,
            kd: gains.kd,
            integral: 0.0,
            prev_error: None,
            derivative: 0.0,
            n_filt: 10.0,
            bias: 0.0,
            u_max: None,
        }
    }

    pub fn with_saturation(mut self, u_max: Option<f64>) -> Self {
        self.u_max = u_max;
        self
    }

    pub fn with_filter(mut self, n_filt: f64) -> Self {
        self.n_filt = n_filt;
        self
    }

    pub fn with_bias(mut self, bias: f64) -> Self {
        self.bias = bias;
        self
    }

    /// Advances by one sample of `error` and returns the new state and control output.
    ///
    /// The first sample has zero derivative. When the output saturates the
    /// integral is recomputed so that the unsaturated output equals the limit
    /// (back-calculation), which keeps the integrator from winding up.
    pub fn pid_step(mut self, error: f64, dt: f64) -> (Self, f64) {
        let raw = self.prev_error.map_or(0.0, |prev| (error - prev) / dt);
        self.derivative = (self.n_filt * self.derivative + raw) / (self.n_filt + 1.0);
        self.prev_error = Some(error);

        self.integral += error * dt;
        let rest = self.bias + self.kp * error + self.kd * self.derivative;
        let u = rest + self.ki * self.integral;
        match self.u_max {
            Some(limit) if u.abs() > limit => {
                let clamped = u.clamp(-limit, limit);
                if self.ki != 0.0 {
                    self.integral = (clamped - rest) / self.ki;
                }
                (self, clamped)
            }
            _ => (self, u),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(setpoint: &[f64]) -> GenerativeModel {
        GenerativeModel::new(1.0, 1.0, GeneralisedSignal::from_orders(setpoint))
    }

    #[test]
    fn fixed_point_only_advances_time() {
        let m = model(&[0.0, 0.0, 0.0]);
        let cfg = ControllerConfig::new(3);
        let s = ControllerState::new(GeneralisedSignal::zeros(3), 0.0, PrecisionState::unit(3));
        let next = s
            .clone()
            .step_fast(&cfg, &m, &GeneralisedSignal::zeros(3), 0.01)
            .unwrap();
        assert_eq!(next.mu_x, s.mu_x);
        assert_eq!(next.action, 0.0);
        assert_eq!(next.pr, s.pr);
        assert!((next.t - 0.01).abs() < 1e-15);
    }

    #[test]
    fn single_order_recognition_step() {
        let m = model(&[0.0]);
        let mut cfg = ControllerConfig::new(1);
        cfg.kappa_x = 1.0;
        let s = ControllerState::new(GeneralisedSignal::zeros(1), 0.0, PrecisionState::unit(1));
        let next = s
            .step_fast(&cfg, &m, &GeneralisedSignal::from_orders(&[1.0]), 0.1)
            .unwrap();
        assert!((next.mu_x[0] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn clamped_action_is_pid_differential_form() {
        let v = 0.7;
        let m = model(&[v, 0.0, 0.0]);
        let mut cfg = ControllerConfig::new(3);
        cfg.clamp_expectations = true;
        cfg.kappa_a = 2.0;
        let pr = PrecisionState::from_precisions(&[1.5, 0.8, 0.3], &[1.0, 1.0]);
        let y = GeneralisedSignal::from_orders(&[0.2, -0.4, 1.1]);
        let dt = 1e-3;
        let s = ControllerState::new(GeneralisedSignal::zeros(3), 0.5, pr);
        let next = s.step_fast(&cfg, &m, &y, dt).unwrap();
        let rate = -2.0 * 1.5 * (0.2 - v) - 2.0 * 0.8 * (-0.4) - 2.0 * 0.3 * 1.1;
        assert!(((next.action - 0.5) / dt - rate).abs() < 1e-9);
        assert_eq!(next.mu_x, m.setpoint);
    }

    #[test]
    fn divergence_is_reported_with_time() {
        let m = model(&[0.0, 0.0, 0.0]);
        let cfg = ControllerConfig::new(3);
        let s = ControllerState::new(GeneralisedSignal::zeros(3), 0.0, PrecisionState::unit(3));
        let y = GeneralisedSignal::from_orders(&[f64::INFINITY, 0.0, 0.0]);
        match s.step_fast(&cfg, &m, &y, 0.01) {
            Err(Error::IntegrationDiverged { field, .. }) => assert_eq!(field, "mu_x"),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn saturation_bounds_action_and_stops_windup() {
        let m = model(&[1.0, 0.0, 0.0]);
        let mut cfg = ControllerConfig::new(3);
        cfg.clamp_expectations = true;
        cfg.u_max = Some(0.5);
        let mut s = ControllerState::new(GeneralisedSignal::zeros(3), 0.0, PrecisionState::unit(3));
        let y = GeneralisedSignal::zeros(3);
        for _ in 0..10_000 {
            s = s.step_fast(&cfg, &m, &y, 0.01).unwrap();
            assert!(s.action.abs() <= 0.5);
        }
        assert_eq!(s.action, 0.5);
        // reversing the error moves the action inward immediately
        let s = s
            .step_fast(&cfg, &m, &GeneralisedSignal::from_orders(&[2.0, 0.0, 0.0]), 0.01)
            .unwrap();
        assert!(s.action < 0.5);
    }

    fn learning_cfg(kappa_pi: f64) -> ControllerConfig {
        let mut cfg = ControllerConfig::new(1);
        cfg.learn_precisions = true;
        cfg.kappa_pi = kappa_pi;
        cfg
    }

    #[test]
    fn stationary_precision_is_unchanged() {
        let m = model(&[0.0]);
        let mut s = ControllerState::new(
            GeneralisedSignal::zeros(1),
            0.0,
            PrecisionState::from_precisions(&[2.0], &[]),
        );
        s.ema_sq_z = vec![0.5];
        let next = s.clone().step_slow(&learning_cfg(0.1), &m, 0.01).unwrap();
        assert!((next.pr.log_pi_z[0] - s.pr.log_pi_z[0]).abs() < 1e-15);
    }

    #[test]
    fn precision_converges_to_inverse_error_power() {
        let m = model(&[0.0]);
        let mut s = ControllerState::new(GeneralisedSignal::zeros(1), 0.0, PrecisionState::unit(1));
        s.ema_sq_z = vec![4.0];
        for _ in 0..20_000 {
            s = s.step_slow(&learning_cfg(1.0), &m, 0.01).unwrap();
        }
        let pi = s.pr.pi_z()[0];
        assert!((pi - 0.25).abs() < 0.0025, "pi = {pi}");
    }

    #[test]
    fn strong_hyperprior_dominates() {
        let m = model(&[0.0]);
        let mut pr = PrecisionState::unit(1);
        pr.hyper_weight_z = vec![1e6];
        pr.hyper_target_z = vec![5.0];
        let mut s = ControllerState::new(GeneralisedSignal::zeros(1), 0.0, pr);
        s.ema_sq_z = vec![4.0];
        for _ in 0..20_000 {
            s = s.step_slow(&learning_cfg(1e-5), &m, 1e-3).unwrap();
        }
        let pi = s.pr.pi_z()[0];
        assert!((pi - 5.0).abs() < 0.05, "pi = {pi}");
    }

    #[test]
    fn gains_map_precisions() {
        let pr = PrecisionState::from_precisions(&[3.0, 2.0, 0.5], &[1.0, 1.0]);
        let g = gains_from_precisions(&pr, 1.0).unwrap();
        assert!((g.ki - 3.0).abs() < 1e-12 && (g.kp - 2.0).abs() < 1e-12 && (g.kd - 0.5).abs() < 1e-12);
        let g = gains_from_precisions(&PrecisionState::unit(3), 2.0).unwrap();
        assert_eq!((g.ki, g.kp, g.kd), (2.0, 2.0, 2.0));
        let pi_off = PrecisionState::from_precisions(&[1.0, 1.0, 0.0], &[1.0, 1.0]);
        assert_eq!(gains_from_precisions(&pi_off, 1.0).unwrap().kd, 0.0);
        let shallow = PrecisionState::from_precisions(&[1.0], &[]);
        let g = gains_from_precisions(&shallow, 1.0).unwrap();
        assert_eq!((g.kp, g.kd), (0.0, 0.0));
    }

    #[test]
    fn pid_zero_error_gives_zero_output() {
        let mut pid = PidState::new(Gains {
            ki: 1.0,
            kp: 2.0,
            kd: 0.5,
        });
        for _ in 0..100 {
            let (next, u) = pid.pid_step(0.0, 0.01);
            assert_eq!(u, 0.0);
            pid = next;
        }
    }

    #[test]
    fn pid_proportional_and_integral() {
        let (_, u) = PidState::new(Gains {
            ki: 0.0,
            kp: 1.0,
            kd: 0.0,
        })
        .pid_step(0.5, 0.01);
        assert_eq!(u, 0.5);

        let dt = 0.01;
        let mut pid = PidState::new(Gains {
            ki: 2.0,
            kp: 0.0,
            kd: 0.0,
        });
        let mut u = 0.0;
        for _ in 0..300 {
            let (next, out) = pid.pid_step(1.0, dt);
            pid = next;
            u = out;
        }
        assert!((u - 6.0).abs() <= 2.0 * dt + 1e-9, "u = {u}");
    }

    #[test]
    fn pid_saturation_holds_integral() {
        let mut pid = PidState::new(Gains {
            ki: 1.0,
            kp: 0.0,
            kd: 0.0,
        })
        .with_saturation(Some(1.0));
        for _ in 0..1000 {
            let (next, u) = pid.pid_step(1.0, 0.01);
            assert!(u <= 1.0);
            pid = next;
        }
        assert!((pid.integral - 1.0).abs() < 1e-12);
        // no windup: the output leaves the limit on the first reversed sample
        let (_, u) = pid.pid_step(-1.0, 0.01);
        assert!(u < 1.0);
    }
}
