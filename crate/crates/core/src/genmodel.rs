//! The controller's generative model and its variational free energy.
//!
//! The model is linear: hidden state `x` relaxes towards the set-trajectory
//! `v` at rate `alpha`, and is observed through a fixed gain,
//!
//! ```text
//! f(x, v) = alpha * (v - x)        g(x) = obs_gain * x
//! ```
//!
//! Under the Laplace approximation the free energy is a sum of
//! precision-weighted squared prediction errors on two channels
//! (observations and dynamics), optional `-1/2 log pi` terms, and quadratic
//! hyperprior penalties that pull each precision towards a target.
//! Precisions are stored as logarithms so positivity holds by construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gencoords::GeneralisedSignal;

/// Monotone map applied to a hyperprior target before it is compared with a precision.
pub type HyperMap = fn(f64) -> f64;

fn identity(x: f64) -> f64 {
    x
}

/// Linear generative model used by the controller.
#[derive(Debug, Clone, Copy)]
pub struct GenerativeModel {
    /// Prior-dynamics rate (1/s).
    pub alpha: f64,
    pub obs_gain: f64,
    /// Set-trajectory and its derivatives.
    pub setpoint: GeneralisedSignal,
    /// Map from observation hyperprior target to precision units (identity by default).
    pub hyper_map_z: HyperMap,
    /// Map from dynamics hyperprior target to precision units (identity by default).
    pub hyper_map_w: HyperMap,
}

impl GenerativeModel {
    pub fn new(alpha: f64, obs_gain: f64, setpoint: GeneralisedSignal) -> Self {
        Self {
            alpha,
            obs_gain,
            setpoint,
            hyper_map_z: identity,
            hyper_map_w: identity,
        }
    }

    pub fn depth(&self) -> usize {
        self.setpoint.depth()
    }

    pub fn with_setpoint(mut self, setpoint: GeneralisedSignal) -> Self {
        self.setpoint = setpoint;
        self
    }
}

/// Expected log-precisions per embedding order, with their hyperpriors.
///
/// The observation channel has `p` orders, the dynamics channel `p - 1`.
/// A precision of exactly zero (log-precision `-inf`) switches that order off:
/// it contributes nothing to the free energy and is never learned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionState {
    pub log_pi_z: Vec<f64>,
    pub log_pi_w: Vec<f64>,
    pub hyper_weight_z: Vec<f64>,
    pub hyper_weight_w: Vec<f64>,
    pub hyper_target_z: Vec<f64>,
    pub hyper_target_w: Vec<f64>,
}

impl PrecisionState {
    /// Precisions given directly (not in log space), with hyperpriors switched off.
    pub fn from_precisions(pi_z: &[f64], pi_w: &[f64]) -> Self {
        Self {
            log_pi_z: pi_z.iter().map(|p| p.ln()).collect(),
            log_pi_w: pi_w.iter().map(|p| p.ln()).collect(),
            hyper_weight_z: vec![0.0; pi_z.len()],
            hyper_weight_w: vec![0.0; pi_w.len()],
            hyper_target_z: vec![1.0; pi_z.len()],
            hyper_target_w: vec![1.0; pi_w.len()],
        }
    }

    /// Unit precisions on every order of a depth-`p` embedding.
    pub fn unit(p: usize) -> Self {
        Self::from_precisions(&vec![1.0; p], &vec![1.0; p.saturating_sub(1)])
    }

    pub fn depth(&self) -> usize {
        self.log_pi_z.len()
    }

    pub fn pi_z(&self) -> Vec<f64> {
        self.log_pi_z.iter().map(|l| l.exp()).collect()
    }

    pub fn pi_w(&self) -> Vec<f64> {
        self.log_pi_w.iter().map(|l| l.exp()).collect()
    }

    pub(crate) fn check_depth(&self, p: usize) -> Result<()> {
        let dyn_len = p.saturating_sub(1);
        let ok = self.log_pi_z.len() == p
            && self.hyper_weight_z.len() == p
            && self.hyper_target_z.len() == p
            && self.log_pi_w.len() == dyn_len
            && self.hyper_weight_w.len() == dyn_len
            && self.hyper_target_w.len() == dyn_len;
        if ok {
            Ok(())
        } else {
            Err(Error::DepthMismatch {
                expected: p,
                got: self.log_pi_z.len(),
            })
        }
    }

    /// First field that is NaN or `+inf`; `-inf` log-precisions are disabled orders.
    pub(crate) fn non_finite_field(&self) -> Option<String> {
        let bad = |v: &f64| v.is_nan() || *v == f64::INFINITY;
        self.log_pi_z
            .iter()
            .position(bad)
            .map(|i| format!("log_pi_z[{i}]"))
            .or_else(|| self.log_pi_w.iter().position(bad).map(|i| format!("log_pi_w[{i}]")))
    }
}

/// Observation and dynamics prediction errors.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionErrors {
    /// `y[i] - obs_gain * mu_x[i]`, one per order.
    pub z: Vec<f64>,
    /// `mu_x[i+1] - alpha * (v[i] - mu_x[i])`, one per order below the top.
    pub w: Vec<f64>,
}

/// Free energy split into its additive parts (nats).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FreeEnergyBreakdown {
    pub f_obs: f64,
    pub f_dyn: f64,
    pub f_log: f64,
    pub f_hyper_z: f64,
    pub f_hyper_w: f64,
    pub total: f64,
}

impl FreeEnergyBreakdown {
    pub fn f_hyper(&self) -> f64 {
        self.f_hyper_z + self.f_hyper_w
    }
}

pub fn prediction_errors(
    m: &GenerativeModel,
    y: &GeneralisedSignal,
    mu_x: &GeneralisedSignal,
) -> Result<PredictionErrors> {
    let p = m.depth();
    y.check_depth(p)?;
    mu_x.check_depth(p)?;
    let z = (0..p).map(|i| y[i] - m.obs_gain * mu_x[i]).collect();
    let w = (0..p - 1)
        .map(|i| mu_x[i + 1] - m.alpha * (m.setpoint[i] - mu_x[i]))
        .collect();
    Ok(PredictionErrors { z, w })
}

fn weighted_half_sq(log_pi: &[f64], eps: &[f64]) -> f64 {
    0.5 * log_pi.iter().zip(eps).map(|(l, e)| l.exp() * e * e).sum::<f64>()
}

fn neg_half_log(log_pi: &[f64]) -> f64 {
    -0.5 * log_pi.iter().filter(|l| l.is_finite()).sum::<f64>()
}

fn hyper_penalty(log_pi: &[f64], weight: &[f64], target: &[f64], map: HyperMap) -> f64 {
    0.5 * log_pi
        .iter()
        .zip(weight)
        .zip(target)
        .map(|((l, w), t)| w * (l.exp() - map(*t)).powi(2))
        .sum::<f64>()
}

/// Free energy from precomputed prediction errors.
pub fn free_energy_from_errors(
    m: &GenerativeModel,
    eps: &PredictionErrors,
    pr: &PrecisionState,
    include_log_terms: bool,
) -> FreeEnergyBreakdown {
    let f_obs = weighted_half_sq(&pr.log_pi_z, &eps.z);
    let f_dyn = weighted_half_sq(&pr.log_pi_w, &eps.w);
    let f_log = if include_log_terms {
        neg_half_log(&pr.log_pi_z) + neg_half_log(&pr.log_pi_w)
    } else {
        0.0
    };
    let f_hyper_z = hyper_penalty(&pr.log_pi_z, &pr.hyper_weight_z, &pr.hyper_target_z, m.hyper_map_z);
    let f_hyper_w = hyper_penalty(&pr.log_pi_w, &pr.hyper_weight_w, &pr.hyper_target_w, m.hyper_map_w);
    FreeEnergyBreakdown {
        f_obs,
        f_dyn,
        f_log,
        f_hyper_z,
        f_hyper_w,
        total: f_obs + f_dyn + f_log + f_hyper_z + f_hyper_w,
    }
}

pub fn free_energy(
    m: &GenerativeModel,
    y: &GeneralisedSignal,
    mu_x: &GeneralisedSignal,
    pr: &PrecisionState,
    include_log_terms: bool,
) -> Result<FreeEnergyBreakdown> {
    pr.check_depth(m.depth())?;
    let eps = prediction_errors(m, y, mu_x)?;
    Ok(free_energy_from_errors(m, &eps, pr, include_log_terms))
}

/// Gradient of the free energy with respect to each order of `mu_x`.
///
/// Order `i` appears in `eps_z[i]`, in `eps_w[i]` through the prior drift, and
/// in `eps_w[i-1]` as the derivative of order `i-1`.
pub fn grad_mu_x(
    m: &GenerativeModel,
    y: &GeneralisedSignal,
    mu_x: &GeneralisedSignal,
    pr: &PrecisionState,
) -> Result<Vec<f64>> {
    pr.check_depth(m.depth())?;
    let eps = prediction_errors(m, y, mu_x)?;
    Ok(grad_mu_x_from_errors(m, &eps, pr))
}

pub(crate) fn grad_mu_x_from_errors(m: &GenerativeModel, eps: &PredictionErrors, pr: &PrecisionState) -> Vec<f64> {
    let p = eps.z.len();
    (0..p)
        .map(|i| {
            let mut g = -m.obs_gain * pr.log_pi_z[i].exp() * eps.z[i];
            if i + 1 < p {
                g += m.alpha * pr.log_pi_w[i].exp() * eps.w[i];
            }
            if i >= 1 {
                g += pr.log_pi_w[i - 1].exp() * eps.w[i - 1];
            }
            g
        })
        .collect()
}

/// Gradient of the free energy with respect to action, through the
/// observation sensitivities `dy_da`.
pub fn grad_action(
    m: &GenerativeModel,
    y: &GeneralisedSignal,
    mu_x: &GeneralisedSignal,
    pr: &PrecisionState,
    dy_da: &[f64],
) -> Result<f64> {
    let p = m.depth();
    if dy_da.len() != p {
        return Err(Error::DepthMismatch {
            expected: p,
            got: dy_da.len(),
        });
    }
    pr.check_depth(p)?;
    let eps = prediction_errors(m, y, mu_x)?;
    Ok(grad_action_from_errors(&eps, pr, dy_da))
}

pub(crate) fn grad_action_from_errors(eps: &PredictionErrors, pr: &PrecisionState, dy_da: &[f64]) -> f64 {
    dy_da
        .iter()
        .zip(&pr.log_pi_z)
        .zip(&eps.z)
        .map(|((s, l), e)| s * l.exp() * e)
        .sum()
}

fn grad_log_channel(log_pi: &[f64], sq: &[f64], weight: &[f64], target: &[f64], map: HyperMap) -> Vec<f64> {
    log_pi
        .iter()
        .zip(sq)
        .zip(weight.iter().zip(target))
        .map(|((l, s), (w, t))| {
            if *l == f64::NEG_INFINITY {
                return 0.0;
            }
            let pi = l.exp();
            pi * (0.5 * s - 0.5 / pi + w * (pi - map(*t)))
        })
        .collect()
}

/// Gradient of the free energy (log terms included) with respect to each
/// log-precision, given smoothed squared prediction errors per order.
pub fn grad_log_precisions(
    m: &GenerativeModel,
    pr: &PrecisionState,
    sq_z: &[f64],
    sq_w: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let p = m.depth();
    pr.check_depth(p)?;
    if sq_z.len() != p || sq_w.len() != p - 1 {
        return Err(Error::DepthMismatch {
            expected: p,
            got: sq_z.len(),
        });
    }
    Ok((
        grad_log_channel(
            &pr.log_pi_z,
            sq_z,
            &pr.hyper_weight_z,
            &pr.hyper_target_z,
            m.hyper_map_z,
        ),
        grad_log_channel(
            &pr.log_pi_w,
            sq_w,
            &pr.hyper_weight_w,
            &pr.hyper_target_w,
            m.hyper_map_w,
        ),
    ))
}
