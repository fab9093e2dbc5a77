//! PID control as gradient descent on variational free energy.
//!
//! The crate simulates a closed loop in which an active-inference controller
//! regulates a plant. Observation-channel precisions act as the integral,
//! proportional and derivative gains, dynamics-channel precisions shape the
//! set-point response independently, and hyperpriors on the precisions
//! regularise online gain tuning.
//!
//! * [`gencoords`]: generalised coordinates, finite-difference embedding, noise
//! * [`genmodel`]: generative model, free energy and its gradients
//! * [`controller`]: recognition, action and precision-learning updates, plus a classical PID
//! * [`plant`]: ground-truth plants, load disturbances and sensors
//! * [`simloop`]: closed-loop runs, metrics, sweeps and the PID comparison
//! * [`cli`]: JSON scenarios and the file-emitting commands behind the `active-pid` binary

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod controller;
pub mod error;
pub mod gencoords;
pub mod genmodel;
pub mod plant;
pub mod simloop;

pub use controller::{gains_from_precisions, ControllerConfig, ControllerState, Gains, PidState};
pub use error::{Error, Result};
pub use gencoords::{embed, sample_noise, GeneralisedSignal, NoiseKind, NoiseSpec};
pub use genmodel::{free_energy, FreeEnergyBreakdown, GenerativeModel, PrecisionState};
pub use plant::{DisturbanceSpec, PlantKind, PlantSpec, SensorSpec};
pub use simloop::{
    compare_with_pid, compute_metrics, run_closed_loop, sweep, ControllerSetup, Metrics, ScenarioConfig,
    SetpointChange, Trajectory,
};
