//! Free energy of the generative model, its gradients, and one recognition step.
//!
//! ```bash
//! cargo run --example free_energy
//! ```

use active_pid::controller::{ControllerConfig, ControllerState};
use active_pid::genmodel::{grad_action, grad_log_precisions, grad_mu_x};
use active_pid::{embed, free_energy, GeneralisedSignal, GenerativeModel, PrecisionState};

fn main() -> active_pid::Result<()> {
    let dt = 0.01;
    // samples of y(t) = t^2 / 2 around t = 1
    let window: Vec<f64> = (0..3).map(|k| 0.5 * (1.0 + (k as f64 - 2.0) * dt).powi(2)).collect();
    let y = embed(&window, dt, 3)?;
    println!("embedded y: {:?}", y.orders());

    let setpoint = GeneralisedSignal::from_orders(&[1.0, 0.0, 0.0]);
    let m = GenerativeModel::new(1.0, 1.0, setpoint);
    let pr = PrecisionState::from_precisions(&[2.0, 1.0, 0.5], &[1.0, 1.0]);
    let mu = GeneralisedSignal::from_orders(&[0.4, 0.6, 0.0]);

    let f = free_energy(&m, &y, &mu, &pr, true)?;
    println!(
        "F = {:.6} (obs {:.6}, dyn {:.6}, log {:.6})",
        f.total, f.f_obs, f.f_dyn, f.f_log
    );
    println!("dF/dmu_x = {:?}", grad_mu_x(&m, &y, &mu, &pr)?);
    println!("dF/da    = {:.6}", grad_action(&m, &y, &mu, &pr, &[1.0, 1.0, 1.0])?);
    let (gz, gw) = grad_log_precisions(&m, &pr, &[1.0, 1.0, 1.0], &[0.5, 2.0])?;
    println!("dF/dlog pi_z = {gz:?}, dF/dlog pi_w = {gw:?}");

    let cfg = ControllerConfig::new(3);
    let mut state = ControllerState::new(mu, 0.0, pr);
    for _ in 0..200 {
        state = state.step_fast(&cfg, &m, &y, dt)?;
    }
    let after = free_energy(&m, &y, &state.mu_x, &state.pr, true)?;
    println!(
        "after 2 s of recognition: mu_x = {:?}, action = {:.4}, F = {:.6}",
        state.mu_x.orders(),
        state.action,
        after.total
    );
    Ok(())
}
