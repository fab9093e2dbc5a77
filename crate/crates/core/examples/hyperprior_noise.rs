//! A hyperprior on the observation precision keeps the learned integral gain
//! steady under measurement noise and a rare load step.
//!
//! ```bash
//! cargo run --release --example hyperprior_noise
//! ```

use active_pid::simloop::run_closed_loop;
use active_pid::{DisturbanceSpec, NoiseSpec, ScenarioConfig};

fn main() -> active_pid::Result<()> {
    println!(
        "{:>8} {:>12} {:>12} {:>12} {:>10}",
        "weight", "mean pi_z0", "var pi_z0", "final", "iae"
    );
    for weight in [0.0, 1e-3, 1e-2, 1e-1] {
        let mut cfg = ScenarioConfig::default();
        cfg.sensor.meas_noise = NoiseSpec::white(0.1, 5);
        cfg.disturbance = DisturbanceSpec::step(2.0, 150.0);
        cfg.controller.clamp_expectations = true;
        cfg.controller.learn_precisions = true;
        cfg.controller.kappa_pi = Some(0.1);
        cfg.controller.pi_z = Some(vec![100.0, 1.0, 0.0]);
        cfg.controller.hyper_weight_z = Some(vec![weight, 0.0, 0.0]);
        cfg.controller.hyper_target_z = Some(vec![100.0, 1.0, 1.0]);
        cfg.sim.duration = 300.0;
        cfg.sim.record_stride = 100;
        let traj = run_closed_loop(&cfg)?;

        let pi: Vec<f64> = traj.rows.iter().map(|r| r.pi_z[0]).collect();
        let mean = pi.iter().sum::<f64>() / pi.len() as f64;
        let var = pi.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / pi.len() as f64;
        let iae: f64 = traj.rows.iter().map(|r| (r.y - r.v).abs()).sum::<f64>() * traj.dt_record;
        println!(
            "{weight:>8} {mean:>12.3} {var:>12.4} {:>12.3} {iae:>10.3}",
            pi[pi.len() - 1]
        );
    }
    Ok(())
}
