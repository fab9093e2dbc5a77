//! Online gain tuning: the integral gain is the observation precision, which
//! climbs until it matches the inverse power of the measurement noise.
//!
//! ```bash
//! cargo run --release --example gain_tuning
//! ```

use active_pid::simloop::run_closed_loop;
use active_pid::{gains_from_precisions, NoiseSpec, PrecisionState, ScenarioConfig};

fn main() -> active_pid::Result<()> {
    let sigma = 0.1;
    let mut cfg = ScenarioConfig::default();
    cfg.sensor.meas_noise = NoiseSpec::white(sigma, 3);
    cfg.controller.clamp_expectations = true;
    cfg.controller.learn_precisions = true;
    cfg.controller.kappa_pi = Some(0.1);
    cfg.controller.pi_z = Some(vec![10.0, 1.0, 0.0]);
    cfg.sim.duration = 300.0;
    cfg.sim.record_stride = 1000;

    let traj = run_closed_loop(&cfg)?;
    println!("{:>6} {:>10} {:>10} {:>12}", "t", "ki", "kp", "1/pi_z0");
    for r in traj.rows.iter().step_by(30) {
        let g = gains_from_precisions(&PrecisionState::from_precisions(&r.pi_z, &r.pi_w), 1.0)?;
        println!("{:>6.0} {:>10.3} {:>10.3e} {:>12.5}", r.t, g.ki, g.kp, 1.0 / r.pi_z[0]);
    }
    println!("noise variance {:.5}", sigma * sigma);
    Ok(())
}
