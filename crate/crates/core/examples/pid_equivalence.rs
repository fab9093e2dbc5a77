//! Clamped active inference against a classical PID fed the same error.
//! The gap shrinks linearly with the step size.
//!
//! ```bash
//! cargo run --release --example pid_equivalence
//! ```

use active_pid::simloop::compare_with_pid;
use active_pid::{DisturbanceSpec, ScenarioConfig};

fn main() -> active_pid::Result<()> {
    let mut cfg = ScenarioConfig {
        disturbance: DisturbanceSpec::ramp(0.5, 1.0),
        ..Default::default()
    };
    cfg.controller.clamp_expectations = true;
    cfg.controller.pi_z = Some(vec![2.0, 1.0, 0.2]);
    cfg.sim.duration = 20.0;

    let mut previous = None;
    for dt in [4e-3, 2e-3, 1e-3, 5e-4, 2.5e-4] {
        cfg.sim.dt = dt;
        let cmp = compare_with_pid(&cfg)?;
        let ratio = previous.map_or(String::new(), |p: f64| format!("{:.3}", p / cmp.max_abs_deviation));
        println!(
            "dt {dt:<8} max |u_ai - u_pid| {:.3e}  ratio {ratio}",
            cmp.max_abs_deviation
        );
        previous = Some(cmp.max_abs_deviation);
    }
    let g = compare_with_pid(&cfg)?.gains;
    println!("gains: ki {} kp {} kd {}", g.ki, g.kp, g.kd);
    Ok(())
}
