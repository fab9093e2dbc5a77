//! Two degrees of freedom: the dynamics precision shapes the set-point
//! response while the observation precision shapes load rejection.
//!
//! ```bash
//! cargo run --release --example two_dof
//! ```

use active_pid::simloop::{run_closed_loop, scenario_metrics, SetpointChange};
use active_pid::{DisturbanceSpec, ScenarioConfig};

fn main() -> active_pid::Result<()> {
    println!("set-point step to 1 at t = 5");
    println!("{:>6} {:>10} {:>12} {:>10}", "pi_w0", "rise", "overshoot%", "iae");
    for pi_w0 in [0.1, 0.3, 1.0, 3.0, 10.0] {
        let mut cfg = ScenarioConfig {
            setpoints: vec![SetpointChange { time: 5.0, value: 1.0 }],
            ..Default::default()
        };
        cfg.controller.pi_z = Some(vec![1.0, 1.0, 0.0]);
        cfg.controller.pi_w = Some(vec![pi_w0, 1.0]);
        let traj = run_closed_loop(&cfg)?;
        let m = scenario_metrics(&cfg, &traj)?;
        println!(
            "{pi_w0:>6} {:>10.3} {:>12.2} {:>10.4}",
            m.rise_time_10_90.unwrap_or(f64::NAN),
            m.overshoot_pct,
            m.iae
        );
    }

    println!("\nunit load step at t = 10, integral of y - mu_x0");
    println!("{:>6} {:>6} {:>12}", "pi_z0", "pi_w0", "ie");
    for (pi_z0, pi_w0) in [(1.0, 0.3), (1.0, 1.0), (1.0, 10.0), (2.0, 1.0), (4.0, 1.0)] {
        let mut cfg = ScenarioConfig {
            disturbance: DisturbanceSpec::step(1.0, 10.0),
            ..Default::default()
        };
        cfg.controller.pi_z = Some(vec![pi_z0, 1.0, 0.0]);
        cfg.controller.pi_w = Some(vec![pi_w0, 1.0]);
        cfg.sim.record_stride = 1;
        let traj = run_closed_loop(&cfg)?;
        let ie: f64 = traj
            .rows
            .iter()
            .filter(|r| r.t >= 10.0)
            .map(|r| r.y - r.mu_x[0])
            .sum::<f64>()
            * traj.dt_record;
        println!("{pi_z0:>6} {pi_w0:>6} {ie:>12.6}");
    }
    Ok(())
}
