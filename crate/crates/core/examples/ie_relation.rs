//! Integrated error of a clamped controller after a unit load step, for a
//! range of integral gains. The product `ie * ki` should sit at 1.
//!
//! ```bash
//! cargo run --release --example ie_relation
//! ```

use active_pid::simloop::{run_closed_loop, scenario_metrics};
use active_pid::{DisturbanceSpec, ScenarioConfig};

fn main() -> active_pid::Result<()> {
    println!("{:>6} {:>10} {:>10} {:>8}", "ki", "ie", "iae", "ie*ki");
    for ki in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let mut cfg = ScenarioConfig {
            disturbance: DisturbanceSpec::step(1.0, 10.0),
            ..Default::default()
        };
        cfg.controller.clamp_expectations = true;
        cfg.controller.pi_z = Some(vec![ki, 1.0, 0.0]);
        let traj = run_closed_loop(&cfg)?;
        let m = scenario_metrics(&cfg, &traj)?;
        println!("{ki:>6} {:>10.5} {:>10.5} {:>8.4}", m.ie, m.iae, m.ie * ki);
    }
    Ok(())
}
