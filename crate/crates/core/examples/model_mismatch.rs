//! Sweep the plant pole while the controller's model stays fixed, in parallel.
//! Set `ACTIVE_PID_THREADS` to cap the worker count.
//!
//! ```bash
//! cargo run --release --example model_mismatch
//! ```

use active_pid::simloop::sweep;
use active_pid::{DisturbanceSpec, ScenarioConfig};

fn main() -> active_pid::Result<()> {
    let mut cfg = ScenarioConfig {
        disturbance: DisturbanceSpec::step(1.0, 10.0),
        ..Default::default()
    };
    cfg.controller.clamp_expectations = true;
    cfg.controller.pi_z = Some(vec![1.0, 1.0, 0.0]);

    let poles = [-2.0, -1.0, -0.5, -0.25, 0.0, 0.25];
    let rows = sweep(&cfg, "plant.a_p", &poles)?;
    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10}",
        "a_p", "iae", "ie", "settle", "peak_u"
    );
    for r in rows {
        let m = r.metrics;
        let settle = m.settling_time_2pct.map_or("-".to_string(), |s| format!("{s:.2}"));
        println!(
            "{:>6} {:>10.4} {:>10.4} {settle:>10} {:>10.4}",
            r.value, m.iae, m.ie, m.peak_u
        );
    }
    Ok(())
}
