mod common;

use active_pid::simloop::{run_closed_loop, scenario_metrics, sweep, Simulation};
use active_pid::Error;
use common::{config, integrate_from, load_step, rise_time, setpoint_step};
use serde_json::json;

#[test]
fn integrated_error_is_inverse_integral_gain() {
    for ki in [0.5, 1.0, 2.0, 4.0] {
        let traj = run_closed_loop(&load_step(ki, 1.0, 0.0)).unwrap();
        let ie = integrate_from(&traj, 10.0, |r| r.y - r.v);
        let rel = (ie - 1.0 / ki).abs() * ki;
        assert!(rel <= 0.05, "ki {ki}: ie {ie}");
    }
}

#[test]
fn integral_action_removes_steady_state_error() {
    let cfg = load_step(2.0, 1.0, 0.0);
    let traj = run_closed_loop(&cfg).unwrap();
    let tail: Vec<_> = traj.rows.iter().filter(|r| r.t >= 50.0).collect();
    assert!(tail.iter().all(|r| (r.y - r.v).abs() < 1e-3));
}

#[test]
fn proportional_only_leaves_offset() {
    // x' = -x + u + d with u = -kp x settles at d / (1 + kp)
    let traj = run_closed_loop(&load_step(0.0, 1.0, 0.0)).unwrap();
    let last = traj.rows.last().unwrap();
    assert!((last.y - 0.5).abs() < 1e-3, "y = {}", last.y);
}

#[test]
fn equilibrium_run_stays_at_rest() {
    let cfg = common::scenario("equilibrium");
    let traj = run_closed_loop(&cfg).unwrap();
    for r in &traj.rows {
        assert!(r.u.abs() < 1e-9);
        assert!(r.eps_z.iter().chain(&r.eps_w).all(|e| e.abs() < 1e-12));
    }
}

#[test]
fn breakdown_columns_sum_to_total() {
    let traj = run_closed_loop(&common::scenario("coloured_volatility")).unwrap();
    for r in &traj.rows {
        let f = &r.free_energy;
        let parts = f.f_obs + f.f_dyn + f.f_log + f.f_hyper();
        assert!((parts - f.total).abs() <= 1e-12 * f.total.abs().max(1.0));
    }
}

#[test]
fn rise_time_does_not_grow_with_dynamics_precision() {
    let mut previous = (f64::INFINITY, f64::INFINITY);
    for pi_w0 in [0.1, 0.3, 1.0, 3.0, 10.0] {
        let traj = run_closed_loop(&setpoint_step(pi_w0)).unwrap();
        let ts: Vec<f64> = traj.rows.iter().map(|r| r.t).collect();
        let mu0: Vec<f64> = traj.rows.iter().map(|r| r.mu_x[0]).collect();
        let ys: Vec<f64> = traj.rows.iter().map(|r| r.y).collect();
        let rise_mu = rise_time(&ts, &mu0, 5.0, 0.0, 1.0).expect("expectation reaches 90%");
        let rise_y = rise_time(&ts, &ys, 5.0, 0.0, 1.0).expect("output reaches 90%");
        assert!(
            rise_mu <= previous.0 && rise_y <= previous.1,
            "pi_w0 {pi_w0}: {rise_mu} {rise_y}"
        );
        previous = (rise_mu, rise_y);
    }
}

#[test]
fn sweep_over_dynamics_precision_matches_single_runs() {
    let base = setpoint_step(1.0);
    let rows = sweep(&base, "pi_w0", &[0.1, 1.0, 10.0]).unwrap();
    assert_eq!(rows.len(), 3);
    let rises: Vec<f64> = rows.iter().map(|r| r.metrics.rise_time_10_90.unwrap()).collect();
    assert!(rises.windows(2).all(|w| w[1] <= w[0]), "{rises:?}");

    let single = base.with_param("pi_w0", 10.0).unwrap();
    let metrics = scenario_metrics(&single, &run_closed_loop(&single).unwrap()).unwrap();
    assert_eq!(rows[2].metrics, metrics);
}

#[test]
fn sweep_rejects_unknown_paths() {
    let err = sweep(&setpoint_step(1.0), "plant.nope", &[1.0]).unwrap_err();
    assert!(matches!(err, Error::UnknownParamPath(_)));
}

#[test]
fn plant_mismatch_worsens_disturbance_rejection() {
    let base = common::scenario("step_disturbance");
    let rows = sweep(&base, "plant.a_p", &[-1.0, -0.5]).unwrap();
    assert!(rows[1].metrics.iae >= rows[0].metrics.iae);
}

fn unclamped_load(pi_z0: f64, pi_w0: f64) -> active_pid::ScenarioConfig {
    config(json!({
        "disturbance": { "kind": "step", "amplitude": 1.0, "onset": 10.0 },
        "controller": { "pi_z": [pi_z0, 1.0, 0.0], "pi_w": [pi_w0, 1.0] },
        "sim": { "duration": 60.0, "dt": 1e-3, "record_stride": 1 }
    }))
}

#[test]
fn load_response_against_expectation_ignores_dynamics_precision() {
    // The action only sees the observation channel: with expectations free the
    // error the integral acts on is y - mu_x0, and its integral is set by pi_z alone.
    let tracked = |pi_z0: f64, pi_w0: f64| {
        let traj = run_closed_loop(&unclamped_load(pi_z0, pi_w0)).unwrap();
        integrate_from(&traj, 10.0, |r| r.y - r.mu_x[0])
    };
    let reference = tracked(1.0, 1.0);
    for pi_w0 in [0.3, 3.0, 10.0] {
        let ie = tracked(1.0, pi_w0);
        assert!(
            (ie - reference).abs() <= 0.01 * reference.abs(),
            "pi_w0 {pi_w0}: {ie} vs {reference}"
        );
    }
    let doubled = tracked(2.0, 1.0);
    assert!((doubled - reference).abs() > 0.1 * reference.abs());
}

#[test]
fn load_response_approaches_one_degree_of_freedom_limit() {
    let ie = |pi_w0: f64| {
        let traj = run_closed_loop(&unclamped_load(1.0, pi_w0)).unwrap();
        integrate_from(&traj, 10.0, |r| r.y - r.v)
    };
    let gaps: Vec<f64> = [1.0, 3.0, 10.0].iter().map(|&w| (ie(w) - 1.0).abs()).collect();
    assert!(gaps.windows(2).all(|g| g[1] < g[0]), "{gaps:?}");
}

#[test]
fn saturated_action_never_exceeds_limit() {
    let mut cfg = load_step(1.0, 1.0, 0.0);
    cfg.controller.u_max = Some(0.6);
    cfg.disturbance.amplitude = 3.0;
    let mut sim = Simulation::new(&cfg).unwrap();
    let mut saturated = 0;
    while let Some(tick) = sim.tick().unwrap() {
        assert!(tick.controller.action.abs() <= 0.6);
        if tick.controller.action.abs() == 0.6 {
            saturated += 1;
        }
    }
    assert!(saturated > 0);
}

fn assert_slow_precisions(mut cfg: active_pid::ScenarioConfig) {
    cfg.controller.learn_precisions = true;
    cfg.controller.kappa_pi = None;
    cfg.sim.record_stride = 1;
    let traj = run_closed_loop(&cfg).unwrap();
    let lag = (cfg.controller.tau_ema / traj.dt_record).round() as usize;
    let mut mu_moved: f64 = 0.0;
    for pair in traj.rows.windows(lag + 1).step_by(lag / 4) {
        let (a, b) = (&pair[0], &pair[lag]);
        mu_moved = mu_moved.max((b.mu_x[0] - a.mu_x[0]).abs());
        for (pa, pb) in a.pi_z.iter().zip(&b.pi_z).chain(a.pi_w.iter().zip(&b.pi_w)) {
            if *pa > 0.0 {
                assert!((pb - pa).abs() / pa < 0.1, "t {}: {pa} -> {pb}", a.t);
            }
        }
    }
    assert!(mu_moved > 0.5);
}

#[test]
fn precisions_drift_slowly_under_default_rates() {
    assert_slow_precisions(setpoint_step(1.0));
    let mut load = unclamped_load(1.0, 1.0);
    load.setpoints
        .push(active_pid::simloop::SetpointChange { time: 30.0, value: 1.0 });
    assert_slow_precisions(load);
}

#[test]
fn divergence_reports_the_time() {
    let cfg = config(json!({
        "setpoints": [{ "time": 1.0, "value": 1.0 }],
        "controller": { "pi_z": [1.0, 1.0, 0.0], "pi_w": [1000.0, 1.0] },
        "sim": { "duration": 10.0 }
    }));
    match run_closed_loop(&cfg) {
        Err(Error::IntegrationDiverged { t, .. }) | Err(Error::PlantDiverged { t }) => assert!(t >= 1.0),
        other => panic!("expected divergence, got {other:?}"),
    }
}
