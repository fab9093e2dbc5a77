//! White against Gaussian-smoothed noise, and a sensor whose noise level ramps.
//!
//! ```bash
//! cargo run --release --example coloured_noise
//! ```

use active_pid::plant::{Sensor, Volatility};
use active_pid::{sample_noise, NoiseSpec, SensorSpec};

fn autocorrelation(xs: &[f64], lag: usize) -> f64 {
    let n = xs.len() - lag;
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
    (0..n).map(|i| (xs[i] - mean) * (xs[i + lag] - mean)).sum::<f64>() / (n as f64 * var)
}

fn main() {
    let dt = 1e-3;
    let n = 100_000;
    let white = NoiseSpec::white(1.0, 7).unit_path(n, dt);
    println!("{:>8} {:>10} {:>10} {:>10}", "lag (s)", "white", "g=0.05", "g=0.2");
    let smooth: Vec<Vec<f64>> = [0.05, 0.2]
        .iter()
        .map(|&g| NoiseSpec::coloured(1.0, g, 7).unit_path(n, dt))
        .collect();
    for lag in [0.0, 0.01, 0.05, 0.1, 0.2, 0.5] {
        let k = (lag / dt) as usize;
        println!(
            "{lag:>8} {:>10.3} {:>10.3} {:>10.3}",
            autocorrelation(&white, k),
            autocorrelation(&smooth[0], k),
            autocorrelation(&smooth[1], k)
        );
    }

    let density = sample_noise(&NoiseSpec::white(0.1, 1), n, dt);
    let std = (density.iter().map(|x| x * x).sum::<f64>() / n as f64).sqrt();
    println!(
        "\nprocess noise density 0.1 -> sample std {std:.3} (0.1/sqrt(dt) = {:.3})",
        0.1 / dt.sqrt()
    );

    let spec = SensorSpec {
        meas_noise: NoiseSpec::white(0.02, 11),
        volatility: Some(Volatility {
            start_sigma: 0.02,
            end_sigma: 0.2,
            t_start: 20.0,
            t_end: 40.0,
        }),
    };
    let steps = 60_000;
    let mut sensor = Sensor::new(&spec, steps, dt);
    let readings: Vec<f64> = (0..steps).map(|k| sensor.measure(0.0, k as f64 * dt)).collect();
    println!("\nmeasurement std per 10 s window under a volatility ramp");
    for chunk in readings.chunks(10_000).enumerate() {
        let (i, xs) = chunk;
        let s = (xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64).sqrt();
        println!("{:>3}-{:<3} s {s:.4}", i * 10, (i + 1) * 10);
    }
}
