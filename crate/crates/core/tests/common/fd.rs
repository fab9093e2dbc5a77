use active_pid::gencoords::GeneralisedSignal;
use active_pid::genmodel::{
    free_energy, free_energy_from_errors, grad_action, grad_log_precisions, grad_mu_x, GenerativeModel, PrecisionState,
    PredictionErrors,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const H: f64 = 1e-5;

struct Case {
    model: GenerativeModel,
    y: GeneralisedSignal,
    mu: GeneralisedSignal,
    pr: PrecisionState,
    dy_da: Vec<f64>,
    sq_z: Vec<f64>,
    sq_w: Vec<f64>,
}

fn random_case(rng: &mut ChaCha8Rng) -> Case {
    let p = rng.random_range(2..=6);
    let sig = |rng: &mut ChaCha8Rng| {
        let v: Vec<f64> = (0..p).map(|_| rng.random_range(-2.0..2.0)).collect();
        GeneralisedSignal::from_orders(&v)
    };
    let setpoint = sig(rng);
    let y = sig(rng);
    let mu = sig(rng);
    let model = GenerativeModel::new(rng.random_range(0.1..3.0), rng.random_range(0.5..2.0), setpoint);
    let mut pr = PrecisionState::unit(p);
    for l in pr.log_pi_z.iter_mut().chain(pr.log_pi_w.iter_mut()) {
        *l = rng.random_range(-2.0..2.0);
    }
    for w in pr.hyper_weight_z.iter_mut().chain(pr.hyper_weight_w.iter_mut()) {
        *w = rng.random_range(0.0..1.0);
    }
    for t in pr.hyper_target_z.iter_mut().chain(pr.hyper_target_w.iter_mut()) {
        *t = rng.random_range(0.1..5.0);
    }
    Case {
        model,
        y,
        mu,
        pr,
        dy_da: (0..p).map(|_| rng.random_range(-1.0..1.0)).collect(),
        sq_z: (0..p).map(|_| rng.random_range(0.01..4.0)).collect(),
        sq_w: (0..p - 1).map(|_| rng.random_range(0.01..4.0)).collect(),
    }
}

fn central(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    (f(x + H) - f(x - H)) / (2.0 * H)
}

/// Relative error, or zero when the two agree to `1e-9` absolute.
fn rel_err(analytic: f64, numeric: f64) -> f64 {
    let diff = (analytic - numeric).abs();
    if diff < 1e-9 {
        0.0
    } else {
        diff / analytic.abs().max(numeric.abs())
    }
}

/// Free energy with the given smoothed squared errors standing in for `eps^2`.
fn f_from_squares(c: &Case, pr: &PrecisionState) -> f64 {
    let eps = PredictionErrors {
        z: c.sq_z.iter().map(|s| s.sqrt()).collect(),
        w: c.sq_w.iter().map(|s| s.sqrt()).collect(),
    };
    free_energy_from_errors(&c.model, &eps, pr, true).total
}

/// Worst relative error between every analytic gradient and central
/// differences over `cases` random states.
pub fn worst_relative_error(cases: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let c = random_case(&mut rng);
        let p = c.mu.depth();

        let g = grad_mu_x(&c.model, &c.y, &c.mu, &c.pr).unwrap();
        for i in 0..p {
            let numeric = central(
                |x| {
                    let mut mu = c.mu;
                    mu[i] = x;
                    free_energy(&c.model, &c.y, &mu, &c.pr, false).unwrap().total
                },
                c.mu[i],
            );
            worst = worst.max(rel_err(g[i], numeric));
        }

        let ga = grad_action(&c.model, &c.y, &c.mu, &c.pr, &c.dy_da).unwrap();
        let numeric = central(
            |a| {
                let mut y = c.y;
                for (i, s) in c.dy_da.iter().enumerate() {
                    y[i] += s * a;
                }
                free_energy(&c.model, &y, &c.mu, &c.pr, false).unwrap().total
            },
            0.0,
        );
        worst = worst.max(rel_err(ga, numeric));

        let (gz, gw) = grad_log_precisions(&c.model, &c.pr, &c.sq_z, &c.sq_w).unwrap();
        for (i, g) in gz.iter().enumerate() {
            let numeric = central(
                |l| {
                    let mut pr = c.pr.clone();
                    pr.log_pi_z[i] = l;
                    f_from_squares(&c, &pr)
                },
                c.pr.log_pi_z[i],
            );
            worst = worst.max(rel_err(*g, numeric));
        }
        for (i, g) in gw.iter().enumerate() {
            let numeric = central(
                |l| {
                    let mut pr = c.pr.clone();
                    pr.log_pi_w[i] = l;
                    f_from_squares(&c, &pr)
                },
                c.pr.log_pi_w[i],
            );
            worst = worst.max(rel_err(*g, numeric));
        }
    }
    worst
}
