//! Generalised coordinates of motion.
//!
//! A [`GeneralisedSignal`] holds a scalar together with its first few temporal
//! derivatives ("embedding orders"). Order 0 is the value, order `i` the `i`-th
//! derivative. Measured signals are lifted into this form with backward finite
//! differences ([`embed`]) and the derivative operator acts by shifting orders
//! down ([`GeneralisedSignal::shift`]).
//!
//! Noise synthesis lives here as well: white Gaussian sequences and coloured
//! sequences obtained by smoothing white noise with a Gaussian kernel.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported embedding depth.
pub const MAX_DEPTH: usize = 6;

/// Embedding depth used unless configured otherwise (value, velocity, acceleration).
pub const DEFAULT_DEPTH: usize = 3;

/// A scalar signal and its temporal derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralisedSignal {
    orders: [f64; MAX_DEPTH],
    depth: usize,
}

impl GeneralisedSignal {
    /// All-zero signal of the given depth.
    ///
    /// # Panics
    ///
    /// If `depth` is zero or exceeds [`MAX_DEPTH`].
    pub fn zeros(depth: usize) -> Self {
        assert!(
            (1..=MAX_DEPTH).contains(&depth),
            "embedding depth must be in 1..={MAX_DEPTH}, got {depth}"
        );
        Self {
            orders: [0.0; MAX_DEPTH],
            depth,
        }
    }

    /// Builds a signal from explicit orders.
    ///
    /// # Panics
    ///
    /// If `orders` is empty or longer than [`MAX_DEPTH`].
    pub fn from_orders(orders: &[f64]) -> Self {
        let mut g = Self::zeros(orders.len());
        g.orders[..orders.len()].copy_from_slice(orders);
        g
    }

    /// A value with all derivative orders zero (a constant signal).
    pub fn constant(value: f64, depth: usize) -> Self {
        let mut g = Self::zeros(depth);
        g.orders[0] = value;
        g
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn orders(&self) -> &[f64] {
        &self.orders[..self.depth]
    }

    pub fn orders_mut(&mut self) -> &mut [f64] {
        &mut self.orders[..self.depth]
    }

    pub fn is_finite(&self) -> bool {
        self.orders().iter().all(|v| v.is_finite())
    }

    /// The derivative operator on a finite embedding: every order moves down
    /// one slot and the top order is truncated to zero.
    pub fn shift(&self) -> Self {
        let mut out = Self::zeros(self.depth);
        out.orders[..self.depth - 1].copy_from_slice(&self.orders[1..self.depth]);
        out
    }

    pub(crate) fn check_depth(&self, expected: usize) -> Result<()> {
        if self.depth == expected {
            Ok(())
        } else {
            Err(Error::DepthMismatch {
                expected,
                got: self.depth,
            })
        }
    }
}

impl Index<usize> for GeneralisedSignal {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.orders()[i]
    }
}

impl IndexMut<usize> for GeneralisedSignal {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.orders_mut()[i]
    }
}

impl Add for GeneralisedSignal {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        assert_eq!(self.depth, rhs.depth, "depth mismatch");
        for (a, b) in self.orders_mut().iter_mut().zip(rhs.orders()) {
            *a += b;
        }
        self
    }
}

impl Sub for GeneralisedSignal {
    type Output = Self;

    fn sub(mut self, rhs: Self) -> Self {
        assert_eq!(self.depth, rhs.depth, "depth mismatch");
        for (a, b) in self.orders_mut().iter_mut().zip(rhs.orders()) {
            *a -= b;
        }
        self
    }
}

impl Mul<GeneralisedSignal> for f64 {
    type Output = GeneralisedSignal;

    fn mul(self, mut rhs: GeneralisedSignal) -> GeneralisedSignal {
        for a in rhs.orders_mut() {
            *a *= self;
        }
        rhs
    }
}

/// Lifts the most recent samples of a measured scalar into generalised
/// coordinates using backward finite differences.
///
/// `window` is ordered oldest to newest; only the last `depth` samples are
/// used. Order `i` is the `i`-th backward difference divided by `dt^i`.
pub fn embed(window: &[f64], dt: f64, depth: usize) -> Result<GeneralisedSignal> {
    if window.len() < depth {
        return Err(Error::InsufficientWindow {
            got: window.len(),
            need: depth,
        });
    }
    if !(dt > 0.0) {
        return Err(Error::invalid("dt", "must be > 0"));
    }
    let mut diffs = [0.0; MAX_DEPTH];
    diffs[..depth].copy_from_slice(&window[window.len() - depth..]);
    let mut out = GeneralisedSignal::zeros(depth);
    let mut scale = 1.0;
    // After pass i, diffs[depth-1] holds the i-th backward difference at the newest sample.
    for i in 0..depth {
        out.orders[i] = diffs[depth - 1] / scale;
        for j in (i + 1..depth).rev() {
            diffs[j] -= diffs[j - 1];
        }
        scale *= dt;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    #[default]
    White,
    Coloured,
}

/// Description of a Gaussian noise source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    /// Standard deviation in signal units.
    pub sigma: f64,
    /// Kernel width in seconds (coloured only).
    pub gamma: f64,
    pub seed: u64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            kind: NoiseKind::White,
            sigma: 0.0,
            gamma: 0.1,
            seed: 0,
        }
    }
}

impl NoiseSpec {
    pub fn white(sigma: f64, seed: u64) -> Self {
        Self {
            kind: NoiseKind::White,
            sigma,
            seed,
            ..Self::default()
        }
    }

    pub fn coloured(sigma: f64, gamma: f64, seed: u64) -> Self {
        Self {
            kind: NoiseKind::Coloured,
            sigma,
            gamma,
            seed,
        }
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::invalid(format!("{field}.sigma"), "must be finite and >= 0"));
        }
        if self.kind == NoiseKind::Coloured && !(self.gamma > 0.0) {
            return Err(Error::invalid(
                format!("{field}.gamma"),
                "must be > 0 for coloured noise",
            ));
        }
        Ok(())
    }

    /// Unit-variance sample path with this spec's temporal structure.
    ///
    /// Each sample has standard deviation 1 regardless of `dt`; callers scale
    /// it either per sample (sensors) or as a noise density (process noise).
    pub fn unit_path(&self, n: usize, dt: f64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        match self.kind {
            NoiseKind::White => (0..n).map(|_| StandardNormal.sample(&mut rng)).collect(),
            NoiseKind::Coloured => {
                let kernel = gaussian_kernel(self.gamma, dt);
                let half = kernel.len() / 2;
                let white: Vec<f64> = (0..n + 2 * half).map(|_| StandardNormal.sample(&mut rng)).collect();
                let mut out: Vec<f64> = white
                    .windows(kernel.len())
                    .map(|w| w.iter().zip(&kernel).map(|(a, k)| a * k).sum())
                    .collect();
                let std = sample_std(&out);
                if std > 0.0 {
                    out.iter_mut().for_each(|v| *v /= std);
                }
                out
            }
        }
    }
}

/// Unit-sum Gaussian kernel with standard deviation `gamma` seconds, truncated at four widths.
fn gaussian_kernel(gamma: f64, dt: f64) -> Vec<f64> {
    let half = ((4.0 * gamma / dt).ceil() as usize).max(1);
    let mut k: Vec<f64> = (0..=2 * half)
        .map(|i| {
            let t = (i as f64 - half as f64) * dt;
            (-0.5 * (t / gamma).powi(2)).exp()
        })
        .collect();
    let total: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= total);
    k
}

fn sample_std(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// Draws `n` noise samples at step `dt`.
///
/// White samples have standard deviation `sigma / sqrt(dt)`, i.e. `sigma` is a
/// noise density suitable for Euler integration of a driving process.
/// Coloured samples are Gaussian-smoothed and rescaled so their empirical
/// standard deviation is `sigma`.
pub fn sample_noise(spec: &NoiseSpec, n: usize, dt: f64) -> Vec<f64> {
    if spec.sigma == 0.0 {
        return vec![0.0; n];
    }
    let scale = match spec.kind {
        NoiseKind::White => spec.sigma / dt.sqrt(),
        NoiseKind::Coloured => spec.sigma,
    };
    let mut path = spec.unit_path(n, dt);
    path.iter_mut().for_each(|v| *v *= scale);
    path
}
