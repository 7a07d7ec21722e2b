//! n-point transfinite diameter by multi-start ascent on the boundary.
//!
//! Maximizers of `∏|z_i - z_j|` over a compact set lie on its outer
//! boundary, so configurations are parametrized by boundary angles and the
//! log-energy `Σ log|z_i - z_j|` is maximized by gradient ascent with
//! Barzilai-Borwein steps and Armijo backtracking.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{CompactSet, SetError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeketeOptions {
    /// Number of random starting configurations.
    pub starts: usize,
    /// Ascent iterations allowed per start.
    pub budget: usize,
    pub seed: u64,
}

impl Default for FeketeOptions {
    fn default() -> Self {
        FeketeOptions {
            starts: 64,
            budget: 2000,
            seed: 0x5eed_fe4e,
        }
    }
}

/// `d_n` for `set` with the default 64 seeded starts and `optimizer_budget`
/// iterations per start.
pub fn transfinite_diameter(
    set: &CompactSet,
    n: usize,
    optimizer_budget: usize,
) -> Result<f64, SetError> {
    transfinite_diameter_with(
        set,
        n,
        &FeketeOptions {
            budget: optimizer_budget,
            ..FeketeOptions::default()
        },
    )
}

pub fn transfinite_diameter_with(
    set: &CompactSet,
    n: usize,
    opts: &FeketeOptions,
) -> Result<f64, SetError> {
    if n < 2 {
        return Err(SetError::TooFewPoints(n));
    }
    if set.boundary_point(0.0).is_none() {
        return Err(SetError::UnsupportedSet(set.kind_name()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let starts: Vec<Vec<f64>> = (0..opts.starts.max(1))
        .map(|_| (0..n).map(|_| rng.random_range(0.0..2.0 * PI)).collect())
        .collect();

    let results: Vec<(f64, usize)> = starts
        .into_par_iter()
        .map(|phi| ascend(set, phi, opts.budget))
        .collect();

    let improved: usize = results.iter().map(|r| r.1).sum();
    if improved == 0 {
        return Err(SetError::OptimizerBudgetExceeded {
            budget: opts.budget,
        });
    }
    let best = results
        .iter()
        .map(|r| r.0)
        .fold(f64::NEG_INFINITY, f64::max);
    let pairs = (n * (n - 1) / 2) as f64;
    Ok((best / pairs).exp())
}

fn points(set: &CompactSet, phi: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
    phi.iter()
        .map(|&p| set.boundary_point(p).expect("boundary sampler"))
        .unzip()
}

fn log_energy(z: &[Complex64]) -> f64 {
    let mut e = 0.0;
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            e += (z[i] - z[j]).norm().ln();
        }
    }
    e
}

fn gradient(z: &[Complex64], dz: &[Complex64]) -> Vec<f64> {
    (0..z.len())
        .map(|k| {
            (0..z.len())
                .filter(|&j| j != k)
                .map(|j| (dz[k] / (z[k] - z[j])).re)
                .sum()
        })
        .collect()
}

// Returns (best log-energy, accepted step count).
fn ascend(set: &CompactSet, mut phi: Vec<f64>, budget: usize) -> (f64, usize) {
    let (z, dz) = points(set, &phi);
    let mut energy = log_energy(&z);
    let mut grad = gradient(&z, &dz);
    let mut step = 1e-2;
    let mut accepted = 0;
    let mut stalls = 0;
    for _ in 0..budget {
        let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
        if !energy.is_finite() || gnorm2 < 1e-24 {
            break;
        }
        let mut trial_step = step;
        let mut moved = None;
        for _ in 0..40 {
            let cand: Vec<f64> = phi
                .iter()
                .zip(&grad)
                .map(|(p, g)| p + trial_step * g)
                .collect();
            let (cz, cdz) = points(set, &cand);
            let ce = log_energy(&cz);
            if ce.is_finite() && ce >= energy + 1e-4 * trial_step * gnorm2 {
                moved = Some((cand, cz, cdz, ce));
                break;
            }
            trial_step *= 0.5;
        }
        let Some((cand, cz, cdz, ce)) = moved else {
            break;
        };
        let cgrad = gradient(&cz, &cdz);
        // Barzilai-Borwein step for the next iteration (ascent form).
        let (mut ss, mut sy) = (0.0, 0.0);
        for k in 0..phi.len() {
            let s = cand[k] - phi[k];
            let y = cgrad[k] - grad[k];
            ss += s * s;
            sy += s * y;
        }
        step = if sy < 0.0 {
            (ss / -sy).clamp(1e-8, 10.0)
        } else {
            (2.0 * trial_step).min(10.0)
        };
        let gain = ce - energy;
        phi = cand;
        grad = cgrad;
        energy = ce;
        accepted += 1;
        if gain <= 1e-15 * energy.abs().max(1.0) {
            stalls += 1;
            if stalls >= 5 {
                break;
            }
        } else {
            stalls = 0;
        }
    }
    (energy, accepted)
}
