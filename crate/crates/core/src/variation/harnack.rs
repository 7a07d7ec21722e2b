//! Two-sided Harnack bounds for `log(M/γ(K_λ))`.
//!
//! If `γ(K_λ) <= M` on the disk `|λ| < r`, then `u = log(M/γ(K_λ))` is a
//! positive harmonic function there and
//! `(r-|λ|)/(r+|λ|) <= u(λ)/u(0) <= (r+|λ|)/(r-|λ|)`. With `r = 1` this is the
//! bound over the whole parameter disk.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{AnalysisError, CapacityProfile};

const RIM_SAMPLES: usize = 1024;
const RIM_PEAKS: usize = 4;

/// Slack allowed on each inequality, in units of `log γ`.
pub const HARNACK_TOL: f64 = 1e-12;

/// Relative margin added to the grid supremum by [`auto_bound`].
pub const AUTO_BOUND_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarnackViolation {
    pub lambda: Complex64,
    pub ratio: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Supremum of `γ` over the grid and the clip circle, times `1 + 1e-9`.
/// Pair it with `radius = clip_radius`.
///
/// The grid alone can miss the maximum by `O(h |∇γ|)`, which is far more than
/// the margin, and then `M` does not bound `γ` on the clip disk. When `log γ`
/// is subharmonic its maximum over the closed disk sits on the circle, which
/// the profile samples separately. A profile without that sample falls back
/// to the grid supremum.
pub fn auto_bound(profile: &CapacityProfile) -> f64 {
    let rim = profile.rim_max_gamma.unwrap_or(f64::NEG_INFINITY);
    profile.max_gamma().max(rim) * (1.0 + AUTO_BOUND_MARGIN)
}

/// Maximum of `f` on the circle `|λ| = radius`: a uniform scan followed by
/// golden-section refinement of the best sampled peaks.
pub(crate) fn rim_maximum<E: Send>(
    radius: f64,
    f: impl Fn(Complex64) -> Result<f64, E> + Sync,
) -> Result<f64, E> {
    // Shrink by a few ulps so that rounding in from_polar stays inside.
    let r = radius * (1.0 - 4.0 * f64::EPSILON);
    let at = |theta: f64| f(Complex64::from_polar(r, theta));
    let step = TAU / RIM_SAMPLES as f64;
    let values = (0..RIM_SAMPLES)
        .into_par_iter()
        .map(|k| at(k as f64 * step))
        .collect::<Result<Vec<f64>, E>>()?;
    let n = RIM_SAMPLES;
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&k| values[k] >= values[(k + n - 1) % n] && values[k] >= values[(k + 1) % n])
        .collect();
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for k in peaks.into_iter().take(RIM_PEAKS) {
        best = best.max(golden_max(
            &at,
            k as f64 * step - step,
            k as f64 * step + step,
        )?);
    }
    Ok(best)
}

fn golden_max<E>(f: &impl Fn(f64) -> Result<f64, E>, mut a: f64, mut b: f64) -> Result<f64, E> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    let mut best = f1.max(f2);
    while b - a > 1e-10 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1)?;
        }
        best = best.max(f1).max(f2);
    }
    Ok(best)
}

/// Points where either Harnack inequality fails by more than [`HARNACK_TOL`].
///
/// `bound` must dominate every sampled `γ` and exceed `γ(K)`; `radius` is the
/// radius of the parameter disk on which `bound` is known to hold, and every
/// grid point must lie in its closure.
///
/// The inequalities are compared after multiplying through by `log(M/γ(K))`,
/// so that the tolerance applies to the computed logarithms rather than to a
/// ratio of two possibly tiny numbers.
pub fn harnack_check(
    profile: &CapacityProfile,
    bound: f64,
    radius: f64,
) -> Result<Vec<HarnackViolation>, AnalysisError> {
    let max_gamma = profile.max_gamma();
    if !(bound.is_finite() && bound >= max_gamma) {
        return Err(AnalysisError::InvalidBound(format!(
            "M = {bound} is below the sampled maximum {max_gamma}"
        )));
    }
    if bound <= profile.base_gamma {
        return Err(AnalysisError::InvalidBound(format!(
            "M = {bound} must exceed the base capacity {}",
            profile.base_gamma
        )));
    }
    if !(radius > 0.0 && radius <= 1.0) {
        return Err(AnalysisError::InvalidBound(format!(
            "Harnack radius must lie in (0,1], got {radius}"
        )));
    }
    if let Some(p) = profile.points.iter().find(|p| p.lambda.norm() > radius) {
        return Err(AnalysisError::InvalidBound(format!(
            "grid point {} lies outside the Harnack disk of radius {radius}",
            p.lambda
        )));
    }
    let log_bound = bound.ln();
    let base = log_bound - profile.base_gamma.ln();
    Ok(profile
        .points
        .iter()
        .filter_map(|p| {
            let r = p.lambda.norm();
            let lower = (radius - r) / (radius + r);
            let upper = (radius + r) / (radius - r);
            let u = log_bound - p.log_gamma;
            let ok = lower * base - HARNACK_TOL <= u && u <= upper * base + HARNACK_TOL;
            (!ok).then_some(HarnackViolation {
                lambda: p.lambda,
                ratio: u / base,
                lower,
                upper,
            })
        })
        .collect())
}
