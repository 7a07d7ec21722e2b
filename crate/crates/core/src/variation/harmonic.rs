//! Discrete harmonicity and sub-mean-value tests on grid fields.
//!
//! Two independent discretizations: the five-point Laplacian, and circle
//! means computed with a 32-node trapezoid on circles of radius `4h` and `8h`
//! whose off-lattice values come from degree-5 tensor Lagrange interpolation.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AnalysisError, CapacityProfile, GridField};

/// Mean-value circle radii, in grid spacings.
pub const MEAN_VALUE_RADII: [usize; 2] = [4, 8];

/// 33 equispaced exponents on `[-8, 8]`.
pub const DEFAULT_RADO_ALPHAS: [f64; 33] = {
    let mut a = [0.0; 33];
    let mut k = 0;
    while k < 33 {
        a[k] = -8.0 + 0.5 * k as f64;
        k += 1;
    }
    a
};

const CIRCLE_NODES: usize = 32;

// Sub-mean tolerance for the Radó sweep, relative to the largest weighted value.
const RADO_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    Violated,
}

impl Verdict {
    fn from_ok(ok: bool) -> Self {
        if ok {
            Verdict::Consistent
        } else {
            Verdict::Violated
        }
    }

    pub fn is_consistent(self) -> bool {
        self == Verdict::Consistent
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "consistent",
            Verdict::Violated => "violated",
        })
    }
}

fn circle_mean(field: &GridField, i: usize, j: usize, m: usize) -> Option<f64> {
    let mut sum = 0.0;
    for k in 0..CIRCLE_NODES {
        let theta = 2.0 * PI * k as f64 / CIRCLE_NODES as f64;
        sum += field.interpolate(
            i as f64 + m as f64 * theta.cos(),
            j as f64 + m as f64 * theta.sin(),
        )?;
    }
    Some(sum / CIRCLE_NODES as f64)
}

/// Largest `|u(c) - mean over the circle of radius m·h about c|` over all
/// centers whose circle stencil is fully retained, with the number of such
/// centers.
pub fn circle_mean_deviation(field: &GridField, m: usize) -> (f64, usize) {
    let grid = field.grid();
    grid.points()
        .par_iter()
        .filter_map(|&(i, j, _)| {
            let center = field.get(i as isize, j as isize)?;
            circle_mean(field, i, j, m).map(|mean| (center - mean).abs())
        })
        .fold(|| (0.0f64, 0usize), |(mx, n), d| (mx.max(d), n + 1))
        .reduce(|| (0.0, 0), |a, b| (a.0.max(b.0), a.1 + b.1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanValueDeviation {
    pub radius: f64,
    pub max_deviation: f64,
    pub centers: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicityReport {
    pub max_laplacian_residual: f64,
    pub interior_points: usize,
    pub mean_value_deviations: Vec<MeanValueDeviation>,
    /// `|Δ_h log γ|` per profile point (grid order); `None` off the interior.
    pub laplacian: Vec<Option<f64>>,
    pub verdict: Verdict,
}

/// Five-point Laplacian of `log γ` at interior points plus circle-mean
/// deviations; consistent iff every residual is below `tol`.
pub fn harmonicity_test(
    profile: &CapacityProfile,
    tol: f64,
) -> Result<HarmonicityReport, AnalysisError> {
    let field = profile.log_gamma_field();
    field.ensure_finite()?;
    let h2 = profile.grid.spacing * profile.grid.spacing;
    let laplacian: Vec<Option<f64>> = profile
        .points
        .iter()
        .map(|p| {
            let (i, j) = (p.i as isize, p.j as isize);
            let e = field.get(i + 1, j)?;
            let w = field.get(i - 1, j)?;
            let n = field.get(i, j + 1)?;
            let s = field.get(i, j - 1)?;
            Some(((e + w + n + s - 4.0 * p.log_gamma) / h2).abs())
        })
        .collect();
    let interior_points = laplacian.iter().flatten().count();
    if interior_points == 0 {
        return Err(AnalysisError::GridTooSmall);
    }
    let max_laplacian_residual = laplacian.iter().flatten().copied().fold(0.0, f64::max);
    let mean_value_deviations: Vec<MeanValueDeviation> = MEAN_VALUE_RADII
        .iter()
        .map(|&m| {
            let (max_deviation, centers) = circle_mean_deviation(&field, m);
            MeanValueDeviation {
                radius: m as f64 * profile.grid.spacing,
                max_deviation,
                centers,
            }
        })
        .collect();
    let ok =
        max_laplacian_residual < tol && mean_value_deviations.iter().all(|d| d.max_deviation < tol);
    Ok(HarmonicityReport {
        max_laplacian_residual,
        interior_points,
        mean_value_deviations,
        laplacian,
        verdict: Verdict::from_ok(ok),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubmeanViolation {
    pub lambda: Complex64,
    pub radius: f64,
    /// `u(c) - circle mean`, which exceeds the tolerance.
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubharmonicityReport {
    pub verdict: Verdict,
    pub centers_checked: usize,
    pub violated_at: Vec<SubmeanViolation>,
}

/// Checks `u(c) <= mean of u over circles of radius 4h, 8h about c + tol` at
/// every center whose circle stencil is retained.
pub fn subharmonicity_test(
    field: &GridField,
    tol: f64,
) -> Result<SubharmonicityReport, AnalysisError> {
    field.ensure_finite()?;
    let grid = *field.grid();
    let per_center: Vec<(usize, Vec<SubmeanViolation>)> = grid
        .points()
        .par_iter()
        .filter_map(|&(i, j, lambda)| {
            let center = field.get(i as isize, j as isize)?;
            let mut checked = 0;
            let mut bad = Vec::new();
            for &m in &MEAN_VALUE_RADII {
                if let Some(mean) = circle_mean(field, i, j, m) {
                    checked = 1;
                    if center - mean > tol {
                        bad.push(SubmeanViolation {
                            lambda,
                            radius: m as f64 * grid.spacing,
                            excess: center - mean,
                        });
                    }
                }
            }
            (checked > 0).then_some((checked, bad))
        })
        .collect();
    if per_center.is_empty() {
        return Err(AnalysisError::GridTooSmall);
    }
    let centers_checked = per_center.len();
    let violated_at: Vec<SubmeanViolation> = per_center.into_iter().flat_map(|(_, v)| v).collect();
    Ok(SubharmonicityReport {
        verdict: Verdict::from_ok(violated_at.is_empty()),
        centers_checked,
        violated_at,
    })
}

/// The sub-mean test applied to `-u`.
pub fn superharmonicity_test(
    field: &GridField,
    tol: f64,
) -> Result<SubharmonicityReport, AnalysisError> {
    subharmonicity_test(&field.map(|_, v| -v), tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadoEntry {
    pub alpha: f64,
    pub verdict: Verdict,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadoReport {
    pub entries: Vec<RadoEntry>,
    /// Whether `|e^{αλ}| u` passed the sub-mean test for every supplied `α`.
    /// Over a finite list this is a necessary condition for `log u` to be
    /// subharmonic, not a proof.
    pub log_subharmonic_consistent: bool,
}

impl RadoReport {
    pub fn first_violating_alpha(&self) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| !e.verdict.is_consistent())
            .map(|e| e.alpha)
    }
}

/// Sub-mean test of `e^{α Re λ} u(λ)` for each `α`.
pub fn rado_criterion_check(
    values: &GridField,
    alphas: &[f64],
) -> Result<RadoReport, AnalysisError> {
    values.ensure_finite()?;
    if values.retained_values().any(|v| v <= 0.0) {
        return Err(AnalysisError::InvalidGrid(
            "Radó check needs strictly positive values".into(),
        ));
    }
    let entries = alphas
        .par_iter()
        .map(|&alpha| {
            let weighted = values.map(|l, u| (alpha * l.re).exp() * u);
            let scale = weighted.retained_values().fold(0.0, f64::max);
            let report = subharmonicity_test(&weighted, RADO_REL_TOL * scale)?;
            Ok(RadoEntry {
                alpha,
                verdict: report.verdict,
                violations: report.violated_at.len(),
            })
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    let log_subharmonic_consistent = entries.iter().all(|e| e.verdict.is_consistent());
    Ok(RadoReport {
        entries,
        log_subharmonic_consistent,
    })
}
