//! Sampling `γ(K_λ)` over parameter grids and testing it for harmonicity,
//! Harnack bounds, and sub/superharmonicity.

mod grid;
mod harmonic;
mod harnack;

pub use grid::{GridField, LambdaGrid};
pub use harmonic::{
    circle_mean_deviation, harmonicity_test, rado_criterion_check, subharmonicity_test,
    superharmonicity_test, HarmonicityReport, MeanValueDeviation, RadoEntry, RadoReport,
    SubharmonicityReport, SubmeanViolation, Verdict, DEFAULT_RADO_ALPHAS, MEAN_VALUE_RADII,
};
pub use harnack::{auto_bound, harnack_check, HarnackViolation, AUTO_BOUND_MARGIN, HARNACK_TOL};

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::coefficient::{
    base_capacity, capacity_with_coefficient, CoefficientError, QuadratureConfig,
};
use crate::motion::Motion;
use crate::sets::CompactSet;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid has no interior points for the requested stencil")]
    GridTooSmall,
    #[error("field contains non-finite values")]
    NonFinite,
    #[error("invalid Harnack bound: {0}")]
    InvalidBound(String),
    #[error("capacity at lambda = {lambda}: {source}")]
    PointFailure {
        lambda: Complex64,
        source: CoefficientError,
    },
    #[error(transparent)]
    Coefficient(#[from] CoefficientError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub i: usize,
    pub j: usize,
    pub lambda: Complex64,
    /// `|a(λ)|` relative to the set the motion is based at.
    pub abs_a: f64,
    pub gamma: f64,
    pub log_gamma: f64,
}

/// `γ(K_λ)` and `log γ(K_λ)` on the retained points of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityProfile {
    pub grid: LambdaGrid,
    pub points: Vec<ProfilePoint>,
    pub base_gamma: f64,
    /// Maximum of `γ` on the clip circle, when it was sampled.
    pub rim_max_gamma: Option<f64>,
}

impl CapacityProfile {
    /// A profile whose `log γ` is prescribed, for exercising the analyses on
    /// known non-harmonic data.
    pub fn synthetic(
        grid: LambdaGrid,
        base_gamma: f64,
        log_gamma: impl Fn(Complex64) -> f64 + Sync,
    ) -> Self {
        let points = grid
            .points()
            .into_iter()
            .map(|(i, j, lambda)| {
                let lg = log_gamma(lambda);
                let gamma = lg.exp();
                ProfilePoint {
                    i,
                    j,
                    lambda,
                    abs_a: gamma / base_gamma,
                    gamma,
                    log_gamma: lg,
                }
            })
            .collect();
        let rim = harnack::rim_maximum(grid.clip_radius, |l| {
            Ok::<f64, std::convert::Infallible>(log_gamma(l).exp())
        });
        CapacityProfile {
            grid,
            points,
            base_gamma,
            rim_max_gamma: rim.ok(),
        }
    }

    pub fn log_gamma_field(&self) -> GridField {
        let values: Vec<f64> = self.points.iter().map(|p| p.log_gamma).collect();
        GridField::from_points(self.grid, &values).expect("profile points follow grid order")
    }

    pub fn gamma_field(&self) -> GridField {
        let values: Vec<f64> = self.points.iter().map(|p| p.gamma).collect();
        GridField::from_points(self.grid, &values).expect("profile points follow grid order")
    }

    pub fn max_gamma(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.gamma)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Evaluates `γ(K_λ) = |a(λ)| γ(K)` at every retained grid point.
///
/// Points are computed in parallel; the result is independent of scheduling.
/// On failure the error names the first failing point in grid order.
pub fn capacity_profile(
    base: &CompactSet,
    motion: &Motion,
    grid: &LambdaGrid,
    quad: &QuadratureConfig,
) -> Result<CapacityProfile, AnalysisError> {
    if grid.clip_radius > motion.rho_max() {
        return Err(AnalysisError::InvalidGrid(format!(
            "clip radius {} exceeds the motion's parameter cap {}",
            grid.clip_radius,
            motion.rho_max()
        )));
    }
    quad.validate(motion)?;
    let g0 = base_capacity(base, motion, quad)?;
    let results: Vec<Result<ProfilePoint, AnalysisError>> = grid
        .points()
        .into_par_iter()
        .map(|(i, j, lambda)| {
            let (gamma, a) = capacity_with_coefficient(g0, motion, lambda, quad)
                .map_err(|source| AnalysisError::PointFailure { lambda, source })?;
            let gamma = gamma.value();
            Ok(ProfilePoint {
                i,
                j,
                lambda,
                abs_a: a.value.norm(),
                gamma,
                log_gamma: gamma.ln(),
            })
        })
        .collect();
    let points = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let rim = harnack::rim_maximum(grid.clip_radius, |lambda| {
        capacity_with_coefficient(g0, motion, lambda, quad)
            .map(|(g, _)| g.value())
            .map_err(|source| AnalysisError::PointFailure { lambda, source })
    })?;
    Ok(CapacityProfile {
        grid: *grid,
        points,
        base_gamma: g0.value(),
        rim_max_gamma: Some(rim),
    })
}
