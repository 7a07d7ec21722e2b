//! Leading coefficient at infinity by contour quadrature, and the resulting
//! analytic capacity of the moved set.
//!
//! For `f_λ(z) = a(λ) z + O(1)` conformal off `K`, the coefficient is
//! `a(λ) = (1/2πi) ∮_{|z|=R} f(λ,z)/z² dz` for every `R` enclosing `K`, and
//! `γ(K_λ) = |a(λ)| γ(K)`. The integrand is holomorphic in an annulus, so
//! the periodic trapezoid rule converges geometrically.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::motion::{Motion, MotionError, MotionKind};
use crate::sets::{analytic_capacity_closed_form, Capacity, CompactSet, SetError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoefficientError {
    #[error("contour radius {radius} must exceed {required}")]
    RadiusTooSmall { radius: f64, required: f64 },
    #[error(
        "quadrature did not converge: last change {achieved:e} at {nodes} nodes (tol {tol:e})"
    )]
    QuadratureNonconvergence {
        achieved: f64,
        tol: f64,
        nodes: usize,
    },
    #[error(
        "leading coefficient vanishes (|a| = {modulus:e}); the family is not conformal at infinity"
    )]
    ZeroCoefficient { modulus: f64 },
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),
    #[error("base set has zero analytic capacity")]
    ZeroCapacityBase,
    #[error("motion is declared conformal off a {declared}, not off the supplied {supplied}")]
    NotConformalOffBase {
        declared: &'static str,
        supplied: &'static str,
    },
    #[error(transparent)]
    Motion(#[from] MotionError),
    #[error(transparent)]
    Set(#[from] SetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub radius: f64,
    /// Initial node count; a power of two, at least 16.
    pub nodes: usize,
    pub tol: f64,
    pub max_doublings: u32,
}

impl QuadratureConfig {
    pub const DEFAULT_NODES: usize = 256;
    pub const DEFAULT_TOL: f64 = 1e-12;
    pub const DEFAULT_MAX_DOUBLINGS: u32 = 6;

    pub fn with_radius(radius: f64) -> Self {
        QuadratureConfig {
            radius,
            nodes: Self::DEFAULT_NODES,
            tol: Self::DEFAULT_TOL,
            max_doublings: Self::DEFAULT_MAX_DOUBLINGS,
        }
    }

    /// Twice the motion's singular radius.
    pub fn auto(motion: &Motion) -> Self {
        Self::with_radius(2.0 * motion.singular_radius())
    }

    pub fn validate(&self, motion: &Motion) -> Result<(), CoefficientError> {
        check_nodes(self.nodes)?;
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(CoefficientError::InvalidConfig(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_doublings == 0 {
            return Err(CoefficientError::InvalidConfig(
                "max_doublings must be at least 1".into(),
            ));
        }
        check_radius(self.radius, motion)
    }
}

fn check_nodes(nodes: usize) -> Result<(), CoefficientError> {
    if nodes < 16 || !nodes.is_power_of_two() {
        return Err(CoefficientError::InvalidConfig(format!(
            "node count must be a power of two >= 16, got {nodes}"
        )));
    }
    Ok(())
}

fn check_radius(radius: f64, motion: &Motion) -> Result<(), CoefficientError> {
    let required = motion.singular_radius();
    if !(radius.is_finite() && radius > required) {
        return Err(CoefficientError::RadiusTooSmall { radius, required });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeadingCoefficient {
    pub value: Complex64,
    /// Change between the last two node doublings.
    pub achieved_tol: f64,
    pub nodes_used: usize,
}

// Σ f(λ, R e^{iθ_k}) e^{-iθ_k} over the nodes k ≡ offset (mod stride) of an
// N-point rule.
fn node_sum(
    motion: &Motion,
    lambda: Complex64,
    radius: f64,
    n: usize,
    offset: usize,
    stride: usize,
) -> Result<Complex64, MotionError> {
    let mut sum = Complex64::new(0.0, 0.0);
    for k in (offset..n).step_by(stride) {
        let e = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
        sum += motion.evaluate(lambda, e * radius)? * e.conj();
    }
    Ok(sum)
}

/// Single-pass `n`-node trapezoid estimate of the coefficient on `|z| = radius`.
pub fn trapezoid_coefficient(
    motion: &Motion,
    lambda: Complex64,
    radius: f64,
    n: usize,
) -> Result<Complex64, CoefficientError> {
    check_nodes(n)?;
    check_radius(radius, motion)?;
    Ok(node_sum(motion, lambda, radius, n, 0, 1)? / (n as f64 * radius))
}

/// `a(λ)` with node doubling until successive estimates agree to
/// `tol·max(1, |a|)`.
pub fn leading_coefficient(
    motion: &Motion,
    lambda: Complex64,
    quad: &QuadratureConfig,
) -> Result<LeadingCoefficient, CoefficientError> {
    quad.validate(motion)?;
    let r = quad.radius;
    let mut n = quad.nodes;
    let mut sum = node_sum(motion, lambda, r, n, 0, 1)?;
    let mut estimate = sum / (n as f64 * r);
    let mut change = f64::INFINITY;
    for _ in 0..quad.max_doublings {
        // The refined rule reuses the old nodes; only the odd ones are new.
        sum += node_sum(motion, lambda, r, 2 * n, 1, 2)?;
        n *= 2;
        let refined = sum / (n as f64 * r);
        change = (refined - estimate).norm();
        estimate = refined;
        if change < quad.tol * estimate.norm().max(1.0) {
            let modulus = estimate.norm();
            if modulus < quad.tol {
                return Err(CoefficientError::ZeroCoefficient { modulus });
            }
            return Ok(LeadingCoefficient {
                value: estimate,
                achieved_tol: change,
                nodes_used: n,
            });
        }
    }
    Err(CoefficientError::QuadratureNonconvergence {
        achieved: change,
        tol: quad.tol,
        nodes: n,
    })
}

/// `|a(R1) - a(R2)|` at a fixed node count. Cauchy's theorem makes this
/// quadrature noise for any two admissible radii.
pub fn r_independence_check(
    motion: &Motion,
    lambda: Complex64,
    r1: f64,
    r2: f64,
    n: usize,
) -> Result<f64, CoefficientError> {
    let a1 = trapezoid_coefficient(motion, lambda, r1, n)?;
    let a2 = trapezoid_coefficient(motion, lambda, r2, n)?;
    Ok((a1 - a2).norm())
}

/// Analytic capacity of the set the motion is based at.
///
/// For plain families this is `γ(base)`. A rebased motion is based at
/// `K_{λ0}`, whose capacity is `|a_inner(λ0)| γ(base)`.
pub fn base_capacity(
    base: &CompactSet,
    motion: &Motion,
    quad: &QuadratureConfig,
) -> Result<Capacity, CoefficientError> {
    if base != motion.conformal_off() {
        return Err(CoefficientError::NotConformalOffBase {
            declared: motion.conformal_off().kind_name(),
            supplied: base.kind_name(),
        });
    }
    let root = match analytic_capacity_closed_form(base) {
        Ok(g) if g.is_positive() => g,
        Ok(_) => return Err(CoefficientError::ZeroCapacityBase),
        Err(SetError::UnsupportedSet("point cloud")) => {
            return Err(CoefficientError::ZeroCapacityBase)
        }
        Err(e) => return Err(e.into()),
    };
    reference_capacity(motion, root, quad)
}

fn reference_capacity(
    motion: &Motion,
    root: Capacity,
    quad: &QuadratureConfig,
) -> Result<Capacity, CoefficientError> {
    match motion.kind() {
        MotionKind::Rebased { inner, lambda0 } => {
            let inner_quad = QuadratureConfig {
                radius: 2.0 * inner.singular_radius(),
                ..*quad
            };
            let a0 = leading_coefficient(inner, Complex64::new(*lambda0, 0.0), &inner_quad)?;
            let g = reference_capacity(inner, root, quad)?;
            Ok(Capacity::new(a0.value.norm() * g.value())?)
        }
        MotionKind::Scaled { inner, .. } => reference_capacity(inner, root, quad),
        _ => Ok(root),
    }
}

/// `γ(K_λ) = |a(λ)| γ(K)`.
///
/// The orientation is fixed by scaling: `z ↦ az` carries the unit disk to
/// the disk of radius `|a|`, whose capacity is `|a|`.
pub fn capacity_under_motion(
    base: &CompactSet,
    motion: &Motion,
    lambda: Complex64,
    quad: &QuadratureConfig,
) -> Result<Capacity, CoefficientError> {
    let g0 = base_capacity(base, motion, quad)?;
    let a = leading_coefficient(motion, lambda, quad)?;
    Ok(Capacity::new(a.value.norm() * g0.value())?)
}

/// Capacity and the coefficient it came from, sharing one quadrature.
pub(crate) fn capacity_with_coefficient(
    g0: Capacity,
    motion: &Motion,
    lambda: Complex64,
    quad: &QuadratureConfig,
) -> Result<(Capacity, LeadingCoefficient), CoefficientError> {
    let a = leading_coefficient(motion, lambda, quad)?;
    Ok((Capacity::new(a.value.norm() * g0.value())?, a))
}
