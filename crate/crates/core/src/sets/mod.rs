//! Compact plane sets with closed-form analytic capacity.
//!
//! Only connected families are given a closed form: for those the analytic
//! capacity coincides with the logarithmic capacity, read off from the
//! derivative at infinity of the exterior Riemann map. The transfinite
//! diameter in [`fekete`] is an independent numerical route to the same
//! number.

mod fekete;

pub use fekete::{transfinite_diameter, transfinite_diameter_with, FeketeOptions};

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A point of the complex plane. Both coordinates must be finite wherever a
/// value enters a [`CompactSet`].
pub type ComplexPoint = Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SetError {
    #[error("invalid set: {0}")]
    InvalidSet(String),
    #[error("no closed-form capacity for {0}")]
    UnsupportedSet(&'static str),
    #[error("transfinite diameter requires n >= 2, got {0}")]
    TooFewPoints(usize),
    #[error("optimizer budget of {budget} iterations exhausted without improving any start")]
    OptimizerBudgetExceeded { budget: usize },
}

/// Analytic capacity, in the length units of the plane.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Capacity(f64);

impl Capacity {
    pub fn new(value: f64) -> Result<Self, SetError> {
        if value.is_finite() && value >= 0.0 {
            Ok(Capacity(value))
        } else {
            Err(SetError::InvalidSet(format!(
                "capacity must be finite and >= 0, got {value}"
            )))
        }
    }

    pub const fn zero() -> Self {
        Capacity(0.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0.0
    }
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Parametric compact subsets of the plane.
///
/// Construct through the checked constructors; the variants are public for
/// matching only.
#[derive(Debug, Clone, PartialEq)]
pub enum CompactSet {
    Disk {
        center: ComplexPoint,
        radius: f64,
    },
    Segment {
        a: ComplexPoint,
        b: ComplexPoint,
    },
    Ellipse {
        center: ComplexPoint,
        semi_major: f64,
        semi_minor: f64,
        rotation: f64,
    },
    PointCloud {
        points: Vec<ComplexPoint>,
    },
}

fn finite(z: ComplexPoint, what: &str) -> Result<(), SetError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(SetError::InvalidSet(format!(
            "{what} must be finite, got {z}"
        )))
    }
}

impl CompactSet {
    pub fn disk(center: ComplexPoint, radius: f64) -> Result<Self, SetError> {
        finite(center, "disk center")?;
        if !(radius.is_finite() && radius > 0.0) {
            return Err(SetError::InvalidSet(format!(
                "disk radius must be > 0, got {radius}"
            )));
        }
        Ok(CompactSet::Disk { center, radius })
    }

    pub fn unit_disk() -> Self {
        CompactSet::Disk {
            center: Complex64::new(0.0, 0.0),
            radius: 1.0,
        }
    }

    pub fn segment(a: ComplexPoint, b: ComplexPoint) -> Result<Self, SetError> {
        finite(a, "segment endpoint")?;
        finite(b, "segment endpoint")?;
        if a == b {
            return Err(SetError::InvalidSet(
                "segment endpoints must be distinct".into(),
            ));
        }
        Ok(CompactSet::Segment { a, b })
    }

    pub fn ellipse(
        center: ComplexPoint,
        semi_major: f64,
        semi_minor: f64,
        rotation: f64,
    ) -> Result<Self, SetError> {
        finite(center, "ellipse center")?;
        if !rotation.is_finite() {
            return Err(SetError::InvalidSet(
                "ellipse rotation must be finite".into(),
            ));
        }
        if !(semi_minor.is_finite()
            && semi_minor > 0.0
            && semi_major.is_finite()
            && semi_major >= semi_minor)
        {
            return Err(SetError::InvalidSet(format!(
                "ellipse needs semi_major >= semi_minor > 0, got {semi_major}, {semi_minor}"
            )));
        }
        Ok(CompactSet::Ellipse {
            center,
            semi_major,
            semi_minor,
            rotation,
        })
    }

    pub fn point_cloud(points: Vec<ComplexPoint>) -> Result<Self, SetError> {
        if points.is_empty() {
            return Err(SetError::InvalidSet("point cloud must be non-empty".into()));
        }
        for p in &points {
            finite(*p, "point")?;
        }
        Ok(CompactSet::PointCloud { points })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            CompactSet::Disk { .. } => "disk",
            CompactSet::Segment { .. } => "segment",
            CompactSet::Ellipse { .. } => "ellipse",
            CompactSet::PointCloud { .. } => "point cloud",
        }
    }

    /// Disks, segments and ellipses are connected; a cloud of two or more
    /// points is not.
    pub fn connected(&self) -> bool {
        match self {
            CompactSet::PointCloud { points } => points.len() < 2,
            _ => true,
        }
    }

    /// `max |z|` over the set.
    pub fn support_radius(&self) -> f64 {
        match self {
            CompactSet::Disk { center, radius } => center.norm() + radius,
            CompactSet::Segment { a, b } => a.norm().max(b.norm()),
            CompactSet::Ellipse {
                center,
                semi_major,
                semi_minor,
                rotation,
            } => ellipse_support_radius(*center, *semi_major, *semi_minor, *rotation),
            CompactSet::PointCloud { points } => {
                points.iter().map(|p| p.norm()).fold(0.0, f64::max)
            }
        }
    }

    /// Whether the closed disk `|z| <= radius` lies inside the set.
    pub fn contains_centered_disk(&self, radius: f64) -> bool {
        match self {
            CompactSet::Disk { center, radius: r } => center.norm() + radius <= *r,
            CompactSet::Ellipse {
                center,
                semi_major,
                semi_minor,
                rotation,
            } => {
                let rot = Complex64::from_polar(1.0, -rotation);
                // The ellipse is convex, so containing a fine polygon around
                // the circle is enough up to the sampling slack.
                (0..720).all(|k| {
                    let w = Complex64::from_polar(radius, 2.0 * PI * k as f64 / 720.0);
                    let local = (w - center) * rot;
                    (local.re / semi_major).powi(2) + (local.im / semi_minor).powi(2) <= 1.0
                })
            }
            _ => false,
        }
    }

    /// Boundary point at parameter `phi` (any real; periodic in `2π`).
    ///
    /// The segment is traversed by `s = (1 - cos φ)/2`, which makes the
    /// parametrization smooth and periodic with the endpoints at `φ = 0, π`.
    pub(crate) fn boundary_point(&self, phi: f64) -> Option<(ComplexPoint, ComplexPoint)> {
        match self {
            CompactSet::Disk { center, radius } => {
                let e = Complex64::from_polar(1.0, phi);
                Some((center + e * radius, Complex64::i() * e * radius))
            }
            CompactSet::Segment { a, b } => {
                let d = b - a;
                let s = 0.5 * (1.0 - phi.cos());
                Some((a + d * s, d * (0.5 * phi.sin())))
            }
            CompactSet::Ellipse {
                center,
                semi_major,
                semi_minor,
                rotation,
            } => {
                let rot = Complex64::from_polar(1.0, *rotation);
                let local = Complex64::new(semi_major * phi.cos(), semi_minor * phi.sin());
                let dlocal = Complex64::new(-semi_major * phi.sin(), semi_minor * phi.cos());
                Some((center + rot * local, rot * dlocal))
            }
            CompactSet::PointCloud { .. } => None,
        }
    }

    /// Image of the set under `z ↦ scale·z + shift`.
    pub fn affine_image(&self, scale: Complex64, shift: Complex64) -> Result<Self, SetError> {
        if scale == Complex64::new(0.0, 0.0) {
            return Err(SetError::InvalidSet("affine scale must be non-zero".into()));
        }
        match self {
            CompactSet::Disk { center, radius } => {
                CompactSet::disk(scale * center + shift, radius * scale.norm())
            }
            CompactSet::Segment { a, b } => {
                CompactSet::segment(scale * a + shift, scale * b + shift)
            }
            CompactSet::Ellipse {
                center,
                semi_major,
                semi_minor,
                rotation,
            } => CompactSet::ellipse(
                scale * center + shift,
                semi_major * scale.norm(),
                semi_minor * scale.norm(),
                rotation + scale.arg(),
            ),
            CompactSet::PointCloud { points } => {
                CompactSet::point_cloud(points.iter().map(|p| scale * p + shift).collect())
            }
        }
    }
}

/// Closed-form analytic capacity of a connected parametric set.
///
/// Disk: its radius. Segment: a quarter of its length. Ellipse: the mean of
/// its semi-axes. Finite point clouds are removable and have capacity zero by
/// definition, but there is no closed-form routine for them here, so they are
/// rejected; use [`point_cloud_capacity`] for that case.
pub fn analytic_capacity_closed_form(set: &CompactSet) -> Result<Capacity, SetError> {
    let value = match set {
        CompactSet::Disk { radius, .. } => *radius,
        CompactSet::Segment { a, b } => (b - a).norm() / 4.0,
        CompactSet::Ellipse {
            semi_major,
            semi_minor,
            ..
        } => 0.5 * (semi_major + semi_minor),
        CompactSet::PointCloud { .. } => return Err(SetError::UnsupportedSet("point cloud")),
    };
    Capacity::new(value)
}

/// Finite sets are removable for bounded holomorphic functions.
pub fn point_cloud_capacity(set: &CompactSet) -> Result<Capacity, SetError> {
    match set {
        CompactSet::PointCloud { .. } => Ok(Capacity::zero()),
        other => Err(SetError::UnsupportedSet(other.kind_name())),
    }
}

// max over θ of |c + e^{iρ}(A cos θ + i B sin θ)|. Coarse scan, then
// golden-section refinement around the best few brackets.
fn ellipse_support_radius(center: Complex64, a: f64, b: f64, rotation: f64) -> f64 {
    let rot = Complex64::from_polar(1.0, rotation);
    let g = |t: f64| (center + rot * Complex64::new(a * t.cos(), b * t.sin())).norm();
    if center.norm() == 0.0 {
        return a;
    }
    const SCAN: usize = 512;
    let step = 2.0 * PI / SCAN as f64;
    let mut candidates: Vec<(f64, f64)> = (0..SCAN)
        .map(|k| (g(k as f64 * step), k as f64 * step))
        .collect();
    candidates.sort_by(|x, y| y.0.total_cmp(&x.0));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    candidates
        .iter()
        .take(4)
        .map(|&(_, t0)| {
            let (mut lo, mut hi) = (t0 - step, t0 + step);
            for _ in 0..100 {
                let m1 = hi - inv_phi * (hi - lo);
                let m2 = lo + inv_phi * (hi - lo);
                if g(m1) < g(m2) {
                    lo = m1;
                } else {
                    hi = m2;
                }
            }
            g(0.5 * (lo + hi))
        })
        .fold(candidates[0].0, f64::max)
}
