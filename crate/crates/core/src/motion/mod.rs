//! Holomorphic motions of the sphere that fix infinity.
//!
//! Built-in families form a closed enumeration so that conformality off the
//! base set holds by construction. Arbitrary families can be plugged into the
//! sampled axiom checker through [`MotionFamily`], but nothing about them is
//! guaranteed.

mod axioms;

pub use axioms::{
    verify_motion_axioms, InjectivityViolation, MotionAxiomReport, MotionFamily, UncheckedFamily,
};

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::sets::CompactSet;

pub const DEFAULT_RHO_MAX: f64 = 0.9;

// Relative slack when deciding whether a point sits on the boundary of an
// exclusion disk.
const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MotionError {
    #[error("|lambda| = {modulus} exceeds the parameter cap {rho_max}")]
    OutOfParameterDisk { modulus: f64, rho_max: f64 },
    #[error("point {z} lies outside the domain of the motion")]
    DomainViolation { z: Complex64 },
    #[error("invalid motion: {0}")]
    InvalidMotion(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum MotionKind {
    Identity,
    /// `z + λc`
    Translation {
        c: Complex64,
    },
    /// `e^{αλ} z`
    ScaleRotate {
        alpha: Complex64,
    },
    /// `z + λc/z` on `|z| >= exclusion_radius`, with `|c| <= exclusion_radius²`.
    Joukowski {
        c: Complex64,
        exclusion_radius: f64,
    },
    /// `f((λ0-λ)/(1-λλ0), f_{λ0}^{-1}(z))`
    Rebased {
        inner: Box<Motion>,
        lambda0: f64,
    },
    /// `e^{αλ} f(λ, z)` with real `α`.
    Scaled {
        inner: Box<Motion>,
        alpha: f64,
    },
}

/// A holomorphic motion together with the compact set it is conformal off
/// and the parameter cap `rho_max`.
///
/// For wrapper kinds the stored set is the root set of the innermost family.
/// A rebased motion is conformal off the image of that set at `lambda0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Motion {
    kind: MotionKind,
    conformal_off: CompactSet,
    rho_max: f64,
}

fn check_finite(z: Complex64, what: &str) -> Result<(), MotionError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(MotionError::InvalidMotion(format!("{what} must be finite")))
    }
}

impl Motion {
    fn basic(kind: MotionKind, conformal_off: CompactSet) -> Self {
        Motion {
            kind,
            conformal_off,
            rho_max: DEFAULT_RHO_MAX,
        }
    }

    pub fn identity(conformal_off: CompactSet) -> Self {
        Motion::basic(MotionKind::Identity, conformal_off)
    }

    pub fn translation(conformal_off: CompactSet, c: Complex64) -> Result<Self, MotionError> {
        check_finite(c, "translation vector")?;
        Ok(Motion::basic(MotionKind::Translation { c }, conformal_off))
    }

    pub fn scale_rotate(conformal_off: CompactSet, alpha: Complex64) -> Result<Self, MotionError> {
        check_finite(alpha, "alpha")?;
        Ok(Motion::basic(
            MotionKind::ScaleRotate { alpha },
            conformal_off,
        ))
    }

    /// The exclusion disk must lie inside `conformal_off`; otherwise the map
    /// would not be injective on the complement of the set.
    pub fn joukowski(
        conformal_off: CompactSet,
        c: Complex64,
        exclusion_radius: f64,
    ) -> Result<Self, MotionError> {
        check_finite(c, "c")?;
        if !(exclusion_radius.is_finite() && exclusion_radius > 0.0) {
            return Err(MotionError::InvalidMotion(
                "exclusion radius must be positive".into(),
            ));
        }
        if c.norm() > exclusion_radius * exclusion_radius * (1.0 + DOMAIN_SLACK) {
            return Err(MotionError::InvalidMotion(format!(
                "|c| = {} exceeds exclusion_radius^2 = {}",
                c.norm(),
                exclusion_radius * exclusion_radius
            )));
        }
        if !conformal_off.contains_centered_disk(exclusion_radius) {
            return Err(MotionError::InvalidMotion(format!(
                "{} does not contain the exclusion disk |z| <= {exclusion_radius}",
                conformal_off.kind_name()
            )));
        }
        Ok(Motion::basic(
            MotionKind::Joukowski {
                c,
                exclusion_radius,
            },
            conformal_off,
        ))
    }

    pub fn with_rho_max(mut self, rho_max: f64) -> Result<Self, MotionError> {
        if !(rho_max > 0.0 && rho_max < 1.0) {
            return Err(MotionError::InvalidMotion(format!(
                "rho_max must lie in (0,1), got {rho_max}"
            )));
        }
        self.rho_max = rho_max;
        Ok(self)
    }

    /// Moves the base point of the motion to `lambda0`:
    /// `f̃(λ, z) = f((λ0-λ)/(1-λλ0), f_{λ0}^{-1}(z))`, so that `f̃(0, ·)` is
    /// the identity and `f̃_λ(K_{λ0}) = K_{(λ0-λ)/(1-λλ0)}`.
    pub fn rebase(&self, lambda0: f64) -> Result<Motion, MotionError> {
        if !lambda0.is_finite() || lambda0.abs() > self.rho_max {
            return Err(MotionError::OutOfParameterDisk {
                modulus: lambda0.abs(),
                rho_max: self.rho_max,
            });
        }
        Ok(Motion {
            kind: MotionKind::Rebased {
                inner: Box::new(self.clone()),
                lambda0,
            },
            conformal_off: self.conformal_off.clone(),
            rho_max: self.rho_max,
        })
    }

    /// `e^{αλ} f(λ, z)`, which replaces `K_λ` by `e^{αλ} K_λ`.
    pub fn scaled(&self, alpha: f64) -> Result<Motion, MotionError> {
        if !alpha.is_finite() {
            return Err(MotionError::InvalidMotion("alpha must be finite".into()));
        }
        Ok(Motion {
            kind: MotionKind::Scaled {
                inner: Box::new(self.clone()),
                alpha,
            },
            conformal_off: self.conformal_off.clone(),
            rho_max: self.rho_max,
        })
    }

    pub fn kind(&self) -> &MotionKind {
        &self.kind
    }

    pub fn conformal_off(&self) -> &CompactSet {
        &self.conformal_off
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    /// Radius of the exclusion region the map is undefined on (0 for entire
    /// families).
    pub fn exclusion_radius(&self) -> f64 {
        match &self.kind {
            MotionKind::Identity
            | MotionKind::Translation { .. }
            | MotionKind::ScaleRotate { .. } => 0.0,
            MotionKind::Joukowski {
                exclusion_radius, ..
            } => *exclusion_radius,
            MotionKind::Scaled { inner, .. } => inner.exclusion_radius(),
            MotionKind::Rebased { inner, lambda0 } => {
                let r = inner.exclusion_radius();
                if r == 0.0 {
                    0.0
                } else {
                    inner.image_circle_bound(*lambda0, r)
                }
            }
        }
    }

    /// Radius outside which every `f_λ` is holomorphic and injective and
    /// which encloses the base set of the motion. Contour radii must exceed it.
    pub fn singular_radius(&self) -> f64 {
        match &self.kind {
            MotionKind::Rebased { inner, lambda0 } => {
                inner.image_circle_bound(*lambda0, inner.singular_radius())
            }
            MotionKind::Scaled { inner, .. } => inner.singular_radius(),
            _ => self
                .conformal_off
                .support_radius()
                .max(self.exclusion_radius()),
        }
    }

    // Upper bound on max_{|w|=r} |f_λ(w)|, sampled with a 1% margin.
    fn image_circle_bound(&self, lambda: f64, r: f64) -> f64 {
        const SAMPLES: usize = 4096;
        let lambda = Complex64::new(lambda, 0.0);
        let max = (0..SAMPLES)
            .filter_map(|k| {
                let w = Complex64::from_polar(r, 2.0 * PI * k as f64 / SAMPLES as f64);
                self.eval_raw(lambda, w).ok().map(|v| v.norm())
            })
            .fold(0.0, f64::max);
        max * 1.01
    }

    /// `f(λ, z)`.
    pub fn evaluate(&self, lambda: Complex64, z: Complex64) -> Result<Complex64, MotionError> {
        let modulus = lambda.norm();
        if !modulus.is_finite() || modulus > self.rho_max {
            return Err(MotionError::OutOfParameterDisk {
                modulus,
                rho_max: self.rho_max,
            });
        }
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(MotionError::DomainViolation { z });
        }
        self.eval_raw(lambda, z)
    }

    /// `f_λ^{-1}(w)`.
    pub fn inverse(&self, lambda: Complex64, w: Complex64) -> Result<Complex64, MotionError> {
        let modulus = lambda.norm();
        if !modulus.is_finite() || modulus > self.rho_max {
            return Err(MotionError::OutOfParameterDisk {
                modulus,
                rho_max: self.rho_max,
            });
        }
        self.inverse_raw(lambda, w)
    }

    // Wrapped families may be evaluated anywhere in the open unit disk: the
    // reparametrized parameter of a rebased motion can exceed rho_max.
    fn eval_raw(&self, lambda: Complex64, z: Complex64) -> Result<Complex64, MotionError> {
        match &self.kind {
            MotionKind::Identity => Ok(z),
            MotionKind::Translation { c } => Ok(z + lambda * c),
            MotionKind::ScaleRotate { alpha } => Ok((alpha * lambda).exp() * z),
            MotionKind::Joukowski {
                c,
                exclusion_radius,
            } => {
                if z.norm() < exclusion_radius * (1.0 - DOMAIN_SLACK) {
                    return Err(MotionError::DomainViolation { z });
                }
                Ok(z + lambda * c / z)
            }
            MotionKind::Rebased { inner, lambda0 } => {
                let l0 = Complex64::new(*lambda0, 0.0);
                let w = inner.inverse_raw(l0, z)?;
                inner.eval_raw(moebius(*lambda0, lambda), w)
            }
            MotionKind::Scaled { inner, alpha } => {
                Ok((lambda * alpha).exp() * inner.eval_raw(lambda, z)?)
            }
        }
    }

    fn inverse_raw(&self, lambda: Complex64, w: Complex64) -> Result<Complex64, MotionError> {
        match &self.kind {
            MotionKind::Identity => Ok(w),
            MotionKind::Translation { c } => Ok(w - lambda * c),
            MotionKind::ScaleRotate { alpha } => Ok((-alpha * lambda).exp() * w),
            MotionKind::Joukowski {
                c,
                exclusion_radius,
            } => {
                // z² - wz + λc = 0; the two roots multiply to λc with
                // |λc| < r², so at most one lies outside the exclusion disk.
                let mu = lambda * c;
                let s = (w * w - 4.0 * mu).sqrt();
                let (z1, z2) = ((w + s) * 0.5, (w - s) * 0.5);
                let z = if z1.norm() >= z2.norm() { z1 } else { z2 };
                if z.norm() < exclusion_radius * (1.0 - DOMAIN_SLACK) {
                    return Err(MotionError::DomainViolation { z: w });
                }
                Ok(z)
            }
            MotionKind::Rebased { inner, lambda0 } => {
                let pre = inner.inverse_raw(moebius(*lambda0, lambda), w)?;
                inner.eval_raw(Complex64::new(*lambda0, 0.0), pre)
            }
            MotionKind::Scaled { inner, alpha } => {
                inner.inverse_raw(lambda, (-lambda * alpha).exp() * w)
            }
        }
    }
}

/// `(λ0 - λ)/(1 - λλ0)`: the disk automorphism swapping `0` and `λ0`.
pub fn moebius(lambda0: f64, lambda: Complex64) -> Complex64 {
    (Complex64::new(lambda0, 0.0) - lambda) / (Complex64::new(1.0, 0.0) - lambda * lambda0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn disk() -> CompactSet {
        CompactSet::unit_disk()
    }

    fn builtins() -> Vec<Motion> {
        let base = vec![
            Motion::identity(disk()),
            Motion::translation(disk(), c(1.0, -0.5)).unwrap(),
            Motion::scale_rotate(disk(), c(1.0, 0.7)).unwrap(),
            Motion::joukowski(disk(), c(0.6, 0.8), 1.0).unwrap(),
        ];
        let mut all = base.clone();
        for m in &base {
            all.push(m.rebase(0.4).unwrap());
            all.push(m.scaled(-1.5).unwrap());
        }
        all
    }

    #[test]
    fn evaluate_examples() {
        let id = Motion::identity(disk());
        assert_eq!(id.evaluate(c(0.5, 0.0), c(2.0, 1.0)).unwrap(), c(2.0, 1.0));
        let sr = Motion::scale_rotate(disk(), c(1.0, 0.0)).unwrap();
        let v = sr.evaluate(c(0.3, 0.0), c(1.0, 0.0)).unwrap();
        assert!((v - c(0.3f64.exp(), 0.0)).norm() < 1e-15);
        let jk = Motion::joukowski(disk(), c(1.0, 0.0), 1.0).unwrap();
        assert_eq!(jk.evaluate(c(0.5, 0.0), c(1.0, 0.0)).unwrap(), c(1.5, 0.0));
    }

    #[test]
    fn evaluate_errors() {
        let sr = Motion::scale_rotate(disk(), c(1.0, 0.0)).unwrap();
        assert!(matches!(
            sr.evaluate(c(0.95, 0.0), c(1.0, 0.0)),
            Err(MotionError::OutOfParameterDisk { .. })
        ));
        let jk = Motion::joukowski(disk(), c(1.0, 0.0), 1.0).unwrap();
        assert!(matches!(
            jk.evaluate(c(0.5, 0.0), c(0.5, 0.0)),
            Err(MotionError::DomainViolation { .. })
        ));
    }

    #[test]
    fn joukowski_construction_is_checked() {
        assert!(Motion::joukowski(disk(), c(1.5, 0.0), 1.0).is_err());
        let seg = CompactSet::segment(c(0.0, 0.0), c(4.0, 0.0)).unwrap();
        assert!(Motion::joukowski(seg, c(1.0, 0.0), 1.0).is_err());
        assert!(Motion::identity(disk()).with_rho_max(1.0).is_err());
    }

    #[test]
    fn identity_at_zero_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for m in builtins() {
            if matches!(m.kind(), MotionKind::Rebased { .. }) {
                continue;
            }
            for _ in 0..200 {
                let z = Complex64::from_polar(
                    rng.random_range(1.0..4.0),
                    rng.random_range(0.0..2.0 * PI),
                );
                assert_eq!(m.evaluate(c(0.0, 0.0), z).unwrap(), z);
            }
        }
    }

    #[test]
    fn rebased_motions_fix_the_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for m in builtins() {
            let rb = m.rebase(0.5).unwrap();
            let r0 = rb.singular_radius();
            for _ in 0..1000 {
                let z = Complex64::from_polar(
                    rng.random_range(1.01 * r0..3.0 * r0),
                    rng.random_range(0.0..2.0 * PI),
                );
                let w = rb.evaluate(c(0.0, 0.0), z).unwrap();
                assert!(
                    (w - z).norm() < 1e-12 * z.norm().max(1.0),
                    "{m:?}: {w} vs {z}"
                );
            }
        }
    }

    #[test]
    fn rebase_at_zero_reverses_the_parameter() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in builtins() {
            let rb = m.rebase(0.0).unwrap();
            let r0 = rb.singular_radius();
            for _ in 0..100 {
                let l = Complex64::from_polar(
                    rng.random_range(0.0..0.8),
                    rng.random_range(0.0..2.0 * PI),
                );
                let z = Complex64::from_polar(
                    rng.random_range(1.01 * r0..3.0 * r0),
                    rng.random_range(0.0..2.0 * PI),
                );
                let a = rb.evaluate(l, z).unwrap();
                let b = m.evaluate(-l, z).unwrap();
                assert!((a - b).norm() < 1e-12 * b.norm().max(1.0));
            }
        }
    }

    #[test]
    fn rebased_translation_example() {
        // f(λ,z) = z + λ: f((0.25-0.1)/(1-0.025), 0 - 0.25) = 0.15/0.975 - 0.25.
        let m = Motion::translation(disk(), c(1.0, 0.0))
            .unwrap()
            .rebase(0.25)
            .unwrap();
        let v = m.evaluate(c(0.1, 0.0), c(0.0, 0.0)).unwrap();
        let expected = 0.15 / 0.975 - 0.25;
        assert!((v - c(expected, 0.0)).norm() < 1e-15);
        assert!((expected + 0.0961538461538461).abs() < 1e-15);
    }

    #[test]
    fn rebase_out_of_disk() {
        let m = Motion::identity(disk());
        assert!(matches!(
            m.rebase(0.95),
            Err(MotionError::OutOfParameterDisk { .. })
        ));
    }

    #[test]
    fn inverse_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for m in builtins() {
            let r0 = m.singular_radius();
            for _ in 0..200 {
                let l = Complex64::from_polar(
                    rng.random_range(0.0..0.9),
                    rng.random_range(0.0..2.0 * PI),
                );
                let z = Complex64::from_polar(
                    rng.random_range(1.01 * r0..4.0 * r0),
                    rng.random_range(0.0..2.0 * PI),
                );
                let w = m.evaluate(l, z).unwrap();
                let back = m.inverse(l, w).unwrap();
                assert!((back - z).norm() < 1e-10 * z.norm(), "{m:?}");
            }
        }
    }

    #[test]
    fn joukowski_injective_off_exclusion_disk() {
        let m = Motion::joukowski(disk(), c(0.0, 1.0), 1.0)
            .unwrap()
            .with_rho_max(0.999)
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let l = Complex64::from_polar(
                rng.random_range(0.0..0.999),
                rng.random_range(0.0..2.0 * PI),
            );
            let z1 =
                Complex64::from_polar(rng.random_range(1.0..3.0), rng.random_range(0.0..2.0 * PI));
            let z2 =
                Complex64::from_polar(rng.random_range(1.0..3.0), rng.random_range(0.0..2.0 * PI));
            let d = (m.evaluate(l, z1).unwrap() - m.evaluate(l, z2).unwrap()).norm();
            assert!(d > 0.0);
            // |f(z1)-f(z2)| = |z1-z2|·|1 - λc/(z1 z2)| >= |z1-z2|(1-|λ|)
            assert!(d >= (z1 - z2).norm() * (1.0 - l.norm()) * (1.0 - 1e-12));
        }
    }

    proptest! {
        #[test]
        fn moebius_preserves_the_unit_disk(l0 in -0.99f64..0.99, r in 0.0f64..0.999, t in 0.0f64..6.3) {
            let l = Complex64::from_polar(r, t);
            prop_assert!(moebius(l0, l).norm() < 1.0);
        }
    }
}
