//! Sampled checks of the motion axioms.
//!
//! Injectivity, holomorphy and continuity cannot be certified from samples;
//! the checker reports what it observed and leaves the verdict to the caller.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Motion, MotionError};

/// Anything that can be evaluated as `f(λ, z)`.
///
/// Implementations outside this crate are unchecked: the capacity pipeline
/// only accepts [`Motion`], whose families are conformal off their base set
/// by construction.
pub trait MotionFamily {
    fn evaluate(&self, lambda: Complex64, z: Complex64) -> Result<Complex64, MotionError>;
    fn rho_max(&self) -> f64;
    /// Sample points are drawn from `|z| > domain_radius`.
    fn domain_radius(&self) -> f64;
}

impl MotionFamily for Motion {
    fn evaluate(&self, lambda: Complex64, z: Complex64) -> Result<Complex64, MotionError> {
        Motion::evaluate(self, lambda, z)
    }

    fn rho_max(&self) -> f64 {
        Motion::rho_max(self)
    }

    fn domain_radius(&self) -> f64 {
        self.singular_radius()
    }
}

/// A user-supplied family given as a closure. Unchecked.
pub struct UncheckedFamily<F> {
    f: F,
    rho_max: f64,
    domain_radius: f64,
}

impl<F> UncheckedFamily<F>
where
    F: Fn(Complex64, Complex64) -> Complex64,
{
    pub fn new(f: F, rho_max: f64, domain_radius: f64) -> Self {
        UncheckedFamily {
            f,
            rho_max,
            domain_radius,
        }
    }
}

impl<F> MotionFamily for UncheckedFamily<F>
where
    F: Fn(Complex64, Complex64) -> Complex64,
{
    fn evaluate(&self, lambda: Complex64, z: Complex64) -> Result<Complex64, MotionError> {
        if lambda.norm() > self.rho_max {
            return Err(MotionError::OutOfParameterDisk {
                modulus: lambda.norm(),
                rho_max: self.rho_max,
            });
        }
        Ok((self.f)(lambda, z))
    }

    fn rho_max(&self) -> f64 {
        self.rho_max
    }

    fn domain_radius(&self) -> f64 {
        self.domain_radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InjectivityViolation {
    pub lambda: Complex64,
    pub z1: Complex64,
    pub z2: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MotionAxiomReport {
    /// `max |f(0,z) - z|` over the samples.
    pub identity_at_zero: f64,
    /// First few near-collisions; the full count is in `injectivity_violation_count`.
    pub injectivity_violations: Vec<InjectivityViolation>,
    pub injectivity_violation_count: usize,
    /// Max deviation of `f(λ0,z)` from its 16-point mean over `|λ-λ0| = r`.
    pub holomorphy_deviation: f64,
    /// Max estimated `|∂f/∂z̄|` at sampled points (zero for maps holomorphic in `z`).
    pub conformality_deviation: f64,
    /// `(δ, max |f(λ',z') - f(λ,z)|)` over sampled pairs within `δ` of each other.
    pub joint_continuity_modulus: Vec<(f64, f64)>,
    /// Sample points the family refused to evaluate.
    pub evaluation_failures: usize,
}

impl MotionAxiomReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.identity_at_zero <= tol
            && self.injectivity_violation_count == 0
            && self.holomorphy_deviation <= tol
            && self.conformality_deviation <= tol
            && self.evaluation_failures == 0
    }
}

const MEAN_NODES: usize = 16;
const MAX_RECORDED_VIOLATIONS: usize = 256;
const CONTINUITY_DELTAS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

/// Samples `sample_count` points in an annulus off the family's singular
/// region and checks the identity at `λ = 0`, injectivity (all pairs at a
/// handful of parameters, including `λ = -rho_max`), holomorphy in `λ` by
/// the Cauchy mean value, holomorphy in `z` through the `∂/∂z̄` Fourier mode,
/// and tabulates a joint continuity modulus.
///
/// Injectivity pairs are drawn from a lattice so that families that collapse
/// whole lines produce exact collisions.
pub fn verify_motion_axioms<M: MotionFamily + ?Sized>(
    motion: &M,
    sample_count: usize,
    seed: u64,
    tol: f64,
) -> MotionAxiomReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = sample_count.max(2);
    let rho = motion.rho_max();
    let inner = 1.05 * motion.domain_radius();
    let outer = inner + 2.0 * motion.domain_radius().max(1.0);
    let mut failures = 0usize;

    let eval = |l: Complex64, z: Complex64, failures: &mut usize| match motion.evaluate(l, z) {
        Ok(v) => Some(v),
        Err(_) => {
            *failures += 1;
            None
        }
    };

    let random_z = |rng: &mut ChaCha8Rng| {
        let r = (rng.random_range(inner * inner..outer * outer)).sqrt();
        Complex64::from_polar(r, rng.random_range(0.0..2.0 * PI))
    };
    let random_lambda = |rng: &mut ChaCha8Rng, cap: f64| {
        Complex64::from_polar(
            cap * rng.random::<f64>().sqrt(),
            rng.random_range(0.0..2.0 * PI),
        )
    };

    // (a) f(0, z) = z
    let mut identity_at_zero = 0.0f64;
    for _ in 0..n {
        let z = random_z(&mut rng);
        if let Some(v) = eval(Complex64::new(0.0, 0.0), z, &mut failures) {
            identity_at_zero = identity_at_zero.max((v - z).norm());
        }
    }

    // (b) injectivity over all lattice pairs at a few parameters
    let spacing = (outer - inner) / 64.0;
    let mut lattice = Vec::with_capacity(n);
    while lattice.len() < n {
        let z = random_z(&mut rng);
        let snapped = Complex64::new(
            (z.re / spacing).round() * spacing,
            (z.im / spacing).round() * spacing,
        );
        if snapped.norm() > inner && snapped.norm() < outer && !lattice.contains(&snapped) {
            lattice.push(snapped);
        }
    }
    let mut lambdas = vec![
        Complex64::new(-rho, 0.0),
        Complex64::new(rho, 0.0),
        Complex64::new(0.0, rho),
        Complex64::new(0.0, -rho),
    ];
    lambdas.extend((0..4).map(|_| random_lambda(&mut rng, rho)));
    let mut violations = Vec::new();
    let mut violation_count = 0usize;
    for &l in &lambdas {
        let images: Vec<Option<Complex64>> =
            lattice.iter().map(|&z| eval(l, z, &mut failures)).collect();
        for i in 0..lattice.len() {
            for j in i + 1..lattice.len() {
                let (Some(a), Some(b)) = (images[i], images[j]) else {
                    continue;
                };
                if (a - b).norm() <= tol * (lattice[i] - lattice[j]).norm().max(1.0) {
                    violation_count += 1;
                    if violations.len() < MAX_RECORDED_VIOLATIONS {
                        violations.push(InjectivityViolation {
                            lambda: l,
                            z1: lattice[i],
                            z2: lattice[j],
                        });
                    }
                }
            }
        }
    }

    // (c) Cauchy mean value in λ
    let radius_lambda = (0.25 * rho).min(0.05);
    let mut holomorphy_deviation = 0.0f64;
    for _ in 0..n {
        let l0 = random_lambda(&mut rng, rho - radius_lambda);
        let z = random_z(&mut rng);
        let Some(center) = eval(l0, z, &mut failures) else {
            continue;
        };
        let mut sum = Complex64::new(0.0, 0.0);
        let mut ok = true;
        for k in 0..MEAN_NODES {
            let l =
                l0 + Complex64::from_polar(radius_lambda, 2.0 * PI * k as f64 / MEAN_NODES as f64);
            match eval(l, z, &mut failures) {
                Some(v) => sum += v,
                None => ok = false,
            }
        }
        if ok {
            holomorphy_deviation =
                holomorphy_deviation.max((center - sum / MEAN_NODES as f64).norm());
        }
    }

    // (c') the e^{-iθ} mode of f around a small z-circle is r·∂f/∂z̄
    let radius_z = 0.01 * motion.domain_radius().max(1.0);
    let mut conformality_deviation = 0.0f64;
    for _ in 0..n {
        let l = random_lambda(&mut rng, rho);
        let mut z0 = random_z(&mut rng);
        if z0.norm() - radius_z <= inner {
            z0 *= (inner + 2.0 * radius_z) / z0.norm();
        }
        let Some(center) = eval(l, z0, &mut failures) else {
            continue;
        };
        let mut sum = Complex64::new(0.0, 0.0);
        let mut ok = true;
        for k in 0..MEAN_NODES {
            let e = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / MEAN_NODES as f64);
            match eval(l, z0 + e * radius_z, &mut failures) {
                Some(v) => sum += (v - center) * e,
                None => ok = false,
            }
        }
        if ok {
            conformality_deviation =
                conformality_deviation.max((sum / (MEAN_NODES as f64 * radius_z)).norm());
        }
    }

    // (d) joint continuity modulus
    let mut joint_continuity_modulus = Vec::with_capacity(CONTINUITY_DELTAS.len());
    for &delta in &CONTINUITY_DELTAS {
        let mut modulus = 0.0f64;
        for _ in 0..n {
            let l = random_lambda(&mut rng, rho - delta);
            let z = random_z(&mut rng);
            let dl = random_lambda(&mut rng, delta);
            let mut dz = random_lambda(&mut rng, delta);
            if (z + dz).norm() <= inner {
                dz = -dz;
            }
            if let (Some(a), Some(b)) = (
                eval(l, z, &mut failures),
                eval(l + dl, z + dz, &mut failures),
            ) {
                modulus = modulus.max((a - b).norm());
            }
        }
        joint_continuity_modulus.push((delta, modulus));
    }

    MotionAxiomReport {
        identity_at_zero,
        injectivity_violations: violations,
        injectivity_violation_count: violation_count,
        holomorphy_deviation,
        conformality_deviation,
        joint_continuity_modulus,
        evaluation_failures: failures,
    }
}
