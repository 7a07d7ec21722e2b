//! Dimension-driven capacity signs for a quasiconformal family of Cantor sets.
//!
//! Along real `λ ∈ [0,1)` the sets of the family have Hausdorff dimension
//! `2t / (t + (2-t)(1-λ)/(1+λ))`. Sets of dimension below one have zero
//! analytic capacity and sets of dimension above one have positive capacity,
//! which is all that is needed to show `λ ↦ log γ(K_λ)` is neither sub- nor
//! superharmonic. Everything here is exact reasoning over [`CapacitySign`];
//! no capacity is ever computed numerically.

use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DimensionError {
    #[error("dimension domain error: {0}")]
    DimensionDomain(String),
}

fn domain(msg: String) -> DimensionError {
    DimensionError::DimensionDomain(msg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionParams {
    t: f64,
}

impl DimensionParams {
    pub fn new(t: f64) -> Result<Self, DimensionError> {
        if !(t > 0.0 && t < 2.0) {
            return Err(domain(format!("t must lie in (0,2), got {t}")));
        }
        Ok(DimensionParams { t })
    }

    pub fn t(self) -> f64 {
        self.t
    }

    fn require_counterexample(self) -> Result<(), DimensionError> {
        if self.t < 1.0 {
            Ok(())
        } else {
            Err(domain(format!(
                "t = {} gives dimension >= 1 already at lambda = 0; need t in (0,1)",
                self.t
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CapacitySign {
    Zero,
    Positive,
    /// Dimension exactly one: either sign is possible.
    Unknown,
}

impl fmt::Display for CapacitySign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CapacitySign::Zero => "zero",
            CapacitySign::Positive => "positive",
            CapacitySign::Unknown => "unknown",
        })
    }
}

pub fn astala_dimension(params: DimensionParams, lambda: f64) -> Result<f64, DimensionError> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(domain(format!("lambda must lie in [0,1), got {lambda}")));
    }
    let t = params.t;
    Ok(2.0 * t / (t + (2.0 - t) * (1.0 - lambda) / (1.0 + lambda)))
}

pub fn capacity_sign_from_dimension(dim: f64) -> Result<CapacitySign, DimensionError> {
    if !(0.0..=2.0).contains(&dim) {
        return Err(domain(format!("dimension must lie in [0,2], got {dim}")));
    }
    Ok(if dim < 1.0 {
        CapacitySign::Zero
    } else if dim > 1.0 {
        CapacitySign::Positive
    } else {
        CapacitySign::Unknown
    })
}

/// The `δ ∈ (0,1)` at which the dimension crosses one, by bisection.
///
/// Solving the formula directly gives `δ = 1 - t`; the bisection does not use
/// that.
pub fn critical_lambda(params: DimensionParams) -> Result<f64, DimensionError> {
    params.require_counterexample()?;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if astala_dimension(params, mid)? < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionProfile {
    pub t: f64,
    pub lambdas: Vec<f64>,
    pub dims: Vec<f64>,
    pub signs: Vec<CapacitySign>,
    /// Present only for `t < 1`, where the crossing lies inside `(0,1)`.
    pub delta: Option<f64>,
}

pub fn dimension_profile(
    params: DimensionParams,
    lambdas: &[f64],
) -> Result<DimensionProfile, DimensionError> {
    let dims = lambdas
        .iter()
        .map(|&l| astala_dimension(params, l))
        .collect::<Result<Vec<_>, _>>()?;
    let signs = dims
        .iter()
        .map(|&d| capacity_sign_from_dimension(d))
        .collect::<Result<Vec<_>, _>>()?;
    let delta = if params.t < 1.0 {
        Some(critical_lambda(params)?)
    } else {
        None
    };
    Ok(DimensionProfile {
        t: params.t,
        lambdas: lambdas.to_vec(),
        dims,
        signs,
        delta,
    })
}

/// `points` equispaced values `k/points` for `k = 0..points`, all in `[0,1)`.
pub fn dimension_sweep(
    params: DimensionParams,
    points: usize,
) -> Result<DimensionProfile, DimensionError> {
    let lambdas: Vec<f64> = (0..points).map(|k| k as f64 / points as f64).collect();
    dimension_profile(params, &lambdas)
}

impl DimensionProfile {
    /// CSV with header `t,lambda,dim,sign`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,lambda,dim,sign\n");
        for ((l, d), s) in self.lambdas.iter().zip(&self.dims).zip(&self.signs) {
            writeln!(out, "{:.16e},{:.16e},{:.16e},{}", self.t, l, d, s).unwrap();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignSample {
    pub lambda: f64,
    pub dim: f64,
    pub sign: CapacitySign,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fact {
    pub id: &'static str,
    pub statement: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rule {
    pub id: &'static str,
    pub statement: &'static str,
    pub consumes: Vec<&'static str>,
    pub conclusion: String,
    pub discharged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonHarmonicityCertificate {
    pub t: f64,
    pub delta: f64,
    pub zero_samples: Vec<SignSample>,
    pub positive_samples: Vec<SignSample>,
    pub facts: Vec<Fact>,
    pub rules: Vec<Rule>,
}

impl NonHarmonicityCertificate {
    pub fn all_discharged(&self) -> bool {
        self.rules.iter().all(|r| r.discharged)
    }
}

fn sample(params: DimensionParams, lambda: f64) -> Result<SignSample, DimensionError> {
    let dim = astala_dimension(params, lambda)?;
    Ok(SignSample {
        lambda,
        dim,
        sign: capacity_sign_from_dimension(dim)?,
    })
}

fn list(samples: &[SignSample]) -> String {
    samples
        .iter()
        .map(|s| format!("{:.17}", s.lambda))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Certificate that `λ ↦ log γ(K_λ)` is neither subharmonic nor
/// superharmonic on the unit disk, and that `λ ↦ γ(K_λ)` is not
/// superharmonic.
///
/// `sample_count` equispaced points of `[0, δ]` minus the right end give the
/// zero side; the same count on `[δ, 1]` minus both ends gives the positive
/// side.
pub fn nonharmonicity_witness(
    params: DimensionParams,
    sample_count: usize,
) -> Result<NonHarmonicityCertificate, DimensionError> {
    params.require_counterexample()?;
    if sample_count < 3 {
        return Err(domain(format!(
            "sample_count must be >= 3, got {sample_count}"
        )));
    }
    let delta = critical_lambda(params)?;
    let step_lo = delta / (sample_count - 1) as f64;
    let step_hi = (1.0 - delta) / (sample_count - 1) as f64;
    let zero_samples = (0..sample_count - 1)
        .map(|k| sample(params, k as f64 * step_lo))
        .collect::<Result<Vec<_>, _>>()?;
    let positive_samples = (1..sample_count - 1)
        .map(|k| sample(params, delta + k as f64 * step_hi))
        .collect::<Result<Vec<_>, _>>()?;

    let zeros_ok = zero_samples.len() >= 2
        && zero_samples
            .iter()
            .all(|s| s.lambda < delta && s.sign == CapacitySign::Zero);
    let positives_ok = !positive_samples.is_empty()
        && positive_samples
            .iter()
            .all(|s| s.lambda > delta && s.sign == CapacitySign::Positive);
    let delta_ok = delta > 0.0 && delta < 1.0;

    let facts = vec![
        Fact {
            id: "F1",
            statement: format!(
                "delta = {delta:.17} lies in (0,1) and the dimension crosses 1 there"
            ),
        },
        Fact {
            id: "F2",
            statement: format!(
                "dim < 1 at lambda in {{{}}}, all below delta",
                list(&zero_samples)
            ),
        },
        Fact {
            id: "F3",
            statement: format!(
                "dim > 1 at lambda in {{{}}}, all above delta",
                list(&positive_samples)
            ),
        },
    ];

    let rules = vec![
        Rule {
            id: "R1",
            statement: "a compact set of dimension below 1 has zero analytic capacity; \
                        one of dimension above 1 has positive analytic capacity",
            consumes: vec!["F1", "F2", "F3"],
            conclusion: format!(
                "gamma = 0 and log gamma = -inf on the segment [0, {delta:.17}); \
                 gamma > 0 and log gamma > -inf at the F3 points"
            ),
            discharged: delta_ok && zeros_ok && positives_ok,
        },
        Rule {
            id: "R2",
            statement: "a superharmonic function never takes the value -inf",
            consumes: vec!["R1", "F2"],
            conclusion: "lambda -> log gamma(K_lambda) is not superharmonic".into(),
            discharged: zeros_ok,
        },
        Rule {
            id: "R3",
            statement: "a subharmonic function equal to -inf on a line segment is \
                        identically -inf",
            consumes: vec!["R1", "F2", "F3"],
            conclusion: "lambda -> log gamma(K_lambda) is not subharmonic".into(),
            discharged: zeros_ok && positives_ok,
        },
        Rule {
            id: "R4",
            statement: "a non-constant superharmonic function cannot attain its minimum \
                        at an interior point",
            consumes: vec!["R1", "F1", "F2", "F3"],
            conclusion: "gamma >= 0 attains its minimum 0 inside the disk but is not \
                         constant, so lambda -> gamma(K_lambda) is not superharmonic"
                .into(),
            discharged: delta_ok && zeros_ok && positives_ok,
        },
    ];

    Ok(NonHarmonicityCertificate {
        t: params.t,
        delta,
        zero_samples,
        positive_samples,
        facts,
        rules,
    })
}

impl fmt::Display for NonHarmonicityCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "non-harmonicity certificate")?;
        writeln!(f, "t = {:.17}", self.t)?;
        writeln!(f, "delta = {:.17}", self.delta)?;
        writeln!(f)?;
        writeln!(f, "samples")?;
        for s in self.zero_samples.iter().chain(&self.positive_samples) {
            writeln!(
                f,
                "  lambda = {:.17}  dim = {:.17}  sign = {}",
                s.lambda, s.dim, s.sign
            )?;
        }
        writeln!(f)?;
        writeln!(f, "facts")?;
        for fact in &self.facts {
            writeln!(f, "  [{}] {}", fact.id, fact.statement)?;
        }
        writeln!(f)?;
        writeln!(f, "rules")?;
        for r in &self.rules {
            writeln!(f, "  [{}] {}", r.id, r.statement)?;
            writeln!(f, "       uses: {}", r.consumes.join(", "))?;
            writeln!(f, "       therefore: {}", r.conclusion)?;
            writeln!(
                f,
                "       status: {}",
                if r.discharged { "discharged" } else { "open" }
            )?;
        }
        writeln!(f)?;
        write!(
            f,
            "verdict: {}",
            if self.all_discharged() {
                "all rules discharged"
            } else {
                "incomplete"
            }
        )?;
        writeln!(f)
    }
}
