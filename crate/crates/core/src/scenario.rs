//! TOML scenario documents.
//!
//! A scenario names a base set, a motion built on it, a parameter grid, the
//! quadrature settings and the analyses to run. Complex numbers are written
//! as `[re, im]`; a bare real number is accepted wherever a complex one is.
//!
//! ```toml
//! name = "scale-rotate"
//! analyses = ["profile", "harmonicity", "harnack", "rado"]
//! harnack_m = "auto"
//!
//! [base_set]
//! kind = "disk"
//! radius = 1.0
//!
//! [motion]
//! kind = "scale_rotate"
//! alpha = 1.0
//!
//! [grid]
//! spacing = 0.01
//! clip_radius = 0.5
//! ```

use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coefficient::{CoefficientError, QuadratureConfig};
use crate::dimension::DimensionError;
use crate::motion::{Motion, MotionError, DEFAULT_RHO_MAX};
use crate::sets::{analytic_capacity_closed_form, CompactSet, SetError};
use crate::variation::{AnalysisError, LambdaGrid, DEFAULT_RADO_ALPHAS};

pub const SET_KINDS: [&str; 4] = ["disk", "segment", "ellipse", "point_cloud"];
pub const MOTION_KINDS: [&str; 6] = [
    "identity",
    "translation",
    "scale_rotate",
    "joukowski",
    "rebased",
    "scaled",
];

// Upper limit on lattice points per side, to catch runaway grids early.
const MAX_GRID_SIDE: usize = 4001;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("schema error{}{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default(), field.as_ref().map(|f| format!(" in `{f}`")).unwrap_or_default())]
    Schema {
        line: Option<usize>,
        field: Option<String>,
        message: String,
    },
    #[error("unknown motion kind `{0}` (expected one of {MOTION_KINDS:?})")]
    UnknownMotionKind(String),
    #[error("unknown set kind `{0}` (expected one of {SET_KINDS:?})")]
    UnknownSetKind(String),
    #[error("quadrature radius {radius} must exceed {required}")]
    RadiusTooSmall { radius: f64, required: f64 },
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Motion(#[from] MotionError),
    #[error(transparent)]
    Coefficient(#[from] CoefficientError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("scenario `{scenario}`, {stage}: {source}")]
    InScenario {
        scenario: String,
        stage: String,
        source: Box<ScenarioError>,
    },
}

fn invalid(field: &str, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Schema {
        line: None,
        field: Some(field.to_string()),
        message: message.into(),
    }
}

/// A complex number written as `[re, im]` or as a bare real.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "ComplexRepr", into = "[f64; 2]")]
pub struct ComplexValue(pub Complex64);

#[derive(Deserialize)]
#[serde(untagged)]
enum ComplexRepr {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexRepr> for ComplexValue {
    fn from(r: ComplexRepr) -> Self {
        match r {
            ComplexRepr::Real(x) => ComplexValue(Complex64::new(x, 0.0)),
            ComplexRepr::Pair([re, im]) => ComplexValue(Complex64::new(re, im)),
        }
    }
}

impl From<ComplexValue> for [f64; 2] {
    fn from(c: ComplexValue) -> Self {
        [c.0.re, c.0.im]
    }
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        ComplexValue(z)
    }
}

fn origin() -> ComplexValue {
    ComplexValue(Complex64::new(0.0, 0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    Disk {
        #[serde(default = "origin")]
        center: ComplexValue,
        radius: f64,
    },
    Segment {
        a: ComplexValue,
        b: ComplexValue,
    },
    Ellipse {
        #[serde(default = "origin")]
        center: ComplexValue,
        semi_major: f64,
        semi_minor: f64,
        #[serde(default)]
        rotation: f64,
    },
    PointCloud {
        points: Vec<ComplexValue>,
    },
}

impl SetSpec {
    pub fn build(&self) -> Result<CompactSet, SetError> {
        match self {
            SetSpec::Disk { center, radius } => CompactSet::disk(center.0, *radius),
            SetSpec::Segment { a, b } => CompactSet::segment(a.0, b.0),
            SetSpec::Ellipse {
                center,
                semi_major,
                semi_minor,
                rotation,
            } => CompactSet::ellipse(center.0, *semi_major, *semi_minor, *rotation),
            SetSpec::PointCloud { points } => {
                CompactSet::point_cloud(points.iter().map(|p| p.0).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MotionSpec {
    Identity,
    Translation {
        c: ComplexValue,
    },
    ScaleRotate {
        alpha: ComplexValue,
    },
    Joukowski {
        c: ComplexValue,
        exclusion_radius: f64,
    },
    Rebased {
        lambda0: f64,
        inner: Box<MotionSpec>,
    },
    Scaled {
        alpha: f64,
        inner: Box<MotionSpec>,
    },
}

impl MotionSpec {
    pub fn build(&self, base: &CompactSet, rho_max: f64) -> Result<Motion, MotionError> {
        let m = match self {
            MotionSpec::Identity => Motion::identity(base.clone()),
            MotionSpec::Translation { c } => Motion::translation(base.clone(), c.0)?,
            MotionSpec::ScaleRotate { alpha } => Motion::scale_rotate(base.clone(), alpha.0)?,
            MotionSpec::Joukowski {
                c,
                exclusion_radius,
            } => Motion::joukowski(base.clone(), c.0, *exclusion_radius)?,
            MotionSpec::Rebased { lambda0, inner } => {
                return inner.build(base, rho_max)?.rebase(*lambda0)
            }
            MotionSpec::Scaled { alpha, inner } => {
                return inner.build(base, rho_max)?.scaled(*alpha)
            }
        };
        m.with_rho_max(rho_max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub center: ComplexValue,
    pub spacing: f64,
    /// Defaults to the smallest lattice covering the clip disk.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<usize>,
    pub clip_radius: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            center: origin(),
            spacing: 0.01,
            half_width: None,
            clip_radius: 0.9,
        }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<LambdaGrid, AnalysisError> {
        let half_width = match self.half_width {
            Some(hw) => hw,
            None => {
                if !(self.spacing > 0.0) {
                    return Err(AnalysisError::InvalidGrid(format!(
                        "spacing must be positive, got {}",
                        self.spacing
                    )));
                }
                let reach = self.clip_radius + self.center.0.norm();
                ((reach / self.spacing) - 1e-9).ceil().max(1.0) as usize
            }
        };
        LambdaGrid::new(self.center.0, self.spacing, half_width, self.clip_radius)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Auto {
    Auto,
}

/// Either `"auto"` or an explicit value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AutoOr {
    Auto(Auto),
    Value(f64),
}

impl AutoOr {
    pub const AUTO: AutoOr = AutoOr::Auto(Auto::Auto);

    pub fn value(self) -> Option<f64> {
        match self {
            AutoOr::Auto(_) => None,
            AutoOr::Value(v) => Some(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    /// Contour radius; `"auto"` is twice the motion's singular radius.
    pub radius: AutoOr,
    pub nodes: usize,
    pub tol: f64,
    pub max_doublings: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            radius: AutoOr::AUTO,
            nodes: QuadratureConfig::DEFAULT_NODES,
            tol: QuadratureConfig::DEFAULT_TOL,
            max_doublings: QuadratureConfig::DEFAULT_MAX_DOUBLINGS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Analysis {
    Profile,
    Harmonicity,
    Harnack,
    Rado,
    MotionAxioms,
    RIndependence,
}

impl Analysis {
    pub const ALL: [Analysis; 6] = [
        Analysis::Profile,
        Analysis::Harmonicity,
        Analysis::Harnack,
        Analysis::Rado,
        Analysis::MotionAxioms,
        Analysis::RIndependence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Analysis::Profile => "profile",
            Analysis::Harmonicity => "harmonicity",
            Analysis::Harnack => "harnack",
            Analysis::Rado => "rado",
            Analysis::MotionAxioms => "motion-axioms",
            Analysis::RIndependence => "r-independence",
        }
    }

    pub fn needs_profile(self) -> bool {
        matches!(
            self,
            Analysis::Profile | Analysis::Harmonicity | Analysis::Harnack | Analysis::Rado
        )
    }
}

/// Prescribed `log γ` used in place of the computed profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntheticField {
    /// `|λ|²`
    AbsSquared,
    /// `-|λ|²`
    NegAbsSquared,
    /// `Re λ`
    RealPart,
    /// `0`
    Constant,
}

impl SyntheticField {
    pub fn eval(self, lambda: Complex64) -> f64 {
        match self {
            SyntheticField::AbsSquared => lambda.norm_sqr(),
            SyntheticField::NegAbsSquared => -lambda.norm_sqr(),
            SyntheticField::RealPart => lambda.re,
            SyntheticField::Constant => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub log_gamma: SyntheticField,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_name")]
    pub name: String,
    /// At most `i64::MAX`, the largest TOML integer.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_analyses")]
    pub analyses: Vec<Analysis>,
    #[serde(default = "default_rho_max")]
    pub rho_max: f64,
    #[serde(default = "default_harmonicity_tol")]
    pub harmonicity_tol: f64,
    /// Harnack bound `M`; `"auto"` is the grid supremum times `1 + 1e-9`.
    #[serde(default = "default_harnack_m")]
    pub harnack_m: AutoOr,
    /// Radius of the parameter disk on which `M` bounds `γ`. Defaults to the
    /// clip radius for `"auto"` and to 1 for an explicit `M`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub harnack_radius: Option<f64>,
    #[serde(default = "default_rado_alphas")]
    pub rado_alphas: Vec<f64>,
    #[serde(default = "default_axiom_samples")]
    pub axiom_samples: usize,
    #[serde(default = "default_axiom_tol")]
    pub axiom_tol: f64,
    #[serde(default = "default_r_independence_tol")]
    pub r_independence_tol: f64,
    pub base_set: SetSpec,
    pub motion: MotionSpec,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticSpec>,
}

fn default_name() -> String {
    "scenario".into()
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("output")
}
fn default_analyses() -> Vec<Analysis> {
    vec![Analysis::Profile]
}
fn default_rho_max() -> f64 {
    DEFAULT_RHO_MAX
}
fn default_harmonicity_tol() -> f64 {
    1e-6
}
fn default_harnack_m() -> AutoOr {
    AutoOr::AUTO
}
fn default_rado_alphas() -> Vec<f64> {
    DEFAULT_RADO_ALPHAS.to_vec()
}
fn default_axiom_samples() -> usize {
    400
}
fn default_axiom_tol() -> f64 {
    1e-9
}
fn default_r_independence_tol() -> f64 {
    1e-10
}

/// Runtime objects built from a validated scenario.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub base: CompactSet,
    pub motion: Motion,
    pub grid: LambdaGrid,
    pub quad: QuadratureConfig,
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let scenario = Scenario::from_toml(text)?;
    scenario.resolve()?;
    Ok(scenario)
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

// The key of a `key = value` line containing `offset`.
fn key_on_line(text: &str, offset: usize) -> Option<String> {
    let start = text[..offset.min(text.len())]
        .rfind('\n')
        .map_or(0, |i| i + 1);
    let line = text[start..].lines().next()?;
    let (key, _) = line.split_once('=')?;
    let key = key.trim().trim_matches('"');
    (!key.is_empty() && !key.starts_with('[')).then(|| key.to_string())
}

fn backticked(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(message[start..start + len].to_string())
}

fn check_kind(v: &toml::Value, path: &str, is_motion: bool) -> Result<(), ScenarioError> {
    let Some(kind) = v.get("kind") else {
        return Ok(());
    };
    let Some(kind) = kind.as_str() else {
        return Err(invalid(&format!("{path}.kind"), "kind must be a string"));
    };
    if is_motion {
        if !MOTION_KINDS.contains(&kind) {
            return Err(ScenarioError::UnknownMotionKind(kind.into()));
        }
        if let Some(inner) = v.get("inner") {
            check_kind(inner, &format!("{path}.inner"), true)?;
        }
    } else if !SET_KINDS.contains(&kind) {
        return Err(ScenarioError::UnknownSetKind(kind.into()));
    }
    Ok(())
}

impl Scenario {
    /// Schema-level parse with defaults filled; no semantic validation.
    pub fn from_toml(text: &str) -> Result<Scenario, ScenarioError> {
        let schema_err = |e: toml::de::Error| {
            let message = e.message().trim().to_string();
            ScenarioError::Schema {
                line: e.span().map(|s| line_of(text, s.start)),
                field: e
                    .span()
                    .and_then(|s| key_on_line(text, s.start))
                    .or_else(|| backticked(&message)),
                message,
            }
        };
        let value: toml::Table = toml::from_str(text).map_err(schema_err)?;
        if let Some(v) = value.get("base_set") {
            check_kind(v, "base_set", false)?;
        }
        if let Some(v) = value.get("motion") {
            check_kind(v, "motion", true)?;
        }
        toml::from_str(text).map_err(schema_err)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario fields are TOML-representable")
    }

    /// Builds the set, motion, grid and quadrature, checking every
    /// cross-field constraint.
    pub fn resolve(&self) -> Result<Resolved, ScenarioError> {
        if self.name.trim().is_empty() {
            return Err(invalid("name", "name must be non-empty"));
        }
        if i64::try_from(self.seed).is_err() {
            return Err(invalid("seed", "seed must fit in a signed 64-bit integer"));
        }
        if self.analyses.is_empty() {
            return Err(invalid("analyses", "at least one analysis is required"));
        }
        for (k, a) in self.analyses.iter().enumerate() {
            if self.analyses[..k].contains(a) {
                return Err(invalid(
                    "analyses",
                    format!("`{}` is listed twice", a.name()),
                ));
            }
        }
        let base = self
            .base_set
            .build()
            .map_err(|e| invalid("base_set", e.to_string()))?;
        let motion = self
            .motion
            .build(&base, self.rho_max)
            .map_err(|e| invalid("motion", e.to_string()))?;
        let grid = self
            .grid
            .build()
            .map_err(|e| invalid("grid", e.to_string()))?;
        if grid.side() > MAX_GRID_SIDE {
            return Err(invalid(
                "grid",
                format!("{} points per side exceeds {MAX_GRID_SIDE}", grid.side()),
            ));
        }
        if grid.clip_radius > motion.rho_max() {
            return Err(invalid(
                "grid.clip_radius",
                format!(
                    "clip radius {} exceeds rho_max {}",
                    grid.clip_radius,
                    motion.rho_max()
                ),
            ));
        }
        let radius = match self.quadrature.radius.value() {
            Some(r) => r,
            None => QuadratureConfig::auto(&motion).radius,
        };
        let quad = QuadratureConfig {
            radius,
            nodes: self.quadrature.nodes,
            tol: self.quadrature.tol,
            max_doublings: self.quadrature.max_doublings,
        };
        match quad.validate(&motion) {
            Ok(()) => {}
            Err(CoefficientError::RadiusTooSmall { radius, required }) => {
                return Err(ScenarioError::RadiusTooSmall { radius, required })
            }
            Err(e) => return Err(invalid("quadrature", e.to_string())),
        }
        let profiled = self.analyses.iter().any(|a| a.needs_profile());
        if profiled && self.synthetic.is_none() {
            let positive = analytic_capacity_closed_form(&base)
                .map(|g| g.is_positive())
                .unwrap_or(false);
            if !positive {
                return Err(invalid(
                    "base_set",
                    "profile analyses need a base set of positive capacity",
                ));
            }
        }
        if !(self.harmonicity_tol.is_finite() && self.harmonicity_tol > 0.0) {
            return Err(invalid("harmonicity_tol", "must be positive"));
        }
        if let Some(m) = self.harnack_m.value() {
            if !(m.is_finite() && m > 0.0) {
                return Err(invalid("harnack_m", "must be positive or \"auto\""));
            }
        }
        if let Some(r) = self.harnack_radius {
            if !(r > 0.0 && r <= 1.0) {
                return Err(invalid("harnack_radius", "must lie in (0,1]"));
            }
        }
        if self.rado_alphas.iter().any(|a| !a.is_finite()) {
            return Err(invalid("rado_alphas", "entries must be finite"));
        }
        if self.axiom_samples < 2 {
            return Err(invalid("axiom_samples", "need at least 2 samples"));
        }
        if !(self.axiom_tol > 0.0 && self.r_independence_tol > 0.0) {
            return Err(invalid("axiom_tol", "tolerances must be positive"));
        }
        Ok(Resolved {
            base,
            motion,
            grid,
            quad,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const MINIMAL: &str = r#"
analyses = ["profile"]

[base_set]
kind = "disk"
radius = 1.0

[motion]
kind = "scale_rotate"
alpha = 1.0
"#;

    #[test]
    fn minimal_document_gets_defaults() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.quadrature, QuadratureSpec::default());
        assert_eq!(s.quadrature.nodes, 256);
        assert_eq!(s.quadrature.tol, 1e-12);
        assert_eq!(s.grid.clip_radius, 0.9);
        assert_eq!(s.quadrature.radius, AutoOr::AUTO);
        assert_eq!(s.harnack_m, AutoOr::AUTO);
        assert_eq!(s.rado_alphas.len(), 33);
        assert_eq!(
            s.motion,
            MotionSpec::ScaleRotate {
                alpha: ComplexValue(Complex64::new(1.0, 0.0))
            }
        );
    }

    #[test]
    fn auto_harnack_bound_is_flagged() {
        let s = parse_scenario(&format!("harnack_m = \"auto\"\n{MINIMAL}")).unwrap();
        assert_eq!(s.harnack_m.value(), None);
        let s = parse_scenario(&format!("harnack_m = 3.5\n{MINIMAL}")).unwrap();
        assert_eq!(s.harnack_m.value(), Some(3.5));
    }

    #[test]
    fn small_radius_is_rejected() {
        let doc = format!("{MINIMAL}\n[quadrature]\nradius = 0.5\n");
        assert!(matches!(
            parse_scenario(&doc),
            Err(ScenarioError::RadiusTooSmall { radius, .. }) if radius == 0.5
        ));
    }

    #[test]
    fn unknown_kinds() {
        let doc = MINIMAL.replace("\"scale_rotate\"", "\"spiral\"");
        assert!(matches!(
            parse_scenario(&doc),
            Err(ScenarioError::UnknownMotionKind(k)) if k == "spiral"
        ));
        let doc = MINIMAL.replace("\"disk\"", "\"annulus\"");
        assert!(matches!(
            parse_scenario(&doc),
            Err(ScenarioError::UnknownSetKind(k)) if k == "annulus"
        ));
        let doc = MINIMAL.replace(
            "kind = \"scale_rotate\"\nalpha = 1.0",
            "kind = \"rebased\"\nlambda0 = 0.3\n[motion.inner]\nkind = \"warp\"",
        );
        assert!(matches!(
            parse_scenario(&doc),
            Err(ScenarioError::UnknownMotionKind(k)) if k == "warp"
        ));
    }

    #[test]
    fn schema_errors_carry_line_and_field() {
        let doc = format!("{MINIMAL}\n[grid]\nspacing = \"wide\"\n");
        match parse_scenario(&doc) {
            Err(ScenarioError::Schema { line, field, .. }) => {
                let want = doc.lines().position(|l| l.contains("wide")).unwrap() + 1;
                assert_eq!(line, Some(want));
                assert!(field.is_some());
            }
            other => panic!("{other:?}"),
        }
        let doc = format!("{MINIMAL}\n[grid]\nspcing = 0.1\n");
        match parse_scenario(&doc) {
            Err(ScenarioError::Schema { field, message, .. }) => {
                assert_eq!(field.as_deref(), Some("spcing"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        let doc = MINIMAL.replace("radius = 1.0", "");
        match parse_scenario(&doc) {
            Err(ScenarioError::Schema { message, .. }) => assert!(message.contains("radius")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn semantic_errors() {
        let doc = format!("{MINIMAL}\n[grid]\nclip_radius = 0.95\n");
        assert!(matches!(
            parse_scenario(&doc),
            Err(ScenarioError::Schema { field: Some(f), .. }) if f == "grid.clip_radius"
        ));
        let doc = MINIMAL.replace("[\"profile\"]", "[\"profile\", \"profile\"]");
        assert!(parse_scenario(&doc).is_err());
        let doc = MINIMAL.replace(
            "kind = \"disk\"\nradius = 1.0",
            "kind = \"point_cloud\"\npoints = [[0.0, 0.0], [1.0, 0.0]]",
        );
        assert!(parse_scenario(&doc).is_err());
        let doc = MINIMAL.replace(
            "kind = \"scale_rotate\"\nalpha = 1.0",
            "kind = \"joukowski\"\nc = 2.0\nexclusion_radius = 1.0",
        );
        assert!(parse_scenario(&doc).is_err());
    }

    #[test]
    fn nested_motions_parse() {
        let doc = MINIMAL.replace(
            "kind = \"scale_rotate\"\nalpha = 1.0",
            "kind = \"scaled\"\nalpha = 2.0\n[motion.inner]\nkind = \"rebased\"\nlambda0 = 0.3\n\
             [motion.inner.inner]\nkind = \"translation\"\nc = [0.5, 0.25]",
        );
        let s = parse_scenario(&doc).unwrap();
        let r = s.resolve().unwrap();
        assert!(matches!(
            r.motion.kind(),
            crate::motion::MotionKind::Scaled { .. }
        ));
        assert_eq!(Scenario::from_toml(&s.to_toml()).unwrap(), s);
    }

    fn finite(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
        lo..hi
    }

    fn complex() -> impl Strategy<Value = ComplexValue> {
        (finite(-2.0, 2.0), finite(-2.0, 2.0)).prop_map(|(a, b)| ComplexValue(Complex64::new(a, b)))
    }

    fn set_spec() -> impl Strategy<Value = SetSpec> {
        prop_oneof![
            (complex(), finite(0.1, 3.0))
                .prop_map(|(center, radius)| SetSpec::Disk { center, radius }),
            (complex(), complex()).prop_map(|(a, b)| SetSpec::Segment { a, b }),
            (
                complex(),
                finite(1.0, 2.0),
                finite(0.1, 1.0),
                finite(-3.0, 3.0)
            )
                .prop_map(|(center, semi_major, semi_minor, rotation)| {
                    SetSpec::Ellipse {
                        center,
                        semi_major,
                        semi_minor,
                        rotation,
                    }
                }),
            prop::collection::vec(complex(), 1..5)
                .prop_map(|points| SetSpec::PointCloud { points }),
        ]
    }

    fn motion_spec() -> impl Strategy<Value = MotionSpec> {
        let leaf = prop_oneof![
            Just(MotionSpec::Identity),
            complex().prop_map(|c| MotionSpec::Translation { c }),
            complex().prop_map(|alpha| MotionSpec::ScaleRotate { alpha }),
            (complex(), finite(0.5, 2.0)).prop_map(|(c, exclusion_radius)| MotionSpec::Joukowski {
                c,
                exclusion_radius
            }),
        ];
        leaf.prop_recursive(2, 4, 1, |inner| {
            prop_oneof![
                (finite(-0.8, 0.8), inner.clone()).prop_map(|(lambda0, inner)| {
                    MotionSpec::Rebased {
                        lambda0,
                        inner: Box::new(inner),
                    }
                }),
                (finite(-3.0, 3.0), inner).prop_map(|(alpha, inner)| MotionSpec::Scaled {
                    alpha,
                    inner: Box::new(inner)
                }),
            ]
        })
    }

    fn scenario() -> impl Strategy<Value = Scenario> {
        (
            (
                "[a-z][a-z0-9-]{0,12}",
                0u64..=i64::MAX as u64,
                prop::sample::subsequence(Analysis::ALL.to_vec(), 1..=6),
                finite(0.5, 0.95),
                prop_oneof![Just(AutoOr::AUTO), finite(0.5, 9.0).prop_map(AutoOr::Value)],
                prop::option::of(finite(0.1, 1.0)),
            ),
            set_spec(),
            motion_spec(),
            (
                complex(),
                finite(0.001, 0.1),
                prop::option::of(1usize..50),
                finite(0.1, 0.9),
            ),
            (
                prop_oneof![Just(AutoOr::AUTO), finite(1.0, 9.0).prop_map(AutoOr::Value)],
                prop::sample::select(vec![16usize, 64, 256]),
                finite(1e-14, 1e-6),
                1u32..8,
            ),
            prop::option::of(prop::sample::select(vec![
                SyntheticField::AbsSquared,
                SyntheticField::RealPart,
            ])),
        )
            .prop_map(|(top, base_set, motion, g, q, synth)| Scenario {
                name: top.0,
                seed: top.1,
                output_dir: PathBuf::from("out"),
                analyses: top.2,
                rho_max: top.3,
                harmonicity_tol: 1e-6,
                harnack_m: top.4,
                harnack_radius: top.5,
                rado_alphas: vec![-1.0, 0.0, 1.5],
                axiom_samples: 100,
                axiom_tol: 1e-9,
                r_independence_tol: 1e-10,
                base_set,
                motion,
                grid: GridSpec {
                    center: g.0,
                    spacing: g.1,
                    half_width: g.2,
                    clip_radius: g.3,
                },
                quadrature: QuadratureSpec {
                    radius: q.0,
                    nodes: q.1,
                    tol: q.2,
                    max_doublings: q.3,
                },
                synthetic: synth.map(|log_gamma| SyntheticSpec { log_gamma }),
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn serialize_then_parse_is_identity(s in scenario()) {
            let text = s.to_toml();
            let back = Scenario::from_toml(&text).unwrap();
            prop_assert_eq!(&back, &s);
            // Validation outcome is a function of content only.
            prop_assert_eq!(back.resolve().is_ok(), s.resolve().is_ok());
        }
    }
}
