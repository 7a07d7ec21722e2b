//! Scenario execution and artifact output.
//!
//! Every analysis is computed before anything touches the filesystem, so a
//! failed run leaves no partial output behind.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coefficient::r_independence_check;
use crate::dimension::{dimension_sweep, nonharmonicity_witness, DimensionParams};
use crate::motion::verify_motion_axioms;
use crate::scenario::{Analysis, AutoOr, Resolved, Scenario, ScenarioError};
use crate::variation::{
    auto_bound, capacity_profile, harmonicity_test, harnack_check, rado_criterion_check,
    CapacityProfile, HarmonicityReport, Verdict,
};

pub const PROFILE_CSV: &str = "profile.csv";
pub const LOG_GAMMA_PLOT: &str = "plot_log_gamma.dat";
pub const LAPLACIAN_PLOT: &str = "plot_laplacian.dat";
pub const RADO_CSV: &str = "rado.csv";
pub const REPORT_TXT: &str = "report.txt";
pub const CERTIFICATE_TXT: &str = "certificate.txt";
pub const DIMENSION_CSV: &str = "dimension_sweep.csv";

/// Points in the `dimension-demo` sweep: `λ = k/100`, `k = 0..100`.
pub const DIMENSION_SWEEP_POINTS: usize = 100;

const R_INDEPENDENCE_SAMPLES: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOutcome {
    pub analysis: String,
    /// `None` for analyses that only produce data.
    pub verdict: Option<Verdict>,
    pub summary: Vec<(String, String)>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub scenario: String,
    pub outcomes: Vec<AnalysisOutcome>,
    pub artifacts: Vec<PathBuf>,
    pub elapsed: Duration,
}

impl RunReport {
    pub fn is_consistent(&self) -> bool {
        self.outcomes
            .iter()
            .all(|o| o.verdict.is_none_or(Verdict::is_consistent))
    }

    /// 0 when every verdict is consistent, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.is_consistent() {
            0
        } else {
            2
        }
    }

    pub fn outcome(&self, analysis: &str) -> Option<&AnalysisOutcome> {
        self.outcomes.iter().find(|o| o.analysis == analysis)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "scenario: {}", self.scenario).unwrap();
        for o in &self.outcomes {
            writeln!(out).unwrap();
            writeln!(out, "[{}]", o.analysis).unwrap();
            if let Some(v) = o.verdict {
                writeln!(out, "verdict = {v}").unwrap();
            }
            for (k, v) in &o.summary {
                writeln!(out, "{k} = {v}").unwrap();
            }
            writeln!(out, "elapsed_ms = {:.3}", o.elapsed.as_secs_f64() * 1e3).unwrap();
        }
        writeln!(out).unwrap();
        writeln!(out, "[artifacts]").unwrap();
        for a in &self.artifacts {
            writeln!(out, "{}", a.display()).unwrap();
        }
        writeln!(out).unwrap();
        writeln!(
            out,
            "overall = {}",
            if self.is_consistent() {
                "consistent"
            } else {
                "violated"
            }
        )
        .unwrap();
        writeln!(out, "exit_code = {}", self.exit_code()).unwrap();
        writeln!(out, "elapsed_ms = {:.3}", self.elapsed.as_secs_f64() * 1e3).unwrap();
        out
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Command-line overrides of scenario fields.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub radius: Option<f64>,
    pub quadrature_n: Option<usize>,
    pub quadrature_tol: Option<f64>,
    pub grid_h: Option<f64>,
    pub grid_clip: Option<f64>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, s: &mut Scenario) {
        if let Some(r) = self.radius {
            s.quadrature.radius = AutoOr::Value(r);
        }
        if let Some(n) = self.quadrature_n {
            s.quadrature.nodes = n;
        }
        if let Some(t) = self.quadrature_tol {
            s.quadrature.tol = t;
        }
        if let Some(h) = self.grid_h {
            s.grid.spacing = h;
        }
        if let Some(c) = self.grid_clip {
            s.grid.clip_radius = c;
        }
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        if let Some(o) = &self.output {
            s.output_dir = o.clone();
        }
    }
}

/// Reads, overrides and validates a scenario file.
pub fn load_scenario(path: &Path, overrides: &Overrides) -> Result<Scenario, ScenarioError> {
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut s = Scenario::from_toml(&text)?;
    overrides.apply(&mut s);
    s.resolve()?;
    Ok(s)
}

// Files to write, kept in memory until every analysis has finished.
struct Pending {
    files: Vec<(&'static str, String)>,
}

impl Pending {
    fn write(self, dir: &Path) -> Result<Vec<PathBuf>, ScenarioError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| ScenarioError::Io { path, source }
        };
        fs::create_dir_all(dir).map_err(io(dir))?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, body) in self.files {
            let path = dir.join(name);
            fs::write(&path, body).map_err(io(&path))?;
            written.push(path);
        }
        Ok(written)
    }
}

fn profile_csv(profile: &CapacityProfile, harmonicity: Option<&HarmonicityReport>) -> String {
    let mut out = String::from("lambda_re,lambda_im,abs_a,gamma,log_gamma,laplacian_residual\n");
    for (k, p) in profile.points.iter().enumerate() {
        let lap = harmonicity
            .and_then(|h| h.laplacian[k])
            .map(num)
            .unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            num(p.lambda.re),
            num(p.lambda.im),
            num(p.abs_a),
            num(p.gamma),
            num(p.log_gamma),
            lap
        )
        .unwrap();
    }
    out
}

// `x y value` rows, with a blank line between lattice rows.
fn plot_data(profile: &CapacityProfile, value: impl Fn(usize) -> Option<f64>) -> String {
    let mut out = String::from("# x y value\n");
    let mut row = None;
    for (k, p) in profile.points.iter().enumerate() {
        let Some(v) = value(k) else { continue };
        if row.is_some_and(|r| r != p.j) {
            out.push('\n');
        }
        row = Some(p.j);
        writeln!(out, "{} {} {}", num(p.lambda.re), num(p.lambda.im), num(v)).unwrap();
    }
    out
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

/// Runs the requested analyses in dependency order and writes the artifacts
/// into the scenario's output directory.
pub fn run(scenario: &Scenario) -> Result<RunReport, ScenarioError> {
    let start = Instant::now();
    let ctx = |stage: &str| {
        let scenario = scenario.name.clone();
        let stage = stage.to_string();
        move |e: ScenarioError| ScenarioError::InScenario {
            scenario,
            stage,
            source: Box::new(e),
        }
    };
    let Resolved {
        base,
        motion,
        grid,
        quad,
    } = scenario.resolve().map_err(ctx("validation"))?;
    let wants = |a: Analysis| scenario.analyses.contains(&a);

    let mut outcomes = Vec::new();
    let mut pending = Pending { files: Vec::new() };

    let profile = if scenario.analyses.iter().any(|a| a.needs_profile()) {
        let (profile, elapsed) = timed(|| match &scenario.synthetic {
            Some(syn) => {
                let f = syn.log_gamma;
                Ok(CapacityProfile::synthetic(
                    grid,
                    f.eval(Complex64::new(0.0, 0.0)).exp(),
                    |l| f.eval(l),
                ))
            }
            None => capacity_profile(&base, &motion, &grid, &quad),
        });
        let profile = profile
            .map_err(ScenarioError::from)
            .map_err(ctx("profile"))?;
        if wants(Analysis::Profile) {
            let min = profile
                .points
                .iter()
                .map(|p| p.gamma)
                .fold(f64::INFINITY, f64::min);
            outcomes.push(AnalysisOutcome {
                analysis: Analysis::Profile.name().into(),
                verdict: None,
                summary: vec![
                    (
                        "mode".into(),
                        if scenario.synthetic.is_some() {
                            "synthetic"
                        } else {
                            "computed"
                        }
                        .into(),
                    ),
                    ("points".into(), profile.points.len().to_string()),
                    ("base_gamma".into(), num(profile.base_gamma)),
                    ("min_gamma".into(), num(min)),
                    ("max_gamma".into(), num(profile.max_gamma())),
                ],
                elapsed,
            });
        }
        Some(profile)
    } else {
        None
    };

    let mut harmonicity = None;
    if wants(Analysis::Harmonicity) {
        let profile = profile.as_ref().expect("profile computed");
        let (report, elapsed) = timed(|| harmonicity_test(profile, scenario.harmonicity_tol));
        let report = report
            .map_err(ScenarioError::from)
            .map_err(ctx("harmonicity"))?;
        let mut summary = vec![
            ("tol".into(), num(scenario.harmonicity_tol)),
            ("interior_points".into(), report.interior_points.to_string()),
            (
                "max_laplacian_residual".into(),
                num(report.max_laplacian_residual),
            ),
        ];
        for d in &report.mean_value_deviations {
            summary.push((
                format!("mean_value_deviation[r={}]", num(d.radius)),
                num(d.max_deviation),
            ));
        }
        outcomes.push(AnalysisOutcome {
            analysis: Analysis::Harmonicity.name().into(),
            verdict: Some(report.verdict),
            summary,
            elapsed,
        });
        harmonicity = Some(report);
    }

    if wants(Analysis::Harnack) {
        let profile = profile.as_ref().expect("profile computed");
        let (bound, radius) = match scenario.harnack_m.value() {
            Some(m) => (m, scenario.harnack_radius.unwrap_or(1.0)),
            None => (
                auto_bound(profile),
                scenario.harnack_radius.unwrap_or(grid.clip_radius),
            ),
        };
        let (violations, elapsed) = timed(|| harnack_check(profile, bound, radius));
        let violations = violations
            .map_err(ScenarioError::from)
            .map_err(ctx("harnack"))?;
        let mut summary = vec![
            (
                "m_mode".into(),
                if scenario.harnack_m.value().is_some() {
                    "explicit"
                } else {
                    "auto"
                }
                .into(),
            ),
            ("m".into(), num(bound)),
            ("radius".into(), num(radius)),
            ("violations".into(), violations.len().to_string()),
        ];
        if let Some(v) = violations.first() {
            summary.push((
                "first_violation".into(),
                format!("{} {}", num(v.lambda.re), num(v.lambda.im)),
            ));
        }
        outcomes.push(AnalysisOutcome {
            analysis: Analysis::Harnack.name().into(),
            verdict: Some(if violations.is_empty() {
                Verdict::Consistent
            } else {
                Verdict::Violated
            }),
            summary,
            elapsed,
        });
    }

    if wants(Analysis::Rado) {
        let profile = profile.as_ref().expect("profile computed");
        let (report, elapsed) =
            timed(|| rado_criterion_check(&profile.gamma_field(), &scenario.rado_alphas));
        let report = report.map_err(ScenarioError::from).map_err(ctx("rado"))?;
        let mut csv = String::from("alpha,verdict,violations\n");
        for e in &report.entries {
            writeln!(csv, "{},{},{}", num(e.alpha), e.verdict, e.violations).unwrap();
        }
        pending.files.push((RADO_CSV, csv));
        outcomes.push(AnalysisOutcome {
            analysis: Analysis::Rado.name().into(),
            verdict: Some(if report.log_subharmonic_consistent {
                Verdict::Consistent
            } else {
                Verdict::Violated
            }),
            summary: vec![
                ("alphas".into(), report.entries.len().to_string()),
                (
                    "first_violating_alpha".into(),
                    report
                        .first_violating_alpha()
                        .map(num)
                        .unwrap_or_else(|| "none".into()),
                ),
            ],
            elapsed,
        });
    }

    if wants(Analysis::MotionAxioms) {
        let (report, elapsed) = timed(|| {
            verify_motion_axioms(
                &motion,
                scenario.axiom_samples,
                scenario.seed,
                scenario.axiom_tol,
            )
        });
        let mut summary = vec![
            ("samples".into(), scenario.axiom_samples.to_string()),
            ("identity_at_zero".into(), num(report.identity_at_zero)),
            (
                "injectivity_violations".into(),
                report.injectivity_violation_count.to_string(),
            ),
            (
                "holomorphy_deviation".into(),
                num(report.holomorphy_deviation),
            ),
            (
                "conformality_deviation".into(),
                num(report.conformality_deviation),
            ),
            (
                "evaluation_failures".into(),
                report.evaluation_failures.to_string(),
            ),
        ];
        for (delta, modulus) in &report.joint_continuity_modulus {
            summary.push((
                format!("continuity_modulus[d={}]", num(*delta)),
                num(*modulus),
            ));
        }
        outcomes.push(AnalysisOutcome {
            analysis: Analysis::MotionAxioms.name().into(),
            verdict: Some(if report.passes(scenario.axiom_tol) {
                Verdict::Consistent
            } else {
                Verdict::Violated
            }),
            summary,
            elapsed,
        });
    }

    if wants(Analysis::RIndependence) {
        let (r1, r2) = (quad.radius, 2.0 * quad.radius);
        let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
        let lambdas: Vec<Complex64> = (0..R_INDEPENDENCE_SAMPLES)
            .map(|_| {
                let r = grid.clip_radius * rng.random::<f64>().sqrt();
                Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        let (worst, elapsed) = timed(|| {
            lambdas.iter().try_fold(0.0_f64, |acc, &l| {
                r_independence_check(&motion, l, r1, r2, quad.nodes).map(|d| acc.max(d))
            })
        });
        let worst = worst
            .map_err(ScenarioError::from)
            .map_err(ctx("r-independence"))?;
        outcomes.push(AnalysisOutcome {
            analysis: Analysis::RIndependence.name().into(),
            verdict: Some(if worst <= scenario.r_independence_tol {
                Verdict::Consistent
            } else {
                Verdict::Violated
            }),
            summary: vec![
                ("r1".into(), num(r1)),
                ("r2".into(), num(r2)),
                ("nodes".into(), quad.nodes.to_string()),
                ("samples".into(), lambdas.len().to_string()),
                ("max_difference".into(), num(worst)),
                ("tol".into(), num(scenario.r_independence_tol)),
            ],
            elapsed,
        });
    }

    if let Some(profile) = &profile {
        pending
            .files
            .push((PROFILE_CSV, profile_csv(profile, harmonicity.as_ref())));
        pending.files.push((
            LOG_GAMMA_PLOT,
            plot_data(profile, |k| Some(profile.points[k].log_gamma)),
        ));
        if let Some(h) = &harmonicity {
            pending
                .files
                .push((LAPLACIAN_PLOT, plot_data(profile, |k| h.laplacian[k])));
        }
    }

    finish(
        scenario.name.clone(),
        outcomes,
        pending,
        &scenario.output_dir,
        start,
    )
    .map_err(ctx("output"))
}

fn finish(
    scenario: String,
    outcomes: Vec<AnalysisOutcome>,
    mut pending: Pending,
    dir: &Path,
    start: Instant,
) -> Result<RunReport, ScenarioError> {
    let mut artifacts: Vec<PathBuf> = pending.files.iter().map(|(n, _)| dir.join(n)).collect();
    artifacts.push(dir.join(REPORT_TXT));
    let mut report = RunReport {
        scenario,
        outcomes,
        artifacts,
        elapsed: start.elapsed(),
    };
    pending.files.push((REPORT_TXT, report.render()));
    report.artifacts = pending.write(dir)?;
    Ok(report)
}

/// Certificate and dimension sweep for parameter `t`, written to
/// `certificate.txt` and `dimension_sweep.csv`.
pub fn dimension_demo(
    t: f64,
    samples: usize,
    output_dir: &Path,
) -> Result<RunReport, ScenarioError> {
    let start = Instant::now();
    let params = DimensionParams::new(t)?;
    let (cert, elapsed) = timed(|| nonharmonicity_witness(params, samples));
    let cert = cert?;
    let sweep = dimension_sweep(params, DIMENSION_SWEEP_POINTS)?;
    let outcomes = vec![AnalysisOutcome {
        analysis: "certificate".into(),
        verdict: Some(if cert.all_discharged() {
            Verdict::Consistent
        } else {
            Verdict::Violated
        }),
        summary: vec![
            ("t".into(), num(t)),
            ("delta".into(), num(cert.delta)),
            ("zero_samples".into(), cert.zero_samples.len().to_string()),
            (
                "positive_samples".into(),
                cert.positive_samples.len().to_string(),
            ),
            (
                "rules_discharged".into(),
                format!(
                    "{}/{}",
                    cert.rules.iter().filter(|r| r.discharged).count(),
                    cert.rules.len()
                ),
            ),
        ],
        elapsed,
    }];
    let pending = Pending {
        files: vec![
            (CERTIFICATE_TXT, cert.to_string()),
            (DIMENSION_CSV, sweep.to_csv()),
        ],
    };
    let artifacts = pending.write(output_dir)?;
    Ok(RunReport {
        scenario: format!("dimension-demo t={t}"),
        outcomes,
        artifacts,
        elapsed: start.elapsed(),
    })
}
