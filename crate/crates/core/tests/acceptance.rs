//! Acceptance suite. Runs each criterion in turn and prints one PASS/FAIL
//! line per criterion; exits non-zero if any fails.

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use capmotion::coefficient::{
    capacity_under_motion, leading_coefficient, trapezoid_coefficient, QuadratureConfig,
};
use capmotion::dimension::{astala_dimension, critical_lambda, DimensionParams};
use capmotion::motion::Motion;
use capmotion::runner::{dimension_demo, run, CERTIFICATE_TXT};
use capmotion::scenario::parse_scenario;
use capmotion::sets::{analytic_capacity_closed_form, transfinite_diameter, CompactSet};
use capmotion::variation::{
    auto_bound, capacity_profile, harmonicity_test, harnack_check, rado_criterion_check,
    CapacityProfile, GridField, LambdaGrid, DEFAULT_RADO_ALPHAS,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn unit_disk() -> CompactSet {
    CompactSet::unit_disk()
}

fn segment04() -> CompactSet {
    CompactSet::segment(c(0.0, 0.0), c(4.0, 0.0)).unwrap()
}

/// Uniform samples of the closed disk `|λ| <= radius`.
fn random_lambdas(n: usize, radius: f64, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r = radius * rng.random::<f64>().sqrt();
            Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
        })
        .collect()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn leading_coefficient_exactness() -> Outcome {
    let start = Instant::now();
    let alpha = c(1.0, 0.5);
    let cases = [
        (Motion::identity(unit_disk()), None),
        (
            Motion::translation(unit_disk(), c(0.5, -0.25)).unwrap(),
            None,
        ),
        (
            Motion::scale_rotate(unit_disk(), alpha).unwrap(),
            Some(alpha),
        ),
    ];
    let mut worst = 0.0_f64;
    for (motion, alpha) in &cases {
        let radius = QuadratureConfig::auto(motion).radius;
        for l in random_lambdas(50, 0.9, 11) {
            let a = trapezoid_coefficient(motion, l, radius, 64).unwrap();
            let exact = alpha.map_or(c(1.0, 0.0), |al| (al * l).exp());
            worst = worst.max((a - exact).norm());
        }
    }
    let t = start.elapsed();
    outcome(
        worst <= 1e-12 && t < Duration::from_secs(1),
        format!("max |a - a_exact| = {worst:.3e} over 3x50 samples, N=64, {t:.2?}"),
    )
}

fn cauchy_r_independence() -> Outcome {
    let start = Instant::now();
    let motion = Motion::joukowski(unit_disk(), c(1.0, 0.0), 1.0).unwrap();
    let mut worst = 0.0_f64;
    for k in 1..=9 {
        let l = c(k as f64 / 10.0, 0.0);
        let a1 = leading_coefficient(&motion, l, &QuadratureConfig::with_radius(1.5)).unwrap();
        let a3 = leading_coefficient(&motion, l, &QuadratureConfig::with_radius(3.0)).unwrap();
        worst = worst.max((a1.value - a3.value).norm());
    }
    let t = start.elapsed();
    outcome(
        worst <= 1e-10 && t < Duration::from_secs(1),
        format!("max |a(1.5) - a(3)| = {worst:.3e} at lambda = 0.1..0.9, {t:.2?}"),
    )
}

fn ratio_orientation() -> Outcome {
    let motion = Motion::scale_rotate(unit_disk(), c(1.0, 0.0)).unwrap();
    let quad = QuadratureConfig::auto(&motion);
    let mut worst = 0.0_f64;
    for l in random_lambdas(100, 0.9, 12) {
        let g = capacity_under_motion(&unit_disk(), &motion, l, &quad)
            .unwrap()
            .value();
        // e^{λ}·D is the disk of radius e^{Re λ}.
        let disk = CompactSet::disk(c(0.0, 0.0), l.re.exp()).unwrap();
        let exact = analytic_capacity_closed_form(&disk).unwrap().value();
        worst = worst.max((g - exact).abs());
    }
    outcome(
        worst <= 1e-10,
        format!("max |gamma - e^(Re lambda)| = {worst:.3e} over 100 samples"),
    )
}

fn ellipse_cross_validation() -> Outcome {
    let motion = Motion::joukowski(unit_disk(), c(1.0, 0.0), 1.0).unwrap();
    let quad = QuadratureConfig::auto(&motion);
    let mut lambdas = random_lambdas(200, 0.9, 13);
    // The rim |λ| = 0.9, pulled in by an ulp-scale margin so that rounding in
    // from_polar never leaves the parameter disk.
    lambdas.extend((0..16).map(|k| Complex64::from_polar(0.9 - 1e-15, k as f64 * 0.4)));
    let mut worst = 0.0_f64;
    for l in lambdas {
        let g = capacity_under_motion(&unit_disk(), &motion, l, &quad)
            .unwrap()
            .value();
        // The unit circle goes to the ellipse with semi-axes 1 ± |λ|, tilted
        // by arg(λ)/2.
        let (r, phi) = l.to_polar();
        let ellipse = CompactSet::ellipse(c(0.0, 0.0), 1.0 + r, 1.0 - r, phi / 2.0).unwrap();
        let exact = analytic_capacity_closed_form(&ellipse).unwrap().value();
        worst = worst.max((g - exact).abs()).max((exact - 1.0).abs());
    }
    outcome(
        worst <= 1e-9,
        format!("max |gamma - (a+b)/2| = {worst:.3e} over 216 samples, |lambda| <= 0.9"),
    )
}

struct MotionCase {
    label: &'static str,
    base: CompactSet,
    motion: Motion,
}

fn harmonic_cases() -> Vec<MotionCase> {
    let disk = unit_disk();
    let seg = segment04();
    let scale = Motion::scale_rotate(disk.clone(), c(1.0, 0.5)).unwrap();
    let jouk = Motion::joukowski(disk.clone(), c(1.0, 0.0), 1.0).unwrap();
    let seg_trans = Motion::translation(seg.clone(), c(0.5, 0.25)).unwrap();
    vec![
        MotionCase {
            label: "disk/identity",
            base: disk.clone(),
            motion: Motion::identity(disk.clone()),
        },
        MotionCase {
            label: "disk/translation",
            base: disk.clone(),
            motion: Motion::translation(disk.clone(), c(0.5, 0.25)).unwrap(),
        },
        MotionCase {
            label: "disk/scale_rotate",
            base: disk.clone(),
            motion: scale,
        },
        MotionCase {
            label: "disk/joukowski",
            base: disk.clone(),
            motion: jouk.clone(),
        },
        MotionCase {
            label: "disk/scaled(joukowski)",
            base: disk.clone(),
            motion: jouk.scaled(0.7).unwrap(),
        },
        MotionCase {
            label: "segment/identity",
            base: seg.clone(),
            motion: Motion::identity(seg.clone()),
        },
        MotionCase {
            label: "segment/translation",
            base: seg.clone(),
            motion: seg_trans.clone(),
        },
        MotionCase {
            label: "segment/scale_rotate",
            base: seg.clone(),
            motion: Motion::scale_rotate(seg.clone(), c(-0.8, 1.2)).unwrap(),
        },
        MotionCase {
            label: "segment/scaled(translation)",
            base: seg,
            motion: seg_trans.scaled(-1.5).unwrap(),
        },
    ]
}

fn criterion_grid() -> LambdaGrid {
    LambdaGrid::centered(0.01, 0.5).unwrap()
}

struct Profiled {
    label: &'static str,
    profile: CapacityProfile,
    elapsed: Duration,
}

fn harmonicity_reproduction(profiles: &[Profiled]) -> Outcome {
    let mut pass = true;
    let mut lines = Vec::new();
    for p in profiles {
        let start = Instant::now();
        let report = harmonicity_test(&p.profile, 1e-6).unwrap();
        let t = p.elapsed + start.elapsed();
        let mean = report
            .mean_value_deviations
            .iter()
            .map(|d| d.max_deviation)
            .fold(0.0, f64::max);
        let ok = report.max_laplacian_residual <= 1e-6
            && mean <= 1e-8
            && report.verdict.is_consistent()
            && t < Duration::from_secs(30);
        pass &= ok;
        lines.push(format!(
            "{}: laplacian {:.2e}, mean-value {:.2e}, {:.2?}{}",
            p.label,
            report.max_laplacian_residual,
            mean,
            t,
            if ok { "" } else { " <- FAIL" }
        ));
    }
    outcome(pass, lines.join("; "))
}

fn harnack_reproduction(profiles: &[Profiled]) -> Outcome {
    let mut pass = true;
    let mut total = 0;
    for p in profiles {
        let m = auto_bound(&p.profile);
        let v = harnack_check(&p.profile, m, p.profile.grid.clip_radius).unwrap();
        total += v.len();
        pass &= v.is_empty();
    }
    outcome(
        pass,
        format!(
            "{total} violations over {} profiles (auto-M, Harnack disk = clip disk)",
            profiles.len()
        ),
    )
}

fn rado_consistency(profiles: &[Profiled]) -> Outcome {
    let mut pass = true;
    for p in profiles {
        let r = rado_criterion_check(&p.profile.gamma_field(), &DEFAULT_RADO_ALPHAS).unwrap();
        pass &= r.log_subharmonic_consistent;
    }
    let gauss = GridField::from_fn(criterion_grid(), |l| (-l.norm_sqr()).exp());
    let r = rado_criterion_check(&gauss, &DEFAULT_RADO_ALPHAS).unwrap();
    let first = r.first_violating_alpha();
    pass &= first.is_some();
    outcome(
        pass,
        format!(
            "{} profiles consistent over 33 alphas; exp(-|lambda|^2) first violates at alpha = {}",
            profiles.len(),
            first.map_or("none".into(), |a| a.to_string())
        ),
    )
}

fn critical_threshold() -> Outcome {
    let mut worst_delta = 0.0_f64;
    let mut worst_dim = 0.0_f64;
    for k in 1..=9 {
        let t = k as f64 / 10.0;
        let p = DimensionParams::new(t).unwrap();
        let delta = critical_lambda(p).unwrap();
        // 2t/(t + (2-t)s) = 1 gives s = t/(2-t), and s = (1-δ)/(1+δ).
        let s = t / (2.0 - t);
        let closed = (1.0 - s) / (1.0 + s);
        worst_delta = worst_delta.max((delta - closed).abs());
        worst_dim = worst_dim.max((astala_dimension(p, delta).unwrap() - 1.0).abs());
    }
    outcome(
        worst_delta <= 1e-12 && worst_dim <= 1e-12,
        format!(
            "max |delta - closed form| = {worst_delta:.2e}, max |dim(delta) - 1| = {worst_dim:.2e}"
        ),
    )
}

fn certificate(dir: &Path) -> Outcome {
    let report = match dimension_demo(0.5, 5, dir) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let text = fs::read_to_string(dir.join(CERTIFICATE_TXT)).unwrap();
    let field = |prefix: &str| -> Vec<f64> {
        text.lines()
            .filter_map(|l| l.trim().strip_prefix(prefix))
            .map(|rest| rest.split_whitespace().next().unwrap().parse().unwrap())
            .collect()
    };
    let delta = field("delta = ")[0];
    let lambdas = field("lambda = ");
    let signs: Vec<&str> = text
        .lines()
        .filter_map(|l| l.split("sign = ").nth(1))
        .collect();
    let zeros = lambdas
        .iter()
        .zip(&signs)
        .filter(|(l, s)| **l < delta && **s == "zero")
        .count();
    let positives = lambdas
        .iter()
        .zip(&signs)
        .filter(|(l, s)| **l > delta && **s == "positive")
        .count();
    let discharged = text.matches("status: discharged").count();
    let pass = (delta - 0.5).abs() <= 1e-12
        && zeros >= 3
        && positives >= 3
        && discharged == 4
        && report.exit_code() == 0;
    outcome(
        pass,
        format!("delta = {delta}, {zeros} zero samples, {positives} positive samples, {discharged}/4 rules discharged"),
    )
}

fn oracle_sanity() -> Outcome {
    let mut values = Vec::new();
    for n in [2usize, 4, 8, 16, 32] {
        match transfinite_diameter(&unit_disk(), n, 2000) {
            Ok(d) => values.push(d),
            Err(e) => return outcome(false, format!("n={n}: {e}")),
        }
    }
    let monotone = values.windows(2).all(|w| w[1] <= w[0]);
    let last = values[4];
    outcome(
        monotone && (1.0..=1.2).contains(&last),
        format!(
            "d_n = {}",
            values
                .iter()
                .map(|v| format!("{v:.6}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    )
}

fn determinism(dir: &Path) -> Outcome {
    let doc = |out: &Path| {
        format!(
            r#"
name = "determinism"
seed = 42
output_dir = "{}"
analyses = ["profile", "harmonicity", "harnack", "rado", "motion-axioms", "r-independence"]

[base_set]
kind = "disk"
radius = 1.0

[motion]
kind = "scaled"
alpha = 0.5

[motion.inner]
kind = "joukowski"
c = [0.6, 0.3]
exclusion_radius = 1.0

[grid]
spacing = 0.02
clip_radius = 0.5
"#,
            out.display()
        )
    };
    let (a, b) = (dir.join("a"), dir.join("b"));
    for out in [&a, &b] {
        let s = parse_scenario(&doc(out)).unwrap();
        if let Err(e) = run(&s) {
            return outcome(false, e.to_string());
        }
    }
    let mut compared = 0;
    let mut names: Vec<_> = fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .filter(|n| {
            let n = n.to_string_lossy();
            n.ends_with(".csv") || n.ends_with(".dat")
        })
        .collect();
    names.sort();
    for name in &names {
        if fs::read(a.join(name)).unwrap() != fs::read(b.join(name)).unwrap() {
            return outcome(false, format!("{} differs", name.to_string_lossy()));
        }
        compared += 1;
    }
    outcome(
        compared >= 3,
        format!("{compared} CSV/plot files byte-identical across two runs"),
    )
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().unwrap();
    let grid = criterion_grid();
    let profiles: Vec<Profiled> = harmonic_cases()
        .into_iter()
        .map(|case| {
            let start = Instant::now();
            let quad = QuadratureConfig::auto(&case.motion);
            let profile = capacity_profile(&case.base, &case.motion, &grid, &quad).unwrap();
            Profiled {
                label: case.label,
                profile,
                elapsed: start.elapsed(),
            }
        })
        .collect();

    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        (
            "leading-coefficient exactness",
            Box::new(leading_coefficient_exactness),
        ),
        ("Cauchy R-independence", Box::new(cauchy_r_independence)),
        ("ratio orientation", Box::new(ratio_orientation)),
        (
            "ellipse cross-validation",
            Box::new(ellipse_cross_validation),
        ),
        (
            "harmonicity reproduction",
            Box::new(|| harmonicity_reproduction(&profiles)),
        ),
        (
            "Harnack bounds",
            Box::new(|| harnack_reproduction(&profiles)),
        ),
        ("Rado consistency", Box::new(|| rado_consistency(&profiles))),
        ("critical threshold", Box::new(critical_threshold)),
        (
            "non-harmonicity certificate",
            Box::new(|| certificate(&tmp.path().join("certificate"))),
        ),
        ("oracle sanity", Box::new(oracle_sanity)),
        (
            "determinism",
            Box::new(|| determinism(&tmp.path().join("determinism"))),
        ),
    ];

    println!("acceptance: {} criteria", criteria.len());
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {}",
            k + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
