//! End-to-end acceptance battery. Twelve criteria cover kernel agreement,
//! reference values, the derivative bound sweep, the Monte Carlo
//! experiments, the identity checks, and byte-level determinism of the
//! reporting pipeline. Each criterion prints one verdict line; the test
//! fails if any criterion does.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use heatlab_core::fields::suite_basis_count;
use heatlab_core::heat::{heat_kernel, images_kernel_1d, images_mass_1d};
use heatlab_core::stoch::{coupled_triple, estimate_survival, reflection_max_estimate};
use heatlab_core::verify::thm1::{
    default_sweep_directions, default_sweep_fields, default_sweep_points, default_sweep_times,
};
use heatlab_core::verify::{
    bochner_check, growth_exponent_fit, semigroup_eigen_check, sperb_boundary_check,
    tail_bound_check, thm1_sweep, thm2_ratio, CellStatus,
};
use heatlab_core::{
    Direction, Domain, PathConfig, Point, SeedPolicy, SpectralBasis, Thm1Context, Truncation,
};

struct Verdict {
    id: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

impl Verdict {
    fn line(&self) -> String {
        format!(
            "[{}] criterion {} ({:.2}s): {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

fn ensure(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

fn check<F>(id: &'static str, budget: Option<Duration>, f: F) -> Verdict
where
    F: FnOnce() -> Result<String, String>,
{
    let t0 = Instant::now();
    let res = catch_unwind(AssertUnwindSafe(f));
    let elapsed = t0.elapsed();
    let (mut pass, mut detail) = match res {
        Ok(Ok(d)) => (true, d),
        Ok(Err(m)) => (false, m),
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "opaque panic".to_string());
            (false, format!("panicked: {msg}"))
        }
    };
    if pass {
        if let Some(b) = budget {
            if elapsed > b {
                pass = false;
                detail = format!("{detail}; exceeded time budget {:.0}s", b.as_secs_f64());
            }
        }
    }
    Verdict { id, pass, detail, elapsed }
}

/// Spectral and images kernels agree to 1e-9 on a 21x21 interval grid at
/// three times, in under a second.
fn c01_kernel_cross_check() -> Result<String, String> {
    let d = Domain::interval(PI);
    let basis = SpectralBasis::new(d, suite_basis_count(&d)).unwrap();
    let mut worst = 0.0f64;
    for &t in &[0.05, 0.1, 0.5] {
        for i in 0..21 {
            let x = PI * i as f64 / 20.0;
            for j in 0..21 {
                let y = PI * j as f64 / 20.0;
                let s =
                    heat_kernel(&basis, t, &Point::x1(x), &Point::x1(y), Truncation::default());
                let m = images_kernel_1d(PI, t, x, y);
                worst = worst.max((s.raw - m).abs());
            }
        }
    }
    ensure(worst <= 1e-9, format!("worst kernel gap {worst:.3e} exceeds 1e-9"))?;
    Ok(format!("21x21 grid at three times, worst gap {worst:.3e}"))
}

/// The midpoint survival value at t = 0.1 matches the published reference
/// to 5e-5, and a bridge-corrected Monte Carlo run lands within 4 standard
/// errors of the exact value.
fn c02_survival_reference() -> Result<String, String> {
    let exact = images_mass_1d(PI, 0.1, PI / 2.0, 0.0, PI);
    let gap_ref = (exact - 0.99913).abs();
    ensure(
        gap_ref <= 5e-5,
        format!("images survival {exact:.7} is {gap_ref:.2e} from 0.99913"),
    )?;
    let d = Domain::interval(PI);
    let cfg = PathConfig::new(0.1).with_dt(1e-4);
    let est = estimate_survival(&d, &Point::x1(PI / 2.0), &cfg, &SeedPolicy::new(42), 100_000);
    let gap_mc = (est.mean - exact).abs();
    ensure(
        gap_mc <= 4.0 * est.stderr,
        format!(
            "MC survival {:.6} is {gap_mc:.2e} from exact, over 4 stderr = {:.2e}",
            est.mean,
            4.0 * est.stderr
        ),
    )?;
    Ok(format!(
        "exact {exact:.6} within {gap_ref:.1e} of reference; MC off by {gap_mc:.1e} vs 4 stderr {:.1e}",
        4.0 * est.stderr
    ))
}

/// Heat flow multiplies each projected eigenfunction by its scalar decay
/// factor, to 1e-8 in sup norm, on all three domains.
fn c03_semigroup_decay() -> Result<String, String> {
    let mut worst = 0.0f64;
    for d in [Domain::interval(PI), Domain::rectangle(PI, PI), Domain::disk(1.0)] {
        let c = semigroup_eigen_check(&d).unwrap();
        ensure(c.pass, format!("{} failed: {}", c.name, c.summary_line()))?;
        worst = worst.max(c.max_residual);
    }
    Ok(format!("three domains, worst sup residual {worst:.3e}"))
}

/// The full derivative bound sweep has zero violations over three domains,
/// orders 1..3, two data per domain, at least nine start points, three
/// horizons and two directions, and the eigenfunction cells where the
/// derivative stays in the eigenspace reproduce the kernel prediction to
/// 1e-8.
fn c04_derivative_bound_sweep() -> Result<String, String> {
    let mut total = 0usize;
    let mut checked = 0usize;
    let mut exact_cases = 0usize;
    let mut exact_worst = 0.0f64;
    let mut worst_margin = f64::INFINITY;
    for d in [Domain::interval(PI), Domain::rectangle(PI, PI), Domain::disk(1.0)] {
        let fields = default_sweep_fields(&d);
        let points = default_sweep_points(&d);
        let dirs = default_sweep_directions(&d);
        let times = default_sweep_times();
        ensure(fields.len() >= 2, format!("{} fields on {}", fields.len(), d.kind_name()))?;
        ensure(points.len() >= 9, format!("{} points on {}", points.len(), d.kind_name()))?;
        ensure(dirs.len() >= 2 || d.dim() == 1, "direction grid too small".into())?;
        ensure(times.len() >= 3, "time grid too small".into())?;
        let ctx = Thm1Context::new(d).unwrap();
        let cells = thm1_sweep(&ctx, &fields, &[1, 2, 3], &points, &dirs, &times);
        for c in &cells {
            total += 1;
            if c.status == CellStatus::Checked {
                checked += 1;
                worst_margin = worst_margin.min(c.margin);
                ensure(
                    c.pass,
                    format!(
                        "violated cell: {} {} order {} t {} margin {:.3e} tolerance {:.3e}",
                        c.domain, c.field, c.order, c.t, c.margin, c.tolerance
                    ),
                )?;
                if c.exactness_expected {
                    exact_cases += 1;
                    exact_worst = exact_worst.max(c.lhs_x);
                }
            }
        }
    }
    ensure(checked > 0, "no checked cells".into())?;
    ensure(exact_cases > 0, "no eigenfunction-exact cells".into())?;
    ensure(
        exact_worst <= 1e-8,
        format!("eigenfunction cells should be exact, worst defect {exact_worst:.3e}"),
    )?;
    Ok(format!(
        "{total} cells ({checked} checked), worst margin {worst_margin:.3e}, {exact_cases} exact cells within {exact_worst:.1e}"
    ))
}

/// The coupled three-point quotient reproduces the second derivative of
/// the flowed datum at the midpoint, within Monte Carlo error plus the
/// finite-difference bias allowance, and killing is left-right symmetric.
fn c05_coupled_quotient() -> Result<String, String> {
    let d = Domain::interval(PI);
    let cfg = PathConfig::new(0.05).with_dt(2e-4);
    let out = coupled_triple(
        &d,
        &Point::x1(PI / 2.0),
        &Direction::x1(1.0),
        0.01,
        &cfg,
        &SeedPolicy::new(42),
        100_000,
        |p: &Point| p.get(0).sin(),
    );
    let reference = -(-0.05f64).exp();
    let gap = (out.quotient.mean - reference).abs();
    let tol = 4.0 * out.quotient.stderr + 1e-3;
    ensure(
        gap <= tol,
        format!("quotient {:.6} is {gap:.2e} from {reference:.6}, over {tol:.2e}", out.quotient.mean),
    )?;
    for (a, b, what) in [
        (out.first_hit_counts[0], out.first_hit_counts[2], "first hits"),
        (out.class_counts[0b011], out.class_counts[0b110], "single deaths"),
        (out.class_counts[0b001], out.class_counts[0b100], "double deaths"),
    ] {
        let diff = (a as f64 - b as f64).abs();
        let sigma = ((a + b) as f64).max(1.0).sqrt();
        ensure(
            diff <= 4.0 * sigma,
            format!("{what} asymmetric: {a} vs {b}, diff {diff} over 4 sigma {:.1}", 4.0 * sigma),
        )?;
    }
    Ok(format!(
        "quotient {:.6} vs {reference:.6} (gap {gap:.1e}, tol {tol:.1e}); hits {}/{}/{}",
        out.quotient.mean, out.first_hit_counts[0], out.first_hit_counts[1], out.first_hit_counts[2]
    ))
}

/// The running-maximum probability matches the reflection principle value
/// and the doubled endpoint estimator from the same paths.
fn c06_reflection_principle() -> Result<String, String> {
    let cfg = PathConfig::new(1.0).with_dt(1e-3);
    let out = reflection_max_estimate(1.0, &cfg, &SeedPolicy::new(42), 100_000);
    let gap_a = (out.crossed.mean - out.analytic).abs();
    ensure(
        gap_a <= 4.0 * out.crossed.stderr,
        format!(
            "crossing rate {:.5} is {gap_a:.2e} from analytic {:.5}, over {:.2e}",
            out.crossed.mean,
            out.analytic,
            4.0 * out.crossed.stderr
        ),
    )?;
    let gap_b = (out.crossed.mean - out.endpoint_doubled.mean).abs();
    let sigma = (out.crossed.stderr.powi(2) + out.endpoint_doubled.stderr.powi(2)).sqrt();
    ensure(
        gap_b <= 4.0 * sigma,
        format!("max vs endpoint estimators differ by {gap_b:.2e}, over {:.2e}", 4.0 * sigma),
    )?;
    Ok(format!(
        "crossed {:.5}, doubled endpoint {:.5}, analytic {:.5}",
        out.crossed.mean, out.endpoint_doubled.mean, out.analytic
    ))
}

/// The polynomial lower bound for the Gaussian tail holds on [0.5, 6] and
/// the derived threshold constant clears twice epsilon.
fn c07_gaussian_tail() -> Result<String, String> {
    let c = tail_bound_check();
    ensure(c.pass, c.summary_line())?;
    Ok(format!("{} cases, worst residual {:.3e}", c.cases, c.max_residual))
}

/// Scaled Hessian-to-gradient ratios: identically 1 on the interval,
/// eigenvalue-flat (log-log slope within 0.1) on rectangle and disk over
/// at least 25 pairs each.
fn c08_hessian_ratio_family() -> Result<String, String> {
    let interval = thm2_ratio(&Domain::interval(PI), 100).unwrap();
    let worst = interval
        .rows
        .iter()
        .map(|r| (r.ratio - 1.0).abs())
        .fold(0.0f64, f64::max);
    ensure(
        worst <= 1e-8,
        format!("interval ratios deviate from 1 by {worst:.3e}"),
    )?;
    let mut slopes = Vec::new();
    for (d, count) in [(Domain::rectangle(PI, PI), 30), (Domain::disk(1.0), 25)] {
        let rep = thm2_ratio(&d, count).unwrap();
        ensure(
            rep.rows.len() >= 25,
            format!("{} has only {} pairs", rep.domain, rep.rows.len()),
        )?;
        ensure(
            rep.slope.abs() <= 0.1,
            format!("{} slope {:.4} exceeds 0.1", rep.domain, rep.slope),
        )?;
        slopes.push(format!("{} {:.2e}", rep.domain, rep.slope));
    }
    Ok(format!(
        "interval flat to {worst:.1e}; slopes {}",
        slopes.join(", ")
    ))
}

/// The boundary identity relating the normal-normal second derivative to
/// curvature times the normal derivative holds to 1e-6 relative scale at
/// 64 boundary samples for ten pairs on disk and rectangle.
fn c09_boundary_identity() -> Result<String, String> {
    let mut details = Vec::new();
    for d in [Domain::disk(1.0), Domain::rectangle(PI, PI)] {
        let c = sperb_boundary_check(&d, 10, 64).unwrap();
        ensure(c.pass, c.summary_line())?;
        details.push(format!("{} {:.2e}", c.name, c.max_residual));
    }
    Ok(details.join(", "))
}

/// The pointwise curvature identity for eigenfunctions holds at 50 sampled
/// interior points for five pairs per domain, within the finite-difference
/// step budget.
fn c10_bochner_identity() -> Result<String, String> {
    let mut worst = 0.0f64;
    for (i, d) in [Domain::interval(PI), Domain::rectangle(PI, PI), Domain::disk(1.0)]
        .into_iter()
        .enumerate()
    {
        let c = bochner_check(&d, 5, 50, 1000 + i as u64).unwrap();
        ensure(c.pass, c.summary_line())?;
        worst = worst.max(c.max_residual);
    }
    Ok(format!("three domains, worst budget fraction {worst:.3e}"))
}

/// Sup, gradient and Hessian of the radial disk family grow like
/// eigenvalue powers 1/4, 3/4 and 5/4.
fn c11_growth_exponents() -> Result<String, String> {
    let fit = growth_exponent_fit(1.0, 50).unwrap();
    ensure(
        (fit.sup_slope - 0.25).abs() <= 0.03,
        format!("sup slope {:.4} outside 0.25 +- 0.03", fit.sup_slope),
    )?;
    ensure(
        (fit.grad_slope - 0.75).abs() <= 0.05,
        format!("gradient slope {:.4} outside 0.75 +- 0.05", fit.grad_slope),
    )?;
    ensure(
        (fit.hess_slope - 1.25).abs() <= 0.05,
        format!("hessian slope {:.4} outside 1.25 +- 0.05", fit.hess_slope),
    )?;
    Ok(format!(
        "slopes {:.3} / {:.3} / {:.3}",
        fit.sup_slope, fit.grad_slope, fit.hess_slope
    ))
}

/// Two full report runs with the same master seed but different thread
/// caps produce byte-identical artifacts, each within the wall budget.
fn c12_deterministic_report() -> Result<String, String> {
    let exe = env!("CARGO_BIN_EXE_heatlab");
    let tmp = tempfile::tempdir().map_err(|e| format!("tempdir: {e}"))?;
    let mut times = Vec::new();
    for (threads, sub) in [("2", "a"), ("8", "b")] {
        let dir = tmp.path().join(sub);
        let t0 = Instant::now();
        let out = Command::new(exe)
            .args(["report", "--out-dir", dir.to_str().unwrap()])
            .env("HEATLAB_THREADS", threads)
            .output()
            .map_err(|e| format!("spawn: {e}"))?;
        let elapsed = t0.elapsed();
        ensure(
            out.status.code() == Some(0),
            format!(
                "report with {threads} threads exited {:?}: {}",
                out.status.code(),
                String::from_utf8_lossy(&out.stderr)
            ),
        )?;
        ensure(
            elapsed < Duration::from_secs(180),
            format!("report with {threads} threads took {:.0}s", elapsed.as_secs_f64()),
        )?;
        times.push(format!("{threads} threads {:.1}s", elapsed.as_secs_f64()));
    }
    // The config echoes differ by design: each records its own out_dir.
    for name in ["suite.json", "checks.csv", "thm1_cells.csv", "thm2.csv"] {
        let a = std::fs::read(tmp.path().join("a").join(name)).map_err(|e| format!("{name}: {e}"))?;
        let b = std::fs::read(tmp.path().join("b").join(name)).map_err(|e| format!("{name}: {e}"))?;
        ensure(a == b, format!("{name} differs between thread counts"))?;
    }
    Ok(format!("all artifacts byte-identical; {}", times.join(", ")))
}

#[test]
fn acceptance() {
    let secs = Duration::from_secs;
    let verdicts = vec![
        check("01 kernel cross-check", Some(secs(1)), c01_kernel_cross_check),
        check("02 survival reference", Some(secs(30)), c02_survival_reference),
        check("03 semigroup decay", None, c03_semigroup_decay),
        check("04 derivative bound sweep", Some(secs(60)), c04_derivative_bound_sweep),
        check("05 coupled quotient", None, c05_coupled_quotient),
        check("06 reflection principle", None, c06_reflection_principle),
        check("07 gaussian tail bound", None, c07_gaussian_tail),
        check("08 hessian ratio family", None, c08_hessian_ratio_family),
        check("09 boundary identity", None, c09_boundary_identity),
        check("10 curvature identity", None, c10_bochner_identity),
        check("11 growth exponents", None, c11_growth_exponents),
        check("12 deterministic report", None, c12_deterministic_report),
    ];
    for v in &verdicts {
        println!("{}", v.line());
    }
    let failed: Vec<&str> = verdicts.iter().filter(|v| !v.pass).map(|v| v.id).collect();
    assert!(
        failed.is_empty(),
        "failing criteria: {failed:?}\n{}",
        verdicts
            .iter()
            .filter(|v| !v.pass)
            .map(|v| v.line())
            .collect::<Vec<_>>()
            .join("\n")
    );
    println!("acceptance: {}/12 criteria passed", verdicts.len());
}
