//! The full battery on the three model domains, wired to one master seed
//! and emitted as JSON and CSV. Reports carry no timestamps or host
//! information: two runs with the same configuration must be
//! byte-identical no matter how many worker threads execute them.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::domain::{Direction, Domain, Point};
use crate::report::{fmt_f64, CheckOutcome};
use crate::spectral::SpectralBasis;
use crate::stoch::{coupled_triple, reflection_max_estimate, PathConfig, SeedPolicy};
use crate::verify::growth::growth_exponent_fit;
use crate::verify::identities::{
    bochner_check, comparison_bound_check, distance_bound_check, monotonicity_checks,
    partition_check, semigroup_eigen_check, sperb_boundary_check, superlevel_mass,
    tail_bound_check,
};
use crate::verify::lines::line_fraction_scan;
use crate::verify::thm1::{
    default_sweep_directions, default_sweep_fields, default_sweep_points, default_sweep_times,
    thm1_sweep, CellStatus, Thm1Context, Thm1Report,
};
use crate::verify::thm2::{thm2_ratio, Thm2Report};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SuiteConfig {
    pub master_seed: u64,
    pub mc_survival_paths: usize,
    pub mc_triple_paths: usize,
    pub mc_reflection_paths: usize,
    pub growth_n_max: u32,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            master_seed: 42,
            mc_survival_paths: 100_000,
            mc_triple_paths: 100_000,
            mc_reflection_paths: 100_000,
            growth_n_max: 50,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub checks: Vec<CheckOutcome>,
    pub thm1_cells: Vec<Thm1Report>,
    pub thm2: Vec<Thm2Report>,
}

/// Distinct experiments get seeds derived from the master by fixed salts,
/// so adding an experiment never reshuffles the streams of another.
fn salted(master: u64, salt: u64) -> u64 {
    master.wrapping_add(salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Collapses a cell list into two named outcomes: the worst inequality
/// defect and the worst defect on cells where exactness is expected.
pub fn summarize_thm1(kind: &str, cells: &[Thm1Report]) -> Vec<CheckOutcome> {
    let mut worst = f64::NEG_INFINITY;
    let mut skipped = 0usize;
    let mut exact_worst = f64::NEG_INFINITY;
    let mut exact_cases = 0usize;
    for c in cells {
        match c.status {
            CellStatus::Checked => {
                worst = worst.max(-(c.margin + c.tolerance));
                if c.exactness_expected {
                    exact_worst = exact_worst.max(c.lhs_x);
                    exact_cases += 1;
                }
            }
            CellStatus::Skipped { .. } => skipped += 1,
        }
    }
    let mut sweep = CheckOutcome::from_residual(
        &format!("thm1_sweep_{kind}"),
        if worst == f64::NEG_INFINITY { 0.0 } else { worst },
        0.0,
        cells.len(),
    )
    .with_detail("worst over cells of -(margin + tolerance)".to_string());
    sweep.vacuous_cases = skipped;
    let exact = CheckOutcome::from_residual(
        &format!("thm1_exact_{kind}"),
        if exact_worst == f64::NEG_INFINITY { 0.0 } else { exact_worst },
        1e-8,
        exact_cases,
    )
    .with_detail("worst defect where the derivative stays in the eigenspace".to_string());
    vec![sweep, exact]
}

pub fn thm2_summary(rep: &Thm2Report) -> CheckOutcome {
    if rep.domain == "interval" {
        let worst = rep
            .rows
            .iter()
            .map(|r| (r.ratio - 1.0).abs())
            .fold(0.0, f64::max);
        CheckOutcome::from_residual("thm2_flat_interval", worst, 1e-8, rep.rows.len())
            .with_detail("closed-form ratio must be identically 1".to_string())
    } else {
        CheckOutcome::from_residual(
            &format!("thm2_flat_{}", rep.domain),
            rep.slope.abs(),
            0.1,
            rep.rows.len(),
        )
        .with_detail(format!("log-log slope {}", fmt_f64(rep.slope)))
    }
}

pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    let domains = [Domain::interval(PI), Domain::rectangle(PI, PI), Domain::disk(1.0)];
    let mut checks: Vec<CheckOutcome> = Vec::new();
    let mut thm1_cells: Vec<Thm1Report> = Vec::new();
    let mut thm2: Vec<Thm2Report> = Vec::new();
    let mut disk_basis: Option<Arc<SpectralBasis>> = None;

    for (di, d) in domains.iter().enumerate() {
        let ctx = Thm1Context::new(*d).expect("model domains are valid");
        if matches!(d, Domain::Disk { .. }) {
            disk_basis = Some(ctx.basis.clone());
        }
        let cells = thm1_sweep(
            &ctx,
            &default_sweep_fields(d),
            &[1, 2, 3],
            &default_sweep_points(d),
            &default_sweep_directions(d),
            &default_sweep_times(),
        );
        checks.extend(summarize_thm1(d.kind_name(), &cells));
        thm1_cells.extend(cells);

        let count = match d {
            Domain::Interval { .. } => 100,
            Domain::Rectangle { .. } => 30,
            Domain::Disk { .. } => 25,
        };
        let t2 = thm2_ratio(d, count).expect("family within enumeration range");
        checks.push(thm2_summary(&t2));
        thm2.push(t2);

        checks.push(semigroup_eigen_check(d).expect("small basis"));
        checks.push(sperb_boundary_check(d, 10, 64).expect("small basis"));
        checks.push(bochner_check(d, 5, 50, salted(cfg.master_seed, 10 + di as u64)).expect("small basis"));
        checks.extend(monotonicity_checks(&ctx.basis));
        let (x0, dt) = match d {
            Domain::Interval { l } => (Point::x1(l / 2.0), 1e-4),
            Domain::Rectangle { lx, ly } => (Point::x2(lx / 2.0, ly / 2.0), 2e-4),
            Domain::Disk { .. } => (Point::x2(0.0, 0.0), 2e-4),
        };
        checks.push(partition_check(
            &ctx.basis,
            &x0,
            0.1,
            dt,
            cfg.mc_survival_paths,
            salted(cfg.master_seed, 20 + di as u64),
        ));
        let n_family = match d.dim() {
            1 => 8,
            _ => 6,
        };
        checks.push(distance_bound_check(d, n_family, 1e-3).expect("family within range"));
    }

    checks.push(superlevel_concentration_check(
        disk_basis.as_deref().expect("disk context was built"),
    ));
    checks.push(tail_bound_check());
    checks.push(comparison_bound_check());
    checks.push(triple_quotient_check(cfg));
    checks.push(triple_symmetry_check(cfg));
    checks.extend(reflection_checks(cfg));
    checks.push(line_scan_check());
    checks.push(growth_check(cfg.growth_n_max));

    SuiteReport { config: *cfg, checks, thm1_cells, thm2 }
}

/// High-oscillation superlevel sets hold nearly all the mass and stay
/// inside the survival budget, in both kernel regimes: exact images on
/// the interval at short time, spectral on the disk at moderate time.
fn superlevel_concentration_check(disk_basis: &SpectralBasis) -> CheckOutcome {
    use crate::spectral::{EigenPair, Parity};
    let float_slack = 1e-12;
    let interval = EigenPair::interval(PI, 20).expect("valid index");
    let a = superlevel_mass(
        &interval,
        &Direction::x1(1.0),
        1e-3 / interval.eigenvalue,
        None,
    );
    let disk = EigenPair::disk(1.0, 0, 3, Parity::Cos).expect("valid index");
    let b = superlevel_mass(&disk, &Direction::x2(1.0, 0.0), 0.02, Some(disk_basis));
    let spectral_slack = 1e-9;
    let residual = [
        a.a_mass - a.survival - float_slack,
        0.99 - a.survival,
        0.5 - a.a_mass,
        b.a_mass - b.survival - spectral_slack,
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);
    CheckOutcome::from_residual("superlevel_concentration", residual, 0.0, 2).with_detail(
        format!(
            "interval k=20: mass {} survival {}; disk (0,3) t=0.02: mass {} survival {}",
            fmt_f64(a.a_mass),
            fmt_f64(a.survival),
            fmt_f64(b.a_mass),
            fmt_f64(b.survival)
        ),
    )
}

/// Monte Carlo second difference of the killed semigroup against the
/// closed form: f = sin on the interval, so d^2 u(t, pi/2) = -e^{-t}.
fn triple_quotient_check(cfg: &SuiteConfig) -> CheckOutcome {
    let t = 0.05;
    let out = coupled_triple(
        &Domain::interval(PI),
        &Point::x1(PI / 2.0),
        &Direction::x1(1.0),
        0.01,
        &PathConfig::new(t).with_dt(2e-4),
        &SeedPolicy::new(salted(cfg.master_seed, 30)),
        cfg.mc_triple_paths,
        |p: &Point| p.get(0).sin(),
    );
    let reference = -(-t).exp();
    let tol = 4.0 * out.quotient.stderr + 1e-3;
    CheckOutcome::from_residual(
        "triple_quotient_interval",
        (out.quotient.mean - reference).abs(),
        tol,
        1,
    )
    .with_detail(format!(
        "mc {} reference {} stderr {} all-survived {}",
        fmt_f64(out.quotient.mean),
        fmt_f64(reference),
        fmt_f64(out.quotient.stderr),
        fmt_f64(out.all_survived_fraction())
    ))
}

/// The two offset walkers sit symmetrically around the center, so their
/// first-hit counts must agree within counting noise.
fn triple_symmetry_check(cfg: &SuiteConfig) -> CheckOutcome {
    let out = coupled_triple(
        &Domain::interval(PI),
        &Point::x1(PI / 2.0),
        &Direction::x1(1.0),
        0.01,
        &PathConfig::new(0.05).with_dt(2e-4),
        &SeedPolicy::new(salted(cfg.master_seed, 30)),
        cfg.mc_triple_paths,
        |p: &Point| p.get(0).sin(),
    );
    let plus = out.first_hit_counts[0] as f64;
    let minus = out.first_hit_counts[2] as f64;
    CheckOutcome::from_residual(
        "triple_symmetry_interval",
        (plus - minus).abs(),
        4.0 * (plus + minus).sqrt().max(1.0),
        1,
    )
    .with_detail(format!(
        "first hits: plus {} center {} minus {}",
        out.first_hit_counts[0], out.first_hit_counts[1], out.first_hit_counts[2]
    ))
}

fn reflection_checks(cfg: &SuiteConfig) -> Vec<CheckOutcome> {
    let out = reflection_max_estimate(
        1.0,
        &PathConfig::new(1.0).with_dt(1e-3),
        &SeedPolicy::new(salted(cfg.master_seed, 40)),
        cfg.mc_reflection_paths,
    );
    let analytic = CheckOutcome::from_residual(
        "reflection_analytic",
        (out.crossed.mean - out.analytic).abs(),
        4.0 * out.crossed.stderr,
        1,
    )
    .with_detail(format!(
        "mc {} analytic {}",
        fmt_f64(out.crossed.mean),
        fmt_f64(out.analytic)
    ));
    let combined = (out.crossed.stderr * out.crossed.stderr
        + out.endpoint_doubled.stderr * out.endpoint_doubled.stderr)
        .sqrt();
    let consistency = CheckOutcome::from_residual(
        "reflection_consistency",
        (out.crossed.mean - out.endpoint_doubled.mean).abs(),
        4.0 * combined,
        1,
    )
    .with_detail(format!(
        "max statistic {} doubled endpoint {}",
        fmt_f64(out.crossed.mean),
        fmt_f64(out.endpoint_doubled.mean)
    ));
    vec![analytic, consistency]
}

/// Three canned sets probe the chord scan: the full ball scores 1, a 1%
/// cap leaves at least 0.97, and a stripe cutting every admissible chord
/// must be flagged below 0.97.
fn line_scan_check() -> CheckOutcome {
    let c = Point::x2(0.0, 0.0);
    let nu = Direction::x2(1.0, 0.0);
    let c4 = 0.25;
    let res = 801;
    let full = line_fraction_scan(&c, 1.0, &nu, c4, res, |p| p.dist(&c) <= 1.0);
    let cap = line_fraction_scan(&c, 1.0, &nu, c4, res, |p| {
        p.dist(&c) <= 1.0 && p.get(1) < 0.9355
    });
    let stripe = line_fraction_scan(&c, 1.0, &nu, c4, res, |p| {
        p.dist(&c) <= 1.0 && p.get(0).abs() > 0.3195
    });
    let residual = [
        1.0 - full.best_fraction,
        0.97 - cap.best_fraction,
        stripe.best_fraction - 0.97,
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);
    CheckOutcome::from_residual("line_fraction_scan", residual, 0.0, 3).with_detail(format!(
        "full {} cap {} stripe {}",
        fmt_f64(full.best_fraction),
        fmt_f64(cap.best_fraction),
        fmt_f64(stripe.best_fraction)
    ))
}

fn growth_check(n_max: u32) -> CheckOutcome {
    let fit = growth_exponent_fit(1.0, n_max).expect("radial family");
    let residual = [
        (fit.sup_slope - 0.25).abs() - 0.03,
        (fit.grad_slope - 0.75).abs() - 0.05,
        (fit.hess_slope - 1.25).abs() - 0.05,
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);
    CheckOutcome::from_residual("disk_growth_exponents", residual, 0.0, 3).with_detail(format!(
        "slopes {} {} {}",
        fmt_f64(fit.sup_slope),
        fmt_f64(fit.grad_slope),
        fmt_f64(fit.hess_slope)
    ))
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass) && self.thm1_cells.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn summary_lines(&self) -> Vec<String> {
        let mut lines: Vec<String> = self.checks.iter().map(|c| c.summary_line()).collect();
        let skipped = self
            .thm1_cells
            .iter()
            .filter(|c| matches!(c.status, CellStatus::Skipped { .. }))
            .count();
        lines.push(format!(
            "thm1 cells: {} total, {} skipped, worst margin {}",
            self.thm1_cells.len(),
            skipped,
            fmt_f64(
                self.thm1_cells
                    .iter()
                    .filter(|c| c.status == CellStatus::Checked)
                    .map(|c| c.margin)
                    .fold(f64::INFINITY, f64::min)
            )
        ));
        for rep in &self.thm2 {
            lines.push(format!(
                "thm2 {}: {} pairs, slope {}",
                rep.domain,
                rep.rows.len(),
                fmt_f64(rep.slope)
            ));
        }
        lines
    }

    pub fn thm1_csv(&self) -> String {
        thm1_cells_csv(&self.thm1_cells)
    }

    pub fn checks_csv(&self) -> String {
        check_outcomes_csv(&self.checks)
    }

    pub fn thm2_csv(&self) -> String {
        thm2_reports_csv(&self.thm2)
    }
}

/// Fixed-column CSV of sweep cells. 1-d coordinates pad their second
/// component with 0.
pub fn thm1_cells_csv(cells: &[Thm1Report]) -> String {
    let mut s = String::from(
        "domain,field,x0_x,x0_y,nu_x,nu_y,order,t,status,lhs_x,survival_deficit,boundary_max_fixed,boundary_max,rhs,margin,tolerance,recon_error,exactness_expected,pass\n",
    );
    for c in cells {
        let status = match &c.status {
            CellStatus::Checked => "checked",
            CellStatus::Skipped { .. } => "skipped",
        };
        let coord = |i: usize| {
            if i < c.x0.dim() { c.x0.get(i) } else { 0.0 }
        };
        let comp = |i: usize| {
            if i < c.nu.dim() { c.nu.get(i) } else { 0.0 }
        };
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            c.domain,
            c.field,
            fmt_f64(coord(0)),
            fmt_f64(coord(1)),
            fmt_f64(comp(0)),
            fmt_f64(comp(1)),
            c.order,
            fmt_f64(c.t),
            status,
            fmt_f64(c.lhs_x),
            fmt_f64(c.survival_deficit),
            fmt_f64(c.boundary_max_fixed),
            fmt_f64(c.boundary_max),
            fmt_f64(c.rhs),
            fmt_f64(c.margin),
            fmt_f64(c.tolerance),
            fmt_f64(c.recon_error),
            c.exactness_expected,
            c.pass
        ));
    }
    s
}

pub fn check_outcomes_csv(checks: &[CheckOutcome]) -> String {
    let mut s = String::from("name,pass,max_residual,tolerance,cases,vacuous_cases\n");
    for c in checks {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            c.name,
            c.pass,
            fmt_f64(c.max_residual),
            fmt_f64(c.tolerance),
            c.cases,
            c.vacuous_cases
        ));
    }
    s
}

/// The index column is quoted because multi-index `Display` output
/// contains commas.
pub fn thm2_reports_csv(reps: &[Thm2Report]) -> String {
    let mut s = String::from("domain,index,lambda,hess_sup,grad_sup,ratio\n");
    for rep in reps {
        for r in &rep.rows {
            s.push_str(&format!(
                "{},\"{}\",{},{},{},{}\n",
                rep.domain,
                r.index,
                fmt_f64(r.lambda),
                fmt_f64(r.hess_sup),
                fmt_f64(r.grad_sup),
                fmt_f64(r.ratio)
            ));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn salts_do_not_collide_for_small_indices() {
        let mut seen = std::collections::HashSet::new();
        for salt in 0..64 {
            assert!(seen.insert(salted(7, salt)));
        }
    }

    #[test]
    fn thm1_summary_flags_a_failing_cell() {
        let ctx = Thm1Context::new(Domain::interval(PI)).unwrap();
        let mut cells = thm1_sweep(
            &ctx,
            &[crate::fields::FieldSpec::Eigen { position: 0 }],
            &[1],
            &[Point::x1(PI / 2.0)],
            &[Direction::x1(1.0)],
            &[0.1],
        );
        assert!(summarize_thm1("interval", &cells)[0].pass);
        cells[0].margin = -1.0;
        cells[0].tolerance = 1e-9;
        cells[0].pass = false;
        assert!(!summarize_thm1("interval", &cells)[0].pass);
    }
}
