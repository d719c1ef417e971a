//! Mechanism checks: the analytic identities and probabilistic bounds the
//! headline inequalities lean on, each as a named residual. None of these
//! are graded by eye; a check owns its tolerance and says where it came
//! from.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{Direction, Domain, Point};
use crate::fields;
use crate::heat::{self, SpectralField, Truncation};
use crate::report::{fmt_f64, CheckOutcome};
use crate::special::{gauss_legendre_on, kahan_sum, normal_tail};
use crate::spectral::{enumerate_eigenpairs, EigenIndex, EigenPair, Parity, SpectralBasis, SpectralError};
use crate::stoch::{estimate_survival, PathConfig, SeedPolicy};

/// Evolving a projected eigenfunction must equal scalar decay: the sup of
/// |e^{t Delta} phi_k - e^{-lambda_k t} phi_k| over an interior grid, for
/// the first ten pairs and t in {0.01, 0.1, 1}.
pub fn semigroup_eigen_check(d: &Domain) -> Result<CheckOutcome, SpectralError> {
    let basis = Arc::new(SpectralBasis::new(*d, 10)?);
    let grid = match d.dim() {
        1 => d.interior_grid(128),
        _ => d.interior_grid(24),
    };
    let mut worst = 0.0f64;
    for pos in 0..basis.len() {
        let pair = basis.pairs[pos].clone();
        let field = SpectralField::project(
            basis.clone(),
            |x| pair.eval(x),
            fields::default_quad_order(d),
        );
        for &t in &[0.01, 0.1, 1.0] {
            let decay = (-pair.eigenvalue * t).exp();
            let sup = grid
                .iter()
                .map(|x| (field.eval(t, x) - decay * pair.eval(x)).abs())
                .fold(0.0, f64::max);
            worst = worst.max(sup);
        }
    }
    Ok(CheckOutcome::from_residual(
        &format!("semigroup_eigen_{}", d.kind_name()),
        worst,
        1e-8,
        basis.len() * 3,
    ))
}

/// On the boundary the eigenvalue drops out of the equation and the normal
/// second derivative is tied to curvature: with nu the inward normal,
/// nu^T (D^2 phi) nu = (dim - 1) * H * (grad phi . nu). Residuals are
/// normalized by lambda times the sup bound of phi.
pub fn sperb_boundary_check(
    d: &Domain,
    n_pairs: usize,
    n_samples: usize,
) -> Result<CheckOutcome, SpectralError> {
    let pairs = enumerate_eigenpairs(d, n_pairs)?;
    let samples = d.boundary_sample(n_samples);
    let codim = (d.dim() - 1) as f64;
    let mut worst = 0.0f64;
    for p in &pairs {
        let scale = p.eigenvalue * p.sup_bound();
        for bp in &samples {
            let e = p.eval_all(&bp.point);
            let nu = &bp.inward_normal;
            let normal_dd = e.hess.quad_form(nu);
            let normal_d =
                nu.comps().iter().zip(&e.grad).map(|(a, b)| a * b).sum::<f64>();
            let res = (normal_dd - codim * bp.mean_curvature * normal_d).abs();
            worst = worst.max(res / scale);
        }
    }
    Ok(CheckOutcome::from_residual(
        &format!("sperb_{}", d.kind_name()),
        worst,
        1e-6,
        pairs.len() * samples.len(),
    ))
}

/// Interior identity half Laplacian of |grad phi|^2 = |D^2 phi|_F^2
/// - lambda |grad phi|^2, with the Laplacian taken by second differences
/// of the analytic |grad phi|^2. Each point gets a budget of the FD
/// truncation term (step^2 lambda^3) plus the cancellation roundoff
/// (eps_machine lambda / step^2); the reported residual is the worst
/// ratio against that budget, so the tolerance is 1.
pub fn bochner_check(
    d: &Domain,
    n_pairs: usize,
    n_points: usize,
    seed: u64,
) -> Result<CheckOutcome, SpectralError> {
    let pairs = enumerate_eigenpairs(d, n_pairs)?;
    let eps = 1e-4 * d.diameter();
    let pts = sample_interior(d, n_points, 3.0 * eps, seed);
    let dim = d.dim();
    let mut worst = 0.0f64;
    for p in &pairs {
        let lam = p.eigenvalue;
        let s2 = p.sup_bound() * p.sup_bound();
        let budget = 6.0 * eps * eps * lam.powi(3) * s2
            + 200.0 * f64::EPSILON * lam * s2 / (eps * eps);
        let g2 = |x: &Point| {
            let e = p.eval_all(x);
            e.grad[0] * e.grad[0] + e.grad[1] * e.grad[1]
        };
        for x in &pts {
            let mut lap = 0.0;
            let center = g2(x);
            for a in 0..dim {
                let mut chi = x.coords().to_vec();
                chi[a] += eps;
                let mut clo = x.coords().to_vec();
                clo[a] -= eps;
                lap += (g2(&Point::from_slice(&chi)) - 2.0 * center
                    + g2(&Point::from_slice(&clo)))
                    / (eps * eps);
            }
            let e = p.eval_all(x);
            let res = (0.5 * lap - (e.hess.frobenius_sq() - lam * center)).abs();
            worst = worst.max(res / budget);
        }
    }
    Ok(CheckOutcome::from_residual(
        &format!("bochner_{}", d.kind_name()),
        worst,
        1.0,
        pairs.len() * pts.len(),
    )
    .with_detail(format!("fd step {}", fmt_f64(eps))))
}

/// Deterministic interior sample with a safety margin to the boundary.
fn sample_interior(d: &Domain, n: usize, margin: f64, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bb = bounding_box(d);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = match d.dim() {
            1 => Point::x1(bb.0 + (bb.1 - bb.0) * rng.gen::<f64>()),
            _ => Point::x2(
                bb.0 + (bb.1 - bb.0) * rng.gen::<f64>(),
                bb.2 + (bb.3 - bb.2) * rng.gen::<f64>(),
            ),
        };
        if d.contains(&p) && d.distance_to_boundary(&p) > margin {
            out.push(p);
        }
    }
    out
}

fn bounding_box(d: &Domain) -> (f64, f64, f64, f64) {
    match d {
        Domain::Interval { l } => (0.0, *l, 0.0, 0.0),
        Domain::Rectangle { lx, ly } => (0.0, *lx, 0.0, *ly),
        Domain::Disk { r } => (-*r, *r, -*r, *r),
    }
}

/// Standard-normal tail sandwich: for z in [0.5, 6] the lower bound
/// (1/sqrt(2 pi)) (1/z - 1/z^3) e^{-z^2/2} must not exceed the tail, and
/// at z0 = sqrt(log(1/eps)) the constant (1/(2 pi z0)) e^{-z0^2/2} must
/// clear 2 eps for both working epsilons.
pub fn tail_bound_check() -> CheckOutcome {
    let inv_sqrt_2pi = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let mut worst = f64::NEG_INFINITY;
    let n = 100;
    for i in 0..n {
        let z = 0.5 + 5.5 * i as f64 / (n - 1) as f64;
        let bound = inv_sqrt_2pi * (1.0 / z - 1.0 / (z * z * z)) * (-0.5 * z * z).exp();
        worst = worst.max(bound - normal_tail(z));
    }
    let mut detail = String::new();
    for &eps in &[9e-4f64, 1e-4] {
        let z0 = (1.0 / eps).ln().sqrt();
        let val = (-0.5 * z0 * z0).exp() / (2.0 * std::f64::consts::PI * z0);
        worst = worst.max(2.0 * eps - val);
        detail.push_str(&format!("eps {:.1e}: constant {} vs 2 eps {}; ", eps, fmt_f64(val), fmt_f64(2.0 * eps)));
    }
    CheckOutcome::from_residual("gaussian_tail_bound", worst, 0.0, 102).with_detail(detail)
}

/// Where the kernel mass of the half-max superlevel set of the second
/// normal-direction derivative sits, seen from its own argmax.
#[derive(Debug, Clone, Serialize)]
pub struct SuperlevelReport {
    pub domain: String,
    pub index: EigenIndex,
    pub lambda: f64,
    pub t: f64,
    /// Argmax of +d^2 phi / d nu0^2 over the scan grid (sign matters: the
    /// positive direction of the second derivative is the one the level
    /// set is built from).
    pub x0: Point,
    pub threshold: f64,
    pub a_mass: f64,
    pub survival: f64,
    /// True when `survival` is a certified lower bound (short-time
    /// reflection estimate) rather than a spectral value.
    pub survival_is_lower_bound: bool,
    pub distance_to_boundary: f64,
}

fn bisect_crossing<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm >= 0.0) == (flo >= 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Kernel mass of A = {d^2_nu0 phi >= max/2} from the argmax of that same
/// derivative at time t. In 1-d both the mass and the survival come from
/// the exact images series. In 2-d, short times use the free kernel (an
/// upper bound for the mass, never below the killed kernel) against a
/// reflection lower bound for survival, so the comparison stays one-sided;
/// moderate times use the spectral kernel from `kernel_basis` (built on
/// the spot when not supplied).
pub fn superlevel_mass(
    pair: &EigenPair,
    nu0: &Direction,
    t: f64,
    kernel_basis: Option<&SpectralBasis>,
) -> SuperlevelReport {
    let d = pair.domain;
    match d {
        Domain::Interval { l } => {
            let n = 4000usize;
            let xs: Vec<f64> = (1..n).map(|i| l * i as f64 / n as f64).collect();
            let h = |x: f64| pair.hess_dir(&Point::x1(x), nu0);
            let hs: Vec<f64> = xs.iter().map(|&x| h(x)).collect();
            let (imax, hmax) = hs
                .iter()
                .enumerate()
                .fold((0usize, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
                    if v > bv { (i, v) } else { (bi, bv) }
                });
            let tau = hmax / 2.0;
            let g = |x: f64| h(x) - tau;
            let mut intervals: Vec<(f64, f64)> = Vec::new();
            let mut start: Option<f64> = None;
            for i in 0..xs.len() {
                let inside = hs[i] >= tau;
                match (inside, start) {
                    (true, None) => {
                        let a = if i == 0 { xs[0] } else { bisect_crossing(&g, xs[i - 1], xs[i]) };
                        start = Some(a);
                    }
                    (false, Some(a)) => {
                        intervals.push((a, bisect_crossing(&g, xs[i - 1], xs[i])));
                        start = None;
                    }
                    _ => {}
                }
            }
            if let Some(a) = start {
                intervals.push((a, xs[n - 2]));
            }
            let x0 = xs[imax];
            let a_mass = kahan_sum(
                intervals.iter().map(|&(a, b)| heat::images_mass_1d(l, t, x0, a, b)),
            );
            SuperlevelReport {
                domain: d.kind_name().to_string(),
                index: pair.index,
                lambda: pair.eigenvalue,
                t,
                x0: Point::x1(x0),
                threshold: tau,
                a_mass,
                survival: heat::images_mass_1d(l, t, x0, 0.0, l),
                survival_is_lower_bound: false,
                distance_to_boundary: x0.min(l - x0),
            }
        }
        _ => superlevel_mass_2d(pair, nu0, t, kernel_basis),
    }
}

fn superlevel_mass_2d(
    pair: &EigenPair,
    nu0: &Direction,
    t: f64,
    kernel_basis: Option<&SpectralBasis>,
) -> SuperlevelReport {
    let d = pair.domain;
    let grid = d.interior_grid(301);
    let h = |p: &Point| pair.hess_dir(p, nu0);
    let (mut x0, mut hmax) = (grid[0], f64::NEG_INFINITY);
    for p in &grid {
        let v = h(p);
        if v > hmax {
            hmax = v;
            x0 = *p;
        }
    }
    let tau = hmax / 2.0;
    let d0 = d.distance_to_boundary(&x0);
    let hw = 8.0 * (2.0 * t).sqrt();
    let free_ok = d0 >= 1.5 * hw;
    let built;
    let kb: Option<&SpectralBasis> = if free_ok {
        None
    } else {
        match kernel_basis {
            Some(b) => Some(b),
            None => {
                built = SpectralBasis::new(d, fields::suite_basis_count(&d))
                    .expect("basis for a valid domain");
                Some(&built)
            }
        }
    };
    let bb = bounding_box(&d);
    let ax = (x0.get(0) - hw).max(bb.0);
    let bx = (x0.get(0) + hw).min(bb.1);
    let ay = (x0.get(1) - hw).max(bb.2);
    let by = (x0.get(1) + hw).min(bb.3);
    let cells = 24usize;
    let axis_nodes = |a: f64, b: f64| -> Vec<(f64, f64)> {
        let w = (b - a) / cells as f64;
        let mut v = Vec::with_capacity(cells * 3);
        for c in 0..cells {
            let (ns, ws) = gauss_legendre_on(a + c as f64 * w, a + (c + 1) as f64 * w, 3);
            v.extend(ns.into_iter().zip(ws));
        }
        v
    };
    let xn = axis_nodes(ax, bx);
    let yn = axis_nodes(ay, by);
    let rows: Vec<f64> = xn
        .par_iter()
        .map(|&(x, wx)| {
            let mut acc = 0.0;
            for &(y, wy) in &yn {
                let p = Point::x2(x, y);
                if !d.contains(&p) || h(&p) < tau {
                    continue;
                }
                let k = if free_ok {
                    heat::free_kernel(2, t, &x0, &p)
                } else {
                    heat::heat_kernel(kb.unwrap(), t, &x0, &p, Truncation::default()).clamped
                };
                acc += wx * wy * k;
            }
            acc
        })
        .collect();
    let a_mass = kahan_sum(rows.into_iter());
    let (survival, lower) = if free_ok {
        // per-coordinate reflection union bound for leaving the inscribed
        // ball of radius d0: 4 * dim * tail(d0 / (2 sqrt t))
        ((1.0 - 8.0 * normal_tail(d0 / (2.0 * t.sqrt()))).max(0.0), true)
    } else {
        (
            heat::survival(kb.unwrap(), t, &x0, Truncation::default()).clamped,
            false,
        )
    };
    SuperlevelReport {
        domain: d.kind_name().to_string(),
        index: pair.index,
        lambda: pair.eigenvalue,
        t,
        x0,
        threshold: tau,
        a_mass,
        survival,
        survival_is_lower_bound: lower,
        distance_to_boundary: d0,
    }
}

/// Concentration forces distance: whenever the half-max superlevel set of
/// d^2_nu0 phi holds all but 4 eps of the kernel mass at t = eps / lambda,
/// the argmax must sit at least (sqrt t / 4) sqrt(log(1/eps)) from the
/// boundary. Pairs whose superlevel mass never reaches the threshold are
/// vacuous and counted as such.
pub fn distance_bound_check(
    d: &Domain,
    n_pairs: usize,
    eps: f64,
) -> Result<CheckOutcome, SpectralError> {
    let pairs = family(d, n_pairs)?;
    let nu0 = match d.dim() {
        1 => Direction::x1(1.0),
        _ => Direction::x2(1.0, 0.0),
    };
    let mut worst = f64::NEG_INFINITY;
    let mut vacuous = 0usize;
    let mut detail = String::new();
    for p in &pairs {
        let t = eps / p.eigenvalue;
        let rep = superlevel_mass(p, &nu0, t, None);
        let hypothesis = rep.a_mass >= 1.0 - 4.0 * eps;
        if !hypothesis {
            vacuous += 1;
            detail.push_str(&format!("{} vacuous (mass {:.4}); ", p.index, rep.a_mass));
            continue;
        }
        let required = (t.sqrt() / 4.0) * (1.0 / eps).ln().sqrt();
        worst = worst.max(required - rep.distance_to_boundary);
        detail.push_str(&format!(
            "{} d {:.4} needs {:.4}; ",
            p.index, rep.distance_to_boundary, required
        ));
    }
    let residual = if worst == f64::NEG_INFINITY { 0.0 } else { worst };
    let mut out = CheckOutcome::from_residual(
        &format!("distance_bound_{}", d.kind_name()),
        residual,
        0.0,
        pairs.len(),
    )
    .with_detail(detail);
    out.vacuous_cases = vacuous;
    Ok(out)
}

fn family(d: &Domain, n: usize) -> Result<Vec<EigenPair>, SpectralError> {
    match d {
        Domain::Disk { r } => (1..=n as u32)
            .map(|k| EigenPair::disk(*r, 0, k, Parity::Cos))
            .collect(),
        _ => enumerate_eigenpairs(d, n),
    }
}

/// Survival probability and exit probability partition the paths: the
/// spectral survival and the Monte Carlo exit estimate must sum to one
/// within sampling error.
pub fn partition_check(
    basis: &SpectralBasis,
    x0: &Point,
    t: f64,
    dt: f64,
    n_paths: usize,
    seed: u64,
) -> CheckOutcome {
    let s = heat::survival(basis, t, x0, Truncation::default()).clamped;
    let est = estimate_survival(
        &basis.domain,
        x0,
        &PathConfig::new(t).with_dt(dt),
        &SeedPolicy::new(seed),
        n_paths,
    );
    let exit = 1.0 - est.mean;
    CheckOutcome::from_residual(
        &format!("partition_{}", basis.domain.kind_name()),
        (s + exit - 1.0).abs(),
        4.0 * est.stderr,
        1,
    )
    .with_detail(format!(
        "spectral {} mc {} stderr {}",
        fmt_f64(s),
        fmt_f64(est.mean),
        fmt_f64(est.stderr)
    ))
}

/// Subsolution comparison on the unit ball: if Laplacian f >= C on B_R
/// then sup |f| >= C R^2 / (4 dim). Checked for three explicit data in
/// dimension two.
pub fn comparison_bound_check() -> CheckOutcome {
    let r = 1.0f64;
    let cases: [(&str, fn(&Point) -> f64, f64); 3] = [
        ("norm_sq", |p| p.norm() * p.norm(), 4.0),
        ("quarter_norm_sq_plus_one", |p| 0.25 * p.norm() * p.norm() + 1.0, 1.0),
        ("exp_first_coord", |p| p.get(0).exp(), (-1.0f64).exp()),
    ];
    let mut worst = f64::NEG_INFINITY;
    let mut detail = String::new();
    for (name, f, c) in cases {
        let mut sup = 0.0f64;
        for i in 0..=64 {
            let rho = r * i as f64 / 64.0;
            for j in 0..128 {
                let th = 2.0 * std::f64::consts::PI * j as f64 / 128.0;
                sup = sup.max(f(&Point::x2(rho * th.cos(), rho * th.sin())).abs());
            }
        }
        let bound = c * r * r / 8.0;
        worst = worst.max(bound - sup);
        detail.push_str(&format!("{name}: sup {} >= {}; ", fmt_f64(sup), fmt_f64(bound)));
    }
    CheckOutcome::from_residual("comparison_bound", worst, 0.0, 3).with_detail(detail)
}

/// Two orderings the kernel must respect: survival strictly decreases in
/// t, and the killed kernel never exceeds the free one.
pub fn monotonicity_checks(basis: &SpectralBasis) -> Vec<CheckOutcome> {
    let d = &basis.domain;
    let kind = d.kind_name();
    let x0s = probe_points(d);
    let nt = 12;
    let ts: Vec<f64> = (0..nt)
        .map(|i| 0.02 * (100.0f64).powf(i as f64 / (nt - 1) as f64))
        .collect();
    let mut worst_incr = f64::NEG_INFINITY;
    for x in &x0s {
        let vals: Vec<f64> = ts
            .iter()
            .map(|&t| heat::survival(basis, t, x, Truncation::default()).clamped)
            .collect();
        for w in vals.windows(2) {
            worst_incr = worst_incr.max(w[1] - w[0]);
        }
    }
    let survival = CheckOutcome {
        name: format!("survival_decreasing_{kind}"),
        pass: worst_incr < 0.0,
        max_residual: worst_incr,
        tolerance: 0.0,
        cases: x0s.len() * (nt - 1),
        vacuous_cases: 0,
        detail: "largest forward difference; strict decrease wants it negative".to_string(),
    };
    let pts = match d.dim() {
        1 => d.interior_grid(12),
        _ => d.interior_grid(6),
    };
    let mut worst_dom = f64::NEG_INFINITY;
    let mut cases = 0usize;
    for &t in &[0.05, 0.2, 1.0] {
        let sups: Vec<f64> = pts
            .par_iter()
            .map(|x| {
                let mut m = f64::NEG_INFINITY;
                for y in &pts {
                    let k = heat::heat_kernel(basis, t, x, y, Truncation::default()).raw;
                    m = m.max(k - heat::free_kernel(d.dim(), t, x, y));
                }
                m
            })
            .collect();
        worst_dom = sups.into_iter().fold(worst_dom, f64::max);
        cases += pts.len() * pts.len();
    }
    let domination = CheckOutcome::from_residual(
        &format!("free_kernel_domination_{kind}"),
        worst_dom,
        1e-9,
        cases,
    );
    vec![survival, domination]
}

fn probe_points(d: &Domain) -> Vec<Point> {
    match d {
        Domain::Interval { l } => {
            vec![Point::x1(0.3 * l), Point::x1(0.5 * l), Point::x1(0.77 * l)]
        }
        Domain::Rectangle { lx, ly } => vec![
            Point::x2(0.3 * lx, 0.4 * ly),
            Point::x2(0.5 * lx, 0.5 * ly),
            Point::x2(0.72 * lx, 0.31 * ly),
        ],
        Domain::Disk { r } => vec![
            Point::x2(0.0, 0.0),
            Point::x2(0.45 * r, 0.0),
            Point::x2(0.7 * r * 0.5403, 0.7 * r * 0.8415),
        ],
    }
}
