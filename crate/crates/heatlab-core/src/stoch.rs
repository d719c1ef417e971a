//! Killed Brownian motion by Euler steps, with an optional Brownian-bridge
//! kill correction for sub-step boundary excursions.
//!
//! Under the u_t = Delta u convention each coordinate increment has
//! variance 2 dt, and the bridge probability of touching the boundary
//! between two interior positions at distances d1, d2 is exp(-d1 d2 / dt).
//!
//! Reproducibility contract: path i draws from ChaCha8 stream i of the
//! master seed, so results are independent of thread count and of the
//! total path count (a longer run extends, never reshuffles). Aggregation
//! collects per-path values in index order and reduces sequentially.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{Direction, Domain, Point};
use crate::special::kahan_sum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathConfig {
    pub horizon: f64,
    pub dt: f64,
    pub bridge_correction: bool,
}

impl PathConfig {
    /// Default step: min(1e-4, horizon / 100), bridge correction on.
    pub fn new(horizon: f64) -> Self {
        assert!(horizon > 0.0 && horizon.is_finite());
        PathConfig {
            horizon,
            dt: (horizon / 100.0).min(1e-4),
            bridge_correction: true,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        assert!(dt > 0.0 && dt <= self.horizon, "need 0 < dt <= horizon");
        self.dt = dt;
        self
    }

    pub fn without_bridge(mut self) -> Self {
        self.bridge_correction = false;
        self
    }

    fn n_steps(&self) -> usize {
        (self.horizon / self.dt).ceil() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedPolicy {
    pub master_seed: u64,
}

impl SeedPolicy {
    pub fn new(master_seed: u64) -> Self {
        SeedPolicy { master_seed }
    }

    /// Independent generator for one path: same master key, stream = index.
    pub fn rng_for_path(&self, path_index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(path_index);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KilledPathResult {
    pub survived: bool,
    /// Position at the horizon when the path survived.
    pub final_point: Option<Point>,
    pub exit_time: Option<f64>,
    pub exit_point: Option<Point>,
}

/// Mean, standard error and sample count of a Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

impl Estimate {
    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len();
        assert!(n >= 2, "need at least two samples");
        let mean = kahan_sum(values.iter().copied()) / n as f64;
        let var = kahan_sum(values.iter().map(|v| (v - mean) * (v - mean)))
            / (n as f64 - 1.0);
        Estimate { mean, stderr: (var / n as f64).sqrt(), n }
    }

    /// |mean - reference| in units of the standard error.
    pub fn z_score(&self, reference: f64) -> f64 {
        (self.mean - reference).abs() / self.stderr.max(f64::MIN_POSITIVE)
    }
}

/// Bisection for the boundary crossing of the segment from `inside`
/// (strictly interior) to `outside`. Returns the crossing point projected
/// onto the boundary and the segment fraction.
fn boundary_crossing(domain: &Domain, inside: &Point, outside: &Point) -> (Point, f64) {
    let d = [
        outside.get(0) - inside.get(0),
        if inside.dim() == 2 { outside.get(1) - inside.get(1) } else { 0.0 },
    ];
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        let p = inside.translated([mid * d[0], mid * d[1]]);
        if domain.contains(&p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let frac = 0.5 * (lo + hi);
    let p = inside.translated([frac * d[0], frac * d[1]]);
    (domain.project_to_boundary(&p), frac)
}

/// One Euler path of Brownian motion killed on exit. Per step the walk
/// draws dim normals, plus one uniform when the bridge correction is on.
pub fn simulate_killed_path<R: Rng>(
    domain: &Domain,
    x0: &Point,
    cfg: &PathConfig,
    rng: &mut R,
) -> KilledPathResult {
    assert!(domain.contains(x0), "start must be strictly interior");
    let dim = domain.dim();
    let mut x = *x0;
    let mut t = 0.0;
    for _ in 0..cfg.n_steps() {
        let dt = (cfg.horizon - t).min(cfg.dt);
        let sig = (2.0 * dt).sqrt();
        let mut inc = [0.0f64; 2];
        for c in inc.iter_mut().take(dim) {
            let z: f64 = StandardNormal.sample(rng);
            *c = sig * z;
        }
        let prop = x.translated(inc);
        if !domain.contains(&prop) {
            let (exit_point, frac) = boundary_crossing(domain, &x, &prop);
            return KilledPathResult {
                survived: false,
                final_point: None,
                exit_time: Some(t + frac * dt),
                exit_point: Some(exit_point),
            };
        }
        if cfg.bridge_correction {
            let d1 = domain.distance_to_boundary(&x);
            let d2 = domain.distance_to_boundary(&prop);
            let u: f64 = rng.gen();
            if u < (-d1 * d2 / dt).exp() {
                // the unseen excursion touched the boundary; attribute the
                // exit to the nearer endpoint's projection, mid-step
                let nearer = if d1 < d2 { &x } else { &prop };
                return KilledPathResult {
                    survived: false,
                    final_point: None,
                    exit_time: Some(t + 0.5 * dt),
                    exit_point: Some(domain.project_to_boundary(nearer)),
                };
            }
        }
        x = prop;
        t += dt;
    }
    KilledPathResult {
        survived: true,
        final_point: Some(x),
        exit_time: None,
        exit_point: None,
    }
}

/// Per-path payoff samples f(B_T) 1{survived}, in path-index order.
pub fn feynman_kac_samples<F>(
    domain: &Domain,
    x0: &Point,
    cfg: &PathConfig,
    seeds: &SeedPolicy,
    n_paths: usize,
    f: F,
) -> Vec<f64>
where
    F: Fn(&Point) -> f64 + Sync,
{
    (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeds.rng_for_path(i);
            let r = simulate_killed_path(domain, x0, cfg, &mut rng);
            match r.final_point {
                Some(p) => f(&p),
                None => 0.0,
            }
        })
        .collect()
}

/// E[f(B_T) 1{survived}], which equals the killed semigroup applied to f.
pub fn feynman_kac<F>(
    domain: &Domain,
    x0: &Point,
    cfg: &PathConfig,
    seeds: &SeedPolicy,
    n_paths: usize,
    f: F,
) -> Estimate
where
    F: Fn(&Point) -> f64 + Sync,
{
    Estimate::from_samples(&feynman_kac_samples(domain, x0, cfg, seeds, n_paths, f))
}

/// Survival probability estimate (the Feynman-Kac payoff of f = 1).
pub fn estimate_survival(
    domain: &Domain,
    x0: &Point,
    cfg: &PathConfig,
    seeds: &SeedPolicy,
    n_paths: usize,
) -> Estimate {
    feynman_kac(domain, x0, cfg, seeds, n_paths, |_| 1.0)
}

/// Joint fate of the coupled triple (x0 + eps nu, x0, x0 - eps nu).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripleOutcome {
    /// Monte Carlo second difference quotient: mean over all paths of
    /// (f(X+) s+ - 2 f(Xc) sc + f(X-) s-) / eps^2 with s the survival
    /// indicators. Killed walkers contribute zero, so this is the
    /// survivor sum over the full path count.
    pub quotient: Estimate,
    /// Count per joint survival class, indexed by the bitmask
    /// (plus << 2) | (center << 1) | minus with 1 = survived.
    pub class_counts: [u64; 8],
    /// Paths whose first boundary hit was by plus, center, minus. Deaths
    /// landing in the same step are charged to the lowest index among
    /// them, in the order plus, center, minus.
    pub first_hit_counts: [u64; 3],
    pub eps: f64,
}

impl TripleOutcome {
    /// Fraction of paths on which all three walkers reached the horizon.
    pub fn all_survived_fraction(&self) -> f64 {
        let n: u64 = self.class_counts.iter().sum();
        self.class_counts[0b111] as f64 / n as f64
    }
}

/// Three walkers driven by one shared increment stream, so their offsets
/// stay exactly +-eps nu for as long as they live; only the center position
/// is tracked. One uniform per step feeds every bridge check, evaluated in
/// the fixed order plus, center, minus, which makes simultaneous deaths
/// deterministic.
pub fn coupled_triple<F>(
    domain: &Domain,
    x0: &Point,
    nu: &Direction,
    eps: f64,
    cfg: &PathConfig,
    seeds: &SeedPolicy,
    n_paths: usize,
    f: F,
) -> TripleOutcome
where
    F: Fn(&Point) -> f64 + Sync,
{
    assert!(eps > 0.0);
    let offsets = [eps, 0.0, -eps];
    for o in offsets {
        assert!(
            domain.contains(&x0.offset(nu, o)),
            "triple start must be strictly interior"
        );
    }
    let dim = domain.dim();
    let per_path: Vec<(f64, u8, Option<u8>)> = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeds.rng_for_path(i);
            let mut center = *x0;
            let mut alive = [true; 3];
            let mut first_hit: Option<u8> = None;
            let mut t = 0.0;
            for _ in 0..cfg.n_steps() {
                let dt = (cfg.horizon - t).min(cfg.dt);
                let sig = (2.0 * dt).sqrt();
                let mut inc = [0.0f64; 2];
                for c in inc.iter_mut().take(dim) {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    *c = sig * z;
                }
                let u: f64 = rng.gen();
                let prev = center;
                center = center.translated(inc);
                for (k, off) in offsets.iter().enumerate() {
                    if !alive[k] {
                        continue;
                    }
                    let pos = center.offset(nu, *off);
                    if !domain.contains(&pos) {
                        alive[k] = false;
                    } else if cfg.bridge_correction {
                        let d1 = domain.distance_to_boundary(&prev.offset(nu, *off));
                        let d2 = domain.distance_to_boundary(&pos);
                        if u < (-d1 * d2 / dt).exp() {
                            alive[k] = false;
                        }
                    }
                    if !alive[k] && first_hit.is_none() {
                        first_hit = Some(k as u8);
                    }
                }
                t += dt;
                if !alive.iter().any(|&a| a) {
                    break;
                }
            }
            let mut v = 0.0;
            let signs = [1.0, -2.0, 1.0];
            for k in 0..3 {
                if alive[k] {
                    v += signs[k] * f(&center.offset(nu, offsets[k]));
                }
            }
            let class =
                ((alive[0] as u8) << 2) | ((alive[1] as u8) << 1) | (alive[2] as u8);
            (v / (eps * eps), class, first_hit)
        })
        .collect();
    let values: Vec<f64> = per_path.iter().map(|(v, _, _)| *v).collect();
    let mut class_counts = [0u64; 8];
    let mut first_hit_counts = [0u64; 3];
    for (_, c, first) in &per_path {
        class_counts[*c as usize] += 1;
        if let Some(k) = first {
            first_hit_counts[*k as usize] += 1;
        }
    }
    TripleOutcome {
        quotient: Estimate::from_samples(&values),
        class_counts,
        first_hit_counts,
        eps,
    }
}

/// Exit sites binned by boundary arclength. The interval uses two bins
/// (left, right); the rectangle walks its perimeter counterclockwise from
/// the origin corner; the disk maps the exit angle to arclength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitHistogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub survived: u64,
    pub killed: u64,
}

fn boundary_param(domain: &Domain, p: &Point) -> f64 {
    match *domain {
        Domain::Interval { l } => {
            if p.get(0) < l / 2.0 {
                0.5
            } else {
                1.5
            }
        }
        Domain::Rectangle { lx, ly } => {
            let (x, y) = (p.get(0), p.get(1));
            let dists = [y, lx - x, ly - y, x];
            let side = (0..4).min_by(|&a, &b| dists[a].total_cmp(&dists[b])).unwrap();
            match side {
                0 => x,
                1 => lx + y,
                2 => lx + ly + (lx - x),
                _ => 2.0 * lx + ly + (ly - y),
            }
        }
        Domain::Disk { r } => (p.get(1).atan2(p.get(0)) + std::f64::consts::PI) * r,
    }
}

fn boundary_length(domain: &Domain) -> f64 {
    match *domain {
        Domain::Interval { .. } => 2.0,
        Domain::Rectangle { lx, ly } => 2.0 * (lx + ly),
        Domain::Disk { r } => 2.0 * std::f64::consts::PI * r,
    }
}

pub fn exit_histogram(
    domain: &Domain,
    x0: &Point,
    cfg: &PathConfig,
    seeds: &SeedPolicy,
    n_paths: usize,
    bins: usize,
) -> ExitHistogram {
    let bins = match domain {
        Domain::Interval { .. } => 2,
        _ => bins.max(1),
    };
    let length = boundary_length(domain);
    let params: Vec<Option<f64>> = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeds.rng_for_path(i);
            let r = simulate_killed_path(domain, x0, cfg, &mut rng);
            r.exit_point.map(|p| boundary_param(domain, &p))
        })
        .collect();
    let mut counts = vec![0u64; bins];
    let mut survived = 0u64;
    for p in &params {
        match p {
            Some(s) => {
                let idx = ((s / length * bins as f64) as usize).min(bins - 1);
                counts[idx] += 1;
            }
            None => survived += 1,
        }
    }
    let edges = (0..=bins).map(|i| i as f64 * length / bins as f64).collect();
    ExitHistogram {
        edges,
        counts,
        survived,
        killed: n_paths as u64 - survived,
    }
}

/// Running-maximum experiment for free 1-d Brownian motion from 0: the
/// reflection principle says P(max_{s<=t} B_s >= d) = 2 P(B_t >= d)
/// = erfc(d / (2 sqrt t)). Both sides are estimated from the same paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReflectionOutcome {
    pub crossed: Estimate,
    pub endpoint_doubled: Estimate,
    pub analytic: f64,
}

pub fn reflection_max_estimate(
    level: f64,
    cfg: &PathConfig,
    seeds: &SeedPolicy,
    n_paths: usize,
) -> ReflectionOutcome {
    assert!(level > 0.0);
    let per_path: Vec<(bool, bool)> = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeds.rng_for_path(i);
            let mut b = 0.0f64;
            let mut crossed = false;
            let mut t = 0.0;
            for _ in 0..cfg.n_steps() {
                let dt = (cfg.horizon - t).min(cfg.dt);
                let z: f64 = StandardNormal.sample(&mut rng);
                let next = b + (2.0 * dt).sqrt() * z;
                if next >= level {
                    crossed = true;
                } else if cfg.bridge_correction && !crossed {
                    let u: f64 = rng.gen();
                    if u < (-(level - b) * (level - next) / dt).exp() {
                        crossed = true;
                    }
                } else if cfg.bridge_correction {
                    // keep the draw count per step fixed once crossed
                    let _: f64 = rng.gen();
                }
                b = next;
                t += dt;
            }
            (crossed, b >= level)
        })
        .collect();
    let crossed_vals: Vec<f64> = per_path.iter().map(|&(c, _)| c as u8 as f64).collect();
    let endpoint_vals: Vec<f64> = per_path.iter().map(|&(_, e)| e as u8 as f64).collect();
    let endpoint = Estimate::from_samples(&endpoint_vals);
    ReflectionOutcome {
        crossed: Estimate::from_samples(&crossed_vals),
        endpoint_doubled: Estimate {
            mean: 2.0 * endpoint.mean,
            stderr: 2.0 * endpoint.stderr,
            n: endpoint.n,
        },
        analytic: crate::special::erfc(level / (2.0 * cfg.horizon.sqrt())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heat::{survival, Truncation};
    use crate::spectral::SpectralBasis;
    use std::f64::consts::PI;

    fn interval() -> Domain {
        Domain::interval(PI)
    }

    #[test]
    fn survival_estimate_matches_spectral_value() {
        let cfg = PathConfig::new(0.1).with_dt(2e-4);
        let est = estimate_survival(
            &interval(),
            &Point::x1(PI / 2.0),
            &cfg,
            &SeedPolicy::new(7),
            20_000,
        );
        let exact = 0.9991118664449714;
        assert!(
            est.z_score(exact) < 4.0,
            "z = {} (mean {} vs {exact})",
            est.z_score(exact),
            est.mean
        );
    }

    #[test]
    fn constant_payoff_equals_survival_indicators() {
        let cfg = PathConfig::new(0.05).with_dt(1e-3);
        let seeds = SeedPolicy::new(11);
        let d = interval();
        let x0 = Point::x1(1.0);
        let fk = feynman_kac_samples(&d, &x0, &cfg, &seeds, 2_000, |_| 1.0);
        let surv = estimate_survival(&d, &x0, &cfg, &seeds, 2_000);
        assert_eq!(Estimate::from_samples(&fk).mean.to_bits(), surv.mean.to_bits());
    }

    #[test]
    fn sine_payoff_matches_semigroup_action() {
        // sin is the lowest mode: E[sin(B_t) 1 alive] = exp(-t) sin(x0)
        let cfg = PathConfig::new(0.05).with_dt(2e-4);
        let est = feynman_kac(
            &interval(),
            &Point::x1(1.0),
            &cfg,
            &SeedPolicy::new(3),
            20_000,
            |p| p.get(0).sin(),
        );
        let exact = (-0.05f64).exp() * 1.0f64.sin();
        assert!(est.z_score(exact) < 4.0, "z = {}", est.z_score(exact));
    }

    #[test]
    fn bridge_off_overestimates_survival() {
        // close to the boundary the discrete walk misses sub-step
        // excursions; without the correction the bias is well above noise
        let d = interval();
        let x0 = Point::x1(0.3);
        let exact = 0.49766504542971744;
        let cfg = PathConfig::new(0.1).with_dt(1e-3).without_bridge();
        let est = estimate_survival(&d, &x0, &cfg, &SeedPolicy::new(5), 20_000);
        assert!(
            est.mean - exact > 4.0 * est.stderr,
            "bias {} not above noise {}",
            est.mean - exact,
            4.0 * est.stderr
        );
        // with the correction the same configuration is consistent
        let cfg_on = PathConfig::new(0.1).with_dt(1e-4);
        let est_on = estimate_survival(&d, &x0, &cfg_on, &SeedPolicy::new(5), 20_000);
        assert!(est_on.z_score(exact) < 4.0, "z = {}", est_on.z_score(exact));
    }

    #[test]
    fn coupled_triple_estimates_second_derivative() {
        let cfg = PathConfig::new(0.05).with_dt(2e-4);
        let out = coupled_triple(
            &interval(),
            &Point::x1(PI / 2.0),
            &Direction::x1(1.0),
            0.01,
            &cfg,
            &SeedPolicy::new(17),
            50_000,
            |p| p.get(0).sin(),
        );
        let exact = -(-0.05f64).exp();
        let tol = 4.0 * out.quotient.stderr + 1e-3;
        assert!(
            (out.quotient.mean - exact).abs() < tol,
            "mean {} vs {exact}, tol {tol}",
            out.quotient.mean
        );
        assert_eq!(out.class_counts.iter().sum::<u64>(), 50_000);
        // every path either keeps all three alive or names a first hitter
        let hits: u64 = out.first_hit_counts.iter().sum();
        assert_eq!(hits + out.class_counts[0b111], 50_000);
        // symmetric start: plus and minus first hits agree within 4 sigma
        let (p, m) = (out.first_hit_counts[0] as f64, out.first_hit_counts[2] as f64);
        assert!((p - m).abs() <= 4.0 * (p + m).sqrt().max(1.0), "p {p} m {m}");
    }

    #[test]
    fn triple_center_cannot_die_alone_on_the_interval() {
        // boundary distance is concave, so with one shared uniform the
        // center's bridge kill implies a neighbor's kill
        let cfg = PathConfig::new(0.1).with_dt(5e-4);
        let out = coupled_triple(
            &interval(),
            &Point::x1(0.5),
            &Direction::x1(1.0),
            0.02,
            &cfg,
            &SeedPolicy::new(23),
            10_000,
            |p| p.get(0).sin(),
        );
        assert_eq!(out.class_counts[0b101], 0);
        // this configuration genuinely kills: plenty of all-dead paths
        assert!(out.class_counts[0b000] > 1_000);
    }

    #[test]
    fn exit_sides_match_spectral_flux() {
        // P(exit left by t) = sum phi_k(x0) phi_k'(0) (1 - exp(-lambda t)) / lambda
        let d = interval();
        let x0 = Point::x1(0.3);
        let t = 0.5;
        let basis = SpectralBasis::new(d, 200).unwrap();
        let left_exact: f64 = basis
            .pairs
            .iter()
            .map(|p| {
                p.eval(&x0) * p.grad(&Point::x1(0.0))[0] * (1.0 - (-p.eigenvalue * t).exp())
                    / p.eigenvalue
            })
            .sum();
        let cfg = PathConfig::new(t).with_dt(1e-3);
        let n = 5_000usize;
        let h = exit_histogram(&d, &x0, &cfg, &SeedPolicy::new(29), n, 2);
        let p_left = h.counts[0] as f64 / n as f64;
        let se = (left_exact * (1.0 - left_exact) / n as f64).sqrt();
        assert!(
            (p_left - left_exact).abs() < 4.0 * se,
            "left fraction {p_left} vs {left_exact} (se {se})"
        );
        assert_eq!(h.counts.iter().sum::<u64>(), h.killed);
        assert_eq!(h.killed + h.survived, n as u64);
    }

    #[test]
    fn disk_exits_are_angle_symmetric_from_center() {
        let d = Domain::disk(1.0);
        let cfg = PathConfig::new(0.5).with_dt(1e-3);
        let h = exit_histogram(&d, &Point::x2(0.0, 0.0), &cfg, &SeedPolicy::new(31), 4_000, 2);
        let killed = h.killed as f64;
        assert!(killed > 2_000.0, "long horizon kills most paths");
        let half = h.counts[0] as f64 / killed;
        let se = (0.25 / killed).sqrt();
        assert!((half - 0.5).abs() < 4.0 * se, "half fraction {half}");
    }

    #[test]
    fn reflection_principle_holds() {
        let cfg = PathConfig::new(1.0).with_dt(1e-3);
        let out = reflection_max_estimate(1.0, &cfg, &SeedPolicy::new(13), 20_000);
        assert!((out.analytic - 0.47950012218695346).abs() < 1e-15);
        assert!(
            out.crossed.z_score(out.analytic) < 4.0,
            "crossing z = {}",
            out.crossed.z_score(out.analytic)
        );
        assert!(
            (out.endpoint_doubled.mean - out.analytic).abs()
                < 4.0 * out.endpoint_doubled.stderr,
            "endpoint mean {}",
            out.endpoint_doubled.mean
        );
    }

    #[test]
    fn prefix_of_longer_run_is_identical() {
        let cfg = PathConfig::new(0.02).with_dt(1e-3);
        let seeds = SeedPolicy::new(41);
        let d = interval();
        let x0 = Point::x1(1.5);
        let short = feynman_kac_samples(&d, &x0, &cfg, &seeds, 100, |p| p.get(0).cos());
        let long = feynman_kac_samples(&d, &x0, &cfg, &seeds, 4_000, |p| p.get(0).cos());
        assert_eq!(short.len(), 100);
        for i in 0..100 {
            assert_eq!(short[i].to_bits(), long[i].to_bits(), "path {i}");
        }
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let cfg = PathConfig::new(0.05).with_dt(1e-3);
        let seeds = SeedPolicy::new(53);
        let d = Domain::disk(1.0);
        let x0 = Point::x2(0.2, -0.1);
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    feynman_kac(&d, &x0, &cfg, &seeds, 4_000, |p| p.get(0) * p.get(1) + 1.0)
                })
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }

    #[test]
    fn survival_plus_exit_probability_is_one() {
        let d = interval();
        let cfg = PathConfig::new(0.1).with_dt(1e-3);
        let seeds = SeedPolicy::new(61);
        let n = 5_000;
        let h = exit_histogram(&d, &Point::x1(0.7), &cfg, &seeds, n, 2);
        assert_eq!(h.survived + h.killed, n as u64);
        // and the split agrees with the spectral survival within noise
        let basis = SpectralBasis::new(d, 200).unwrap();
        let s = survival(&basis, 0.1, &Point::x1(0.7), Truncation::default()).clamped;
        let p_surv = h.survived as f64 / n as f64;
        let se = (s * (1.0 - s) / n as f64).sqrt();
        assert!((p_surv - s).abs() < 4.0 * se, "{p_surv} vs {s}");
    }

    #[test]
    fn default_step_is_capped() {
        let c = PathConfig::new(5.0);
        assert_eq!(c.dt, 1e-4);
        let c = PathConfig::new(0.001);
        assert_eq!(c.dt, 1e-5);
        assert!(c.bridge_correction);
    }
}
