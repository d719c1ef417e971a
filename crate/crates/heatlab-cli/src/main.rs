//! `heatlab` command line: exact spectral tables, kernel and survival
//! evaluation, killed-diffusion Monte Carlo, and the verification suite.
//!
//! Exit codes: 0 when every requested check passes, 1 when any check
//! fails, 2 on configuration or usage errors.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use heatlab_core::fields::suite_basis_count;
use heatlab_core::heat::{free_kernel, images_kernel_1d, images_mass_1d};
use heatlab_core::report::fmt_f64;
use heatlab_core::spectral::{eigen_csv_header, eigen_csv_row};
use heatlab_core::stoch::estimate_survival;
use heatlab_core::verify::suite::{summarize_thm1, thm2_summary};
use heatlab_core::verify::thm1::{
    default_sweep_directions, default_sweep_fields, default_sweep_points, default_sweep_times,
};
use heatlab_core::verify::{
    bochner_check, check_outcomes_csv, comparison_bound_check, distance_bound_check,
    monotonicity_checks, semigroup_eigen_check, sperb_boundary_check, tail_bound_check,
    thm1_cells_csv, thm1_sweep, thm2_ratio, thm2_reports_csv,
};
use heatlab_core::{
    enumerate_eigenpairs, heat_kernel, run_suite, survival, CheckOutcome, Domain, Estimate,
    PathConfig, Point, SeedPolicy, SpectralBasis, SuiteConfig, Thm1Context, Thm1Report,
    Truncation,
};

use config::{load_config, parse_float, write_echo, ConfigError, RunConfig};

#[derive(Parser)]
#[command(
    name = "heatlab",
    version,
    about = "Dirichlet heat semigroup laboratory: exact spectra, killed diffusions, and inequality checks on model domains"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate Dirichlet eigenpairs as CSV
    Eigen(EigenArgs),
    /// Evaluate the Dirichlet heat kernel at one space-time point
    Kernel(KernelArgs),
    /// Exact survival probability of killed Brownian motion
    Survival(SurvivalArgs),
    /// Check the semigroup action on projected eigenfunctions
    Semigroup(SemigroupArgs),
    /// Monte Carlo survival estimate against the exact value
    Simulate(SimulateArgs),
    /// Derivative bound sweep with the default grids
    VerifyThm1(VerifyThm1Args),
    /// Hessian-to-gradient ratios across an eigenfunction family
    VerifyThm2(VerifyThm2Args),
    /// Deterministic identity battery
    VerifyIdentities(IdentityArgs),
    /// Derivative bound sweep with custom orders and horizons
    Sweep(SweepArgs),
    /// Full verification suite with JSON and CSV reports
    Report(ReportArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum DomainKind {
    Interval,
    Rectangle,
    Disk,
}

#[derive(Args, Clone)]
struct DomainArgs {
    /// Domain shape; commands that accept several run all three when omitted
    #[arg(long, value_enum)]
    domain: Option<DomainKind>,
    /// Interval length
    #[arg(long, value_parser = parse_float, default_value = "pi")]
    l: f64,
    /// Rectangle width
    #[arg(long, value_parser = parse_float, default_value = "pi")]
    lx: f64,
    /// Rectangle height
    #[arg(long, value_parser = parse_float, default_value = "pi")]
    ly: f64,
    /// Disk radius
    #[arg(long, value_parser = parse_float, default_value = "1")]
    r: f64,
}

impl DomainArgs {
    fn build_kind(&self, kind: DomainKind) -> Result<Domain, ConfigError> {
        let pos = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(ConfigError(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        Ok(match kind {
            DomainKind::Interval => Domain::interval(pos("--l", self.l)?),
            DomainKind::Rectangle => {
                Domain::rectangle(pos("--lx", self.lx)?, pos("--ly", self.ly)?)
            }
            DomainKind::Disk => Domain::disk(pos("--r", self.r)?),
        })
    }

    fn build_one(&self) -> Result<Domain, ConfigError> {
        self.build_kind(self.domain.unwrap_or(DomainKind::Interval))
    }

    fn build_list(&self) -> Result<Vec<Domain>, ConfigError> {
        match self.domain {
            Some(k) => Ok(vec![self.build_kind(k)?]),
            None => [DomainKind::Interval, DomainKind::Rectangle, DomainKind::Disk]
                .iter()
                .map(|&k| self.build_kind(k))
                .collect(),
        }
    }
}

#[derive(Args)]
struct EigenArgs {
    #[command(flatten)]
    dom: DomainArgs,
    /// Number of eigenpairs, ordered by eigenvalue
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// Write the table here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct KernelArgs {
    #[command(flatten)]
    dom: DomainArgs,
    /// Time, accepts "pi"/"e"
    #[arg(long, value_parser = parse_float)]
    t: f64,
    /// Source point, comma-separated coordinates
    #[arg(long)]
    x: String,
    /// Target point, comma-separated coordinates
    #[arg(long)]
    y: String,
}

#[derive(Args)]
struct SurvivalArgs {
    #[command(flatten)]
    dom: DomainArgs,
    #[arg(long, value_parser = parse_float)]
    t: f64,
    /// Start point, comma-separated coordinates
    #[arg(long)]
    x: String,
}

#[derive(Args)]
struct SemigroupArgs {
    #[command(flatten)]
    dom: DomainArgs,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    dom: DomainArgs,
    /// Start point; defaults to the domain center
    #[arg(long)]
    x: Option<String>,
    #[arg(long, value_parser = parse_float)]
    t: Option<f64>,
    /// Euler step
    #[arg(long, value_parser = parse_float)]
    dt: Option<f64>,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Disable the Brownian bridge exit correction
    #[arg(long)]
    no_bridge: bool,
    /// JSON config file; command-line flags win on conflict
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write simulate.json and the effective config here
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyThm1Args {
    #[command(flatten)]
    dom: DomainArgs,
    /// Write cell tables here
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyThm2Args {
    #[command(flatten)]
    dom: DomainArgs,
    /// Family size; defaults to 100 (interval), 30 (rectangle), 25 (disk)
    #[arg(long)]
    count: Option<usize>,
    /// Largest acceptable log-log slope magnitude off the interval
    #[arg(long, value_parser = parse_float, default_value = "0.1")]
    max_slope: f64,
    /// Write the ratio table here
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IdentityArgs {
    #[command(flatten)]
    dom: DomainArgs,
    /// Seed for the sampled interior points
    #[arg(long)]
    seed: Option<u64>,
    /// Write identity_checks.csv here
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    dom: DomainArgs,
    /// Comma-separated derivative orders; an empty string means no cells
    #[arg(long)]
    orders: Option<String>,
    /// Comma-separated horizons, each accepts "pi"/"e"
    #[arg(long)]
    times: Option<String>,
    /// JSON config file; command-line flags win on conflict
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write cell tables and the effective config here
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// JSON config file; command-line flags win on conflict
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, default heatlab_report
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Path count for every Monte Carlo experiment
    #[arg(long)]
    paths: Option<usize>,
    /// Largest mode index in the growth fit
    #[arg(long)]
    growth_n_max: Option<u32>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let clean = matches!(
                e.kind(),
                ErrorKind::DisplayHelp
                    | ErrorKind::DisplayVersion
                    | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            );
            let _ = e.print();
            return if clean { ExitCode::SUCCESS } else { ExitCode::from(2) };
        }
    };
    if let Err(e) = init_thread_pool() {
        eprintln!("config error: {e}");
        return ExitCode::from(2);
    }
    match run(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("config error: {e}");
            eprintln!("run `heatlab --help` for usage");
            ExitCode::from(2)
        }
    }
}

/// HEATLAB_THREADS caps the worker pool. Results never depend on it; only
/// wall time does.
fn init_thread_pool() -> Result<(), ConfigError> {
    let Ok(v) = std::env::var("HEATLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| {
        ConfigError(format!("HEATLAB_THREADS must be a positive integer, got {v:?}"))
    })?;
    if n == 0 {
        return Err(ConfigError(
            "HEATLAB_THREADS must be a positive integer, got 0".to_string(),
        ));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ConfigError(format!("cannot size the thread pool: {e}")))
}

fn run(cmd: Cmd) -> Result<bool, ConfigError> {
    match cmd {
        Cmd::Eigen(a) => cmd_eigen(a),
        Cmd::Kernel(a) => cmd_kernel(a),
        Cmd::Survival(a) => cmd_survival(a),
        Cmd::Semigroup(a) => cmd_semigroup(a),
        Cmd::Simulate(a) => cmd_simulate(a),
        Cmd::VerifyThm1(a) => cmd_verify_thm1(a),
        Cmd::VerifyThm2(a) => cmd_verify_thm2(a),
        Cmd::VerifyIdentities(a) => cmd_verify_identities(a),
        Cmd::Sweep(a) => cmd_sweep(a),
        Cmd::Report(a) => cmd_report(a),
    }
}

fn parse_point(s: &str, d: &Domain) -> Result<Point, ConfigError> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|p| parse_float(p).map_err(ConfigError))
        .collect::<Result<_, _>>()?;
    match (d.dim(), vals.as_slice()) {
        (1, [x]) => Ok(Point::x1(*x)),
        (2, [x, y]) => Ok(Point::x2(*x, *y)),
        (n, v) => Err(ConfigError(format!(
            "point {s:?} has {} coordinates, the {} needs {n}",
            v.len(),
            d.kind_name()
        ))),
    }
}

fn center(d: &Domain) -> Point {
    match d {
        Domain::Interval { l } => Point::x1(l / 2.0),
        Domain::Rectangle { lx, ly } => Point::x2(lx / 2.0, ly / 2.0),
        Domain::Disk { .. } => Point::x2(0.0, 0.0),
    }
}

fn require_in_closure(d: &Domain, x: &Point, what: &str) -> Result<(), ConfigError> {
    if d.in_closure(x) {
        Ok(())
    } else {
        Err(ConfigError(format!(
            "{what} lies outside the closed {}",
            d.kind_name()
        )))
    }
}

fn build_basis(d: &Domain) -> Result<SpectralBasis, ConfigError> {
    SpectralBasis::new(*d, suite_basis_count(d))
        .map_err(|e| ConfigError(format!("spectral basis: {e}")))
}

fn write_file(path: &Path, body: &str) -> Result<(), ConfigError> {
    fs::write(path, body).map_err(|e| ConfigError(format!("cannot write {}: {e}", path.display())))
}

fn make_dir(dir: &Path) -> Result<(), ConfigError> {
    fs::create_dir_all(dir)
        .map_err(|e| ConfigError(format!("cannot create {}: {e}", dir.display())))
}

fn load_optional(path: Option<&Path>) -> Result<RunConfig, ConfigError> {
    match path {
        Some(p) => load_config(p),
        None => Ok(RunConfig::default()),
    }
}

fn cmd_eigen(a: EigenArgs) -> Result<bool, ConfigError> {
    let d = a.dom.build_one()?;
    let pairs = enumerate_eigenpairs(&d, a.count)
        .map_err(|e| ConfigError(format!("eigen enumeration: {e}")))?;
    let mut out = String::from(eigen_csv_header());
    out.push('\n');
    for p in &pairs {
        out.push_str(&eigen_csv_row(p));
        out.push('\n');
    }
    match &a.out {
        Some(path) => {
            write_file(path, &out)?;
            println!("wrote {} rows to {}", pairs.len(), path.display());
        }
        None => print!("{out}"),
    }
    Ok(true)
}

fn cmd_kernel(a: KernelArgs) -> Result<bool, ConfigError> {
    let d = a.dom.build_one()?;
    if !(a.t > 0.0 && a.t.is_finite()) {
        return Err(ConfigError(format!("--t must be positive, got {}", a.t)));
    }
    let x = parse_point(&a.x, &d)?;
    let y = parse_point(&a.y, &d)?;
    require_in_closure(&d, &x, "--x")?;
    require_in_closure(&d, &y, "--y")?;
    let basis = build_basis(&d)?;
    let kv = heat_kernel(&basis, a.t, &x, &y, Truncation::default());
    println!("spectral {}", fmt_f64(kv.clamped));
    println!("terms {}", kv.terms);
    println!("free {}", fmt_f64(free_kernel(d.dim(), a.t, &x, &y)));
    if let Domain::Interval { l } = d {
        println!("images {}", fmt_f64(images_kernel_1d(l, a.t, x.get(0), y.get(0))));
    }
    Ok(true)
}

fn cmd_survival(a: SurvivalArgs) -> Result<bool, ConfigError> {
    let d = a.dom.build_one()?;
    if !(a.t > 0.0 && a.t.is_finite()) {
        return Err(ConfigError(format!("--t must be positive, got {}", a.t)));
    }
    let x = parse_point(&a.x, &d)?;
    require_in_closure(&d, &x, "--x")?;
    let basis = build_basis(&d)?;
    let sv = survival(&basis, a.t, &x, Truncation::default());
    println!("spectral {}", fmt_f64(sv.clamped));
    println!("terms {}", sv.terms);
    if let Domain::Interval { l } = d {
        println!("images {}", fmt_f64(images_mass_1d(l, a.t, x.get(0), 0.0, l)));
    }
    Ok(true)
}

fn cmd_semigroup(a: SemigroupArgs) -> Result<bool, ConfigError> {
    let d = a.dom.build_one()?;
    let c = semigroup_eigen_check(&d).map_err(|e| ConfigError(format!("spectral basis: {e}")))?;
    println!("{}", c.summary_line());
    Ok(c.pass)
}

#[derive(Serialize)]
struct SimulateSummary {
    domain: String,
    x0: Point,
    t: f64,
    dt: f64,
    paths: usize,
    master_seed: u64,
    bridge: bool,
    estimate: Estimate,
    spectral_survival: f64,
    abs_diff: f64,
}

fn cmd_simulate(a: SimulateArgs) -> Result<bool, ConfigError> {
    let d = a.dom.build_one()?;
    let file_cfg = load_optional(a.config.as_deref())?;
    let cli_cfg = RunConfig {
        master_seed: a.seed,
        paths: a.paths,
        t: a.t,
        dt: a.dt,
        bridge: if a.no_bridge { Some(false) } else { None },
        out_dir: a.out_dir.clone(),
        ..RunConfig::default()
    };
    let merged = cli_cfg.or(file_cfg);
    let t = merged.t.unwrap_or(0.1);
    let resolved = RunConfig {
        master_seed: Some(merged.master_seed.unwrap_or(42)),
        paths: Some(merged.paths.unwrap_or(100_000)),
        t: Some(t),
        dt: Some(merged.dt.unwrap_or((t / 100.0).min(1e-4))),
        bridge: Some(merged.bridge.unwrap_or(true)),
        out_dir: merged.out_dir.clone(),
        ..RunConfig::default()
    };
    resolved.validate()?;

    let x0 = match &a.x {
        Some(s) => parse_point(s, &d)?,
        None => center(&d),
    };
    if !d.contains(&x0) {
        return Err(ConfigError(format!(
            "start point must be strictly inside the {}",
            d.kind_name()
        )));
    }

    let mut path_cfg = PathConfig::new(t).with_dt(resolved.dt.unwrap());
    if resolved.bridge == Some(false) {
        path_cfg = path_cfg.without_bridge();
    }
    let seeds = SeedPolicy::new(resolved.master_seed.unwrap());
    let est = estimate_survival(&d, &x0, &path_cfg, &seeds, resolved.paths.unwrap());
    let basis = build_basis(&d)?;
    let exact = survival(&basis, t, &x0, Truncation::default()).clamped;

    let summary = SimulateSummary {
        domain: d.kind_name().to_string(),
        x0,
        t,
        dt: resolved.dt.unwrap(),
        paths: resolved.paths.unwrap(),
        master_seed: resolved.master_seed.unwrap(),
        bridge: resolved.bridge.unwrap(),
        estimate: est,
        spectral_survival: exact,
        abs_diff: (est.mean - exact).abs(),
    };
    let body = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
    match &resolved.out_dir {
        Some(dir) => {
            make_dir(dir)?;
            write_echo(&resolved, dir)?;
            let path = dir.join("simulate.json");
            write_file(&path, &body)?;
            println!(
                "survival {} +- {} against exact {}, wrote {}",
                fmt_f64(est.mean),
                fmt_f64(est.stderr),
                fmt_f64(exact),
                path.display()
            );
        }
        None => print!("{body}"),
    }
    Ok(true)
}

fn cmd_verify_thm1(a: VerifyThm1Args) -> Result<bool, ConfigError> {
    let d = a.dom.build_one()?;
    let ctx = Thm1Context::new(d).map_err(|e| ConfigError(format!("spectral basis: {e}")))?;
    let cells = thm1_sweep(
        &ctx,
        &default_sweep_fields(&d),
        &[1, 2, 3],
        &default_sweep_points(&d),
        &default_sweep_directions(&d),
        &default_sweep_times(),
    );
    let checks = summarize_thm1(d.kind_name(), &cells);
    for c in &checks {
        println!("{}", c.summary_line());
    }
    write_cells(a.out_dir.as_deref(), &cells)?;
    Ok(cells.iter().all(|c| c.pass))
}

fn write_cells(dir: Option<&Path>, cells: &[Thm1Report]) -> Result<(), ConfigError> {
    let Some(dir) = dir else {
        return Ok(());
    };
    make_dir(dir)?;
    write_file(&dir.join("thm1_cells.csv"), &thm1_cells_csv(cells))?;
    let json = serde_json::to_string_pretty(cells).expect("cells serialize") + "\n";
    write_file(&dir.join("thm1_cells.json"), &json)?;
    Ok(())
}

fn cmd_verify_thm2(a: VerifyThm2Args) -> Result<bool, ConfigError> {
    let d = a.dom.build_one()?;
    let count = a.count.unwrap_or(match d {
        Domain::Interval { .. } => 100,
        Domain::Rectangle { .. } => 30,
        Domain::Disk { .. } => 25,
    });
    let rep = thm2_ratio(&d, count).map_err(|e| ConfigError(format!("eigen family: {e}")))?;
    let outcome = if matches!(d, Domain::Interval { .. }) {
        thm2_summary(&rep)
    } else {
        CheckOutcome::from_residual(
            &format!("thm2_flat_{}", rep.domain),
            rep.slope.abs(),
            a.max_slope,
            rep.rows.len(),
        )
        .with_detail(format!("log-log slope {}", fmt_f64(rep.slope)))
    };
    println!("{}", outcome.summary_line());
    if let Some(path) = &a.out {
        write_file(path, &thm2_reports_csv(std::slice::from_ref(&rep)))?;
    }
    Ok(outcome.pass)
}

fn cmd_verify_identities(a: IdentityArgs) -> Result<bool, ConfigError> {
    let ds = a.dom.build_list()?;
    let seed = a.seed.unwrap_or(42);
    let spectral_err = |e| ConfigError(format!("spectral basis: {e}"));
    let mut checks: Vec<CheckOutcome> = Vec::new();
    for (di, d) in ds.iter().enumerate() {
        checks.push(semigroup_eigen_check(d).map_err(spectral_err)?);
        checks.push(sperb_boundary_check(d, 10, 64).map_err(spectral_err)?);
        checks.push(bochner_check(d, 5, 50, seed.wrapping_add(1 + di as u64)).map_err(spectral_err)?);
        let basis = build_basis(d)?;
        checks.extend(monotonicity_checks(&basis));
        let n_family = if d.dim() == 1 { 8 } else { 6 };
        checks.push(distance_bound_check(d, n_family, 1e-3).map_err(spectral_err)?);
    }
    checks.push(tail_bound_check());
    checks.push(comparison_bound_check());
    for c in &checks {
        println!("{}", c.summary_line());
    }
    if let Some(dir) = &a.out_dir {
        make_dir(dir)?;
        write_file(&dir.join("identity_checks.csv"), &check_outcomes_csv(&checks))?;
    }
    Ok(checks.iter().all(|c| c.pass))
}

fn parse_order_list(s: &str) -> Result<Vec<u8>, ConfigError> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<u8>()
                .map_err(|_| ConfigError(format!("bad order {p:?} in --orders")))
        })
        .collect()
}

fn parse_time_list(s: &str) -> Result<Vec<f64>, ConfigError> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| parse_float(p).map_err(ConfigError))
        .collect()
}

fn cmd_sweep(a: SweepArgs) -> Result<bool, ConfigError> {
    let file_cfg = load_optional(a.config.as_deref())?;
    let cli_cfg = RunConfig {
        orders: a.orders.as_deref().map(parse_order_list).transpose()?,
        times: a.times.as_deref().map(parse_time_list).transpose()?,
        out_dir: a.out_dir.clone(),
        ..RunConfig::default()
    };
    let merged = cli_cfg.or(file_cfg);
    let resolved = RunConfig {
        orders: Some(merged.orders.unwrap_or_else(|| vec![1, 2, 3])),
        times: Some(merged.times.unwrap_or_else(default_sweep_times)),
        out_dir: merged.out_dir.clone(),
        ..RunConfig::default()
    };
    resolved.validate()?;
    let orders = resolved.orders.clone().unwrap();
    let times = resolved.times.clone().unwrap();

    let ds = a.dom.build_list()?;
    let mut cells: Vec<Thm1Report> = Vec::new();
    let mut checks: Vec<CheckOutcome> = Vec::new();
    if !orders.is_empty() && !times.is_empty() {
        for d in &ds {
            let ctx =
                Thm1Context::new(*d).map_err(|e| ConfigError(format!("spectral basis: {e}")))?;
            let cs = thm1_sweep(
                &ctx,
                &default_sweep_fields(d),
                &orders,
                &default_sweep_points(d),
                &default_sweep_directions(d),
                &times,
            );
            checks.extend(summarize_thm1(d.kind_name(), &cs));
            cells.extend(cs);
        }
    }
    for c in &checks {
        println!("{}", c.summary_line());
    }
    println!("sweep: {} cells", cells.len());
    if let Some(dir) = &resolved.out_dir {
        make_dir(dir)?;
        write_echo(&resolved, dir)?;
        write_cells(Some(dir), &cells)?;
    }
    Ok(cells.iter().all(|c| c.pass))
}

fn cmd_report(a: ReportArgs) -> Result<bool, ConfigError> {
    let file_cfg = load_optional(a.config.as_deref())?;
    let cli_cfg = RunConfig {
        master_seed: a.seed,
        paths: a.paths,
        growth_n_max: a.growth_n_max,
        out_dir: a.out_dir.clone(),
        ..RunConfig::default()
    };
    let merged = cli_cfg.or(file_cfg);
    let resolved = RunConfig {
        master_seed: Some(merged.master_seed.unwrap_or(42)),
        paths: Some(merged.paths.unwrap_or(100_000)),
        growth_n_max: Some(merged.growth_n_max.unwrap_or(50)),
        out_dir: Some(
            merged
                .out_dir
                .clone()
                .unwrap_or_else(|| PathBuf::from("heatlab_report")),
        ),
        ..RunConfig::default()
    };
    resolved.validate()?;
    let paths = resolved.paths.unwrap();
    let suite_cfg = SuiteConfig {
        master_seed: resolved.master_seed.unwrap(),
        mc_survival_paths: paths,
        mc_triple_paths: paths,
        mc_reflection_paths: paths,
        growth_n_max: resolved.growth_n_max.unwrap(),
    };
    let dir = resolved.out_dir.clone().unwrap();
    make_dir(&dir)?;
    write_echo(&resolved, &dir)?;

    let rep = run_suite(&suite_cfg);
    write_file(&dir.join("suite.json"), &(rep.to_json() + "\n"))?;
    write_file(&dir.join("checks.csv"), &rep.checks_csv())?;
    write_file(&dir.join("thm1_cells.csv"), &rep.thm1_csv())?;
    write_file(&dir.join("thm2.csv"), &rep.thm2_csv())?;
    for line in rep.summary_lines() {
        println!("{line}");
    }
    let verdict = if rep.all_pass() { "PASS" } else { "FAIL" };
    println!(
        "report: {} checks, {} cells, {verdict}",
        rep.checks.len(),
        rep.thm1_cells.len()
    );
    println!("wrote {}", dir.join("suite.json").display());
    Ok(rep.all_pass())
}
