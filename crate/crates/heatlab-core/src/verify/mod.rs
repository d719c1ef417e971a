//! Statement-level harness. Each check reduces one claimed inequality or
//! identity to a named residual with an explicit tolerance, so a run is a
//! list of (name, residual, tolerance, verdict) rows and nothing is graded
//! by eye.

pub mod growth;
pub mod identities;
pub mod lines;
pub mod suite;
pub mod thm1;
pub mod thm2;

pub use growth::{growth_exponent_fit, GrowthFit};
pub use identities::{
    bochner_check, comparison_bound_check, distance_bound_check, monotonicity_checks,
    partition_check, semigroup_eigen_check, sperb_boundary_check, superlevel_mass,
    tail_bound_check, SuperlevelReport,
};
pub use lines::{line_fraction_scan, LineScan};
pub use suite::{
    check_outcomes_csv, run_suite, thm1_cells_csv, thm2_reports_csv, SuiteConfig, SuiteReport,
};
pub use thm1::{thm1_sweep, CellStatus, Thm1Config, Thm1Context, Thm1Report};
pub use thm2::{thm2_ratio, Thm2Report, Thm2Row};

/// Least-squares slope of ys against xs.
pub(crate) fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2);
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::ls_slope;

    #[test]
    fn slope_recovers_affine_data() {
        let xs: Vec<f64> = (0..20).map(|i| 0.3 * i as f64 - 2.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.75 * x + 0.4).collect();
        assert!((ls_slope(&xs, &ys) - 1.75).abs() < 1e-12);
    }
}
