//! Hessian growth for Dirichlet eigenfunctions: the claim is that the
//! worst second derivative grows like sqrt(lambda) times the worst
//! gradient, so the ratio hess_sup / (sqrt(lambda) grad_sup) should be
//! flat in lambda. Each family reports its rows and the log-log slope of
//! the ratio, which is the quantity asserted on: a clean power law shows
//! up as a slope near zero.

use serde::Serialize;

use crate::domain::{Domain, Point};
use crate::spectral::{enumerate_eigenpairs, EigenIndex, EigenPair, Parity, SpectralError};
use crate::verify::ls_slope;

#[derive(Debug, Clone, Serialize)]
pub struct Thm2Row {
    pub index: EigenIndex,
    pub lambda: f64,
    /// Sup of the Hessian operator norm over the sample set.
    pub hess_sup: f64,
    /// Sup of the gradient norm over the sample set.
    pub grad_sup: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Thm2Report {
    pub domain: String,
    pub rows: Vec<Thm2Row>,
    /// Least-squares slope of log ratio against log lambda.
    pub slope: f64,
}

fn row_from_sups(index: EigenIndex, lambda: f64, hess_sup: f64, grad_sup: f64) -> Thm2Row {
    Thm2Row { index, lambda, hess_sup, grad_sup, ratio: hess_sup / (lambda.sqrt() * grad_sup) }
}

fn sup_over<'a, I: Iterator<Item = &'a Point>>(pair: &EigenPair, pts: I) -> (f64, f64) {
    let mut hess = 0.0f64;
    let mut grad = 0.0f64;
    for x in pts {
        let e = pair.eval_all(x);
        hess = hess.max(e.hess.opnorm());
        grad = grad.max((e.grad[0] * e.grad[0] + e.grad[1] * e.grad[1]).sqrt());
    }
    (hess, grad)
}

/// Ratio table for the first `count` members of the family: closed-form
/// sups on the interval (both extremes sit on the boundary, so grids would
/// only blur an exact identity), grid plus boundary sups on the rectangle,
/// and a radial profile for the purely radial disk branch, whose Hessian
/// extremes lie on a diameter.
pub fn thm2_ratio(d: &Domain, count: usize) -> Result<Thm2Report, SpectralError> {
    let rows = match d {
        Domain::Interval { .. } => enumerate_eigenpairs(d, count)?
            .into_iter()
            .map(|p| {
                let lam = p.eigenvalue;
                row_from_sups(p.index, lam, lam * p.norm_const, lam.sqrt() * p.norm_const)
            })
            .collect(),
        Domain::Rectangle { .. } => {
            let interior = d.interior_grid(200);
            let boundary: Vec<Point> =
                d.boundary_sample(800).into_iter().map(|b| b.point).collect();
            enumerate_eigenpairs(d, count)?
                .into_iter()
                .map(|p| {
                    let (h, g) = sup_over(&p, interior.iter().chain(&boundary));
                    row_from_sups(p.index, p.eigenvalue, h, g)
                })
                .collect()
        }
        Domain::Disk { r } => (1..=count as u32)
            .map(|n| {
                let p = EigenPair::disk(*r, 0, n, Parity::Cos)?;
                let radial: Vec<Point> =
                    (0..=2000).map(|i| Point::x2(r * i as f64 / 2000.0, 0.0)).collect();
                let (h, g) = sup_over(&p, radial.iter());
                Ok(row_from_sups(p.index, p.eigenvalue, h, g))
            })
            .collect::<Result<Vec<_>, SpectralError>>()?,
    };
    let xs: Vec<f64> = rows.iter().map(|r| r.lambda.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.ratio.ln()).collect();
    Ok(Thm2Report { domain: d.kind_name().to_string(), slope: ls_slope(&xs, &ys), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn interval_ratio_is_identically_one() {
        let rep = thm2_ratio(&Domain::interval(PI), 100).unwrap();
        assert_eq!(rep.rows.len(), 100);
        for row in &rep.rows {
            assert!((row.ratio - 1.0).abs() <= 1e-8, "ratio = {}", row.ratio);
        }
        assert!(rep.slope.abs() < 1e-8);
    }

    #[test]
    fn rectangle_ratios_are_flat_in_lambda() {
        let rep = thm2_ratio(&Domain::rectangle(PI, PI), 30).unwrap();
        for row in &rep.rows {
            assert!(row.ratio > 0.5 && row.ratio < 2.0, "ratio = {}", row.ratio);
        }
        assert!(rep.slope.abs() <= 0.1, "slope = {}", rep.slope);
    }

    #[test]
    fn disk_radial_branch_is_flat_in_lambda() {
        let rep = thm2_ratio(&Domain::disk(1.0), 25).unwrap();
        for row in &rep.rows {
            assert!(row.ratio > 0.4 && row.ratio < 2.5, "ratio = {}", row.ratio);
        }
        assert!(rep.slope.abs() <= 0.1, "slope = {}", rep.slope);
    }
}
