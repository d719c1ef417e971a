//! Named initial data for the inequality harness. A `FieldSpec` is a
//! serializable description that can be instantiated as a `SpectralField`
//! on any of the model domains, and the bump variant carries closed-form
//! derivatives for cross-checking the projected series.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{Direction, Domain, Point};
use crate::heat::SpectralField;
use crate::spectral::SpectralBasis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec {
    /// The eigenfunction at `position` in the enumerated basis.
    Eigen { position: usize },
    /// Polynomial bump vanishing on the boundary: x (L - x) on the
    /// interval, x (Lx - x) y (Ly - y) on the rectangle, R^2 - r^2 on
    /// the disk.
    Bubble,
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Eigen { position } => write!(f, "eigen[{position}]"),
            FieldSpec::Bubble => write!(f, "bubble"),
        }
    }
}

/// Quadrature order that resolves products of basis modes for the basis
/// sizes used by the verification suite.
pub fn default_quad_order(d: &Domain) -> usize {
    match d {
        Domain::Interval { .. } => 256,
        Domain::Rectangle { .. } => 64,
        Domain::Disk { .. } => 64,
    }
}

/// Basis size used by the verification suite: large enough that the
/// kernel tail exp(-lambda_max t) is negligible for t >= 0.02.
pub fn suite_basis_count(d: &Domain) -> usize {
    match d {
        Domain::Interval { .. } => 80,
        Domain::Rectangle { .. } => 800,
        Domain::Disk { .. } => 250,
    }
}

impl FieldSpec {
    pub fn instantiate(&self, basis: Arc<SpectralBasis>) -> SpectralField {
        match *self {
            FieldSpec::Eigen { position } => {
                assert!(position < basis.len(), "eigen position outside basis");
                SpectralField::eigenfunction(basis, position)
            }
            FieldSpec::Bubble => {
                let order = default_quad_order(&basis.domain);
                let d = basis.domain;
                SpectralField::project(basis, |p| bubble_value(&d, p), order)
            }
        }
    }

    /// Closed-form value of the underlying function (not the series).
    pub fn closed_value(&self, basis: &SpectralBasis, p: &Point) -> f64 {
        match *self {
            FieldSpec::Eigen { position } => basis.pairs[position].eval(p),
            FieldSpec::Bubble => bubble_value(&basis.domain, p),
        }
    }

    /// Closed-form directional derivative where one exists: all orders for
    /// the bump, orders 1 and 2 for an eigenfunction.
    pub fn closed_deriv(
        &self,
        basis: &SpectralBasis,
        p: &Point,
        nu: &Direction,
        order: u8,
    ) -> Option<f64> {
        match *self {
            FieldSpec::Eigen { position } => match order {
                1 => Some(basis.pairs[position].grad_dir(p, nu)),
                2 => Some(basis.pairs[position].hess_dir(p, nu)),
                _ => None,
            },
            FieldSpec::Bubble => Some(bubble_deriv(&basis.domain, p, nu, order)),
        }
    }
}

pub fn bubble_value(d: &Domain, p: &Point) -> f64 {
    match *d {
        Domain::Interval { l } => p.get(0) * (l - p.get(0)),
        Domain::Rectangle { lx, ly } => {
            p.get(0) * (lx - p.get(0)) * p.get(1) * (ly - p.get(1))
        }
        Domain::Disk { r } => r * r - p.get(0) * p.get(0) - p.get(1) * p.get(1),
    }
}

// derivative of x (a - x), exactly zero beyond order 2
fn quad_factor(x: f64, a: f64, order: u8) -> f64 {
    match order {
        0 => x * (a - x),
        1 => a - 2.0 * x,
        2 => -2.0,
        _ => 0.0,
    }
}

fn binomial(k: u8, j: u8) -> f64 {
    let (mut num, mut den) = (1.0, 1.0);
    for i in 0..j {
        num *= (k - i) as f64;
        den *= (i + 1) as f64;
    }
    num / den
}

/// Exact k-th directional derivative of the bump along `nu`.
pub fn bubble_deriv(d: &Domain, p: &Point, nu: &Direction, order: u8) -> f64 {
    assert!(order >= 1);
    match *d {
        Domain::Interval { l } => nu.get(0).powi(order as i32) * quad_factor(p.get(0), l, order),
        Domain::Rectangle { lx, ly } => {
            let mut s = 0.0;
            for j in 0..=order {
                s += binomial(order, j)
                    * nu.get(0).powi(j as i32)
                    * nu.get(1).powi((order - j) as i32)
                    * quad_factor(p.get(0), lx, j)
                    * quad_factor(p.get(1), ly, order - j);
            }
            s
        }
        Domain::Disk { .. } => match order {
            1 => -2.0 * (p.get(0) * nu.get(0) + p.get(1) * nu.get(1)),
            2 => -2.0,
            _ => 0.0,
        },
    }
}
