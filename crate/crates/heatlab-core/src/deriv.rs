//! Central finite-difference stencils for derivative orders 1..=4, with a
//! roundoff guard that refuses steps small enough for cancellation noise to
//! dominate the truncation error.

use thiserror::Error;

use crate::domain::{Direction, Point};

#[derive(Debug, Error)]
pub enum DerivError {
    #[error("unsupported derivative order {0} (supported: 1..=4)")]
    UnsupportedOrder(u8),
    #[error("step {eps:.3e} is below the roundoff floor {floor:.3e} for order {order}")]
    StepBelowRoundoffFloor { eps: f64, floor: f64, order: u8 },
    #[error("step must be positive and finite, got {0}")]
    BadStep(f64),
}

/// Half-width of the order-k central stencil in units of the step.
pub fn reach(order: u8) -> usize {
    if order <= 2 {
        1
    } else {
        2
    }
}

/// Step below which roundoff is expected to dominate: the total error model
/// c1 eps^2 + c2 u / eps^k is minimized near u^(1/(k+2)) * scale.
pub fn roundoff_floor(order: u8, scale: f64) -> f64 {
    f64::EPSILON.powf(1.0 / (order as f64 + 2.0)) * scale
}

/// Recommended step per order for a domain of the given diameter. Each sits
/// a little above the roundoff floor, on the truncation-dominated side.
pub fn default_step(order: u8, diameter: f64) -> f64 {
    let rel = match order {
        1 => 1e-6,
        2 => 1e-4,
        3 => 1e-3,
        _ => 3e-3,
    };
    rel * diameter
}

/// Central stencil: symmetric offsets (integer multiples of the step) and
/// weights such that sum w_i f(x + o_i eps) / eps^k approximates f^(k)(x)
/// with O(eps^2) truncation error.
#[derive(Debug, Clone)]
pub struct Stencil {
    pub order: u8,
    pub offsets: &'static [i32],
    pub weights: &'static [f64],
}

impl Stencil {
    pub fn central(order: u8) -> Result<Self, DerivError> {
        let (offsets, weights): (&'static [i32], &'static [f64]) = match order {
            1 => (&[-1, 1], &[-0.5, 0.5]),
            2 => (&[-1, 0, 1], &[1.0, -2.0, 1.0]),
            3 => (&[-2, -1, 1, 2], &[-0.5, 1.0, -1.0, 0.5]),
            4 => (&[-2, -1, 0, 1, 2], &[1.0, -4.0, 6.0, -4.0, 1.0]),
            _ => return Err(DerivError::UnsupportedOrder(order)),
        };
        Ok(Stencil { order, offsets, weights })
    }

    pub fn reach(&self) -> usize {
        reach(self.order)
    }

    /// Combines precomputed samples f(x + o_i eps), in offset order.
    pub fn combine(&self, values: &[f64], eps: f64) -> f64 {
        assert_eq!(values.len(), self.weights.len());
        let s: f64 = self
            .weights
            .iter()
            .zip(values)
            .map(|(w, v)| w * v)
            .sum();
        s / eps.powi(self.order as i32)
    }
}

fn check_step(order: u8, eps: f64, scale: f64) -> Result<(), DerivError> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(DerivError::BadStep(eps));
    }
    let floor = roundoff_floor(order, scale);
    if eps < floor / 10.0 {
        return Err(DerivError::StepBelowRoundoffFloor { eps, floor, order });
    }
    Ok(())
}

/// k-th derivative of a scalar function at x via the central stencil.
/// `scale` is the characteristic length used by the roundoff guard; pass
/// 1.0 for order-one arguments.
pub fn central_diff<F: FnMut(f64) -> f64>(
    mut f: F,
    x: f64,
    order: u8,
    eps: f64,
    scale: f64,
) -> Result<f64, DerivError> {
    check_step(order, eps, scale)?;
    let st = Stencil::central(order)?;
    let values: Vec<f64> = st.offsets.iter().map(|&o| f(x + o as f64 * eps)).collect();
    Ok(st.combine(&values, eps))
}

/// k-th directional derivative along a unit direction, sampling the
/// function at x + o_i eps nu.
pub fn central_diff_dir<F: FnMut(&Point) -> f64>(
    mut f: F,
    x: &Point,
    nu: &Direction,
    order: u8,
    eps: f64,
    scale: f64,
) -> Result<f64, DerivError> {
    check_step(order, eps, scale)?;
    let st = Stencil::central(order)?;
    let values: Vec<f64> = st
        .offsets
        .iter()
        .map(|&o| f(&x.offset(nu, o as f64 * eps)))
        .collect();
    Ok(st.combine(&values, eps))
}

/// One Richardson step: combines D(eps) and D(eps/2) for an O(eps^4)
/// estimate, plus the disagreement-based error estimate.
pub fn richardson<F: FnMut(f64) -> f64 + Copy>(
    f: F,
    x: f64,
    order: u8,
    eps: f64,
    scale: f64,
) -> Result<(f64, f64), DerivError> {
    let d1 = central_diff(f, x, order, eps, scale)?;
    let d2 = central_diff(f, x, order, eps / 2.0, scale)?;
    let extrap = (4.0 * d2 - d1) / 3.0;
    Ok((extrap, (d2 - d1).abs() / 3.0))
}

/// Residual |integral_a^b f'(x) dx - (f(b) - f(a))| with the derivative
/// taken by stencil, integrated by composite Gauss-Legendre. A consistency
/// check that the stencil really differentiates.
pub fn ftc_residual<F: FnMut(f64) -> f64 + Copy>(
    mut f: F,
    a: f64,
    b: f64,
    eps: f64,
    segments: usize,
) -> Result<f64, DerivError> {
    let scale = (b - a).abs().max(1.0);
    check_step(1, eps, scale)?;
    let st = Stencil::central(1)?;
    let mut total = 0.0;
    let width = (b - a) / segments as f64;
    for s in 0..segments {
        let (nodes, weights) =
            crate::special::gauss_legendre_on(a + s as f64 * width, a + (s + 1) as f64 * width, 16);
        for (x, w) in nodes.iter().zip(&weights) {
            let vals: Vec<f64> = st.offsets.iter().map(|&o| f(x + o as f64 * eps)).collect();
            total += w * st.combine(&vals, eps);
        }
    }
    Ok((total - (f(b) - f(a))).abs())
}
