//! The Dirichlet heat semigroup built from eigenexpansions, under the
//! convention u_t = Delta u (so free-space variance is 2t per coordinate).
//!
//! Everything here reports how many spectral terms it actually summed;
//! adaptive truncation stops once a rigorous within-basis tail bound
//! (suffix sup-norm weights times exp(-lambda t)) drops below tolerance
//! relative to the leading term.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::deriv::{self, DerivError};
use crate::domain::{Direction, Domain, Point};
use crate::special::kahan_sum;
use crate::spectral::{EigenEval, EigenPair, SpectralBasis, SymMat2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    /// Stop when the within-basis tail bound falls below `tol` times the
    /// leading-term bound, but never sum more than `cap` terms.
    Adaptive { tol: f64, cap: usize },
    Fixed(usize),
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::Adaptive { tol: 1e-12, cap: 20_000 }
    }
}

/// A truncated spectral sum: the raw value, the value clamped to its
/// analytic range, and the number of terms summed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub raw: f64,
    pub clamped: f64,
    pub terms: usize,
}

/// Free-space Gaussian kernel (4 pi t)^(-n/2) exp(-|x-y|^2 / 4t).
pub fn free_kernel(dim: usize, t: f64, x: &Point, y: &Point) -> f64 {
    assert!(t > 0.0, "kernel needs t > 0");
    let d2 = x.dist(y).powi(2);
    (-d2 / (4.0 * t)).exp() / (4.0 * PI * t).powf(dim as f64 / 2.0)
}

/// Interval Dirichlet kernel by the method of images: alternating mirror
/// charges at x - y + 2jL and x + y + 2jL. Terms below 1e-16 are dropped;
/// for t <= L^2 a handful of images suffice.
pub fn images_kernel_1d(l: f64, t: f64, x: f64, y: f64) -> f64 {
    assert!(t > 0.0, "kernel needs t > 0");
    let g = |z: f64| (-z * z / (4.0 * t)).exp() / (4.0 * PI * t).sqrt();
    let mut s = g(x - y) - g(x + y);
    for j in 1..=1000 {
        let a = 2.0 * j as f64 * l;
        let parts = [g(x - y + a), g(x + y + a), g(x - y - a), g(x + y - a)];
        s += parts[0] - parts[1] + parts[2] - parts[3];
        if parts.iter().all(|p| p.abs() < 1e-16) {
            break;
        }
    }
    s
}

/// Interval kernel mass over a subinterval, int_a^b p_t(x, y) dy, by the
/// closed-form antiderivative of the image sum (each image integrates to
/// an erf difference). With (a, b) = (0, L) this is the survival
/// probability; narrow kernels are handled exactly, unlike quadrature.
pub fn images_mass_1d(l: f64, t: f64, x: f64, a: f64, b: f64) -> f64 {
    assert!(t > 0.0, "kernel mass needs t > 0");
    assert!(a <= b, "need a <= b");
    let psi = |z: f64| 0.5 * crate::special::erf(z / (2.0 * t.sqrt()));
    let term = |shift: f64| {
        psi(x - a + shift) - psi(x - b + shift) + psi(x + a + shift) - psi(x + b + shift)
    };
    let mut s = term(0.0);
    for j in 1..=1000 {
        let add = term(2.0 * j as f64 * l) + term(-2.0 * j as f64 * l);
        s += add;
        if add.abs() < 1e-17 {
            break;
        }
    }
    s
}

/// Shared truncation driver: sums term(pair) * exp(-lambda t) in eigenvalue
/// order. `weight` must dominate |term(pair)| for the tail bound to hold.
fn truncated_sum<W, F>(
    pairs: &[EigenPair],
    t: f64,
    trunc: Truncation,
    weight: W,
    mut term: F,
) -> (f64, usize)
where
    W: Fn(&EigenPair) -> f64,
    F: FnMut(usize, &EigenPair) -> f64,
{
    match trunc {
        Truncation::Fixed(n) => {
            let n = n.min(pairs.len());
            let s = kahan_sum(
                pairs[..n]
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (-p.eigenvalue * t).exp() * term(i, p)),
            );
            (s, n)
        }
        Truncation::Adaptive { tol, cap } => {
            let n = pairs.len().min(cap);
            let ws: Vec<f64> = pairs[..n].iter().map(&weight).collect();
            let mut suffix = vec![0.0; n + 1];
            for i in (0..n).rev() {
                suffix[i] = suffix[i + 1] + ws[i];
            }
            let scale = (ws[0] * (-pairs[0].eigenvalue * t).exp()).max(f64::MIN_POSITIVE);
            let mut sum = 0.0;
            let mut comp = 0.0;
            let mut used = n;
            for (i, p) in pairs[..n].iter().enumerate() {
                let decay = (-p.eigenvalue * t).exp();
                if suffix[i] * decay < tol * scale {
                    used = i;
                    break;
                }
                // Kahan step keeps the sum reproducible at full precision
                // regardless of term count
                let y = decay * term(i, p) - comp;
                let tsum = sum + y;
                comp = (tsum - sum) - y;
                sum = tsum;
            }
            (sum, used)
        }
    }
}

/// Dirichlet heat kernel p_t(x, y) = sum exp(-lambda_k t) phi_k(x) phi_k(y).
pub fn heat_kernel(
    basis: &SpectralBasis,
    t: f64,
    x: &Point,
    y: &Point,
    trunc: Truncation,
) -> KernelValue {
    assert!(t > 0.0, "kernel needs t > 0");
    let (raw, terms) = truncated_sum(
        &basis.pairs,
        t,
        trunc,
        |p| p.sup_bound() * p.sup_bound(),
        |_, p| p.eval(x) * p.eval(y),
    );
    KernelValue { raw, clamped: raw.max(0.0), terms }
}

/// Integral of phi over the domain, in closed form. Vanishes for every
/// mode with angular or axis-wise sign changes; only all-positive-lobe
/// symmetric modes carry mass.
pub fn mass_coeff(p: &EigenPair) -> f64 {
    use crate::spectral::{EigenIndex, Parity};
    // integral of sqrt(2/L) sin(k pi x / L) over (0, L)
    let seg = |l: f64, k: u32| {
        if k % 2 == 0 {
            0.0
        } else {
            (2.0 / l).sqrt() * 2.0 * l / (k as f64 * PI)
        }
    };
    match p.index {
        EigenIndex::Interval { k } => {
            let Domain::Interval { l } = p.domain else { unreachable!() };
            seg(l, k)
        }
        EigenIndex::Rectangle { kx, ky } => {
            let Domain::Rectangle { lx, ly } = p.domain else { unreachable!() };
            seg(lx, kx) * seg(ly, ky)
        }
        EigenIndex::Disk { m, parity, .. } => {
            if m != 0 || parity == Parity::Sin {
                return 0.0;
            }
            let Domain::Disk { r } = p.domain else { unreachable!() };
            // 2 pi R^2 J_1(j) / j, from int_0^1 J_0(j u) u du = J_1(j)/j
            let j = p.eigenvalue.sqrt() * r;
            p.norm_const * 2.0 * PI * r * r * crate::spectral::bessel::bessel_j_raw(1, j) / j
        }
    }
}

/// Survival probability int_Omega p_t(x, y) dy, via the closed-form mode
/// masses. `clamped` is cut to [0, 1].
pub fn survival(basis: &SpectralBasis, t: f64, x: &Point, trunc: Truncation) -> KernelValue {
    assert!(t > 0.0, "survival needs t > 0");
    let masses: Vec<f64> = basis.pairs.iter().map(mass_coeff).collect();
    let (raw, terms) = truncated_sum(
        &basis.pairs,
        t,
        trunc,
        |p| p.sup_bound() * mass_coeff(p).abs(),
        |i, p| masses[i] * p.eval(x),
    );
    KernelValue { raw, clamped: raw.clamp(0.0, 1.0), terms }
}

/// An initial datum expanded in the eigenbasis; evolving it under the
/// semigroup is then termwise multiplication by exp(-lambda t).
#[derive(Debug, Clone)]
pub struct SpectralField {
    pub basis: Arc<SpectralBasis>,
    pub coeffs: Vec<f64>,
    /// Sup of |f - reconstruction| over an interior sample grid. Honest
    /// about truncation: slowly decaying expansions (e.g. data that does
    /// not vanish on the boundary) show their tail here.
    pub recon_error_sup: f64,
    weight_suffix: Vec<f64>,
}

impl SpectralField {
    /// L2 projection of `f` onto the basis with a product quadrature of
    /// the given order. The order must resolve the highest mode; as a rule
    /// of thumb use at least 2.5 nodes per half-oscillation.
    pub fn project<F: Fn(&Point) -> f64>(
        basis: Arc<SpectralBasis>,
        f: F,
        quad_order: usize,
    ) -> Self {
        let q = basis.domain.quadrature(quad_order);
        let fvals: Vec<f64> = q.nodes.iter().map(|p| f(p)).collect();
        let coeffs: Vec<f64> = basis
            .pairs
            .iter()
            .map(|p| {
                kahan_sum(
                    q.nodes
                        .iter()
                        .zip(&q.weights)
                        .zip(&fvals)
                        .map(|((node, w), fv)| w * p.eval(node) * fv),
                )
            })
            .collect();
        // Coefficients this far below the leading one are quadrature noise
        // on modes the datum does not contain (symmetry-forced zeros in
        // particular). Snapping them keeps sparse data sparse.
        let cmax = coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        let coeffs: Vec<f64> = coeffs
            .into_iter()
            .map(|c| if c.abs() < 5e-15 * cmax { 0.0 } else { c })
            .collect();
        let mut field = SpectralField::from_coeffs(basis, coeffs, 0.0);
        let grid = field.basis.domain.interior_grid(24);
        field.recon_error_sup = grid
            .iter()
            .map(|x| (f(x) - field.eval(0.0, x)).abs())
            .fold(0.0, f64::max);
        field
    }

    pub fn from_coeffs(basis: Arc<SpectralBasis>, coeffs: Vec<f64>, recon_error_sup: f64) -> Self {
        assert_eq!(coeffs.len(), basis.len());
        let ws: Vec<f64> = basis
            .pairs
            .iter()
            .zip(&coeffs)
            .map(|(p, c)| c.abs() * p.sup_bound())
            .collect();
        let mut weight_suffix = vec![0.0; ws.len() + 1];
        for i in (0..ws.len()).rev() {
            weight_suffix[i] = weight_suffix[i + 1] + ws[i];
        }
        SpectralField { basis, coeffs, recon_error_sup, weight_suffix }
    }

    /// The field that is exactly one eigenfunction.
    pub fn eigenfunction(basis: Arc<SpectralBasis>, position: usize) -> Self {
        let mut coeffs = vec![0.0; basis.len()];
        coeffs[position] = 1.0;
        SpectralField::from_coeffs(basis, coeffs, 0.0)
    }

    /// u(t, x) = sum c_k exp(-lambda_k t) phi_k(x), t >= 0. Panics if x is
    /// outside the closed domain.
    pub fn eval(&self, t: f64, x: &Point) -> f64 {
        assert!(self.basis.domain.in_closure(x), "point outside closed domain");
        self.eval_unchecked(t, x)
    }

    pub(crate) fn eval_unchecked(&self, t: f64, x: &Point) -> f64 {
        assert!(t >= 0.0);
        let pairs = &self.basis.pairs;
        let scale = (self.weight_suffix[0] - self.weight_suffix[1])
            .max(f64::MIN_POSITIVE)
            * (-pairs[0].eigenvalue * t).exp();
        let mut sum = 0.0;
        let mut comp = 0.0;
        for (i, p) in pairs.iter().enumerate() {
            let decay = (-p.eigenvalue * t).exp();
            if t > 0.0 && self.weight_suffix[i] * decay < 1e-15 * scale {
                break;
            }
            if self.coeffs[i] == 0.0 {
                continue;
            }
            let y = decay * self.coeffs[i] * p.eval_unchecked(x) - comp;
            let tsum = sum + y;
            comp = (tsum - sum) - y;
            sum = tsum;
        }
        sum
    }

    /// Termwise value, gradient and Hessian of u(t, .) at x, from the
    /// analytic per-mode derivatives. Valid at boundary points too (the
    /// eigenfunction formulas extend past the boundary).
    pub fn eval_all(&self, t: f64, x: &Point) -> EigenEval {
        assert!(t >= 0.0);
        let pairs = &self.basis.pairs;
        let dweight = |lam: f64| 2.0 * lam;
        let scale = ((self.weight_suffix[0] - self.weight_suffix[1])
            .max(f64::MIN_POSITIVE)
            * (-pairs[0].eigenvalue * t).exp())
            * dweight(pairs[0].eigenvalue);
        let mut value = 0.0;
        let mut grad = [0.0f64; 2];
        let mut hess = SymMat2 { xx: 0.0, xy: 0.0, yy: 0.0 };
        for (i, p) in pairs.iter().enumerate() {
            let lam = p.eigenvalue;
            let decay = (-lam * t).exp();
            if t > 0.0
                && lam * t >= 2.0
                && self.weight_suffix[i] * decay * dweight(lam) < 1e-15 * scale
            {
                break;
            }
            if self.coeffs[i] == 0.0 {
                continue;
            }
            let c = decay * self.coeffs[i];
            let e = p.eval_all_unchecked(x);
            value += c * e.value;
            grad[0] += c * e.grad[0];
            grad[1] += c * e.grad[1];
            hess = hess.add(&e.hess.scaled(c));
        }
        EigenEval { value, grad, hess }
    }

    /// k-th directional derivative of u(t, .) at x along nu. Orders 1 and 2
    /// are termwise analytic; orders 3 and 4 fall back to a central stencil
    /// on the analytically continued sum (so boundary points are fine).
    pub fn deriv(
        &self,
        t: f64,
        x: &Point,
        nu: &Direction,
        order: u8,
        eps: Option<f64>,
    ) -> Result<f64, DerivError> {
        assert!(self.basis.domain.in_closure(x), "point outside closed domain");
        match order {
            1 | 2 => Ok(self.deriv_termwise(t, x, nu, order)),
            3 | 4 => {
                let eps = eps.unwrap_or_else(|| {
                    deriv::default_step(order, self.basis.domain.diameter())
                });
                deriv::central_diff_dir(
                    |p| self.eval_unchecked(t, p),
                    x,
                    nu,
                    order,
                    eps,
                    self.basis.domain.diameter(),
                )
            }
            o => Err(DerivError::UnsupportedOrder(o)),
        }
    }

    fn deriv_termwise(&self, t: f64, x: &Point, nu: &Direction, order: u8) -> f64 {
        let pairs = &self.basis.pairs;
        // sup |D phi| <= nc sqrt(lambda), sup |D^2 phi| <= 2 nc lambda
        let dweight = |lam: f64| 2.0 * lam.powf(order as f64 / 2.0);
        let scale = ((self.weight_suffix[0] - self.weight_suffix[1]).max(f64::MIN_POSITIVE)
            * (-pairs[0].eigenvalue * t).exp())
            * dweight(pairs[0].eigenvalue);
        let mut sum = 0.0;
        let mut comp = 0.0;
        for (i, p) in pairs.iter().enumerate() {
            let lam = p.eigenvalue;
            let decay = (-lam * t).exp();
            // the per-term bound decays only once lambda t is past the
            // hump of lambda^(order/2) exp(-lambda t)
            if t > 0.0
                && lam * t >= 2.0
                && self.weight_suffix[i] * decay * dweight(lam) < 1e-15 * scale
            {
                break;
            }
            if self.coeffs[i] == 0.0 {
                continue;
            }
            let e = p.eval_all_unchecked(x);
            let d = match order {
                1 => match nu.dim() {
                    1 => nu.get(0) * e.grad[0],
                    _ => nu.get(0) * e.grad[0] + nu.get(1) * e.grad[1],
                },
                _ => e.hess.quad_form(nu),
            };
            let y = decay * self.coeffs[i] * d - comp;
            let tsum = sum + y;
            comp = (tsum - sum) - y;
            sum = tsum;
        }
        sum
    }
}

/// Crank-Nicolson on the interval with homogeneous Dirichlet data: an
/// oracle for the spectral semigroup that shares none of its machinery.
/// Returns the interior grid and the solution at time t.
pub fn crank_nicolson_1d<F: Fn(f64) -> f64>(
    l: f64,
    f: F,
    t: f64,
    nx: usize,
    nt: usize,
) -> (Vec<f64>, Vec<f64>) {
    assert!(nx >= 2 && nt >= 1 && t > 0.0);
    let h = l / (nx + 1) as f64;
    let dt = t / nt as f64;
    let r = dt / (2.0 * h * h);
    let xs: Vec<f64> = (1..=nx).map(|i| i as f64 * h).collect();
    let mut u: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let b = 1.0 + 2.0 * r;
    let mut cmod = vec![0.0; nx];
    let mut d = vec![0.0; nx];
    for _ in 0..nt {
        for i in 0..nx {
            let left = if i > 0 { u[i - 1] } else { 0.0 };
            let right = if i + 1 < nx { u[i + 1] } else { 0.0 };
            d[i] = (1.0 - 2.0 * r) * u[i] + r * (left + right);
        }
        // Thomas solve of (-r, 1 + 2r, -r)
        cmod[0] = -r / b;
        d[0] /= b;
        for i in 1..nx {
            let m = b + r * cmod[i - 1];
            cmod[i] = -r / m;
            d[i] = (d[i] + r * d[i - 1]) / m;
        }
        u[nx - 1] = d[nx - 1];
        for i in (0..nx - 1).rev() {
            u[i] = d[i] - cmod[i] * u[i + 1];
        }
    }
    (xs, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn interval_basis(n: usize) -> Arc<SpectralBasis> {
        Arc::new(SpectralBasis::new(Domain::interval(PI), n).unwrap())
    }

    #[test]
    fn kernel_reference_values() {
        let b = interval_basis(300);
        let v = heat_kernel(&b, 0.1, &Point::x1(PI / 2.0), &Point::x1(PI / 2.0), Truncation::default());
        assert_relative_eq!(v.clamped, 0.89206205804205837, epsilon = 1e-11);
        let v = heat_kernel(&b, 0.05, &Point::x1(1.0), &Point::x1(2.0), Truncation::default());
        assert_relative_eq!(v.clamped, 0.0085003666025203418, epsilon = 1e-12);
    }

    #[test]
    fn kernel_matches_images_oracle() {
        let b = interval_basis(300);
        for &t in &[0.05, 0.1, 0.5] {
            for i in 1..=6 {
                for j in 1..=6 {
                    let (x, y) = (i as f64 * PI / 7.0, j as f64 * PI / 7.0);
                    let spectral =
                        heat_kernel(&b, t, &Point::x1(x), &Point::x1(y), Truncation::default());
                    let images = images_kernel_1d(PI, t, x, y);
                    assert!(
                        (spectral.clamped - images).abs() < 1e-10,
                        "t={t} x={x} y={y}: {} vs {images}",
                        spectral.clamped
                    );
                }
            }
        }
    }

    #[test]
    fn kernel_is_symmetric() {
        let b = interval_basis(200);
        let (x, y) = (Point::x1(0.7), Point::x1(2.1));
        let a = heat_kernel(&b, 0.2, &x, &y, Truncation::default());
        let bb = heat_kernel(&b, 0.2, &y, &x, Truncation::default());
        assert_relative_eq!(a.raw, bb.raw, max_relative = 1e-12);

        let db = Arc::new(SpectralBasis::new(Domain::disk(1.0), 120).unwrap());
        let (x, y) = (Point::x2(0.3, 0.1), Point::x2(-0.2, 0.5));
        let a = heat_kernel(&db, 0.1, &x, &y, Truncation::default());
        let bb = heat_kernel(&db, 0.1, &y, &x, Truncation::default());
        assert_relative_eq!(a.raw, bb.raw, max_relative = 1e-10);
    }

    #[test]
    fn kernel_dominated_by_free_kernel() {
        let b = interval_basis(300);
        for &t in &[0.02, 0.1, 0.5] {
            for i in 1..=9 {
                let x = Point::x1(i as f64 * PI / 10.0);
                for j in 1..=9 {
                    let y = Point::x1(j as f64 * PI / 10.0);
                    let p = heat_kernel(&b, t, &x, &y, Truncation::default());
                    let free = free_kernel(1, t, &x, &y);
                    assert!(p.clamped <= free + 1e-11, "t={t}: {} > {free}", p.clamped);
                    assert!(p.clamped >= 0.0);
                }
            }
        }
        let db = Arc::new(SpectralBasis::new(Domain::disk(1.0), 150).unwrap());
        let x = Point::x2(0.4, 0.0);
        let y = Point::x2(0.0, 0.3);
        let p = heat_kernel(&db, 0.1, &x, &y, Truncation::default());
        assert!(p.clamped <= free_kernel(2, 0.1, &x, &y) + 1e-11);
    }

    #[test]
    fn semigroup_property_under_quadrature() {
        let b = interval_basis(200);
        let q = b.domain.quadrature(120);
        let (x, y) = (Point::x1(1.0), Point::x1(1.9));
        let (t, s) = (0.08, 0.05);
        let composed = q.integrate(|z| {
            heat_kernel(&b, t, &x, z, Truncation::default()).raw
                * heat_kernel(&b, s, z, &y, Truncation::default()).raw
        });
        let direct = heat_kernel(&b, t + s, &x, &y, Truncation::default()).raw;
        assert_relative_eq!(composed, direct, epsilon = 1e-9);
    }

    #[test]
    fn survival_reference_values() {
        let b = interval_basis(300);
        let v = survival(&b, 0.1, &Point::x1(PI / 2.0), Truncation::default());
        assert_relative_eq!(v.clamped, 0.9991118664449714, epsilon = 1e-11);
        assert!(v.terms < 60, "adaptive truncation should cut far below 300");

        let db = Arc::new(SpectralBasis::new(Domain::disk(1.0), 200).unwrap());
        let v = survival(&db, 0.1, &Point::x2(0.0, 0.0), Truncation::default());
        assert_relative_eq!(v.clamped, 0.84835511332531029, epsilon = 1e-10);
    }

    #[test]
    fn subinterval_mass_is_consistent() {
        let (l, t, x) = (PI, 0.1, 1.2);
        // the full interval recovers the survival probability
        let b = interval_basis(300);
        let full = images_mass_1d(l, t, x, 0.0, l);
        let s = survival(&b, t, &Point::x1(x), Truncation::default()).raw;
        assert_relative_eq!(full, s, epsilon = 1e-10);
        // additivity over a split
        let split = images_mass_1d(l, t, x, 0.0, 1.9) + images_mass_1d(l, t, x, 1.9, l);
        assert_relative_eq!(full, split, epsilon = 1e-13);
        // quadrature of the kernel over the same window agrees
        let (nodes, weights) = crate::special::gauss_legendre_on(0.7, 1.9, 60);
        let quad: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(y, w)| w * images_kernel_1d(l, t, x, *y))
            .sum();
        assert_relative_eq!(quad, images_mass_1d(l, t, x, 0.7, 1.9), epsilon = 1e-10);
        // a narrow kernel far from the boundary puts all mass in a short window
        let tiny = images_mass_1d(l, 1e-5, x, x - 0.05, x + 0.05);
        assert!((tiny - 1.0).abs() < 1e-12, "got {tiny}");
    }

    #[test]
    fn survival_matches_kernel_quadrature() {
        let cases: Vec<(Domain, Point, usize, usize)> = vec![
            (Domain::interval(PI), Point::x1(0.8), 200, 100),
            (Domain::rectangle(1.0, 2.0), Point::x2(0.4, 1.1), 400, 60),
            (Domain::disk(1.0), Point::x2(0.25, -0.3), 200, 60),
        ];
        for (d, x, nbasis, qorder) in cases {
            let b = SpectralBasis::new(d, nbasis).unwrap();
            let q = b.domain.quadrature(qorder);
            let t = 0.08;
            let direct = survival(&b, t, &x, Truncation::default()).raw;
            let integrated =
                q.integrate(|y| heat_kernel(&b, t, &x, y, Truncation::default()).raw);
            assert_relative_eq!(direct, integrated, epsilon = 1e-9);
            assert!(direct > 0.0 && direct <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn projection_recovers_known_coefficients() {
        let b = interval_basis(120);
        // f(x) = x (pi - x): coefficients sqrt(2/pi) 4 / k^3 for odd k
        let bubble = SpectralField::project(b.clone(), |p| p.get(0) * (PI - p.get(0)), 400);
        for k in [1usize, 3, 5, 9] {
            let expect = (2.0 / PI).sqrt() * 4.0 / (k as f64).powi(3);
            assert_relative_eq!(bubble.coeffs[k - 1], expect, epsilon = 1e-11);
        }
        assert!(bubble.coeffs[1].abs() < 1e-12, "even coefficients vanish");
        assert!(
            bubble.recon_error_sup < 1e-4,
            "smooth datum reconstructs well, got {}",
            bubble.recon_error_sup
        );

        // f = 1: coefficients sqrt(2/pi) 2 / k for odd k; the tail decays
        // slowly and the reconstruction error stays visibly nonzero
        let one = SpectralField::project(b.clone(), |_| 1.0, 400);
        for k in [1usize, 3, 7] {
            let expect = (2.0 / PI).sqrt() * 2.0 / k as f64;
            assert_relative_eq!(one.coeffs[k - 1], expect, epsilon = 1e-10);
        }
        assert!(one.recon_error_sup > 1e-4 && one.recon_error_sup < 0.2);
    }

    #[test]
    fn field_evolution_matches_kernel_integral() {
        let b = interval_basis(120);
        let field = SpectralField::project(b.clone(), |p| p.get(0) * (PI - p.get(0)), 400);
        let x = Point::x1(PI / 2.0);
        assert_relative_eq!(field.eval(0.1, &x), 2.2674223242229166, epsilon = 1e-9);
        let q = b.domain.quadrature(160);
        let integrated = q.integrate(|y| {
            heat_kernel(&b, 0.1, &x, y, Truncation::default()).raw * y.get(0) * (PI - y.get(0))
        });
        assert_relative_eq!(field.eval(0.1, &x), integrated, epsilon = 1e-9);
    }

    #[test]
    fn eigenfield_evolves_by_pure_exponential() {
        let b = interval_basis(50);
        let field = SpectralField::eigenfunction(b.clone(), 0);
        let x = Point::x1(PI / 2.0);
        assert_relative_eq!(field.eval(0.5, &x), 0.4839414490382867, epsilon = 1e-13);
        for &t in &[0.01, 0.1, 1.0] {
            let expect = (-b.pairs[0].eigenvalue * t).exp() * b.pairs[0].eval(&x);
            assert_relative_eq!(field.eval(t, &x), expect, epsilon = 1e-13);
        }
    }

    #[test]
    fn termwise_derivatives_match_closed_forms() {
        let b = interval_basis(50);
        let field = SpectralField::eigenfunction(b.clone(), 0);
        let x = Point::x1(PI / 2.0);
        let nu = Direction::x1(1.0);
        // second derivative of exp(-t) sqrt(2/pi) sin(x) at the midpoint
        let d2 = field.deriv(0.1, &x, &nu, 2, None).unwrap();
        assert_relative_eq!(d2, -0.72195580588762028, epsilon = 1e-13);
        // first derivative at the left endpoint
        let d1 = field.deriv(0.1, &Point::x1(0.0), &nu, 1, None).unwrap();
        assert_relative_eq!(d1, (-0.1f64).exp() * (2.0 / PI).sqrt(), epsilon = 1e-13);
    }

    #[test]
    fn stencil_derivatives_track_termwise_ones() {
        let b = interval_basis(80);
        let field = SpectralField::project(b.clone(), |p| p.get(0) * (PI - p.get(0)), 300);
        let x = Point::x1(0.9);
        let nu = Direction::x1(1.0);
        // order 3 of u(t, .) for the eigenfield: -exp(-t) nc cos(x)
        let ef = SpectralField::eigenfunction(b.clone(), 0);
        let d3 = ef.deriv(0.1, &x, &nu, 3, None).unwrap();
        let expect = -(-0.1f64).exp() * (2.0 / PI).sqrt() * 0.9f64.cos();
        assert_relative_eq!(d3, expect, max_relative = 1e-5);
        // order 1 by stencil agrees with the termwise gradient
        let d1_term = field.deriv(0.05, &x, &nu, 1, None).unwrap();
        let d1_fd = deriv::central_diff_dir(
            |p| field.eval_unchecked(0.05, p),
            &x,
            &nu,
            1,
            1e-5,
            PI,
        )
        .unwrap();
        assert_relative_eq!(d1_term, d1_fd, max_relative = 1e-8);
    }

    #[test]
    fn crank_nicolson_agrees_with_spectral_evolution() {
        let b = interval_basis(120);
        let field = SpectralField::project(b.clone(), |p| p.get(0) * (PI - p.get(0)), 400);
        let (xs, u) = crank_nicolson_1d(PI, |x| x * (PI - x), 0.1, 1000, 500);
        let mut worst = 0.0f64;
        for idx in (50..1000).step_by(50) {
            let exact = field.eval(0.1, &Point::x1(xs[idx]));
            worst = worst.max((u[idx] - exact).abs());
        }
        assert!(worst < 2e-6, "max deviation {worst}");
    }

    #[test]
    fn truncation_modes_and_clamping() {
        let b = interval_basis(300);
        let x = Point::x1(PI / 2.0);
        let adaptive = heat_kernel(&b, 0.5, &x, &x, Truncation::default());
        let fixed = heat_kernel(&b, 0.5, &x, &x, Truncation::Fixed(300));
        assert_relative_eq!(adaptive.raw, fixed.raw, epsilon = 1e-12);
        assert!(adaptive.terms < 30);
        assert_eq!(fixed.terms, 300);

        // far-separated points at tiny t: the true value is below roundoff,
        // the raw sum is noise around zero, the clamp keeps it admissible
        let v = heat_kernel(&b, 0.01, &Point::x1(0.2), &Point::x1(2.9), Truncation::default());
        assert!(v.raw.abs() < 1e-12);
        assert!(v.clamped >= 0.0);
    }
}
