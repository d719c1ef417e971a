//! Model domains: interval (0, L), axis-aligned rectangle (0, Lx) x (0, Ly),
//! and the disk of radius R centered at the origin.
//!
//! All geometry needed by the rest of the crate lives here: strict interior
//! membership, exact distance to the boundary, boundary sampling with inward
//! normals and mean curvature, tensorized Gauss-Legendre quadrature, and the
//! stencil-fit predicate used by the finite-difference module.

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::PI;
use thiserror::Error;

use crate::special::gauss_legendre_on;

#[derive(Debug, Error)]
pub enum DomainError {
    #[error("direction vector has near-zero length")]
    ZeroDirection,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid domain parameter: {0}")]
    BadParameter(String),
}

/// A point in 1 or 2 dimensions. The unused coordinate of a 1-d point is 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    coords: [f64; 2],
    dim: usize,
}

impl Point {
    pub fn x1(x: f64) -> Self {
        Point { coords: [x, 0.0], dim: 1 }
    }

    pub fn x2(x: f64, y: f64) -> Self {
        Point { coords: [x, y], dim: 2 }
    }

    pub fn from_slice(c: &[f64]) -> Self {
        match c.len() {
            1 => Point::x1(c[0]),
            2 => Point::x2(c[0], c[1]),
            n => panic!("point must have 1 or 2 coordinates, got {n}"),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    pub fn get(&self, i: usize) -> f64 {
        assert!(i < self.dim);
        self.coords[i]
    }

    pub fn dist(&self, other: &Point) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let dx = self.coords[0] - other.coords[0];
        let dy = self.coords[1] - other.coords[1];
        (dx * dx + dy * dy).sqrt()
    }

    pub fn norm(&self) -> f64 {
        (self.coords[0] * self.coords[0] + self.coords[1] * self.coords[1]).sqrt()
    }

    /// self + d, componentwise; the extra slot of a 1-d point is ignored.
    pub(crate) fn translated(&self, d: [f64; 2]) -> Point {
        let mut coords = [self.coords[0] + d[0], 0.0];
        if self.dim == 2 {
            coords[1] = self.coords[1] + d[1];
        }
        Point { coords, dim: self.dim }
    }

    /// self + s * nu
    pub fn offset(&self, nu: &Direction, s: f64) -> Point {
        assert_eq!(self.dim, nu.dim(), "dimension mismatch");
        Point {
            coords: [
                self.coords[0] + s * nu.comps[0],
                self.coords[1] + s * nu.comps[1],
            ],
            dim: self.dim,
        }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        match v.len() {
            1 => Ok(Point::x1(v[0])),
            2 => Ok(Point::x2(v[0], v[1])),
            n => Err(D::Error::custom(format!(
                "point must have 1 or 2 coordinates, got {n}"
            ))),
        }
    }
}

/// A unit direction vector. Construction normalizes, so the invariant
/// ||nu|| = 1 holds to machine precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    comps: [f64; 2],
    dim: usize,
}

impl Direction {
    pub fn new(c: &[f64]) -> Result<Self, DomainError> {
        let dim = match c.len() {
            1 | 2 => c.len(),
            n => {
                return Err(DomainError::DimensionMismatch { expected: 2, got: n });
            }
        };
        let mut comps = [0.0; 2];
        comps[..dim].copy_from_slice(c);
        let norm = (comps[0] * comps[0] + comps[1] * comps[1]).sqrt();
        if !(norm > 1e-14) || !norm.is_finite() {
            return Err(DomainError::ZeroDirection);
        }
        Ok(Direction {
            comps: [comps[0] / norm, comps[1] / norm],
            dim,
        })
    }

    pub fn x1(sign: f64) -> Self {
        Direction::new(&[sign]).expect("sign must be nonzero")
    }

    pub fn x2(x: f64, y: f64) -> Self {
        Direction::new(&[x, y]).expect("direction must be nonzero")
    }

    /// Unit vector at polar angle theta (2-d).
    pub fn from_angle(theta: f64) -> Self {
        Direction {
            comps: [theta.cos(), theta.sin()],
            dim: 2,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn comps(&self) -> &[f64] {
        &self.comps[..self.dim]
    }

    pub fn get(&self, i: usize) -> f64 {
        assert!(i < self.dim);
        self.comps[i]
    }

    pub fn flipped(&self) -> Self {
        Direction {
            comps: [-self.comps[0], -self.comps[1]],
            dim: self.dim,
        }
    }

    pub fn dot_point(&self, p: &Point) -> f64 {
        self.comps[0] * p.coords[0] + self.comps[1] * p.coords[1]
    }
}

impl Serialize for Direction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.comps().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        Direction::new(&v).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Where a point sits relative to the closed domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Location {
    Interior,
    Boundary,
    Exterior,
}

/// A sampled boundary point with inward unit normal and mean curvature of
/// the boundary at that point (0 for flat pieces, 1/R on the circle).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundaryPoint {
    pub point: Point,
    pub inward_normal: Direction,
    pub mean_curvature: f64,
}

/// Quadrature rule: nodes strictly inside the domain with positive weights
/// summing to the domain measure.
#[derive(Debug, Clone)]
pub struct Quadrature {
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
}

impl Quadrature {
    pub fn integrate<F: Fn(&Point) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(x))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Domain {
    Interval {
        #[serde(rename = "L")]
        l: f64,
    },
    Rectangle {
        #[serde(rename = "Lx")]
        lx: f64,
        #[serde(rename = "Ly")]
        ly: f64,
    },
    Disk {
        #[serde(rename = "R")]
        r: f64,
    },
}

impl Domain {
    pub fn interval(l: f64) -> Self {
        let d = Domain::Interval { l };
        d.validate().expect("invalid interval");
        d
    }

    pub fn rectangle(lx: f64, ly: f64) -> Self {
        let d = Domain::Rectangle { lx, ly };
        d.validate().expect("invalid rectangle");
        d
    }

    pub fn disk(r: f64) -> Self {
        let d = Domain::Disk { r };
        d.validate().expect("invalid disk");
        d
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        match *self {
            Domain::Interval { l } => {
                if !ok(l) {
                    return Err(DomainError::BadParameter(format!("L = {l} must be positive")));
                }
            }
            Domain::Rectangle { lx, ly } => {
                if !ok(lx) || !ok(ly) {
                    return Err(DomainError::BadParameter(format!(
                        "Lx = {lx}, Ly = {ly} must be positive"
                    )));
                }
            }
            Domain::Disk { r } => {
                if !ok(r) {
                    return Err(DomainError::BadParameter(format!("R = {r} must be positive")));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            _ => 2,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Domain::Interval { .. } => "interval",
            Domain::Rectangle { .. } => "rectangle",
            Domain::Disk { .. } => "disk",
        }
    }

    /// Lebesgue measure (length / area).
    pub fn measure(&self) -> f64 {
        match *self {
            Domain::Interval { l } => l,
            Domain::Rectangle { lx, ly } => lx * ly,
            Domain::Disk { r } => PI * r * r,
        }
    }

    /// Diameter, the scale used for relative finite-difference steps.
    pub fn diameter(&self) -> f64 {
        match *self {
            Domain::Interval { l } => l,
            Domain::Rectangle { lx, ly } => (lx * lx + ly * ly).sqrt(),
            Domain::Disk { r } => 2.0 * r,
        }
    }

    fn check_dim(&self, p_dim: usize) {
        assert_eq!(
            self.dim(),
            p_dim,
            "dimension mismatch: domain is {}-d, point is {}-d",
            self.dim(),
            p_dim
        );
    }

    /// Signed distance to the boundary: positive inside, negative outside.
    fn signed_boundary_distance(&self, x: &Point) -> f64 {
        self.check_dim(x.dim());
        match *self {
            Domain::Interval { l } => x.get(0).min(l - x.get(0)),
            Domain::Rectangle { lx, ly } => {
                let dx = x.get(0).min(lx - x.get(0));
                let dy = x.get(1).min(ly - x.get(1));
                dx.min(dy)
            }
            Domain::Disk { r } => r - x.norm(),
        }
    }

    /// Width of the band around the boundary treated as "on the boundary"
    /// by `locate` and `in_closure`. Points constructed to lie on the
    /// boundary (e.g. R (cos t, sin t)) land within roundoff of it, not on
    /// it exactly; the band absorbs that. `contains` stays exact so the
    /// killed walk is never kept alive by the band.
    fn boundary_band(&self) -> f64 {
        1e-12 * self.diameter()
    }

    /// Strict interior membership (no tolerance band).
    pub fn contains(&self, x: &Point) -> bool {
        self.signed_boundary_distance(x) > 0.0
    }

    /// Membership in the closed domain, boundary band included.
    pub fn in_closure(&self, x: &Point) -> bool {
        self.signed_boundary_distance(x) >= -self.boundary_band()
    }

    pub fn locate(&self, x: &Point) -> Location {
        let d = self.signed_boundary_distance(x);
        let band = self.boundary_band();
        if d > band {
            Location::Interior
        } else if d >= -band {
            Location::Boundary
        } else {
            Location::Exterior
        }
    }

    /// Euclidean distance to the boundary for interior points; 0 for points
    /// on the boundary or outside (use `locate` to distinguish those).
    pub fn distance_to_boundary(&self, x: &Point) -> f64 {
        self.signed_boundary_distance(x).max(0.0)
    }

    /// Nearest boundary point. For the disk center (projection not unique)
    /// the point at angle 0 is returned.
    pub fn project_to_boundary(&self, x: &Point) -> Point {
        self.check_dim(x.dim());
        match *self {
            Domain::Interval { l } => {
                if x.get(0) <= l - x.get(0) {
                    Point::x1(0.0)
                } else {
                    Point::x1(l)
                }
            }
            Domain::Rectangle { lx, ly } => {
                let (px, py) = (x.get(0).clamp(0.0, lx), x.get(1).clamp(0.0, ly));
                // snap the coordinate closest to its wall
                let dists = [px, lx - px, py, ly - py];
                let walls = [(0.0, py), (lx, py), (px, 0.0), (px, ly)];
                let mut best = 0;
                for i in 1..4 {
                    if dists[i] < dists[best] {
                        best = i;
                    }
                }
                Point::x2(walls[best].0, walls[best].1)
            }
            Domain::Disk { r } => {
                let n = x.norm();
                if n == 0.0 {
                    Point::x2(r, 0.0)
                } else {
                    Point::x2(x.get(0) * r / n, x.get(1) * r / n)
                }
            }
        }
    }

    /// Boundary samples covering the whole boundary.
    ///
    /// Interval: always the two endpoints. Rectangle: points distributed over
    /// the four sides proportionally to side length, centered within each
    /// side so corners (where the normal is undefined) are never emitted.
    /// Disk: n equally spaced angles starting at angle 0.
    pub fn boundary_sample(&self, n: usize) -> Vec<BoundaryPoint> {
        assert!(n >= 2, "need at least 2 boundary samples");
        match *self {
            Domain::Interval { l } => vec![
                BoundaryPoint {
                    point: Point::x1(0.0),
                    inward_normal: Direction::x1(1.0),
                    mean_curvature: 0.0,
                },
                BoundaryPoint {
                    point: Point::x1(l),
                    inward_normal: Direction::x1(-1.0),
                    mean_curvature: 0.0,
                },
            ],
            Domain::Rectangle { lx, ly } => {
                assert!(n >= 4, "rectangle needs at least one sample per side");
                let sides = [lx, ly, lx, ly];
                let perimeter = 2.0 * (lx + ly);
                // largest-remainder allocation, at least one point per side
                let mut counts = [1usize; 4];
                let mut assigned = 4;
                let mut frac: Vec<(f64, usize)> = Vec::new();
                for (i, s) in sides.iter().enumerate() {
                    let ideal = n as f64 * s / perimeter;
                    let extra = (ideal - 1.0).max(0.0);
                    counts[i] += extra.floor() as usize;
                    assigned += extra.floor() as usize;
                    frac.push((extra - extra.floor(), i));
                }
                frac.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
                let mut k = 0;
                while assigned < n {
                    counts[frac[k % 4].1] += 1;
                    assigned += 1;
                    k += 1;
                }
                let mut out = Vec::with_capacity(n);
                // side order: bottom, right, top, left (counterclockwise)
                for (side, &cnt) in counts.iter().enumerate() {
                    let len = sides[side];
                    for j in 0..cnt {
                        let s = (j as f64 + 0.5) * len / cnt as f64;
                        let (point, normal) = match side {
                            0 => (Point::x2(s, 0.0), Direction::x2(0.0, 1.0)),
                            1 => (Point::x2(lx, s), Direction::x2(-1.0, 0.0)),
                            2 => (Point::x2(lx - s, ly), Direction::x2(0.0, -1.0)),
                            _ => (Point::x2(0.0, ly - s), Direction::x2(1.0, 0.0)),
                        };
                        out.push(BoundaryPoint {
                            point,
                            inward_normal: normal,
                            mean_curvature: 0.0,
                        });
                    }
                }
                out
            }
            Domain::Disk { r } => (0..n)
                .map(|j| {
                    let theta = 2.0 * PI * j as f64 / n as f64;
                    let (s, c) = theta.sin_cos();
                    BoundaryPoint {
                        point: Point::x2(r * c, r * s),
                        inward_normal: Direction::x2(-c, -s),
                        mean_curvature: 1.0 / r,
                    }
                })
                .collect(),
        }
    }

    /// Quadrature with `order` Gauss-Legendre nodes per 1-d factor.
    ///
    /// Rectangle rules are tensor products; the disk uses Gauss-Legendre in
    /// radius (with the r Jacobian folded into the weights) times a uniform
    /// periodic rule with 2 * order angles, which integrates trigonometric
    /// polynomials of angular degree < 2 * order exactly.
    pub fn quadrature(&self, order: usize) -> Quadrature {
        assert!(order >= 1);
        match *self {
            Domain::Interval { l } => {
                let (xs, ws) = gauss_legendre_on(0.0, l, order);
                Quadrature {
                    nodes: xs.into_iter().map(Point::x1).collect(),
                    weights: ws,
                }
            }
            Domain::Rectangle { lx, ly } => {
                let (xs, wx) = gauss_legendre_on(0.0, lx, order);
                let (ys, wy) = gauss_legendre_on(0.0, ly, order);
                let mut nodes = Vec::with_capacity(order * order);
                let mut weights = Vec::with_capacity(order * order);
                for (x, wxi) in xs.iter().zip(&wx) {
                    for (y, wyi) in ys.iter().zip(&wy) {
                        nodes.push(Point::x2(*x, *y));
                        weights.push(wxi * wyi);
                    }
                }
                Quadrature { nodes, weights }
            }
            Domain::Disk { r } => {
                let (rs, wr) = gauss_legendre_on(0.0, r, order);
                let n_theta = 2 * order;
                let w_theta = 2.0 * PI / n_theta as f64;
                let mut nodes = Vec::with_capacity(order * n_theta);
                let mut weights = Vec::with_capacity(order * n_theta);
                for (ri, wri) in rs.iter().zip(&wr) {
                    for j in 0..n_theta {
                        let theta = w_theta * j as f64;
                        let (s, c) = theta.sin_cos();
                        nodes.push(Point::x2(ri * c, ri * s));
                        weights.push(wri * ri * w_theta);
                    }
                }
                Quadrature { nodes, weights }
            }
        }
    }

    /// True when every stencil point x + j*eps*nu for |j| <= reach(k) lies in
    /// the closed domain. The membership test is exact in floating point; no
    /// fudge tolerance is applied.
    pub fn stencil_fits(&self, x: &Point, nu: &Direction, eps: f64, k: u8) -> bool {
        assert!((1..=4).contains(&k), "derivative order must be 1..=4");
        assert!(eps > 0.0, "step must be positive");
        let reach = crate::deriv::reach(k) as i32;
        for j in -reach..=reach {
            let p = x.offset(nu, j as f64 * eps);
            if !self.in_closure(&p) {
                return false;
            }
        }
        true
    }

    /// Uniform interior evaluation grid; `per_axis` controls the resolution.
    /// Disk grids are polar (radii excluding 0 and R, uniform angles) plus
    /// the center point.
    pub fn interior_grid(&self, per_axis: usize) -> Vec<Point> {
        assert!(per_axis >= 1);
        match *self {
            Domain::Interval { l } => (1..=per_axis)
                .map(|i| Point::x1(l * i as f64 / (per_axis as f64 + 1.0)))
                .collect(),
            Domain::Rectangle { lx, ly } => {
                let mut out = Vec::with_capacity(per_axis * per_axis);
                for i in 1..=per_axis {
                    for j in 1..=per_axis {
                        out.push(Point::x2(
                            lx * i as f64 / (per_axis as f64 + 1.0),
                            ly * j as f64 / (per_axis as f64 + 1.0),
                        ));
                    }
                }
                out
            }
            Domain::Disk { r } => {
                let mut out = vec![Point::x2(0.0, 0.0)];
                let n_theta = (2 * per_axis).max(8);
                for i in 1..=per_axis {
                    let ri = r * i as f64 / (per_axis as f64 + 1.0);
                    for j in 0..n_theta {
                        let theta = 2.0 * PI * j as f64 / n_theta as f64;
                        let (s, c) = theta.sin_cos();
                        out.push(Point::x2(ri * c, ri * s));
                    }
                }
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn membership_is_strict() {
        let d = Domain::interval(PI);
        assert!(d.contains(&Point::x1(1.0)));
        assert!(!d.contains(&Point::x1(0.0)));
        assert!(!d.contains(&Point::x1(PI)));
        assert!(d.in_closure(&Point::x1(0.0)));
        assert_eq!(d.locate(&Point::x1(0.0)), Location::Boundary);
        assert_eq!(d.locate(&Point::x1(-0.1)), Location::Exterior);

        let disk = Domain::disk(1.0);
        assert!(disk.contains(&Point::x2(0.3, 0.2)));
        assert!(!disk.contains(&Point::x2(1.0, 0.0)));
        assert_eq!(disk.locate(&Point::x2(1.0, 0.0)), Location::Boundary);
    }

    #[test]
    fn boundary_distance_examples() {
        let d = Domain::disk(1.0);
        assert_relative_eq!(
            d.distance_to_boundary(&Point::x2(0.6, 0.0)),
            0.4,
            epsilon = 1e-15
        );
        assert_eq!(d.distance_to_boundary(&Point::x2(2.0, 0.0)), 0.0);
        assert_eq!(d.locate(&Point::x2(2.0, 0.0)), Location::Exterior);

        let r = Domain::rectangle(1.0, 2.0);
        assert_relative_eq!(
            r.distance_to_boundary(&Point::x2(0.4, 1.0)),
            0.4,
            epsilon = 1e-15
        );
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn dimension_mismatch_panics() {
        let d = Domain::interval(1.0);
        d.contains(&Point::x2(0.5, 0.5));
    }

    #[test]
    fn interval_boundary_sample() {
        let d = Domain::interval(PI);
        let b = d.boundary_sample(2);
        assert_eq!(b.len(), 2);
        assert_eq!(b[0].point, Point::x1(0.0));
        assert_eq!(b[1].point, Point::x1(PI));
        assert_eq!(b[0].inward_normal.comps(), &[1.0]);
        assert_eq!(b[1].inward_normal.comps(), &[-1.0]);
    }

    #[test]
    fn rectangle_boundary_sample_avoids_corners() {
        let d = Domain::rectangle(1.0, 1.0);
        let b = d.boundary_sample(8);
        assert_eq!(b.len(), 8);
        for bp in &b {
            let (x, y) = (bp.point.get(0), bp.point.get(1));
            let on_x_wall = x == 0.0 || x == 1.0;
            let on_y_wall = y == 0.0 || y == 1.0;
            assert!(on_x_wall ^ on_y_wall, "corner emitted: ({x}, {y})");
            assert_eq!(bp.mean_curvature, 0.0);
            assert_relative_eq!(
                d.distance_to_boundary(&bp.point),
                0.0,
                epsilon = 1e-12
            );
        }
        // spacing along the boundary stays below perimeter / (n - 1)
        let max_gap = 4.0 / 7.0;
        assert!(0.5 < max_gap);
    }

    #[test]
    fn disk_boundary_sample() {
        let d = Domain::disk(2.0);
        let b = d.boundary_sample(4);
        assert_eq!(b.len(), 4);
        assert_relative_eq!(b[0].point.get(0), 2.0, epsilon = 1e-15);
        assert_relative_eq!(b[1].point.get(1), 2.0, epsilon = 1e-15);
        for bp in &b {
            assert_relative_eq!(bp.mean_curvature, 0.5, epsilon = 1e-15);
            // inward normal points to the center
            let back = bp.point.offset(&bp.inward_normal, 2.0);
            assert!(back.norm() < 1e-12);
        }
    }

    #[test]
    fn quadrature_total_mass() {
        for (d, order) in [
            (Domain::interval(PI), 20),
            (Domain::rectangle(1.5, 0.7), 24),
            (Domain::disk(1.3), 30),
        ] {
            let q = d.quadrature(order);
            let total: f64 = q.weights.iter().sum();
            assert_relative_eq!(total, d.measure(), max_relative = 1e-10);
            for x in &q.nodes {
                assert!(d.contains(x), "node outside domain");
            }
            for w in &q.weights {
                assert!(*w > 0.0);
            }
        }
    }

    #[test]
    fn quadrature_integrates_polynomials_on_disk() {
        let d = Domain::disk(1.0);
        let q = d.quadrature(12);
        // integral of x^2 over unit disk = pi/4
        let v = q.integrate(|p| p.get(0) * p.get(0));
        assert_relative_eq!(v, PI / 4.0, max_relative = 1e-12);
        // integral of x^2 y^4
        let v = q.integrate(|p| p.get(0).powi(2) * p.get(1).powi(4));
        assert_relative_eq!(v, PI / 64.0, max_relative = 1e-11);
    }

    #[test]
    fn stencil_fit_examples() {
        let d = Domain::interval(PI);
        assert!(d.stencil_fits(&Point::x1(0.1), &Direction::x1(1.0), 0.04, 2));
        assert!(!d.stencil_fits(&Point::x1(0.1), &Direction::x1(1.0), 0.2, 2));

        let disk = Domain::disk(1.0);
        // order 4 reaches 2 eps each way: 0.91 + 0.1 > 1 sticks out,
        // 0.9 + 0.1 lands on the rim and the closed domain admits it
        assert!(!disk.stencil_fits(&Point::x2(0.91, 0.0), &Direction::x2(1.0, 0.0), 0.05, 4));
        assert!(disk.stencil_fits(&Point::x2(0.9, 0.0), &Direction::x2(1.0, 0.0), 0.05, 4));
        assert!(disk.stencil_fits(&Point::x2(0.85, 0.0), &Direction::x2(1.0, 0.0), 0.05, 4));
    }

    #[test]
    fn projection_lands_on_boundary() {
        let disk = Domain::disk(1.0);
        let p = disk.project_to_boundary(&Point::x2(0.3, 0.4));
        assert_relative_eq!(p.norm(), 1.0, epsilon = 1e-15);
        let r = Domain::rectangle(2.0, 1.0);
        let p = r.project_to_boundary(&Point::x2(0.2, 0.5));
        assert_eq!(p, Point::x2(0.0, 0.5));
    }

    #[test]
    fn serde_round_trip() {
        let d = Domain::interval(PI);
        let s = serde_json::to_string(&d).unwrap();
        assert!(s.contains("\"kind\":\"interval\""));
        assert!(s.contains("\"L\""));
        let back: Domain = serde_json::from_str(&s).unwrap();
        assert_eq!(d, back);

        let d = Domain::rectangle(1.0, 2.0);
        let s = serde_json::to_string(&d).unwrap();
        let back: Domain = serde_json::from_str(&s).unwrap();
        assert_eq!(d, back);

        let bad: Result<Domain, _> = serde_json::from_str("{\"kind\":\"disk\",\"R\":1.0}");
        assert!(bad.is_ok());
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(Domain::Interval { l: -1.0 }.validate().is_err());
        assert!(Domain::Rectangle { lx: 1.0, ly: 0.0 }.validate().is_err());
        assert!(Domain::Disk { r: f64::NAN }.validate().is_err());
    }

    #[test]
    fn direction_normalizes() {
        let nu = Direction::new(&[3.0, 4.0]).unwrap();
        assert_relative_eq!(nu.get(0), 0.6, epsilon = 1e-15);
        assert_relative_eq!(nu.get(1), 0.8, epsilon = 1e-15);
        assert!(Direction::new(&[0.0, 0.0]).is_err());
    }
}
