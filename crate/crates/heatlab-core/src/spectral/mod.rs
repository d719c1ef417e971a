//! Dirichlet Laplacian eigenpairs on the model domains, with closed-form
//! values, gradients and Hessians.
//!
//! Interval: lambda_k = (k pi / L)^2, phi_k = sqrt(2/L) sin(k pi x / L).
//! Rectangle: products of the 1-d modes. Disk: lambda = (j_{m,n}/R)^2 with
//! phi = c J_m(sqrt(lambda) r) {cos, sin}(m theta); the angular multiplicity
//! for m >= 1 contributes a cosine and a sine pair per zero.
//!
//! Disk derivatives use the ladder identities
//!   (d_x + i d_y) [J_m(kr) e^{im t}] = -k J_{m+1}(kr) e^{i(m+1) t}
//!   (d_x - i d_y) [J_m(kr) e^{im t}] =  k J_{m-1}(kr) e^{i(m-1) t}
//! which are exact, involve no 1/r factors, and remain finite at the
//! center, so no special-casing of r = 0 is needed.

pub mod bessel;

use serde::{Deserialize, Serialize};
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::fmt;
use thiserror::Error;

use crate::domain::{Domain, Point};

pub use bessel::{bessel_j, bessel_j_prime, bessel_zero, bessel_zero_scan};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("argument outside validated range: {what}")]
    OutOfValidatedRange { what: String },
    #[error("Newton iteration for Bessel zero (m = {m}, n = {n}) did not converge")]
    BesselZeroNoConvergence { m: u32, n: u32 },
    #[error("invalid eigenfunction index: {0}")]
    InvalidIndex(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Cos,
    Sin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EigenIndex {
    Interval { k: u32 },
    Rectangle { kx: u32, ky: u32 },
    Disk { m: u32, n: u32, parity: Parity },
}

impl fmt::Display for EigenIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EigenIndex::Interval { k } => write!(f, "{k}"),
            EigenIndex::Rectangle { kx, ky } => write!(f, "({kx},{ky})"),
            EigenIndex::Disk { m, n, parity } => {
                let p = match parity {
                    Parity::Cos => "cos",
                    Parity::Sin => "sin",
                };
                write!(f, "({m},{n},{p})")
            }
        }
    }
}

/// Symmetric 2x2 matrix; 1-d Hessians live in the xx slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymMat2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl SymMat2 {
    pub fn zero() -> Self {
        SymMat2 { xx: 0.0, xy: 0.0, yy: 0.0 }
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    /// nu^T H nu for a unit direction.
    pub fn quad_form(&self, nu: &crate::domain::Direction) -> f64 {
        match nu.dim() {
            1 => self.xx,
            _ => {
                let (a, b) = (nu.get(0), nu.get(1));
                a * a * self.xx + 2.0 * a * b * self.xy + b * b * self.yy
            }
        }
    }

    /// Spectral norm: largest |eigenvalue|.
    pub fn opnorm(&self) -> f64 {
        let half_tr = 0.5 * (self.xx + self.yy);
        let det = self.xx * self.yy - self.xy * self.xy;
        let disc = (half_tr * half_tr - det).max(0.0).sqrt();
        (half_tr + disc).abs().max((half_tr - disc).abs())
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.xx * self.xx + 2.0 * self.xy * self.xy + self.yy * self.yy
    }

    pub fn scaled(&self, s: f64) -> Self {
        SymMat2 { xx: s * self.xx, xy: s * self.xy, yy: s * self.yy }
    }

    pub fn add(&self, o: &SymMat2) -> Self {
        SymMat2 { xx: self.xx + o.xx, xy: self.xy + o.xy, yy: self.yy + o.yy }
    }
}

/// Value, gradient and Hessian of an eigenfunction at one point.
#[derive(Debug, Clone, Copy)]
pub struct EigenEval {
    pub value: f64,
    pub grad: [f64; 2],
    pub hess: SymMat2,
}

/// One Dirichlet eigenpair, self-contained: it knows its domain, so it can
/// be evaluated without further context.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub domain: Domain,
    pub index: EigenIndex,
    pub eigenvalue: f64,
    pub norm_const: f64,
}

impl EigenPair {
    pub fn interval(l: f64, k: u32) -> Result<Self, SpectralError> {
        if k == 0 {
            return Err(SpectralError::InvalidIndex("interval index starts at 1".into()));
        }
        let lam = (k as f64 * PI / l) * (k as f64 * PI / l);
        Ok(EigenPair {
            domain: Domain::interval(l),
            index: EigenIndex::Interval { k },
            eigenvalue: lam,
            norm_const: (2.0 / l).sqrt(),
        })
    }

    pub fn rectangle(lx: f64, ly: f64, kx: u32, ky: u32) -> Result<Self, SpectralError> {
        if kx == 0 || ky == 0 {
            return Err(SpectralError::InvalidIndex("rectangle indices start at 1".into()));
        }
        let a = kx as f64 * PI / lx;
        let b = ky as f64 * PI / ly;
        Ok(EigenPair {
            domain: Domain::rectangle(lx, ly),
            index: EigenIndex::Rectangle { kx, ky },
            eigenvalue: a * a + b * b,
            norm_const: 2.0 / (lx * ly).sqrt(),
        })
    }

    pub fn disk(r: f64, m: u32, n: u32, parity: Parity) -> Result<Self, SpectralError> {
        if m == 0 && parity == Parity::Sin {
            return Err(SpectralError::InvalidIndex(
                "sin parity does not exist for m = 0".into(),
            ));
        }
        let j = bessel_zero(m, n)?;
        let kappa = j / r;
        let eps_m = if m == 0 { 1.0 } else { 2.0 };
        let j_next = bessel::bessel_j_raw(m + 1, j);
        let norm_const = (eps_m / PI).sqrt() / (r * j_next.abs());
        Ok(EigenPair {
            domain: Domain::disk(r),
            index: EigenIndex::Disk { m, n, parity },
            eigenvalue: kappa * kappa,
            norm_const,
        })
    }

    /// phi(x). Panics if x is outside the closed domain.
    pub fn eval(&self, x: &Point) -> f64 {
        assert!(self.domain.in_closure(x), "point outside closed domain");
        self.eval_unchecked(x)
    }

    pub fn grad(&self, x: &Point) -> [f64; 2] {
        assert!(self.domain.in_closure(x), "point outside closed domain");
        self.eval_all_unchecked(x).grad
    }

    pub fn hess(&self, x: &Point) -> SymMat2 {
        assert!(self.domain.in_closure(x), "point outside closed domain");
        self.eval_all_unchecked(x).hess
    }

    pub fn eval_all(&self, x: &Point) -> EigenEval {
        assert!(self.domain.in_closure(x), "point outside closed domain");
        self.eval_all_unchecked(x)
    }

    /// Evaluates the global analytic formula with no domain check. The
    /// eigenfunctions extend analytically to all of R^n; derivative stencils
    /// centered on the boundary rely on this.
    pub(crate) fn eval_unchecked(&self, x: &Point) -> f64 {
        match self.index {
            EigenIndex::Interval { k } => {
                let Domain::Interval { l } = self.domain else { unreachable!() };
                let a = k as f64 * PI / l;
                self.norm_const * (a * x.get(0)).sin()
            }
            EigenIndex::Rectangle { kx, ky } => {
                let Domain::Rectangle { lx, ly } = self.domain else { unreachable!() };
                let a = kx as f64 * PI / lx;
                let b = ky as f64 * PI / ly;
                self.norm_const * (a * x.get(0)).sin() * (b * x.get(1)).sin()
            }
            EigenIndex::Disk { m, parity, .. } => {
                let kappa = self.eigenvalue.sqrt();
                let (r, theta) = polar(x);
                let z = kappa * r;
                let jm = bessel::bessel_j_raw(m, z);
                let ang = m as f64 * theta;
                let a = match parity {
                    Parity::Cos => ang.cos(),
                    Parity::Sin => ang.sin(),
                };
                self.norm_const * jm * a
            }
        }
    }

    pub(crate) fn eval_all_unchecked(&self, x: &Point) -> EigenEval {
        match self.index {
            EigenIndex::Interval { k } => {
                let Domain::Interval { l } = self.domain else { unreachable!() };
                let a = k as f64 * PI / l;
                let (s, c) = (a * x.get(0)).sin_cos();
                let nc = self.norm_const;
                EigenEval {
                    value: nc * s,
                    grad: [nc * a * c, 0.0],
                    hess: SymMat2 { xx: -nc * a * a * s, xy: 0.0, yy: 0.0 },
                }
            }
            EigenIndex::Rectangle { kx, ky } => {
                let Domain::Rectangle { lx, ly } = self.domain else { unreachable!() };
                let a = kx as f64 * PI / lx;
                let b = ky as f64 * PI / ly;
                let (sx, cx) = (a * x.get(0)).sin_cos();
                let (sy, cy) = (b * x.get(1)).sin_cos();
                let nc = self.norm_const;
                EigenEval {
                    value: nc * sx * sy,
                    grad: [nc * a * cx * sy, nc * b * sx * cy],
                    hess: SymMat2 {
                        xx: -nc * a * a * sx * sy,
                        xy: nc * a * b * cx * cy,
                        yy: -nc * b * b * sx * sy,
                    },
                }
            }
            EigenIndex::Disk { m, parity, .. } => self.disk_eval_all(m, parity, x),
        }
    }

    fn disk_eval_all(&self, m: u32, parity: Parity, x: &Point) -> EigenEval {
        let kappa = self.eigenvalue.sqrt();
        let (r, theta) = polar(x);
        let z = kappa * r;
        let w = bessel::j_window(m + 2, z);
        // V_k = J_k(z) e^{ik theta}, extended to negative k by
        // J_{-k} = (-1)^k J_k
        let v = |k: i32| -> (f64, f64) {
            let (jval, kk) = if k >= 0 {
                (w[k as usize], k)
            } else {
                let a = (-k) as usize;
                (if a % 2 == 0 { w[a] } else { -w[a] }, k)
            };
            let ang = kk as f64 * theta;
            let (s, c) = ang.sin_cos();
            (jval * c, jval * s)
        };
        let mi = m as i32;
        let vm = v(mi);
        let vp1 = v(mi + 1);
        let vm1 = v(mi - 1);
        let vp2 = v(mi + 2);
        let vm2 = v(mi - 2);

        let h = 0.5 * kappa;
        let q = 0.25 * kappa * kappa;
        // d_x V = (kappa/2) (V_{m-1} - V_{m+1})
        let dx = (h * (vm1.0 - vp1.0), h * (vm1.1 - vp1.1));
        // d_y V = i (kappa/2) (V_{m+1} + V_{m-1})
        let dy = (-h * (vp1.1 + vm1.1), h * (vp1.0 + vm1.0));
        // V_xx = (kappa^2/4) (V_{m+2} + V_{m-2} - 2 V_m)
        let dxx = (
            q * (vp2.0 + vm2.0 - 2.0 * vm.0),
            q * (vp2.1 + vm2.1 - 2.0 * vm.1),
        );
        // V_yy = -(kappa^2/4) (V_{m+2} + V_{m-2} + 2 V_m)
        let dyy = (
            -q * (vp2.0 + vm2.0 + 2.0 * vm.0),
            -q * (vp2.1 + vm2.1 + 2.0 * vm.1),
        );
        // V_xy = -i (kappa^2/4) (V_{m+2} - V_{m-2})
        let dxy = (q * (vp2.1 - vm2.1), -q * (vp2.0 - vm2.0));

        let nc = self.norm_const;
        let pick = |re_im: (f64, f64)| match parity {
            Parity::Cos => nc * re_im.0,
            Parity::Sin => nc * re_im.1,
        };
        EigenEval {
            value: pick(vm),
            grad: [pick(dx), pick(dy)],
            hess: SymMat2 {
                xx: pick(dxx),
                xy: pick(dxy),
                yy: pick(dyy),
            },
        }
    }

    /// Directional derivative nu . grad phi.
    pub fn grad_dir(&self, x: &Point, nu: &crate::domain::Direction) -> f64 {
        let g = self.grad(x);
        match nu.dim() {
            1 => nu.get(0) * g[0],
            _ => nu.get(0) * g[0] + nu.get(1) * g[1],
        }
    }

    /// Second directional derivative nu^T (D^2 phi) nu.
    pub fn hess_dir(&self, x: &Point, nu: &crate::domain::Direction) -> f64 {
        self.hess(x).quad_form(nu)
    }

    /// Upper bound for |phi| on the domain, used for truncation control:
    /// |phi_k| <= norm_const everywhere (|J_m| <= 1, |sin|, |cos| <= 1).
    pub fn sup_bound(&self) -> f64 {
        self.norm_const
    }
}

fn polar(x: &Point) -> (f64, f64) {
    let (px, py) = (x.get(0), x.get(1));
    let r = (px * px + py * py).sqrt();
    // atan2(0, 0) = 0 keeps every formula finite at the center
    let theta = py.atan2(px);
    (r, theta)
}

/// The first `count` eigenpairs ordered by eigenvalue, ties broken by
/// lexicographic index (cos before sin on the disk).
pub fn enumerate_eigenpairs(d: &Domain, count: usize) -> Result<Vec<EigenPair>, SpectralError> {
    assert!(count >= 1);
    match *d {
        Domain::Interval { l } => (1..=count as u32).map(|k| EigenPair::interval(l, k)).collect(),
        Domain::Rectangle { lx, ly } => {
            let lam = |k: u32, j: u32| {
                let a = k as f64 * PI / lx;
                let b = j as f64 * PI / ly;
                a * a + b * b
            };
            // Weyl count with headroom; grow if the guess was too tight
            let mut cap = 1.5 * 4.0 * PI * count as f64 / (lx * ly) + 4.0 * lam(1, 1);
            let mut idx: Vec<(u32, u32)>;
            loop {
                idx = Vec::new();
                let kmax = (cap.sqrt() * lx / PI).ceil() as u32;
                for k in 1..=kmax {
                    let lmax = ((cap - (k as f64 * PI / lx).powi(2)).max(0.0).sqrt() * ly / PI)
                        .floor() as u32;
                    for j in 1..=lmax {
                        if lam(k, j) <= cap {
                            idx.push((k, j));
                        }
                    }
                }
                if idx.len() >= count {
                    break;
                }
                cap *= 2.0;
            }
            idx.sort_by(|a, b| {
                lam(a.0, a.1)
                    .total_cmp(&lam(b.0, b.1))
                    .then(a.cmp(b))
            });
            idx.truncate(count);
            idx.into_iter()
                .map(|(k, j)| EigenPair::rectangle(lx, ly, k, j))
                .collect()
        }
        Domain::Disk { r } => {
            #[derive(PartialEq)]
            struct Entry {
                j: f64,
                m: u32,
                n: u32,
            }
            impl Eq for Entry {}
            impl Ord for Entry {
                fn cmp(&self, o: &Self) -> std::cmp::Ordering {
                    // reversed: BinaryHeap is a max-heap, we want the min
                    o.j.total_cmp(&self.j).then(o.m.cmp(&self.m))
                }
            }
            impl PartialOrd for Entry {
                fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
                    Some(self.cmp(o))
                }
            }
            let mut heap = BinaryHeap::new();
            heap.push(Entry { j: bessel_zero(0, 1)?, m: 0, n: 1 });
            let mut out = Vec::with_capacity(count);
            while out.len() < count {
                let Entry { m, n, .. } = heap.pop().expect("heap never empties");
                out.push(EigenPair::disk(r, m, n, Parity::Cos)?);
                if m >= 1 && out.len() < count {
                    out.push(EigenPair::disk(r, m, n, Parity::Sin)?);
                }
                // zeros interlace: seeding row m+1 when row m is first
                // consumed keeps the frontier complete
                if n == 1 {
                    heap.push(Entry { j: bessel_zero(m + 1, 1)?, m: m + 1, n: 1 });
                }
                heap.push(Entry { j: bessel_zero(m, n + 1)?, m, n: n + 1 });
            }
            Ok(out)
        }
    }
}

/// An ordered eigenbasis for one domain.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    pub domain: Domain,
    pub pairs: Vec<EigenPair>,
}

impl SpectralBasis {
    pub fn new(domain: Domain, count: usize) -> Result<Self, SpectralError> {
        let pairs = enumerate_eigenpairs(&domain, count)?;
        Ok(SpectralBasis { domain, pairs })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn lambda_max(&self) -> f64 {
        self.pairs.last().map(|p| p.eigenvalue).unwrap_or(0.0)
    }

    /// Smallest time at which the truncated kernel tail is certified below
    /// `tol` relative to the leading term, given the modes available.
    pub fn t_min(&self, tol: f64) -> f64 {
        let first = &self.pairs[0];
        let last = self.pairs.last().unwrap();
        let b1 = first.sup_bound().powi(2);
        let bn = last.sup_bound().powi(2) * self.len() as f64;
        let gap = (last.eigenvalue - first.eigenvalue).max(1e-300);
        (bn / (tol * b1)).ln().max(0.0) / gap
    }
}

/// CSV header for eigenpair tables.
pub fn eigen_csv_header() -> &'static str {
    "kind,index,lambda,norm_const"
}

/// One CSV row: kind, index, lambda, norm_const with full precision. The
/// index is quoted because multi-index `Display` output contains commas.
pub fn eigen_csv_row(p: &EigenPair) -> String {
    format!(
        "{},\"{}\",{},{}",
        p.domain.kind_name(),
        p.index,
        crate::report::fmt_f64(p.eigenvalue),
        crate::report::fmt_f64(p.norm_const)
    )
}
