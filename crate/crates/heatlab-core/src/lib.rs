//! Numerical laboratory for derivative bounds of the Dirichlet heat
//! semigroup on model domains (interval, rectangle, disk).
//!
//! The crate is organized in layers: exact spectral machinery (`spectral`,
//! `heat`), a killed-diffusion Monte Carlo engine (`stoch`), derivative
//! stencils (`deriv`), and a verification harness (`verify`) that turns
//! the mathematical statements into named residual checks.

pub mod deriv;
pub mod domain;
pub mod fields;
pub mod heat;
pub mod report;
pub mod special;
pub mod spectral;
pub mod stoch;
pub mod verify;

pub use domain::{BoundaryPoint, Direction, Domain, DomainError, Location, Point, Quadrature};
pub use fields::FieldSpec;
pub use heat::{heat_kernel, survival, KernelValue, SpectralField, Truncation};
pub use report::CheckOutcome;
pub use spectral::{
    enumerate_eigenpairs, EigenEval, EigenIndex, EigenPair, Parity, SpectralBasis, SpectralError,
    SymMat2,
};
pub use stoch::{Estimate, PathConfig, SeedPolicy};
pub use verify::{
    run_suite, SuiteConfig, SuiteReport, Thm1Config, Thm1Context, Thm1Report, Thm2Report,
};
