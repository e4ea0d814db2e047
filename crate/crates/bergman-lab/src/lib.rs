//! Numerical laboratory for weighted Bergman kernels of smoothly bounded
//! planar domains under deformation.
//!
//! The crate computes degree-truncated weighted Bergman kernels on fibers
//! `X_t = f(t, D)` of a deformation family over the unit `t`-disc, together
//! with the objects that control how the kernel moves with `t`:
//!
//! * finite-difference Wirtinger derivatives `K_tbar`, `K_ttbar` of the
//!   kernel coefficient matrix on a fixed monomial frame,
//! * the Levi-form boundary invariant `k2` of the total space,
//! * admissible vector fields `V = d/dt - alpha d/dmu` and the projection
//!   `T` of the Kodaira-Spencer contraction onto conjugate-holomorphic forms,
//! * the triviality obstruction for holomorphic motions,
//! * plurisubharmonicity scans of `log K^t(z, zbar)` and `log K_f(t)`.
//!
//! Everything is deterministic: fixed quadratures, fixed summation order,
//! no randomness.

pub mod bergman;
pub mod cli;
pub mod family;
pub mod geometry;
pub mod variation;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("quadrature sizes too small: need n_r >= 2 and n_theta >= 4, got n_r={n_r}, n_theta={n_theta}")]
    QuadratureTooSmall { n_r: usize, n_theta: usize },
    #[error("boundary quadrature needs n_b >= 4, got {n_b}")]
    BoundaryTooSmall { n_b: usize },
    #[error("deformation parameter out of range: |t|={abs_t} exceeds t_max={t_max}")]
    ParameterOutOfRange { abs_t: f64, t_max: f64 },
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("fiber map is not injective: {0}")]
    NonInjectiveFiber(String),
    #[error("fiber-map inversion diverged after {iterations} iterations (residual {residual:.3e})")]
    InversionDiverged { iterations: usize, residual: f64 },
    #[error("point maps outside the reference disc: |z| = {abs_z}")]
    PointOutsideFiber { abs_z: f64 },
    #[error("degree {degree} too high for quadrature: maximum supported is {max}")]
    DegreeTooHigh { degree: usize, max: usize },
    #[error("Gram matrix is rank deficient: no modes retained")]
    RankDeficient,
    #[error("degenerate boundary point: |rho_mu| = {grad:.3e}")]
    DegenerateBoundary { grad: f64 },
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("weight is not strictly subharmonic on the fiber: min phi_mumubar = {min:.3e}")]
    WeightNotStrictlySubharmonic { min: f64 },
    #[error("degenerate weight: phi_mumubar = {value:.3e} at probe point")]
    DegenerateWeight { value: f64 },
    #[error("stencil spaces are inconsistent: retained mode counts {counts:?}")]
    StencilInconsistent { counts: Vec<usize> },
    #[error("probe |eta| = {abs_probe:.4} too close to the boundary (limit {limit:.4})")]
    ProbeTooCloseToBoundary { abs_probe: f64, limit: f64 },
    #[error("auxiliary Gram matrix for the weighted T-projection is singular")]
    AuxiliaryGramSingular,
    #[error("scan grid touches the fiber boundary: max |z| = {abs_z:.4}, limit {limit:.4}")]
    GridTouchesBoundary { abs_z: f64, limit: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
