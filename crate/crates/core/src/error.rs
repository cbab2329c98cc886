//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("singular jacobian (smallest singular value {sigma:.3e}) at ({x1:.6}, {x2:.6})")]
    SingularJacobian { sigma: f64, x1: f64, x2: f64 },

    #[error("zero tangent vector passed to curve measure")]
    ZeroTangent,

    #[error("map inversion did not converge after {iters} iterations (residual {residual:.3e})")]
    InversionDiverged { iters: usize, residual: f64 },

    #[error("inverted point ({x1:.6}, {x2:.6}) left the extended reference domain")]
    OutOfDomain { x1: f64, x2: f64 },

    #[error("trim loop is not closed: gap {gap:.3e} after segment {segment}")]
    OpenLoop { segment: usize, gap: f64 },

    #[error("unsupported trim segment degree {0} (only 1 and 2 are supported)")]
    UnsupportedDegree(usize),

    #[error("boundary reconstruction failed while clipping to a cell: {0}")]
    ClipFailure(String),

    #[error("cut-cell rule has negative weight sum {0:.3e}; boundary orientation is wrong")]
    NegativeArea(f64),

    #[error("unsupported Gauss rule size {0} (supported: 1..=30)")]
    UnsupportedGaussSize(usize),

    #[error("active mesh is empty: no background cell intersects the subdomain")]
    EmptyActiveMesh,

    #[error("basis derivative order {order} exceeds polynomial order {p}")]
    DerivativeOrder { order: usize, p: usize },

    #[error("unsupported basis order {0} (supported: 1..=3)")]
    UnsupportedBasisOrder(usize),

    #[error("matrix is singular or not positive definite (pivot {pivot:.3e} in row {row})")]
    SingularSystem { row: usize, pivot: f64 },

    #[error("iterative solver did not reach tolerance {tol:.1e} in {iters} iterations (residual {residual:.3e})")]
    SolverDiverged { iters: usize, tol: f64, residual: f64 },

    #[error("matrix kernel has dimension larger than the expected {expected} (found {found} eigenvalues below {threshold:.3e})")]
    KernelMismatch { expected: usize, found: usize, threshold: f64 },

    #[error("constrained solve produced residual {residual:.3e}, above the 1e-10 contract")]
    ResidualTooLarge { residual: f64 },

    #[error("Dirichlet and Neumann boundary parts overlap on patch {patch}")]
    OverlappingBoundary { patch: usize },

    #[error("study configuration error: {0}")]
    Config(String),

    #[error("trim file parse error at line {line}: {msg}")]
    TrimFile { line: usize, msg: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
