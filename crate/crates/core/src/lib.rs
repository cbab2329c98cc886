//! Cut finite element method for the Laplace-Beltrami operator on multipatch
//! trimmed parametric surfaces.
//!
//! A surface is described patchwise: each patch is the image of a trimmed
//! subdomain of the unit square under a smooth map. Structured background
//! grids are laid over the reference squares, so the trim curves cut the
//! meshes arbitrarily. The discretization couples patches weakly with
//! Nitsche's method and controls the cut elements with a ghost-penalty
//! stabilization acting on jumps of normal derivatives in reference
//! coordinates. All integrals are pulled back to the reference domain where
//! the patch maps induce a Riemannian metric.
//!
//! Module map:
//! - [`geometry`]: patch maps, metric tensor, differential operators and
//!   built-in surfaces (sphere, torus, flat).
//! - [`trim`]: trim curves, reference subdomains, point classification and
//!   curve/grid clipping.
//! - [`mesh`]: active background meshes, cell classification, stabilized
//!   face sets.
//! - [`quadrature`]: 1D Gauss rules, the divergence-theorem rule on cut
//!   cells, interface quadrature partitions.
//! - [`basis`]: tensor-product Lagrange shape functions and DOF numbering.
//! - [`linalg`]: sparse symmetric storage, direct/iterative solvers,
//!   condition number estimation.
//! - [`assembly`]: the stabilized Nitsche system (bulk, interface, ghost
//!   penalty, boundary terms) and the constrained solve.
//! - [`norms`]: L2/energy error evaluation and empirical convergence orders.
//! - [`harness`]: model problems, studies and CSV emission.

pub mod assembly;
pub mod basis;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod mesh;
pub mod norms;
pub mod quadrature;
pub mod trim;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
