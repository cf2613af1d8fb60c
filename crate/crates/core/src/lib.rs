//! Numerical convexity checks for normalized locally biholomorphic mappings
//! on the bounded convex balanced domains
//! `D_p^n = { z in C^n : sum_j |z_j|^{p_j} < 1 }`.
//!
//! The crate evaluates the quadratic form `J_f(z, b)` whose nonnegativity over
//! tangency-constrained directions characterizes convexity of the image
//! `f(D_p^n)`, checks pointwise sufficient-condition systems for several
//! triangular mapping families, validates coefficient bounds for concrete
//! example families, and searches for criterion violations with a multi-start
//! derivative-free minimizer.
//!
//! Modules:
//! - [`numerics`]: small dense complex linear algebra and seeded sampling.
//! - [`geometry`]: the Minkowski functional of `D_p^n`, its conjugate
//!   gradient, membership, and interior sampling.
//! - [`mappings`]: the built-in mapping families with exact first and second
//!   Frechet derivatives plus a finite-difference oracle.
//! - [`criterion`]: tangency constraints, `J_f(z, b)` evaluation, and
//!   Monte-Carlo scans.
//! - [`hypotheses`]: condition checkers for the four built-in theorem systems
//!   and validators for the four example coefficient bounds.
//! - [`falsifier`]: targeted minimization of `J_f` over the constraint
//!   manifold.
//! - [`config`] / [`report`]: the JSON interfaces used by the CLI and FFI.

pub mod config;
pub mod criterion;
mod error;
pub mod falsifier;
pub mod geometry;
pub mod hypotheses;
pub mod mappings;
pub mod numerics;
pub mod report;
mod task;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
