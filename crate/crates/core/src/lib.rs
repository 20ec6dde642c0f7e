//! Numerical toolkit for boundary pseudodistances of open sets in low
//! dimension and for the spectral quantities they control: sharp
//! Hardy-Rellich constants, polyharmonic Dirichlet eigenvalue tables,
//! maximal dyadic cube decompositions, and two-sided heat-semigroup and
//! resolvent trace bounds.
//!
//! The crate is organised around a small set of geometric kernels (see
//! [`geometry::Shape`]) that answer exact membership, boundary-distance and
//! ray-exit queries. Everything else — spherical quadrature, the
//! pseudodistance `a_m`, Whitney-style cube decompositions, the 1D
//! quadratic-form machinery and the trace bounds — is built on those
//! queries and is deterministic for a fixed seed.

pub mod dst;
pub mod error;
pub mod forms;
pub mod geometry;
pub mod pseudodistance;
pub mod quadrature;
pub mod sampling;
pub mod spectral;
pub mod spherequad;
pub mod tracebounds;
pub mod whitney;

pub use error::{Error, Result};
