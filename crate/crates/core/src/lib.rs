//! Dimer models on doubly periodic bipartite planar graphs.
//!
//! Starting from a fundamental domain ([`lattice`]) the crate builds the
//! magnetic Kasteleyn matrix and its characteristic polynomial
//! ([`charpoly`]), the amoeba, Ronkin function and phase diagram
//! ([`amoeba`]), the surface tension ([`tension`]), local Gibbs statistics
//! ([`gibbs`]), finite-torus samplers ([`sampler`]) and spectral-curve
//! maximality checks ([`harnack`]).

pub mod amoeba;
pub mod charpoly;
pub mod error;
pub mod export;
pub mod gibbs;
pub mod harnack;
pub mod lattice;
pub mod linalg;
pub mod newton;
pub mod poly;
pub mod quad;
pub mod sampler;
pub mod scalar;
pub mod tension;

pub use error::{DimerError, Result};
pub use scalar::{Rational, Scalar};

/// Characteristic polynomial with exact rational coefficients.
pub type ExactPoly = poly::LaurentPoly2<Rational>;
/// Characteristic polynomial with `f64` coefficients.
pub type FloatPoly = poly::LaurentPoly2<f64>;
pub type ExactMatrix = linalg::DenseMatrix<Rational>;
pub type ComplexMatrix = linalg::DenseMatrix<num_complex::Complex64>;
