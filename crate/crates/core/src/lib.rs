//! Spectral analysis of the 2D Euler equations linearized about a steady
//! state whose vorticity has exactly two nonzero, complex conjugate Fourier
//! modes `±p`.
//!
//! The linearized operator splits into independent two-diagonal operators,
//! one per lattice line `{q + n p : n ∈ Z}`. This crate builds finite
//! truncations of those operators, computes their spectra, checks the
//! structural claims (essential spectrum on the imaginary axis, at most
//! `2κ` nonimaginary eigenvalues, four-fold symmetry), and integrates the
//! truncated linear evolution to compare growth rates with the spectral
//! abscissa.

pub mod coefficients;
pub mod error;
pub mod evolution;
pub mod exec;
pub mod lattice;
pub mod linalg;
pub mod operators;
pub mod report;
pub mod spectra;

pub use coefficients::{Circulation, Controls, ProblemInstance, SliceCoefficients};
pub use error::{Error, Result};
pub use lattice::{LatticeVector, SliceDescriptor};
pub use num_complex::Complex64;
