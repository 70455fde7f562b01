//! Dense linear-algebra plumbing: eigenvalues, singular values, and
//! tolerance-based matching of eigenvalue multisets.

mod eig;
mod matching;

pub use eig::eig_dense;
pub use matching::{match_multisets, MultisetMatch};

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Singular values of a dense complex matrix, ascending.
pub fn singular_values(a: &DMatrix<Complex64>) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| x.total_cmp(y));
    s
}

pub fn smallest_singular_value(a: &DMatrix<Complex64>) -> f64 {
    singular_values(a).first().copied().unwrap_or(f64::INFINITY)
}

pub fn largest_singular_value(a: &DMatrix<Complex64>) -> f64 {
    singular_values(a).last().copied().unwrap_or(0.0)
}
