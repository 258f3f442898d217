//! Sparse storage and a direct solver for symmetric positive definite systems.

mod envelope;
mod sparse;

pub use envelope::{reverse_cuthill_mckee, EnvelopeCholesky};
pub use sparse::CsrMatrix;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
