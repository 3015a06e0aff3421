//! Small dense helpers for the Jordan-block model.

use nalgebra::{Complex, DMatrix};

/// Largest singular value of a real row-major matrix.
pub(crate) fn spectral_norm(m: &[f64], rows: usize, cols: usize) -> f64 {
    DMatrix::from_row_slice(rows, cols, m)
        .singular_values()
        .max()
}

/// Largest singular value of a complex `n × n` matrix given by its real and
/// imaginary parts (row-major).
pub(crate) fn complex_spectral_norm(re: &[f64], im: &[f64], n: usize) -> f64 {
    let m = DMatrix::from_fn(n, n, |i, j| Complex::new(re[i * n + j], im[i * n + j]));
    m.singular_values().max()
}
