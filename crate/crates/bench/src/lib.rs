//! Fixture builders shared by the criterion benchmarks: deterministic
//! instances at the sizes the benchmarks exercise.

use relaxproj::{gaussian_instance, AffineSubspace, LinearSubspace, Matrix, Vector};

/// Unit-norm Gaussian hyperplanes in dimension `cols`, one per row.
pub fn hyperplane_collection(rows: usize, cols: usize, seed: u64) -> Vec<AffineSubspace> {
    let (m, b) = gaussian_instance(rows, cols, seed);
    (0..rows)
        .map(|i| {
            let normal = Vector::from_iterator(cols, m.row(i).iter().cloned());
            AffineSubspace::hyperplane(&normal, b[i]).expect("gaussian rows are unit norm")
        })
        .collect()
}

/// The linear parts of [`hyperplane_collection`].
pub fn direction_collection(rows: usize, cols: usize, seed: u64) -> Vec<LinearSubspace> {
    hyperplane_collection(rows, cols, seed)
        .iter()
        .map(|a| a.direction().clone())
        .collect()
}

/// A dense square matrix with reproducible pseudo-Gaussian entries.
pub fn dense_matrix(n: usize, seed: u64) -> Matrix {
    let (m, _) = gaussian_instance(n, n, seed);
    m
}

/// A deterministic index word over `ell` symbols with no structure beyond
/// what the mixing constant provides.
pub fn index_word(len: usize, ell: usize, seed: u64) -> Vec<usize> {
    (0..len)
        .map(|n| {
            let mixed = (n as u64)
                .wrapping_add(seed)
                .wrapping_mul(0x9e37_79b9_7f4a_7c15)
                .rotate_left(17);
            (mixed % ell as u64) as usize
        })
        .collect()
}
