//! Seeded random test matrices.

use jacobi_core::{DenseMatrix, SymmetricMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// m×n matrix of independent standard normal entries, row-major draw order.
pub fn gaussian_matrix(m: usize, n: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..m * n).map(|_| StandardNormal.sample(&mut rng)).collect();
    DenseMatrix::new(m, n, data).expect("length matches")
}

/// `(G + Gᵀ) / 2` for a standard Gaussian `G`.
pub fn gaussian_symmetric(n: usize, seed: u64) -> SymmetricMatrix {
    SymmetricMatrix::from_dense_symmetrized(gaussian_matrix(n, n, seed)).expect("square and finite")
}
