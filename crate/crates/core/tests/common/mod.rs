#![allow(dead_code)]

use jacobi_core::{DenseMatrix, SymmetricMatrix};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rows: usize, cols: usize, rng: &mut impl Rng) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// `(G + Gᵀ) / 2` for a square Gaussian `G`.
pub fn gaussian_symmetric(n: usize, seed: u64) -> SymmetricMatrix {
    let g = gaussian(n, n, &mut rng(seed));
    SymmetricMatrix::from_upper(n, |i, j| 0.5 * (g[(i, j)] + g[(j, i)]))
}

pub fn to_na(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.data())
}

pub fn from_na(m: &DMatrix<f64>) -> DenseMatrix {
    DenseMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Eigenvalues of `a` in ascending order, computed by nalgebra.
pub fn oracle_eigenvalues(a: &SymmetricMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = to_na(a.as_dense()).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn oracle_singular_values(g: &DenseMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = to_na(g).singular_values().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn spectral_norm(a: &DenseMatrix) -> f64 {
    to_na(a).singular_values().max()
}

pub fn smallest_singular_value(a: &DenseMatrix) -> f64 {
    to_na(a).singular_values().min()
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of `R`'s diagonal moved into `Q`.
pub fn haar_orthogonal(n: usize, rng: &mut impl Rng) -> DenseMatrix {
    let g = to_na(&gaussian(n, n, rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    from_na(&q)
}

pub fn sorted(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `‖A − Q diag(d) Qᵀ‖_F`.
pub fn eigen_residual(a: &SymmetricMatrix, q: &DenseMatrix, d: &[f64]) -> f64 {
    let rebuilt = q.matmul(&DenseMatrix::from_diagonal(d)).unwrap().matmul(&q.transpose()).unwrap();
    rebuilt.sub(a.as_dense()).unwrap().frobenius_norm()
}

/// Textbook right-looking LU with partial pivoting: `P A = L U`, with
/// `perm[k]` the original row at position `k`.
pub fn textbook_lupp(a: &DenseMatrix) -> (Vec<usize>, DenseMatrix, DenseMatrix) {
    let (m, n) = (a.rows(), a.cols());
    let mut w = a.clone();
    let mut perm: Vec<usize> = (0..m).collect();
    for k in 0..n {
        let mut p = k;
        for i in k + 1..m {
            if w[(i, k)].abs() > w[(p, k)].abs() {
                p = i;
            }
        }
        w.swap_rows(k, p);
        perm.swap(k, p);
        for i in k + 1..m {
            w[(i, k)] /= w[(k, k)];
            for j in k + 1..n {
                let l = w[(i, k)];
                w[(i, j)] -= l * w[(k, j)];
            }
        }
    }
    let l = DenseMatrix::from_fn(m, n, |i, j| {
        if i > j {
            w[(i, j)]
        } else if i == j {
            1.0
        } else {
            0.0
        }
    });
    let u = DenseMatrix::from_fn(n, n, |i, j| if i <= j { w[(i, j)] } else { 0.0 });
    (perm, l, u)
}
