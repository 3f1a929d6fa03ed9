#![allow(dead_code)]

use jacobi_cli::instances::gaussian_matrix;
use jacobi_core::DenseMatrix;
use nalgebra::DMatrix;

pub fn to_na(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.data())
}

pub fn from_na(m: &DMatrix<f64>) -> DenseMatrix {
    DenseMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of R's diagonal moved into Q.
pub fn haar_orthogonal(n: usize, seed: u64) -> DenseMatrix {
    let qr = to_na(&gaussian_matrix(n, n, seed)).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    from_na(&q)
}

pub fn smallest_singular_value(m: &DenseMatrix) -> f64 {
    to_na(m).singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn spectral_norm(m: &DenseMatrix) -> f64 {
    to_na(m).singular_values().iter().copied().fold(0.0, f64::max)
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

/// Right-looking LU with partial pivoting, first maximal entry as pivot.
/// Returns `(perm, L, U)` with `A[perm[k], :] = (L U)[k, :]`.
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
                w[(i, j)] -= w[(i, k)] * w[(k, j)];
            }
        }
    }
    let l = DenseMatrix::from_fn(m, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Greater => w[(i, j)],
        std::cmp::Ordering::Equal => 1.0,
        std::cmp::Ordering::Less => 0.0,
    });
    let u = DenseMatrix::from_fn(n, n, |i, j| if i <= j { w[(i, j)] } else { 0.0 });
    (perm, l, u)
}

/// `‖A − Q diag(d) Qᵀ‖_F`.
pub fn eigen_residual(a: &DenseMatrix, q: &DenseMatrix, d: &[f64]) -> f64 {
    let qd = q.matmul(&DenseMatrix::from_diagonal(d)).unwrap();
    qd.matmul(&q.transpose()).unwrap().sub(a).unwrap().frobenius_norm()
}
