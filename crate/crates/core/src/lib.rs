//! Jacobi's method for the dense symmetric eigenproblem and the SVD.
//!
//! The crate provides three eigensolvers that share one set of kernels:
//!
//! * [`scalar::scalar_jacobi`] zeroes one off-diagonal pair at a time using
//!   2×2 plane rotations.
//! * [`block::block_jacobi`] diagonalizes 2b×2b cross submatrices and applies
//!   the resulting block rotations, optionally after an LUPP or QRCP column
//!   permutation that keeps the leading b×b block of each rotation well
//!   conditioned.
//! * [`recursive::recursive_jacobi`] replaces the inner block solve with a
//!   recursive call using block size `b = n^f`.
//!
//! [`svd::jacobi_svd`] runs one-sided Jacobi on Gram blocks formed on the fly.
//! Every kernel charges a [`cost::CostLedger`] using classical flop formulas so
//! that experiments can report arithmetic cost next to convergence data.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod block;
pub mod convergence;
pub mod cost;
mod error;
mod math;
pub mod matrix;
pub mod ordering;
pub mod pivot;
pub mod recursive;
pub mod reference;
pub mod rotation;
pub mod scalar;
pub mod svd;

pub use block::{block_jacobi, BlockJacobiConfig, BlockSolver};
pub use convergence::{ConvergenceState, SweepRecord};
pub use cost::{CostLedger, Kernel};
pub use error::{Error, Result};
pub use matrix::{BlockPartition, DenseMatrix, SymmetricMatrix};
pub use ordering::OrderingKind;
pub use pivot::PivotMode;
pub use recursive::{recursive_jacobi, RecursiveJacobiConfig};
pub use rotation::{BlockRotation, OrthogonalAccumulator, Rotation2x2};
pub use scalar::{scalar_jacobi, EigenDecomposition, ScalarJacobiConfig};
pub use svd::{jacobi_svd, SvdConfig, SvdResult};

/// Stopping tolerance used by every experiment: stop once the largest
/// off-diagonal magnitude falls below this multiple of the largest input entry.
pub const DEFAULT_TOLERANCE: f64 = 1e-7;
