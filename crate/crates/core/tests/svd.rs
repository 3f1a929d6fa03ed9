mod common;

use common::*;
use jacobi_core::block::BlockSolver;
use jacobi_core::svd::{GramSolver, Preprocess};
use jacobi_core::{
    jacobi_svd, scalar_jacobi, BlockJacobiConfig, CostLedger, DenseMatrix, OrderingKind, PivotMode, ScalarJacobiConfig,
    SvdConfig, SvdResult, SymmetricMatrix,
};

fn reconstruction_error(g: &DenseMatrix, res: &SvdResult) -> f64 {
    let us = res.u.matmul(&DenseMatrix::from_diagonal(&res.sigma)).unwrap();
    us.matmul(&res.v.transpose()).unwrap().sub(g).unwrap().frobenius_norm()
}

fn check(g: &DenseMatrix, res: &SvdResult, preprocessed: bool, label: &str) {
    assert!(res.state.converged, "{label}");
    let err = reconstruction_error(g, res);
    assert!(err <= 1e-6 * g.frobenius_norm(), "{label}: reconstruction {err}");
    let sigma_err = max_abs_diff(&sorted(&res.sigma), &oracle_singular_values(g));
    assert!(sigma_err <= 1e-8 * spectral_norm(g), "{label}: sigma {sigma_err}");
    let n = g.cols() as f64;
    // With preprocessing V comes from the inner U, so it is only as
    // orthogonal as the stopping tolerance allows.
    let v_bound = if preprocessed { 10.0 * 1e-7 } else { 64.0 * f64::EPSILON * n * 10.0 };
    let v_defect = res.v.orthogonality_defect();
    assert!(v_defect <= v_bound, "{label}: V defect {v_defect}");
    let utu = res.u.transpose().matmul(&res.u).unwrap();
    let defect = utu.sub(&DenseMatrix::identity(g.cols())).unwrap().max_abs();
    assert!(defect <= 10.0 * 1e-7, "{label}: U defect {defect}");
}

#[test]
fn matches_oracle_across_configurations() {
    let g = gaussian(64, 32, &mut rng(1));
    let configs = [
        SvdConfig { block_size: 1, ..Default::default() },
        SvdConfig { block_size: 4, ..Default::default() },
        SvdConfig { block_size: 8, pivot: PivotMode::Lupp, ..Default::default() },
        SvdConfig { block_size: 8, pivot: PivotMode::Qrcp, ordering: OrderingKind::ColumnCyclic, ..Default::default() },
        SvdConfig { block_size: 5, gram_solver: GramSolver::DirectReference, ..Default::default() },
        SvdConfig {
            block_size: 8,
            gram_solver: GramSolver::BlockJacobi(BlockJacobiConfig {
                block_size: 4,
                relative_tolerance: 1e-12,
                solver: BlockSolver::ScalarJacobi(ScalarJacobiConfig {
                    relative_tolerance: 1e-12,
                    rotation_trigger_tolerance: 1e-12,
                    ..Default::default()
                }),
                ..Default::default()
            }),
            ..Default::default()
        },
        SvdConfig { block_size: 4, preprocess: Preprocess::Qr, ..Default::default() },
        SvdConfig { block_size: 4, preprocess: Preprocess::Qrcp, ..Default::default() },
    ];
    for cfg in configs {
        let res = jacobi_svd(&g, &cfg, &mut CostLedger::new()).unwrap();
        check(&g, &res, cfg.preprocess != Preprocess::None, &format!("{cfg:?}"));
    }
}

#[test]
fn preprocessing_agrees_with_direct_run() {
    let g = gaussian(96, 24, &mut rng(2));
    let direct = jacobi_svd(&g, &SvdConfig::default(), &mut CostLedger::new()).unwrap();
    let pre = jacobi_svd(&g, &SvdConfig { preprocess: Preprocess::Qrcp, ..Default::default() }, &mut CostLedger::new())
        .unwrap();
    check(&g, &pre, true, "qrcp");
    assert!(max_abs_diff(&sorted(&direct.sigma), &sorted(&pre.sigma)) <= 1e-8 * spectral_norm(&g));
}

#[test]
fn matches_gram_eigenvalues() {
    let g = gaussian(40, 12, &mut rng(3));
    let res = jacobi_svd(&g, &SvdConfig::default(), &mut CostLedger::new()).unwrap();
    let gram = SymmetricMatrix::from_dense_symmetrized(g.transpose().matmul(&g).unwrap()).unwrap();
    let mut w = gram.clone();
    let eig = scalar_jacobi(&mut w, &ScalarJacobiConfig::default(), &mut CostLedger::new()).unwrap();
    let from_gram: Vec<f64> = sorted(&eig.values).iter().map(|&x| x.max(0.0).sqrt()).collect();
    assert!(max_abs_diff(&sorted(&res.sigma), &from_gram) <= 1e-8 * spectral_norm(&g));
}

#[test]
fn frobenius_norm_is_preserved() {
    let g = gaussian(30, 10, &mut rng(4));
    let res = jacobi_svd(&g, &SvdConfig { block_size: 2, ..Default::default() }, &mut CostLedger::new()).unwrap();
    let total: f64 = res.sigma.iter().map(|s| s * s).sum::<f64>().sqrt();
    assert!((total - g.frobenius_norm()).abs() <= 1e-12 * g.frobenius_norm());
}

#[test]
fn scalar_case_matches_two_sided_on_gram() {
    // b = 1 with row-cyclic order runs the same rotation sequence as scalar
    // Jacobi on GᵀG, up to column signs of V.
    let g = gaussian(20, 8, &mut rng(5));
    let svd = jacobi_svd(&g, &SvdConfig { block_size: 1, ..Default::default() }, &mut CostLedger::new()).unwrap();
    let gram = SymmetricMatrix::from_dense_symmetrized(g.transpose().matmul(&g).unwrap()).unwrap();
    let mut w = gram.clone();
    let eig = scalar_jacobi(&mut w, &ScalarJacobiConfig::default(), &mut CostLedger::new()).unwrap();
    for j in 0..8 {
        let a = svd.v.column(j);
        let b = eig.q.column(j);
        let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot.abs() - 1.0).abs() <= 1e-8, "column {j}: {dot}");
    }
}

#[test]
fn history_reports_both_measures() {
    let g = gaussian(24, 12, &mut rng(6));
    let mut ledger = CostLedger::new();
    let res = jacobi_svd(&g, &SvdConfig { block_size: 3, ..Default::default() }, &mut ledger).unwrap();
    let last = res.state.history.last().unwrap();
    assert!(last.max_off_diag <= 1e-7);
    assert!(last.off_diag_norm >= 0.0);
    assert_eq!(last.cum_flops, ledger.flops());
}
