//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! fails. Arguments that do not start with `-` select criteria by number or
//! by a substring of their name.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use jacobi_cli::experiment::{preset, run_experiment, ExperimentSpec, MatrixSource, RunRecord};
use jacobi_cli::instances::{gaussian_matrix, gaussian_symmetric};
use jacobi_core::block::BlockSolver;
use jacobi_core::cost::{matmul_via_eig, CostLedger};
use jacobi_core::matrix::max_off_diag;
use jacobi_core::pivot::{lemma_bound, pivot_fix, recursive_lupp};
use jacobi_core::recursive::effective_block_size;
use jacobi_core::svd::Preprocess;
use jacobi_core::{
    block_jacobi, jacobi_svd, recursive_jacobi, scalar_jacobi, BlockJacobiConfig, DenseMatrix, OrderingKind, PivotMode,
    RecursiveJacobiConfig, ScalarJacobiConfig, SvdConfig, SymmetricMatrix,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

/// Stopping tolerance for the residual checks; at 1e-7 the leftover
/// off-diagonal alone exceeds `1e-9·n·‖A‖_F`.
const TIGHT: f64 = 1e-12;

fn tight_scalar() -> ScalarJacobiConfig {
    ScalarJacobiConfig { relative_tolerance: TIGHT, rotation_trigger_tolerance: TIGHT, ..Default::default() }
}

fn runs(spec: &ExperimentSpec) -> Vec<RunRecord> {
    run_experiment(spec).expect("experiment runs")
}

fn named(specs: &[ExperimentSpec], name: &str) -> ExperimentSpec {
    specs.iter().find(|s| s.name == name).cloned().expect("preset entry")
}

fn table4_sweeps() -> Verdict {
    let expected: BTreeMap<usize, usize> = [(4, 4), (8, 5), (16, 6), (32, 6)].into();
    let mut worst = 0;
    let mut medians: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut all_converged = true;
    let mut count = 0;
    for spec in preset("table4", false).unwrap() {
        let MatrixSource::GaussianSymmetric { n, .. } = spec.matrix else { unreachable!() };
        let parts = n / spec.solver.b;
        let mut sweeps: Vec<usize> = runs(&spec)
            .iter()
            .map(|r| {
                all_converged &= r.converged;
                r.sweeps
            })
            .collect();
        count += sweeps.len();
        for &s in &sweeps {
            worst = worst.max(s.abs_diff(expected[&parts]));
        }
        sweeps.sort();
        medians.entry(parts).or_default().push(sweeps[sweeps.len() / 2]);
    }
    let constant = medians.values().all(|m| m.iter().all(|&x| x == m[0]));
    let shown: Vec<String> = medians.iter().map(|(p, m)| format!("p{p}:{m:?}")).collect();
    verdict(
        all_converged && worst <= 1 && constant,
        format!("{count} runs, max deviation {worst} sweep(s), median per n {}", shown.join(" ")),
    )
}

fn fig3_adversarial() -> Verdict {
    let specs = preset("fig3", false).unwrap();
    let single = |name: &str| runs(&named(&specs, name)).remove(0);
    let adv = single("fig3_adv");
    let MatrixSource::GaussianSymmetric { n, seed } = named(&specs, "fig3_adv").matrix else { unreachable!() };
    let initial = max_off_diag(&gaussian_symmetric(n, seed)).unwrap().value;
    let adv_final = adv.final_max_offdiag.unwrap();
    let adv_ok = !adv.converged && adv.sweeps == 20 && adv_final >= 0.5 * initial;
    let lupp = single("fig3_adv_lupp");
    let qrcp = single("fig3_adv_qrcp");

    let five = |name: &str| {
        let mut spec = named(&specs, name);
        spec.repetitions = 5;
        runs(&spec)
    };
    let nadv = five("fig3_nadv");
    let random = five("fig3_adv_random");
    let slower = nadv.iter().zip(&random).filter(|(a, r)| r.converged && r.sweeps > a.sweeps).count();
    let pairs: Vec<String> = nadv.iter().zip(&random).map(|(a, r)| format!("{}/{}", a.sweeps, r.sweeps)).collect();
    verdict(
        adv_ok && lupp.converged && qrcp.converged && slower >= 4,
        format!(
            "adv: converged={} after {} sweeps, final/initial max off-diag {:.3}; lupp {} sweeps, qrcp {} sweeps; \
             nadv/random sweeps {} ({slower} of 5 slower and converged)",
            adv.converged,
            adv.sweeps,
            adv_final / initial,
            if lupp.converged { lupp.sweeps.to_string() } else { "no convergence".into() },
            if qrcp.converged { qrcp.sweeps.to_string() } else { "no convergence".into() },
            pairs.join(" ")
        ),
    )
}

#[allow(clippy::approx_constant)]
fn lemma_certified() -> Verdict {
    let mut failures = 0;
    let mut worst_margin = f64::INFINITY;
    for b in 1..=8 {
        let bound = lemma_bound(b);
        for t in 0..1000 {
            let mut q = haar_orthogonal(2 * b, 10_000 * b as u64 + t);
            pivot_fix(&mut q, b, PivotMode::Lupp, &mut CostLedger::new()).unwrap();
            let lead: Vec<usize> = (0..b).collect();
            let smin = smallest_singular_value(&q.select_rows(&lead).select_columns(&lead));
            if smin < bound - 1e-12 {
                failures += 1;
            }
            worst_margin = worst_margin.min(smin / bound);
        }
    }
    let (l1, l2) = (lemma_bound(1), lemma_bound(2));
    let values_ok = (l1 - 0.70710678).abs() <= 1e-8 && (l2 - 0.21821789).abs() <= 1e-8;
    verdict(
        failures == 0 && values_ok,
        format!(
            "8000 trials, {failures} below bound, smallest sigma_min/bound {worst_margin:.3}; bound(1)={l1:.8}, bound(2)={l2:.8}"
        ),
    )
}

fn lupp_oracle() -> Verdict {
    let mut bad = Vec::new();
    for k in 0..200u64 {
        let m = 1 + (k as usize % 12);
        let n = 1 + (k as usize / 12) % m;
        let a = gaussian_matrix(m, n, 20_000 + k);
        let res = recursive_lupp(&a).unwrap();
        let (perm, l, u) = textbook_lupp(&a);
        let scale = a.frobenius_norm();
        let dl = res.l.sub(&l).unwrap().frobenius_norm();
        let du = res.u.sub(&u).unwrap().frobenius_norm();
        let bounded = (0..m).all(|i| (0..i.min(n)).all(|j| res.l[(i, j)].abs() <= 1.0));
        if res.perm != perm || dl > 1e-13 * scale || du > 1e-13 * scale || !bounded {
            bad.push(format!("{m}x{n}"));
        }
    }
    verdict(bad.is_empty(), format!("200 instances with m in 1..=12, {} mismatches {bad:?}", bad.len()))
}

fn eigensolver_correctness() -> Verdict {
    let (mut resid, mut orth, mut agree) = (0.0f64, 0.0f64, 0.0f64);
    let mut unconverged = 0;
    for n in [32, 64, 128] {
        for seed in 0..20 {
            let a = gaussian_symmetric(n, 30_000 + 100 * n as u64 + seed);
            let results = [
                scalar_jacobi(&mut a.clone(), &tight_scalar(), &mut CostLedger::new()).unwrap(),
                block_jacobi(
                    &mut a.clone(),
                    &BlockJacobiConfig {
                        block_size: 8,
                        relative_tolerance: TIGHT,
                        solver: BlockSolver::ScalarJacobi(tight_scalar()),
                        ..Default::default()
                    },
                    &mut CostLedger::new(),
                )
                .unwrap(),
                recursive_jacobi(
                    &mut a.clone(),
                    &RecursiveJacobiConfig { relative_tolerance: TIGHT, ..Default::default() },
                    &mut CostLedger::new(),
                )
                .unwrap(),
            ];
            let nf = n as f64;
            let norm2 = spectral_norm(a.as_dense());
            let reference = sorted(&results[0].values);
            for r in &results {
                unconverged += usize::from(!r.state.converged);
                resid = resid.max(eigen_residual(a.as_dense(), &r.q, &r.values) / (nf * a.frobenius_norm()));
                orth = orth.max(r.q.orthogonality_defect() / nf);
                agree = agree.max(max_abs_diff(&sorted(&r.values), &reference) / norm2);
            }
        }
    }
    verdict(
        unconverged == 0 && resid <= 1e-9 && orth <= 1e-12 && agree <= 1e-8,
        format!(
            "180 solves at tol {TIGHT:e}, {unconverged} unconverged; max residual/(n|A|_F) {resid:.2e}, \
             max orthogonality/n {orth:.2e}, max disagreement/|A|_2 {agree:.2e}"
        ),
    )
}

fn svd_correctness() -> Verdict {
    let (mut recon, mut sigma_err) = (0.0f64, 0.0f64);
    let mut unconverged = 0;
    for (k, (m, n)) in [(64, 32), (96, 24)].into_iter().enumerate() {
        let g = gaussian_matrix(m, n, 40_000 + k as u64);
        let gram = SymmetricMatrix::from_dense_symmetrized(g.transpose().matmul(&g).unwrap()).unwrap();
        let eig = scalar_jacobi(&mut gram.clone(), &tight_scalar(), &mut CostLedger::new()).unwrap();
        let oracle: Vec<f64> = sorted(&eig.values).iter().map(|x| x.max(0.0).sqrt()).collect();
        let norm2 = spectral_norm(&g);
        for preprocess in [Preprocess::None, Preprocess::Qr, Preprocess::Qrcp] {
            let cfg = SvdConfig { preprocess, ..Default::default() };
            let res = jacobi_svd(&g, &cfg, &mut CostLedger::new()).unwrap();
            unconverged += usize::from(!res.state.converged);
            let usv =
                res.u.matmul(&DenseMatrix::from_diagonal(&res.sigma)).unwrap().matmul(&res.v.transpose()).unwrap();
            recon = recon.max(usv.sub(&g).unwrap().frobenius_norm() / g.frobenius_norm());
            sigma_err = sigma_err.max(max_abs_diff(&sorted(&res.sigma), &oracle) / norm2);
        }
    }
    verdict(
        unconverged == 0 && recon <= 1e-6 && sigma_err <= 1e-8,
        format!(
            "6 runs, {unconverged} unconverged; max reconstruction/|G|_F {recon:.2e}, max sigma error/|G|_2 {sigma_err:.2e}"
        ),
    )
}

fn flop_scaling() -> Verdict {
    // The sub-problem is charged at the closed-form eig cost. The scalar
    // backend is reported alongside; its larger constant on the 16x16
    // sub-solves inflates the n^2 b term at these sizes.
    let one_sweep = |n: usize, solver: BlockSolver| {
        let mut ledger = CostLedger::new();
        let cfg = BlockJacobiConfig { block_size: 8, max_sweeps: 1, solver, ..Default::default() };
        block_jacobi(&mut gaussian_symmetric(n, 50_000), &cfg, &mut ledger).unwrap();
        ledger.flops()
    };
    let (f128, f256) = (one_sweep(128, BlockSolver::DirectReference), one_sweep(256, BlockSolver::DirectReference));
    let ratio = f256 as f64 / f128 as f64;
    let scalar_ratio = one_sweep(256, BlockSolver::default()) as f64 / one_sweep(128, BlockSolver::default()) as f64;
    let mut eig = CostLedger::new();
    eig.charge_eig(3);
    let mut mm = CostLedger::new();
    mm.charge_matmul(2, 2, 2);
    let charges_ok = eig.flops() == 234 && mm.flops() == 12;
    verdict(
        (6.5..=9.5).contains(&ratio) && charges_ok,
        format!("one sweep b=8: {f128} flops at n=128, {f256} at n=256, ratio {ratio:.3} (scalar sub-solves {scalar_ratio:.3}); eig(3)={}, matmul(2,2,2)={}", eig.flops(), mm.flops()),
    )
}

fn base_tolerance() -> Verdict {
    let run = |seed: u64, base: f64| {
        let cfg = RecursiveJacobiConfig {
            log_block_size: 0.4,
            n_threshold: 4,
            base_tolerance: Some(base),
            max_sweeps: 30,
            ..Default::default()
        };
        recursive_jacobi(&mut gaussian_symmetric(512, 60_000 + seed), &cfg, &mut CostLedger::new()).unwrap()
    };
    let (mut strict_ok, mut tight_ok, mut loose_fail) = (0, 0, 0);
    for seed in 0..5 {
        strict_ok += usize::from(run(seed, 1e-7).state.converged);
        tight_ok += usize::from(run(seed, 1e-8).state.converged);
        loose_fail += usize::from(!run(seed, 1e-4).state.converged);
    }
    verdict(
        strict_ok >= 4 && tight_ok >= 4 && loose_fail >= 4,
        format!(
            "converged: base 1e-7 on {strict_ok}/5, base 1e-8 on {tight_ok}/5; not converged within 30 sweeps: base 1e-4 on {loose_fail}/5"
        ),
    )
}

fn max_depth() -> Verdict {
    let a = gaussian_symmetric(512, 70_000);
    let mut flops = Vec::new();
    let mut converged = true;
    let mut depth_one = None;
    for d in 1..=3 {
        let mut ledger = CostLedger::new();
        let cfg =
            RecursiveJacobiConfig { log_block_size: 0.8, n_threshold: 4, max_depth: Some(d), ..Default::default() };
        let res = recursive_jacobi(&mut a.clone(), &cfg, &mut ledger).unwrap();
        converged &= res.state.converged;
        flops.push(ledger.flops());
        if d == 1 {
            depth_one = Some(res);
        }
    }
    let depth_one = depth_one.unwrap();
    let b = effective_block_size(512, 0.8);
    let blk = block_jacobi(
        &mut a.clone(),
        &BlockJacobiConfig { block_size: b, ..Default::default() },
        &mut CostLedger::new(),
    )
    .unwrap();
    let diff = max_abs_diff(&sorted(&depth_one.values), &sorted(&blk.values));
    let monotone = flops.windows(2).all(|w| w[1] >= w[0]);
    verdict(
        converged && monotone && depth_one.state.sweeps == blk.state.sweeps && diff <= 1e-10,
        format!(
            "depths 1..3 converged={converged}, flops {flops:?}; depth 1 vs block b={b}: sweeps {}/{}, eigenvalue diff {diff:.1e}",
            depth_one.state.sweeps, blk.state.sweeps
        ),
    )
}

fn matmul_reduction() -> Verdict {
    let mut worst = 0.0f64;
    for k in 0..20 {
        let a = gaussian_matrix(4, 4, 80_000 + 2 * k);
        let b = gaussian_matrix(4, 4, 80_001 + 2 * k);
        let direct = a.matmul(&b).unwrap();
        let via = matmul_via_eig(&a, &b).unwrap();
        worst = worst.max(via.sub(&direct).unwrap().max_abs() / direct.max_abs());
    }
    verdict(worst <= 1e-8, format!("20 pairs, max relative error {worst:.2e}"))
}

fn random_ordering() -> Verdict {
    let mut converged = 0;
    let mut most = 0;
    for seed in 0..50 {
        let cfg = ScalarJacobiConfig { ordering: OrderingKind::Random(seed), max_sweeps: 20, ..Default::default() };
        let res = scalar_jacobi(&mut gaussian_symmetric(32, 90_000 + seed), &cfg, &mut CostLedger::new()).unwrap();
        converged += usize::from(res.state.converged);
        most = most.max(res.state.sweeps);
    }
    verdict(converged == 50, format!("{converged}/50 converged, at most {most} sweeps"))
}

type Criterion = (u32, &'static str, fn() -> Verdict);

const CRITERIA: [Criterion; 11] = [
    (1, "table4 sweep counts", table4_sweeps),
    (2, "fig3 adversarial block Jacobi", fig3_adversarial),
    (3, "pivot lemma bound", lemma_certified),
    (4, "recursive LUPP vs textbook", lupp_oracle),
    (5, "eigensolver correctness", eigensolver_correctness),
    (6, "svd correctness", svd_correctness),
    (7, "block sweep flop scaling", flop_scaling),
    (8, "fig4 base tolerance", base_tolerance),
    (9, "fig5 max depth", max_depth),
    (10, "matmul via eigenvectors", matmul_reduction),
    (11, "random ordering convergence", random_ordering),
];

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        for (id, name, _) in CRITERIA {
            println!("criterion {id}: {name}");
        }
        return;
    }
    let filters: Vec<&String> = args.iter().filter(|a| !a.starts_with('-')).collect();
    let selected = |id: u32, name: &str| {
        filters.is_empty()
            || filters.iter().any(|f| {
                f.as_str() == "acceptance"
                    || match f.parse::<u32>() {
                        Ok(k) => k == id,
                        Err(_) => name.contains(f.as_str()),
                    }
            })
    };
    let start = Instant::now();
    let (mut ran, mut failed) = (0, 0);
    for (id, name, check) in CRITERIA {
        if !selected(id, name) {
            continue;
        }
        let t = Instant::now();
        let v = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| verdict(false, "panicked".into()));
        ran += 1;
        failed += usize::from(!v.pass);
        println!(
            "criterion {id:>2} {name}: {} [{}; {:.1}s]",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {}/{ran} passed in {:.1}s", ran - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
