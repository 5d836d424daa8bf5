mod oracle;

use nalgebra::DMatrix;
use nna_core::baselines::{
    cg_solve, dominance_class, gauss_seidel_solve, gmres_restarted, jacobi_solve, minres_solve, normal_equation_solve,
    Dominance,
};
use nna_core::embedding::general_solve;
use nna_core::nna::nna_solve;
use nna_core::{SolveReport, SolverConfig, Status};
use oracle::{linf, mul, rng, solve, sparse, uniform, Gen};
use proptest::prelude::*;
use rand::Rng;

/// Off-diagonal `U[-1, 1]`, diagonal of either sign exceeding the row's
/// off-diagonal mass by `U[0.1, 1]`.
fn strictly_dominant(g: &mut Gen, m: usize) -> DMatrix<f64> {
    let mut a: DMatrix<f64> = DMatrix::from_fn(m, m, |_, _| g.random_range(-1.0..1.0));
    for i in 0..m {
        let off: f64 = (0..m).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum();
        let sign = if g.random_bool(0.5) { 1.0 } else { -1.0 };
        a[(i, i)] = sign * (off + g.random_range(0.1..1.0));
    }
    a
}

/// Nonnegative, symmetric and strictly dominant with positive diagonal, so SPD.
fn spd_dominant(g: &mut Gen, m: usize) -> DMatrix<f64> {
    let u = DMatrix::from_fn(m, m, |_, _| g.random_range(0.0..1.0));
    let mut a = (&u + u.transpose()) * 0.5;
    for i in 0..m {
        let off: f64 = (0..m).filter(|&j| j != i).map(|j| a[(i, j)]).sum();
        a[(i, i)] = off + g.random_range(0.5..1.5);
    }
    a
}

fn converged(r: &SolveReport) -> bool {
    r.status == Status::Converged
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stationary_methods_converge_on_strict_dominance(seed in any::<u64>(), m in 1usize..30) {
        let mut g = rng(seed);
        let a = strictly_dominant(&mut g, m);
        let b = uniform(&mut g, m, -1.0, 1.0);
        let s = sparse(&a);
        prop_assert_eq!(dominance_class(&s).unwrap().class, Dominance::StrictlyDominant);
        let want = solve(&a, &b).unwrap();
        let cfg = SolverConfig::default().with_tol(1e-11).with_max_iter(100_000);
        for r in [jacobi_solve(&s, &b, None, &cfg).unwrap(), gauss_seidel_solve(&s, &b, None, &cfg).unwrap()] {
            prop_assert!(converged(&r), "{:?}", r.status);
            prop_assert!(linf(&r.x, &want) <= 1e-6);
        }
    }

    #[test]
    fn every_solver_agrees_on_spd_dominant_systems(seed in any::<u64>(), m in 2usize..12) {
        let mut g = rng(seed);
        let a = spd_dominant(&mut g, m);
        let x_true = uniform(&mut g, m, -1.0, 1.0);
        let b = mul(&a, &x_true);
        let s = sparse(&a);
        let cfg = SolverConfig::default().with_tol(1e-11).with_max_iter(200_000);
        let runs = [
            ("jacobi", jacobi_solve(&s, &b, None, &cfg).unwrap()),
            ("gauss-seidel", gauss_seidel_solve(&s, &b, None, &cfg).unwrap()),
            ("cg", cg_solve(&s, &b, None, &cfg).unwrap()),
            ("gmres", gmres_restarted(&s, &b, None, m, &cfg).unwrap()),
            ("minres", minres_solve(&s, &b, None, m, &cfg).unwrap()),
            ("normal-cg", normal_equation_solve(&s, &b, None, &cfg).unwrap()),
            ("nna", nna_solve(&s, &b, None, &cfg).unwrap()),
            ("general", general_solve(&s, &b, None, &cfg).unwrap()),
        ];
        for (name, r) in &runs {
            prop_assert!(converged(r), "{name}: {:?}", r.status);
        }
        for (i, (n1, r1)) in runs.iter().enumerate() {
            for (n2, r2) in &runs[i + 1..] {
                prop_assert!(linf(&r1.x, &r2.x) <= 1e-6, "{n1} vs {n2}: {}", linf(&r1.x, &r2.x));
            }
        }
    }
}
