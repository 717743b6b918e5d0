use incompat_core::linalg::{eig_hermitian, ComplexMatrix};
use incompat_core::random::{ginibre, trial_rng};
use incompat_core::reference::reference_problems;
use incompat_core::sdp::{refine, solve, solve_from, Constraint, HermitianCoeff, SdpError, SdpProblem, SolveStatus, SolverSettings};
use proptest::prelude::*;

/// `min ⟨C, X⟩` over density matrices.
fn min_eig_problem(c: &ComplexMatrix) -> SdpProblem {
    let mut p = SdpProblem::new();
    let x = p.add_block(c.rows());
    p.add_objective(x, HermitianCoeff::from_dense(c, 0.0).unwrap());
    p.add_constraint(Constraint::new(vec![(x, HermitianCoeff::scaled_identity(c.rows(), 1.0))], 1.0));
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Oracle: the smallest eigenvalue from a direct eigendecomposition.
    #[test]
    fn min_eigenvalue_programs(seed in any::<u64>(), n in 1usize..5) {
        let c = ginibre(n, n, &mut trial_rng(seed, 30, 0)).hermitian_part();
        let want = eig_hermitian(&c, 1e-12).unwrap().min_value();
        let s = solve(&min_eig_problem(&c), &SolverSettings::default()).unwrap();
        prop_assert_eq!(s.status, SolveStatus::Optimal);
        prop_assert!((s.objective_value - want).abs() <= 1e-5, "{} vs {}", s.objective_value, want);
        prop_assert!(s.min_eigenvalue >= -1e-9);
    }

    /// Rescaling constraint rows changes nothing but the conditioning.
    #[test]
    fn constraint_scaling_invariance(seed in any::<u64>(), scale in 0.01f64..100.0) {
        let c = ginibre(3, 3, &mut trial_rng(seed, 31, 0)).hermitian_part();
        let p = min_eig_problem(&c);
        let mut q = p.clone();
        q.scale_constraints(scale);
        let a = solve(&p, &SolverSettings::default()).unwrap();
        let b = solve(&q, &SolverSettings::default()).unwrap();
        prop_assert!((a.objective_value - b.objective_value).abs() <= 1e-5);
    }
}

#[test]
fn solves_are_bitwise_deterministic() {
    for r in reference_problems() {
        let a = solve(&r.problem, &SolverSettings::default()).unwrap();
        let b = solve(&r.problem, &SolverSettings::default()).unwrap();
        assert_eq!(a.objective_value.to_bits(), b.objective_value.to_bits(), "{}", r.name);
        assert_eq!(a.iterations, b.iterations);
        assert_eq!(a.block_values, b.block_values);
    }
}

#[test]
fn refine_tightens_a_loose_solution() {
    let c = ginibre(4, 4, &mut trial_rng(3, 32, 0)).hermitian_part();
    let want = eig_hermitian(&c, 1e-12).unwrap().min_value();
    let p = min_eig_problem(&c);
    let loose = solve(&p, &SolverSettings { tol: 1e-3, ..SolverSettings::default() }).unwrap();
    let tight = refine(&p, &loose, &SolverSettings { tol: 1e-9, ..SolverSettings::default() }).unwrap();
    assert_eq!(tight.status, SolveStatus::Optimal);
    assert!((tight.objective_value - want).abs() <= (loose.objective_value - want).abs().max(1e-8));
    assert!((tight.objective_value - want).abs() <= 1e-6);

    let restarted = solve_from(&p, &tight.block_values, &SolverSettings::default()).unwrap();
    assert!((restarted.objective_value - want).abs() <= 1e-5);
}

#[test]
fn iteration_budget_is_reported() {
    let r = &reference_problems()[8];
    let s = solve(&r.problem, &SolverSettings { max_iter: 2, ..SolverSettings::default() }).unwrap();
    assert_eq!(s.status, SolveStatus::MaxIterations);
    assert!(s.iterations <= 2);
}

#[test]
fn malformed_problems_are_rejected() {
    let mut p = SdpProblem::new();
    let x = p.add_block(2);
    p.add_constraint(Constraint::new(vec![(x + 1, HermitianCoeff::scaled_identity(2, 1.0))], 1.0));
    assert!(matches!(solve(&p, &SolverSettings::default()), Err(SdpError::Malformed(_))));

    let mut q = SdpProblem::new();
    let y = q.add_block(2);
    q.add_constraint(Constraint::new(vec![(y, HermitianCoeff::scaled_identity(3, 1.0))], 1.0));
    assert!(solve(&q, &SolverSettings::default()).is_err());

    let good = min_eig_problem(&ComplexMatrix::identity(2));
    assert!(matches!(
        solve_from(&good, &[ComplexMatrix::identity(3)], &SolverSettings::default()),
        Err(SdpError::WarmStartMismatch(_))
    ));
}
