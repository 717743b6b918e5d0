use incompat_core::linalg::{
    eig_hermitian, kron, min_eigenvalue, partial_trace, permute_subsystems, psd_project, ComplexMatrix, SubsystemShape,
    C64,
};
use incompat_core::random::{ginibre, trial_rng};
use proptest::prelude::*;

fn random_matrix(seed: u64, rows: usize, cols: usize) -> ComplexMatrix {
    ginibre(rows, cols, &mut trial_rng(seed, 0, 0))
}

fn random_hermitian(seed: u64, n: usize) -> ComplexMatrix {
    random_matrix(seed, n, n).hermitian_part()
}

/// `Tr_B` straight from the index formula `(Tr_B M)[i,j] = Σ_k M[i·db+k, j·db+k]`.
fn trace_out_second(m: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(da, da, |i, j| (0..db).map(|k| m[(i * db + k, j * db + k)]).sum())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_trace_matches_index_formula(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let m = random_matrix(seed, da * db, da * db);
        let shape = SubsystemShape::new(vec![da, db]).unwrap();
        let got = partial_trace(&m, &shape, &[0]).unwrap();
        prop_assert!(got.difference_norm(&trace_out_second(&m, da, db)) < 1e-12);
        let both = partial_trace(&m, &shape, &[]).unwrap();
        prop_assert!((both[(0, 0)] - m.trace()).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_of_product(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let a = random_matrix(seed, da, da);
        let b = random_matrix(seed ^ 1, db, db);
        let shape = SubsystemShape::new(vec![da, db]).unwrap();
        let ab = kron(&a, &b);
        let left = partial_trace(&ab, &shape, &[0]).unwrap();
        let right = partial_trace(&ab, &shape, &[1]).unwrap();
        prop_assert!(left.difference_norm(&a.scale_c(b.trace())) < 1e-11);
        prop_assert!(right.difference_norm(&b.scale_c(a.trace())) < 1e-11);
    }

    #[test]
    fn kron_is_associative(seed in any::<u64>(), d1 in 1usize..3, d2 in 1usize..3, d3 in 1usize..3) {
        let a = random_matrix(seed, d1, d1);
        let b = random_matrix(seed ^ 2, d2, d2 + 1);
        let c = random_matrix(seed ^ 3, d3, d3);
        let l = kron(&kron(&a, &b), &c);
        let r = kron(&a, &kron(&b, &c));
        prop_assert!(l.difference_norm(&r) < 1e-12);
    }

    #[test]
    fn swap_exchanges_kron_factors(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let a = random_matrix(seed, da, da);
        let b = random_matrix(seed ^ 4, db, db);
        let shape = SubsystemShape::new(vec![da, db]).unwrap();
        let swapped = permute_subsystems(&kron(&a, &b), &shape, &[1, 0]).unwrap();
        prop_assert!(swapped.difference_norm(&kron(&b, &a)) < 1e-12);
    }

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), n in 1usize..5) {
        let m = random_hermitian(seed, n);
        let e = eig_hermitian(&m, 1e-12).unwrap();
        prop_assert!(e.reconstruct().difference_norm(&m) < 1e-10);
        let v = &e.vectors;
        prop_assert!(v.adjoint_mul(v).difference_norm(&ComplexMatrix::identity(n)) < 1e-10);
        for w in e.values.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
        let tr: f64 = e.values.iter().sum();
        prop_assert!((tr - m.trace().re).abs() < 1e-10);
    }

    /// The Frobenius distance to the PSD cone is the norm of the negative eigenvalues.
    #[test]
    fn psd_projection_is_nearest(seed in any::<u64>(), n in 1usize..5) {
        let m = random_hermitian(seed, n);
        let p = psd_project(&m);
        prop_assert!(min_eigenvalue(&p) > -1e-12);
        prop_assert!(psd_project(&p).difference_norm(&p) < 1e-10);
        let e = eig_hermitian(&m, 1e-12).unwrap();
        let neg = e.values.iter().filter(|l| **l < 0.0).map(|l| l * l).sum::<f64>().sqrt();
        prop_assert!((m.difference_norm(&p) - neg).abs() < 1e-10);
        // Any other PSD matrix is no closer.
        let g = random_matrix(seed ^ 5, n, n);
        let other = &g * &g.adjoint();
        prop_assert!(m.difference_norm(&other) >= m.difference_norm(&p) - 1e-10);
    }
}

#[test]
fn complex_phase_survives_projection() {
    let v = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
    let p = ComplexMatrix::outer(&v, &v);
    assert!(psd_project(&p).difference_norm(&p) < 1e-12);
}
