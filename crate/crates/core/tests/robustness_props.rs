//! Solver-backed invariants of the robustness. Each case solves a few SDPs,
//! so case counts are small.

use incompat_core::linalg::{kron, ComplexMatrix};
use incompat_core::objects::{
    make_identity_instrument, make_lueders, make_trash_prepare, ChoiOperation, Instrument, Povm,
};
use incompat_core::random::{random_distribution, random_instrument, random_state, random_unitary, trial_rng};
use incompat_core::robustness::{robustness_channels, robustness_instruments, robustness_measurements};
use incompat_core::sdp::{SolveStatus, SolverSettings};
use incompat_core::structure::{is_post_processing_of, post_process, PostProcessingFamily};
use proptest::prelude::*;

const SLACK: f64 = 2e-5;

fn r_i(a: &Instrument, b: &Instrument) -> f64 {
    let res = robustness_instruments(a, b, &SolverSettings::default()).unwrap();
    assert_eq!(res.status, SolveStatus::Optimal);
    res.r
}

/// `ρ ↦ U Φ_x(ρ) U†`.
fn rotate_outputs(i: &Instrument, u: &ComplexMatrix) -> Instrument {
    let big = kron(&ComplexMatrix::identity(i.dim_in()), u);
    Instrument::new(
        i.operations()
            .iter()
            .map(|op| ChoiOperation::new(i.dim_in(), i.dim_out(), op.choi().conjugate_by(&big)).unwrap())
            .collect(),
    )
    .unwrap()
}

fn permute_outcomes(i: &Instrument) -> Instrument {
    let mut ops = i.operations().to_vec();
    ops.reverse();
    Instrument::new(ops).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn robustness_is_symmetric(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 20, 0);
        let a = random_instrument(2, 2, 2, 1, &mut rng);
        let b = random_instrument(2, 2, 2, 2, &mut rng);
        prop_assert!((r_i(&a, &b) - r_i(&b, &a)).abs() <= SLACK);
    }

    /// Mixing with a trash-and-prepare pair: by convexity
    /// `R((1−t)I + tT) ≤ (1−t) R(I)`.
    #[test]
    fn noise_does_not_increase_robustness(seed in any::<u64>(), t in 0.05f64..0.9) {
        let mut rng = trial_rng(seed, 21, 0);
        let a = random_instrument(2, 2, 2, 1, &mut rng);
        let b = random_instrument(2, 2, 2, 1, &mut rng);
        let trash = |rng: &mut rand_chacha::ChaCha20Rng| {
            let p = random_distribution(2, rng);
            let s: Vec<_> = (0..2).map(|_| random_state(2, 2, rng)).collect();
            make_trash_prepare(2, &p, &s).unwrap()
        };
        let (ta, tb) = (trash(&mut rng), trash(&mut rng));
        let na = Instrument::mix(&[(1.0 - t, &a), (t, &ta)]).unwrap();
        let nb = Instrument::mix(&[(1.0 - t, &b), (t, &tb)]).unwrap();
        prop_assert!(r_i(&na, &nb) <= (1.0 - t) * r_i(&a, &b) + SLACK);
    }

    /// Output unitaries and outcome relabelings give post-processing
    /// equivalent instruments, which share the robustness.
    #[test]
    fn equivalent_instruments_share_robustness(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 22, 0);
        let a = random_instrument(2, 2, 2, 1, &mut rng);
        let b = random_instrument(2, 2, 2, 1, &mut rng);
        let u = random_unitary(2, &mut rng);
        let base = r_i(&a, &b);
        prop_assert!((r_i(&rotate_outputs(&a, &u), &b) - base).abs() <= SLACK);
        prop_assert!((r_i(&a, &permute_outcomes(&b)) - base).abs() <= SLACK);
    }

    #[test]
    fn post_processing_is_monotone(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 23, 0);
        let a = random_instrument(2, 2, 2, 1, &mut rng);
        let b = random_instrument(2, 2, 2, 1, &mut rng);
        let fam = PostProcessingFamily::new((0..2).map(|_| random_instrument(2, 2, 3, 1, &mut rng)).collect()).unwrap();
        let child = post_process(&a, &fam).unwrap();
        prop_assert!(r_i(&child, &b) <= r_i(&a, &b) + SLACK);
    }
}

// Values below were computed by tests/oracles/robustness_oracle.py.

#[test]
fn frozen_identity_values() {
    let id = make_identity_instrument(2).unwrap();
    assert!((r_i(&id, &id) - 1.0 / 3.0).abs() <= 1e-5);
    let c = ChoiOperation::identity(2);
    let rc = robustness_channels(&c, &c, &SolverSettings::default()).unwrap();
    assert!((rc.r - 1.0 / 3.0).abs() <= 1e-5);
}

#[test]
fn frozen_lueders_of_trivial_value() {
    let trivial = Povm::trivial(2, &[0.5, 0.5]).unwrap();
    let l = make_lueders(&trivial).unwrap();
    assert!((r_i(&l, &l) - 1.0 / 3.0).abs() <= 1e-5);
}

#[test]
fn frozen_post_processing_gap() {
    let id = make_identity_instrument(2).unwrap();
    let trash = make_trash_prepare(2, &[1.0], &[ComplexMatrix::basis_projector(2, 0)]).unwrap();
    let check = is_post_processing_of(&id, &trash, 1e-5, &SolverSettings::default()).unwrap();
    assert!(!check.is_post_processing);
    assert!((check.gap - 1.5).abs() <= 1e-5, "{}", check.gap);
    let back = is_post_processing_of(&trash, &id, 1e-5, &SolverSettings::default()).unwrap();
    assert!(back.is_post_processing);
}

#[test]
fn measurement_robustness_is_symmetric_in_order() {
    let mut rng = trial_rng(5, 24, 0);
    let a = incompat_core::random::random_povm(2, 3, &mut rng);
    let b = incompat_core::random::random_povm(2, 2, &mut rng);
    let s = SolverSettings::default();
    let ab = robustness_measurements(&a, &b, &s).unwrap().r;
    let ba = robustness_measurements(&b, &a, &s).unwrap().r;
    assert!((ab - ba).abs() <= SLACK);
}
