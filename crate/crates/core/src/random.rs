//! Seeded random objects for property suites.
//!
//! Each suite trial draws from its own ChaCha stream, selected by
//! [`trial_rng`], so results do not depend on evaluation order.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::linalg::{eig_hermitian, ComplexMatrix, C64, STRUCTURAL_TOL};
use crate::objects::{choi_from_kraus, ChoiOperation, Instrument, KrausOperation, Povm};

/// Independent stream for trial `trial` of suite row `row`.
pub fn trial_rng(seed: u64, row: u32, trial: u32) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream((u64::from(row) << 32) | u64::from(trial));
    rng
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// Density matrix of rank `rank` (full rank when `rank ≥ d`).
pub fn random_state(d: usize, rank: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ginibre(d, rank.clamp(1, d), rng);
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    rho.scale(1.0 / tr)
}

pub fn random_pure_state(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    random_state(d, 1, rng)
}

/// Haar-distributed unitary (QR of a Ginibre matrix via Gram–Schmidt with phase fix).
pub fn random_unitary(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ginibre(d, d, rng);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut v = g.column(j);
        for _ in 0..2 {
            for q in &cols {
                let overlap: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= overlap * qi;
                }
            }
        }
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|c| *c /= norm);
        cols.push(v);
    }
    ComplexMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// `S^{-1/2}` for a positive definite `S`.
fn inverse_sqrt(s: &ComplexMatrix) -> ComplexMatrix {
    eig_hermitian(&s.hermitian_part(), STRUCTURAL_TOL)
        .expect("Hermitian by construction")
        .reconstruct_with(|l| 1.0 / l.sqrt())
}

/// Random POVM from normalized Wishart effects.
pub fn random_povm(d: usize, outcomes: usize, rng: &mut impl Rng) -> Povm {
    let raw: Vec<ComplexMatrix> = (0..outcomes)
        .map(|_| {
            let g = ginibre(d, d, rng);
            &g * &g.adjoint()
        })
        .collect();
    let mut total = ComplexMatrix::zeros(d, d);
    for e in &raw {
        total += e;
    }
    let w = inverse_sqrt(&total);
    Povm::new(raw.iter().map(|e| e.conjugate_by(&w).hermitian_part()).collect()).expect("consistent shapes")
}

/// Random instrument from a random isometry split into `outcomes · rank`
/// Kraus operators. The rank is raised when the pieces could not hold an
/// isometry from `d_in`.
pub fn random_instrument(d_in: usize, d_out: usize, outcomes: usize, rank: usize, rng: &mut impl Rng) -> Instrument {
    let rank = rank.max(d_in.div_ceil(outcomes * d_out));
    let pieces = outcomes * rank;
    let g = ginibre(pieces * d_out, d_in, rng);
    let v = &g * &inverse_sqrt(&g.adjoint_mul(&g));
    let ops: Vec<ChoiOperation> = (0..outcomes)
        .map(|x| {
            let kraus = (0..rank)
                .map(|k| {
                    let base = (x * rank + k) * d_out;
                    ComplexMatrix::from_fn(d_out, d_in, |a, i| v[(base + a, i)])
                })
                .collect();
            choi_from_kraus(&KrausOperation::new(d_in, d_out, kraus).expect("consistent shapes"))
        })
        .collect();
    Instrument::new(ops).expect("shared dimensions")
}

pub fn random_channel(d_in: usize, d_out: usize, rank: usize, rng: &mut impl Rng) -> ChoiOperation {
    random_instrument(d_in, d_out, 1, rank, rng).into_operations().remove(0)
}

/// Random probability vector (flat Dirichlet).
pub fn random_distribution(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objects::{validate_instrument, validate_povm};

    #[test]
    fn generated_objects_are_valid() {
        let mut rng = trial_rng(7, 0, 0);
        for _ in 0..5 {
            assert!(validate_povm(&random_povm(3, 3, &mut rng), 1e-9).valid);
            assert!(validate_instrument(&random_instrument(2, 3, 2, 2, &mut rng), 1e-9).valid);
            let u = random_unitary(3, &mut rng);
            assert!(u.adjoint_mul(&u).difference_norm(&ComplexMatrix::identity(3)) < 1e-12);
            let rho = random_state(2, 2, &mut rng);
            assert!((rho.trace().re - 1.0).abs() < 1e-12);
            let p = random_distribution(4, &mut rng);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = random_povm(2, 2, &mut trial_rng(1, 2, 3));
        let b = random_povm(2, 2, &mut trial_rng(1, 2, 3));
        let c = random_povm(2, 2, &mut trial_rng(1, 2, 4));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
