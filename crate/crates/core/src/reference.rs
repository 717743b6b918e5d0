//! Semidefinite programs with known optima, used to check the solver.

use crate::linalg::{ComplexMatrix, C64};
use crate::objects::Povm;
use crate::sdp::{Constraint, HermitianCoeff, MatrixEquation, SdpProblem};

pub struct ReferenceProblem {
    pub name: &'static str,
    pub problem: SdpProblem,
    pub optimum: f64,
}

fn scalar_coeff(v: f64) -> HermitianCoeff {
    HermitianCoeff::scaled_identity(1, v)
}

/// `min ⟨C, X⟩  s.t.  tr X = 1`: the smallest eigenvalue of `C`.
fn min_eigenvalue_problem(c: &ComplexMatrix) -> SdpProblem {
    let n = c.rows();
    let mut p = SdpProblem::new();
    let x = p.add_block(n);
    p.add_objective(x, HermitianCoeff::from_dense(c, 1e-14).expect("Hermitian"));
    p.add_constraint(Constraint::new(vec![(x, HermitianCoeff::scaled_identity(n, 1.0))], 1.0));
    p
}

/// `min λ  s.t.  λ I − M ⪰ 0` with a free `λ = λ⁺ − λ⁻`.
fn max_eigenvalue_problem(m: &ComplexMatrix) -> SdpProblem {
    let n = m.rows();
    let mut p = SdpProblem::new();
    let pos = p.add_block(1);
    let neg = p.add_block(1);
    let slack = p.add_block(n);
    p.add_objective(pos, scalar_coeff(1.0));
    p.add_objective(neg, scalar_coeff(-1.0));
    let mut eq = MatrixEquation::new(n);
    eq.add_block(slack, 1.0);
    eq.add_scalar_identity(pos, -1.0);
    eq.add_scalar_identity(neg, 1.0);
    eq.add_rhs(&m.scale(-1.0));
    eq.emit(&mut p);
    p
}

/// `min −Re tr Z` over `[[ρ, Z], [Z†, σ]] ⪰ 0`: minus the root fidelity.
fn fidelity_problem(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> SdpProblem {
    let d = rho.rows();
    let mut p = SdpProblem::new();
    let x = p.add_block(2 * d);
    let mut obj = HermitianCoeff::new(2 * d);
    for i in 0..d {
        obj.push_real_part(i, d + i, C64::new(-1.0, 0.0));
    }
    p.add_objective(x, obj);
    for (offset, target) in [(0, rho), (d, sigma)] {
        for i in 0..d {
            for j in i..d {
                let mut re = HermitianCoeff::new(2 * d);
                re.push_real_part(offset + i, offset + j, C64::new(1.0, 0.0));
                p.add_constraint(Constraint::new(vec![(x, re)], target[(i, j)].re));
                if i != j {
                    let mut im = HermitianCoeff::new(2 * d);
                    im.push_real_part(offset + i, offset + j, C64::new(0.0, -1.0));
                    p.add_constraint(Constraint::new(vec![(x, im)], target[(i, j)].im));
                }
            }
        }
    }
    p
}

/// Lovász theta of the `n`-cycle as `min −⟨J, X⟩`, `tr X = 1`, `X_ij = 0` on edges.
fn theta_cycle_problem(n: usize) -> SdpProblem {
    let mut p = SdpProblem::new();
    let x = p.add_block(n);
    let mut obj = HermitianCoeff::new(n);
    for i in 0..n {
        for j in i..n {
            obj.push(i, j, C64::new(-1.0, 0.0));
        }
    }
    p.add_objective(x, obj);
    p.add_constraint(Constraint::new(vec![(x, HermitianCoeff::scaled_identity(n, 1.0))], 1.0));
    for i in 0..n {
        let j = (i + 1) % n;
        let (a, b) = (i.min(j), i.max(j));
        for phase in [C64::new(1.0, 0.0), C64::new(0.0, -1.0)] {
            let mut c = HermitianCoeff::new(n);
            c.push_real_part(a, b, phase);
            p.add_constraint(Constraint::new(vec![(x, c)], 0.0));
        }
    }
    p
}

/// The measurement-robustness program of the qubit σx/σz pair.
fn mub_problem() -> SdpProblem {
    let half = |s: f64, m: &[&[f64]]| (&ComplexMatrix::identity(2) + &ComplexMatrix::from_real_rows(m).scale(s)).scale(0.5);
    let sx: &[&[f64]] = &[&[0.0, 1.0], &[1.0, 0.0]];
    let sz: &[&[f64]] = &[&[1.0, 0.0], &[0.0, -1.0]];
    let a = Povm::new(vec![half(1.0, sx), half(-1.0, sx)]).expect("shapes");
    let b = Povm::new(vec![half(1.0, sz), half(-1.0, sz)]).expect("shapes");
    crate::robustness::measurement_program(&a, &b)
}

pub fn reference_problems() -> Vec<ReferenceProblem> {
    let mut out = Vec::new();

    let mut p = SdpProblem::new();
    let x = p.add_block(1);
    p.add_objective(x, scalar_coeff(1.0));
    p.add_constraint(Constraint::new(vec![(x, scalar_coeff(1.0))], 3.0));
    out.push(ReferenceProblem { name: "scalar-equality", problem: p, optimum: 3.0 });

    let mut p = SdpProblem::new();
    let x = p.add_block(2);
    p.add_objective(x, HermitianCoeff::scaled_identity(2, 1.0));
    let mut eq = MatrixEquation::new(2);
    eq.add_block(x, 1.0);
    eq.add_rhs(&ComplexMatrix::from_real_rows(&[&[1.0, 0.5], &[0.5, 1.0]]));
    eq.emit(&mut p);
    out.push(ReferenceProblem { name: "trace-fixed-entries", problem: p, optimum: 2.0 });

    let sx = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
    out.push(ReferenceProblem { name: "max-eigenvalue-sigma-x", problem: max_eigenvalue_problem(&sx), optimum: 1.0 });

    let sy = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => C64::new(0.0, -1.0),
        (1, 0) => C64::new(0.0, 1.0),
        _ => C64::new(0.0, 0.0),
    });
    out.push(ReferenceProblem { name: "max-eigenvalue-sigma-y", problem: max_eigenvalue_problem(&sy), optimum: 1.0 });

    out.push(ReferenceProblem {
        name: "min-eigenvalue-diagonal",
        problem: min_eigenvalue_problem(&ComplexMatrix::diag_real(&[3.0, 1.0, 2.0])),
        optimum: 1.0,
    });

    // Eigenvalues 4 and 1.
    let c = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => C64::new(2.0, 0.0),
        (1, 1) => C64::new(3.0, 0.0),
        (0, 1) => C64::new(1.0, -1.0),
        _ => C64::new(1.0, 1.0),
    });
    out.push(ReferenceProblem { name: "min-eigenvalue-complex", problem: min_eigenvalue_problem(&c), optimum: 1.0 });

    let mut p = SdpProblem::new();
    let x = p.add_block(1);
    let y = p.add_block(1);
    p.add_objective(x, scalar_coeff(1.0));
    p.add_objective(y, scalar_coeff(1.0));
    p.add_constraint(Constraint::new(vec![(x, scalar_coeff(1.0)), (y, scalar_coeff(-1.0))], 1.0));
    out.push(ReferenceProblem { name: "two-scalar-lp", problem: p, optimum: 1.0 });

    // min −2 Re X₀₁ with unit diagonal: X = all-ones.
    let mut p = SdpProblem::new();
    let x = p.add_block(2);
    let mut obj = HermitianCoeff::new(2);
    obj.push_real_part(0, 1, C64::new(-2.0, 0.0));
    p.add_objective(x, obj);
    for i in 0..2 {
        let mut c = HermitianCoeff::new(2);
        c.push(i, i, C64::new(1.0, 0.0));
        p.add_constraint(Constraint::new(vec![(x, c)], 1.0));
    }
    out.push(ReferenceProblem { name: "unit-diagonal-correlation", problem: p, optimum: -2.0 });

    // F(ρ, I/2) = tr √(ρ/2) = (√3 + 1) / (2√2).
    let rho = ComplexMatrix::diag_real(&[0.75, 0.25]);
    let sigma = ComplexMatrix::identity(2).scale(0.5);
    out.push(ReferenceProblem {
        name: "root-fidelity",
        problem: fidelity_problem(&rho, &sigma),
        optimum: -(3f64.sqrt() + 1.0) / (2.0 * 2f64.sqrt()),
    });

    out.push(ReferenceProblem { name: "lovasz-theta-c5", problem: theta_cycle_problem(5), optimum: -(5f64.sqrt()) });

    out.push(ReferenceProblem { name: "mub-measurement-robustness", problem: mub_problem(), optimum: 3.0 - 2.0 * 2f64.sqrt() });

    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::{solve, SolveStatus, SolverSettings};

    #[test]
    fn reference_set_is_solved() {
        let set = reference_problems();
        assert!(set.len() >= 10);
        for r in set {
            let s = solve(&r.problem, &SolverSettings::default()).unwrap();
            assert_eq!(s.status, SolveStatus::Optimal, "{}", r.name);
            assert!((s.objective_value - r.optimum).abs() <= 1e-5, "{}: {} vs {}", r.name, s.objective_value, r.optimum);
        }
    }
}
