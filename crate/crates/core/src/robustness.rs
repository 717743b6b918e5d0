//! Generalized incompatibility robustness of pairs of measurements, channels
//! and instruments.
//!
//! All three are instances of one scaled program. For operations `Φ¹_x` on
//! `H ⊗ K1` and `Φ²_y` on `H ⊗ K2`:
//!
//! ```text
//! min r  s.t.  Σ_y Tr_K2 J_xy = Φ¹_x + N¹_x,   Σ_x Tr_K1 J_xy = Φ²_y + N²_y,
//!              Σ_x Tr_K1 N¹_x = r I,            Σ_y Tr_K2 N²_y = r I,
//!              J_xy, N¹_x, N²_y ⪰ 0
//! ```
//!
//! Measurements use trivial output spaces (the effects play the role of the
//! Choi matrices); channels are one-outcome instruments. The joint is
//! `J/(1+r)` and the noise `N/r`.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{kron, permute_subsystems, ComplexMatrix, SubsystemShape, STRUCTURAL_TOL};
use crate::objects::{
    check_state, induced_channel, induced_povm, joint_marginal, ChoiOperation, Instrument,
    ObjectError, Povm, Side,
};
use crate::sdp::{solve, MatrixEquation, SdpError, SdpProblem, SdpSolution, SolveStatus, SolverSettings, HermitianCoeff};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RobustnessError {
    #[error(transparent)]
    Object(#[from] ObjectError),
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error("{0}")]
    Invalid(String),
}

/// Below this the witness is already normalized and no noise is reported.
const RESCALE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone)]
pub enum Witness {
    Measurements { joint: Povm, noise: Option<(Povm, Povm)> },
    Channels { joint: ChoiOperation, noise: Option<(ChoiOperation, ChoiOperation)> },
    Instruments { joint: Instrument, noise: Option<(Instrument, Instrument)> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    /// Largest Frobenius residual over the marginal and noise equations.
    pub marginal: f64,
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub min_eigenvalue: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct RobustnessResult {
    pub r: f64,
    pub status: SolveStatus,
    pub witness: Witness,
    pub residuals: Residuals,
    /// Output dimensions `(K1, K2)` of the joint.
    pub out_dims: (usize, usize),
}

struct Program {
    problem: SdpProblem,
    equations: Vec<MatrixEquation>,
    joint: Vec<usize>,
    noise1: Vec<usize>,
    noise2: Vec<usize>,
    r: usize,
}

fn build(d: usize, k1: usize, k2: usize, ops1: &[ComplexMatrix], ops2: &[ComplexMatrix]) -> Program {
    let (n1, n2) = (ops1.len(), ops2.len());
    let mut problem = SdpProblem::new();
    let joint: Vec<usize> = (0..n1 * n2).map(|_| problem.add_block(d * k1 * k2)).collect();
    let noise1: Vec<usize> = (0..n1).map(|_| problem.add_block(d * k1)).collect();
    let noise2: Vec<usize> = (0..n2).map(|_| problem.add_block(d * k2)).collect();
    let r = problem.add_block(1);
    problem.add_objective(r, HermitianCoeff::scaled_identity(1, 1.0));

    let dims = [d, k1, k2];
    let mut equations = Vec::new();
    for x in 0..n1 {
        let mut eq = MatrixEquation::new(d * k1);
        for y in 0..n2 {
            eq.add_partial_trace(joint[x * n2 + y], &dims, &[2], 1.0);
        }
        eq.add_block(noise1[x], -1.0);
        eq.add_rhs(&ops1[x]);
        equations.push(eq);
    }
    for y in 0..n2 {
        let mut eq = MatrixEquation::new(d * k2);
        for x in 0..n1 {
            eq.add_partial_trace(joint[x * n2 + y], &dims, &[1], 1.0);
        }
        eq.add_block(noise2[y], -1.0);
        eq.add_rhs(&ops2[y]);
        equations.push(eq);
    }
    for (noise, k) in [(&noise1, k1), (&noise2, k2)] {
        let mut eq = MatrixEquation::new(d);
        for &b in noise.iter() {
            eq.add_partial_trace(b, &[d, k], &[1], 1.0);
        }
        eq.add_scalar_identity(r, -1.0);
        equations.push(eq);
    }
    for eq in &equations {
        eq.emit(&mut problem);
    }
    Program { problem, equations, joint, noise1, noise2, r }
}

/// The raw program for a measurement pair, for solver benchmarking.
pub fn measurement_program(a1: &Povm, a2: &Povm) -> SdpProblem {
    build(a1.dim(), 1, 1, a1.effects(), a2.effects()).problem
}

struct Solved {
    r: f64,
    status: SolveStatus,
    joint: Vec<ComplexMatrix>,
    noise: Option<(Vec<ComplexMatrix>, Vec<ComplexMatrix>)>,
    residuals: Residuals,
}

fn run(
    d: usize,
    k1: usize,
    k2: usize,
    ops1: &[ComplexMatrix],
    ops2: &[ComplexMatrix],
    settings: &SolverSettings,
) -> Result<Solved, RobustnessError> {
    let prog = build(d, k1, k2, ops1, ops2);
    let sol: SdpSolution = solve(&prog.problem, settings)?;
    let blocks = &sol.block_values;
    let marginal = prog
        .equations
        .iter()
        .map(|eq| eq.residual(blocks).frobenius_norm())
        .fold(0.0, f64::max);
    let r = blocks[prog.r][(0, 0)].re.max(0.0);
    let norm = if r < RESCALE_FLOOR { 1.0 } else { 1.0 / (1.0 + r) };
    let joint = prog.joint.iter().map(|&b| blocks[b].scale(norm)).collect();
    let noise = (r >= RESCALE_FLOOR).then(|| {
        let take = |ids: &[usize]| ids.iter().map(|&b| blocks[b].scale(1.0 / r)).collect::<Vec<_>>();
        (take(&prog.noise1), take(&prog.noise2))
    });
    Ok(Solved {
        r,
        status: sol.status,
        joint,
        noise,
        residuals: Residuals {
            marginal,
            primal: sol.primal_residual,
            dual: sol.dual_residual,
            gap: sol.gap,
            min_eigenvalue: sol.min_eigenvalue,
            iterations: sol.iterations,
        },
    })
}

fn require_channel(c: &ChoiOperation) -> Result<(), RobustnessError> {
    let lmin = c.min_choi_eigenvalue();
    let tp = c.tp_residual();
    if lmin < -STRUCTURAL_TOL || tp > STRUCTURAL_TOL {
        return Err(RobustnessError::Invalid(format!(
            "not a channel (min Choi eigenvalue {lmin:.3e}, TP residual {tp:.3e})"
        )));
    }
    Ok(())
}

pub fn robustness_measurements(a1: &Povm, a2: &Povm, settings: &SolverSettings) -> Result<RobustnessResult, RobustnessError> {
    if a1.dim() != a2.dim() {
        return Err(ObjectError::Dimension(format!("POVMs act on dimensions {} and {}", a1.dim(), a2.dim())).into());
    }
    a1.require_valid()?;
    a2.require_valid()?;
    let s = run(a1.dim(), 1, 1, a1.effects(), a2.effects(), settings)?;
    let noise = match s.noise {
        Some((n1, n2)) => Some((Povm::new(n1)?, Povm::new(n2)?)),
        None => None,
    };
    Ok(RobustnessResult {
        r: s.r,
        status: s.status,
        witness: Witness::Measurements { joint: Povm::new(s.joint)?, noise },
        residuals: s.residuals,
        out_dims: (1, 1),
    })
}

pub fn robustness_channels(
    c1: &ChoiOperation,
    c2: &ChoiOperation,
    settings: &SolverSettings,
) -> Result<RobustnessResult, RobustnessError> {
    if c1.dim_in() != c2.dim_in() {
        return Err(ObjectError::Dimension("channels have different input dimensions".into()).into());
    }
    require_channel(c1)?;
    require_channel(c2)?;
    let (d, k1, k2) = (c1.dim_in(), c1.dim_out(), c2.dim_out());
    let s = run(d, k1, k2, &[c1.choi().clone()], &[c2.choi().clone()], settings)?;
    let noise = match s.noise {
        Some((n1, n2)) => Some((
            ChoiOperation::new(d, k1, n1.into_iter().next().expect("one block"))?,
            ChoiOperation::new(d, k2, n2.into_iter().next().expect("one block"))?,
        )),
        None => None,
    };
    let joint = ChoiOperation::new(d, k1 * k2, s.joint.into_iter().next().expect("one block"))?;
    Ok(RobustnessResult {
        r: s.r,
        status: s.status,
        witness: Witness::Channels { joint, noise },
        residuals: s.residuals,
        out_dims: (k1, k2),
    })
}

fn ops_of(d: usize, k: usize, blocks: Vec<ComplexMatrix>) -> Result<Instrument, ObjectError> {
    Instrument::new(blocks.into_iter().map(|b| ChoiOperation::new(d, k, b)).collect::<Result<_, _>>()?)
}

pub fn robustness_instruments(
    i1: &Instrument,
    i2: &Instrument,
    settings: &SolverSettings,
) -> Result<RobustnessResult, RobustnessError> {
    if i1.dim_in() != i2.dim_in() {
        return Err(ObjectError::Dimension("instruments have different input dimensions".into()).into());
    }
    i1.require_valid()?;
    i2.require_valid()?;
    let (d, k1, k2) = (i1.dim_in(), i1.dim_out(), i2.dim_out());
    let chois = |i: &Instrument| i.operations().iter().map(|o| o.choi().clone()).collect::<Vec<_>>();
    let s = run(d, k1, k2, &chois(i1), &chois(i2), settings)?;
    let noise = match s.noise {
        Some((n1, n2)) => Some((ops_of(d, k1, n1)?, ops_of(d, k2, n2)?)),
        None => None,
    };
    Ok(RobustnessResult {
        r: s.r,
        status: s.status,
        witness: Witness::Instruments { joint: ops_of(d, k1 * k2, s.joint)?, noise },
        residuals: s.residuals,
        out_dims: (k1, k2),
    })
}

/// Compatibility decided through the robustness: `r ≤ tol`.
pub fn is_compatible(
    i1: &Instrument,
    i2: &Instrument,
    tol: f64,
    settings: &SolverSettings,
) -> Result<(bool, RobustnessResult), RobustnessError> {
    let res = robustness_instruments(i1, i2, settings)?;
    Ok((res.r <= tol, res))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub r_instruments: f64,
    pub r_measurements: f64,
    pub r_channels: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub all_optimal: bool,
}

/// Slack allowed on the bound inequalities.
pub const BOUND_SLACK: f64 = 1e-5;

pub fn verify_bound_theorems(i1: &Instrument, i2: &Instrument, settings: &SolverSettings) -> Result<BoundReport, RobustnessError> {
    let ri = robustness_instruments(i1, i2, settings)?;
    let rm = robustness_measurements(&induced_povm(i1), &induced_povm(i2), settings)?;
    let rc = robustness_channels(&induced_channel(i1), &induced_channel(i2), settings)?;
    Ok(BoundReport {
        r_instruments: ri.r,
        r_measurements: rm.r,
        r_channels: rc.r,
        lower_ok: ri.r >= rm.r.max(rc.r) - BOUND_SLACK,
        upper_ok: ri.r <= 1.0 + BOUND_SLACK,
        all_optimal: [ri.status, rm.status, rc.status].iter().all(|s| *s == SolveStatus::Optimal),
    })
}

/// `Ψ_xy = ½ (Φ¹_x ⊗ η₂/n₂ + η₁/n₁ ⊗ Φ²_y)`, a joint for the pair mixed half
/// and half with trash-and-prepare noise.
pub fn upper_bound_joint(
    i1: &Instrument,
    i2: &Instrument,
    eta1: &ComplexMatrix,
    eta2: &ComplexMatrix,
) -> Result<Instrument, RobustnessError> {
    if i1.dim_in() != i2.dim_in() {
        return Err(ObjectError::Dimension("instruments have different input dimensions".into()).into());
    }
    if eta1.rows() != i1.dim_out() || eta2.rows() != i2.dim_out() {
        return Err(ObjectError::Dimension("noise states do not match the output spaces".into()).into());
    }
    check_state(eta1, STRUCTURAL_TOL)?;
    check_state(eta2, STRUCTURAL_TOL)?;
    let (d, k1, k2) = (i1.dim_in(), i1.dim_out(), i2.dim_out());
    let (n1, n2) = (i1.outcomes() as f64, i2.outcomes() as f64);
    // (in, K2, K1) -> (in, K1, K2)
    let shape = SubsystemShape::new(vec![d, k2, k1]).map_err(ObjectError::from)?;
    let mut ops = Vec::with_capacity(i1.outcomes() * i2.outcomes());
    for a in i1.operations() {
        let left = kron(a.choi(), eta2).scale(0.5 / n2);
        for b in i2.operations() {
            let right = permute_subsystems(&kron(b.choi(), eta1), &shape, &[0, 2, 1])
                .map_err(ObjectError::from)?
                .scale(0.5 / n1);
            ops.push(ChoiOperation::new(d, k1 * k2, &left + &right)?);
        }
    }
    Ok(Instrument::new(ops)?)
}

/// The marginals of a joint instrument on the declared grid.
pub fn marginals(joint: &Instrument, grid: (usize, usize), out_dims: (usize, usize)) -> Result<(Instrument, Instrument), ObjectError> {
    Ok((
        joint_marginal(joint, grid, out_dims, Side::First)?,
        joint_marginal(joint, grid, out_dims, Side::Second)?,
    ))
}
