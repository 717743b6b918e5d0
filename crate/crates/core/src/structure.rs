//! Post-processing, indecomposable instruments, Naimark dilation and the
//! explicit constructions built from them.

use serde::Serialize;

use crate::linalg::{eig_hermitian, kron, ComplexMatrix, C64, STRUCTURAL_TOL, ZERO};
use crate::objects::{
    check_state, choi_from_kraus, compose_operations, joint_marginal, kraus_from_choi, make_identity_instrument,
    make_trash_prepare, tensor_operation, ChoiOperation, Instrument, KrausOperation, ObjectError, Povm, Side,
};
use crate::robustness::{robustness_instruments, RobustnessError};
use crate::sdp::{solve, HermitianCoeff, MatrixEquation, SdpProblem, SolveStatus, SolverSettings};

/// Relative eigenvalue threshold for rank decisions.
pub const RANK_TOL: f64 = 1e-8;

/// One instrument `R^x` per parent outcome, all on the parent's output space
/// with a shared outcome set and output space.
#[derive(Debug, Clone, PartialEq)]
pub struct PostProcessingFamily {
    children: Vec<Instrument>,
}

impl PostProcessingFamily {
    pub fn new(children: Vec<Instrument>) -> Result<Self, ObjectError> {
        let first = children.first().ok_or(ObjectError::Empty)?;
        let key = (first.dim_in(), first.dim_out(), first.outcomes());
        if let Some(bad) = children.iter().position(|c| (c.dim_in(), c.dim_out(), c.outcomes()) != key) {
            return Err(ObjectError::Dimension(format!("family member {bad} differs in shape from member 0")));
        }
        for c in &children {
            c.require_valid()?;
        }
        Ok(Self { children })
    }

    /// `R^x_y = δ_xy id`.
    pub fn identity(parent_outcomes: usize, dim: usize) -> Result<Self, ObjectError> {
        Self::relabel(&(0..parent_outcomes).collect::<Vec<_>>(), parent_outcomes, dim)
    }

    /// `R^x = {id}` for every parent outcome: forgets the outcome, keeps the state.
    pub fn forget(parent_outcomes: usize, dim: usize) -> Result<Self, ObjectError> {
        Self::new(vec![make_identity_instrument(dim)?; parent_outcomes])
    }

    /// Sends parent outcome `x` to child outcome `map[x]` without touching the state.
    pub fn relabel(map: &[usize], child_outcomes: usize, dim: usize) -> Result<Self, ObjectError> {
        let children = map
            .iter()
            .map(|&target| {
                if target >= child_outcomes {
                    return Err(ObjectError::Dimension(format!("label {target} outside {child_outcomes} outcomes")));
                }
                Instrument::new(
                    (0..child_outcomes)
                        .map(|y| if y == target { ChoiOperation::identity(dim) } else { ChoiOperation::zero(dim, dim) })
                        .collect(),
                )
            })
            .collect::<Result<_, _>>()?;
        Self::new(children)
    }

    pub fn children(&self) -> &[Instrument] {
        &self.children
    }

    pub fn parent_outcomes(&self) -> usize {
        self.children.len()
    }

    pub fn child_outcomes(&self) -> usize {
        self.children[0].outcomes()
    }

    pub fn dim_in(&self) -> usize {
        self.children[0].dim_in()
    }

    pub fn dim_out(&self) -> usize {
        self.children[0].dim_out()
    }

    fn check_parent(&self, parent: &Instrument) -> Result<(), ObjectError> {
        if parent.outcomes() != self.parent_outcomes() || parent.dim_out() != self.dim_in() {
            return Err(ObjectError::Dimension(format!(
                "family for {} outcomes on dimension {} applied to an instrument with {} outcomes on dimension {}",
                self.parent_outcomes(),
                self.dim_in(),
                parent.outcomes(),
                parent.dim_out()
            )));
        }
        Ok(())
    }
}

/// `Φ²_y = Σ_x R^x_y ∘ Φ¹_x`.
pub fn post_process(parent: &Instrument, fam: &PostProcessingFamily) -> Result<Instrument, ObjectError> {
    fam.check_parent(parent)?;
    let mut ops = vec![ChoiOperation::zero(parent.dim_in(), fam.dim_out()); fam.child_outcomes()];
    for (phi, r) in parent.operations().iter().zip(fam.children()) {
        for (acc, ry) in ops.iter_mut().zip(r.operations()) {
            *acc = acc.plus(&compose_operations(ry, phi)?)?;
        }
    }
    Instrument::new(ops)
}

#[derive(Debug, Clone)]
pub struct PostProcessingCheck {
    pub is_post_processing: bool,
    /// Smallest achievable `max_y ‖J(Φ²_y) − Σ_x J(R^x_y ∘ Φ¹_x)‖_op`.
    pub gap: f64,
    pub status: SolveStatus,
    pub family: PostProcessingFamily,
}

/// Decides `child ≲ parent` by minimizing the operator-norm gap over all
/// post-processing families.
pub fn is_post_processing_of(
    child: &Instrument,
    parent: &Instrument,
    tol: f64,
    settings: &SolverSettings,
) -> Result<PostProcessingCheck, RobustnessError> {
    if child.dim_in() != parent.dim_in() {
        return Err(ObjectError::Dimension("instruments have different input dimensions".into()).into());
    }
    let (d, kp, kc) = (parent.dim_in(), parent.dim_out(), child.dim_out());
    let (np, nc) = (parent.outcomes(), child.outcomes());
    let mut p = SdpProblem::new();
    let fam: Vec<usize> = (0..np * nc).map(|_| p.add_block(kp * kc)).collect();
    let upper: Vec<usize> = (0..nc).map(|_| p.add_block(d * kc)).collect();
    let lower: Vec<usize> = (0..nc).map(|_| p.add_block(d * kc)).collect();
    let t = p.add_block(1);
    p.add_objective(t, HermitianCoeff::scaled_identity(1, 1.0));

    let mut equations = Vec::new();
    for x in 0..np {
        // Each R^x is trace preserving.
        let mut eq = MatrixEquation::new(kp);
        for y in 0..nc {
            eq.add_partial_trace(fam[x * nc + y], &[kp, kc], &[1], 1.0);
        }
        eq.add_rhs(&ComplexMatrix::identity(kp));
        equations.push(eq);
    }
    for y in 0..nc {
        // upper_y = t I − Δ_y and lower_y = t I + Δ_y.
        for (slack, sign) in [(upper[y], 1.0), (lower[y], -1.0)] {
            let mut eq = MatrixEquation::new(d * kc);
            eq.add_block(slack, 1.0);
            eq.add_scalar_identity(t, -1.0);
            for x in 0..np {
                let phi = parent.operation(x).choi();
                for i in 0..d {
                    for j in 0..d {
                        for a in 0..kp {
                            for b in 0..kp {
                                let f = phi[(i * kp + a, j * kp + b)];
                                if f == ZERO {
                                    continue;
                                }
                                for c in 0..kc {
                                    for e in 0..kc {
                                        eq.add_entry(i * kc + c, j * kc + e, fam[x * nc + y], a * kc + c, b * kc + e, f * sign);
                                    }
                                }
                            }
                        }
                    }
                }
            }
            eq.add_rhs(&child.operation(y).choi().scale(sign));
            equations.push(eq);
        }
    }
    for eq in &equations {
        eq.emit(&mut p);
    }
    let sol = solve(&p, settings)?;
    let gap = sol.block_values[t][(0, 0)].re.max(0.0);
    let children = (0..np)
        .map(|x| {
            Instrument::new(
                (0..nc)
                    .map(|y| ChoiOperation::new(kp, kc, sol.block_values[fam[x * nc + y]].clone()))
                    .collect::<Result<_, _>>()?,
            )
        })
        .collect::<Result<Vec<_>, ObjectError>>()?;
    Ok(PostProcessingCheck {
        is_post_processing: gap <= tol,
        gap,
        status: sol.status,
        // The solver's family is TP only up to its residual, so it skips validation.
        family: PostProcessingFamily { children },
    })
}

/// A rank-one refinement and the parent outcome of each refined outcome.
#[derive(Debug, Clone)]
pub struct DetailedInstrument {
    pub instrument: Instrument,
    pub outcome_map: Vec<usize>,
}

impl DetailedInstrument {
    /// The family that merges refined outcomes back onto their parents.
    pub fn merging_family(&self, parent_outcomes: usize) -> Result<PostProcessingFamily, ObjectError> {
        PostProcessingFamily::relabel(&self.outcome_map, parent_outcomes, self.instrument.dim_out())
    }
}

/// Splits every operation along its Choi eigendecomposition, keeping
/// eigenvalues above `tol` times the largest one in the instrument.
pub fn detailed_instrument(i: &Instrument, tol: f64) -> Result<DetailedInstrument, ObjectError> {
    let (d, k) = (i.dim_in(), i.dim_out());
    let eigs = i
        .operations()
        .iter()
        .map(|o| eig_hermitian(o.choi(), STRUCTURAL_TOL))
        .collect::<Result<Vec<_>, _>>()?;
    let top = eigs.iter().map(|e| e.max_value()).fold(0.0, f64::max);
    let mut ops = Vec::new();
    let mut map = Vec::new();
    for (x, e) in eigs.iter().enumerate() {
        for (col, &l) in e.values.iter().enumerate() {
            if l > tol * top {
                let v = e.vectors.column(col);
                ops.push(ChoiOperation::new(d, k, ComplexMatrix::outer(&v, &v).scale(l))?);
                map.push(x);
            }
        }
    }
    Ok(DetailedInstrument { instrument: Instrument::new(ops)?, outcome_map: map })
}

/// Per outcome: Kraus rank at most one (zero operations count as indecomposable).
pub fn is_indecomposable(i: &Instrument, tol: f64) -> Vec<bool> {
    i.operations().iter().map(|o| o.kraus_rank(tol) <= 1).collect()
}

/// The sufficient condition `K_i† K_j = 0` for all `i ≠ j` within each outcome.
pub fn check_detailed_equivalence(i: &Instrument, tol: f64) -> Result<bool, ObjectError> {
    for op in i.operations() {
        let top = eig_hermitian(op.choi(), STRUCTURAL_TOL)?.max_value().max(0.0);
        let k = kraus_from_choi(op, RANK_TOL * top)?;
        let ks = k.operators();
        for a in 0..ks.len() {
            for b in a + 1..ks.len() {
                if ks[a].adjoint_mul(&ks[b]).frobenius_norm() > tol {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// `Φ̃_{x̃ỹ} = Σ_{x,y} (R^{1,x}_{x̃} ⊗ R^{2,y}_{ỹ}) ∘ Φ_xy`.
pub fn free_operation_compat_transport(
    joint: &Instrument,
    grid: (usize, usize),
    fam1: &PostProcessingFamily,
    fam2: &PostProcessingFamily,
) -> Result<Instrument, ObjectError> {
    let (n1, n2) = grid;
    if n1 * n2 != joint.outcomes() {
        return Err(ObjectError::Grid { n1, n2, outcomes: joint.outcomes() });
    }
    if fam1.parent_outcomes() != n1 || fam2.parent_outcomes() != n2 {
        return Err(ObjectError::Dimension("families do not match the joint's outcome grid".into()));
    }
    if fam1.dim_in() * fam2.dim_in() != joint.dim_out() {
        return Err(ObjectError::Dimension("families do not match the joint's output factors".into()));
    }
    let (m1, m2) = (fam1.child_outcomes(), fam2.child_outcomes());
    let mut ops = vec![ChoiOperation::zero(joint.dim_in(), fam1.dim_out() * fam2.dim_out()); m1 * m2];
    for x in 0..n1 {
        for y in 0..n2 {
            let phi = joint.operation(x * n2 + y);
            for (xt, r1) in fam1.children()[x].operations().iter().enumerate() {
                for (yt, r2) in fam2.children()[y].operations().iter().enumerate() {
                    let step = compose_operations(&tensor_operation(r1, r2), phi)?;
                    ops[xt * m2 + yt] = ops[xt * m2 + yt].plus(&step)?;
                }
            }
        }
    }
    Instrument::new(ops)
}

/// One rank-one piece `|φ⟩⟨φ|` of a dilated projector, with the eigenpair of
/// the effect it came from.
#[derive(Debug, Clone)]
pub struct FineGrainedVector {
    pub outcome: usize,
    pub phi: Vec<C64>,
    /// Eigenvector of the effect.
    pub w: Vec<C64>,
    /// Matching eigenvalue.
    pub weight: f64,
}

/// Projective dilation of a POVM on `H ⊗ K`, `K` indexed by outcomes, with
/// the ancilla prepared in its first basis vector.
#[derive(Debug, Clone)]
pub struct NaimarkDilation {
    pub dim: usize,
    pub ancilla_dim: usize,
    pub ancilla_index: usize,
    pub unitary: ComplexMatrix,
    pub projectors: Vec<ComplexMatrix>,
    /// Grouped by outcome; each group is an orthonormal basis of its projector's range.
    pub rank1_vectors: Vec<Vec<FineGrainedVector>>,
}

impl NaimarkDilation {
    /// `‖U†U − I‖_F`.
    pub fn unitarity_residual(&self) -> f64 {
        self.unitary.adjoint_mul(&self.unitary).difference_norm(&ComplexMatrix::identity(self.unitary.rows()))
    }

    /// `Tr[(ρ ⊗ |0⟩⟨0|) Π(x)]` for every outcome.
    pub fn probabilities(&self, rho: &ComplexMatrix) -> Vec<f64> {
        let anc = ComplexMatrix::basis_projector(self.ancilla_dim, self.ancilla_index);
        let big = kron(rho, &anc);
        self.projectors.iter().map(|p| (&big * p).trace().re).collect()
    }
}

/// Dilates `g` via `V|ψ⟩ = Σ_x √G(x)|ψ⟩ ⊗ |x⟩`, completed to a unitary by
/// Gram–Schmidt over the standard basis in index order.
pub fn naimark_dilate(g: &Povm) -> Result<NaimarkDilation, ObjectError> {
    g.require_valid()?;
    let (d, n) = (g.dim(), g.outcomes());
    let big = d * n;
    let roots = g
        .effects()
        .iter()
        .map(|e| crate::linalg::sqrt_psd(e, STRUCTURAL_TOL))
        .collect::<Result<Vec<_>, _>>()?;
    let mut columns: Vec<Option<Vec<C64>>> = vec![None; big];
    for i in 0..d {
        let mut v = vec![ZERO; big];
        for (x, root) in roots.iter().enumerate() {
            for j in 0..d {
                v[j * n + x] = root[(j, i)];
            }
        }
        columns[i * n] = Some(v);
    }
    let mut basis: Vec<Vec<C64>> = columns.iter().flatten().cloned().collect();
    let mut complement = Vec::new();
    for e in 0..big {
        if basis.len() == big {
            break;
        }
        let mut v = vec![ZERO; big];
        v[e] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for b in &basis {
                let overlap: C64 = b.iter().zip(&v).map(|(bi, vi)| bi.conj() * vi).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= overlap * bi;
                }
            }
        }
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            v.iter_mut().for_each(|c| *c /= norm);
            basis.push(v.clone());
            complement.push(v);
        }
    }
    let mut complement = complement.into_iter();
    for slot in columns.iter_mut().filter(|c| c.is_none()) {
        *slot = complement.next();
    }
    let cols: Vec<Vec<C64>> = columns.into_iter().map(|c| c.expect("completion fills every column")).collect();
    let unitary = ComplexMatrix::from_fn(big, big, |r, c| cols[c][r]);

    let mut projectors = Vec::with_capacity(n);
    let mut rank1_vectors = Vec::with_capacity(n);
    for (x, effect) in g.effects().iter().enumerate() {
        let sel = kron(&ComplexMatrix::identity(d), &ComplexMatrix::basis_projector(n, x));
        projectors.push(sel.conjugate_by(&unitary.adjoint()));
        let e = eig_hermitian(effect, STRUCTURAL_TOL)?;
        let group = (0..d)
            .map(|col| {
                let w = e.vectors.column(col);
                let mut ket = vec![ZERO; big];
                for j in 0..d {
                    ket[j * n + x] = w[j];
                }
                FineGrainedVector {
                    outcome: x,
                    phi: unitary.adjoint().mul_vec(&ket),
                    w,
                    weight: e.values[col].max(0.0),
                }
            })
            .collect();
        rank1_vectors.push(group);
    }
    Ok(NaimarkDilation { dim: d, ancilla_dim: n, ancilla_index: 0, unitary, projectors, rank1_vectors })
}

/// Output of [`compatible_indecomposable_pair`].
///
/// The instruments act on the span of the fine-grained vectors that carry
/// weight, in the order of `pieces`; `embedding` maps that span isometrically
/// into the dilation space, where the operations have Kraus operators
/// `|φ⟩⟨φ|(I ⊗ |0⟩)`.
#[derive(Debug, Clone)]
pub struct IndecomposablePair {
    pub dilation: NaimarkDilation,
    pub grid: (usize, usize),
    /// `(outcome of G, index within its group)` per retained piece.
    pub pieces: Vec<(usize, usize)>,
    pub embedding: ComplexMatrix,
    pub coarse_a: Instrument,
    pub coarse_b: Instrument,
    pub detailed_a: DetailedInstrument,
    pub detailed_b: DetailedInstrument,
    /// Joint of the detailed pair on a `pieces × pieces` grid.
    pub joint: Instrument,
}

impl IndecomposablePair {
    /// An instrument of the pair with outputs embedded in the dilation space.
    pub fn embedded(&self, i: &Instrument) -> Result<Instrument, ObjectError> {
        let w = &self.embedding;
        let ops = i
            .operations()
            .iter()
            .map(|op| {
                let k = kraus_from_choi(op, 0.0)?;
                let lifted = k.operators().iter().map(|m| w * m).collect();
                Ok(choi_from_kraus(&KrausOperation::new(op.dim_in(), w.rows(), lifted)?))
            })
            .collect::<Result<Vec<_>, ObjectError>>()?;
        Instrument::new(ops)
    }

    /// Kraus operator `|φ⟩⟨φ|(I ⊗ |0⟩)` of a piece, computed from the dilation.
    pub fn dilated_kraus(&self, piece: usize) -> ComplexMatrix {
        let (x, idx) = self.pieces[piece];
        let dil = &self.dilation;
        let phi = &dil.rank1_vectors[x][idx].phi;
        let (d, n) = (dil.dim, dil.ancilla_dim);
        ComplexMatrix::from_fn(d * n, d, |r, i| phi[r] * phi[i * n + dil.ancilla_index].conj())
    }
}

/// Two compatible instruments whose operations all have Kraus rank one,
/// obtained from a joint POVM `g` on an `n1 × n2` grid.
pub fn compatible_indecomposable_pair(g: &Povm, grid: (usize, usize)) -> Result<IndecomposablePair, ObjectError> {
    let (n1, n2) = grid;
    if n1 * n2 != g.outcomes() || n1 == 0 || n2 == 0 {
        return Err(ObjectError::Grid { n1, n2, outcomes: g.outcomes() });
    }
    let dilation = naimark_dilate(g)?;
    let d = g.dim();
    let top = dilation.rank1_vectors.iter().flatten().map(|v| v.weight).fold(0.0, f64::max);
    let pieces: Vec<(usize, usize)> = dilation
        .rank1_vectors
        .iter()
        .enumerate()
        .flat_map(|(x, group)| {
            group.iter().enumerate().filter(move |(_, v)| v.weight > RANK_TOL * top).map(move |(i, _)| (x, i))
        })
        .collect();
    let m = pieces.len();
    let embedding = ComplexMatrix::from_fn(d * g.outcomes(), m, |r, c| {
        let (x, i) = pieces[c];
        dilation.rank1_vectors[x][i].phi[r]
    });
    // In the compressed output basis the piece's Kraus operator is √λ |z⟩⟨w|.
    let ops: Vec<ChoiOperation> = pieces
        .iter()
        .enumerate()
        .map(|(z, &(x, i))| {
            let v = &dilation.rank1_vectors[x][i];
            let effect = ComplexMatrix::outer(&v.w, &v.w).scale(v.weight);
            ChoiOperation::measure_prepare(&effect, &ComplexMatrix::basis_projector(m, z))
        })
        .collect();
    let shared = Instrument::new(ops.clone())?;
    let map_a: Vec<usize> = pieces.iter().map(|&(xy, _)| xy / n2).collect();
    let map_b: Vec<usize> = pieces.iter().map(|&(xy, _)| xy % n2).collect();
    let coarse = |map: &[usize], count: usize| -> Result<Instrument, ObjectError> {
        let mut acc = vec![ChoiOperation::zero(d, m); count];
        for (op, &t) in ops.iter().zip(map) {
            acc[t] = acc[t].plus(op)?;
        }
        Instrument::new(acc)
    };
    let coarse_a = coarse(&map_a, n1)?;
    let coarse_b = coarse(&map_b, n2)?;
    let mut joint_ops = vec![ChoiOperation::zero(d, m * m); m * m];
    for (z, &(x, i)) in pieces.iter().enumerate() {
        let v = &dilation.rank1_vectors[x][i];
        let effect = ComplexMatrix::outer(&v.w, &v.w).scale(v.weight);
        let p = ComplexMatrix::basis_projector(m, z);
        joint_ops[z * m + z] = ChoiOperation::measure_prepare(&effect, &kron(&p, &p));
    }
    Ok(IndecomposablePair {
        dilation,
        grid,
        pieces,
        embedding,
        coarse_a,
        coarse_b,
        detailed_a: DetailedInstrument { instrument: shared.clone(), outcome_map: map_a },
        detailed_b: DetailedInstrument { instrument: shared, outcome_map: map_b },
        joint: Instrument::new(joint_ops)?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PidReport {
    /// `‖Σ_y Φᵗ_xy − Φ_x‖` over both sides, for the traditional joint of `I`.
    pub traditional_residual_i: f64,
    /// Same for `J` with `Ψᵗ_xy = ρ/n²`.
    pub traditional_residual_j: f64,
    /// Marginal residual of the parallel joint `tr(ρ)/n² η ⊗ η` of `I`.
    pub parallel_residual_i: f64,
    pub r_ii: f64,
    pub r_jj: f64,
    pub status_ii: SolveStatus,
    pub status_jj: SolveStatus,
}

#[derive(Debug, Clone)]
pub struct PidCounterexample {
    pub i: Instrument,
    pub j: Instrument,
    pub traditional_i: Instrument,
    pub traditional_j: Instrument,
    pub parallel_i: Instrument,
    pub report: PidReport,
}

fn traditional_residual(joint: &Instrument, single: &Instrument, n: usize) -> Result<f64, ObjectError> {
    let mut worst: f64 = 0.0;
    for x in 0..n {
        let mut rows = ChoiOperation::zero(single.dim_in(), single.dim_out());
        let mut cols = rows.clone();
        for y in 0..n {
            rows = rows.plus(joint.operation(x * n + y))?;
            cols = cols.plus(joint.operation(y * n + x))?;
        }
        worst = worst
            .max(rows.choi().difference_norm(single.operation(x).choi()))
            .max(cols.choi().difference_norm(single.operation(x).choi()));
    }
    Ok(worst)
}

/// `I = {tr(ρ)/n · η}` and `J = {ρ/n}`: two copies of either are
/// traditionally compatible, but only the copies of `I` are parallel compatible.
pub fn pid_counterexample(
    n: usize,
    d: usize,
    eta: &ComplexMatrix,
    settings: &SolverSettings,
) -> Result<PidCounterexample, RobustnessError> {
    if n == 0 || d == 0 {
        return Err(ObjectError::Dimension("need at least one outcome and a positive dimension".into()).into());
    }
    check_state(eta, STRUCTURAL_TOL)?;
    let k = eta.rows();
    let nf = n as f64;
    let i = make_trash_prepare(d, &vec![1.0 / nf; n], &vec![eta.clone(); n])?;
    let j = Instrument::new(vec![ChoiOperation::identity(d).scale(1.0 / nf); n])?;
    let traditional_i = Instrument::new(vec![ChoiOperation::prepare(d, 1.0 / (nf * nf), eta); n * n])?;
    let traditional_j = Instrument::new(vec![ChoiOperation::identity(d).scale(1.0 / (nf * nf)); n * n])?;
    let parallel_i = Instrument::new(vec![ChoiOperation::prepare(d, 1.0 / (nf * nf), &kron(eta, eta)); n * n])?;

    let mut parallel_residual_i: f64 = 0.0;
    for side in [Side::First, Side::Second] {
        let m = joint_marginal(&parallel_i, (n, n), (k, k), side)?;
        parallel_residual_i = parallel_residual_i.max(crate::objects::instrument_distance(&m, &i));
    }
    let rii = robustness_instruments(&i, &i, settings)?;
    let rjj = robustness_instruments(&j, &j, settings)?;
    let report = PidReport {
        traditional_residual_i: traditional_residual(&traditional_i, &i, n)?,
        traditional_residual_j: traditional_residual(&traditional_j, &j, n)?,
        parallel_residual_i,
        r_ii: rii.r,
        r_jj: rjj.r,
        status_ii: rii.status,
        status_jj: rjj.status,
    };
    Ok(PidCounterexample { i, j, traditional_i, traditional_j, parallel_i, report })
}
