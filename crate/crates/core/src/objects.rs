//! POVMs, completely positive maps in Choi form, and quantum instruments.
//!
//! Choi convention used everywhere in the crate (input factor first):
//!
//! ```text
//! J(Φ) = Σ_ij E_ij ⊗ Φ(E_ij),   J[(i·d_out + a), (j·d_out + b)] = Φ(E_ij)[a, b]
//! ```
//!
//! Outcome labels are `0..n`; joint outcomes `(x, y)` are stored row-major,
//! `x * n2 + y`.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{
    self, eig_hermitian, kron, partial_trace, permute_subsystems, ComplexMatrix, LinalgError,
    SubsystemShape, C64, STRUCTURAL_TOL, ZERO,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObjectError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("invalid instrument: {0}")]
    InvalidInstrument(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("Choi matrix is not PSD (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("outcome grid {n1}x{n2} does not match {outcomes} joint outcomes")]
    Grid { n1: usize, n2: usize, outcomes: usize },
    #[error("empty outcome set")]
    Empty,
}

/// Outcome-indexed effects on a `dim`-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    effects: Vec<ComplexMatrix>,
}

impl Povm {
    /// Checks shapes only; use [`validate_povm`] for positivity and completeness.
    pub fn new(effects: Vec<ComplexMatrix>) -> Result<Self, ObjectError> {
        let dim = effects.first().ok_or(ObjectError::Empty)?.rows();
        if let Some(bad) = effects.iter().position(|e| e.rows() != dim || e.cols() != dim) {
            return Err(ObjectError::Dimension(format!("effect {bad} is not {dim}x{dim}")));
        }
        Ok(Self { dim, effects })
    }

    /// `{p_x · I}`.
    pub fn trivial(dim: usize, probs: &[f64]) -> Result<Self, ObjectError> {
        check_distribution(probs)?;
        Self::new(probs.iter().map(|&p| ComplexMatrix::identity(dim).scale(p)).collect())
    }

    /// Computational-basis projective measurement.
    pub fn computational(dim: usize) -> Self {
        Self {
            dim,
            effects: (0..dim).map(|i| ComplexMatrix::basis_projector(dim, i)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn effect(&self, x: usize) -> &ComplexMatrix {
        &self.effects[x]
    }

    pub fn probabilities(&self, rho: &ComplexMatrix) -> Vec<f64> {
        self.effects.iter().map(|e| (rho * e).trace().re).collect()
    }

    pub(crate) fn require_valid(&self) -> Result<(), ObjectError> {
        let report = validate_povm(self, STRUCTURAL_TOL);
        if report.valid {
            Ok(())
        } else {
            Err(ObjectError::InvalidPovm(report.summary()))
        }
    }
}

/// One completely positive map `L(C^dim_in) → L(C^dim_out)` as a Choi matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiOperation {
    dim_in: usize,
    dim_out: usize,
    choi: ComplexMatrix,
}

impl ChoiOperation {
    pub fn new(dim_in: usize, dim_out: usize, choi: ComplexMatrix) -> Result<Self, ObjectError> {
        let n = dim_in * dim_out;
        if choi.rows() != n || choi.cols() != n {
            return Err(ObjectError::Dimension(format!(
                "Choi matrix {}x{} for {dim_in}->{dim_out} map",
                choi.rows(),
                choi.cols()
            )));
        }
        Ok(Self { dim_in, dim_out, choi })
    }

    pub fn zero(dim_in: usize, dim_out: usize) -> Self {
        let n = dim_in * dim_out;
        Self { dim_in, dim_out, choi: ComplexMatrix::zeros(n, n) }
    }

    /// Choi matrix of the map with the given action on matrix units.
    pub fn from_action(dim_in: usize, dim_out: usize, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        let mut choi = ComplexMatrix::zeros(dim_in * dim_out, dim_in * dim_out);
        for i in 0..dim_in {
            for j in 0..dim_in {
                let out = f(&ComplexMatrix::matrix_unit(dim_in, i, j));
                for a in 0..dim_out {
                    for b in 0..dim_out {
                        choi[(i * dim_out + a, j * dim_out + b)] = out[(a, b)];
                    }
                }
            }
        }
        Self { dim_in, dim_out, choi }
    }

    pub fn identity(d: usize) -> Self {
        Self::from_action(d, d, |m| m.clone())
    }

    /// `ρ ↦ tr(ρ) · weight · state`.
    pub fn prepare(dim_in: usize, weight: f64, state: &ComplexMatrix) -> Self {
        let choi = kron(&ComplexMatrix::identity(dim_in), &state.scale(weight));
        Self { dim_in, dim_out: state.rows(), choi }
    }

    /// `ρ ↦ tr(ρ E) · state`.
    pub fn measure_prepare(effect: &ComplexMatrix, state: &ComplexMatrix) -> Self {
        Self {
            dim_in: effect.rows(),
            dim_out: state.rows(),
            choi: kron(&effect.transpose(), state),
        }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn into_choi(self) -> ComplexMatrix {
        self.choi
    }

    pub fn shape(&self) -> SubsystemShape {
        SubsystemShape::new(vec![self.dim_in, self.dim_out]).expect("positive dims")
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { choi: self.choi.scale(s), ..self.clone() }
    }

    pub fn plus(&self, other: &Self) -> Result<Self, ObjectError> {
        self.same_dims(other)?;
        Ok(Self { choi: &self.choi + &other.choi, ..self.clone() })
    }

    fn same_dims(&self, other: &Self) -> Result<(), ObjectError> {
        if (self.dim_in, self.dim_out) != (other.dim_in, other.dim_out) {
            return Err(ObjectError::Dimension(format!(
                "{}->{} vs {}->{}",
                self.dim_in, self.dim_out, other.dim_in, other.dim_out
            )));
        }
        Ok(())
    }

    /// `Tr_out J`, the transpose of `Φ*(I)`.
    pub fn output_trace(&self) -> ComplexMatrix {
        partial_trace(&self.choi, &self.shape(), &[0]).expect("consistent shape")
    }

    /// `Φ*(I)`: the effect this operation induces.
    pub fn induced_effect(&self) -> ComplexMatrix {
        self.output_trace().transpose()
    }

    pub fn min_choi_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.choi)
    }

    /// `‖Tr_out J − I‖_F`.
    pub fn tp_residual(&self) -> f64 {
        self.output_trace().difference_norm(&ComplexMatrix::identity(self.dim_in))
    }

    /// Kraus rank counted as eigenvalues above `rel_tol · λ_max`.
    pub fn kraus_rank(&self, rel_tol: f64) -> usize {
        let e = eig_hermitian(&self.choi, f64::INFINITY).expect("tolerance accepts any input");
        let top = e.max_value();
        if top <= 0.0 {
            return 0;
        }
        e.values.iter().filter(|&&l| l > rel_tol * top).count()
    }
}

/// `Φ(ρ) = Tr_in[(ρᵀ ⊗ I) J]`.
pub fn apply_operation(op: &ChoiOperation, rho: &ComplexMatrix) -> Result<ComplexMatrix, ObjectError> {
    if rho.rows() != op.dim_in || rho.cols() != op.dim_in {
        return Err(ObjectError::Dimension(format!(
            "{}x{} input for a map on dimension {}",
            rho.rows(),
            rho.cols(),
            op.dim_in
        )));
    }
    let (di, dk) = (op.dim_in, op.dim_out);
    let mut out = ComplexMatrix::zeros(dk, dk);
    for i in 0..di {
        for j in 0..di {
            let r = rho[(i, j)];
            if r == ZERO {
                continue;
            }
            for a in 0..dk {
                for b in 0..dk {
                    out[(a, b)] += r * op.choi[(i * dk + a, j * dk + b)];
                }
            }
        }
    }
    Ok(out)
}

/// Kraus form of a CP map; each operator is `dim_out × dim_in`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausOperation {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
}

impl KrausOperation {
    pub fn new(dim_in: usize, dim_out: usize, kraus: Vec<ComplexMatrix>) -> Result<Self, ObjectError> {
        if let Some(k) = kraus.iter().position(|k| k.rows() != dim_out || k.cols() != dim_in) {
            return Err(ObjectError::Dimension(format!("Kraus operator {k} is not {dim_out}x{dim_in}")));
        }
        Ok(Self { dim_in, dim_out, kraus })
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += &rho.conjugate_by(k);
        }
        out
    }
}

/// `|K⟩⟩ = Σ_i |i⟩ ⊗ K|i⟩`, the vectorization matching the Choi convention.
pub fn vectorize_kraus(k: &ComplexMatrix) -> Vec<C64> {
    let (dk, di) = (k.rows(), k.cols());
    (0..di * dk).map(|idx| k[(idx % dk, idx / dk)]).collect()
}

pub fn choi_from_kraus(k: &KrausOperation) -> ChoiOperation {
    let n = k.dim_in * k.dim_out;
    let mut choi = ComplexMatrix::zeros(n, n);
    for op in &k.kraus {
        let v = vectorize_kraus(op);
        choi += &ComplexMatrix::outer(&v, &v);
    }
    ChoiOperation { dim_in: k.dim_in, dim_out: k.dim_out, choi }
}

/// One Kraus operator per Choi eigenvalue above `tol`.
pub fn kraus_from_choi(c: &ChoiOperation, tol: f64) -> Result<KrausOperation, ObjectError> {
    let e = eig_hermitian(&c.choi, STRUCTURAL_TOL.max(tol))?;
    if e.min_value() < -tol.max(STRUCTURAL_TOL) {
        return Err(ObjectError::NotPsd(e.min_value()));
    }
    let (di, dk) = (c.dim_in, c.dim_out);
    let kraus = e
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > tol)
        .map(|(col, &l)| {
            let s = l.sqrt();
            ComplexMatrix::from_fn(dk, di, |a, i| e.vectors[(i * dk + a, col)] * s)
        })
        .collect();
    Ok(KrausOperation { dim_in: di, dim_out: dk, kraus })
}

/// Choi of `a ⊗ b` on `(in_a, in_b) → (out_a, out_b)`.
pub fn tensor_operation(a: &ChoiOperation, b: &ChoiOperation) -> ChoiOperation {
    let shape = SubsystemShape::new(vec![a.dim_in, a.dim_out, b.dim_in, b.dim_out]).expect("positive dims");
    let choi = permute_subsystems(&kron(&a.choi, &b.choi), &shape, &[0, 2, 1, 3]).expect("valid permutation");
    ChoiOperation { dim_in: a.dim_in * b.dim_in, dim_out: a.dim_out * b.dim_out, choi }
}

/// Choi of `second ∘ first`.
pub fn compose_operations(second: &ChoiOperation, first: &ChoiOperation) -> Result<ChoiOperation, ObjectError> {
    if first.dim_out != second.dim_in {
        return Err(ObjectError::Dimension(format!(
            "cannot compose {}->{} after {}->{}",
            second.dim_in, second.dim_out, first.dim_in, first.dim_out
        )));
    }
    let (di, dm, dk) = (first.dim_in, first.dim_out, second.dim_out);
    let mut choi = ComplexMatrix::zeros(di * dk, di * dk);
    for i in 0..di {
        for j in 0..di {
            for a in 0..dm {
                for b in 0..dm {
                    let f = first.choi[(i * dm + a, j * dm + b)];
                    if f == ZERO {
                        continue;
                    }
                    for c in 0..dk {
                        for d in 0..dk {
                            choi[(i * dk + c, j * dk + d)] += f * second.choi[(a * dk + c, b * dk + d)];
                        }
                    }
                }
            }
        }
    }
    Ok(ChoiOperation { dim_in: di, dim_out: dk, choi })
}

/// Outcome-indexed CP maps sharing dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    dim_in: usize,
    dim_out: usize,
    operations: Vec<ChoiOperation>,
}

impl Instrument {
    /// Checks that all operations share dimensions; validity is reported by
    /// [`validate_instrument`].
    pub fn new(operations: Vec<ChoiOperation>) -> Result<Self, ObjectError> {
        let first = operations.first().ok_or(ObjectError::Empty)?;
        let (dim_in, dim_out) = (first.dim_in, first.dim_out);
        if let Some(bad) = operations.iter().position(|o| (o.dim_in, o.dim_out) != (dim_in, dim_out)) {
            return Err(ObjectError::Dimension(format!(
                "operation {bad} is {}->{}, expected {dim_in}->{dim_out}",
                operations[bad].dim_in, operations[bad].dim_out
            )));
        }
        Ok(Self { dim_in, dim_out, operations })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn outcomes(&self) -> usize {
        self.operations.len()
    }

    pub fn operations(&self) -> &[ChoiOperation] {
        &self.operations
    }

    pub fn operation(&self, x: usize) -> &ChoiOperation {
        &self.operations[x]
    }

    pub fn into_operations(self) -> Vec<ChoiOperation> {
        self.operations
    }

    /// `Σ_x w_x I_x` over instruments with matching outcome counts.
    pub fn mix(parts: &[(f64, &Instrument)]) -> Result<Self, ObjectError> {
        let (_, first) = parts.first().ok_or(ObjectError::Empty)?;
        let mut ops: Vec<ChoiOperation> = first.operations.iter().map(|o| o.scale(0.0)).collect();
        for (w, inst) in parts {
            if inst.outcomes() != first.outcomes() {
                return Err(ObjectError::Dimension("outcome counts differ".into()));
            }
            for (acc, op) in ops.iter_mut().zip(&inst.operations) {
                *acc = acc.plus(&op.scale(*w))?;
            }
        }
        Self::new(ops)
    }

    pub(crate) fn require_valid(&self) -> Result<(), ObjectError> {
        let report = validate_instrument(self, STRUCTURAL_TOL);
        if report.valid {
            Ok(())
        } else {
            Err(ObjectError::InvalidInstrument(report.summary()))
        }
    }
}

/// Diagnostic produced by [`validate_povm`] and [`validate_instrument`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub tol: f64,
    /// Most negative eigenvalue per outcome (effect or Choi matrix).
    pub min_eigenvalues: Vec<f64>,
    /// Largest Hermiticity defect over outcomes.
    pub hermitian_residual: f64,
    /// `‖Σ_x A(x) − I‖_F` for POVMs, `‖Σ_x Tr_out J_x − I‖_F` for instruments.
    pub completeness_residual: f64,
    /// Outcomes whose positivity check failed.
    pub negative_outcomes: Vec<usize>,
}

impl ValidationReport {
    pub fn summary(&self) -> String {
        if self.valid {
            return "valid".into();
        }
        let mut parts = Vec::new();
        if !self.negative_outcomes.is_empty() {
            parts.push(format!("non-positive outcomes {:?}", self.negative_outcomes));
        }
        if self.hermitian_residual > self.tol {
            parts.push(format!("hermiticity defect {:.3e}", self.hermitian_residual));
        }
        if self.completeness_residual > self.tol {
            parts.push(format!("completeness residual {:.3e}", self.completeness_residual));
        }
        parts.join(", ")
    }
}

fn report(mats: &[&ComplexMatrix], completeness_residual: f64, tol: f64) -> ValidationReport {
    let hermitian_residual = mats.iter().map(|m| m.hermitian_residual()).fold(0.0, f64::max);
    let min_eigenvalues: Vec<f64> = mats.iter().map(|m| linalg::min_eigenvalue(m)).collect();
    let negative_outcomes: Vec<usize> = min_eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l < -tol)
        .map(|(i, _)| i)
        .collect();
    ValidationReport {
        valid: negative_outcomes.is_empty()
            && hermitian_residual <= tol
            && completeness_residual <= tol
            && completeness_residual.is_finite(),
        tol,
        min_eigenvalues,
        hermitian_residual,
        completeness_residual,
        negative_outcomes,
    }
}

pub fn validate_povm(p: &Povm, tol: f64) -> ValidationReport {
    let mut sum = ComplexMatrix::zeros(p.dim, p.dim);
    for e in &p.effects {
        sum += e;
    }
    let residual = sum.difference_norm(&ComplexMatrix::identity(p.dim));
    report(&p.effects.iter().collect::<Vec<_>>(), residual, tol)
}

pub fn validate_instrument(i: &Instrument, tol: f64) -> ValidationReport {
    let residual = induced_channel(i).tp_residual();
    report(&i.operations.iter().map(|o| &o.choi).collect::<Vec<_>>(), residual, tol)
}

/// Unit-trace PSD check for density matrices.
pub fn check_state(rho: &ComplexMatrix, tol: f64) -> Result<(), ObjectError> {
    if !rho.is_square() {
        return Err(ObjectError::InvalidState("not square".into()));
    }
    let herm = rho.hermitian_residual();
    if herm > tol {
        return Err(ObjectError::InvalidState(format!("hermiticity defect {herm:.3e}")));
    }
    let tr = rho.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > tol {
        return Err(ObjectError::InvalidState(format!("trace {:.6} != 1", tr.re)));
    }
    let lmin = linalg::min_eigenvalue(rho);
    if lmin < -tol {
        return Err(ObjectError::InvalidState(format!("negative eigenvalue {lmin:.3e}")));
    }
    Ok(())
}

fn check_distribution(p: &[f64]) -> Result<(), ObjectError> {
    if p.is_empty() {
        return Err(ObjectError::InvalidDistribution("empty".into()));
    }
    if p.iter().any(|&q| !(q >= -STRUCTURAL_TOL) || !q.is_finite()) {
        return Err(ObjectError::InvalidDistribution(format!("negative or non-finite entry in {p:?}")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > STRUCTURAL_TOL {
        return Err(ObjectError::InvalidDistribution(format!("sums to {s}")));
    }
    Ok(())
}

/// `A(x) = Φ_x*(I)`.
pub fn induced_povm(i: &Instrument) -> Povm {
    Povm {
        dim: i.dim_in,
        effects: i.operations.iter().map(ChoiOperation::induced_effect).collect(),
    }
}

/// `Σ_x Φ_x`.
pub fn induced_channel(i: &Instrument) -> ChoiOperation {
    let mut total = ChoiOperation::zero(i.dim_in, i.dim_out);
    for op in &i.operations {
        total.choi += &op.choi;
    }
    total
}

/// `ρ ↦ tr[ρA(x)] |x⟩⟨x|` on an output of dimension `|Ω|`.
pub fn make_special_measure_prepare(a: &Povm) -> Result<Instrument, ObjectError> {
    a.require_valid()?;
    let n = a.outcomes();
    let ops = a
        .effects
        .iter()
        .enumerate()
        .map(|(x, e)| ChoiOperation::measure_prepare(e, &ComplexMatrix::basis_projector(n, x)))
        .collect();
    Instrument::new(ops)
}

/// `ρ ↦ tr[ρA(x)] ρ'_x`.
pub fn make_measure_prepare(a: &Povm, states: &[ComplexMatrix]) -> Result<Instrument, ObjectError> {
    a.require_valid()?;
    if states.len() != a.outcomes() {
        return Err(ObjectError::Dimension(format!(
            "{} states for {} outcomes",
            states.len(),
            a.outcomes()
        )));
    }
    let dk = states[0].rows();
    for (x, s) in states.iter().enumerate() {
        if s.rows() != dk {
            return Err(ObjectError::InvalidState(format!("state {x} has dimension {}", s.rows())));
        }
        check_state(s, STRUCTURAL_TOL).map_err(|e| ObjectError::InvalidState(format!("state {x}: {e}")))?;
    }
    Instrument::new(a.effects.iter().zip(states).map(|(e, s)| ChoiOperation::measure_prepare(e, s)).collect())
}

/// `ρ ↦ p_x tr(ρ) η_x` on inputs of dimension `dim_in`.
pub fn make_trash_prepare(dim_in: usize, probs: &[f64], states: &[ComplexMatrix]) -> Result<Instrument, ObjectError> {
    check_distribution(probs)?;
    let trivial = Povm::trivial(dim_in, probs)?;
    make_measure_prepare(&trivial, states)
}

/// `ρ ↦ √A(x) ρ √A(x)`.
pub fn make_lueders(a: &Povm) -> Result<Instrument, ObjectError> {
    a.require_valid()?;
    let d = a.dim;
    let ops = a
        .effects
        .iter()
        .map(|e| {
            let root = linalg::sqrt_psd(e, 1e-14)?;
            let k = KrausOperation::new(d, d, vec![root])?;
            Ok(choi_from_kraus(&k))
        })
        .collect::<Result<Vec<_>, ObjectError>>()?;
    Instrument::new(ops)
}

/// The identity channel as a one-outcome instrument.
pub fn make_identity_instrument(d: usize) -> Result<Instrument, ObjectError> {
    if d == 0 {
        return Err(ObjectError::Dimension("dimension must be positive".into()));
    }
    Instrument::new(vec![ChoiOperation::identity(d)])
}

/// Which side of a joint instrument to marginalize onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

/// Marginal instrument of a joint instrument on `H → K1 ⊗ K2` with outcomes
/// on an `n1 × n2` grid: side one is `Σ_y Tr_K2 Φ_xy`, side two `Σ_x Tr_K1 Φ_xy`.
pub fn joint_marginal(
    joint: &Instrument,
    grid: (usize, usize),
    out_dims: (usize, usize),
    side: Side,
) -> Result<Instrument, ObjectError> {
    let (n1, n2) = grid;
    if n1 * n2 != joint.outcomes() || n1 == 0 || n2 == 0 {
        return Err(ObjectError::Grid { n1, n2, outcomes: joint.outcomes() });
    }
    let (k1, k2) = out_dims;
    if k1 * k2 != joint.dim_out {
        return Err(ObjectError::Dimension(format!(
            "output split {k1}x{k2} does not factor dimension {}",
            joint.dim_out
        )));
    }
    let shape = SubsystemShape::new(vec![joint.dim_in, k1, k2])?;
    let (count, keep, dk) = match side {
        Side::First => (n1, [0usize, 1], k1),
        Side::Second => (n2, [0usize, 2], k2),
    };
    let mut ops = vec![ChoiOperation::zero(joint.dim_in, dk); count];
    for x in 0..n1 {
        for y in 0..n2 {
            let reduced = partial_trace(&joint.operations[x * n2 + y].choi, &shape, &keep)?;
            let target = if side == Side::First { x } else { y };
            ops[target].choi += &reduced;
        }
    }
    Instrument::new(ops)
}

/// Largest Frobenius distance between corresponding operations.
pub fn instrument_distance(a: &Instrument, b: &Instrument) -> f64 {
    if a.outcomes() != b.outcomes() || a.dim_in != b.dim_in || a.dim_out != b.dim_out {
        return f64::INFINITY;
    }
    a.operations
        .iter()
        .zip(&b.operations)
        .map(|(x, y)| x.choi.difference_norm(&y.choi))
        .fold(0.0, f64::max)
}

pub fn povm_distance(a: &Povm, b: &Povm) -> f64 {
    if a.outcomes() != b.outcomes() || a.dim != b.dim {
        return f64::INFINITY;
    }
    a.effects.iter().zip(&b.effects).map(|(x, y)| x.difference_norm(y)).fold(0.0, f64::max)
}
