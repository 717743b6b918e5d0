//! A small deterministic solver for semidefinite programs
//!
//! ```text
//! minimize   Σ_b ⟨C_b, X_b⟩
//! subject to Σ_b ⟨A_kb, X_b⟩ = r_k   for every constraint k
//!            X_b ⪰ 0                  (complex Hermitian blocks)
//! ```
//!
//! with `⟨A, X⟩ = tr(A X)` for Hermitian `A`. A 1×1 block is a nonnegative
//! scalar.
//!
//! The method is ADMM with over-relaxation: each iteration projects onto the
//! affine subspace (through a cached pivoted Cholesky factor of `A Aᵀ`, which
//! also drops linearly dependent rows) and then onto the PSD cone block by
//! block via eigenvalue clipping. The step size is rebalanced from the ratio
//! of primal to dual residuals. Every step is a pure function of the problem
//! bits, so repeated solves are bit-identical.

use std::f64::consts::SQRT_2;

use thiserror::Error;

use crate::linalg::{eig_hermitian_from, ComplexMatrix, C64, ZERO};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SdpError {
    #[error("malformed problem: {0}")]
    Malformed(String),
    #[error("warm start does not match the problem: {0}")]
    WarmStartMismatch(String),
}

/// Hermitian coefficient matrix stored as its upper triangle; entries with
/// the same position accumulate.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianCoeff {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl HermitianCoeff {
    pub fn new(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    /// `I · s`.
    pub fn scaled_identity(dim: usize, s: f64) -> Self {
        Self { dim, entries: (0..dim).map(|i| (i, i, C64::new(s, 0.0))).collect() }
    }

    /// Fails when `m` is not Hermitian within `tol`.
    pub fn from_dense(m: &ComplexMatrix, tol: f64) -> Result<Self, SdpError> {
        if !m.is_square() {
            return Err(SdpError::Malformed(format!("{}x{} coefficient", m.rows(), m.cols())));
        }
        let residual = m.hermitian_residual();
        if residual > tol {
            return Err(SdpError::Malformed(format!("non-Hermitian coefficient (defect {residual:.3e})")));
        }
        let n = m.rows();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in i..n {
                let v = if i == j {
                    C64::new(m[(i, i)].re, 0.0)
                } else {
                    (m[(i, j)] + m[(j, i)].conj()) * 0.5
                };
                if v != ZERO {
                    entries.push((i, j, v));
                }
            }
        }
        Ok(Self { dim: n, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Adds the upper-triangle entry `(i, j)`, `i ≤ j`; the lower mirror is implied.
    pub fn push(&mut self, i: usize, j: usize, value: C64) {
        self.entries.push((i, j, value));
    }

    /// Adds the functional `X ↦ Re(coeff · X[p, q])`.
    pub fn push_real_part(&mut self, p: usize, q: usize, coeff: C64) {
        use std::cmp::Ordering;
        match p.cmp(&q) {
            Ordering::Equal => self.entries.push((p, p, C64::new(coeff.re, 0.0))),
            Ordering::Less => self.entries.push((p, q, coeff.conj() * 0.5)),
            Ordering::Greater => self.entries.push((q, p, coeff * 0.5)),
        }
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for &(i, j, v) in &self.entries {
            m[(i, j)] += v;
            if i != j {
                m[(j, i)] += v.conj();
            }
        }
        m
    }

    fn validate(&self, block_dim: usize) -> Result<(), String> {
        if self.dim != block_dim {
            return Err(format!("coefficient of dimension {} on a block of dimension {block_dim}", self.dim));
        }
        for &(i, j, v) in &self.entries {
            if i > j || j >= self.dim {
                return Err(format!("entry ({i}, {j}) outside the upper triangle of a {} block", self.dim));
            }
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(format!("non-finite coefficient at ({i}, {j})"));
            }
            if i == j && v.im != 0.0 {
                return Err(format!("non-Hermitian coefficient: imaginary diagonal at ({i}, {i})"));
            }
        }
        Ok(())
    }

    /// Accumulates into the packed real representation of a block.
    fn scatter(&self, out: &mut [f64], scale: f64) {
        let n = self.dim;
        for &(i, j, v) in &self.entries {
            if i == j {
                out[i * n + i] += scale * v.re;
            } else {
                out[i * n + j] += scale * SQRT_2 * v.re;
                out[j * n + i] += scale * SQRT_2 * v.im;
            }
        }
    }
}

/// `Σ_b ⟨A_b, X_b⟩ = rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(usize, HermitianCoeff)>,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(terms: Vec<(usize, HermitianCoeff)>, rhs: f64) -> Self {
        Self { terms, rhs }
    }

    /// Builds from dense per-block coefficients, rejecting non-Hermitian ones.
    pub fn dense(terms: Vec<(usize, ComplexMatrix)>, rhs: f64) -> Result<Self, SdpError> {
        let terms = terms
            .into_iter()
            .map(|(b, m)| Ok((b, HermitianCoeff::from_dense(&m, 0.0)?)))
            .collect::<Result<_, SdpError>>()?;
        Ok(Self { terms, rhs })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SdpProblem {
    blocks: Vec<usize>,
    objective: Vec<(usize, HermitianCoeff)>,
    constraints: Vec<Constraint>,
}

impl SdpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a PSD block variable and returns its index.
    pub fn add_block(&mut self, dim: usize) -> usize {
        self.blocks.push(dim);
        self.blocks.len() - 1
    }

    pub fn add_objective(&mut self, block: usize, coeff: HermitianCoeff) {
        self.objective.push((block, coeff));
    }

    pub fn add_constraint(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Multiplies every constraint row and its right-hand side by `s`.
    pub fn scale_constraints(&mut self, s: f64) {
        for c in &mut self.constraints {
            c.rhs *= s;
            for (_, coeff) in &mut c.terms {
                for e in &mut coeff.entries {
                    e.2 *= s;
                }
            }
        }
    }

    fn validate(&self) -> Result<(), SdpError> {
        if self.blocks.contains(&0) {
            return Err(SdpError::Malformed("zero-dimensional block".into()));
        }
        let check = |b: usize, coeff: &HermitianCoeff, what: &str| -> Result<(), SdpError> {
            let dim = *self
                .blocks
                .get(b)
                .ok_or_else(|| SdpError::Malformed(format!("{what} references missing block {b}")))?;
            coeff.validate(dim).map_err(|e| SdpError::Malformed(format!("{what}: {e}")))
        };
        for (b, c) in &self.objective {
            check(*b, c, "objective")?;
        }
        for (k, con) in self.constraints.iter().enumerate() {
            if !con.rhs.is_finite() {
                return Err(SdpError::Malformed(format!("constraint {k} has non-finite rhs")));
            }
            for (b, c) in &con.terms {
                check(*b, c, &format!("constraint {k}"))?;
            }
        }
        Ok(())
    }

    /// `Σ_b ⟨C_b, X_b⟩` for given block values.
    pub fn objective_at(&self, blocks: &[ComplexMatrix]) -> f64 {
        self.objective.iter().map(|(b, c)| c.to_dense().inner_real(&blocks[*b])).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub tol: f64,
    pub max_iter: usize,
    /// Initial ADMM penalty.
    pub rho: f64,
    /// Over-relaxation factor in (0, 2).
    pub alpha: f64,
    /// Iterations between penalty updates.
    pub adapt_every: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { tol: 1e-7, max_iter: 200_000, rho: 1.0, alpha: 1.6, adapt_every: 40 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SolveStatus {
    Optimal,
    MaxIterations,
    Diverged,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SolveStatus,
    pub objective_value: f64,
    /// PSD block values.
    pub block_values: Vec<ComplexMatrix>,
    /// `‖A z − b‖ / (1 + ‖b‖)` for the returned blocks.
    pub primal_residual: f64,
    /// Relative change of the PSD iterate scaled by the penalty.
    pub dual_residual: f64,
    /// Relative gap between primal and dual objective estimates.
    pub gap: f64,
    pub min_eigenvalue: f64,
    pub iterations: usize,
    state: AdmmState,
}

#[derive(Debug, Clone)]
struct AdmmState {
    z: Vec<f64>,
    u: Vec<f64>,
    rho: f64,
}

/// Problem compiled to packed real coordinates.
struct Compiled {
    offsets: Vec<usize>,
    dims: Vec<usize>,
    n: usize,
    c: Vec<f64>,
    rows: Vec<Vec<(usize, f64)>>,
    b: Vec<f64>,
    /// Independent rows kept for the projection, in pivot order.
    kept: Vec<usize>,
    /// Lower-triangular factor of the kept Gram matrix, row-major `k × k`.
    chol: Vec<f64>,
}

impl Compiled {
    fn new(p: &SdpProblem) -> Self {
        let mut offsets = Vec::with_capacity(p.blocks.len());
        let mut n = 0;
        for &d in &p.blocks {
            offsets.push(n);
            n += d * d;
        }
        let mut c = vec![0.0; n];
        for (b, coeff) in &p.objective {
            coeff.scatter(&mut c[offsets[*b]..offsets[*b] + p.blocks[*b].pow(2)], 1.0);
        }
        let mut rows = Vec::with_capacity(p.constraints.len());
        let mut b = Vec::with_capacity(p.constraints.len());
        let mut dense = vec![0.0; n];
        for con in &p.constraints {
            let mut touched = Vec::new();
            for (blk, coeff) in &con.terms {
                let off = offsets[*blk];
                let d = p.blocks[*blk];
                coeff.scatter(&mut dense[off..off + d * d], 1.0);
                for &(i, j, _) in &coeff.entries {
                    touched.push(off + i * d + j);
                    touched.push(off + j * d + i);
                }
            }
            touched.sort_unstable();
            touched.dedup();
            let row: Vec<(usize, f64)> = touched
                .into_iter()
                .filter_map(|k| {
                    let v = std::mem::take(&mut dense[k]);
                    (v != 0.0).then_some((k, v))
                })
                .collect();
            rows.push(row);
            b.push(con.rhs);
        }
        let (kept, chol) = factor_rows(&rows, n);
        Self { offsets, dims: p.blocks.clone(), n, c, rows, b, kept, chol }
    }

    fn residual_norm(&self, x: &[f64]) -> f64 {
        self.rows
            .iter()
            .zip(&self.b)
            .map(|(row, &bk)| {
                let ax: f64 = row.iter().map(|&(k, v)| v * x[k]).sum();
                (ax - bk).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Projects `w` onto `{x : A x = b}` in place and returns the multiplier
    /// `t = (A Aᵀ)⁻¹ (A w − b)` over the kept rows.
    fn project_affine(&self, w: &mut [f64]) -> Vec<f64> {
        let k = self.kept.len();
        let mut t: Vec<f64> = self
            .kept
            .iter()
            .map(|&r| self.rows[r].iter().map(|&(i, v)| v * w[i]).sum::<f64>() - self.b[r])
            .collect();
        // L y = t, then Lᵀ t = y.
        for i in 0..k {
            let mut s = t[i];
            for j in 0..i {
                s -= self.chol[i * k + j] * t[j];
            }
            t[i] = s / self.chol[i * k + i];
        }
        for i in (0..k).rev() {
            let mut s = t[i];
            for j in i + 1..k {
                s -= self.chol[j * k + i] * t[j];
            }
            t[i] = s / self.chol[i * k + i];
        }
        for (a, &r) in self.kept.iter().enumerate() {
            for &(i, v) in &self.rows[r] {
                w[i] -= v * t[a];
            }
        }
        t
    }

    fn dual_objective(&self, t: &[f64], rho: f64) -> f64 {
        self.kept.iter().zip(t).map(|(&r, &ti)| -rho * ti * self.b[r]).sum()
    }

    fn unpack(&self, x: &[f64], blk: usize) -> ComplexMatrix {
        let d = self.dims[blk];
        let seg = &x[self.offsets[blk]..self.offsets[blk] + d * d];
        ComplexMatrix::from_fn(d, d, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Equal => C64::new(seg[i * d + i], 0.0),
            std::cmp::Ordering::Less => C64::new(seg[i * d + j], seg[j * d + i]) / SQRT_2,
            std::cmp::Ordering::Greater => C64::new(seg[j * d + i], -seg[i * d + j]) / SQRT_2,
        })
    }

    fn pack(&self, m: &ComplexMatrix, x: &mut [f64], blk: usize) {
        let d = self.dims[blk];
        let seg = &mut x[self.offsets[blk]..self.offsets[blk] + d * d];
        for i in 0..d {
            seg[i * d + i] = m[(i, i)].re;
            for j in i + 1..d {
                let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                seg[i * d + j] = SQRT_2 * v.re;
                seg[j * d + i] = SQRT_2 * v.im;
            }
        }
    }
}

/// Pivoted Cholesky of `A Aᵀ`, stopping at numerically dependent rows.
fn factor_rows(rows: &[Vec<(usize, f64)>], n: usize) -> (Vec<usize>, Vec<f64>) {
    let m = rows.len();
    let mut by_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (r, row) in rows.iter().enumerate() {
        for &(k, v) in row {
            by_col[k].push((r, v));
        }
    }
    let mut gram = vec![0.0; m * m];
    for col in &by_col {
        for &(r1, v1) in col {
            for &(r2, v2) in col {
                gram[r1 * m + r2] += v1 * v2;
            }
        }
    }
    let max_diag = (0..m).map(|i| gram[i * m + i]).fold(0.0, f64::max);
    let threshold = 1e-10 * max_diag.max(f64::MIN_POSITIVE);
    let mut chosen: Vec<usize> = Vec::new();
    let mut active = vec![true; m];
    // Columns of the factor, indexed by original row.
    let mut cols: Vec<Vec<f64>> = Vec::new();
    loop {
        let pivot = (0..m)
            .filter(|&i| active[i])
            .max_by(|&i, &j| gram[i * m + i].total_cmp(&gram[j * m + j]).then(j.cmp(&i)));
        let Some(p) = pivot else { break };
        let d = gram[p * m + p];
        if d <= threshold {
            break;
        }
        active[p] = false;
        let s = d.sqrt();
        let mut l = vec![0.0; m];
        for i in 0..m {
            if active[i] || i == p {
                l[i] = gram[i * m + p] / s;
            }
        }
        for i in (0..m).filter(|&i| active[i]) {
            if l[i] == 0.0 {
                continue;
            }
            for j in (0..m).filter(|&j| active[j]) {
                gram[i * m + j] -= l[i] * l[j];
            }
        }
        chosen.push(p);
        cols.push(l);
    }
    let k = chosen.len();
    let mut chol = vec![0.0; k * k];
    for (a, &ra) in chosen.iter().enumerate() {
        for (bcol, col) in cols.iter().enumerate().take(a + 1) {
            chol[a * k + bcol] = col[ra];
        }
    }
    (chosen, chol)
}

pub fn solve(p: &SdpProblem, settings: &SolverSettings) -> Result<SdpSolution, SdpError> {
    p.validate()?;
    let compiled = Compiled::new(p);
    let n = compiled.n;
    let state = AdmmState { z: vec![0.0; n], u: vec![0.0; n], rho: settings.rho };
    Ok(run(&compiled, state, settings))
}

/// Continues from a previous solution of the same problem. The result is the
/// better of the warm point and the continued run.
pub fn refine(p: &SdpProblem, warm: &SdpSolution, settings: &SolverSettings) -> Result<SdpSolution, SdpError> {
    p.validate()?;
    if warm.block_values.len() != p.blocks.len()
        || warm.block_values.iter().zip(&p.blocks).any(|(m, &d)| m.rows() != d || m.cols() != d)
    {
        return Err(SdpError::WarmStartMismatch("block dimensions differ".into()));
    }
    let compiled = Compiled::new(p);
    let state = if warm.state.z.len() == compiled.n {
        warm.state.clone()
    } else {
        let mut z = vec![0.0; compiled.n];
        for (b, m) in warm.block_values.iter().enumerate() {
            compiled.pack(m, &mut z, b);
        }
        AdmmState { z, u: vec![0.0; compiled.n], rho: settings.rho }
    };
    let fresh = run(&compiled, state, settings);
    let warm_feasible = warm.status == SolveStatus::Optimal;
    if warm_feasible && fresh.objective_value > warm.objective_value + settings.tol {
        return Ok(warm.clone());
    }
    Ok(fresh)
}

/// Starts the iteration from explicit block values (no dual information).
pub fn solve_from(p: &SdpProblem, start: &[ComplexMatrix], settings: &SolverSettings) -> Result<SdpSolution, SdpError> {
    p.validate()?;
    if start.len() != p.blocks.len() || start.iter().zip(&p.blocks).any(|(m, &d)| m.rows() != d) {
        return Err(SdpError::WarmStartMismatch("block dimensions differ".into()));
    }
    let compiled = Compiled::new(p);
    let mut z = vec![0.0; compiled.n];
    for (b, m) in start.iter().enumerate() {
        compiled.pack(m, &mut z, b);
    }
    let state = AdmmState { z, u: vec![0.0; compiled.n], rho: settings.rho };
    Ok(run(&compiled, state, settings))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Cone {
    /// Cached eigenbases per block for warm-started projections.
    bases: Vec<Option<ComplexMatrix>>,
    min_eig: Vec<f64>,
}

impl Cone {
    fn project(&mut self, cp: &Compiled, v: &mut [f64]) {
        for blk in 0..cp.dims.len() {
            let d = cp.dims[blk];
            let off = cp.offsets[blk];
            if d == 1 {
                self.min_eig[blk] = v[off];
                v[off] = v[off].max(0.0);
                continue;
            }
            let m = cp.unpack(v, blk);
            let start = self.bases[blk].take().unwrap_or_else(|| ComplexMatrix::identity(d));
            let e = eig_hermitian_from(&m, &start);
            self.min_eig[blk] = e.min_value();
            if e.min_value() < 0.0 {
                let proj = e.reconstruct_with(|l| l.max(0.0));
                cp.pack(&proj, v, blk);
            }
            self.bases[blk] = Some(e.vectors);
        }
    }
}

fn run(cp: &Compiled, mut st: AdmmState, settings: &SolverSettings) -> SdpSolution {
    let n = cp.n;
    let alpha = settings.alpha;
    let tol = settings.tol;
    let c_norm = norm(&cp.c);
    let b_norm = norm(&cp.b);
    let mut cone = Cone { bases: vec![None; cp.dims.len()], min_eig: vec![0.0; cp.dims.len()] };
    let mut x = vec![0.0; n];
    let mut z_prev;
    let mut status = SolveStatus::MaxIterations;
    let mut iterations = 0;
    let (mut r_dual, mut gap) = (f64::INFINITY, f64::INFINITY);

    for it in 1..=settings.max_iter {
        iterations = it;
        let rho = st.rho;
        for i in 0..n {
            x[i] = st.z[i] - st.u[i] - cp.c[i] / rho;
        }
        let t = cp.project_affine(&mut x);
        z_prev = std::mem::take(&mut st.z);
        let mut v: Vec<f64> = (0..n).map(|i| alpha * x[i] + (1.0 - alpha) * z_prev[i] + st.u[i]).collect();
        let unprojected = v.clone();
        cone.project(cp, &mut v);
        st.z = v;
        for i in 0..n {
            st.u[i] = unprojected[i] - st.z[i];
        }

        let diff_xz: f64 = x.iter().zip(&st.z).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let dz: f64 = st.z.iter().zip(&z_prev).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let scale_p = 1.0 + norm(&x).max(norm(&st.z));
        let r_prim = diff_xz / scale_p;
        r_dual = rho * dz / (1.0 + c_norm);

        if !(r_prim.is_finite() && r_dual.is_finite()) || norm(&st.z) > 1e12 {
            status = SolveStatus::Diverged;
            break;
        }

        if r_prim <= tol && r_dual <= tol {
            let pobj = dot(&cp.c, &st.z);
            let dobj = cp.dual_objective(&t, rho);
            gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
            let feas = cp.residual_norm(&st.z) / (1.0 + b_norm);
            if gap <= tol && feas <= tol {
                status = SolveStatus::Optimal;
                break;
            }
        }

        if settings.adapt_every > 0 && it % settings.adapt_every == 0 {
            let ratio = r_prim / r_dual.max(1e-300);
            let factor = if ratio > 5.0 {
                2.0
            } else if ratio < 0.2 {
                0.5
            } else {
                1.0
            };
            let new_rho = (st.rho * factor).clamp(1e-6, 1e6);
            if new_rho != st.rho {
                let s = st.rho / new_rho;
                st.u.iter_mut().for_each(|ui| *ui *= s);
                st.rho = new_rho;
            }
        }
    }

    let block_values: Vec<ComplexMatrix> = (0..cp.dims.len()).map(|b| cp.unpack(&st.z, b)).collect();
    let min_eigenvalue = block_values
        .iter()
        .map(crate::linalg::min_eigenvalue)
        .fold(f64::INFINITY, f64::min);
    let primal_residual = cp.residual_norm(&st.z) / (1.0 + b_norm);
    SdpSolution {
        status,
        objective_value: dot(&cp.c, &st.z),
        block_values,
        primal_residual,
        dual_residual: r_dual,
        gap,
        min_eigenvalue,
        iterations,
        state: st,
    }
}

/// Affine Hermitian matrix equality `Σ L_b(X_b) = rhs`, expanded into one
/// real constraint per real degree of freedom of the upper triangle.
#[derive(Debug, Clone)]
pub struct MatrixEquation {
    dim: usize,
    /// Per upper-triangle output entry: `(block, p, q, coeff)` meaning
    /// `out[i][j] += coeff · X_block[p][q]`.
    terms: Vec<Vec<(usize, usize, usize, C64)>>,
    rhs: ComplexMatrix,
}

impl MatrixEquation {
    pub fn new(dim: usize) -> Self {
        Self { dim, terms: vec![Vec::new(); dim * dim], rhs: ComplexMatrix::zeros(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `out[i][j] += coeff · X_block[p][q]`; only `i ≤ j` entries are recorded.
    pub fn add_entry(&mut self, i: usize, j: usize, block: usize, p: usize, q: usize, coeff: C64) {
        if i <= j {
            self.terms[i * self.dim + j].push((block, p, q, coeff));
        }
    }

    /// `+ coeff · X_block` for a block of the same dimension.
    pub fn add_block(&mut self, block: usize, coeff: f64) {
        let c = C64::new(coeff, 0.0);
        for i in 0..self.dim {
            for j in i..self.dim {
                self.add_entry(i, j, block, i, j, c);
            }
        }
    }

    /// `+ coeff · Tr_traced X_block`, where the block lives on
    /// `(kept, traced)` factor dimensions `dims` and `traced` lists the traced
    /// factor positions. The kept factors must multiply to `dim`.
    pub fn add_partial_trace(&mut self, block: usize, dims: &[usize], traced: &[usize], coeff: f64) {
        let n = dims.len();
        let mut strides = vec![1; n];
        for k in (0..n.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        let kept: Vec<usize> = (0..n).filter(|k| !traced.contains(k)).collect();
        let expand = |factors: &[usize]| -> Vec<usize> {
            let total: usize = factors.iter().map(|&f| dims[f]).product();
            (0..total)
                .map(|mut idx| {
                    let mut off = 0;
                    for &f in factors.iter().rev() {
                        off += (idx % dims[f]) * strides[f];
                        idx /= dims[f];
                    }
                    off
                })
                .collect()
        };
        let kept_off = expand(&kept);
        let traced_off = expand(traced);
        assert_eq!(kept_off.len(), self.dim, "kept factors do not match equation dimension");
        let c = C64::new(coeff, 0.0);
        for i in 0..self.dim {
            for j in i..self.dim {
                for &t in &traced_off {
                    self.add_entry(i, j, block, kept_off[i] + t, kept_off[j] + t, c);
                }
            }
        }
    }

    /// `+ coeff · x · I` for a scalar (1×1) block `x`.
    pub fn add_scalar_identity(&mut self, block: usize, coeff: f64) {
        for i in 0..self.dim {
            self.add_entry(i, i, block, 0, 0, C64::new(coeff, 0.0));
        }
    }

    /// Adds a constant to the right-hand side.
    pub fn add_rhs(&mut self, m: &ComplexMatrix) {
        self.rhs += m;
    }

    /// Appends the real constraints to `problem`.
    pub fn emit(&self, problem: &mut SdpProblem) {
        let blocks = problem.blocks.clone();
        for i in 0..self.dim {
            for j in i..self.dim {
                let terms = &self.terms[i * self.dim + j];
                let parts: &[(C64, f64)] = if i == j {
                    &[(C64::new(1.0, 0.0), 0.0)]
                } else {
                    &[(C64::new(1.0, 0.0), 0.0), (C64::new(0.0, -1.0), 1.0)]
                };
                for &(phase, which) in parts {
                    // Re(phase · out_ij) = Re(phase · rhs_ij); phase −i picks the imaginary part.
                    let mut by_block: Vec<(usize, HermitianCoeff)> = Vec::new();
                    for &(blk, p, q, coeff) in terms {
                        let pos = match by_block.iter().position(|(b, _)| *b == blk) {
                            Some(pos) => pos,
                            None => {
                                by_block.push((blk, HermitianCoeff::new(blocks[blk])));
                                by_block.len() - 1
                            }
                        };
                        by_block[pos].1.push_real_part(p, q, phase * coeff);
                    }
                    let target = self.rhs[(i, j)];
                    let rhs = if which == 0.0 { target.re } else { target.im };
                    problem.add_constraint(Constraint::new(by_block, rhs));
                }
            }
        }
    }

    /// Evaluates `Σ L_b(X_b) − rhs` for given block values.
    pub fn residual(&self, blocks: &[ComplexMatrix]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in i..self.dim {
                let s: C64 = self.terms[i * self.dim + j].iter().map(|&(b, p, q, c)| c * blocks[b][(p, q)]).sum();
                out[(i, j)] = s - self.rhs[(i, j)];
                if i != j {
                    out[(j, i)] = out[(i, j)].conj();
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: f64) -> ComplexMatrix {
        ComplexMatrix::diag_real(&[v])
    }

    #[test]
    fn scalar_equality() {
        let mut p = SdpProblem::new();
        let x = p.add_block(1);
        p.add_objective(x, HermitianCoeff::scaled_identity(1, 1.0));
        p.add_constraint(Constraint::dense(vec![(x, scalar(1.0))], 3.0).unwrap());
        let s = solve(&p, &SolverSettings::default()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.objective_value - 3.0).abs() < 1e-6);
    }

    #[test]
    fn trace_with_fixed_entries() {
        let mut p = SdpProblem::new();
        let x = p.add_block(2);
        p.add_objective(x, HermitianCoeff::scaled_identity(2, 1.0));
        let mut eq = MatrixEquation::new(2);
        eq.add_block(x, 1.0);
        eq.add_rhs(&ComplexMatrix::from_real_rows(&[&[1.0, 0.5], &[0.5, 1.0]]));
        eq.emit(&mut p);
        let s = solve(&p, &SolverSettings::default()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.objective_value - 2.0).abs() < 1e-6, "{}", s.objective_value);
    }

    #[test]
    fn largest_eigenvalue_via_slack_block() {
        // min λ s.t. S = λ I − σx ⪰ 0
        let mut p = SdpProblem::new();
        let lam_pos = p.add_block(1);
        let lam_neg = p.add_block(1);
        let slack = p.add_block(2);
        p.add_objective(lam_pos, HermitianCoeff::scaled_identity(1, 1.0));
        p.add_objective(lam_neg, HermitianCoeff::scaled_identity(1, -1.0));
        let mut eq = MatrixEquation::new(2);
        eq.add_block(slack, 1.0);
        eq.add_scalar_identity(lam_pos, -1.0);
        eq.add_scalar_identity(lam_neg, 1.0);
        eq.add_rhs(&ComplexMatrix::from_real_rows(&[&[0.0, -1.0], &[-1.0, 0.0]]));
        eq.emit(&mut p);
        let s = solve(&p, &SolverSettings::default()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.objective_value - 1.0).abs() < 1e-6, "{}", s.objective_value);
    }

    #[test]
    fn rejects_malformed_problems() {
        let mut p = SdpProblem::new();
        let x = p.add_block(2);
        let bad = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(Constraint::dense(vec![(x, bad)], 0.0).is_err());
        p.add_constraint(Constraint::dense(vec![(x, ComplexMatrix::identity(3))], 1.0).unwrap());
        assert!(matches!(solve(&p, &SolverSettings::default()), Err(SdpError::Malformed(_))));
        let mut q = SdpProblem::new();
        q.add_block(1);
        q.add_constraint(Constraint::dense(vec![(5, scalar(1.0))], 1.0).unwrap());
        assert!(solve(&q, &SolverSettings::default()).is_err());
        let mut r = SdpProblem::new();
        let y = r.add_block(1);
        r.add_constraint(Constraint::dense(vec![(y, scalar(1.0))], f64::NAN).unwrap());
        assert!(solve(&r, &SolverSettings::default()).is_err());
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let mut p = SdpProblem::new();
        let x = p.add_block(1);
        p.add_objective(x, HermitianCoeff::scaled_identity(1, 1.0));
        p.add_constraint(Constraint::dense(vec![(x, scalar(1.0))], 2.0).unwrap());
        p.add_constraint(Constraint::dense(vec![(x, scalar(2.0))], 4.0).unwrap());
        let s = solve(&p, &SolverSettings::default()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.objective_value - 2.0).abs() < 1e-6);
    }

    #[test]
    fn packing_round_trip_preserves_pairing() {
        let mut p = SdpProblem::new();
        p.add_block(3);
        let cp = Compiled::new(&p);
        let m = ComplexMatrix::from_fn(3, 3, |i, j| C64::new((i + 2 * j) as f64, i as f64 - j as f64)).hermitian_part();
        let mut v = vec![0.0; 9];
        cp.pack(&m, &mut v, 0);
        assert!(cp.unpack(&v, 0).difference_norm(&m) < 1e-14);
        let coeff_m = ComplexMatrix::from_fn(3, 3, |i, j| C64::new(1.0 + (i * j) as f64, (i as f64) - (j as f64))).hermitian_part();
        let coeff = HermitianCoeff::from_dense(&coeff_m, 1e-12).unwrap();
        let mut cv = vec![0.0; 9];
        coeff.scatter(&mut cv, 1.0);
        let direct = (&coeff_m * &m).trace().re;
        assert!((dot(&cv, &v) - direct).abs() < 1e-12);
    }

    #[test]
    fn real_part_functional_matches_entry() {
        let m = ComplexMatrix::from_fn(2, 2, |i, j| C64::new((1 + i + j) as f64, i as f64 - j as f64)).hermitian_part();
        for (p, q) in [(0, 0), (0, 1), (1, 0)] {
            for coeff in [C64::new(1.0, 0.0), C64::new(0.0, -1.0), C64::new(0.3, 0.7)] {
                let mut h = HermitianCoeff::new(2);
                h.push_real_part(p, q, coeff);
                let value = h.to_dense().inner_real(&m);
                assert!((value - (coeff * m[(p, q)]).re).abs() < 1e-14);
            }
        }
    }
}
