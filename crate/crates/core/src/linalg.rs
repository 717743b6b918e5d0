//! Dense complex matrices and the handful of operations the rest of the
//! crate is built on: Kronecker products, partial traces over tensor
//! factors, Hermitian eigendecomposition and projection onto the PSD cone.
//!
//! Subsystems are indexed from zero, leftmost tensor factor first.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Default tolerance for structural checks (Hermiticity, validity reports).
pub const STRUCTURAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not Hermitian (‖M − M†‖_F = {residual:.3e} > {tol:.3e})")]
    NotHermitian { residual: f64, tol: f64 },
    #[error("invalid subsystem shape: {0}")]
    Shape(String),
    #[error("invalid permutation {0:?}")]
    Permutation(Vec<usize>),
}

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds from row-major entries; fails if the length is not `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO })
    }

    /// `|v⟩⟨w|`.
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
    }

    /// Projector onto computational basis vector `i` of a `d`-dimensional space.
    pub fn basis_projector(d: usize, i: usize) -> Self {
        Self::matrix_unit(d, i, i)
    }

    /// Matrix unit `E_ij = |i⟩⟨j|`.
    pub fn matrix_unit(d: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(d, d);
        m[(i, j)] = ONE;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_c(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Real Hilbert–Schmidt pairing `Re tr(A† B)`.
    pub fn inner_real(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    pub fn hermitian_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                s += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    /// `(M + M†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// `A† B` without materializing the adjoint.
    pub fn adjoint_mul(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "adjoint_mul dimension mismatch");
        let mut out = Self::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            for i in 0..self.cols {
                let a = self[(k, i)].conj();
                if a == ZERO {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// `A B A†`.
    pub fn conjugate_by(&self, a: &Self) -> Self {
        &(a * self) * &a.adjoint()
    }

    pub fn difference_norm(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let brow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(brow) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sum dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "difference dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

/// Tensor factor dimensions annotating a square matrix, leftmost first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemShape {
    dims: Vec<usize>,
}

impl SubsystemShape {
    pub fn new(dims: Vec<usize>) -> Result<Self, LinalgError> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(LinalgError::Shape(format!("dims must be positive, got {dims:?}")));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    fn check(&self, m: &ComplexMatrix) -> Result<(), LinalgError> {
        if !m.is_square() || m.rows() != self.total() {
            return Err(LinalgError::Shape(format!(
                "shape {:?} (total {}) does not annotate a {}x{} matrix",
                self.dims,
                self.total(),
                m.rows(),
                m.cols()
            )));
        }
        Ok(())
    }

    /// Row-major strides of each factor.
    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Traces out every factor not listed in `keep`. The kept factors stay in
/// their original order.
pub fn partial_trace(
    m: &ComplexMatrix,
    shape: &SubsystemShape,
    keep: &[usize],
) -> Result<ComplexMatrix, LinalgError> {
    shape.check(m)?;
    let n = shape.dims.len();
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.iter().any(|&k| k >= n) {
        return Err(LinalgError::Shape(format!("keep {keep:?} out of range for {n} factors")));
    }
    let traced: Vec<usize> = (0..n).filter(|k| !kept.contains(k)).collect();
    let strides = shape.strides();

    let kept_dims: Vec<usize> = kept.iter().map(|&k| shape.dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| shape.dims[k]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let traced_total: usize = traced_dims.iter().product();

    let offsets = |factors: &[usize], dims: &[usize]| -> Vec<usize> {
        let total: usize = dims.iter().product();
        (0..total)
            .map(|mut idx| {
                let mut off = 0;
                for (pos, &f) in factors.iter().enumerate().rev() {
                    off += (idx % dims[pos]) * strides[f];
                    idx /= dims[pos];
                }
                off
            })
            .collect()
    };
    let kept_off = offsets(&kept, &kept_dims);
    let traced_off = offsets(&traced, &traced_dims);
    debug_assert_eq!(traced_off.len(), traced_total);

    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for (i, &ri) in kept_off.iter().enumerate() {
        for (j, &cj) in kept_off.iter().enumerate() {
            let mut s = ZERO;
            for &t in &traced_off {
                s += m[(ri + t, cj + t)];
            }
            out[(i, j)] = s;
        }
    }
    Ok(out)
}

/// Reorders tensor factors: factor `k` of the result is factor `perm[k]` of
/// the input, so `permute_subsystems(a⊗b, [da, db], [1, 0]) = b⊗a`.
pub fn permute_subsystems(
    m: &ComplexMatrix,
    shape: &SubsystemShape,
    perm: &[usize],
) -> Result<ComplexMatrix, LinalgError> {
    shape.check(m)?;
    let index_map = permutation_index_map(shape, perm)?;
    let n = m.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (i, &si) in index_map.iter().enumerate() {
        for (j, &sj) in index_map.iter().enumerate() {
            out[(i, j)] = m[(si, sj)];
        }
    }
    Ok(out)
}

/// For each basis index of the permuted space, the index it came from.
pub(crate) fn permutation_index_map(
    shape: &SubsystemShape,
    perm: &[usize],
) -> Result<Vec<usize>, LinalgError> {
    let n = shape.dims.len();
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(LinalgError::Permutation(perm.to_vec()));
    }
    let strides = shape.strides();
    let new_dims: Vec<usize> = perm.iter().map(|&p| shape.dims[p]).collect();
    let total = shape.total();
    Ok((0..total)
        .map(|mut idx| {
            let mut src = 0;
            for k in (0..n).rev() {
                src += (idx % new_dims[k]) * strides[perm[k]];
                idx /= new_dims[k];
            }
            src
        })
        .collect())
}

/// Eigenvalues (descending) and orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| l)
    }

    /// `V f(Λ) V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &l) in self.values.iter().enumerate() {
            let w = f(l);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let a = v[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += a * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn min_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Fails if `‖m − m†‖_F > tol`; otherwise the Hermitian part is diagonalized.
pub fn eig_hermitian(m: &ComplexMatrix, tol: f64) -> Result<HermitianEigen, LinalgError> {
    let residual = m.hermitian_residual();
    if !(residual <= tol) {
        return Err(LinalgError::NotHermitian { residual, tol });
    }
    Ok(jacobi(m.hermitian_part(), ComplexMatrix::identity(m.rows())))
}

/// Same as [`eig_hermitian`] but starts from a guess basis `start` (unitary),
/// which makes the sweep count small when `m` is close to diagonal in it.
/// The input is assumed Hermitian.
pub fn eig_hermitian_from(m: &ComplexMatrix, start: &ComplexMatrix) -> HermitianEigen {
    let rotated = start.adjoint_mul(&(m * start)).hermitian_part();
    jacobi(rotated, start.clone())
}

fn jacobi(mut a: ComplexMatrix, mut v: ComplexMatrix) -> HermitianEigen {
    let n = a.rows();
    let scale = a.frobenius_norm();
    if n > 1 && scale > 0.0 {
        let target = (1e-14 * scale).powi(2);
        for _ in 0..JACOBI_MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)].norm_sqr())
                .sum();
            if off <= target {
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    HermitianEigen { values, vectors }
}

/// One Jacobi rotation annihilating `a[p][q]`; `a ← U† a U`, `v ← v U`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Phase removal makes the pivot real; then a real rotation.
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.is_finite() {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    } else {
        0.0
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = a.rows();
    // U = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on the (p, q) plane.
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * u_qp;
        a[(k, q)] = akp * s + akq * u_qq;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * u_qp;
        v[(k, q)] = vkp * s + vkq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * u_qp.conj();
        a[(q, k)] = apk * s + aqk * u_qq.conj();
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

/// Nearest PSD matrix in Frobenius norm: symmetrize, then clip negative
/// eigenvalues to zero.
pub fn psd_project(m: &ComplexMatrix) -> ComplexMatrix {
    let h = m.hermitian_part();
    if h.rows() == 1 {
        return ComplexMatrix::diag_real(&[h[(0, 0)].re.max(0.0)]);
    }
    jacobi(h, ComplexMatrix::identity(m.rows())).reconstruct_with(|l| l.max(0.0))
}

/// PSD square root; eigenvalues below `tol` are treated as zero.
pub fn sqrt_psd(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix, LinalgError> {
    let e = eig_hermitian(m, tol.max(STRUCTURAL_TOL))?;
    Ok(e.reconstruct_with(|l| if l > tol { l.sqrt() } else { 0.0 }))
}

/// Number of eigenvalues strictly above `tol`.
pub fn rank_above(m: &ComplexMatrix, tol: f64) -> Result<usize, LinalgError> {
    let e = eig_hermitian(m, STRUCTURAL_TOL.max(tol))?;
    Ok(e.values.iter().filter(|&&l| l > tol).count())
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    if m.rows() == 0 {
        return 0.0;
    }
    jacobi(m.hermitian_part(), ComplexMatrix::identity(m.rows())).min_value()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    fn pseudo_random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let g = ComplexMatrix::from_fn(n, n, |_, _| c(next(), next()));
        g.hermitian_part()
    }

    #[test]
    fn kron_identity_and_diagonal() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let a = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let b = ComplexMatrix::diag_real(&[0.0, 1.0]);
        assert_eq!(kron(&a, &b), ComplexMatrix::diag_real(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn kron_acts_on_product_vectors() {
        let a = ComplexMatrix::from_vec(2, 2, vec![c(1.0, 2.0), c(0.5, 0.0), c(-1.0, 1.0), c(0.0, 3.0)])
            .unwrap();
        let b = ComplexMatrix::from_vec(2, 2, vec![c(0.0, 1.0), c(2.0, 0.0), c(1.0, -1.0), c(4.0, 0.5)])
            .unwrap();
        let ab = kron(&a, &b);
        for x in 0..2 {
            for y in 0..2 {
                let ex = ComplexMatrix::identity(2).column(x);
                let ey = ComplexMatrix::identity(2).column(y);
                let lhs = ab.mul_vec(&kron_vec(&ex, &ey));
                let rhs = kron_vec(&a.mul_vec(&ex), &b.mul_vec(&ey));
                for (l, r) in lhs.iter().zip(&rhs) {
                    assert!((l - r).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn partial_trace_examples() {
        let rho = ComplexMatrix::from_vec(2, 2, vec![c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)])
            .unwrap();
        let sigma = ComplexMatrix::diag_real(&[0.25, 0.5, 0.75]);
        let shape = SubsystemShape::new(vec![2, 3]).unwrap();
        let pt = partial_trace(&kron(&rho, &sigma), &shape, &[0]).unwrap();
        assert!(pt.difference_norm(&rho.scale(1.5)) < 1e-14);
        let pt1 = partial_trace(&kron(&rho, &sigma), &shape, &[1]).unwrap();
        assert!(pt1.difference_norm(&sigma) < 1e-14);

        let shape22 = SubsystemShape::new(vec![2, 2]).unwrap();
        let pt = partial_trace(&ComplexMatrix::identity(4), &shape22, &[1]).unwrap();
        assert_eq!(pt, ComplexMatrix::identity(2).scale(2.0));
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let phi = vec![c(h, 0.0), ZERO, ZERO, c(h, 0.0)];
        let bell = ComplexMatrix::outer(&phi, &phi);
        let shape = SubsystemShape::new(vec![2, 2]).unwrap();
        let reduced = partial_trace(&bell, &shape, &[0]).unwrap();
        // elementwise-sum oracle: reduced[i][j] = Σ_k bell[(i,k),(j,k)]
        let oracle = ComplexMatrix::from_fn(2, 2, |i, j| (0..2).map(|k| bell[(2 * i + k, 2 * j + k)]).sum());
        assert!(reduced.difference_norm(&oracle) < 1e-15);
        assert!(reduced.difference_norm(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_shape() {
        let shape = SubsystemShape::new(vec![2, 3]).unwrap();
        assert!(partial_trace(&ComplexMatrix::identity(4), &shape, &[0]).is_err());
        assert!(SubsystemShape::new(vec![2, 0]).is_err());
        let shape = SubsystemShape::new(vec![2, 2]).unwrap();
        assert!(partial_trace(&ComplexMatrix::identity(4), &shape, &[2]).is_err());
    }

    #[test]
    fn permute_examples() {
        let rho = ComplexMatrix::diag_real(&[0.9, 0.1]);
        let sigma = ComplexMatrix::from_vec(3, 3, (0..9).map(|k| c(k as f64, -(k as f64))).collect()).unwrap();
        let shape = SubsystemShape::new(vec![2, 3]).unwrap();
        let prod = kron(&rho, &sigma);
        assert_eq!(permute_subsystems(&prod, &shape, &[0, 1]).unwrap(), prod);
        let swapped = permute_subsystems(&prod, &shape, &[1, 0]).unwrap();
        assert!(swapped.difference_norm(&kron(&sigma, &rho)) < 1e-15);
        let back = permute_subsystems(&swapped, &SubsystemShape::new(vec![3, 2]).unwrap(), &[1, 0]).unwrap();
        assert_eq!(back, prod);
        assert!(permute_subsystems(&prod, &shape, &[0, 0]).is_err());
        assert!(permute_subsystems(&prod, &shape, &[0]).is_err());
    }

    #[test]
    fn eig_diagonal_and_pauli() {
        let e = eig_hermitian(&ComplexMatrix::diag_real(&[1.0, 3.0]), 1e-12).unwrap();
        assert_eq!(e.values, vec![3.0, 1.0]);
        let e = eig_hermitian(&sigma_x(), 1e-12).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14 && (e.values[1] + 1.0).abs() < 1e-14);
        let v0 = e.vectors.column(0);
        // (|0⟩+|1⟩)/√2 up to phase
        let overlap = (v0[0] + v0[1]).norm() / std::f64::consts::SQRT_2;
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(eig_hermitian(&m, 1e-9), Err(LinalgError::NotHermitian { .. })));
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        for seed in 0..5 {
            let m = pseudo_random_hermitian(4, seed);
            let e = eig_hermitian(&m, 1e-12).unwrap();
            assert!(e.reconstruct().difference_norm(&m) < 1e-10 * m.frobenius_norm().max(1.0));
            let gram = e.vectors.adjoint_mul(&e.vectors);
            assert!(gram.difference_norm(&ComplexMatrix::identity(4)) < 1e-12);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn eig_matches_two_by_two_formula() {
        for seed in 10..30 {
            let m = pseudo_random_hermitian(2, seed);
            let (a, d, b) = (m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
            let mid = (a + d) / 2.0;
            let rad = (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt();
            let e = eig_hermitian(&m, 1e-12).unwrap();
            assert!((e.values[0] - (mid + rad)).abs() < 1e-10);
            assert!((e.values[1] - (mid - rad)).abs() < 1e-10);
        }
    }

    #[test]
    fn eig_is_deterministic() {
        let m = pseudo_random_hermitian(5, 77);
        let a = eig_hermitian(&m, 1e-12).unwrap();
        let b = eig_hermitian(&m, 1e-12).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.vectors, b.vectors);
    }

    #[test]
    fn warm_started_eig_agrees() {
        let m = pseudo_random_hermitian(6, 3);
        let cold = eig_hermitian(&m, 1e-12).unwrap();
        let nudged = &m + &ComplexMatrix::identity(6).scale(1e-3);
        let warm = eig_hermitian_from(&nudged, &cold.vectors);
        assert!(warm.reconstruct().difference_norm(&nudged) < 1e-12);
    }

    #[test]
    fn psd_projection_examples() {
        let p = ComplexMatrix::diag_real(&[1.0, -1.0]);
        assert!(psd_project(&p).difference_norm(&ComplexMatrix::diag_real(&[1.0, 0.0])) < 1e-15);
        let psd = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 1.0]]);
        assert!(psd_project(&psd).difference_norm(&psd) < 1e-12);
    }

    #[test]
    fn psd_projection_beats_grid_search_on_two_by_two() {
        // Grid-search oracle over PSD 2x2 real symmetric matrices
        // [[a, b], [b, c]] with a, c ≥ 0 and b² ≤ ac.
        let m = ComplexMatrix::from_real_rows(&[&[0.3, 0.8], &[0.8, -0.5]]);
        let proj = psd_project(&m);
        let best_proj = proj.difference_norm(&m);
        let mut best_grid = f64::INFINITY;
        let steps = 120;
        for ia in 0..=steps {
            let a = ia as f64 / steps as f64 * 1.2;
            for ic in 0..=steps {
                let cc = ic as f64 / steps as f64 * 1.2;
                let bmax = (a * cc).sqrt();
                for ib in 0..=steps {
                    let b = -bmax + 2.0 * bmax * ib as f64 / steps as f64;
                    let cand = ComplexMatrix::from_real_rows(&[&[a, b], &[b, cc]]);
                    best_grid = best_grid.min(cand.difference_norm(&m));
                }
            }
        }
        assert!(best_proj <= best_grid + 1e-12);
        assert!(best_grid - best_proj < 2e-2);
        assert!(min_eigenvalue(&proj) > -1e-12);
    }

    #[test]
    fn sqrt_psd_squares_back() {
        let m = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 1.0]]);
        let s = sqrt_psd(&m, 1e-12).unwrap();
        assert!((&s * &s).difference_norm(&m) < 1e-12);
    }
}
