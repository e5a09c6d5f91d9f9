use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const DEFAULT_DIM_CAP: usize = 20_000;

/// Numerical thresholds shared by every check in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Relative singular-value cutoff for rank and kernel decisions.
    pub rank_tol: f64,
    /// Absolute tolerance for equality checks.
    pub assert_tol: f64,
    /// Eigenvalue floor below which a Hermitian matrix is not PSD.
    pub psd_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            rank_tol: 1e-10,
            assert_tol: 1e-9,
            psd_tol: 1e-9,
        }
    }
}

impl ToleranceConfig {
    pub fn new(rank_tol: f64, assert_tol: f64, psd_tol: f64) -> Result<Self> {
        let cfg = ToleranceConfig {
            rank_tol,
            assert_tol,
            psd_tol,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.rank_tol, self.assert_tol, self.psd_tol];
        if all.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::InvalidTolerance(
                "all tolerances must be finite and strictly positive".into(),
            ));
        }
        if self.rank_tol > self.assert_tol {
            return Err(Error::InvalidTolerance(format!(
                "rank_tol {} exceeds assert_tol {}",
                self.rank_tol, self.assert_tol
            )));
        }
        Ok(())
    }
}

/// Tolerances plus the dense-dimension guard.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub tol: ToleranceConfig,
    pub dim_cap: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            tol: ToleranceConfig::default(),
            dim_cap: DEFAULT_DIM_CAP,
        }
    }
}

impl Settings {
    pub fn with_cap(dim_cap: usize) -> Self {
        Settings {
            dim_cap,
            ..Settings::default()
        }
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if dim > self.dim_cap {
            Err(Error::CapExceeded {
                dim,
                cap: self.dim_cap,
            })
        } else {
            Ok(())
        }
    }

    /// Product of local dimensions, checked against the cap without overflow.
    pub fn checked_product(&self, dims: &[usize]) -> Result<usize> {
        let mut total: usize = 1;
        for &d in dims {
            total = total.checked_mul(d).ok_or(Error::CapExceeded {
                dim: usize::MAX,
                cap: self.dim_cap,
            })?;
            if total > self.dim_cap {
                return Err(Error::CapExceeded {
                    dim: dims.iter().fold(1usize, |a, &b| a.saturating_mul(b)),
                    cap: self.dim_cap,
                });
            }
        }
        Ok(total)
    }
}

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Frobenius norm of M - M†.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    (m - m.adjoint()).norm()
}

/// Column-major vectorization, matching `vec(AXB) = (Bᵀ ⊗ A) vec(X)`.
pub fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

/// The matrix of X ↦ [A, X] acting on column-major vectorized X.
pub fn adjoint_action(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let id = CMatrix::identity(n, n);
    kron(&id, a) - kron(&a.transpose(), &id)
}

/// Multiplies by a phase so that the first component with modulus above
/// `1e-8 · max|vᵢ|` becomes real and positive.
pub fn fix_phase(v: &mut CVector) {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return;
    }
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-8 * scale).copied() {
        let phase = z.conj() / z.norm();
        v.iter_mut().for_each(|x| *x *= phase);
    }
}

fn orthogonalize_against(v: &mut CVector, basis: &[CVector]) {
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for b in basis {
            let overlap = b.dotc(v);
            v.axpy(-overlap, b, C64::new(1.0, 0.0));
        }
    }
}

/// Deterministic orthonormal basis of span(vectors): Gram-Schmidt over the
/// projected unit vectors P·e₀, P·e₁, ... in index order.
///
/// The result depends only on the span, not on the particular input basis.
pub fn canonical_span_basis(vectors: &[CVector], dim: usize) -> Vec<CVector> {
    if vectors.is_empty() {
        return Vec::new();
    }
    // orthonormalize the input first so P = Σ v v†
    let mut ortho: Vec<CVector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        orthogonalize_against(&mut w, &ortho);
        let n = w.norm();
        if n > 1e-8 {
            ortho.push(w / C64::new(n, 0.0));
        }
    }
    let rank = ortho.len();
    let mut out: Vec<CVector> = Vec::with_capacity(rank);
    for i in 0..dim {
        if out.len() == rank {
            break;
        }
        // column i of the projector
        let mut col = CVector::zeros(dim);
        for v in &ortho {
            col.axpy(v[i].conj(), v, C64::new(1.0, 0.0));
        }
        orthogonalize_against(&mut col, &out);
        let n = col.norm();
        if n > 1e-6 {
            let mut u = col / C64::new(n, 0.0);
            fix_phase(&mut u);
            out.push(u);
        }
    }
    out
}

fn padded_svd(m: &CMatrix) -> nalgebra::linalg::SVD<C64, nalgebra::Dyn, nalgebra::Dyn> {
    let (rows, cols) = m.shape();
    if rows < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p.svd(true, true)
    } else {
        m.clone().svd(true, true)
    }
}

/// Orthonormal basis of {v : Mv = 0}.
///
/// A right singular vector belongs to the kernel when its singular value is
/// at most `rank_tol · σ_max`. The returned basis is canonical for the span
/// (see [`canonical_span_basis`]): first nonzero component real positive.
pub fn kernel_basis(m: &CMatrix, tol: &ToleranceConfig) -> Vec<CVector> {
    let cols = m.ncols();
    if cols == 0 {
        return Vec::new();
    }
    if m.nrows() == 0 {
        return (0..cols).map(|i| unit_vector(cols, i)).collect();
    }
    let svd = padded_svd(m);
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return (0..cols).map(|i| unit_vector(cols, i)).collect();
    }
    let cutoff = tol.rank_tol * smax;
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let raw: Vec<CVector> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cutoff)
        .map(|(i, _)| v_t.row(i).adjoint())
        .collect();
    canonical_span_basis(&raw, cols)
}

/// Orthonormal basis of the column space of M (canonical for the span).
pub fn range_basis(m: &CMatrix, tol: &ToleranceConfig) -> Vec<CVector> {
    let rows = m.nrows();
    if rows == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let svd = m.clone().svd(true, false);
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return Vec::new();
    }
    let cutoff = tol.rank_tol * smax;
    let u = svd.u.as_ref().expect("left singular vectors requested");
    let raw: Vec<CVector> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > cutoff)
        .map(|(i, _)| u.column(i).into_owned())
        .collect();
    canonical_span_basis(&raw, rows)
}

pub fn numerical_rank(m: &CMatrix, tol: &ToleranceConfig) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol.rank_tol * smax).count()
}

pub fn unit_vector(dim: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[i] = C64::new(1.0, 0.0);
    v
}

/// Σ v v† over the given (assumed orthonormal) vectors.
pub fn span_projector(basis: &[CVector], dim: usize) -> CMatrix {
    let mut p = CMatrix::zeros(dim, dim);
    for v in basis {
        p.ger(C64::new(1.0, 0.0), v, v, C64::new(1.0, 0.0));
    }
    p
}

/// Distance between two vectors after normalizing both and removing the
/// relative global phase. Returns +∞ when exactly one of them vanishes.
pub fn distance_up_to_scalar(a: &CVector, b: &CVector) -> f64 {
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 && nb == 0.0 {
        return 0.0;
    }
    if na == 0.0 || nb == 0.0 || a.len() != b.len() {
        return f64::INFINITY;
    }
    let ua = a / C64::new(na, 0.0);
    let ub = b / C64::new(nb, 0.0);
    let overlap = ub.dotc(&ua);
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    (ua - ub * phase).norm()
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// (as columns).
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Connected components of the exact-nonzero pattern of a square matrix,
/// each sorted ascending, ordered by smallest member.
pub fn block_structure(m: &CMatrix) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for j in 0..n {
        for i in 0..n {
            if i != j && m[(i, j)] != C64::new(0.0, 0.0) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        blocks.entry(r).or_default().push(i);
    }
    blocks.into_values().collect()
}

fn check_hermitian(m: &CMatrix, tol: &ToleranceConfig) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let dev = hermitian_deviation(m);
    if dev > tol.assert_tol {
        return Err(Error::NonHermitian(dev));
    }
    Ok((m + m.adjoint()) * C64::new(0.5, 0.0))
}

fn sub_block(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// Exactly decoupled blocks (zero off-block entries) are diagonalized
/// separately, which keeps symmetry-sector-structured Hamiltonians cheap.
pub fn eig_hermitian(m: &CMatrix, tol: &ToleranceConfig) -> Result<HermitianEigen> {
    let h = check_hermitian(m, tol)?;
    let n = h.nrows();
    let mut pairs: Vec<(f64, CVector)> = Vec::with_capacity(n);
    for block in block_structure(&h) {
        let eig = SymmetricEigen::new(sub_block(&h, &block));
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            let mut v = CVector::zeros(n);
            for (local, &global) in block.iter().enumerate() {
                v[global] = eig.eigenvectors[(local, k)];
            }
            fix_phase(&mut v);
            pairs.push((lambda, v));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let values = pairs.iter().map(|p| p.0).collect();
    let vectors = if n == 0 {
        CMatrix::zeros(0, 0)
    } else {
        CMatrix::from_columns(&pairs.into_iter().map(|p| p.1).collect::<Vec<_>>())
    };
    Ok(HermitianEigen { values, vectors })
}

/// Ascending eigenvalues only.
pub fn eigvals_hermitian(m: &CMatrix, tol: &ToleranceConfig) -> Result<Vec<f64>> {
    let h = check_hermitian(m, tol)?;
    let mut values = Vec::with_capacity(h.nrows());
    for block in block_structure(&h) {
        values.extend(sub_block(&h, &block).symmetric_eigenvalues().iter());
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Least-squares expansion of an operator in a named operator basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorExpansion {
    pub labels: Vec<String>,
    pub coefficients: Vec<f64>,
    /// Frobenius norm of target - Σ cₐ basisₐ.
    pub residual: f64,
}

impl OperatorExpansion {
    pub fn coefficient(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.coefficients[i])
    }
}

/// Real coefficients minimizing ‖target − Σ cₐ basisₐ‖_F.
///
/// The fit is carried out in the real inner-product space ⟨A,B⟩ = Re tr(A†B),
/// so Hermitian inputs give real coefficients by construction.
pub fn fit_operator_expansion(
    target: &CMatrix,
    basis: &[(String, CMatrix)],
) -> Result<OperatorExpansion> {
    if !target.is_square() {
        return Err(Error::DimensionMismatch("target is not square".into()));
    }
    let n = target.nrows();
    for (label, b) in basis {
        if b.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "basis operator `{label}` is {}x{}, target is {n}x{n}",
                b.nrows(),
                b.ncols()
            )));
        }
    }
    let len = n * n;
    let design = DMatrix::<f64>::from_fn(2 * len, basis.len(), |r, a| {
        let z = basis[a].1.as_slice()[r % len];
        if r < len {
            z.re
        } else {
            z.im
        }
    });
    let rhs = DVector::<f64>::from_fn(2 * len, |r, _| {
        let z = target.as_slice()[r % len];
        if r < len {
            z.re
        } else {
            z.im
        }
    });
    let coefficients: Vec<f64> = if basis.is_empty() {
        Vec::new()
    } else {
        let svd = design.clone().svd(true, true);
        let eps = 1e-12 * svd.singular_values.max();
        let sol = svd
            .solve(&rhs, eps)
            .map_err(|e| Error::Numerical(e.to_string()))?;
        sol.iter().copied().collect()
    };
    let mut fitted = CMatrix::zeros(n, n);
    for (c, (_, b)) in coefficients.iter().zip(basis) {
        fitted += b * C64::new(*c, 0.0);
    }
    Ok(OperatorExpansion {
        labels: basis.iter().map(|(l, _)| l.clone()).collect(),
        coefficients,
        residual: (target - fitted).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
        CMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| c(x)))
    }

    #[test]
    fn identity_has_empty_kernel() {
        let tol = ToleranceConfig::default();
        assert!(kernel_basis(&CMatrix::identity(2, 2), &tol).is_empty());
    }

    #[test]
    fn single_row_kernel_is_forced() {
        let tol = ToleranceConfig::default();
        let k = kernel_basis(&real(1, 2, &[1.0, -1.0]), &tol);
        assert_eq!(k.len(), 1);
        let s = 0.5f64.sqrt();
        assert!((k[0][0] - c(s)).norm() < 1e-14);
        assert!((k[0][1] - c(s)).norm() < 1e-14);
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        let tol = ToleranceConfig::default();
        assert_eq!(kernel_basis(&CMatrix::zeros(3, 4), &tol).len(), 4);
    }

    #[test]
    fn kernel_is_basis_independent() {
        let tol = ToleranceConfig::default();
        let m = real(2, 4, &[1.0, 2.0, 0.0, -1.0, 0.0, 1.0, 1.0, 3.0]);
        let k1 = kernel_basis(&m, &tol);
        // same row space, different rows
        let m2 = real(2, 4, &[1.0, 3.0, 1.0, 2.0, 2.0, 3.0, -1.0, -5.0]);
        let k2 = kernel_basis(&m2, &tol);
        assert_eq!(k1.len(), 2);
        for (a, b) in k1.iter().zip(&k2) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn range_of_rank_one() {
        let tol = ToleranceConfig::default();
        let m = real(3, 2, &[1.0, 2.0, 1.0, 2.0, 0.0, 0.0]);
        let r = range_basis(&m, &tol);
        assert_eq!(r.len(), 1);
        assert_eq!(numerical_rank(&m, &tol), 1);
    }

    #[test]
    fn eig_of_diagonal_and_pauli_x() {
        let tol = ToleranceConfig::default();
        let e = eig_hermitian(&real(2, 2, &[2.0, 0.0, 0.0, -1.0]), &tol).unwrap();
        assert_eq!(e.values, vec![-1.0, 2.0]);
        let x = eig_hermitian(&real(2, 2, &[0.0, 1.0, 1.0, 0.0]), &tol).unwrap();
        assert!((x.values[0] + 1.0).abs() < 1e-14 && (x.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let tol = ToleranceConfig::default();
        let m = real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(eig_hermitian(&m, &tol), Err(Error::NonHermitian(_))));
        assert!(matches!(
            eig_hermitian(&CMatrix::zeros(2, 3), &tol),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn block_structure_splits_decoupled_sectors() {
        let m = real(
            4,
            4,
            &[1.0, 0.0, 2.0, 0.0, 0.0, 3.0, 0.0, 0.0, 2.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 5.0],
        );
        assert_eq!(block_structure(&m), vec![vec![0, 2], vec![1], vec![3]]);
        let e = eig_hermitian(&m, &ToleranceConfig::default()).unwrap();
        let mut rebuilt = CMatrix::zeros(4, 4);
        for (k, &l) in e.values.iter().enumerate() {
            let v = e.vectors.column(k);
            rebuilt += v * v.adjoint() * c(l);
        }
        assert!((rebuilt - m).norm() < 1e-12);
    }

    #[test]
    fn fit_recovers_combination() {
        let id = CMatrix::identity(2, 2);
        let b = real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let target = &id * c(2.0) + &b * c(3.0);
        let basis = vec![("I".to_string(), id.clone()), ("B".to_string(), b)];
        let fit = fit_operator_expansion(&target, &basis).unwrap();
        assert!((fit.coefficients[0] - 2.0).abs() < 1e-12);
        assert!((fit.coefficients[1] - 3.0).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        let fit = fit_operator_expansion(&id, &basis).unwrap();
        assert!((fit.coefficients[0] - 1.0).abs() < 1e-12 && fit.coefficients[1].abs() < 1e-12);
    }

    #[test]
    fn fit_rejects_mismatched_dimensions() {
        let basis = vec![("I".to_string(), CMatrix::identity(3, 3))];
        assert!(matches!(
            fit_operator_expansion(&CMatrix::identity(2, 2), &basis),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn tolerance_validation() {
        assert!(ToleranceConfig::new(1e-10, 1e-9, 1e-9).is_ok());
        assert!(ToleranceConfig::new(1e-8, 1e-9, 1e-9).is_err());
        assert!(ToleranceConfig::new(0.0, 1e-9, 1e-9).is_err());
    }

    #[test]
    fn cap_guard() {
        let s = Settings::with_cap(100);
        assert!(s.checked_product(&[3, 3, 3, 3]).is_ok());
        assert!(matches!(
            s.checked_product(&[3, 3, 3, 3, 3]),
            Err(Error::CapExceeded { dim: 243, cap: 100 })
        ));
    }
}
