//! Dense complex matrix helpers.
//!
//! Everything here works on [`Matrix`] (a `DMatrix<Complex64>`) and tolerates
//! zero-sized operands, which show up whenever a multivalued part or a domain
//! is trivial.

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::subspace::ToleranceConfig;

pub type Matrix = DMatrix<Complex64>;
pub type Vector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Builds a matrix from real row-major entries.
pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> Matrix {
    assert_eq!(entries.len(), rows * cols);
    Matrix::from_fn(rows, cols, |i, j| c(entries[i * cols + j], 0.0))
}

pub fn identity(n: usize) -> Matrix {
    Matrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    Matrix::zeros(rows, cols)
}

pub fn diag_real(values: &[f64]) -> Matrix {
    let n = values.len();
    Matrix::from_fn(n, n, |i, j| if i == j { c(values[i], 0.0) } else { ZERO })
}

pub fn is_finite(m: &Matrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub(crate) fn ensure_finite(m: &Matrix, what: &'static str) -> Result<()> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Vertical concatenation `[top; bottom]`.
pub fn vstack(top: &Matrix, bottom: &Matrix) -> Matrix {
    assert_eq!(top.ncols(), bottom.ncols(), "vstack column mismatch");
    let mut out = Matrix::zeros(top.nrows() + bottom.nrows(), top.ncols());
    out.rows_mut(0, top.nrows()).copy_from(top);
    out.rows_mut(top.nrows(), bottom.nrows()).copy_from(bottom);
    out
}

/// Horizontal concatenation `[left, right]`.
pub fn hstack(left: &Matrix, right: &Matrix) -> Matrix {
    assert_eq!(left.nrows(), right.nrows(), "hstack row mismatch");
    let mut out = Matrix::zeros(left.nrows(), left.ncols() + right.ncols());
    out.columns_mut(0, left.ncols()).copy_from(left);
    out.columns_mut(left.ncols(), right.ncols()).copy_from(right);
    out
}

/// Block diagonal `diag(a, b)`.
pub fn block_diag(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), (b.nrows(), b.ncols()))
        .copy_from(b);
    out
}

pub fn rows(m: &Matrix, start: usize, count: usize) -> Matrix {
    m.rows(start, count).into_owned()
}

/// Singular value decomposition with singular values sorted in decreasing
/// order. Returns `(u, sigma, v)` with `m = u * diag(sigma) * v^H`, `u` of size
/// `rows x k` and `v` of size `cols x k`, `k = min(rows, cols)`.
pub fn svd(m: &Matrix) -> (Matrix, Vec<f64>, Matrix) {
    let (r, cl) = m.shape();
    let k = r.min(cl);
    if k == 0 {
        return (Matrix::zeros(r, 0), Vec::new(), Matrix::zeros(cl, 0));
    }
    let dec = to_faer(m).thin_svd().expect("svd of a finite matrix converges");
    let s = dec.S().column_vector();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s[b].re.partial_cmp(&s[a].re).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
    let sigma = order.iter().map(|&i| s[i].re).collect();
    let (u, v) = (dec.U(), dec.V());
    let u_sorted = Matrix::from_fn(r, k, |i, j| from_c(u[(i, order[j])]));
    let v_sorted = Matrix::from_fn(cl, k, |i, j| from_c(v[(i, order[j])]));
    (u_sorted, sigma, v_sorted)
}

fn to_faer(m: &Matrix) -> faer::Mat<faer::c64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| faer::c64::new(m[(i, j)].re, m[(i, j)].im))
}

fn from_c(z: faer::c64) -> Complex64 {
    Complex64::new(z.re, z.im)
}

/// Singular values in descending order.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = to_faer(m)
        .singular_values()
        .expect("svd of a finite matrix converges");
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// Operator (spectral) norm; zero for empty matrices.
pub fn op_norm(m: &Matrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn hermitian_part(m: &Matrix) -> Matrix {
    (m + m.adjoint()).scale(0.5)
}

/// `(m - m^H) / 2i`, Hermitian for every square `m`.
pub fn skew_part_over_i(m: &Matrix) -> Matrix {
    (m - m.adjoint()) * c(0.0, -0.5)
}

/// `‖m − m^H‖`, the absolute Hermitian defect.
pub fn hermitian_defect(m: &Matrix) -> f64 {
    op_norm(&(m - m.adjoint()))
}

fn ensure_square(m: &Matrix, context: &'static str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            context,
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

pub(crate) fn ensure_hermitian(m: &Matrix, tol: f64, context: &'static str) -> Result<()> {
    ensure_square(m, context)?;
    ensure_finite(m, context)?;
    let defect = hermitian_defect(m);
    if defect > tol * op_norm(m).max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian {
            context,
            residual: defect,
        });
    }
    Ok(())
}

/// Eigendecomposition of the Hermitian part of `m`; eigenvalues ascending.
pub fn hermitian_eigen(m: &Matrix) -> (Vec<f64>, Matrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), Matrix::zeros(0, 0));
    }
    let eig = to_faer(&hermitian_part(m))
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("hermitian eigendecomposition converges");
    let (w, q) = (eig.S().column_vector(), eig.U());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| w[a].re.partial_cmp(&w[b].re).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
    let values = order.iter().map(|&i| w[i].re).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| from_c(q[(i, order[j])]));
    (values, vectors)
}

/// Applies a real function to a Hermitian matrix through its spectrum.
pub fn hermitian_apply(m: &Matrix, f: impl Fn(f64) -> f64) -> Matrix {
    let (values, vectors) = hermitian_eigen(m);
    let mut scaled = vectors.clone();
    for (j, &v) in values.iter().enumerate() {
        scaled.column_mut(j).scale_mut(f(v));
    }
    scaled * vectors.adjoint()
}

pub fn min_eigenvalue(m: &Matrix) -> Option<f64> {
    hermitian_eigen(m).0.first().copied()
}

/// Hermitian positive semidefinite square root.
///
/// Eigenvalues within `psd_tol * ‖m‖` of zero are set to zero, so that the
/// root has the same null space as the rank decision; anything more negative
/// is an error.
pub fn psd_sqrt(m: &Matrix, tol: &ToleranceConfig) -> Result<Matrix> {
    ensure_hermitian(m, tol.hermitian_tol, "psd_sqrt")?;
    let scale = op_norm(m);
    let (values, _) = hermitian_eigen(m);
    if let Some(&lowest) = values.first() {
        if lowest < -tol.psd_tol * scale {
            return Err(Error::NegativeEigenvalue {
                context: "psd_sqrt",
                eigenvalue: lowest,
            });
        }
    }
    let floor = tol.psd_tol * scale;
    Ok(hermitian_apply(m, |x| if x > floor { x.sqrt() } else { 0.0 }))
}

/// Moore–Penrose inverse; singular values below `rank_rel_tol * σ_max` are
/// treated as zero.
pub fn pseudo_inverse(m: &Matrix, tol: &ToleranceConfig) -> Matrix {
    let (u, sigma, v) = svd(m);
    let mut out = Matrix::zeros(m.ncols(), m.nrows());
    let Some(&smax) = sigma.first() else {
        return out;
    };
    let cutoff = tol.rank_rel_tol * smax;
    for (j, &s) in sigma.iter().enumerate() {
        if s > 0.0 && s >= cutoff {
            out += v.column(j) * u.column(j).adjoint() * c(1.0 / s, 0.0);
        }
    }
    out
}

/// Orthonormal basis of the null space of the Hermitian matrix `m`, i.e. the
/// eigenvectors whose eigenvalue magnitude is at most `threshold`.
pub fn hermitian_null_basis(m: &Matrix, threshold: f64) -> Matrix {
    let (values, vectors) = hermitian_eigen(m);
    let idx: Vec<usize> = (0..values.len())
        .filter(|&j| values[j].abs() <= threshold)
        .collect();
    Matrix::from_fn(m.nrows(), idx.len(), |i, j| vectors[(i, idx[j])])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn psd_sqrt_of_diagonal() {
        let m = diag_real(&[4.0, 9.0]);
        let r = psd_sqrt(&m, &tol()).unwrap();
        assert!((&r - diag_real(&[2.0, 3.0])).norm() < 1e-14);
    }

    #[test]
    fn psd_sqrt_of_zero_is_zero() {
        let r = psd_sqrt(&zeros(3, 3), &tol()).unwrap();
        assert_eq!(r.norm(), 0.0);
    }

    #[test]
    fn psd_sqrt_two_by_two() {
        // [[2,1],[1,2]] has eigenpairs (1, (1,-1)/√2) and (3, (1,1)/√2).
        let m = real_matrix(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let (a, b) = ((1.0f64.sqrt() + 3.0f64.sqrt()) / 2.0, (3.0f64.sqrt() - 1.0) / 2.0);
        let expected = real_matrix(2, 2, &[a, b, b, a]);
        let r = psd_sqrt(&m, &tol()).unwrap();
        assert!((&r - &expected).norm() < 1e-14);
        assert!((&r * &r - &m).norm() < 1e-13);
    }

    #[test]
    fn psd_sqrt_rejects_bad_input() {
        let non_herm = real_matrix(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(
            psd_sqrt(&non_herm, &tol()),
            Err(Error::NotHermitian { .. })
        ));
        let negative = diag_real(&[1.0, -0.5]);
        assert!(matches!(
            psd_sqrt(&negative, &tol()),
            Err(Error::NegativeEigenvalue { .. })
        ));
        // roundoff-level negativity is clamped
        let slightly = diag_real(&[1.0, -1e-14]);
        assert!(psd_sqrt(&slightly, &tol()).is_ok());
    }

    #[test]
    fn pseudo_inverse_examples() {
        let p = pseudo_inverse(&diag_real(&[2.0, 0.0]), &tol());
        assert!((&p - diag_real(&[0.5, 0.0])).norm() < 1e-15);
        let p = pseudo_inverse(&identity(3), &tol());
        assert!((&p - identity(3)).norm() < 1e-15);
        // rank one: [[1,1],[1,1]] = 2 u u^H with u = (1,1)/√2
        let p = pseudo_inverse(&real_matrix(2, 2, &[1.0; 4]), &tol());
        assert!((&p - real_matrix(2, 2, &[0.25; 4])).norm() < 1e-14);
    }

    #[test]
    fn pseudo_inverse_of_empty() {
        let p = pseudo_inverse(&zeros(3, 0), &tol());
        assert_eq!(p.shape(), (0, 3));
    }

    #[test]
    fn op_norm_examples() {
        assert!((op_norm(&identity(4)) - 1.0).abs() < 1e-15);
        assert!((op_norm(&diag_real(&[3.0, -5.0])) - 5.0).abs() < 1e-14);
        assert!((op_norm(&real_matrix(2, 2, &[0.0, 2.0, 0.0, 0.0])) - 2.0).abs() < 1e-14);
        assert_eq!(op_norm(&zeros(0, 0)), 0.0);
    }

    #[test]
    fn svd_of_rank_one_complex_projector() {
        let v = Matrix::from_fn(3, 1, |i, _| [c(0.2, 0.0), c(0.2, 0.6), c(0.4, 0.6)][i]);
        let q = &v * v.adjoint() / c(v.norm_squared(), 0.0);
        let (u, s, w) = svd(&q);
        assert!((s[0] - 1.0).abs() < 1e-14 && s[1] < 1e-14);
        let sig = Matrix::from_fn(3, 3, |i, j| if i == j { c(s[i], 0.0) } else { ZERO });
        assert!((&u * sig * w.adjoint() - &q).norm() < 1e-14);
    }

    #[test]
    fn svd_is_sorted_and_reconstructs() {
        let m = Matrix::from_fn(4, 3, |i, j| c((i * 3 + j) as f64 * 0.3 - 1.0, (i as f64) - (j as f64)));
        let (u, s, v) = svd(&m);
        assert!(s.windows(2).all(|w| w[0] >= w[1]));
        let sig = Matrix::from_fn(3, 3, |i, j| if i == j { c(s[i], 0.0) } else { ZERO });
        assert!((&u * sig * v.adjoint() - &m).norm() < 1e-12);
    }

    #[test]
    fn hermitian_and_skew_parts_recombine() {
        let m = Matrix::from_fn(3, 3, |i, j| c(i as f64 + 2.0 * j as f64, (i * j) as f64 - 1.0));
        let r = hermitian_part(&m);
        let s = skew_part_over_i(&m);
        assert!(hermitian_defect(&r) < 1e-14 && hermitian_defect(&s) < 1e-14);
        assert!((r + s * I - &m).norm() < 1e-13);
    }
}
