//! Subspaces of `C^n` represented by orthonormal bases, and the lattice
//! operations on them.

use crate::error::{Error, Result};
use crate::linalg::{self, c, hstack, Matrix, Vector};

/// Numerical thresholds shared by every operation. All values are relative to
/// the largest singular value (or operator norm) of the object under test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    pub rank_rel_tol: f64,
    pub subspace_eq_tol: f64,
    pub psd_tol: f64,
    pub hermitian_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            rank_rel_tol: 1e-10,
            subspace_eq_tol: 1e-8,
            psd_tol: 1e-10,
            hermitian_tol: 1e-10,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rank_rel_tol", self.rank_rel_tol),
            ("subspace_eq_tol", self.subspace_eq_tol),
            ("psd_tol", self.psd_tol),
            ("hermitian_tol", self.hermitian_tol),
        ];
        for (name, value) in fields {
            if !(value > 0.0 && value < 1e-2) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} = {value} must lie in (0, 1e-2)"
                )));
            }
        }
        Ok(())
    }
}

/// A subspace of `C^ambient_dim` with an orthonormal basis stored column-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Matrix,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Matrix::zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: linalg::identity(ambient_dim),
        }
    }

    /// Span of the standard basis vectors with the given (0-based) indices.
    pub fn coordinate(ambient_dim: usize, indices: &[usize]) -> Self {
        let basis = Matrix::from_fn(ambient_dim, indices.len(), |i, j| {
            if i == indices[j] {
                linalg::ONE
            } else {
                linalg::ZERO
            }
        });
        Subspace { ambient_dim, basis }
    }

    /// Wraps a basis that is already orthonormal. Only use this when
    /// orthonormality holds by construction.
    pub(crate) fn from_orthonormal(basis: Matrix) -> Self {
        Subspace {
            ambient_dim: basis.nrows(),
            basis,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> Matrix {
        &self.basis * self.basis.adjoint()
    }

    /// Coordinates of `v` with respect to the basis (after projection).
    pub fn coordinates(&self, v: &Vector) -> Vector {
        self.basis.adjoint() * v
    }

    /// Distance of the columns of `m` from the subspace, relative to the
    /// norm of `m`: `‖(I − P) m‖ / ‖m‖` (zero for a zero `m`).
    pub fn containment_residual(&self, m: &Matrix) -> f64 {
        let scale = linalg::op_norm(m);
        if scale == 0.0 {
            return 0.0;
        }
        let outside = m - &self.basis * (self.basis.adjoint() * m);
        linalg::op_norm(&outside) / scale
    }

    pub fn contains(&self, m: &Matrix, tol: &ToleranceConfig) -> bool {
        self.containment_residual(m) <= tol.subspace_eq_tol
    }

    fn check_ambient(&self, other: &Subspace, context: &'static str) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.ambient_dim,
                actual: other.ambient_dim,
            });
        }
        Ok(())
    }

    /// `‖(I − P_other) Q_self‖`: zero iff `self ⊆ other`.
    pub fn inclusion_residual(&self, other: &Subspace) -> Result<f64> {
        self.check_ambient(other, "inclusion")?;
        if self.is_zero() {
            return Ok(0.0);
        }
        let outside = &self.basis - &other.basis * (other.basis.adjoint() * &self.basis);
        Ok(linalg::op_norm(&outside))
    }

    pub fn is_subspace_of(&self, other: &Subspace, tol: &ToleranceConfig) -> Result<bool> {
        Ok(self.inclusion_residual(other)? <= tol.subspace_eq_tol)
    }
}

/// Rotates each column so that its first non-negligible entry is real and
/// positive, making bases reproducible.
fn fix_phases(basis: &mut Matrix) {
    for mut col in basis.column_iter_mut() {
        let norm = col.norm();
        if norm == 0.0 {
            continue;
        }
        if let Some(z) = col.iter().find(|z| z.norm() > 1e-8 * norm).copied() {
            let phase = z.conj() / z.norm();
            for entry in col.iter_mut() {
                *entry *= phase;
            }
        }
    }
}

/// Column span of `generators`. The rank counts singular values at or above
/// `rank_rel_tol · σ_max`; the basis consists of the corresponding left
/// singular vectors.
pub fn orthonormalize(generators: &Matrix, tol: &ToleranceConfig) -> Result<Subspace> {
    orthonormalize_with_floor(generators, 0.0, tol)
}

/// Like [`orthonormalize`], but singular values are measured against
/// `max(σ_max, floor)`. Generators read off orthonormal bases use
/// `floor = 1` so that a block of pure rounding noise has rank zero.
pub fn orthonormalize_with_floor(generators: &Matrix, floor: f64, tol: &ToleranceConfig) -> Result<Subspace> {
    linalg::ensure_finite(generators, "orthonormalize")?;
    let n = generators.nrows();
    let (u, sigma, _) = linalg::svd(generators);
    let Some(&smax) = sigma.first() else {
        return Ok(Subspace::zero(n));
    };
    if smax == 0.0 {
        return Ok(Subspace::zero(n));
    }
    let rank = sigma
        .iter()
        .take_while(|&&s| s >= tol.rank_rel_tol * smax.max(floor))
        .count();
    let mut basis = u.columns(0, rank).into_owned();
    fix_phases(&mut basis);
    Ok(Subspace::from_orthonormal(basis))
}

/// Orthogonal complement within the ambient space.
pub fn complement(s: &Subspace) -> Subspace {
    let n = s.ambient_dim;
    if s.is_zero() {
        return Subspace::full(n);
    }
    let residual = linalg::identity(n) - s.projector();
    // The complement projector has singular values 1 (on s^⊥) and ~0 (on s),
    // so a loose absolute cut is unambiguous.
    let (u, sigma, _) = linalg::svd(&residual);
    let rank = sigma.iter().filter(|&&x| x > 0.5).count();
    let mut basis = u.columns(0, rank).into_owned();
    fix_phases(&mut basis);
    Subspace::from_orthonormal(basis)
}

pub fn join(s1: &Subspace, s2: &Subspace, tol: &ToleranceConfig) -> Result<Subspace> {
    s1.check_ambient(s2, "join")?;
    orthonormalize_with_floor(&hstack(&s1.basis, &s2.basis), 1.0, tol)
}

/// `meet(s1, s2) = (s1^⊥ ∨ s2^⊥)^⊥`.
pub fn meet(s1: &Subspace, s2: &Subspace, tol: &ToleranceConfig) -> Result<Subspace> {
    s1.check_ambient(s2, "meet")?;
    let j = join(&complement(s1), &complement(s2), tol)?;
    Ok(complement(&j))
}

/// Projector-norm gap `‖P₁ − P₂‖ ∈ [0, 1]`.
pub fn gap(s1: &Subspace, s2: &Subspace) -> Result<f64> {
    s1.check_ambient(s2, "gap")?;
    Ok(linalg::op_norm(&(s1.projector() - s2.projector())).min(1.0))
}

/// Image of a subspace under a linear map.
pub fn image(map: &Matrix, s: &Subspace, tol: &ToleranceConfig) -> Result<Subspace> {
    if map.ncols() != s.ambient_dim {
        return Err(Error::DimensionMismatch {
            context: "image",
            expected: s.ambient_dim,
            actual: map.ncols(),
        });
    }
    orthonormalize(&(map * &s.basis), tol)
}

/// Normalised vector helper used by tests and generators.
pub fn unit(entries: &[(f64, f64)]) -> Vector {
    let v = Vector::from_iterator(entries.len(), entries.iter().map(|&(re, im)| c(re, im)));
    let n = v.norm();
    v / c(n, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_matrix;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn span(n: usize, cols: &[&[f64]]) -> Subspace {
        let m = Matrix::from_fn(n, cols.len(), |i, j| c(cols[j][i], 0.0));
        orthonormalize(&m, &tol()).unwrap()
    }

    #[test]
    fn orthonormalize_dependent_columns() {
        let s = span(2, &[&[1.0, 0.0], &[2.0, 0.0]]);
        assert_eq!(s.dim(), 1);
        assert!(gap(&s, &Subspace::coordinate(2, &[0])).unwrap() < 1e-14);
        // phase fixing makes the basis exactly e1
        assert!((s.basis()[(0, 0)] - linalg::ONE).norm() < 1e-14);
    }

    #[test]
    fn orthonormalize_empty_and_full() {
        let s = orthonormalize(&Matrix::zeros(3, 0), &tol()).unwrap();
        assert_eq!((s.ambient_dim(), s.dim()), (3, 0));
        let s = span(2, &[&[1.0, 1.0], &[1.0, -1.0]]);
        assert_eq!(s.dim(), 2);
    }

    #[test]
    fn orthonormalize_rejects_nan() {
        let m = real_matrix(2, 1, &[f64::NAN, 1.0]);
        assert!(matches!(orthonormalize(&m, &tol()), Err(Error::NonFinite(_))));
    }

    #[test]
    fn complement_examples() {
        let e1 = Subspace::coordinate(2, &[0]);
        assert!(gap(&complement(&e1), &Subspace::coordinate(2, &[1])).unwrap() < 1e-14);
        assert_eq!(complement(&Subspace::zero(3)).dim(), 3);
        let diag = span(2, &[&[1.0, 1.0]]);
        let anti = span(2, &[&[1.0, -1.0]]);
        assert!(gap(&complement(&diag), &anti).unwrap() < 1e-14);
        assert_eq!(complement(&Subspace::full(4)).dim(), 0);
    }

    #[test]
    fn meet_and_join_examples() {
        let s12 = Subspace::coordinate(3, &[0, 1]);
        let s23 = Subspace::coordinate(3, &[1, 2]);
        let m = meet(&s12, &s23, &tol()).unwrap();
        assert!(gap(&m, &Subspace::coordinate(3, &[1])).unwrap() < 1e-13);
        let j = join(
            &Subspace::coordinate(3, &[0]),
            &Subspace::coordinate(3, &[1]),
            &tol(),
        )
        .unwrap();
        assert!(gap(&j, &s12).unwrap() < 1e-14);
        let line = span(2, &[&[1.0, 1.0]]);
        assert_eq!(meet(&Subspace::coordinate(2, &[0]), &line, &tol()).unwrap().dim(), 0);
    }

    #[test]
    fn gap_examples() {
        let e1 = Subspace::coordinate(2, &[0]);
        let e2 = Subspace::coordinate(2, &[1]);
        assert_eq!(gap(&e1, &e1).unwrap(), 0.0);
        assert!((gap(&e1, &e2).unwrap() - 1.0).abs() < 1e-15);
        let diag = span(2, &[&[1.0, 1.0]]);
        assert!((gap(&e1, &diag).unwrap() - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn ambient_mismatch_is_an_error() {
        let a = Subspace::zero(2);
        let b = Subspace::zero(3);
        assert!(gap(&a, &b).is_err());
        assert!(meet(&a, &b, &tol()).is_err());
        assert!(join(&a, &b, &tol()).is_err());
    }

    #[test]
    fn tolerance_validation() {
        assert!(ToleranceConfig::default().validate().is_ok());
        let bad = ToleranceConfig {
            psd_tol: 0.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
