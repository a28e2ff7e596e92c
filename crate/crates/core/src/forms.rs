//! Sectoriality of relations and forms, and the two representation theorems.
//!
//! A form lives on a domain subspace `D` with orthonormal basis `U` and is
//! stored as a coordinate matrix `M`: `t[h, k] = (Uᴴk)ᴴ M (Uᴴh)`. The maximal
//! sectorial relation it represents is
//!
//! ```text
//! H = { (U a, U M a + m) : a ∈ C^dim D, m ∈ D^⊥ },
//! ```
//!
//! so `mul H = D^⊥` and `t[h, k] = (h′, k)`. In finite dimensions the form
//! domain and `dom H` coincide, which is what makes [`form_of`] total on
//! maximal sectorial relations.

use crate::error::{ensure, Error, Result};
use crate::linalg::{self, hermitian_part, skew_part_over_i, vstack, Matrix, I};
use crate::relation::{add_relations, LinearRelation, OperatorOnSubspace};
use crate::subspace::{complement, gap, Subspace, ToleranceConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct SesquilinearForm {
    pub domain: Subspace,
    /// `dim(domain) × dim(domain)` coordinate matrix.
    pub matrix: Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorialityVerdict {
    pub is_accretive: bool,
    pub is_sectorial: bool,
    /// `tan α` of the smallest sector containing the numerical range;
    /// present iff `is_sectorial`.
    pub tan_alpha: Option<f64>,
    pub is_maximal: bool,
}

impl SectorialityVerdict {
    pub fn is_maximal_sectorial(&self) -> bool {
        self.is_sectorial && self.is_maximal
    }
}

/// `H = ((H_r)_s^{1/2})^× (I + iG) (H_r)_s^{1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondRepresentation {
    /// The real part `H_r`, selfadjoint and nonnegative.
    pub h_r: LinearRelation,
    /// `(H_r)_s^{1/2}` on `dom H`, into the ambient space.
    pub s_half: OperatorOnSubspace,
    /// Hermitian `G` in coordinates of `dom H`; zero on `ker (H_r)_s^{1/2}`.
    pub g: Matrix,
    pub tan_alpha: f64,
}

/// Verdict for a square coordinate matrix `N` viewed as the quadratic form
/// `z ↦ zᴴ N z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PencilVerdict {
    pub is_accretive: bool,
    pub is_sectorial: bool,
    pub tan_alpha: Option<f64>,
}

/// `S⁺` for `S = N_r^{1/2}`, treating eigenvalues of `N_r` at or below
/// `threshold` as zero.
pub(crate) fn inverse_sqrt_on_range(nr: &Matrix, threshold: f64) -> Matrix {
    linalg::hermitian_apply(nr, |x| if x > threshold { 1.0 / x.sqrt() } else { 0.0 })
}

/// Null-space threshold for the real part of a coordinate matrix with norm
/// `scale`. Graph pairings of orthonormal graph bases are `O(1)`, so the
/// scale is floored at one: a pairing made of rounding noise counts as zero.
fn null_threshold(scale: f64, tol: &ToleranceConfig) -> f64 {
    tol.psd_tol * scale.max(1.0)
}

/// Sectoriality of `z ↦ zᴴ N z`: accretive iff `N_r ⪰ 0`; sectorial iff in
/// addition `ker N_r ⊆ ker N_i`; then `tan α = ‖S⁺ N_i S⁺‖` with
/// `S = N_r^{1/2}`.
pub fn pencil_sectoriality(n: &Matrix, tol: &ToleranceConfig) -> PencilVerdict {
    let scale = linalg::op_norm(n);
    if scale == 0.0 {
        return PencilVerdict {
            is_accretive: true,
            is_sectorial: true,
            tan_alpha: Some(0.0),
        };
    }
    let nr = hermitian_part(n);
    let ni = skew_part_over_i(n);
    let threshold = null_threshold(scale, tol);
    let lowest = linalg::min_eigenvalue(&nr).unwrap_or(0.0);
    if lowest < -threshold {
        return PencilVerdict {
            is_accretive: false,
            is_sectorial: false,
            tan_alpha: None,
        };
    }
    let null = linalg::hermitian_null_basis(&nr, threshold);
    if null.ncols() > 0 && linalg::op_norm(&(&ni * &null)) > tol.subspace_eq_tol * scale.max(1.0) {
        return PencilVerdict {
            is_accretive: true,
            is_sectorial: false,
            tan_alpha: None,
        };
    }
    let s_pinv = inverse_sqrt_on_range(&nr, threshold);
    PencilVerdict {
        is_accretive: true,
        is_sectorial: true,
        tan_alpha: Some(linalg::op_norm(&(&s_pinv * ni * &s_pinv))),
    }
}

/// `N = Q_hᴴ Q_h′` for the graph basis `(Q_h; Q_h′)`, so that
/// `(h′, h) = zᴴ N z` for graph coordinates `z`.
pub fn graph_pairing(t: &LinearRelation) -> Result<Matrix> {
    if !t.is_square() {
        return Err(Error::DimensionMismatch {
            context: "graph_pairing",
            expected: t.dim_h(),
            actual: t.dim_k(),
        });
    }
    Ok(t.input_block().adjoint() * t.output_block())
}

/// Accretivity, sectoriality, semi-angle and maximality of a relation in `C^n`.
/// Maximality is `ran(I + H) = C^n`.
pub fn sectoriality(t: &LinearRelation, tol: &ToleranceConfig) -> Result<SectorialityVerdict> {
    let n = graph_pairing(t)?;
    let pencil = pencil_sectoriality(&n, tol);
    let is_maximal = if pencil.is_accretive {
        match add_relations(&LinearRelation::identity(t.dim_h()), t, tol) {
            Ok(shifted) => shifted.ran(tol)?.dim() == t.dim_h(),
            Err(Error::Falsified { .. }) => false,
            Err(e) => return Err(e),
        }
    } else {
        false
    };
    Ok(SectorialityVerdict {
        is_accretive: pencil.is_accretive,
        is_sectorial: pencil.is_sectorial,
        tan_alpha: pencil.tan_alpha,
        is_maximal,
    })
}

pub fn is_maximal_sectorial(t: &LinearRelation, tol: &ToleranceConfig) -> Result<bool> {
    Ok(t.is_square() && sectoriality(t, tol)?.is_maximal_sectorial())
}

impl SesquilinearForm {
    pub fn new(domain: Subspace, matrix: Matrix) -> Result<Self> {
        if matrix.nrows() != domain.dim() || matrix.ncols() != domain.dim() {
            return Err(Error::DimensionMismatch {
                context: "form matrix",
                expected: domain.dim(),
                actual: matrix.nrows().max(matrix.ncols()),
            });
        }
        linalg::ensure_finite(&matrix, "form matrix")?;
        Ok(SesquilinearForm { domain, matrix })
    }

    /// The form `(h, k) ↦ (X h, X k)`-style expression `Xᴴ Y X` on `domain`,
    /// where `x` maps domain coordinates somewhere and `middle` acts there.
    pub fn congruence(domain: Subspace, x: &Matrix, middle: &Matrix) -> Result<Self> {
        Self::new(domain, x.adjoint() * middle * x)
    }

    pub fn ambient_dim(&self) -> usize {
        self.domain.ambient_dim()
    }

    /// `t_r = (t + t*) / 2`.
    pub fn real_part(&self) -> SesquilinearForm {
        SesquilinearForm {
            domain: self.domain.clone(),
            matrix: hermitian_part(&self.matrix),
        }
    }

    /// `t_i = (t − t*) / 2i`.
    pub fn imag_part(&self) -> SesquilinearForm {
        SesquilinearForm {
            domain: self.domain.clone(),
            matrix: skew_part_over_i(&self.matrix),
        }
    }

    /// `t[h, k]` for ambient vectors `h, k` (projected onto the domain).
    pub fn eval(&self, h: &linalg::Vector, k: &linalg::Vector) -> num_complex::Complex64 {
        let a = self.domain.coordinates(h);
        let b = self.domain.coordinates(k);
        (b.adjoint() * &self.matrix * a)[(0, 0)]
    }

    pub fn verdict(&self, tol: &ToleranceConfig) -> PencilVerdict {
        pencil_sectoriality(&self.matrix, tol)
    }

    /// The restriction to a subspace of the domain, in that subspace's basis.
    pub fn restrict(&self, sub: &Subspace, tol: &ToleranceConfig) -> Result<SesquilinearForm> {
        let residual = sub.inclusion_residual(&self.domain)?;
        if residual > tol.subspace_eq_tol {
            return Err(Error::Inadmissible(format!(
                "restriction leaves the form domain (residual {residual:.3e})"
            )));
        }
        let change = self.domain.basis().adjoint() * sub.basis();
        SesquilinearForm::congruence(sub.clone(), &change, &self.matrix)
    }

    /// The matrix of `other` re-expressed in this form's domain basis.
    /// Only meaningful when the domains agree.
    fn other_in_my_basis(&self, other: &SesquilinearForm) -> Matrix {
        let r = self.domain.basis().adjoint() * other.domain.basis();
        &r * &other.matrix * r.adjoint()
    }

    /// `(domain gap, ‖M₁ − M₂‖ / max(1, ‖M₁‖))` after aligning bases.
    pub fn coincidence_residual(&self, other: &SesquilinearForm) -> Result<(f64, f64)> {
        let g = gap(&self.domain, &other.domain)?;
        if self.domain.dim() != other.domain.dim() {
            return Ok((g, f64::INFINITY));
        }
        let diff = linalg::op_norm(&(&self.matrix - self.other_in_my_basis(other)));
        Ok((g, diff / linalg::op_norm(&self.matrix).max(1.0)))
    }

    pub fn coincides_with(&self, other: &SesquilinearForm, tol: &ToleranceConfig) -> Result<bool> {
        let (g, m) = self.coincidence_residual(other)?;
        Ok(g <= tol.subspace_eq_tol && m <= tol.subspace_eq_tol)
    }
}

/// The closed sectorial form of a maximal sectorial relation:
/// `t[h, k] = (h′, k)` on `dom H`.
pub fn form_of(h: &LinearRelation, tol: &ToleranceConfig) -> Result<SesquilinearForm> {
    let verdict = sectoriality(h, tol)?;
    if !verdict.is_sectorial {
        return Err(Error::NotMaximalSectorial("not sectorial"));
    }
    if !verdict.is_maximal {
        return Err(Error::NotMaximalSectorial("not maximal"));
    }
    form_of_unchecked(h, tol)
}

/// [`form_of`] without the sectoriality verdict; still asserts
/// `mul H = (dom H)^⊥`.
pub(crate) fn form_of_unchecked(h: &LinearRelation, tol: &ToleranceConfig) -> Result<SesquilinearForm> {
    let dom = h.dom(tol)?;
    let mul = h.mul(tol)?;
    ensure(
        "mul H = (dom H)^⊥",
        gap(&mul, &complement(&dom))?,
        tol.subspace_eq_tol,
    )?;
    let qh_pinv = linalg::pseudo_inverse(&h.input_block(), tol);
    let u = dom.basis();
    let matrix = u.adjoint() * h.output_block() * qh_pinv * u;
    SesquilinearForm::new(dom, matrix)
}

/// The maximal sectorial relation represented by a sectorial form.
pub fn relation_of_form(f: &SesquilinearForm, tol: &ToleranceConfig) -> Result<LinearRelation> {
    let verdict = f.verdict(tol);
    if !verdict.is_accretive {
        return Err(Error::NotSectorial("real part is not nonnegative"));
    }
    if !verdict.is_sectorial {
        return Err(Error::NotSectorial("ker of real part not inside ker of imaginary part"));
    }
    relation_of_form_unchecked(f, tol)
}

pub(crate) fn relation_of_form_unchecked(
    f: &SesquilinearForm,
    tol: &ToleranceConfig,
) -> Result<LinearRelation> {
    let n = f.ambient_dim();
    let u = f.domain.basis();
    let perp = complement(&f.domain);
    let top = linalg::hstack(u, &Matrix::zeros(n, perp.dim()));
    let bottom = linalg::hstack(&(u * &f.matrix), perp.basis());
    LinearRelation::new(n, n, &vstack(&top, &bottom), tol)
}

/// The real part `H_r`: the nonnegative selfadjoint relation of `t_r`.
pub fn real_part_relation(h: &LinearRelation, tol: &ToleranceConfig) -> Result<LinearRelation> {
    relation_of_form(&form_of(h, tol)?.real_part(), tol)
}

/// Second representation `t[h, k] = ((I + iG) S h, S k)` with
/// `S = (H_r)_s^{1/2}` and `G = S⁺ t_i S⁺`.
pub fn second_representation(h: &LinearRelation, tol: &ToleranceConfig) -> Result<SecondRepresentation> {
    let verdict = sectoriality(h, tol)?;
    if !verdict.is_maximal_sectorial() {
        return Err(Error::NotMaximalSectorial("second representation"));
    }
    let tan_alpha = verdict.tan_alpha.unwrap_or(0.0);
    let form = form_of_unchecked(h, tol)?;
    let scale = linalg::op_norm(&form.matrix);
    let mr = form.real_part().matrix;
    let mi = form.imag_part().matrix;
    let threshold = null_threshold(scale, tol);
    let s = linalg::hermitian_apply(&mr, |x| if x > threshold { x.sqrt() } else { 0.0 });
    let s_pinv = inverse_sqrt_on_range(&mr, threshold);

    let g_raw = &s_pinv * &mi * &s_pinv;
    let asym = linalg::hermitian_defect(&g_raw);
    if asym > tol.hermitian_tol * linalg::op_norm(&g_raw).max(1.0) {
        return Err(Error::NotHermitian {
            context: "second representation G",
            residual: asym,
        });
    }
    let g = hermitian_part(&g_raw);

    let reconstruction = linalg::op_norm(&(&mi - &s * &g * &s));
    ensure("t_i = S G S", reconstruction, 1e-8 * scale.max(1.0))?;
    ensure("‖G‖ = tan α", (linalg::op_norm(&g) - tan_alpha).abs(), 1e-8)?;

    let h_r = relation_of_form(&form.real_part(), tol)?;
    let s_half = OperatorOnSubspace::new(form.domain.clone(), form.domain.basis() * &s)?;
    Ok(SecondRepresentation {
        h_r,
        s_half,
        g,
        tan_alpha,
    })
}

impl SecondRepresentation {
    /// `S` in domain coordinates.
    pub fn s_coordinates(&self) -> Matrix {
        self.s_half.domain.basis().adjoint() * &self.s_half.matrix
    }

    /// The form `S (I + iG) S` on `dom H`.
    pub fn form(&self) -> Result<SesquilinearForm> {
        let s = self.s_coordinates();
        let d = self.g.nrows();
        let middle = linalg::identity(d) + &self.g * I;
        SesquilinearForm::congruence(self.s_half.domain.clone(), &s, &middle)
    }

    /// `G` extended by zero to the ambient space: `U G Uᴴ`.
    pub fn g_ambient(&self) -> Matrix {
        let u = self.s_half.domain.basis();
        u * &self.g * u.adjoint()
    }
}

/// Rebuilds `H` from its second representation.
pub fn reconstruct_second_rep(rep: &SecondRepresentation, tol: &ToleranceConfig) -> Result<LinearRelation> {
    relation_of_form(&rep.form()?, tol)
}
