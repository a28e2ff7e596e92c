//! The maximal sectorial relation `T*(I+iB)T` for a relation `T` from `C^h`
//! to `C^k` and a Hermitian `B`.
//!
//! `K` splits as `clos dom T* ⊕ mul T` and `B` is written in blocks
//! `B₁₁, B₁₂, B₂₂` with respect to that split. With
//!
//! ```text
//! C₀ = I + B₁₂ (I + B₂₂²)⁻¹ B₁₂ᴴ
//! C  = C₀^{-1/2} [B₁₁ − B₁₂ (I + B₂₂²)^{-1/2} B₂₂ (I + B₂₂²)^{-1/2} B₁₂ᴴ] C₀^{-1/2}
//! ```
//!
//! the product equals `(T_s)^× C₀^{1/2}(I+iC)C₀^{1/2} T_s`, where `T_s` is the
//! operator part of `T` viewed as a map into `clos dom T*` and `^×` is the
//! adjoint taken with respect to that smaller codomain. Its form is
//! `t[h, k] = ((I+iC) W h, W k)` with `W = C₀^{1/2} T_s`.

use crate::error::{ensure, Error, Result};
use crate::forms::{self, relation_of_form, SectorialityVerdict, SesquilinearForm};
use crate::linalg::{self, hermitian_apply, Matrix, Vector, I};
use crate::relation::{compose, LinearRelation, OperatorOnSubspace};
use crate::subspace::{complement, gap, Subspace, ToleranceConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct SectorialDecomposition {
    /// `clos dom T* = (mul T)^⊥` inside `K`.
    pub p_dom_tstar: Subspace,
    pub mul_t: Subspace,
    pub b11: Matrix,
    pub b12: Matrix,
    pub b22: Matrix,
    pub c0: Matrix,
    pub c: Matrix,
    /// `T_s = P T` on `dom T`, into `K`.
    pub t_s: OperatorOnSubspace,
    /// `‖C‖`, an upper bound for `tan` of the semi-angle of the product.
    pub tan_gamma_bound: f64,
    b_norm: f64,
}

/// `I + iB`.
pub fn one_plus_i(b: &Matrix) -> Matrix {
    linalg::identity(b.nrows()) + b * I
}

/// `C₀` and `C` from the blocks of `B`. An empty `B₂₂` gives `C₀ = I`,
/// `C = B₁₁`; an empty `B₁₁` gives empty `C₀` and `C`.
pub fn compute_c0_c(
    b11: &Matrix,
    b12: &Matrix,
    b22: &Matrix,
    tol: &ToleranceConfig,
) -> Result<(Matrix, Matrix)> {
    let r1 = b11.nrows();
    if r1 == 0 {
        return Ok((Matrix::zeros(0, 0), Matrix::zeros(0, 0)));
    }
    let inv = hermitian_apply(b22, |x| 1.0 / (1.0 + x * x));
    let inv_half = hermitian_apply(b22, |x| 1.0 / (1.0 + x * x).sqrt());
    let c0 = linalg::identity(r1) + b12 * inv * b12.adjoint();
    let c0 = linalg::hermitian_part(&c0);

    let lowest = linalg::min_eigenvalue(&c0).unwrap_or(1.0);
    ensure(
        "C0 >= I",
        (1.0 - lowest).max(0.0),
        tol.psd_tol * linalg::op_norm(&c0),
    )?;

    let c0_inv_half = hermitian_apply(&c0, |x| 1.0 / x.sqrt());
    let inner = b11 - b12 * &inv_half * b22 * &inv_half * b12.adjoint();
    let c = &c0_inv_half * inner * &c0_inv_half;
    let scale = linalg::op_norm(b11)
        .max(linalg::op_norm(b12))
        .max(linalg::op_norm(b22))
        .max(1.0);
    let defect = linalg::hermitian_defect(&c);
    if defect > tol.hermitian_tol * scale {
        return Err(Error::NotHermitian {
            context: "C",
            residual: defect,
        });
    }
    Ok((c0, linalg::hermitian_part(&c)))
}

/// Splits `K = clos dom T* ⊕ mul T`, compresses `B` to the blocks and
/// computes `C₀`, `C` and `T_s`.
pub fn decompose_blocks(
    t: &LinearRelation,
    b: &Matrix,
    tol: &ToleranceConfig,
) -> Result<SectorialDecomposition> {
    if b.nrows() != t.dim_k() || b.ncols() != t.dim_k() {
        return Err(Error::DimensionMismatch {
            context: "decompose_blocks",
            expected: t.dim_k(),
            actual: b.nrows(),
        });
    }
    linalg::ensure_hermitian(b, tol.hermitian_tol, "B")?;
    let b = linalg::hermitian_part(b);
    let mul_t = t.mul(tol)?;
    let p_dom_tstar = complement(&mul_t);
    let q1 = p_dom_tstar.basis();
    let q2 = mul_t.basis();
    let b11 = q1.adjoint() * &b * q1;
    let b12 = q1.adjoint() * &b * q2;
    let b22 = q2.adjoint() * &b * q2;
    let (c0, c) = compute_c0_c(&b11, &b12, &b22, tol)?;
    let t_s = t.operator_part(tol)?;
    Ok(SectorialDecomposition {
        tan_gamma_bound: linalg::op_norm(&c),
        b_norm: linalg::op_norm(&b),
        p_dom_tstar,
        mul_t,
        b11,
        b12,
        b22,
        c0,
        c,
        t_s,
    })
}

impl SectorialDecomposition {
    pub fn dim_k(&self) -> usize {
        self.p_dom_tstar.ambient_dim()
    }

    pub fn dom_t(&self) -> &Subspace {
        &self.t_s.domain
    }

    /// `‖B − [Q₁ Q₂] [[B₁₁, B₁₂], [B₁₂ᴴ, B₂₂]] [Q₁ Q₂]ᴴ‖ / ‖B‖`.
    pub fn reassembly_residual(&self, b: &Matrix) -> f64 {
        let q = linalg::hstack(self.p_dom_tstar.basis(), self.mul_t.basis());
        let top = linalg::hstack(&self.b11, &self.b12);
        let bottom = linalg::hstack(&self.b12.adjoint(), &self.b22);
        let blocks = linalg::vstack(&top, &bottom);
        let rebuilt = &q * blocks * q.adjoint();
        linalg::op_norm(&(b - rebuilt)) / linalg::op_norm(b).max(f64::MIN_POSITIVE)
    }

    /// `T_s` as an operator into coordinates of `clos dom T*`.
    pub fn t_s_coordinates(&self) -> Result<OperatorOnSubspace> {
        self.t_s.into_coordinates_of(&self.p_dom_tstar)
    }

    /// `W = C₀^{1/2} T_s` in coordinates.
    pub fn w(&self) -> Result<Matrix> {
        let c0_half = hermitian_apply(&self.c0, |x| x.max(0.0).sqrt());
        Ok(c0_half * self.t_s_coordinates()?.matrix)
    }

    /// `C₀^{1/2} (I + iC) C₀^{1/2}` on `clos dom T*` coordinates.
    pub fn middle(&self) -> Matrix {
        let c0_half = hermitian_apply(&self.c0, |x| x.max(0.0).sqrt());
        &c0_half * one_plus_i(&self.c) * &c0_half
    }

    /// `t[h, k] = ((I + iC) W h, W k)` on `dom T`.
    pub fn reduced_form(&self) -> Result<SesquilinearForm> {
        SesquilinearForm::congruence(self.dom_t().clone(), &self.w()?, &one_plus_i(&self.c))
    }

    /// Real part `(W h, W k)` of the reduced form.
    pub fn real_form(&self) -> Result<SesquilinearForm> {
        let w = self.w()?;
        SesquilinearForm::congruence(self.dom_t().clone(), &w, &linalg::identity(w.nrows()))
    }

    /// `((I + iB₁₁) T_s h, T_s k)`, the form when `mul T` is invariant under `B`.
    pub fn block_diagonal_form(&self) -> Result<SesquilinearForm> {
        let v = self.t_s_coordinates()?.matrix;
        SesquilinearForm::congruence(self.dom_t().clone(), &v, &one_plus_i(&self.b11))
    }

    /// Membership test for `φ ∈ K`: whether `(I+iB)φ ∈ clos dom T*`,
    /// cross-checked against the two equivalent conditions.
    pub fn membership_residuals(&self, phi: &Vector) -> Result<MembershipResiduals> {
        if phi.len() != self.dim_k() {
            return Err(Error::DimensionMismatch {
                context: "membership_check",
                expected: self.dim_k(),
                actual: phi.len(),
            });
        }
        let phi1 = self.p_dom_tstar.coordinates(phi);
        let phi2 = self.mul_t.coordinates(phi);
        let eta1 = one_plus_i(&self.b11) * &phi1 + &self.b12 * &phi2 * I;
        let eta2 = self.b12.adjoint() * &phi1 * I + one_plus_i(&self.b22) * &phi2;
        let rhs = self.middle() * &phi1;
        let phi2_forced = match one_plus_i(&self.b22).try_inverse() {
            Some(inv) if self.b22.nrows() > 0 => inv * self.b12.adjoint() * &phi1 * (-I),
            _ => Vector::zeros(self.b22.nrows()),
        };
        let scale = phi.norm().max(f64::MIN_POSITIVE) * (1.0 + self.b_norm);
        Ok(MembershipResiduals {
            mul_component: eta2.norm() / scale,
            identity: ((eta1 - rhs).norm() + eta2.norm()) / scale,
            phi2_relation: (phi2 - phi2_forced).norm() / scale,
        })
    }

    pub fn membership_check(&self, phi: &Vector, tol: &ToleranceConfig) -> Result<bool> {
        let r = self.membership_residuals(phi)?;
        let t = tol.subspace_eq_tol;
        let verdicts = [r.mul_component <= t, r.identity <= t, r.phi2_relation <= t];
        if verdicts.iter().any(|&v| v != verdicts[0]) {
            let worst = r.mul_component.max(r.identity).max(r.phi2_relation);
            return Err(Error::falsified("membership equivalence", worst, t));
        }
        Ok(verdicts[0])
    }
}

/// Relative residuals of the three equivalent conditions on `φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MembershipResiduals {
    /// `‖P_mul (I+iB)φ‖`
    pub mul_component: f64,
    /// `‖(I+iB)φ − C₀^{1/2}(I+iC)C₀^{1/2}φ₁‖`
    pub identity: f64,
    /// `‖φ₂ + i(I+iB₂₂)⁻¹B₁₂ᴴφ₁‖`
    pub phi2_relation: f64,
}

/// `T*(I+iB)T` as a literal product of relations.
pub fn construct_direct(t: &LinearRelation, b: &Matrix, tol: &ToleranceConfig) -> Result<LinearRelation> {
    let scaled = t.apply_left(&one_plus_i(b), tol)?;
    compose(&t.adjoint(), &scaled, tol)
}

/// `T*(I+iB)T` through its form `((I+iC) W h, W k)` on `dom T`.
pub fn construct_reduced(t: &LinearRelation, b: &Matrix, tol: &ToleranceConfig) -> Result<LinearRelation> {
    let dec = decompose_blocks(t, b, tol)?;
    relation_of_form(&dec.reduced_form()?, tol)
}

/// `(T_s)^× X T_s` where `T_s` maps into coordinates of `clos dom T*` and
/// `X` acts on those coordinates; `^×` is the adjoint for that codomain.
pub fn sandwich_operator_part(
    t_s_coords: &OperatorOnSubspace,
    middle: &Matrix,
    tol: &ToleranceConfig,
) -> Result<LinearRelation> {
    let ts = t_s_coords.to_relation(tol)?;
    compose(&ts.adjoint(), &ts.apply_left(middle, tol)?, tol)
}

/// `(T_s)^× C₀^{1/2}(I+iC)C₀^{1/2} T_s` as a literal product.
pub fn construct_factored(t: &LinearRelation, b: &Matrix, tol: &ToleranceConfig) -> Result<LinearRelation> {
    let dec = decompose_blocks(t, b, tol)?;
    sandwich_operator_part(&dec.t_s_coordinates()?, &dec.middle(), tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    /// gap(T*(I+iB)T, relation of the reduced form)
    pub direct_vs_reduced: f64,
    /// gap(T*(I+iB)T, (T_s)^× C₀^{1/2}(I+iC)C₀^{1/2} T_s)
    pub direct_vs_factored: f64,
    /// gap(mul of the product, mul T*)
    pub mul_vs_mul_adjoint: f64,
    /// gap(mul of the product, (dom T)^⊥)
    pub mul_vs_dom_complement: f64,
    pub verdict: SectorialityVerdict,
    pub tan_alpha: f64,
    pub norm_c: f64,
    pub norm_b: f64,
    /// gap(real part of the product, relation of `(W h, W k)`)
    pub real_part_gap: f64,
    pub c0_lowest_eigenvalue: f64,
    pub reassembly: f64,
}

impl IdentityReport {
    pub fn passes(&self, tol: &ToleranceConfig) -> bool {
        let t = tol.subspace_eq_tol;
        self.direct_vs_reduced <= t
            && self.direct_vs_factored <= t
            && self.mul_vs_mul_adjoint <= t
            && self.mul_vs_dom_complement <= t
            && self.verdict.is_maximal_sectorial()
            && self.tan_alpha <= self.norm_c.min(self.norm_b) + t
            && self.real_part_gap <= t
    }
}

/// Runs every consistency check for one `(T, B)` pair.
pub fn verify_identity(t: &LinearRelation, b: &Matrix, tol: &ToleranceConfig) -> Result<IdentityReport> {
    let dec = decompose_blocks(t, b, tol)?;
    let direct = construct_direct(t, b, tol)?;
    let reduced = relation_of_form(&dec.reduced_form()?, tol)?;
    let factored = sandwich_operator_part(&dec.t_s_coordinates()?, &dec.middle(), tol)?;
    let verdict = forms::sectoriality(&direct, tol)?;
    let product_mul = direct.mul(tol)?;
    let mul_adjoint = t.adjoint().mul(tol)?;
    let dom_perp = complement(&t.dom(tol)?);

    let real_part_gap = match forms::real_part_relation(&direct, tol) {
        Ok(r) => r.gap(&relation_of_form(&dec.real_form()?, tol)?)?,
        Err(Error::NotMaximalSectorial(_)) => 1.0,
        Err(e) => return Err(e),
    };

    Ok(IdentityReport {
        direct_vs_reduced: direct.gap(&reduced)?,
        direct_vs_factored: direct.gap(&factored)?,
        mul_vs_mul_adjoint: gap(&product_mul, &mul_adjoint)?,
        mul_vs_dom_complement: gap(&product_mul, &dom_perp)?,
        tan_alpha: verdict.tan_alpha.unwrap_or(f64::INFINITY),
        verdict,
        norm_c: dec.tan_gamma_bound,
        norm_b: linalg::op_norm(b),
        real_part_gap,
        c0_lowest_eigenvalue: linalg::min_eigenvalue(&dec.c0).unwrap_or(1.0),
        reassembly: dec.reassembly_residual(b),
    })
}

/// The four equivalent conditions for `mul T` to be invariant under `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InvarianceFlags {
    pub diag: bool,
    pub b12_zero: bool,
    pub c0_is_identity: bool,
    pub mul_invariant: bool,
}

impl InvarianceFlags {
    pub fn all(&self) -> bool {
        self.diag && self.b12_zero && self.c0_is_identity && self.mul_invariant
    }

    pub fn none(&self) -> bool {
        !(self.diag || self.b12_zero || self.c0_is_identity || self.mul_invariant)
    }
}

/// Raw measurements behind [`invariance_flags`], each relative to `‖B‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvarianceResiduals {
    /// `‖B − (P B P + P⊥ B P⊥)‖`
    pub off_diagonal: f64,
    /// `‖B₁₂‖`
    pub b12: f64,
    /// `√‖C₀ − I‖`
    pub c0_minus_identity: f64,
    /// `‖P B P_mul‖`, the part of `B (mul T)` leaving `mul T`
    pub leakage: f64,
}

pub fn invariance_residuals(dec: &SectorialDecomposition, b: &Matrix) -> InvarianceResiduals {
    let scale = linalg::op_norm(b).max(f64::MIN_POSITIVE);
    let p = dec.p_dom_tstar.projector();
    let q = dec.mul_t.projector();
    let diag = &p * b * &p + &q * b * &q;
    let c0_dev = if dec.c0.nrows() == 0 {
        0.0
    } else {
        linalg::op_norm(&(&dec.c0 - linalg::identity(dec.c0.nrows())))
    };
    InvarianceResiduals {
        off_diagonal: linalg::op_norm(&(b - diag)) / scale,
        b12: linalg::op_norm(&dec.b12) / scale,
        c0_minus_identity: c0_dev.sqrt() / scale,
        leakage: linalg::op_norm(&(p * b * q)) / scale,
    }
}

/// Evaluates the four conditions independently, fails loudly if they
/// disagree, and when they hold checks `C = B₁₁` and that the block-diagonal
/// form gives the same relation.
pub fn invariance_flags(t: &LinearRelation, b: &Matrix, tol: &ToleranceConfig) -> Result<InvarianceFlags> {
    let dec = decompose_blocks(t, b, tol)?;
    let r = invariance_residuals(&dec, b);
    let th = tol.hermitian_tol;
    let flags = InvarianceFlags {
        diag: r.off_diagonal <= th,
        b12_zero: r.b12 <= th,
        c0_is_identity: r.c0_minus_identity <= th,
        mul_invariant: r.leakage <= th,
    };
    if !(flags.all() || flags.none()) {
        let worst = r.off_diagonal.max(r.b12).max(r.c0_minus_identity).max(r.leakage);
        return Err(Error::falsified("invariance equivalences", worst, th));
    }
    if flags.all() {
        let scale = linalg::op_norm(b).max(f64::MIN_POSITIVE);
        ensure(
            "C = B11",
            linalg::op_norm(&(&dec.c - &dec.b11)) / scale,
            tol.hermitian_tol,
        )?;
        let general = relation_of_form(&dec.reduced_form()?, tol)?;
        let block = relation_of_form(&dec.block_diagonal_form()?, tol)?;
        ensure(
            "block-diagonal form agrees",
            general.gap(&block)?,
            tol.subspace_eq_tol,
        )?;
    }
    Ok(flags)
}

/// For single-valued `T`, `T′` with equal domains: the unitary `U` from
/// `ran T` onto `ran T′` with `T′ = U T` and `B′_bb = U B_bb Uᴴ`, provided the
/// two forms `((I+iB)Th, Tk)` and `((I+iB′)T′h, T′k)` agree. The returned
/// matrix is `k′ × k` and vanishes on `(ran T)^⊥`.
pub fn unitary_equivalence(
    t: &LinearRelation,
    b: &Matrix,
    t2: &LinearRelation,
    b2: &Matrix,
    tol: &ToleranceConfig,
) -> Result<Option<Matrix>> {
    if !t.is_single_valued(tol)? || !t2.is_single_valued(tol)? {
        return Err(Error::Multivalued("unitary_equivalence"));
    }
    if t.dim_h() != t2.dim_h() {
        return Err(Error::DimensionMismatch {
            context: "unitary_equivalence",
            expected: t.dim_h(),
            actual: t2.dim_h(),
        });
    }
    let op1 = t.operator_part(tol)?;
    let op2 = t2.operator_part(tol)?;
    if gap(&op1.domain, &op2.domain)? > tol.subspace_eq_tol {
        return Ok(None);
    }
    let u = op1.domain.basis();
    let x1 = op1.ambient_matrix() * u;
    let x2 = op2.ambient_matrix() * u;
    let gram1 = x1.adjoint() * &x1;
    let gram2 = x2.adjoint() * &x2;
    let scale = linalg::op_norm(&gram1).max(linalg::op_norm(&gram2)).max(f64::MIN_POSITIVE);
    let mixed1 = x1.adjoint() * b * &x1;
    let mixed2 = x2.adjoint() * b2 * &x2;
    let mixed_scale = scale * linalg::op_norm(b).max(linalg::op_norm(b2)).max(1.0);
    if linalg::op_norm(&(gram1 - gram2)) > tol.subspace_eq_tol * scale
        || linalg::op_norm(&(mixed1 - mixed2)) > tol.subspace_eq_tol * mixed_scale
    {
        return Ok(None);
    }
    let map = &x2 * linalg::pseudo_inverse(&x1, tol);
    ensure(
        "T' = U T",
        linalg::op_norm(&(&map * &x1 - &x2)) / scale.sqrt(),
        tol.subspace_eq_tol,
    )?;
    Ok(Some(map))
}
