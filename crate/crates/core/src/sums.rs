//! Extensions of the sum `H₁ + H₂` of two maximal sectorial relations in `C^n`.
//!
//! Each summand is written `H_j = A_j^{1/2}(I+iB_j)A_j^{1/2}` with `A_j` its
//! real part. From these factors the workspace builds
//!
//! ```text
//! Φ = {((f₁, f₂), f₁′ + f₂′) : (f_j, f_j′) ∈ A_j^{1/2}}            H×H → H
//! Ψ = {(h, (A₁ₛ^{1/2}h, A₂ₛ^{1/2}h)) : h ∈ dom H₁ ∩ dom H₂}       H → H×H
//! K = {((x₁, x₂), f₁′ + f₂′) : x_j = (I+iB_j)A_jₛ^{1/2}f, (x_j, f_j′) ∈ A_j^{1/2}}
//! ```
//!
//! with `K ⊆ Φ ⊆ Ψ*` and `Ψ ⊆ Φ* ⊆ K*`, and from those the Friedrichs
//! extension `Ψ*(I+iB_⊕)Ψ`, the Kreĭn extension `K**(I+iB_⊕)K*`, the form
//! sum `Φ**(I+iB_⊕)Φ*` and the extremal extensions `R*(I+iC)R`.
//!
//! In finite dimension `H₁ + H₂` is already maximal sectorial and all of these
//! coincide with it; the routes are still computed independently so that the
//! agreement is a check rather than an assumption.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{ensure, Error, Result};
use crate::forms::{self, relation_of_form, SecondRepresentation, SesquilinearForm};
use crate::linalg::{self, block_diag, hstack, vstack, Matrix};
use crate::relation::{add_relations, compose, range_of, LinearRelation, OperatorOnSubspace};
use crate::subspace::{complement, gap, image, join, meet, orthonormalize, Subspace, ToleranceConfig};
use crate::tbt::{self, one_plus_i, SectorialDecomposition};

/// One summand `H = A^{1/2}(I+iB)A^{1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SummandData {
    pub h: LinearRelation,
    /// The real part `A`.
    pub a: LinearRelation,
    /// `A_s^{1/2}` on `dom H`, into `C^n`.
    pub a_s_half: OperatorOnSubspace,
    /// `A^{1/2} = A_s^{1/2} ⊕ ({0} × mul A)`.
    pub a_half: LinearRelation,
    /// `B`, extended by zero to `C^n`; vanishes on `ker A ⊕ mul A`.
    pub b_small: Matrix,
    pub representation: SecondRepresentation,
}

impl SummandData {
    pub fn dim(&self) -> usize {
        self.h.dim_h()
    }

    pub fn domain(&self) -> &Subspace {
        &self.a_s_half.domain
    }

    /// `A_s^{1/2}` as an `n × n` matrix, zero on `(dom H)^⊥`.
    pub fn a_s_half_ambient(&self) -> Matrix {
        self.a_s_half.ambient_matrix()
    }
}

pub fn prepare_summand(h: &LinearRelation, tol: &ToleranceConfig) -> Result<SummandData> {
    let representation = forms::second_representation(h, tol)?;
    let domain = representation.s_half.domain.clone();
    let s = representation.s_coordinates();
    let a_half = relation_of_form(&SesquilinearForm::new(domain, s)?, tol)?;
    let b_small = representation.g_ambient();

    let rebuilt = compose(&a_half, &a_half.apply_left(&one_plus_i(&b_small), tol)?, tol)?;
    ensure(
        "A^1/2 (I+iB) A^1/2 = H",
        rebuilt.gap(h)?,
        tol.subspace_eq_tol,
    )?;

    let a = representation.h_r.clone();
    let trivial_on = join(&a.ker(tol)?, &a.mul(tol)?, tol)?;
    ensure(
        "B trivial on ker A ⊕ mul A",
        linalg::op_norm(&(&b_small * trivial_on.basis())),
        tol.subspace_eq_tol * linalg::op_norm(&b_small).max(1.0),
    )?;

    Ok(SummandData {
        h: h.clone(),
        a,
        a_s_half: representation.s_half.clone(),
        a_half,
        b_small,
        representation,
    })
}

/// An extension of `H₁ + H₂` together with the gap between the two ways of
/// computing it (zero when there is only one route).
#[derive(Debug, Clone, PartialEq)]
pub struct Extension {
    pub relation: LinearRelation,
    pub route_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumExtensionWorkspace {
    pub s1: SummandData,
    pub s2: SummandData,
    pub phi: LinearRelation,
    pub phi_star: LinearRelation,
    pub psi: LinearRelation,
    pub k_rel: LinearRelation,
    pub k_star: LinearRelation,
    /// `diag(B₁, B₂)` on `C^n × C^n`.
    pub b_oplus: Matrix,
    /// `ran Ψ`.
    pub e_space: Subspace,
    /// `ran (Φ*)_s`.
    pub f_space: Subspace,
    /// `dom K`.
    pub d_space: Subspace,
    /// `C₀`, `C` with respect to `C^n × C^n = clos dom K ⊕ mul K*`.
    pub c0: Matrix,
    pub c: Matrix,
    /// Orthogonal projector onto `d_space`.
    pub p_d: Matrix,
    /// `H₁ + H₂`.
    pub sum: LinearRelation,
    pub friedrichs: LinearRelation,
    pub krein: LinearRelation,
    pub form_sum: LinearRelation,
    pub krein_form: SesquilinearForm,
    /// The split of `B_⊕` along `clos dom K ⊕ mul K*`, with `T = K*`.
    pub decomposition: SectorialDecomposition,
    /// Largest violation among the four inclusions `K ⊆ Φ ⊆ Ψ*`, `Ψ ⊆ Φ* ⊆ K*`.
    pub inclusion_residual: f64,
    pub friedrichs_route_gap: f64,
    pub krein_route_gap: f64,
}

/// Residuals of the four inclusions `K ⊆ Φ`, `Φ ⊆ Ψ*`, `Ψ ⊆ Φ*`, `Φ* ⊆ K*`.
pub fn inclusion_chain(
    phi: &LinearRelation,
    psi: &LinearRelation,
    k_rel: &LinearRelation,
) -> Result<[f64; 4]> {
    let phi_star = phi.adjoint();
    Ok([
        k_rel.inclusion_residual(phi)?,
        phi.inclusion_residual(&psi.adjoint())?,
        psi.inclusion_residual(&phi_star)?,
        phi_star.inclusion_residual(&k_rel.adjoint())?,
    ])
}

/// Puts `x` into the first or second copy of `C^n` inside `C^n × C^n`.
fn embed(x: &Matrix, second: bool) -> Matrix {
    let z = Matrix::zeros(x.nrows(), x.ncols());
    if second {
        vstack(&z, x)
    } else {
        vstack(x, &z)
    }
}

pub fn build_workspace(
    s1: &SummandData,
    s2: &SummandData,
    tol: &ToleranceConfig,
) -> Result<SumExtensionWorkspace> {
    let n = s1.dim();
    if s2.dim() != n {
        return Err(Error::DimensionMismatch {
            context: "build_workspace",
            expected: n,
            actual: s2.dim(),
        });
    }
    let a1 = s1.a_s_half_ambient();
    let a2 = s2.a_s_half_ambient();

    // Φ from the graphs of A₁^{1/2} and A₂^{1/2}.
    let g1 = s1.a_half.graph().basis();
    let g2 = s2.a_half.graph().basis();
    let phi_gens = hstack(
        &vstack(&embed(&linalg::rows(g1, 0, n), false), &linalg::rows(g1, n, n)),
        &vstack(&embed(&linalg::rows(g2, 0, n), true), &linalg::rows(g2, n, n)),
    );
    let phi = LinearRelation::from_basis_rows(2 * n, n, &phi_gens, tol)?;
    let phi_star = phi.adjoint();

    let v = meet(s1.domain(), s2.domain(), tol)?;
    let vb = v.basis();
    let psi_gens = vstack(vb, &vstack(&(&a1 * vb), &(&a2 * vb)));
    let psi = LinearRelation::from_basis_rows(n, 2 * n, &psi_gens, tol)?;

    let x1 = one_plus_i(&s1.b_small) * &a1 * vb;
    let x2 = one_plus_i(&s2.b_small) * &a2 * vb;
    let mul_sum = join(&s1.h.mul(tol)?, &s2.h.mul(tol)?, tol)?;
    let k_gens = hstack(
        &vstack(&vstack(&x1, &x2), &(&a1 * &x1 + &a2 * &x2)),
        &vstack(&Matrix::zeros(2 * n, mul_sum.dim()), mul_sum.basis()),
    );
    let k_rel = LinearRelation::from_basis_rows(2 * n, n, &k_gens, tol)?;
    let k_star = k_rel.adjoint();

    let chain = inclusion_chain(&phi, &psi, &k_rel)?;
    let names = ["K ⊆ Φ", "Φ ⊆ Ψ*", "Ψ ⊆ Φ*", "Φ* ⊆ K*"];
    for (name, r) in names.iter().zip(chain) {
        ensure(name, r, tol.subspace_eq_tol)?;
    }
    let inclusion_residual = chain.iter().cloned().fold(0.0, f64::max);

    ensure(
        "dom Φ* = dom H₁ ∩ dom H₂",
        gap(&phi_star.dom(tol)?, &v)?,
        tol.subspace_eq_tol,
    )?;
    ensure(
        "mul Φ* = mul H₁ × mul H₂",
        gap(
            &phi_star.mul(tol)?,
            &join(
                &Subspace::from_orthonormal(embed(s1.h.mul(tol)?.basis(), false)),
                &Subspace::from_orthonormal(embed(s2.h.mul(tol)?.basis(), true)),
                tol,
            )?,
        )?,
        tol.subspace_eq_tol,
    )?;

    let b_oplus = block_diag(&s1.b_small, &s2.b_small);
    let e_space = psi.ran(tol)?;
    let f_space = range_of(&phi_star.operator_part(tol)?, tol)?;
    let d_space = k_rel.dom(tol)?;
    ensure(
        "dom K = (I+iB⊕) ran Ψ",
        gap(&d_space, &image(&one_plus_i(&b_oplus), &e_space, tol)?)?,
        tol.subspace_eq_tol,
    )?;

    let decomposition = tbt::decompose_blocks(&k_star, &b_oplus, tol)?;
    ensure(
        "clos dom K = (mul K*)^⊥",
        gap(&decomposition.p_dom_tstar, &d_space)?,
        tol.subspace_eq_tol,
    )?;
    let sum = add_relations(&s1.h, &s2.h, tol)?;
    let krein_form = decomposition.reduced_form()?;

    let mut ws = SumExtensionWorkspace {
        s1: s1.clone(),
        s2: s2.clone(),
        c0: decomposition.c0.clone(),
        c: decomposition.c.clone(),
        p_d: d_space.projector(),
        friedrichs: sum.clone(),
        krein: sum.clone(),
        form_sum: sum.clone(),
        phi,
        phi_star,
        psi,
        k_rel,
        k_star,
        b_oplus,
        e_space,
        f_space,
        d_space,
        sum,
        krein_form,
        decomposition,
        inclusion_residual,
        friedrichs_route_gap: 0.0,
        krein_route_gap: 0.0,
    };

    let f = friedrichs(&ws, tol)?;
    let k = krein(&ws, tol)?;
    ensure(
        "relation of t_K = Kreĭn extension",
        relation_of_form(&ws.krein_form, tol)?.gap(&k.relation)?,
        tol.subspace_eq_tol,
    )?;
    let fs = form_sum(&ws, tol)?;
    ws.friedrichs = f.relation;
    ws.friedrichs_route_gap = f.route_gap;
    ws.krein = k.relation;
    ws.krein_route_gap = k.route_gap;
    ws.form_sum = fs.relation;
    Ok(ws)
}

impl SumExtensionWorkspace {
    pub fn dim(&self) -> usize {
        self.s1.dim()
    }

    /// `Ψ` as an operator `dom Ψ → C^n × C^n`.
    fn psi_operator(&self, tol: &ToleranceConfig) -> Result<OperatorOnSubspace> {
        self.psi.operator_part(tol)
    }

    /// `C₀^{1/2}(I+iC)C₀^{1/2}` acting on `C^n × C^n`, zero on `mul K*`.
    pub fn embedded_middle(&self) -> Matrix {
        let q1 = self.decomposition.p_dom_tstar.basis();
        q1 * self.decomposition.middle() * q1.adjoint()
    }

    /// `max ‖(I+iB⊕)Ψf − C₀^{1/2}(I+iC)C₀^{1/2}P_D Ψf‖` over unit `f ∈ dom Ψ`,
    /// relative to `1 + ‖B⊕‖`.
    pub fn friedrichs_identity_residual(&self, tol: &ToleranceConfig) -> Result<f64> {
        let x = self.psi_operator(tol)?.matrix;
        let lhs = one_plus_i(&self.b_oplus) * &x;
        let rhs = self.embedded_middle() * &x;
        Ok(linalg::op_norm(&(lhs - rhs)) / (1.0 + linalg::op_norm(&self.b_oplus)))
    }

    /// The form `Σ_j ((I+iB_j)A_jₛ^{1/2}h, A_jₛ^{1/2}k)` on
    /// `dom A₁^{1/2} ∩ dom A₂^{1/2}`.
    pub fn display_form_sum(&self, tol: &ToleranceConfig) -> Result<SesquilinearForm> {
        let v = meet(self.s1.domain(), self.s2.domain(), tol)?;
        let mut m = Matrix::zeros(v.dim(), v.dim());
        for s in [&self.s1, &self.s2] {
            let x = s.a_s_half_ambient() * v.basis();
            m += x.adjoint() * one_plus_i(&s.b_small) * x;
        }
        SesquilinearForm::new(v, m)
    }
}

/// `Ψ*(I+iB⊕)Ψ**`, checked against `Ψ* C₀^{1/2}(I+iC)C₀^{1/2} P_D Ψ_s`.
pub fn friedrichs(ws: &SumExtensionWorkspace, tol: &ToleranceConfig) -> Result<Extension> {
    let psi_adj = ws.psi.adjoint();
    let direct = compose(&psi_adj, &ws.psi.apply_left(&one_plus_i(&ws.b_oplus), tol)?, tol)?;
    let factored = ws.psi_operator(tol)?.then(&ws.embedded_middle()).to_relation(tol)?;
    let factored = compose(&psi_adj, &factored, tol)?;
    let route_gap = direct.gap(&factored)?;
    ensure("Friedrichs routes agree", route_gap, tol.subspace_eq_tol)?;
    ensure(
        "(I+iB⊕)Ψf = C₀^1/2(I+iC)C₀^1/2 P_D Ψf",
        ws.friedrichs_identity_residual(tol)?,
        tol.subspace_eq_tol,
    )?;
    Ok(Extension {
        relation: direct,
        route_gap,
    })
}

/// `K**(I+iB⊕)K*`, checked against `((K*)_s)^× C₀^{1/2}(I+iC)C₀^{1/2}(K*)_s`.
pub fn krein(ws: &SumExtensionWorkspace, tol: &ToleranceConfig) -> Result<Extension> {
    let direct = tbt::construct_direct(&ws.k_star, &ws.b_oplus, tol)?;
    let dec = &ws.decomposition;
    let factored = tbt::sandwich_operator_part(&dec.t_s_coordinates()?, &dec.middle(), tol)?;
    let route_gap = direct.gap(&factored)?;
    ensure("Kreĭn routes agree", route_gap, tol.subspace_eq_tol)?;
    Ok(Extension {
        relation: direct,
        route_gap,
    })
}

/// `Φ**(I+iB⊕)Φ*`; checks that it extends `H₁ + H₂` and that its form is the
/// sum of the summands' forms.
pub fn form_sum(ws: &SumExtensionWorkspace, tol: &ToleranceConfig) -> Result<Extension> {
    let scaled = ws.phi_star.apply_left(&one_plus_i(&ws.b_oplus), tol)?;
    let relation = compose(&ws.phi_star.adjoint(), &scaled, tol)?;
    ensure(
        "form sum extends H₁ + H₂",
        ws.sum.inclusion_residual(&relation)?,
        tol.subspace_eq_tol,
    )?;
    let display = relation_of_form(&ws.display_form_sum(tol)?, tol)?;
    let route_gap = relation.gap(&display)?;
    ensure("form sum matches the summed forms", route_gap, tol.subspace_eq_tol)?;
    Ok(Extension { relation, route_gap })
}

/// Residuals behind [`is_form_sum_extremal`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremalityResiduals {
    /// `gap(E, F)`
    pub e_f_gap: f64,
    /// Domain gap between the form-sum form and `t_K` restricted to `dom Φ*`.
    pub form_domain_gap: f64,
    /// Relative coefficient difference of those two forms.
    pub form_matrix_gap: f64,
}

pub fn extremality_residuals(ws: &SumExtensionWorkspace, tol: &ToleranceConfig) -> Result<ExtremalityResiduals> {
    let own = forms::form_of(&ws.form_sum, tol)?;
    let restricted = ws.krein_form.restrict(&ws.phi_star.dom(tol)?, tol)?;
    let (form_domain_gap, form_matrix_gap) = own.coincidence_residual(&restricted)?;
    Ok(ExtremalityResiduals {
        e_f_gap: gap(&ws.e_space, &ws.f_space)?,
        form_domain_gap,
        form_matrix_gap,
    })
}

/// Whether the form sum is extremal, decided by `E = F` and cross-checked
/// against "its form is a restriction of `t_K`".
pub fn is_form_sum_extremal(ws: &SumExtensionWorkspace, tol: &ToleranceConfig) -> Result<bool> {
    let r = extremality_residuals(ws, tol)?;
    let t = tol.subspace_eq_tol;
    let by_spaces = r.e_f_gap <= t;
    let by_forms = r.form_domain_gap <= t && r.form_matrix_gap <= t;
    if by_spaces != by_forms {
        return Err(Error::falsified(
            "E = F iff form sum is a restriction of t_K",
            r.e_f_gap.max(r.form_domain_gap).max(r.form_matrix_gap),
            t,
        ));
    }
    Ok(by_spaces)
}

/// `dom Ψ ⊕ span(Y · mix)` where `Y` is an orthonormal basis of
/// `dom K* ⊖ dom Ψ`; `mix` has `dim Y` rows. In finite dimension `Y` is
/// empty and the result is `dom Ψ`.
pub fn intermediate_domain(ws: &SumExtensionWorkspace, mix: &Matrix, tol: &ToleranceConfig) -> Result<Subspace> {
    let lower = ws.psi.dom(tol)?;
    let upper = ws.k_star.dom(tol)?;
    let gap_space = meet(&upper, &complement(&lower), tol)?;
    if mix.nrows() != gap_space.dim() {
        return Err(Error::DimensionMismatch {
            context: "intermediate_domain",
            expected: gap_space.dim(),
            actual: mix.nrows(),
        });
    }
    let extra = orthonormalize(&(gap_space.basis() * mix), tol)?;
    join(&lower, &extra, tol)
}

/// `R*(I+iC)R` with `R` the restriction of `C₀^{1/2}(K*)_s` to `d_sub`, for
/// `dom Ψ ⊆ d_sub ⊆ dom K*`.
pub fn extremal_from_domain(
    ws: &SumExtensionWorkspace,
    d_sub: &Subspace,
    tol: &ToleranceConfig,
) -> Result<LinearRelation> {
    let lower = ws.psi.dom(tol)?;
    let upper = ws.k_star.dom(tol)?;
    let below = lower.inclusion_residual(d_sub)?;
    let above = d_sub.inclusion_residual(&upper)?;
    if below > tol.subspace_eq_tol || above > tol.subspace_eq_tol {
        return Err(Error::Inadmissible(format!(
            "domain outside [dom Ψ, dom K*] (residuals {below:.3e}, {above:.3e})"
        )));
    }
    let dec = &ws.decomposition;
    let c0_half = linalg::hermitian_apply(&dec.c0, |x| x.max(0.0).sqrt());
    let r = dec.t_s_coordinates()?.restrict(d_sub, tol)?.then(&c0_half);
    let form = SesquilinearForm::congruence(d_sub.clone(), &r.matrix, &one_plus_i(&dec.c))?;
    let relation = relation_of_form(&form, tol)?;
    ensure(
        "extremal extension extends H₁ + H₂",
        ws.sum.inclusion_residual(&relation)?,
        tol.subspace_eq_tol,
    )?;
    if !forms::is_maximal_sectorial(&relation, tol)? {
        return Err(Error::NotMaximalSectorial("extremal extension"));
    }
    Ok(relation)
}

/// A way of extending `H₁ + H₂`, selected by name at runtime.
pub trait ExtensionStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn extend(&self, ws: &SumExtensionWorkspace, tol: &ToleranceConfig) -> Result<Extension>;
}

pub struct Friedrichs;
pub struct Krein;
pub struct FormSum;
/// Extremal extension on `dom Ψ` (`upper = false`) or `dom K*`.
pub struct Extremal {
    pub upper: bool,
}

impl ExtensionStrategy for Friedrichs {
    fn name(&self) -> &'static str {
        "friedrichs"
    }
    fn extend(&self, ws: &SumExtensionWorkspace, tol: &ToleranceConfig) -> Result<Extension> {
        friedrichs(ws, tol)
    }
}

impl ExtensionStrategy for Krein {
    fn name(&self) -> &'static str {
        "krein"
    }
    fn extend(&self, ws: &SumExtensionWorkspace, tol: &ToleranceConfig) -> Result<Extension> {
        krein(ws, tol)
    }
}

impl ExtensionStrategy for FormSum {
    fn name(&self) -> &'static str {
        "form-sum"
    }
    fn extend(&self, ws: &SumExtensionWorkspace, tol: &ToleranceConfig) -> Result<Extension> {
        form_sum(ws, tol)
    }
}

impl ExtensionStrategy for Extremal {
    fn name(&self) -> &'static str {
        if self.upper {
            "extremal-upper"
        } else {
            "extremal-lower"
        }
    }
    fn extend(&self, ws: &SumExtensionWorkspace, tol: &ToleranceConfig) -> Result<Extension> {
        let d_sub = if self.upper {
            ws.k_star.dom(tol)?
        } else {
            ws.psi.dom(tol)?
        };
        Ok(Extension {
            relation: extremal_from_domain(ws, &d_sub, tol)?,
            route_gap: 0.0,
        })
    }
}

/// Name-keyed collection of [`ExtensionStrategy`] values.
#[derive(Clone, Default)]
pub struct ExtensionRegistry {
    strategies: BTreeMap<&'static str, Arc<dyn ExtensionStrategy>>,
}

impl ExtensionRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Friedrichs, Kreĭn, form sum and both extremal endpoints.
    pub fn standard() -> Self {
        let mut r = Self::new();
        r.register(Arc::new(Friedrichs));
        r.register(Arc::new(Krein));
        r.register(Arc::new(FormSum));
        r.register(Arc::new(Extremal { upper: false }));
        r.register(Arc::new(Extremal { upper: true }));
        r
    }

    pub fn register(&mut self, s: Arc<dyn ExtensionStrategy>) {
        self.strategies.insert(s.name(), s);
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn ExtensionStrategy>> {
        self.strategies.get(name).cloned()
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.strategies.keys().copied().collect()
    }

    pub fn run_all(&self, ws: &SumExtensionWorkspace, tol: &ToleranceConfig) -> Result<Vec<(&'static str, Extension)>> {
        self.strategies
            .iter()
            .map(|(&name, s)| Ok((name, s.extend(ws, tol)?)))
            .collect()
    }
}
