//! Linear relations as graph subspaces of `H ⊕ K`.

use crate::error::{ensure, Error, Result};
use crate::linalg::{self, rows, vstack, Matrix};
use crate::subspace::{complement, gap, join, meet, orthonormalize_with_floor, Subspace, ToleranceConfig};

/// A linear relation from `C^dim_h` to `C^dim_k`. The first `dim_h`
/// coordinates of the graph are the input component.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRelation {
    dim_h: usize,
    dim_k: usize,
    graph: Subspace,
}

/// The four subspaces attached to a relation.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationParts {
    pub dom: Subspace,
    pub ran: Subspace,
    pub ker: Subspace,
    pub mul: Subspace,
}

/// A single-valued relation given by a matrix acting on coordinates of
/// `domain`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorOnSubspace {
    pub domain: Subspace,
    pub codomain_dim: usize,
    /// `codomain_dim × dim(domain)`.
    pub matrix: Matrix,
}

impl LinearRelation {
    pub fn from_graph(dim_h: usize, dim_k: usize, graph: Subspace) -> Result<Self> {
        if graph.ambient_dim() != dim_h + dim_k {
            return Err(Error::DimensionMismatch {
                context: "relation graph",
                expected: dim_h + dim_k,
                actual: graph.ambient_dim(),
            });
        }
        Ok(LinearRelation {
            dim_h,
            dim_k,
            graph,
        })
    }

    /// The relation spanned by the columns of `generators` (stacked input over
    /// output component).
    pub fn new(
        dim_h: usize,
        dim_k: usize,
        generators: &Matrix,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        if generators.nrows() != dim_h + dim_k {
            return Err(Error::DimensionMismatch {
                context: "relation generators",
                expected: dim_h + dim_k,
                actual: generators.nrows(),
            });
        }
        Self::with_floor(dim_h, dim_k, generators, 0.0, tol)
    }

    fn with_floor(dim_h: usize, dim_k: usize, generators: &Matrix, floor: f64, tol: &ToleranceConfig) -> Result<Self> {
        if generators.nrows() != dim_h + dim_k {
            return Err(Error::DimensionMismatch {
                context: "relation generators",
                expected: dim_h + dim_k,
                actual: generators.nrows(),
            });
        }
        Self::from_graph(dim_h, dim_k, orthonormalize_with_floor(generators, floor, tol)?)
    }

    /// Generators read off an orthonormal basis: entries are `O(1)`.
    pub(crate) fn from_basis_rows(dim_h: usize, dim_k: usize, generators: &Matrix, tol: &ToleranceConfig) -> Result<Self> {
        Self::with_floor(dim_h, dim_k, generators, 1.0, tol)
    }

    /// Graph of the everywhere defined operator `a : C^cols → C^rows`.
    pub fn graph_of(a: &Matrix, tol: &ToleranceConfig) -> Result<Self> {
        let gens = vstack(&linalg::identity(a.ncols()), a);
        Self::new(a.ncols(), a.nrows(), &gens, tol)
    }

    pub fn identity(n: usize) -> Self {
        let s = 0.5f64.sqrt();
        let basis = vstack(&linalg::identity(n), &linalg::identity(n)).scale(s);
        LinearRelation {
            dim_h: n,
            dim_k: n,
            graph: Subspace::from_orthonormal(basis),
        }
    }

    /// `{0} × {0}`.
    pub fn zero_relation(dim_h: usize, dim_k: usize) -> Self {
        LinearRelation {
            dim_h,
            dim_k,
            graph: Subspace::zero(dim_h + dim_k),
        }
    }

    /// `{0} × C^dim_k`.
    pub fn purely_multivalued(dim_h: usize, dim_k: usize) -> Self {
        let idx: Vec<usize> = (dim_h..dim_h + dim_k).collect();
        LinearRelation {
            dim_h,
            dim_k,
            graph: Subspace::coordinate(dim_h + dim_k, &idx),
        }
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn dim_k(&self) -> usize {
        self.dim_k
    }

    pub fn graph(&self) -> &Subspace {
        &self.graph
    }

    /// Input block `Q_h` of the graph basis.
    pub fn input_block(&self) -> Matrix {
        rows(self.graph.basis(), 0, self.dim_h)
    }

    /// Output block `Q_k` of the graph basis.
    pub fn output_block(&self) -> Matrix {
        rows(self.graph.basis(), self.dim_h, self.dim_k)
    }

    pub fn is_square(&self) -> bool {
        self.dim_h == self.dim_k
    }

    pub fn dom(&self, tol: &ToleranceConfig) -> Result<Subspace> {
        orthonormalize_with_floor(&self.input_block(), 1.0, tol)
    }

    pub fn ran(&self, tol: &ToleranceConfig) -> Result<Subspace> {
        orthonormalize_with_floor(&self.output_block(), 1.0, tol)
    }

    /// `mul = graph ∩ ({0} ⊕ K)`, read off in `K`.
    pub fn mul(&self, tol: &ToleranceConfig) -> Result<Subspace> {
        let idx: Vec<usize> = (self.dim_h..self.dim_h + self.dim_k).collect();
        let axis = Subspace::coordinate(self.dim_h + self.dim_k, &idx);
        let m = meet(&self.graph, &axis, tol)?;
        orthonormalize_with_floor(&rows(m.basis(), self.dim_h, self.dim_k), 1.0, tol)
    }

    /// `ker = graph ∩ (H ⊕ {0})`, read off in `H`.
    pub fn ker(&self, tol: &ToleranceConfig) -> Result<Subspace> {
        let idx: Vec<usize> = (0..self.dim_h).collect();
        let axis = Subspace::coordinate(self.dim_h + self.dim_k, &idx);
        let m = meet(&self.graph, &axis, tol)?;
        orthonormalize_with_floor(&rows(m.basis(), 0, self.dim_h), 1.0, tol)
    }

    pub fn parts(&self, tol: &ToleranceConfig) -> Result<RelationParts> {
        Ok(RelationParts {
            dom: self.dom(tol)?,
            ran: self.ran(tol)?,
            ker: self.ker(tol)?,
            mul: self.mul(tol)?,
        })
    }

    pub fn is_single_valued(&self, tol: &ToleranceConfig) -> Result<bool> {
        Ok(self.mul(tol)?.is_zero())
    }

    /// Adjoint relation `T* ⊂ K ⊕ H`: the orthogonal complement of
    /// `{(f′, −f) : (f, f′) ∈ T}`.
    pub fn adjoint(&self) -> LinearRelation {
        let flipped = vstack(&self.output_block(), &(-self.input_block()));
        let flipped = Subspace::from_orthonormal(flipped);
        LinearRelation {
            dim_h: self.dim_k,
            dim_k: self.dim_h,
            graph: complement(&flipped),
        }
    }

    /// Inverse relation `{(f′, f) : (f, f′) ∈ T}`.
    pub fn inverse(&self) -> LinearRelation {
        let swapped = vstack(&self.output_block(), &self.input_block());
        LinearRelation {
            dim_h: self.dim_k,
            dim_k: self.dim_h,
            graph: Subspace::from_orthonormal(swapped),
        }
    }

    /// Orthogonal operator part `T_s = P T`, `P` the projector onto
    /// `(mul T)^⊥`, as a matrix on coordinates of `dom T`.
    pub fn operator_part(&self, tol: &ToleranceConfig) -> Result<OperatorOnSubspace> {
        let dom = self.dom(tol)?;
        let mul = self.mul(tol)?;
        let p = linalg::identity(self.dim_k) - mul.projector();
        let qh = self.input_block();
        let qk = self.output_block();
        let qh_pinv = linalg::pseudo_inverse(&qh, tol);
        // Kernel directions of Q_h must be sent into mul T by Q_k.
        let kernel_proj = linalg::identity(qh.ncols()) - &qh_pinv * &qh;
        let leak = linalg::op_norm(&(&p * &qk * kernel_proj));
        ensure("operator part is single-valued", leak, tol.subspace_eq_tol)?;
        let matrix = p * qk * qh_pinv * dom.basis();
        Ok(OperatorOnSubspace {
            domain: dom,
            codomain_dim: self.dim_k,
            matrix,
        })
    }

    /// `{(h, B f′) : (h, f′) ∈ T}`.
    pub fn apply_left(&self, b: &Matrix, tol: &ToleranceConfig) -> Result<LinearRelation> {
        if b.ncols() != self.dim_k {
            return Err(Error::DimensionMismatch {
                context: "apply_left",
                expected: self.dim_k,
                actual: b.ncols(),
            });
        }
        let gens = vstack(&self.input_block(), &(b * self.output_block()));
        let floor = linalg::op_norm(b).min(1.0);
        LinearRelation::with_floor(self.dim_h, b.nrows(), &gens, floor, tol)
    }

    /// `{(h, f′) : (h, f′) ∈ T, h ∈ sub}`.
    pub fn restrict_domain(&self, sub: &Subspace, tol: &ToleranceConfig) -> Result<LinearRelation> {
        if sub.ambient_dim() != self.dim_h {
            return Err(Error::DimensionMismatch {
                context: "restrict_domain",
                expected: self.dim_h,
                actual: sub.ambient_dim(),
            });
        }
        let cylinder = embed_blocks(
            &[sub.basis().clone(), Matrix::zeros(self.dim_k, sub.dim())],
            &[Matrix::zeros(self.dim_h, self.dim_k), linalg::identity(self.dim_k)],
        );
        let g = meet(&self.graph, &Subspace::from_orthonormal(cylinder), tol)?;
        Self::from_graph(self.dim_h, self.dim_k, g)
    }

    /// Graph inclusion residual `‖(I − P_other) Q_self‖`.
    pub fn inclusion_residual(&self, other: &LinearRelation) -> Result<f64> {
        self.check_same_shape(other, "relation inclusion")?;
        self.graph.inclusion_residual(&other.graph)
    }

    pub fn is_contained_in(&self, other: &LinearRelation, tol: &ToleranceConfig) -> Result<bool> {
        Ok(self.inclusion_residual(other)? <= tol.subspace_eq_tol)
    }

    pub fn gap(&self, other: &LinearRelation) -> Result<f64> {
        self.check_same_shape(other, "relation gap")?;
        gap(&self.graph, &other.graph)
    }

    pub fn equals(&self, other: &LinearRelation, tol: &ToleranceConfig) -> Result<bool> {
        Ok(self.gap(other)? <= tol.subspace_eq_tol)
    }

    fn check_same_shape(&self, other: &LinearRelation, context: &'static str) -> Result<()> {
        if (self.dim_h, self.dim_k) != (other.dim_h, other.dim_k) {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.dim_h + self.dim_k,
                actual: other.dim_h + other.dim_k,
            });
        }
        Ok(())
    }
}

/// Stacks column groups into one matrix: group `g` is placed with its row
/// blocks `blocks[g][0], blocks[g][1], …` one below the other.
fn embed_blocks(first: &[Matrix], second: &[Matrix]) -> Matrix {
    let a = first.iter().skip(1).fold(first[0].clone(), |acc, m| vstack(&acc, m));
    let b = second.iter().skip(1).fold(second[0].clone(), |acc, m| vstack(&acc, m));
    linalg::hstack(&a, &b)
}

/// Product `S T = {(h, g) : (h, k) ∈ T, (k, g) ∈ S}`, computed as the
/// projection of `(T ⊕ G) ∩ (H ⊕ S)` inside `H ⊕ K ⊕ G`.
pub fn compose(s: &LinearRelation, t: &LinearRelation, tol: &ToleranceConfig) -> Result<LinearRelation> {
    if t.dim_k != s.dim_h {
        return Err(Error::DimensionMismatch {
            context: "compose",
            expected: t.dim_k,
            actual: s.dim_h,
        });
    }
    let (h, k, g) = (t.dim_h, t.dim_k, s.dim_k);
    let gt = t.graph.basis();
    let gs = s.graph.basis();
    // (graph T) ⊕ G
    let x1 = embed_blocks(
        &[rows(gt, 0, h), rows(gt, h, k), Matrix::zeros(g, gt.ncols())],
        &[Matrix::zeros(h, g), Matrix::zeros(k, g), linalg::identity(g)],
    );
    // H ⊕ (graph S)
    let x2 = embed_blocks(
        &[linalg::identity(h), Matrix::zeros(k, h), Matrix::zeros(g, h)],
        &[Matrix::zeros(h, gs.ncols()), rows(gs, 0, k), rows(gs, k, g)],
    );
    let joint = meet(
        &Subspace::from_orthonormal(x1),
        &Subspace::from_orthonormal(x2),
        tol,
    )?;
    let jb = joint.basis();
    let gens = vstack(&rows(jb, 0, h), &rows(jb, h + k, g));
    LinearRelation::from_basis_rows(h, g, &gens, tol)
}

/// Operator-style sum `{(h, h₁′ + h₂′) : (h, h₁′) ∈ H₁, (h, h₂′) ∈ H₂}`.
///
/// Fails if the result violates `dom = dom H₁ ∩ dom H₂` or
/// `mul = mul H₁ + mul H₂`.
pub fn add_relations(
    h1: &LinearRelation,
    h2: &LinearRelation,
    tol: &ToleranceConfig,
) -> Result<LinearRelation> {
    h1.check_same_shape(h2, "add_relations")?;
    let (n, m) = (h1.dim_h, h1.dim_k);
    let g1 = h1.graph.basis();
    let g2 = h2.graph.basis();
    // Inside H ⊕ K ⊕ K: {(h, a, b) : (h, a) ∈ H₁} and {(h, a, b) : (h, b) ∈ H₂}.
    let x1 = embed_blocks(
        &[rows(g1, 0, n), rows(g1, n, m), Matrix::zeros(m, g1.ncols())],
        &[Matrix::zeros(n, m), Matrix::zeros(m, m), linalg::identity(m)],
    );
    let x2 = embed_blocks(
        &[rows(g2, 0, n), Matrix::zeros(m, g2.ncols()), rows(g2, n, m)],
        &[Matrix::zeros(n, m), linalg::identity(m), Matrix::zeros(m, m)],
    );
    let joint = meet(
        &Subspace::from_orthonormal(x1),
        &Subspace::from_orthonormal(x2),
        tol,
    )?;
    let jb = joint.basis();
    let gens = vstack(&rows(jb, 0, n), &(rows(jb, n, m) + rows(jb, n + m, m)));
    let sum = LinearRelation::from_basis_rows(n, m, &gens, tol)?;

    let dom_expected = meet(&h1.dom(tol)?, &h2.dom(tol)?, tol)?;
    ensure(
        "dom(H1+H2) = dom H1 ∩ dom H2",
        gap(&sum.dom(tol)?, &dom_expected)?,
        tol.subspace_eq_tol,
    )?;
    let mul_expected = join(&h1.mul(tol)?, &h2.mul(tol)?, tol)?;
    ensure(
        "mul(H1+H2) = mul H1 + mul H2",
        gap(&sum.mul(tol)?, &mul_expected)?,
        tol.subspace_eq_tol,
    )?;
    Ok(sum)
}

impl OperatorOnSubspace {
    pub fn new(domain: Subspace, matrix: Matrix) -> Result<Self> {
        if matrix.ncols() != domain.dim() {
            return Err(Error::DimensionMismatch {
                context: "operator on subspace",
                expected: domain.dim(),
                actual: matrix.ncols(),
            });
        }
        Ok(OperatorOnSubspace {
            codomain_dim: matrix.nrows(),
            domain,
            matrix,
        })
    }

    pub fn to_relation(&self, tol: &ToleranceConfig) -> Result<LinearRelation> {
        let gens = vstack(self.domain.basis(), &self.matrix);
        LinearRelation::new(self.domain.ambient_dim(), self.codomain_dim, &gens, tol)
    }

    /// The same operator with its matrix expressed in ambient coordinates,
    /// i.e. `matrix · basisᴴ` (zero on the complement of the domain).
    pub fn ambient_matrix(&self) -> Matrix {
        &self.matrix * self.domain.basis().adjoint()
    }

    /// Compresses the codomain onto a subspace, returning the operator into
    /// that subspace's coordinates.
    pub fn into_coordinates_of(&self, target: &Subspace) -> Result<OperatorOnSubspace> {
        if target.ambient_dim() != self.codomain_dim {
            return Err(Error::DimensionMismatch {
                context: "into_coordinates_of",
                expected: self.codomain_dim,
                actual: target.ambient_dim(),
            });
        }
        Ok(OperatorOnSubspace {
            domain: self.domain.clone(),
            codomain_dim: target.dim(),
            matrix: target.basis().adjoint() * &self.matrix,
        })
    }

    /// Restriction to a subspace of the domain, in the coordinates of `sub`.
    pub fn restrict(&self, sub: &Subspace, tol: &ToleranceConfig) -> Result<OperatorOnSubspace> {
        let residual = sub.inclusion_residual(&self.domain)?;
        if residual > tol.subspace_eq_tol {
            return Err(Error::Inadmissible(format!(
                "restriction domain leaves the operator domain (residual {residual:.3e})"
            )));
        }
        let change = self.domain.basis().adjoint() * sub.basis();
        Ok(OperatorOnSubspace {
            domain: sub.clone(),
            codomain_dim: self.codomain_dim,
            matrix: &self.matrix * change,
        })
    }

    /// Left multiplication by a matrix acting on the codomain.
    pub fn then(&self, b: &Matrix) -> OperatorOnSubspace {
        OperatorOnSubspace {
            domain: self.domain.clone(),
            codomain_dim: b.nrows(),
            matrix: b * &self.matrix,
        }
    }
}

/// Identity on a subspace, as an operator into the ambient space.
pub fn inclusion_operator(s: &Subspace) -> OperatorOnSubspace {
    OperatorOnSubspace {
        domain: s.clone(),
        codomain_dim: s.ambient_dim(),
        matrix: s.basis().clone(),
    }
}

/// Range of an operator as a subspace of its codomain. Singular values are
/// measured against `max(‖op‖, 1)`, so an operator that is zero up to
/// rounding has range `{0}`.
pub fn range_of(op: &OperatorOnSubspace, tol: &ToleranceConfig) -> Result<Subspace> {
    orthonormalize_with_floor(&op.matrix, 1.0, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, real_matrix, I, ONE, ZERO};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn scalar(re: f64, im: f64) -> LinearRelation {
        LinearRelation::graph_of(&Matrix::from_element(1, 1, c(re, im)), &tol()).unwrap()
    }

    /// T = span{(1, (1, 0)), (0, (0, 1))} from C to C².
    fn pinned() -> LinearRelation {
        let gens = real_matrix(3, 2, &[1.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
        LinearRelation::new(1, 2, &gens, &tol()).unwrap()
    }

    #[test]
    fn make_relation_examples() {
        let t = LinearRelation::new(1, 1, &real_matrix(2, 1, &[1.0, 2.0]), &tol()).unwrap();
        assert!(t.gap(&scalar(2.0, 0.0)).unwrap() < 1e-14);
        let z = LinearRelation::new(2, 2, &Matrix::zeros(4, 0), &tol()).unwrap();
        assert_eq!(z.graph().dim(), 0);
        assert!(LinearRelation::new(1, 2, &Matrix::zeros(2, 1), &tol()).is_err());
    }

    #[test]
    fn parts_of_scalar_and_pinned() {
        let p = scalar(2.0, 0.0).parts(&tol()).unwrap();
        assert_eq!((p.dom.dim(), p.ran.dim(), p.ker.dim(), p.mul.dim()), (1, 1, 0, 0));

        let p = pinned().parts(&tol()).unwrap();
        assert_eq!((p.dom.dim(), p.ran.dim(), p.ker.dim(), p.mul.dim()), (1, 2, 0, 1));
        assert!(gap(&p.mul, &Subspace::coordinate(2, &[1])).unwrap() < 1e-14);

        let p = LinearRelation::purely_multivalued(1, 1).parts(&tol()).unwrap();
        assert_eq!((p.dom.dim(), p.mul.dim()), (0, 1));
    }

    #[test]
    fn adjoint_examples() {
        assert!(scalar(2.0, 0.0).adjoint().gap(&scalar(2.0, 0.0)).unwrap() < 1e-14);
        // complex scalar: adjoint is the conjugate
        assert!(scalar(1.0, 3.0).adjoint().gap(&scalar(1.0, -3.0)).unwrap() < 1e-14);

        // pinned T* = {((k, 0), k)}
        let expected = LinearRelation::new(2, 1, &real_matrix(3, 1, &[1.0, 0.0, 1.0]), &tol()).unwrap();
        assert!(pinned().adjoint().gap(&expected).unwrap() < 1e-14);

        let adj = LinearRelation::purely_multivalued(2, 3).adjoint();
        assert_eq!((adj.dim_h(), adj.dim_k()), (3, 2));
        assert_eq!(adj.dom(&tol()).unwrap().dim(), 0);
        assert!(adj.gap(&LinearRelation::purely_multivalued(3, 2)).unwrap() < 1e-14);
    }

    #[test]
    fn operator_part_examples() {
        let op = scalar(2.0, 0.0).operator_part(&tol()).unwrap();
        assert!((op.ambient_matrix()[(0, 0)] - c(2.0, 0.0)).norm() < 1e-14);

        let op = pinned().operator_part(&tol()).unwrap();
        let amb = op.ambient_matrix();
        assert!((amb[(0, 0)] - ONE).norm() < 1e-14 && amb[(1, 0)].norm() < 1e-14);

        let op = LinearRelation::purely_multivalued(1, 2).operator_part(&tol()).unwrap();
        assert_eq!(op.domain.dim(), 0);
        assert_eq!(op.matrix.shape(), (2, 0));
    }

    #[test]
    fn operator_part_is_contained_in_relation() {
        let t = pinned();
        let ts = t.operator_part(&tol()).unwrap().to_relation(&tol()).unwrap();
        assert!(ts.is_contained_in(&t, &tol()).unwrap());
        assert!(!t.is_contained_in(&ts, &tol()).unwrap());
    }

    #[test]
    fn compose_examples() {
        let six = compose(&scalar(3.0, 0.0), &scalar(2.0, 0.0), &tol()).unwrap();
        assert!(six.gap(&scalar(6.0, 0.0)).unwrap() < 1e-13);

        // T*T for the pinned instance: φ = (h, y); (φ, h') ∈ T* forces y = 0, h' = h.
        let t = pinned();
        let tt = compose(&t.adjoint(), &t, &tol()).unwrap();
        assert!(tt.gap(&scalar(1.0, 0.0)).unwrap() < 1e-13);

        let z = compose(&scalar(5.0, 0.0), &LinearRelation::zero_relation(1, 1), &tol()).unwrap();
        assert_eq!(z.dom(&tol()).unwrap().dim(), 0);
        assert!(compose(&t, &t, &tol()).is_err());
    }

    #[test]
    fn add_relations_examples() {
        let three = add_relations(&scalar(1.0, 0.0), &scalar(2.0, 0.0), &tol()).unwrap();
        assert!(three.gap(&scalar(3.0, 0.0)).unwrap() < 1e-13);

        // {((x,0),(x,m))} + identity = {((x,0),(2x,m))}
        let h1 = LinearRelation::new(2, 2, &real_matrix(4, 2, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0]), &tol()).unwrap();
        let sum = add_relations(&h1, &LinearRelation::identity(2), &tol()).unwrap();
        let expected = LinearRelation::new(2, 2, &real_matrix(4, 2, &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 1.0]), &tol()).unwrap();
        assert!(sum.gap(&expected).unwrap() < 1e-13);

        let h = scalar(0.5, 0.25);
        let same = add_relations(&h, &LinearRelation::graph_of(&Matrix::zeros(1, 1), &tol()).unwrap(), &tol()).unwrap();
        assert!(same.gap(&h).unwrap() < 1e-13);
    }

    #[test]
    fn apply_left_examples() {
        let t = pinned();
        let unchanged = t.apply_left(&linalg::identity(2), &tol()).unwrap();
        assert!(unchanged.gap(&t).unwrap() < 1e-14);

        let killed = t.apply_left(&Matrix::zeros(2, 2), &tol()).unwrap();
        assert!(killed.gap(&LinearRelation::graph_of(&Matrix::zeros(2, 1), &tol()).unwrap()).unwrap() < 1e-14);

        let b = real_matrix(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let ib = linalg::identity(2) + b * I;
        let applied = t.apply_left(&ib, &tol()).unwrap();
        let gens = Matrix::from_row_slice(3, 2, &[ONE, ZERO, c(1.0, 1.0), I, I, c(1.0, 1.0)]);
        let expected = LinearRelation::new(1, 2, &gens, &tol()).unwrap();
        assert!(applied.gap(&expected).unwrap() < 1e-13);
        let via_compose = compose(&LinearRelation::graph_of(&ib, &tol()).unwrap(), &t, &tol()).unwrap();
        assert!(applied.gap(&via_compose).unwrap() < 1e-13);
    }

    #[test]
    fn inclusion_examples() {
        let t = pinned();
        assert!(t.is_contained_in(&t, &tol()).unwrap());
        assert!(!scalar(2.0, 0.0).is_contained_in(&scalar(3.0, 0.0), &tol()).unwrap());
        assert!(t.is_contained_in(&scalar(1.0, 0.0), &tol()).is_err());
    }

    #[test]
    fn restrict_domain_keeps_multivalued_part() {
        let t = LinearRelation::new(2, 2, &real_matrix(4, 3, &[
            1.0, 0.0, 0.0,
            0.0, 1.0, 0.0,
            2.0, 0.0, 0.0,
            0.0, 3.0, 1.0,
        ]), &tol()).unwrap();
        let r = t.restrict_domain(&Subspace::coordinate(2, &[0]), &tol()).unwrap();
        assert_eq!(r.dom(&tol()).unwrap().dim(), 1);
        assert_eq!(r.mul(&tol()).unwrap().dim(), 1);
        assert!(r.is_contained_in(&t, &tol()).unwrap());
    }
}
