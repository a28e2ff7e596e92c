//! JSON instance documents: schema, parsing, serialization and conversion
//! into module inputs.
//!
//! Complex scalars are `[re, im]`, matrices are arrays of rows and generator
//! lists are arrays of column vectors.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use sectorial_core::forms::{is_maximal_sectorial, relation_of_form};
use sectorial_core::linalg::{self, c};
use sectorial_core::subspace::orthonormalize;
use sectorial_core::{LinearRelation, Matrix, SesquilinearForm, ToleranceConfig};

pub const MAX_DIM: usize = 32;

pub type Complex = [f64; 2];
pub type JsonVector = Vec<Complex>;
pub type JsonMatrix = Vec<Vec<Complex>>;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("invalid instance at `{path}`: {message}")]
    Invalid { path: String, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> InstanceError {
    InstanceError::Invalid {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Tbt,
    Sum,
    /// A single maximal sectorial relation, used by the second-representation suite.
    Relation,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Tbt => "tbt",
            Kind::Sum => "sum",
            Kind::Relation => "relation",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dims {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_h: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

/// A sectorial relation given either by graph generators or by a form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum SummandSpec {
    Graph(Vec<JsonVector>),
    Form(FormSpec),
}

/// `t[Σaᵢuᵢ, Σbⱼuⱼ] = bᴴ M a` for the listed domain generators `uᵢ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSpec {
    pub domain: Vec<JsonVector>,
    pub matrix: JsonMatrix,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Payload {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<JsonVector>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<JsonMatrix>,
    /// When present, the invariance conditions are checked too and must all
    /// hold (`true`) or all fail (`false`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_invariant: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summands: Option<Vec<SummandSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<SummandSpec>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace_eq_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psd_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hermitian_tol: Option<f64>,
}

impl ToleranceOverrides {
    pub fn apply(&self, base: ToleranceConfig) -> ToleranceConfig {
        ToleranceConfig {
            rank_rel_tol: self.rank_rel_tol.unwrap_or(base.rank_rel_tol),
            subspace_eq_tol: self.subspace_eq_tol.unwrap_or(base.subspace_eq_tol),
            psd_tol: self.psd_tol.unwrap_or(base.psd_tol),
            hermitian_tol: self.hermitian_tol.unwrap_or(base.hermitian_tol),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub kind: Kind,
    pub dims: Dims,
    pub payload: Payload,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Module inputs decoded from a document.
#[derive(Debug, Clone)]
pub enum Problem {
    Tbt {
        t: LinearRelation,
        b: Matrix,
        expect_invariant: Option<bool>,
    },
    Sum {
        h1: LinearRelation,
        h2: LinearRelation,
    },
    Relation {
        h: LinearRelation,
    },
}

/// Parses and validates a document. Every returned document converts into a
/// [`Problem`] under its own tolerances.
pub fn parse_instance(text: &str) -> Result<InstanceDocument, InstanceError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: InstanceDocument = serde_path_to_error::deserialize(de).map_err(|e| InstanceError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    doc.problem(&ToleranceConfig::default())?;
    Ok(doc)
}

/// Compact canonical JSON; `parse_instance(serialize_instance(d)) == d`.
pub fn serialize_instance(doc: &InstanceDocument) -> String {
    serde_json::to_string(doc).expect("instance documents always serialize")
}

/// Hex SHA-256 of the canonical serialization.
pub fn instance_digest(doc: &InstanceDocument) -> String {
    hex(&Sha256::digest(serialize_instance(doc).as_bytes()))
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn to_json_matrix(m: &Matrix) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Columns of `m` as generator vectors.
pub fn to_json_columns(m: &Matrix) -> Vec<JsonVector> {
    (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn check_finite(entries: &[Complex], path: &str) -> Result<(), InstanceError> {
    if entries.iter().flatten().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(invalid(path, "non-finite entry"))
    }
}

fn columns_to_matrix(cols: &[JsonVector], len: usize, path: &str) -> Result<Matrix, InstanceError> {
    for (j, v) in cols.iter().enumerate() {
        let p = format!("{path}[{j}]");
        if v.len() != len {
            return Err(invalid(p, format!("expected {len} entries, got {}", v.len())));
        }
        check_finite(v, &p)?;
    }
    Ok(Matrix::from_fn(len, cols.len(), |i, j| c(cols[j][i][0], cols[j][i][1])))
}

fn rows_to_matrix(rows: &[Vec<Complex>], n: usize, path: &str) -> Result<Matrix, InstanceError> {
    if rows.len() != n {
        return Err(invalid(path, format!("expected {n} rows, got {}", rows.len())));
    }
    for (i, r) in rows.iter().enumerate() {
        let p = format!("{path}[{i}]");
        if r.len() != n {
            return Err(invalid(p, format!("expected {n} entries, got {}", r.len())));
        }
        check_finite(r, &p)?;
    }
    Ok(Matrix::from_fn(n, n, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

fn dim(value: Option<usize>, path: &str, allow_zero: bool) -> Result<usize, InstanceError> {
    let d = value.ok_or_else(|| invalid(path, "missing"))?;
    let lo = usize::from(!allow_zero);
    if d < lo || d > MAX_DIM {
        return Err(invalid(path, format!("must lie in {lo}..={MAX_DIM}, got {d}")));
    }
    Ok(d)
}

fn summand(spec: &SummandSpec, n: usize, path: &str, tol: &ToleranceConfig) -> Result<LinearRelation, InstanceError> {
    let core = |e: sectorial_core::Error| invalid(path, e.to_string());
    let h = match spec {
        SummandSpec::Graph(gens) => {
            let g = columns_to_matrix(gens, 2 * n, &format!("{path}.graph"))?;
            LinearRelation::new(n, n, &g, tol).map_err(core)?
        }
        SummandSpec::Form(f) => {
            let x = columns_to_matrix(&f.domain, n, &format!("{path}.form.domain"))?;
            let m = rows_to_matrix(&f.matrix, x.ncols(), &format!("{path}.form.matrix"))?;
            let u = orthonormalize(&x, tol).map_err(core)?;
            if u.dim() != x.ncols() {
                return Err(invalid(format!("{path}.form.domain"), "generators are linearly dependent"));
            }
            // coordinates of the orthonormal basis with respect to the generators
            let r = linalg::pseudo_inverse(&x, tol) * u.basis();
            let form = SesquilinearForm::new(u, r.adjoint() * m * r).map_err(core)?;
            relation_of_form(&form, tol).map_err(core)?
        }
    };
    if !is_maximal_sectorial(&h, tol).map_err(core)? {
        return Err(invalid(path, "relation is not maximal sectorial"));
    }
    Ok(h)
}

impl InstanceDocument {
    /// The document's tolerances layered over `base`.
    pub fn tolerances(&self, base: &ToleranceConfig) -> Result<ToleranceConfig, InstanceError> {
        let tol = self.tolerances.unwrap_or_default().apply(*base);
        tol.validate().map_err(|e| invalid("tolerances", e.to_string()))?;
        Ok(tol)
    }

    /// Decodes the payload into module inputs, enforcing dimensions,
    /// hermiticity of `B` and sectoriality of summands.
    pub fn problem(&self, base: &ToleranceConfig) -> Result<Problem, InstanceError> {
        let tol = self.tolerances(base)?;
        let p = &self.payload;
        let stray = |present: bool, field: &str| {
            if present {
                Err(invalid(format!("payload.{field}"), format!("not allowed for kind `{}`", self.kind.as_str())))
            } else {
                Ok(())
            }
        };
        match self.kind {
            Kind::Tbt => {
                stray(p.summands.is_some(), "summands")?;
                stray(p.relation.is_some(), "relation")?;
                stray(self.dims.n.is_some(), "n").map_err(|_| invalid("dims.n", "not allowed for kind `tbt`"))?;
                let h = dim(self.dims.dim_h, "dims.dim_h", false)?;
                let k = dim(self.dims.dim_k, "dims.dim_k", false)?;
                let gens = p.generators.as_ref().ok_or_else(|| invalid("payload.generators", "missing"))?;
                let g = columns_to_matrix(gens, h + k, "payload.generators")?;
                let b = p.b.as_ref().ok_or_else(|| invalid("payload.b", "missing"))?;
                let b = rows_to_matrix(b, k, "payload.b")?;
                let defect = linalg::hermitian_defect(&b);
                if defect > tol.hermitian_tol * linalg::op_norm(&b).max(1.0) {
                    return Err(invalid("payload.b", format!("not Hermitian (asymmetry {defect:.3e})")));
                }
                let b = linalg::hermitian_part(&b);
                let t = LinearRelation::new(h, k, &g, &tol).map_err(|e| invalid("payload.generators", e.to_string()))?;
                Ok(Problem::Tbt {
                    t,
                    b,
                    expect_invariant: p.expect_invariant,
                })
            }
            Kind::Sum | Kind::Relation => {
                stray(p.generators.is_some(), "generators")?;
                stray(p.b.is_some(), "b")?;
                stray(p.expect_invariant.is_some(), "expect_invariant")?;
                if self.dims.dim_h.is_some() || self.dims.dim_k.is_some() {
                    return Err(invalid("dims", format!("kind `{}` takes only `n`", self.kind.as_str())));
                }
                let n = dim(self.dims.n, "dims.n", false)?;
                if self.kind == Kind::Sum {
                    stray(p.relation.is_some(), "relation")?;
                    let s = p.summands.as_ref().ok_or_else(|| invalid("payload.summands", "missing"))?;
                    if s.len() != 2 {
                        return Err(invalid("payload.summands", format!("expected 2 summands, got {}", s.len())));
                    }
                    Ok(Problem::Sum {
                        h1: summand(&s[0], n, "payload.summands[0]", &tol)?,
                        h2: summand(&s[1], n, "payload.summands[1]", &tol)?,
                    })
                } else {
                    stray(p.summands.is_some(), "summands")?;
                    let s = p.relation.as_ref().ok_or_else(|| invalid("payload.relation", "missing"))?;
                    Ok(Problem::Relation {
                        h: summand(s, n, "payload.relation", &tol)?,
                    })
                }
            }
        }
    }
}
