//! Seeded random instances. Every generator is a pure function of its
//! arguments and the state of the supplied RNG.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use sectorial_core::linalg::{self, c, hstack, vstack};
use sectorial_core::subspace::{complement, orthonormalize};
use sectorial_core::{Matrix, ToleranceConfig};

use crate::instance::{
    to_json_columns, to_json_matrix, Dims, FormSpec, InstanceDocument, InstanceError, Kind, Payload, SummandSpec,
    MAX_DIM,
};

/// Seed of trial `i` in a run with base seed `seed`.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed ^ (trial as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

/// Complex Gaussian matrix with independent standard normal parts.
pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| {
        c(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// `(X + Xᴴ)/2` rescaled to operator norm `norm`.
pub fn hermitian(rng: &mut ChaCha8Rng, n: usize, norm: f64) -> Matrix {
    let h = linalg::hermitian_part(&gaussian(rng, n, n));
    let s = linalg::op_norm(&h);
    if s == 0.0 {
        h
    } else {
        h * c(norm / s, 0.0)
    }
}

fn orthonormal_columns(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Matrix {
    orthonormalize(&gaussian(rng, n, d), &tol())
        .expect("finite Gaussian input")
        .basis()
        .clone()
}

fn check_dim(d: usize, name: &str) -> Result<(), InstanceError> {
    if d == 0 || d > MAX_DIM {
        return Err(InstanceError::Invalid {
            path: name.into(),
            message: format!("must lie in 1..={MAX_DIM}, got {d}"),
        });
    }
    Ok(())
}

fn tbt_document(dim_h: usize, dim_k: usize, gens: &Matrix, b: &Matrix, expect: Option<bool>, seed: Option<u64>) -> InstanceDocument {
    InstanceDocument {
        kind: Kind::Tbt,
        dims: Dims {
            dim_h: Some(dim_h),
            dim_k: Some(dim_k),
            n: None,
        },
        payload: Payload {
            generators: Some(to_json_columns(gens)),
            b: Some(to_json_matrix(b)),
            expect_invariant: expect,
            ..Payload::default()
        },
        tolerances: None,
        seed,
    }
}

/// `T` spanned by an orthonormalized complex Gaussian `graph_dim`-frame of
/// `C^{dim_h} ⊕ C^{dim_k}`, and `B` Hermitian with `‖B‖ = norm_cap`.
pub fn random_tbt(rng: &mut ChaCha8Rng, dim_h: usize, dim_k: usize, graph_dim: usize, norm_cap: f64) -> InstanceDocument {
    let gens = orthonormal_columns(rng, dim_h + dim_k, graph_dim);
    let b = hermitian(rng, dim_k, norm_cap);
    tbt_document(dim_h, dim_k, &gens, &b, None, None)
}

/// A `T` with `1 ≤ dim mul T ≤ dim_k − 1` and `B` either reduced by `mul T`
/// (`invariant = true`) or generic. Needs `dim_k ≥ 2`.
pub fn random_invariance_tbt(
    rng: &mut ChaCha8Rng,
    dim_h: usize,
    dim_k: usize,
    norm_cap: f64,
    invariant: bool,
) -> InstanceDocument {
    assert!(dim_k >= 2, "invariance instances need dim_k >= 2");
    let m = rng.random_range(1..dim_k);
    let d = rng.random_range(0..=dim_h);
    let u = orthonormal_columns(rng, dim_h, d);
    let a = gaussian(rng, dim_k, dim_h);
    let mul = orthonormal_columns(rng, dim_k, m);
    let gens = hstack(&vstack(&u, &(&a * &u)), &vstack(&Matrix::zeros(dim_h, m), &mul));
    let gens = orthonormalize(&gens, &tol()).expect("finite input").basis().clone();
    let mut b = hermitian(rng, dim_k, 1.0);
    if invariant {
        let q = &mul * mul.adjoint();
        let p = complement(&orthonormalize(&mul, &tol()).expect("finite input")).projector();
        b = &p * &b * &p + &q * &b * &q;
    }
    let s = linalg::op_norm(&b);
    let b = linalg::hermitian_part(&(b * c(norm_cap / s, 0.0)));
    tbt_document(dim_h, dim_k, &gens, &b, Some(invariant), None)
}

/// A maximal sectorial relation in `C^n` as a form on a random domain:
/// `M = S² + i·SGS` with `S = Y diag(σ) Yᴴ`. The domain is a proper
/// subspace (nontrivial `mul`) and `S` is rank deficient each with
/// probability about one half.
pub fn random_sectorial(rng: &mut ChaCha8Rng, n: usize) -> SummandSpec {
    let d = if rng.random_bool(0.5) { n } else { rng.random_range(0..n) };
    let domain = orthonormal_columns(rng, n, d);
    let r = if d == 0 || rng.random_bool(0.5) { d } else { rng.random_range(0..d) };
    let y = orthonormal_columns(rng, d, r);
    let sigma: Vec<f64> = (0..r).map(|_| rng.random_range(0.2..2.0)).collect();
    let s = &y * linalg::diag_real(&sigma) * y.adjoint();
    let norm = rng.random_range(0.0..3.0);
    let g = hermitian(rng, d, norm);
    let m = &s * &s + &s * g * &s * c(0.0, 1.0);
    let as_graph = rng.random_bool(0.5);
    let form = FormSpec {
        domain: to_json_columns(&domain),
        matrix: to_json_matrix(&m),
    };
    if !as_graph {
        return SummandSpec::Form(form);
    }
    // the same relation through its graph: (u, Mu) on the domain plus mul = domain^⊥
    let perp = complement(&orthonormalize(&domain, &tol()).expect("finite input"));
    let q = perp.basis();
    // t[u, v] = (h′, v) for v in the domain forces Uᴴh′ = M a when u = U a
    let image = &domain * &m;
    let gens = hstack(
        &vstack(&domain, &image),
        &vstack(&Matrix::zeros(n, q.ncols()), q),
    );
    SummandSpec::Graph(to_json_columns(&gens))
}

fn relation_document(kind: Kind, n: usize, payload: Payload) -> InstanceDocument {
    InstanceDocument {
        kind,
        dims: Dims {
            dim_h: None,
            dim_k: None,
            n: Some(n),
        },
        payload,
        tolerances: None,
        seed: None,
    }
}

pub fn random_sum(rng: &mut ChaCha8Rng, n: usize) -> InstanceDocument {
    let s1 = random_sectorial(rng, n);
    let s2 = random_sectorial(rng, n);
    relation_document(
        Kind::Sum,
        n,
        Payload {
            summands: Some(vec![s1, s2]),
            ..Payload::default()
        },
    )
}

pub fn random_relation(rng: &mut ChaCha8Rng, n: usize) -> InstanceDocument {
    let s = random_sectorial(rng, n);
    relation_document(
        Kind::Relation,
        n,
        Payload {
            relation: Some(s),
            ..Payload::default()
        },
    )
}

/// Deterministic instance of the given kind. For `sum` and `relation` the
/// ambient dimension is `dim_h`; `dim_k`, `graph_dim` and `norm_cap` only
/// affect `tbt`.
pub fn random_instance(
    kind: Kind,
    dim_h: usize,
    dim_k: usize,
    graph_dim: usize,
    norm_cap: f64,
    seed: u64,
) -> Result<InstanceDocument, InstanceError> {
    check_dim(dim_h, "dim_h")?;
    let mut r = rng(seed);
    let mut doc = match kind {
        Kind::Tbt => {
            check_dim(dim_k, "dim_k")?;
            if graph_dim > dim_h + dim_k {
                return Err(InstanceError::Invalid {
                    path: "graph_dim".into(),
                    message: format!("must be at most dim_h + dim_k = {}", dim_h + dim_k),
                });
            }
            if !(norm_cap.is_finite() && norm_cap >= 0.0) {
                return Err(InstanceError::Invalid {
                    path: "norm_cap".into(),
                    message: format!("must be finite and nonnegative, got {norm_cap}"),
                });
            }
            random_tbt(&mut r, dim_h, dim_k, graph_dim, norm_cap)
        }
        Kind::Sum => random_sum(&mut r, dim_h),
        Kind::Relation => random_relation(&mut r, dim_h),
    };
    doc.seed = Some(seed);
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sectorial_core::forms::{form_of, is_maximal_sectorial, relation_of_form};
    use sectorial_core::relation::LinearRelation;

    #[test]
    fn hermitian_has_requested_norm() {
        let h = hermitian(&mut rng(1), 4, 2.5);
        assert!(linalg::hermitian_defect(&h) < 1e-14);
        assert!((linalg::op_norm(&h) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn invariance_instances_have_proper_mul() {
        for (seed, invariant) in [(1, true), (2, false), (3, true)] {
            let doc = random_invariance_tbt(&mut rng(seed), 3, 4, 5.0, invariant);
            let t = match doc.problem(&tol()).unwrap() {
                crate::instance::Problem::Tbt { t, .. } => t,
                _ => unreachable!(),
            };
            let m = t.mul(&tol()).unwrap().dim();
            assert!((1..4).contains(&m));
        }
    }

    #[test]
    fn sectorial_graph_encoding_matches_form() {
        let mut r = rng(4);
        for _ in 0..20 {
            if let SummandSpec::Graph(cols) = random_sectorial(&mut r, 3) {
                let g = Matrix::from_fn(6, cols.len(), |i, j| c(cols[j][i][0], cols[j][i][1]));
                let h = LinearRelation::new(3, 3, &g, &tol()).unwrap();
                assert!(is_maximal_sectorial(&h, &tol()).unwrap());
                let back = relation_of_form(&form_of(&h, &tol()).unwrap(), &tol()).unwrap();
                assert!(h.gap(&back).unwrap() < 1e-10);
            }
        }
    }
}
