#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sectorial_core::forms::relation_of_form;
use sectorial_core::linalg::{self, c, Matrix};
use sectorial_core::subspace::orthonormalize;
use sectorial_core::{LinearRelation, SesquilinearForm, Subspace, ToleranceConfig};

pub fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| {
        c(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

pub fn hermitian(rng: &mut ChaCha8Rng, n: usize, norm: f64) -> Matrix {
    let x = gaussian(rng, n, n);
    let h = linalg::hermitian_part(&x);
    let s = linalg::op_norm(&h);
    if s == 0.0 {
        h
    } else {
        h * c(norm / s, 0.0)
    }
}

pub fn subspace(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Subspace {
    orthonormalize(&gaussian(rng, n, dim), &tol()).unwrap()
}

pub fn relation(rng: &mut ChaCha8Rng, h: usize, k: usize, dim: usize) -> LinearRelation {
    LinearRelation::new(h, k, &gaussian(rng, h + k, dim), &tol()).unwrap()
}

/// A maximal sectorial relation in `C^n` with a random form domain, a real
/// part of random (possibly deficient) rank and `M_i = S G S`.
pub fn sectorial(rng: &mut ChaCha8Rng, n: usize) -> LinearRelation {
    let d = rng.random_range(0..=n);
    let domain = subspace(rng, n, d);
    let r = if d == 0 { 0 } else { rng.random_range(0..=d) };
    let y = orthonormalize(&gaussian(rng, d, r), &tol()).unwrap();
    let sigma: Vec<f64> = (0..y.dim()).map(|_| rng.random_range(0.2..2.0)).collect();
    let s = y.basis() * linalg::diag_real(&sigma) * y.basis().adjoint();
    let norm = rng.random_range(0.0..3.0);
    let g = hermitian(rng, d, norm);
    let m = &s * &s + &s * g * &s * c(0.0, 1.0);
    relation_of_form(&SesquilinearForm::new(domain, m).unwrap(), &tol()).unwrap()
}
