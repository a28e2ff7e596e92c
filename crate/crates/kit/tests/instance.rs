use proptest::prelude::*;

use sectorial_core::forms::is_maximal_sectorial;
use sectorial_core::linalg::{self, c};
use sectorial_core::{LinearRelation, Matrix, ToleranceConfig};
use sectorial_kit::generate::{random_instance, rng, random_sectorial};
use sectorial_kit::instance::{instance_digest, Dims, Payload, SummandSpec};
use sectorial_kit::{parse_instance, serialize_instance, InstanceDocument, InstanceError, Kind, Problem};

const PINNED: &str = include_str!("data/pinned.json");
const SCALAR_SUM: &str = include_str!("data/scalar_sum.json");

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn scalar(re: f64, im: f64) -> LinearRelation {
    LinearRelation::graph_of(&Matrix::from_element(1, 1, c(re, im)), &tol()).unwrap()
}

fn error_path(e: InstanceError) -> String {
    match e {
        InstanceError::Schema { path, .. } | InstanceError::Invalid { path, .. } => path,
        InstanceError::Io(e) => panic!("unexpected i/o error {e}"),
    }
}

#[test]
fn pinned_document_parses_and_roundtrips() {
    let doc = parse_instance(PINNED).unwrap();
    assert_eq!(doc.dims.dim_h, Some(1));
    assert_eq!(doc.dims.dim_k, Some(2));
    let text = serialize_instance(&doc);
    let again = parse_instance(&text).unwrap();
    assert_eq!(again, doc);
    assert_eq!(serialize_instance(&again), text);
    let original: serde_json::Value = serde_json::from_str(PINNED).unwrap();
    let written: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(written, original);
}

#[test]
fn pinned_document_decodes_to_the_expected_relation() {
    let Problem::Tbt { t, b, expect_invariant } = parse_instance(PINNED).unwrap().problem(&tol()).unwrap() else {
        panic!("wrong kind");
    };
    assert_eq!(expect_invariant, None);
    assert_eq!((t.dim_h(), t.dim_k(), t.graph().dim()), (1, 2, 2));
    assert!((b - linalg::real_matrix(2, 2, &[1.0; 4])).norm() < 1e-15);
    let mul = t.mul(&tol()).unwrap();
    assert_eq!(mul.dim(), 1);
    assert!((mul.basis()[(1, 0)].norm() - 1.0).abs() < 1e-12);
}

#[test]
fn non_hermitian_b_names_the_b_path() {
    let text = PINNED.replace(
        "[[1.0, 0.0], [1.0, 0.0]],\n      [[1.0, 0.0], [1.0, 0.0]]",
        "[[1.0, 0.0], [2.0, 0.0]],\n      [[1.0, 0.0], [1.0, 0.0]]",
    );
    assert_ne!(text, PINNED);
    assert_eq!(error_path(parse_instance(&text).unwrap_err()), "payload.b");
}

#[test]
fn schema_errors_carry_their_path() {
    let cases = [
        (r#"{"kind":"tbt","dims":{"dim_h":1,"dim_k":1},"payload":{"b":[[[1,0,3]]]}}"#, "payload.b[0][0]"),
        (r#"{"kind":"matrix","dims":{},"payload":{}}"#, "kind"),
        (r#"{"kind":"tbt","dims":{"dim_h":1,"dim_k":1},"payload":{},"extra":1}"#, "extra"),
        (r#"{"kind":"sum","dims":{"n":1},"payload":{"summands":[{"graf":[]}]}}"#, "payload.summands[0]"),
    ];
    for (text, path) in cases {
        let e = parse_instance(text).unwrap_err();
        assert!(matches!(e, InstanceError::Schema { .. }), "{text}: {e}");
        assert_eq!(error_path(e), path, "{text}");
    }
}

#[test]
fn dimension_errors_carry_their_path() {
    let cases = [
        (r#"{"kind":"tbt","dims":{"dim_h":1,"dim_k":2},"payload":{"generators":[[[1,0],[0,0]]],"b":[[[1,0],[0,0]],[[0,0],[1,0]]]}}"#, "payload.generators[0]"),
        (r#"{"kind":"tbt","dims":{"dim_h":1,"dim_k":2},"payload":{"generators":[],"b":[[[1,0]]]}}"#, "payload.b"),
        (r#"{"kind":"tbt","dims":{"dim_h":0,"dim_k":2},"payload":{"generators":[],"b":[]}}"#, "dims.dim_h"),
        (r#"{"kind":"tbt","dims":{"dim_h":1,"dim_k":33},"payload":{"generators":[],"b":[]}}"#, "dims.dim_k"),
        (r#"{"kind":"tbt","dims":{"dim_h":1,"dim_k":1},"payload":{"b":[[[1,0]]]}}"#, "payload.generators"),
        (r#"{"kind":"sum","dims":{"n":1},"payload":{"summands":[{"graph":[[[1,0],[1,0]]]}]}}"#, "payload.summands"),
        (r#"{"kind":"sum","dims":{"n":1},"payload":{"summands":[{"graph":[[[1,0],[-1,0]]]},{"graph":[[[1,0],[1,0]]]}]}}"#, "payload.summands[0]"),
        (r#"{"kind":"sum","dims":{"n":1},"payload":{"summands":[{"graph":[[[1,0],[1,0]]]},{"form":{"domain":[[[1,0]],[[2,0]]],"matrix":[[[1,0],[0,0]],[[0,0],[1,0]]]}}]}}"#, "payload.summands[1].form.domain"),
        (r#"{"kind":"sum","dims":{"n":1},"payload":{"b":[],"summands":[]}}"#, "payload.b"),
        (r#"{"kind":"tbt","dims":{"dim_h":1,"dim_k":1},"payload":{"generators":[],"b":[[[1,0]]]},"tolerances":{"psd_tol":1.0}}"#, "tolerances"),
    ];
    for (text, path) in cases {
        let e = parse_instance(text).unwrap_err();
        assert!(matches!(e, InstanceError::Invalid { .. }), "{text}: {e}");
        assert_eq!(error_path(e), path, "{text}");
    }
}

#[test]
fn scalar_sum_parses_into_two_relations() {
    let Problem::Sum { h1, h2 } = parse_instance(SCALAR_SUM).unwrap().problem(&tol()).unwrap() else {
        panic!("wrong kind");
    };
    assert!(h1.gap(&scalar(2.0, 1.0)).unwrap() < 1e-14);
    // t[x, y] = (0.5 − 0.25i) x ȳ is the form of multiplication by 0.5 − 0.25i
    assert!(h2.gap(&scalar(0.5, -0.25)).unwrap() < 1e-14);
}

#[test]
fn form_matrix_is_read_in_the_given_generators() {
    // domain generator 2e₁: t[2a e₁, 2b e₁] = m a b̄ means multiplication by m/4
    let text = r#"{"kind":"relation","dims":{"n":1},"payload":{"relation":{"form":{"domain":[[[2,0]]],"matrix":[[[4,2]]]}}}}"#;
    let Problem::Relation { h } = parse_instance(text).unwrap().problem(&tol()).unwrap() else {
        panic!("wrong kind");
    };
    assert!(h.gap(&scalar(1.0, 0.5)).unwrap() < 1e-14);
}

#[test]
fn tolerance_overrides_apply() {
    let text = PINNED.replacen('{', r#"{"tolerances": {"subspace_eq_tol": 1e-6},"#, 1);
    let doc = parse_instance(&text).unwrap();
    let t = doc.tolerances(&tol()).unwrap();
    assert_eq!(t.subspace_eq_tol, 1e-6);
    assert_eq!(t.psd_tol, tol().psd_tol);
}

#[test]
fn random_instances_are_deterministic() {
    let a = random_instance(Kind::Tbt, 3, 4, 5, 2.0, 11).unwrap();
    let b = random_instance(Kind::Tbt, 3, 4, 5, 2.0, 11).unwrap();
    assert_eq!(serialize_instance(&a), serialize_instance(&b));
    let other = random_instance(Kind::Tbt, 3, 4, 5, 2.0, 12).unwrap();
    assert_ne!(instance_digest(&a), instance_digest(&other));
    for kind in [Kind::Sum, Kind::Relation] {
        let a = random_instance(kind, 4, 1, 0, 1.0, 5).unwrap();
        let b = random_instance(kind, 4, 1, 0, 1.0, 6).unwrap();
        assert_ne!(instance_digest(&a), instance_digest(&b));
    }
}

#[test]
fn random_tbt_respects_its_arguments() {
    let doc = random_instance(Kind::Tbt, 2, 3, 4, 7.5, 3).unwrap();
    let Problem::Tbt { t, b, .. } = doc.problem(&tol()).unwrap() else {
        panic!("wrong kind");
    };
    assert_eq!((t.dim_h(), t.dim_k(), t.graph().dim()), (2, 3, 4));
    assert!((linalg::op_norm(&b) - 7.5).abs() < 1e-12);
    assert!(t.mul(&tol()).unwrap().dim() >= 2);
}

#[test]
fn random_instance_rejects_bad_dims() {
    assert!(random_instance(Kind::Tbt, 0, 1, 1, 1.0, 0).is_err());
    assert!(random_instance(Kind::Tbt, 1, 33, 1, 1.0, 0).is_err());
    assert!(random_instance(Kind::Tbt, 1, 1, 3, 1.0, 0).is_err());
    assert!(random_instance(Kind::Tbt, 1, 1, 1, f64::NAN, 0).is_err());
    assert!(random_instance(Kind::Sum, 33, 1, 0, 1.0, 0).is_err());
}

#[test]
fn sum_n4_seed7_gives_maximal_sectorial_summands() {
    let doc = random_instance(Kind::Sum, 4, 1, 0, 1.0, 7).unwrap();
    let Problem::Sum { h1, h2 } = doc.problem(&tol()).unwrap() else {
        panic!("wrong kind");
    };
    for h in [h1, h2] {
        assert_eq!(h.dim_h(), 4);
        assert!(is_maximal_sectorial(&h, &tol()).unwrap());
    }
}

#[test]
fn graph_and_form_encodings_agree() {
    let mut r = rng(21);
    let mut seen = (false, false);
    for _ in 0..40 {
        let spec = random_sectorial(&mut r, 3);
        let doc = InstanceDocument {
            kind: Kind::Relation,
            dims: Dims {
                n: Some(3),
                ..Dims::default()
            },
            payload: Payload {
                relation: Some(spec.clone()),
                ..Payload::default()
            },
            tolerances: None,
            seed: None,
        };
        let Problem::Relation { h } = doc.problem(&tol()).unwrap() else {
            panic!("wrong kind");
        };
        let as_form = match spec {
            SummandSpec::Form(_) => {
                seen.0 = true;
                continue;
            }
            SummandSpec::Graph(_) => {
                seen.1 = true;
                sectorial_core::forms::relation_of_form(&sectorial_core::forms::form_of(&h, &tol()).unwrap(), &tol()).unwrap()
            }
        };
        assert!(h.gap(&as_form).unwrap() < 1e-10);
    }
    assert!(seen.0 && seen.1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialization_roundtrip_is_exact(seed in any::<u64>(), h in 1usize..6, k in 1usize..6, kind in 0usize..3) {
        let kind = [Kind::Tbt, Kind::Sum, Kind::Relation][kind];
        let g = (seed as usize) % (h + k + 1);
        let doc = random_instance(kind, h, k, g, 3.0, seed).unwrap();
        let text = serialize_instance(&doc);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(serialize_instance(&back), text);
        prop_assert_eq!(instance_digest(&back), instance_digest(&doc));
    }
}
