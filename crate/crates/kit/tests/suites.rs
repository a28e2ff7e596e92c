use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use sectorial_core::ToleranceConfig;
use sectorial_kit::generate::trial_seed;
use sectorial_kit::instance::{instance_digest, Dims, Payload, SummandSpec};
use sectorial_kit::report::aggregate;
use sectorial_kit::suites::{build_report, run_trials};
use sectorial_kit::{
    parse_instance, run_suite, verify_document, CheckRecord, InstanceDocument, Kind, Suite, SuiteError,
    SuiteRegistry, Verdict,
};

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

#[test]
fn registry_lists_the_standard_suites() {
    let r = SuiteRegistry::standard();
    assert_eq!(r.names(), vec!["invariance", "secondrep", "sums", "tbt"]);
    assert!(matches!(r.get("tbt"), Ok(s) if s.name() == "tbt"));
    assert!(matches!(r.get("nope"), Err(SuiteError::UnknownSuite(..))));
}

#[test]
fn input_errors() {
    let r = SuiteRegistry::standard();
    assert_eq!(run_suite(&r, "tbt", 0, 4, 1, &tol()).unwrap_err(), SuiteError::NoTrials);
    assert!(matches!(run_suite(&r, "tbt", 1, 0, 1, &tol()), Err(SuiteError::BadMaxDim { .. })));
    assert!(matches!(run_suite(&r, "tbt", 1, 33, 1, &tol()), Err(SuiteError::BadMaxDim { .. })));
    assert!(matches!(run_suite(&r, "invariance", 1, 1, 1, &tol()), Err(SuiteError::BadMaxDim { lo: 2, .. })));
}

#[test]
fn trial_seeds_are_distinct_and_fixed() {
    assert_eq!(trial_seed(0, 0), 0x9E37_79B9_7F4A_7C15);
    let seeds: std::collections::BTreeSet<u64> = (0..1000).map(|i| trial_seed(42, i)).collect();
    assert_eq!(seeds.len(), 1000);
}

#[test]
fn aggregation_ignores_trial_order() {
    let r = SuiteRegistry::standard();
    for name in ["tbt", "sums"] {
        let suite = r.get(name).unwrap();
        let outcomes = run_trials(suite.as_ref(), 12, 4, 9, &tol());
        let forward = build_report(suite.as_ref(), &outcomes, 9);
        let mut reversed = outcomes.clone();
        reversed.reverse();
        reversed.swap(0, 5);
        let backward = build_report(suite.as_ref(), &reversed, 9);
        assert_eq!(forward.to_json(), backward.to_json());
    }
}

#[test]
fn serial_and_parallel_runs_agree() {
    let r = SuiteRegistry::standard();
    let parallel = run_suite(&r, "secondrep", 16, 5, 3, &tol()).unwrap().normalized();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let serial = pool.install(|| run_suite(&r, "secondrep", 16, 5, 3, &tol()).unwrap().normalized());
    assert_eq!(parallel.to_json(), serial.to_json());
}

#[test]
fn every_suite_passes_a_short_run() {
    let r = SuiteRegistry::standard();
    for name in r.names() {
        let report = run_suite(&r, name, 10, 4, 5, &tol()).unwrap();
        assert!(report.passed(), "{name}:\n{}", report.summary());
        assert!(report.failures.is_empty());
        assert_eq!(report.trials, Some(10));
    }
}

#[test]
fn aggregate_keeps_worst_residual_and_any_failure() {
    let recs = [
        CheckRecord::measured("a", "x", 1e-12, 1e-8),
        CheckRecord::measured("b", "y", 0.0, 1e-8),
        CheckRecord::measured("a", "x", 1e-6, 1e-8),
        CheckRecord::measured("a", "x", 1e-10, 1e-8),
    ];
    let agg = aggregate(recs.iter());
    assert_eq!(agg.len(), 2);
    assert_eq!(agg[0].name, "a");
    assert_eq!(agg[0].residual, 1e-6);
    assert!(!agg[0].pass);
    assert!(agg[1].pass);
}

#[test]
fn non_finite_residuals_fail_and_stay_serializable() {
    let r = CheckRecord::measured("x", "x", f64::NAN, 1.0);
    assert!(!r.pass);
    assert_eq!(r.residual, f64::MAX);
    let json = serde_json::to_string(&r).unwrap();
    assert!(!json.contains("null"));
}

/// Emits relations whose graph is not accretive, so every trial fails.
struct Broken;

impl Suite for Broken {
    fn name(&self) -> &'static str {
        "broken"
    }

    fn generate(&self, _trial: usize, rng: &mut ChaCha8Rng, _max_dim: usize) -> InstanceDocument {
        let a = -rng.random_range(0.5..2.0f64);
        InstanceDocument {
            kind: Kind::Relation,
            dims: Dims {
                n: Some(1),
                ..Dims::default()
            },
            payload: Payload {
                relation: Some(SummandSpec::Graph(vec![vec![[1.0, 0.0], [a, 0.0]]])),
                ..Payload::default()
            },
            tolerances: None,
            seed: None,
        }
    }
}

#[test]
fn failures_embed_replayable_instances() {
    let mut r = SuiteRegistry::standard();
    r.register(Arc::new(Broken));
    let report = run_suite(&r, "broken", 3, 1, 0, &tol()).unwrap();
    assert_eq!(report.verdict, Verdict::Fail);
    assert_eq!(report.failures.len(), 3);
    for f in &report.failures {
        assert_eq!(f.failed_checks, vec!["input".to_string()]);
        let doc = &f.instance;
        assert_eq!(doc.seed, Some(trial_seed(0, f.trial)));
        assert!(!verify_document(doc, &tol()).passed());
    }
}

#[test]
fn tight_tolerance_failures_replay_through_check() {
    let r = SuiteRegistry::standard();
    let mut tight = tol();
    tight.subspace_eq_tol = 1e-17;
    let report = run_suite(&r, "tbt", 4, 4, 2, &tight).unwrap();
    assert!(!report.passed());
    assert!(!report.failures.is_empty());
    for f in &report.failures {
        let text = serde_json::to_string(&f.instance).unwrap();
        let doc = parse_instance(&text).unwrap();
        assert_eq!(instance_digest(&doc), instance_digest(&f.instance));
        let replay = verify_document(&doc, &tight);
        let failed: Vec<String> = replay.checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect();
        assert_eq!(failed, f.failed_checks);
        assert!(verify_document(&doc, &tol()).passed());
    }
}

#[test]
fn pinned_instance_passes_with_tiny_residuals() {
    let doc = parse_instance(include_str!("data/pinned.json")).unwrap();
    let report = verify_document(&doc, &tol());
    assert!(report.passed(), "{}", report.summary());
    for c in &report.checks {
        assert!(c.residual <= 1e-10, "{}: {}", c.name, c.residual);
    }
}
