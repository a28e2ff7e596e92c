//! Verification suites: named generators of seeded instances, run in
//! parallel and reduced into one report.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use sectorial_core::ToleranceConfig;

use crate::checks::check_problem;
use crate::generate::{self, trial_seed};
use crate::instance::{instance_digest, InstanceDocument, Problem, MAX_DIM};
use crate::report::{aggregate, combined_digest, CheckRecord, FailureRecord, VerificationReport};

#[derive(Debug, Error, PartialEq)]
pub enum SuiteError {
    #[error("unknown suite `{0}` (known: {1})")]
    UnknownSuite(String, String),
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("max_dim must lie in {lo}..={MAX_DIM}, got {got}")]
    BadMaxDim { lo: usize, got: usize },
}

/// A family of random instances.
pub trait Suite: Send + Sync {
    fn name(&self) -> &'static str;

    /// Smallest admissible `max_dim`.
    fn min_dim(&self) -> usize {
        1
    }

    /// Instance for trial `trial`, drawn from `rng` with every dimension at
    /// most `max_dim`.
    fn generate(&self, trial: usize, rng: &mut ChaCha8Rng, max_dim: usize) -> InstanceDocument;

    /// Checks over the whole run, computed from the per-trial results.
    fn summarize(&self, _trials: &[TrialOutcome]) -> Vec<CheckRecord> {
        Vec::new()
    }
}

#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub index: usize,
    pub instance: InstanceDocument,
    pub digest: String,
    pub checks: Vec<CheckRecord>,
}

impl TrialOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn norm_cap(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(0.0..10.0f64).max(1e-3)
}

/// `T*(I+iB)T` with random dimensions and `‖B‖ ≤ 10`. Even trials take
/// `dim graph T > dim_h`, which forces `mul T ≠ {0}`.
pub struct TbtSuite;

impl Suite for TbtSuite {
    fn name(&self) -> &'static str {
        "tbt"
    }

    fn generate(&self, trial: usize, rng: &mut ChaCha8Rng, max_dim: usize) -> InstanceDocument {
        let h = rng.random_range(1..=max_dim);
        let k = rng.random_range(1..=max_dim);
        let g = if trial.is_multiple_of(2) {
            rng.random_range(h + 1..=h + k)
        } else {
            rng.random_range(1..=h + k)
        };
        let cap = norm_cap(rng);
        generate::random_tbt(rng, h, k, g, cap)
    }

    fn summarize(&self, trials: &[TrialOutcome]) -> Vec<CheckRecord> {
        let tol = ToleranceConfig::default();
        let with_mul = trials
            .iter()
            .filter(|t| match t.instance.problem(&tol) {
                Ok(Problem::Tbt { t, .. }) => t.mul(&tol).map(|m| m.dim() > 0).unwrap_or(false),
                _ => false,
            })
            .count();
        let share = with_mul as f64 / trials.len().max(1) as f64;
        vec![CheckRecord::measured(
            "mul-nontrivial-share",
            "mul T ≠ {0} in at least half of the trials",
            (0.5 - share).max(0.0),
            0.0,
        )]
    }
}

/// Relations with `1 ≤ dim mul T < dim_k`; even trials reduce `B` by
/// `mul T`, odd trials keep it generic.
pub struct InvarianceSuite;

impl Suite for InvarianceSuite {
    fn name(&self) -> &'static str {
        "invariance"
    }

    fn min_dim(&self) -> usize {
        2
    }

    fn generate(&self, trial: usize, rng: &mut ChaCha8Rng, max_dim: usize) -> InstanceDocument {
        let h = rng.random_range(1..=max_dim);
        let k = rng.random_range(2..=max_dim);
        let cap = norm_cap(rng);
        generate::random_invariance_tbt(rng, h, k, cap, trial.is_multiple_of(2))
    }
}

/// Single maximal sectorial relations for the second representation.
pub struct SecondRepSuite;

impl Suite for SecondRepSuite {
    fn name(&self) -> &'static str {
        "secondrep"
    }

    fn generate(&self, _trial: usize, rng: &mut ChaCha8Rng, max_dim: usize) -> InstanceDocument {
        let n = rng.random_range(1..=max_dim);
        generate::random_relation(rng, n)
    }
}

/// Pairs of maximal sectorial relations and the extensions of their sum.
pub struct SumsSuite;

impl Suite for SumsSuite {
    fn name(&self) -> &'static str {
        "sums"
    }

    fn generate(&self, _trial: usize, rng: &mut ChaCha8Rng, max_dim: usize) -> InstanceDocument {
        let n = rng.random_range(1..=max_dim);
        generate::random_sum(rng, n)
    }
}

pub struct SuiteRegistry {
    suites: BTreeMap<&'static str, Arc<dyn Suite>>,
}

impl Default for SuiteRegistry {
    fn default() -> Self {
        Self::standard()
    }
}

impl SuiteRegistry {
    pub fn empty() -> Self {
        SuiteRegistry {
            suites: BTreeMap::new(),
        }
    }

    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(TbtSuite));
        r.register(Arc::new(InvarianceSuite));
        r.register(Arc::new(SecondRepSuite));
        r.register(Arc::new(SumsSuite));
        r
    }

    pub fn register(&mut self, suite: Arc<dyn Suite>) {
        self.suites.insert(suite.name(), suite);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Suite>, SuiteError> {
        self.suites
            .get(name)
            .cloned()
            .ok_or_else(|| SuiteError::UnknownSuite(name.into(), self.names().join(", ")))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.suites.keys().copied().collect()
    }
}

/// Checks for one document; input errors become a failing `input` record.
pub fn check_instance(doc: &InstanceDocument, base: &ToleranceConfig) -> Vec<CheckRecord> {
    let tol = match doc.tolerances(base) {
        Ok(t) => t,
        Err(e) => return vec![CheckRecord::failed("input", "instance decodes", e.to_string())],
    };
    match doc.problem(&tol) {
        Ok(p) => check_problem(&p, &tol),
        Err(e) => vec![CheckRecord::failed("input", "instance decodes", e.to_string())],
    }
}

/// Report for a single document.
pub fn verify_document(doc: &InstanceDocument, base: &ToleranceConfig) -> VerificationReport {
    let start = Instant::now();
    let mut report = VerificationReport::new(instance_digest(doc), check_instance(doc, base));
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    report
}

pub fn run_trial(suite: &dyn Suite, index: usize, seed: u64, max_dim: usize, tol: &ToleranceConfig) -> TrialOutcome {
    let s = trial_seed(seed, index);
    let mut rng = generate::rng(s);
    let mut instance = suite.generate(index, &mut rng, max_dim);
    instance.seed = Some(s);
    let checks = check_instance(&instance, tol);
    TrialOutcome {
        index,
        digest: instance_digest(&instance),
        instance,
        checks,
    }
}

pub fn run_trials(suite: &dyn Suite, trials: usize, max_dim: usize, seed: u64, tol: &ToleranceConfig) -> Vec<TrialOutcome> {
    (0..trials)
        .into_par_iter()
        .map(|i| run_trial(suite, i, seed, max_dim, tol))
        .collect()
}

/// Reduces trial outcomes (in any order) into a report.
pub fn build_report(suite: &dyn Suite, outcomes: &[TrialOutcome], seed: u64) -> VerificationReport {
    let mut sorted: Vec<&TrialOutcome> = outcomes.iter().collect();
    sorted.sort_by_key(|t| t.index);
    let mut checks = aggregate(outcomes.iter().flat_map(|t| t.checks.iter()));
    checks.extend(suite.summarize(outcomes));
    let digest = combined_digest(sorted.iter().map(|t| t.digest.as_str()));
    let mut report = VerificationReport::new(digest, checks);
    report.suite = Some(suite.name().into());
    report.trials = Some(outcomes.len());
    report.seed = Some(seed);
    report.failures = sorted
        .iter()
        .filter(|t| !t.passed())
        .map(|t| FailureRecord {
            trial: t.index,
            failed_checks: t.checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect(),
            instance: t.instance.clone(),
        })
        .collect();
    report
}

pub fn run_suite(
    registry: &SuiteRegistry,
    name: &str,
    trials: usize,
    max_dim: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<VerificationReport, SuiteError> {
    let suite = registry.get(name)?;
    if trials == 0 {
        return Err(SuiteError::NoTrials);
    }
    if max_dim < suite.min_dim() || max_dim > MAX_DIM {
        return Err(SuiteError::BadMaxDim {
            lo: suite.min_dim(),
            got: max_dim,
        });
    }
    let start = Instant::now();
    let outcomes = run_trials(suite.as_ref(), trials, max_dim, seed, tol);
    let mut report = build_report(suite.as_ref(), &outcomes, seed);
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}
