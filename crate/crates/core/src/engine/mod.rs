//! Numerical adjudication of entropy axioms.
//!
//! Every axiom is a predicate over a family of instances (a distribution, a
//! refinement, a product, ...). [`check`] evaluates it on a fixed list of
//! seeded cases followed by random trials, each trial drawing from its own
//! RNG seeded by `(cfg.seed, axiom, trial index)`. The worst violation is
//! then hill-climbed; a witness is only reported when its margin clears
//! `tol_violation`, so rounding noise below `tol_eq` can never be promoted to
//! a counterexample.
//!
//! A consistent verdict means no counterexample was found in the trials run,
//! nothing more.

mod climb;
mod exec;
mod instance;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use climb::{hill_climb, Climbed};
pub use exec::Execution;
pub use instance::{
    evaluate_instance, random_instance, seed_instances, Instance, Outcome, Relation,
    CONTINUITY_STEPS, NON_DEGENERATE_FLOOR,
};

use crate::catalog::EntropySpec;
use crate::error::{Error, Result};
use crate::simplex::uniform;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxiomId {
    ZeroIffDegenerate,
    Symmetry,
    UpperIncreasing,
    LowerIncreasing,
    Maximum,
    Expansibility,
    SymmetricExpansibility,
    UpperSubadditivity,
    UpperStrongSubadditivity,
    LowerStrongSubadditivity,
    WeakSubadditivity,
    WeakSuperadditivity,
    ExtremalMonotonicity,
    ContinuitySmoke,
    /// Proportionality to Shannon entropy; see [`shannon_equivalence_probe`].
    ShannonEquivalence,
}

impl AxiomId {
    pub const ALL: [AxiomId; 15] = [
        AxiomId::ZeroIffDegenerate,
        AxiomId::Symmetry,
        AxiomId::UpperIncreasing,
        AxiomId::LowerIncreasing,
        AxiomId::Maximum,
        AxiomId::Expansibility,
        AxiomId::SymmetricExpansibility,
        AxiomId::UpperSubadditivity,
        AxiomId::UpperStrongSubadditivity,
        AxiomId::LowerStrongSubadditivity,
        AxiomId::WeakSubadditivity,
        AxiomId::WeakSuperadditivity,
        AxiomId::ExtremalMonotonicity,
        AxiomId::ContinuitySmoke,
        AxiomId::ShannonEquivalence,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AxiomId::ZeroIffDegenerate => "zero_iff_degenerate",
            AxiomId::Symmetry => "symmetry",
            AxiomId::UpperIncreasing => "upper_increasing",
            AxiomId::LowerIncreasing => "lower_increasing",
            AxiomId::Maximum => "maximum",
            AxiomId::Expansibility => "expansibility",
            AxiomId::SymmetricExpansibility => "symmetric_expansibility",
            AxiomId::UpperSubadditivity => "upper_subadditivity",
            AxiomId::UpperStrongSubadditivity => "upper_strong_subadditivity",
            AxiomId::LowerStrongSubadditivity => "lower_strong_subadditivity",
            AxiomId::WeakSubadditivity => "weak_subadditivity",
            AxiomId::WeakSuperadditivity => "weak_superadditivity",
            AxiomId::ExtremalMonotonicity => "extremal_monotonicity",
            AxiomId::ContinuitySmoke => "continuity_smoke",
            AxiomId::ShannonEquivalence => "shannon_equivalence",
        }
    }

    /// Advisory checks never decide a suite.
    pub fn is_advisory(self) -> bool {
        self == AxiomId::ContinuitySmoke
    }

    fn tag(self) -> u64 {
        AxiomId::ALL.iter().position(|&a| a == self).unwrap() as u64 + 1
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AxiomId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AxiomId::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::BadConfig(format!("unknown axiom `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub trials: usize,
    pub max_n: usize,
    pub seed: u64,
    /// Slack within which equalities and boundary cases are accepted.
    pub tol_eq: f64,
    /// Margin a witness must exceed to be reported as a counterexample.
    pub tol_violation: f64,
    pub hill_climb_steps: usize,
    /// Largest uniform support compared by `extremal_monotonicity`.
    pub max_n_uniform: usize,
}

/// Largest `max_n` accepted by [`CheckConfig::validate`].
pub const MAX_TRIAL_SIZE: usize = 64;

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            trials: 10_000,
            max_n: 8,
            seed: 0,
            tol_eq: 1e-9,
            tol_violation: 1e-7,
            hill_climb_steps: 200,
            max_n_uniform: 64,
        }
    }
}

impl CheckConfig {
    pub fn with_seed(seed: u64) -> Self {
        CheckConfig {
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::BadConfig(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if !(2..=MAX_TRIAL_SIZE).contains(&self.max_n) {
            return bad(format!(
                "max_n must be in 2..={MAX_TRIAL_SIZE}, got {}",
                self.max_n
            ));
        }
        if self.max_n_uniform == 0 || self.max_n_uniform > 1 << 15 {
            return bad(format!(
                "max_n_uniform out of range: {}",
                self.max_n_uniform
            ));
        }
        if !(self.tol_eq.is_finite() && self.tol_eq > 0.0) {
            return bad(format!("tol_eq must be positive, got {}", self.tol_eq));
        }
        if !(self.tol_violation.is_finite() && self.tol_violation > self.tol_eq) {
            return bad(format!(
                "tol_violation ({}) must exceed tol_eq ({})",
                self.tol_violation, self.tol_eq
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// No sampled case violated beyond `tol_eq`.
    Consistent,
    /// A witness violates by more than `tol_violation`.
    Counterexample,
    /// Violations above `tol_eq` that could not be pushed past `tol_violation`.
    Marginal,
}

/// A concrete violating instance. Re-evaluating `instance` reproduces
/// `lhs`, `rhs` and `margin`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Trial the climb started from.
    pub trial: usize,
    pub instance: Instance,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub relation: Relation,
    pub climb_accepted: usize,
}

impl Witness {
    /// Re-evaluates the stored instance from scratch.
    pub fn reverify(
        &self,
        spec: &EntropySpec,
        axiom: AxiomId,
        cfg: &CheckConfig,
    ) -> Result<Outcome> {
        evaluate_instance(spec, axiom, &self.instance, cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub axiom: AxiomId,
    pub spec: EntropySpec,
    pub status: Status,
    pub trials_run: usize,
    /// Trials whose margin exceeded `tol_eq` before climbing.
    pub violations: usize,
    /// Largest signed margin over all trials (before climbing).
    pub max_margin: f64,
    /// Largest `|lhs - rhs|` over all trials.
    pub max_abs_gap: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub advisory: bool,
    /// Proportionality constant estimated by the Shannon-equivalence probe.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn is_consistent(&self) -> bool {
        self.status == Status::Consistent
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

const CLIMB_STREAM: u64 = 0xC11B_0000_0000_0000;

pub(crate) fn trial_rng(seed: u64, axiom: AxiomId, trial: u64) -> ChaCha8Rng {
    let s = splitmix64(splitmix64(seed ^ axiom.tag().rotate_right(8)) ^ trial);
    ChaCha8Rng::seed_from_u64(s)
}

/// Instance number `trial` of the check of `axiom`: seeded cases first, then
/// random draws.
pub fn trial_instance(
    axiom: AxiomId,
    cfg: &CheckConfig,
    seeds: &[Instance],
    trial: usize,
) -> Instance {
    match seeds.get(trial) {
        Some(s) => s.clone(),
        None => random_instance(axiom, cfg, &mut trial_rng(cfg.seed, axiom, trial as u64)),
    }
}

/// Number of instances a check evaluates: `cfg.trials`, or the number of
/// seeded cases if that is larger.
pub fn trial_count(axiom: AxiomId, cfg: &CheckConfig) -> usize {
    cfg.trials.max(seed_instances(axiom, cfg).len())
}

/// Checks `axiom` for `spec` using the crate's default execution mode.
pub fn check(spec: &EntropySpec, axiom: AxiomId, cfg: &CheckConfig) -> Result<Verdict> {
    check_with(spec, axiom, cfg, Execution::default())
}

pub fn check_with(
    spec: &EntropySpec,
    axiom: AxiomId,
    cfg: &CheckConfig,
    exec: Execution,
) -> Result<Verdict> {
    check_inner(spec, axiom, cfg, cfg.hill_climb_steps, exec)
}

fn check_inner(
    spec: &EntropySpec,
    axiom: AxiomId,
    cfg: &CheckConfig,
    climb_steps: usize,
    exec: Execution,
) -> Result<Verdict> {
    spec.validate()?;
    cfg.validate()?;
    let seeds = seed_instances(axiom, cfg);
    let total = cfg.trials.max(seeds.len());

    let outcomes = exec.map(total, |t| {
        let inst = trial_instance(axiom, cfg, &seeds, t);
        evaluate_instance(spec, axiom, &inst, cfg)
    });

    let mut violations = 0;
    let mut max_margin = f64::NEG_INFINITY;
    let mut max_abs_gap: f64 = 0.0;
    let mut worst: Option<(usize, Outcome)> = None;
    for (t, o) in outcomes.into_iter().enumerate() {
        let o = o?;
        if o.margin > cfg.tol_eq {
            violations += 1;
        }
        if o.relation != Relation::NonZero && o.relation != Relation::Shrinks {
            max_abs_gap = max_abs_gap.max(o.gap());
        }
        max_margin = max_margin.max(o.margin);
        if worst.is_none_or(|(_, w)| o.margin > w.margin) {
            worst = Some((t, o));
        }
    }

    let mut verdict = Verdict {
        axiom,
        spec: *spec,
        status: Status::Consistent,
        trials_run: total,
        violations,
        max_margin,
        max_abs_gap,
        advisory: axiom.is_advisory(),
        constant: None,
        witness: None,
    };
    let Some((trial, outcome)) = worst.filter(|(_, o)| o.margin > cfg.tol_eq) else {
        return Ok(verdict);
    };

    let start = trial_instance(axiom, cfg, &seeds, trial);
    let mut rng = trial_rng(cfg.seed ^ CLIMB_STREAM, axiom, trial as u64);
    let mut best = hill_climb(spec, axiom, start, outcome, cfg, climb_steps, &mut rng);
    if best.outcome.margin <= cfg.tol_violation {
        // still in the gap between tolerances: search harder before giving up
        let more = climb_steps.max(1) * 10;
        let retry = hill_climb(
            spec,
            axiom,
            best.instance.clone(),
            best.outcome,
            cfg,
            more,
            &mut rng,
        );
        best = Climbed {
            accepted: best.accepted + retry.accepted,
            ..retry
        };
    }
    verdict.status = if best.outcome.margin > cfg.tol_violation {
        Status::Counterexample
    } else {
        Status::Marginal
    };
    verdict.witness = Some(Witness {
        trial,
        instance: best.instance,
        lhs: best.outcome.lhs,
        rhs: best.outcome.rhs,
        margin: best.outcome.margin,
        relation: best.outcome.relation,
        climb_accepted: best.accepted,
    });
    Ok(verdict)
}

/// The four axiom systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Upper,
    Lower,
    WeakUpper,
    WeakLower,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::Upper,
        Suite::Lower,
        Suite::WeakUpper,
        Suite::WeakLower,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Upper => "upper",
            Suite::Lower => "lower",
            Suite::WeakUpper => "weak_upper",
            Suite::WeakLower => "weak_lower",
        }
    }

    /// Axioms of the suite, each flagged `true` when it is a derived
    /// corollary rather than a defining axiom.
    pub fn members(self) -> &'static [(AxiomId, bool)] {
        use AxiomId as A;
        match self {
            Suite::Upper => &[
                (A::ZeroIffDegenerate, false),
                (A::Symmetry, false),
                (A::UpperIncreasing, false),
                (A::Maximum, false),
                (A::Expansibility, true),
                (A::UpperSubadditivity, true),
                (A::UpperStrongSubadditivity, true),
                (A::ExtremalMonotonicity, true),
            ],
            Suite::Lower => &[
                (A::ZeroIffDegenerate, false),
                (A::SymmetricExpansibility, false),
                (A::LowerIncreasing, false),
                (A::Maximum, false),
                (A::LowerStrongSubadditivity, true),
            ],
            Suite::WeakUpper => &[
                (A::ZeroIffDegenerate, false),
                (A::SymmetricExpansibility, false),
                (A::Maximum, false),
                (A::WeakSubadditivity, false),
            ],
            Suite::WeakLower => &[
                (A::ZeroIffDegenerate, false),
                (A::SymmetricExpansibility, false),
                (A::Maximum, false),
                (A::WeakSuperadditivity, false),
            ],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    /// Accepts both `weak_upper` and `weak-upper`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.replace('-', "_");
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::BadConfig(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub corollary: bool,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub spec: EntropySpec,
    pub passed: bool,
    pub entries: Vec<SuiteEntry>,
}

impl SuiteReport {
    fn from_entries(suite: Suite, spec: EntropySpec, entries: Vec<SuiteEntry>) -> Self {
        let passed = entries
            .iter()
            .filter(|e| !e.verdict.advisory)
            .all(|e| e.verdict.is_consistent());
        SuiteReport {
            suite,
            spec,
            passed,
            entries,
        }
    }

    pub fn counterexamples(&self) -> impl Iterator<Item = &Verdict> {
        self.entries
            .iter()
            .map(|e| &e.verdict)
            .filter(|v| v.status == Status::Counterexample)
    }
}

pub fn run_suite(spec: &EntropySpec, suite: Suite, cfg: &CheckConfig) -> Result<SuiteReport> {
    run_suite_cached(spec, suite, cfg, &mut Vec::new())
}

/// Like [`run_suite`], reusing verdicts already present in `cache`.
pub(crate) fn run_suite_cached(
    spec: &EntropySpec,
    suite: Suite,
    cfg: &CheckConfig,
    cache: &mut Vec<Verdict>,
) -> Result<SuiteReport> {
    let mut entries = Vec::new();
    for &(axiom, corollary) in suite.members() {
        let verdict = match cache.iter().find(|v| v.axiom == axiom) {
            Some(v) => v.clone(),
            None => {
                let v = check(spec, axiom, cfg)?;
                cache.push(v.clone());
                v
            }
        };
        entries.push(SuiteEntry { corollary, verdict });
    }
    Ok(SuiteReport::from_entries(suite, *spec, entries))
}

/// Tests whether `spec` is a constant multiple of Shannon entropy. The
/// constant is read off at the uniform law on two states.
pub fn shannon_equivalence_probe(spec: &EntropySpec, cfg: &CheckConfig) -> Result<Verdict> {
    spec.validate()?;
    let h2 = spec.eval(&uniform(2)?);
    if h2 <= cfg.tol_eq {
        return Err(Error::DegenerateScale(h2));
    }
    let mut v = check(spec, AxiomId::ShannonEquivalence, cfg)?;
    v.constant = Some(h2 / std::f64::consts::LN_2);
    Ok(v)
}
