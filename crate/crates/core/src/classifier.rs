//! Classification of entropy specs into axiom classes, parameter sweeps, and
//! comparison against the reference table of claimed classes.
//!
//! Claims are treated as membership statements: "a weak upper entropy
//! function" holds for any spec that passes the weak-upper suite, even if the
//! spec's own label is the stronger `upper`. Negative claims ("neither upper
//! nor lower") are checked as such.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::catalog::{EntropySpec, Eq10Variant, Family};
use crate::engine::{
    run_suite_cached, shannon_equivalence_probe, CheckConfig, Suite, SuiteReport, Verdict,
};
use crate::error::Result;

/// Default sweep grid; 1 is left out because most families are singular there.
pub const DEFAULT_GRID: [f64; 7] = [0.25, 0.5, 0.75, 1.5, 2.0, 3.0, 4.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    ShannonEquivalent,
    Upper,
    Lower,
    WeakBoth,
    WeakUpper,
    WeakLower,
    None,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::ShannonEquivalent => "shannon_equivalent",
            Label::Upper => "upper",
            Label::Lower => "lower",
            Label::WeakBoth => "weak_both",
            Label::WeakUpper => "weak_upper",
            Label::WeakLower => "weak_lower",
            Label::None => "none",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which suites passed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuitePasses {
    pub upper: bool,
    pub lower: bool,
    pub weak_upper: bool,
    pub weak_lower: bool,
}

impl SuitePasses {
    pub fn get(&self, s: Suite) -> bool {
        match s {
            Suite::Upper => self.upper,
            Suite::Lower => self.lower,
            Suite::WeakUpper => self.weak_upper,
            Suite::WeakLower => self.weak_lower,
        }
    }

    fn set(&mut self, s: Suite, v: bool) {
        match s {
            Suite::Upper => self.upper = v,
            Suite::Lower => self.lower = v,
            Suite::WeakUpper => self.weak_upper = v,
            Suite::WeakLower => self.weak_lower = v,
        }
    }
}

/// Label by precedence: shannon_equivalent > upper > lower > weak_both >
/// weak_upper > weak_lower > none.
pub fn assign_label(passes: SuitePasses, probe_passed: bool) -> Label {
    match passes {
        SuitePasses {
            upper: true,
            lower: true,
            ..
        } if probe_passed => Label::ShannonEquivalent,
        SuitePasses { upper: true, .. } => Label::Upper,
        SuitePasses { lower: true, .. } => Label::Lower,
        SuitePasses {
            weak_upper: true,
            weak_lower: true,
            ..
        } => Label::WeakBoth,
        SuitePasses {
            weak_upper: true, ..
        } => Label::WeakUpper,
        SuitePasses {
            weak_lower: true, ..
        } => Label::WeakLower,
        _ => Label::None,
    }
}

/// A claimed classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    ShannonEquivalent,
    Upper,
    Lower,
    WeakUpper,
    WeakLower,
    /// Both weak systems hold and neither strong one does.
    WeakBoth,
    /// Neither the upper nor the lower system holds.
    NeitherStrong,
}

impl Claim {
    pub fn as_str(self) -> &'static str {
        match self {
            Claim::ShannonEquivalent => "shannon_equivalent",
            Claim::Upper => "upper",
            Claim::Lower => "lower",
            Claim::WeakUpper => "weak_upper",
            Claim::WeakLower => "weak_lower",
            Claim::WeakBoth => "weak_both",
            Claim::NeitherStrong => "not_upper_not_lower",
        }
    }

    pub fn satisfied_by(self, label: Label, passes: SuitePasses) -> bool {
        match self {
            Claim::ShannonEquivalent => label == Label::ShannonEquivalent,
            Claim::Upper => passes.upper,
            Claim::Lower => passes.lower,
            Claim::WeakUpper => passes.weak_upper,
            Claim::WeakLower => passes.weak_lower,
            Claim::WeakBoth => {
                passes.weak_upper && passes.weak_lower && !passes.upper && !passes.lower
            }
            Claim::NeitherStrong => !passes.upper && !passes.lower,
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamRange {
    Any,
    /// `0 < x < bound`.
    Below(f64),
    /// `x > bound`.
    Above(f64),
    Exactly(f64),
}

impl ParamRange {
    pub fn contains(&self, x: Option<f64>) -> bool {
        match (self, x) {
            (ParamRange::Any, _) => true,
            (ParamRange::Below(b), Some(x)) => x > 0.0 && x < *b,
            (ParamRange::Above(b), Some(x)) => x > *b,
            (ParamRange::Exactly(b), Some(x)) => x == *b,
            (_, None) => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldRow {
    pub family: Family,
    pub range: ParamRange,
    pub claim: Claim,
}

/// The claimed classification of every family, one row per parameter range.
pub struct GoldTable {
    rows: Vec<GoldRow>,
}

impl GoldTable {
    pub fn reference() -> Self {
        use Claim as C;
        use Family as F;
        use ParamRange::{Above, Any, Below, Exactly};
        let row = |family, range, claim| GoldRow {
            family,
            range,
            claim,
        };
        GoldTable {
            rows: vec![
                row(F::Shannon, Any, C::ShannonEquivalent),
                row(F::Tsallis, Above(1.0), C::Upper),
                row(F::Tsallis, Below(1.0), C::Lower),
                row(F::Daroczy, Above(1.0), C::Upper),
                row(F::Daroczy, Below(1.0), C::Lower),
                row(F::HybridEq10, Above(1.0), C::Upper),
                row(F::HybridEq10, Below(1.0), C::Lower),
                row(F::Abe, Above(1.0), C::NeitherStrong),
                row(F::Abe, Below(1.0), C::NeitherStrong),
                row(F::Renyi, Above(1.0), C::WeakBoth),
                row(F::Renyi, Below(1.0), C::WeakBoth),
                row(F::LandsbergVedral, Above(1.0), C::WeakLower),
                row(F::LandsbergVedral, Below(1.0), C::WeakUpper),
                row(F::PowerLogEq19, Above(1.0), C::WeakUpper),
                row(F::PowerLogEq19, Exactly(1.0), C::ShannonEquivalent),
                row(F::PowerLogEq19, Below(1.0), C::WeakLower),
                row(F::WeightedLogEq20, Above(1.0), C::WeakUpper),
                row(F::WeightedLogEq20, Exactly(1.0), C::ShannonEquivalent),
                row(F::WeightedLogEq20, Below(1.0), C::WeakLower),
            ],
        }
    }

    pub fn rows(&self) -> &[GoldRow] {
        &self.rows
    }

    pub fn lookup(&self, spec: &EntropySpec) -> Option<Claim> {
        self.rows
            .iter()
            .find(|r| r.family == spec.family && r.range.contains(spec.param))
            .map(|r| r.claim)
    }

    /// Parameters at which the table claims something exactly (endpoints).
    pub fn endpoints(&self, family: Family) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.family == family)
            .filter_map(|r| match r.range {
                ParamRange::Exactly(x) => Some(x),
                _ => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub spec: EntropySpec,
    pub label: Label,
    pub passes: SuitePasses,
    pub evidence: Vec<SuiteReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_label: Option<Claim>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agrees_with_paper: Option<bool>,
}

impl ClassificationRecord {
    pub fn suite(&self, s: Suite) -> Option<&SuiteReport> {
        self.evidence.iter().find(|r| r.suite == s)
    }

    pub fn verdicts(&self) -> impl Iterator<Item = &Verdict> {
        self.evidence
            .iter()
            .flat_map(|r| r.entries.iter().map(|e| &e.verdict))
    }
}

/// Runs all four suites (sharing verdicts between them), probes for
/// proportionality to Shannon when both strong suites pass, and attaches the
/// gold comparison.
pub fn classify(spec: &EntropySpec, cfg: &CheckConfig) -> Result<ClassificationRecord> {
    classify_against(spec, cfg, &GoldTable::reference())
}

pub fn classify_against(
    spec: &EntropySpec,
    cfg: &CheckConfig,
    gold: &GoldTable,
) -> Result<ClassificationRecord> {
    spec.validate()?;
    cfg.validate()?;
    let mut cache = Vec::new();
    let mut passes = SuitePasses::default();
    let mut evidence = Vec::new();
    for suite in Suite::ALL {
        let report = run_suite_cached(spec, suite, cfg, &mut cache)?;
        passes.set(suite, report.passed);
        evidence.push(report);
    }
    let probe = if passes.upper && passes.lower {
        Some(shannon_equivalence_probe(spec, cfg)?)
    } else {
        None
    };
    let label = assign_label(passes, probe.as_ref().is_some_and(|p| p.is_consistent()));
    let gold_label = gold.lookup(spec);
    Ok(ClassificationRecord {
        spec: *spec,
        label,
        passes,
        evidence,
        probe,
        gold_label,
        agrees_with_paper: gold_label.map(|c| c.satisfied_by(label, passes)),
    })
}

/// One point of a sweep; invalid parameters are recorded, not fatal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub family: Family,
    pub param: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record: Option<ClassificationRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Classifies `family` at every grid value, in grid order. Shannon has no
/// parameter and yields a single point.
pub fn sweep(
    family: Family,
    variant: Eq10Variant,
    grid: &[f64],
    cfg: &CheckConfig,
) -> Vec<SweepPoint> {
    let params: Vec<Option<f64>> = if family.takes_param() {
        grid.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };
    params
        .into_iter()
        .map(|param| {
            let result = EntropySpec::new(family, param)
                .and_then(|s| {
                    if family == Family::HybridEq10 {
                        s.with_variant(variant)
                    } else {
                        Ok(s)
                    }
                })
                .and_then(|s| classify(&s, cfg));
            match result {
                Ok(r) => SweepPoint {
                    family,
                    param,
                    record: Some(r),
                    error: None,
                },
                Err(e) => SweepPoint {
                    family,
                    param,
                    record: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

/// The default grid for `family`, plus any exactly-claimed endpoint.
pub fn default_grid(family: Family) -> Vec<f64> {
    let mut g: Vec<f64> = DEFAULT_GRID.to_vec();
    g.extend(GoldTable::reference().endpoints(family));
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// Default sweep of every family.
pub fn sweep_all(cfg: &CheckConfig) -> Vec<SweepPoint> {
    Family::ALL
        .into_iter()
        .flat_map(|f| sweep(f, Eq10Variant::Corrected, &default_grid(f), cfg))
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyTally {
    pub agree: usize,
    pub disagree: usize,
    pub unchecked: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Disagreement {
    pub spec: EntropySpec,
    pub label: Label,
    pub passes: SuitePasses,
    pub gold_label: Claim,
    /// Every non-consistent verdict of the record, with its witness.
    pub evidence: Vec<Verdict>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GoldSummary {
    pub families: BTreeMap<String, FamilyTally>,
    pub disagreements: Vec<Disagreement>,
    pub success: bool,
}

pub fn gold_report(points: &[SweepPoint]) -> GoldSummary {
    let mut summary = GoldSummary {
        success: true,
        ..Default::default()
    };
    for point in points {
        let tally = summary
            .families
            .entry(point.family.to_string())
            .or_default();
        let Some(rec) = &point.record else {
            tally.errors += 1;
            continue;
        };
        match (rec.agrees_with_paper, rec.gold_label) {
            (Some(true), _) => tally.agree += 1,
            (Some(false), Some(gold)) => {
                tally.disagree += 1;
                summary.success = false;
                summary.disagreements.push(Disagreement {
                    spec: rec.spec,
                    label: rec.label,
                    passes: rec.passes,
                    gold_label: gold,
                    evidence: rec
                        .verdicts()
                        .filter(|v| !v.is_consistent())
                        .cloned()
                        .collect(),
                });
            }
            _ => tally.unchecked += 1,
        }
    }
    summary
}

#[cfg(test)]
mod tests {
    use super::*;

    fn passes(u: bool, l: bool, wu: bool, wl: bool) -> SuitePasses {
        SuitePasses {
            upper: u,
            lower: l,
            weak_upper: wu,
            weak_lower: wl,
        }
    }

    #[test]
    fn precedence() {
        assert_eq!(
            assign_label(passes(true, true, true, true), true),
            Label::ShannonEquivalent
        );
        assert_eq!(
            assign_label(passes(true, true, true, true), false),
            Label::Upper
        );
        assert_eq!(
            assign_label(passes(true, false, true, false), false),
            Label::Upper
        );
        assert_eq!(
            assign_label(passes(false, true, true, true), false),
            Label::Lower
        );
        assert_eq!(
            assign_label(passes(false, false, true, true), false),
            Label::WeakBoth
        );
        assert_eq!(
            assign_label(passes(false, false, true, false), false),
            Label::WeakUpper
        );
        assert_eq!(
            assign_label(passes(false, false, false, true), false),
            Label::WeakLower
        );
        assert_eq!(
            assign_label(passes(false, false, false, false), true),
            Label::None
        );
    }

    #[test]
    fn gold_ranges_are_disjoint() {
        let g = GoldTable::reference();
        for x in [0.01, 0.25, 0.5, 0.99, 1.0, 1.01, 2.0, 10.0] {
            for f in Family::ALL {
                let spec = if f.takes_param() {
                    EntropySpec::of(f, x)
                } else {
                    EntropySpec::shannon()
                };
                let hits = g
                    .rows()
                    .iter()
                    .filter(|r| r.family == f && r.range.contains(spec.param))
                    .count();
                assert!(hits <= 1, "{f} at {x}");
            }
        }
        assert_eq!(g.lookup(&EntropySpec::of(Family::Tsallis, 1.0)), None);
        assert_eq!(
            g.lookup(&EntropySpec::of(Family::PowerLogEq19, 1.0)),
            Some(Claim::ShannonEquivalent)
        );
    }

    #[test]
    fn claims_are_membership_statements() {
        let strong_upper = passes(true, false, true, false);
        assert!(Claim::WeakUpper.satisfied_by(Label::Upper, strong_upper));
        assert!(!Claim::WeakLower.satisfied_by(Label::Upper, strong_upper));
        assert!(!Claim::WeakBoth.satisfied_by(Label::Upper, passes(true, false, true, true)));
        assert!(Claim::NeitherStrong.satisfied_by(Label::None, SuitePasses::default()));
        assert!(!Claim::NeitherStrong.satisfied_by(Label::Lower, passes(false, true, false, true)));
        assert!(
            !Claim::ShannonEquivalent.satisfied_by(Label::Upper, passes(true, true, true, true))
        );
    }

    #[test]
    fn default_grid_adds_claimed_endpoints() {
        assert_eq!(default_grid(Family::Tsallis), DEFAULT_GRID.to_vec());
        assert!(default_grid(Family::PowerLogEq19).contains(&1.0));
        assert_eq!(default_grid(Family::WeightedLogEq20).len(), 8);
    }

    #[test]
    fn empty_report_is_success() {
        let s = gold_report(&[]);
        assert!(s.success);
        assert!(s.families.is_empty());
        assert!(s.disagreements.is_empty());
    }

    #[test]
    fn bad_grid_point_is_recorded() {
        let cfg = CheckConfig {
            trials: 10,
            ..Default::default()
        };
        let pts = sweep(Family::Tsallis, Eq10Variant::Corrected, &[-1.0], &cfg);
        assert_eq!(pts.len(), 1);
        assert!(pts[0].record.is_none());
        assert!(pts[0].error.as_deref().unwrap().contains("parameter"));
        let s = gold_report(&pts);
        assert_eq!(s.families["tsallis"].errors, 1);
        assert!(s.success);
    }
}
