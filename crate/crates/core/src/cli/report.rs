use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::catalog::EntropySpec;
use crate::classifier::{GoldSummary, SweepPoint};
use crate::engine::{CheckConfig, Status, SuiteReport, Verdict};
use crate::simplex::{CondDist, Dist};

pub const TOOL: &str = "entropy-axioms";

/// Top-level JSON document written by every subcommand. Everything except
/// `timestamp` and `runtime_ms` is a pure function of the inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub timestamp: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<CheckConfig>,
    pub specs: Vec<EntropySpec>,
    pub payload: Payload,
    pub runtime_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Eval {
        values: Vec<EvalRow>,
    },
    Check {
        suites: Vec<SuiteReport>,
        verdicts: Vec<Verdict>,
    },
    Classify {
        points: Vec<SweepPoint>,
        summary: GoldSummary,
    },
    Search {
        verdict: Verdict,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub dist: Dist,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cond: Option<CondDist>,
    pub value: f64,
}

/// Fixed six decimals with trailing zeros removed: `0.693147`, `0.625`, `1`.
pub fn fmt_value(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        &s
    };
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Consistent => "consistent",
        Status::Counterexample => "counterexample",
        Status::Marginal => "marginal",
    }
}

pub fn verdict_text(out: &mut String, v: &Verdict, indent: &str) {
    let adv = if v.advisory { " (advisory)" } else { "" };
    let _ = writeln!(
        out,
        "{indent}{:<28} {:<14} trials={} violations={}{adv}",
        v.axiom.as_str(),
        status_str(v.status),
        v.trials_run,
        v.violations
    );
    if let Some(c) = v.constant {
        let _ = writeln!(out, "{indent}  constant = {}", fmt_value(c));
    }
    if let Some(w) = &v.witness {
        let inst = serde_json::to_string(&w.instance).unwrap_or_default();
        let _ = writeln!(
            out,
            "{indent}  witness (trial {}): lhs={:e} rhs={:e} margin={:e}",
            w.trial, w.lhs, w.rhs, w.margin
        );
        let _ = writeln!(out, "{indent}  instance: {inst}");
    }
}

pub fn suite_text(out: &mut String, r: &SuiteReport) {
    let _ = writeln!(
        out,
        "suite {} for {}: {}",
        r.suite,
        r.spec,
        if r.passed { "PASS" } else { "FAIL" }
    );
    for e in &r.entries {
        verdict_text(out, &e.verdict, "  ");
    }
}

fn opt_param(p: Option<f64>) -> String {
    p.map(|x| x.to_string()).unwrap_or_default()
}

struct Row {
    family: String,
    param: String,
    variant: String,
    label: String,
    gold: String,
    agrees: String,
}

fn rows(points: &[SweepPoint]) -> Vec<Row> {
    points
        .iter()
        .map(|p| {
            let (variant, label, gold, agrees) = match (&p.record, &p.error) {
                (Some(r), _) => (
                    if r.spec.family == crate::catalog::Family::HybridEq10 {
                        r.spec.variant().as_str().to_string()
                    } else {
                        String::new()
                    },
                    r.label.as_str().to_string(),
                    r.gold_label
                        .map(|c| c.as_str().to_string())
                        .unwrap_or_default(),
                    r.agrees_with_paper
                        .map(|a| a.to_string())
                        .unwrap_or_default(),
                ),
                (None, e) => (
                    String::new(),
                    format!("error: {}", e.as_deref().unwrap_or("")),
                    String::new(),
                    String::new(),
                ),
            };
            Row {
                family: p.family.as_str().to_string(),
                param: opt_param(p.param),
                variant,
                label,
                gold,
                agrees,
            }
        })
        .collect()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn classify_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from("family,param,variant,label,claim,agrees\n");
    for r in rows(points) {
        let fields = [
            &r.family, &r.param, &r.variant, &r.label, &r.gold, &r.agrees,
        ];
        let line: Vec<String> = fields.iter().map(|f| csv_field(f)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn classify_md(points: &[SweepPoint], summary: &GoldSummary) -> String {
    let mut out = String::from("| family | param | variant | label | claim | agrees |\n");
    out.push_str("|---|---|---|---|---|---|\n");
    for r in rows(points) {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} |",
            r.family, r.param, r.variant, r.label, r.gold, r.agrees
        );
    }
    let _ = writeln!(out, "\n| family | agree | disagree | unchecked | errors |");
    out.push_str("|---|---|---|---|---|\n");
    for (f, t) in &summary.families {
        let _ = writeln!(
            out,
            "| {f} | {} | {} | {} | {} |",
            t.agree, t.disagree, t.unchecked, t.errors
        );
    }
    out
}

pub fn classify_text(points: &[SweepPoint], summary: &GoldSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<22} {:>6} {:<11} {:<18} {:<18} agrees",
        "family", "param", "variant", "label", "claim"
    );
    for r in rows(points) {
        let _ = writeln!(
            out,
            "{:<22} {:>6} {:<11} {:<18} {:<18} {}",
            r.family, r.param, r.variant, r.label, r.gold, r.agrees
        );
    }
    for d in &summary.disagreements {
        let _ = writeln!(
            out,
            "disagreement: {} labelled {} but claimed {}",
            d.spec, d.label, d.gold_label
        );
        for v in &d.evidence {
            verdict_text(&mut out, v, "  ");
        }
    }
    let _ = writeln!(
        out,
        "claim table reproduced: {}",
        if summary.success { "yes" } else { "no" }
    );
    out
}
