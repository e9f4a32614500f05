//! Command-line front end. [`run`] parses arguments, executes one
//! subcommand and returns the process exit status:
//! 0 when everything checked is consistent, 1 on a counterexample, a
//! marginal verdict or a claim disagreement, 2 on invalid input.

pub mod args;
pub mod report;

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use chrono::{SecondsFormat, Utc};
use clap::Parser;

use crate::catalog::{conditional_entropy, EntropySpec, Eq10Variant, Family};
use crate::classifier::{default_grid, gold_report, sweep, sweep_all};
use crate::engine::{
    check, run_suite_cached, shannon_equivalence_probe, AxiomId, CheckConfig, Suite, Verdict,
};
use crate::error::{Error, Result};
use crate::simplex::{make_dist, CondDist, Dist};

pub use args::{Cli, Command, ConfigFile, Format};
pub use report::{EvalRow, Payload, Report};

use args::{parse_floats, resolve_config, resolve_spec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDING: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Trial budget and climb multiplier used by `search` when not overridden.
pub const SEARCH_TRIALS: usize = 100_000;
pub const SEARCH_CLIMB_FACTOR: usize = 10;

struct Outcome {
    report: Report,
    exit: i32,
    text: String,
    table: Option<(String, String)>,
}

/// Runs the CLI on `argv` (including the program name), writing normal
/// output to `out` and diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error[{}]: {e}", e.kind());
            EXIT_INPUT
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let started = Instant::now();
    let (outcome, out_args) = match cli.command {
        Command::Eval(a) => {
            let conf = ConfigFile::load(a.out.config.as_deref())?;
            (cmd_eval(&a, &conf)?, (a.out, conf))
        }
        Command::Check(a) => {
            let conf = ConfigFile::load(a.out.config.as_deref())?;
            (cmd_check(&a, &conf)?, (a.out, conf))
        }
        Command::Classify(a) => {
            let conf = ConfigFile::load(a.out.config.as_deref())?;
            (cmd_classify(&a, &conf)?, (a.out, conf))
        }
        Command::Search(a) => {
            let conf = ConfigFile::load(a.out.config.as_deref())?;
            (cmd_search(&a, &conf)?, (a.out, conf))
        }
    };
    let (out_args, conf) = out_args;
    let format = conf
        .pick(&out_args.format, "format")?
        .unwrap_or(Format::Text);
    let dest: Option<std::path::PathBuf> = conf.pick(&out_args.out, "out")?;

    let mut report = outcome.report;
    report.runtime_ms = started.elapsed().as_millis() as u64;
    let body = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::BadConfig(format!("cannot serialize report: {e}")))?;
            s.push('\n');
            s
        }
        Format::Text => outcome.text,
        Format::Csv | Format::Md => match outcome.table {
            Some((csv, md)) => {
                if format == Format::Csv {
                    csv
                } else {
                    md
                }
            }
            None => {
                return Err(Error::BadConfig(format!(
                    "--format {} is only available for classify",
                    if format == Format::Csv { "csv" } else { "md" }
                )))
            }
        },
    };
    match dest {
        Some(path) => std::fs::write(&path, body)
            .map_err(|e| Error::BadConfig(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let _ = out.write_all(body.as_bytes());
        }
    }
    Ok(outcome.exit)
}

fn new_report(
    command: &str,
    config: Option<CheckConfig>,
    specs: Vec<EntropySpec>,
    payload: Payload,
) -> Report {
    Report {
        tool: report::TOOL.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
        command: command.to_string(),
        config,
        specs,
        payload,
        runtime_ms: 0,
    }
}

/// Inline comma list, or a file with one distribution per line.
fn read_dists(arg: &str) -> Result<Vec<Dist>> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::BadConfig(format!("cannot read {}: {e}", path.display())))?;
        let dists = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| make_dist(&parse_floats(l)?))
            .collect::<Result<Vec<_>>>()?;
        if dists.is_empty() {
            return Err(Error::BadSize(format!(
                "{} contains no distributions",
                path.display()
            )));
        }
        Ok(dists)
    } else {
        Ok(vec![make_dist(&parse_floats(arg)?)?])
    }
}

fn read_cond(arg: &str) -> Result<CondDist> {
    let rows = arg
        .split(';')
        .map(|r| make_dist(&parse_floats(r)?))
        .collect::<Result<Vec<_>>>()?;
    CondDist::new(rows)
}

fn cmd_eval(a: &args::EvalArgs, conf: &ConfigFile) -> Result<Outcome> {
    let spec = resolve_spec(&a.spec, conf)?;
    let dist: String = conf
        .pick(&a.dist, "dist")?
        .ok_or_else(|| Error::BadSize("--dist is required".into()))?;
    let dists = read_dists(&dist)?;
    let cond = conf
        .pick::<String>(&a.cond, "cond")?
        .map(|c| read_cond(&c))
        .transpose()?;

    let values = match cond {
        Some(c) => {
            if dists.len() != 1 {
                return Err(Error::ShapeMismatch(
                    "--cond takes exactly one marginal".into(),
                ));
            }
            let value = conditional_entropy(&spec, &dists[0], &c)?;
            vec![EvalRow {
                dist: dists[0].clone(),
                cond: Some(c),
                value,
            }]
        }
        None => dists
            .into_iter()
            .map(|d| EvalRow {
                value: spec.eval(&d),
                dist: d,
                cond: None,
            })
            .collect(),
    };
    let text: String = values
        .iter()
        .map(|r| report::fmt_value(r.value) + "\n")
        .collect();
    Ok(Outcome {
        report: new_report("eval", None, vec![spec], Payload::Eval { values }),
        exit: EXIT_OK,
        text,
        table: None,
    })
}

fn check_axiom(spec: &EntropySpec, axiom: AxiomId, cfg: &CheckConfig) -> Result<Verdict> {
    if axiom == AxiomId::ShannonEquivalence {
        shannon_equivalence_probe(spec, cfg)
    } else {
        check(spec, axiom, cfg)
    }
}

fn verdicts_exit<'a>(verdicts: impl IntoIterator<Item = &'a Verdict>) -> i32 {
    let bad = verdicts
        .into_iter()
        .any(|v| !v.advisory && !v.is_consistent());
    if bad {
        EXIT_FINDING
    } else {
        EXIT_OK
    }
}

fn cmd_check(a: &args::CheckArgs, conf: &ConfigFile) -> Result<Outcome> {
    let spec = resolve_spec(&a.spec, conf)?;
    let cfg = resolve_config(&a.run, conf, CheckConfig::default())?;
    let axiom: Option<String> = conf.pick(&a.axiom, "axiom")?;
    let suite: Option<String> = conf.pick(&a.suite, "suite")?;

    let mut text = String::new();
    let (suites, verdicts) = match (axiom, suite) {
        (Some(ax), None) => {
            let v = check_axiom(&spec, ax.parse()?, &cfg)?;
            report::verdict_text(&mut text, &v, "");
            (Vec::new(), vec![v])
        }
        (Some(_), Some(_)) => {
            return Err(Error::BadConfig("give either --suite or --axiom".into()))
        }
        (None, s) => {
            let s = s.unwrap_or_else(|| "all".into());
            let list: Vec<Suite> = if s == "all" {
                vec![
                    Suite::Upper,
                    Suite::Lower,
                    Suite::WeakUpper,
                    Suite::WeakLower,
                ]
            } else {
                vec![s.parse()?]
            };
            let mut cache = Vec::new();
            let reports = list
                .into_iter()
                .map(|s| run_suite_cached(&spec, s, &cfg, &mut cache))
                .collect::<Result<Vec<_>>>()?;
            for r in &reports {
                report::suite_text(&mut text, r);
            }
            (reports, Vec::new())
        }
    };
    let exit = verdicts_exit(
        suites
            .iter()
            .flat_map(|r| r.entries.iter().map(|e| &e.verdict))
            .chain(verdicts.iter()),
    );
    Ok(Outcome {
        report: new_report(
            "check",
            Some(cfg),
            vec![spec],
            Payload::Check { suites, verdicts },
        ),
        exit,
        text,
        table: None,
    })
}

fn cmd_classify(a: &args::ClassifyArgs, conf: &ConfigFile) -> Result<Outcome> {
    let cfg = resolve_config(&a.run, conf, CheckConfig::default())?;
    let all = a.all || conf.pick::<bool>(&None, "all")?.unwrap_or(false);
    let family: Option<String> = conf.pick(&a.family, "family")?;
    let variant: Eq10Variant = conf
        .pick::<String>(&a.variant, "variant")?
        .map(|v| v.parse())
        .transpose()?
        .unwrap_or_default();
    let grid: Option<String> = conf.pick(&a.grid, "grid")?;

    let points = match (all, family) {
        (true, Some(_)) => return Err(Error::BadConfig("give either --family or --all".into())),
        (true, None) => {
            if grid.is_some() {
                return Err(Error::BadConfig("--grid needs --family".into()));
            }
            if variant == Eq10Variant::Corrected {
                sweep_all(&cfg)
            } else {
                Family::ALL
                    .into_iter()
                    .flat_map(|f| sweep(f, variant, &default_grid(f), &cfg))
                    .collect()
            }
        }
        (false, None) => return Err(Error::BadConfig("--family or --all is required".into())),
        (false, Some(f)) => {
            let family: Family = f.parse()?;
            let grid = match grid {
                Some(g) => {
                    let g = parse_floats(&g)?;
                    if family.takes_param() {
                        for &b in &g {
                            EntropySpec::new(family, Some(b))?;
                        }
                    }
                    g
                }
                None => default_grid(family),
            };
            sweep(family, variant, &grid, &cfg)
        }
    };
    let summary = gold_report(&points);
    let specs = points
        .iter()
        .filter_map(|p| p.record.as_ref().map(|r| r.spec))
        .collect();
    let text = report::classify_text(&points, &summary);
    let table = (
        report::classify_csv(&points),
        report::classify_md(&points, &summary),
    );
    let exit = if summary.disagreements.is_empty() {
        EXIT_OK
    } else {
        EXIT_FINDING
    };
    Ok(Outcome {
        report: new_report(
            "classify",
            Some(cfg),
            specs,
            Payload::Classify { points, summary },
        ),
        exit,
        text,
        table: Some(table),
    })
}

fn cmd_search(a: &args::SearchArgs, conf: &ConfigFile) -> Result<Outcome> {
    let spec = resolve_spec(&a.spec, conf)?;
    let axiom: AxiomId = conf
        .pick::<String>(&a.axiom, "axiom")?
        .ok_or_else(|| Error::BadConfig("--axiom is required".into()))?
        .parse()?;
    let base = CheckConfig {
        trials: SEARCH_TRIALS,
        hill_climb_steps: CheckConfig::default().hill_climb_steps * SEARCH_CLIMB_FACTOR,
        ..CheckConfig::default()
    };
    let cfg = resolve_config(&a.run, conf, base)?;
    let verdict = check_axiom(&spec, axiom, &cfg)?;

    let mut text = String::new();
    if verdict.witness.is_some() {
        report::verdict_text(&mut text, &verdict, "");
    } else {
        text = format!(
            "{} for {}: none in {} trials\n",
            axiom, spec, verdict.trials_run
        );
        if let Some(c) = verdict.constant {
            text.push_str(&format!("constant = {}\n", report::fmt_value(c)));
        }
    }
    let exit = if verdict.is_consistent() {
        EXIT_OK
    } else {
        EXIT_FINDING
    };
    Ok(Outcome {
        report: new_report("search", Some(cfg), vec![spec], Payload::Search { verdict }),
        exit,
        text,
        table: None,
    })
}
