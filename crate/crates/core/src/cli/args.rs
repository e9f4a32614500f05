use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::catalog::{EntropySpec, Eq10Variant, Family};
use crate::engine::CheckConfig;
use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "entropy-axioms",
    version,
    about = "Generalized entropies and axiom conformance checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate an entropy (or a conditional entropy) on distributions.
    Eval(EvalArgs),
    /// Run axiom suites or single axioms for one entropy.
    Check(CheckArgs),
    /// Classify families over a parameter grid and compare with the claim table.
    Classify(ClassifyArgs),
    /// Extended counterexample search for a single axiom.
    Search(SearchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
    Md,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        <Format as ValueEnum>::from_str(s, true)
            .map_err(|_| Error::BadConfig(format!("unknown format `{s}`")))
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct SpecArgs {
    /// Entropy family identifier, e.g. `tsallis`.
    #[arg(long)]
    pub family: Option<String>,
    /// Family parameter (beta or gamma).
    #[arg(long, allow_negative_numbers = true)]
    pub param: Option<f64>,
    /// Sign variant of hybrid_eq10: `corrected` or `as_printed`.
    #[arg(long)]
    pub variant: Option<String>,
    /// Positive multiplicative constant.
    #[arg(long, allow_negative_numbers = true)]
    pub scale: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long = "max-n")]
    pub max_n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "tol-eq")]
    pub tol_eq: Option<f64>,
    #[arg(long = "tol-violation")]
    pub tol_violation: Option<f64>,
    /// Hill-climbing steps applied to the worst violation.
    #[arg(long = "climb-steps")]
    pub climb_steps: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `key = value` file mirroring the flags; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Comma-separated weights, or a file with one distribution per line.
    #[arg(long, allow_hyphen_values = true)]
    pub dist: Option<String>,
    /// Conditional rows separated by `;`, each comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    pub cond: Option<String>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// upper, lower, weak-upper, weak-lower or all.
    #[arg(long)]
    pub suite: Option<String>,
    /// A single axiom instead of a suite.
    #[arg(long)]
    pub axiom: Option<String>,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub family: Option<String>,
    /// Classify every family over its default grid.
    #[arg(long)]
    pub all: bool,
    /// Comma-separated parameter values.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long)]
    pub variant: Option<String>,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long)]
    pub axiom: Option<String>,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

/// Parsed `key = value` configuration file. Keys use the flag names with
/// either `-` or `_`; `#` starts a comment.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    values: HashMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::BadConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::BadConfig(format!(
                    "line {}: expected key = value",
                    lineno + 1
                )));
            };
            let v = v.trim().trim_matches('"');
            values.insert(k.trim().replace('_', "-"), v.to_string());
        }
        Ok(ConfigFile { values })
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| Error::BadConfig(format!("config key `{key}`: cannot parse `{raw}`"))),
        }
    }

    /// The flag value if given, else the config value.
    pub fn pick<T: FromStr + Clone>(&self, flag: &Option<T>, key: &str) -> Result<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v.clone())),
            None => self.get(key),
        }
    }
}

pub fn resolve_spec(args: &SpecArgs, conf: &ConfigFile) -> Result<EntropySpec> {
    let family: String = conf
        .pick(&args.family, "family")?
        .ok_or_else(|| Error::BadParam("--family is required".into()))?;
    let family: Family = family.parse()?;
    let param: Option<f64> = conf.pick(&args.param, "param")?;
    let mut spec = EntropySpec::new(family, param)?;
    if let Some(scale) = conf.pick(&args.scale, "scale")? {
        spec = spec.with_scale(scale)?;
    }
    if let Some(v) = conf.pick::<String>(&args.variant, "variant")? {
        spec = spec.with_variant(v.parse::<Eq10Variant>()?)?;
    }
    Ok(spec)
}

pub fn resolve_config(args: &RunArgs, conf: &ConfigFile, base: CheckConfig) -> Result<CheckConfig> {
    let cfg = CheckConfig {
        trials: conf.pick(&args.trials, "trials")?.unwrap_or(base.trials),
        max_n: conf.pick(&args.max_n, "max-n")?.unwrap_or(base.max_n),
        seed: conf.pick(&args.seed, "seed")?.unwrap_or(base.seed),
        tol_eq: conf.pick(&args.tol_eq, "tol-eq")?.unwrap_or(base.tol_eq),
        tol_violation: conf
            .pick(&args.tol_violation, "tol-violation")?
            .unwrap_or(base.tol_violation),
        hill_climb_steps: conf
            .pick(&args.climb_steps, "climb-steps")?
            .unwrap_or(base.hill_climb_steps),
        max_n_uniform: base.max_n_uniform,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            let x = x.trim();
            x.parse::<f64>()
                .map_err(|_| Error::BadParam(format!("not a number: `{x}`")))
        })
        .collect()
}
