//! Closed-form entropy functionals.
//!
//! Every family is evaluated in nats and multiplied by the spec's positive
//! `scale`. Zero weights contribute nothing (`0 ln 0 = 0`, `0^b = 0` for
//! `b > 0`), and parameters within [`LIMIT_WINDOW`] of 1 are routed to the
//! analytic `b -> 1` limit of the family instead of the singular formula.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::{product, CondDist, Dist};

/// Distance from 1 within which singular families use their limit.
pub const LIMIT_WINDOW: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Shannon,
    Tsallis,
    Daroczy,
    HybridEq10,
    Abe,
    Renyi,
    LandsbergVedral,
    PowerLogEq19,
    WeightedLogEq20,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::Shannon,
        Family::Tsallis,
        Family::Daroczy,
        Family::HybridEq10,
        Family::Abe,
        Family::Renyi,
        Family::LandsbergVedral,
        Family::PowerLogEq19,
        Family::WeightedLogEq20,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Shannon => "shannon",
            Family::Tsallis => "tsallis",
            Family::Daroczy => "daroczy",
            Family::HybridEq10 => "hybrid_eq10",
            Family::Abe => "abe",
            Family::Renyi => "renyi",
            Family::LandsbergVedral => "landsberg_vedral",
            Family::PowerLogEq19 => "power_log_eq19",
            Family::WeightedLogEq20 => "weighted_log_eq20",
        }
    }

    pub fn takes_param(self) -> bool {
        self != Family::Shannon
    }

    /// Families whose formula has a pole at parameter 1.
    pub fn is_singular_at_one(self) -> bool {
        !matches!(
            self,
            Family::Shannon | Family::PowerLogEq19 | Family::WeightedLogEq20
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::BadParam(format!("unknown family `{s}`")))
    }
}

/// Sign convention of the hybrid family's Shannon term.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Eq10Variant {
    /// Tsallis plus Shannon.
    #[default]
    Corrected,
    /// The formula exactly as typeset, which works out to Tsallis minus Shannon.
    AsPrinted,
}

impl Eq10Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Eq10Variant::Corrected => "corrected",
            Eq10Variant::AsPrinted => "as_printed",
        }
    }
}

impl FromStr for Eq10Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corrected" => Ok(Eq10Variant::Corrected),
            "as_printed" => Ok(Eq10Variant::AsPrinted),
            _ => Err(Error::BadParam(format!("unknown eq10 variant `{s}`"))),
        }
    }
}

/// An entropy family with its parameter, scale and (for the hybrid family)
/// sign variant. Construct through [`EntropySpec::new`] so the parameter
/// domain is checked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropySpec {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<f64>,
    pub scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eq10_variant: Option<Eq10Variant>,
}

impl EntropySpec {
    pub fn new(family: Family, param: Option<f64>) -> Result<Self> {
        let spec = EntropySpec {
            family,
            param,
            scale: 1.0,
            eq10_variant: (family == Family::HybridEq10).then_some(Eq10Variant::Corrected),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn shannon() -> Self {
        EntropySpec {
            family: Family::Shannon,
            param: None,
            scale: 1.0,
            eq10_variant: None,
        }
    }

    /// Shorthand for a parametrized family; panics on an invalid parameter.
    pub fn of(family: Family, param: f64) -> Self {
        Self::new(family, Some(param)).expect("valid entropy parameter")
    }

    pub fn with_scale(mut self, scale: f64) -> Result<Self> {
        self.scale = scale;
        self.validate()?;
        Ok(self)
    }

    pub fn with_variant(mut self, variant: Eq10Variant) -> Result<Self> {
        if self.family != Family::HybridEq10 {
            return Err(Error::BadParam(format!(
                "variant only applies to hybrid_eq10, not {}",
                self.family
            )));
        }
        self.eq10_variant = Some(variant);
        Ok(self)
    }

    pub fn variant(&self) -> Eq10Variant {
        self.eq10_variant.unwrap_or_default()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::BadParam(format!(
                "scale must be positive, got {}",
                self.scale
            )));
        }
        match (self.family.takes_param(), self.param) {
            (false, None) => Ok(()),
            (false, Some(_)) => Err(Error::BadParam("shannon takes no parameter".into())),
            (true, None) => Err(Error::BadParam(format!(
                "{} requires a parameter",
                self.family
            ))),
            (true, Some(b)) if b.is_finite() && b > 0.0 => Ok(()),
            (true, Some(b)) => Err(Error::BadParam(format!(
                "{} parameter must be finite and > 0, got {b}",
                self.family
            ))),
        }
    }

    /// True when evaluation is routed to the analytic limit at parameter 1.
    pub fn uses_limit(&self) -> bool {
        match self.param {
            Some(b) => self.family.is_singular_at_one() && (b - 1.0).abs() < LIMIT_WINDOW,
            None => false,
        }
    }

    /// Scaled entropy of `p`. Assumes the spec has been validated.
    pub fn eval(&self, p: &Dist) -> f64 {
        let w = p.weights();
        let raw = if self.uses_limit() {
            self.limit_value(w)
        } else {
            let b = self.param.unwrap_or(1.0);
            match self.family {
                Family::Shannon => shannon(w),
                Family::Tsallis => tsallis(w, b),
                Family::Daroczy => (1.0 - power_sum(w, b)) / (1.0 - 2f64.powf(1.0 - b)),
                Family::HybridEq10 => match self.variant() {
                    Eq10Variant::Corrected => tsallis(w, b) + shannon(w),
                    Eq10Variant::AsPrinted => hybrid_as_printed(w, b),
                },
                Family::Abe => (power_sum(w, b) - power_sum(w, 1.0 / b)) / (1.0 / b - b),
                Family::Renyi => power_sum(w, b).ln() / (1.0 - b),
                Family::LandsbergVedral => (1.0 / power_sum(w, b) - 1.0) / (b - 1.0),
                Family::PowerLogEq19 => {
                    let e = 1.0 / b;
                    ordered_sum(positive(w).map(|x| x * (-x.ln()).powf(e)))
                }
                Family::WeightedLogEq20 => ordered_sum(positive(w).map(|x| x.powf(b) * -x.ln())),
            }
        };
        // + 0.0 turns a signed zero into +0
        self.scale * raw + 0.0
    }

    fn limit_value(&self, w: &[f64]) -> f64 {
        let s = shannon(w);
        match self.family {
            Family::Daroczy => s / LN_2,
            Family::HybridEq10 => match self.variant() {
                Eq10Variant::Corrected => 2.0 * s,
                Eq10Variant::AsPrinted => 0.0,
            },
            _ => s,
        }
    }
}

impl fmt::Display for EntropySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        if let Some(b) = self.param {
            write!(f, "({b})")?;
        }
        if self.family == Family::HybridEq10 && self.variant() == Eq10Variant::AsPrinted {
            write!(f, "[as_printed]")?;
        }
        if self.scale != 1.0 {
            write!(f, "*{}", self.scale)?;
        }
        Ok(())
    }
}

/// An evaluated entropy together with what produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyValue {
    pub value: f64,
    pub spec: EntropySpec,
    pub dist_size: usize,
}

pub fn evaluate(spec: &EntropySpec, p: &Dist) -> Result<EntropyValue> {
    spec.validate()?;
    Ok(EntropyValue {
        value: spec.eval(p),
        spec: *spec,
        dist_size: p.len(),
    })
}

/// `sum_i p_i H(row_i)`; rows with zero weight contribute nothing.
pub fn conditional_entropy(spec: &EntropySpec, p: &Dist, c: &CondDist) -> Result<f64> {
    spec.validate()?;
    if c.n_rows() != p.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} conditional rows for a marginal of length {}",
            c.n_rows(),
            p.len()
        )));
    }
    Ok(conditional_entropy_unchecked(spec, p, c))
}

pub(crate) fn conditional_entropy_unchecked(spec: &EntropySpec, p: &Dist, c: &CondDist) -> f64 {
    p.weights()
        .iter()
        .zip(c.rows())
        .filter(|(&pi, _)| pi > 0.0)
        .fold(0.0, |acc, (&pi, row)| acc + pi * spec.eval(row))
}

/// Absolute residuals of the closed-form identities relating the families,
/// all at unit scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityResiduals {
    /// Abe(b) against `b/(b+1) Tsallis(b) + 1/(b+1) Tsallis(1/b)` on `p`.
    pub abe_decomposition: f64,
    /// Tsallis on `p x q` against `H(p) + H(q) + (1-b) H(p) H(q)`.
    pub tsallis_pseudoadditivity: f64,
    /// Daroczy(b) against `(b-1)/(1-2^(1-b)) Tsallis(b)` on `p`.
    pub daroczy_tsallis: f64,
    /// Renyi on `p x q` against `H(p) + H(q)`.
    pub renyi_additivity: f64,
    /// Weighted-log on `p x q` against `(sum q^b) H(p) + (sum p^b) H(q)`.
    pub weighted_log_product: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.named().iter().map(|(_, r)| *r).fold(0.0, f64::max)
    }

    pub fn named(&self) -> [(&'static str, f64); 5] {
        [
            ("abe_decomposition", self.abe_decomposition),
            ("tsallis_pseudoadditivity", self.tsallis_pseudoadditivity),
            ("daroczy_tsallis", self.daroczy_tsallis),
            ("renyi_additivity", self.renyi_additivity),
            ("weighted_log_product", self.weighted_log_product),
        ]
    }
}

pub fn identity_residuals(beta: f64, p: &Dist, q: &Dist) -> Result<IdentityResiduals> {
    if !(beta.is_finite() && beta > 0.0) || (beta - 1.0).abs() < LIMIT_WINDOW {
        return Err(Error::BadParam(format!(
            "identities need a parameter > 0 away from 1, got {beta}"
        )));
    }
    let at = |f| EntropySpec::of(f, beta);
    let tsallis_b = at(Family::Tsallis);
    let tsallis_inv = EntropySpec::of(Family::Tsallis, 1.0 / beta);
    let pq = product(p, q);

    let abe = at(Family::Abe).eval(p);
    let abe_rhs =
        beta / (beta + 1.0) * tsallis_b.eval(p) + 1.0 / (beta + 1.0) * tsallis_inv.eval(p);

    let (ta, tb) = (tsallis_b.eval(p), tsallis_b.eval(q));
    let pseudo_rhs = ta + tb + (1.0 - beta) * ta * tb;

    let factor = (beta - 1.0) / (1.0 - 2f64.powf(1.0 - beta));

    let renyi = at(Family::Renyi);
    let wl = at(Family::WeightedLogEq20);
    let wl_rhs =
        power_sum(q.weights(), beta) * wl.eval(p) + power_sum(p.weights(), beta) * wl.eval(q);

    Ok(IdentityResiduals {
        abe_decomposition: (abe - abe_rhs).abs(),
        tsallis_pseudoadditivity: (tsallis_b.eval(&pq) - pseudo_rhs).abs(),
        daroczy_tsallis: (at(Family::Daroczy).eval(p) - factor * ta).abs(),
        renyi_additivity: (renyi.eval(&pq) - renyi.eval(p) - renyi.eval(q)).abs(),
        weighted_log_product: (wl.eval(&pq) - wl_rhs).abs(),
    })
}

/// Adds the terms in ascending order, so the result does not depend on the
/// order of the weights.
fn ordered_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let mut t: Vec<f64> = terms.collect();
    t.sort_unstable_by(f64::total_cmp);
    t.iter().sum()
}

fn positive(w: &[f64]) -> impl Iterator<Item = f64> + '_ {
    w.iter().copied().filter(|&x| x > 0.0)
}

/// `sum p_i^b` over strictly positive weights.
pub fn power_sum(w: &[f64], b: f64) -> f64 {
    ordered_sum(positive(w).map(|x| x.powf(b)))
}

/// Unscaled Shannon entropy in nats.
pub fn shannon(w: &[f64]) -> f64 {
    ordered_sum(positive(w).map(|x| x * -x.ln()))
}

fn tsallis(w: &[f64], b: f64) -> f64 {
    (1.0 - power_sum(w, b)) / (b - 1.0)
}

fn hybrid_as_printed(w: &[f64], b: f64) -> f64 {
    let inner = ordered_sum(positive(w).map(|x| x.powf(b) - (b - 1.0) * x * x.ln()));
    (1.0 - inner) / (b - 1.0)
}
