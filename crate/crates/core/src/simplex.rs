//! Finite probability distributions and the constructions the axiom
//! predicates are built from: refinement of one mass into parts, independent
//! products, joints through a conditional matrix, zero padding, permutation
//! and uniform sampling on the simplex.
//!
//! All indices are 0-based.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for normalization checks.
pub const TOL_NORM: f64 = 1e-12;

/// Weights below this are snapped to exact zero on construction.
pub const ZERO_SNAP: f64 = 1e-12;

/// Largest support accepted by [`Dist`].
pub const MAX_SUPPORT: usize = 1 << 16;

/// A point of the probability simplex.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Dist(Vec<f64>);

impl Dist {
    /// Validates `raw`, clamps it into `[0, 1]`, snaps tiny weights to zero
    /// and renormalizes to sum 1.
    pub fn new(raw: Vec<f64>) -> Result<Self> {
        check_len(raw.len())?;
        for (index, &value) in raw.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index, value });
            }
            if value < -TOL_NORM {
                return Err(Error::NegativeMass { index, value });
            }
        }
        let sum: f64 = raw.iter().sum();
        if (sum - 1.0).abs() > TOL_NORM {
            return Err(Error::BadNormalization { sum });
        }
        Ok(Self::normalize(raw))
    }

    /// Accepts weights that are already a valid distribution, without
    /// touching them. Used when reading stored witnesses back so that values
    /// survive a round trip bit for bit.
    pub fn from_normalized(weights: Vec<f64>) -> Result<Self> {
        check_len(weights.len())?;
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index, value });
            }
            if value < 0.0 {
                return Err(Error::NegativeMass { index, value });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > TOL_NORM {
            return Err(Error::BadNormalization { sum });
        }
        Ok(Dist(weights))
    }

    // Callers guarantee finiteness, non-negativity up to rounding and a sum
    // close to one.
    fn normalize(mut w: Vec<f64>) -> Self {
        for x in w.iter_mut() {
            if *x < ZERO_SNAP {
                *x = 0.0;
            } else if *x > 1.0 {
                *x = 1.0;
            }
        }
        let sum: f64 = w.iter().sum();
        if sum != 1.0 {
            w.iter_mut().for_each(|x| *x /= sum);
        }
        Dist(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when one weight carries all the mass.
    pub fn is_degenerate(&self) -> bool {
        self.0.iter().filter(|&&x| x > 0.0).count() == 1
    }

    pub fn min_weight(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_weight(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl<'de> Deserialize<'de> for Dist {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<f64>::deserialize(de)?;
        Dist::from_normalized(raw).map_err(serde::de::Error::custom)
    }
}

fn check_len(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::BadSize(
            "distribution must have at least one entry".into(),
        ));
    }
    if n > MAX_SUPPORT {
        return Err(Error::BadSize(format!("support {n} exceeds {MAX_SUPPORT}")));
    }
    Ok(())
}

/// Row-stochastic matrix: row `i` is the law of Y given X = x_i.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CondDist {
    rows: Vec<Dist>,
}

impl CondDist {
    pub fn new(rows: Vec<Dist>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::BadSize(
                "conditional distribution needs at least one row".into(),
            ));
        };
        let m = first.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != m) {
            return Err(Error::ShapeMismatch(format!(
                "row {i} has length {}, row 0 has length {m}",
                r.len()
            )));
        }
        Ok(CondDist { rows })
    }

    pub fn rows(&self) -> &[Dist] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.rows[0].len()
    }
}

impl<'de> Deserialize<'de> for CondDist {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            rows: Vec<Dist>,
        }
        let raw = Raw::deserialize(de)?;
        CondDist::new(raw.rows).map_err(serde::de::Error::custom)
    }
}

/// Splitting the mass at `index` of `parent` into `parts`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Refinement {
    parent: Dist,
    index: usize,
    parts: Vec<f64>,
}

impl Refinement {
    pub fn new(parent: Dist, index: usize, parts: Vec<f64>) -> Result<Self> {
        if index >= parent.len() {
            return Err(Error::BadIndex {
                index,
                len: parent.len(),
            });
        }
        if parts.is_empty() {
            return Err(Error::BadSize("refinement needs at least one part".into()));
        }
        for (i, &value) in parts.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index: i, value });
            }
            if value < 0.0 {
                return Err(Error::NegativeMass { index: i, value });
            }
        }
        let expected = parent.weights()[index];
        let total: f64 = parts.iter().sum();
        if (total - expected).abs() > TOL_NORM {
            return Err(Error::SplitMassMismatch {
                expected,
                parts: total,
            });
        }
        Ok(Refinement {
            parent,
            index,
            parts,
        })
    }

    pub fn parent(&self) -> &Dist {
        &self.parent
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn parts(&self) -> &[f64] {
        &self.parts
    }

    /// The split weight p_n.
    pub fn split_mass(&self) -> f64 {
        self.parent.weights()[self.index]
    }
}

impl<'de> Deserialize<'de> for Refinement {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            parent: Dist,
            index: usize,
            parts: Vec<f64>,
        }
        let raw = Raw::deserialize(de)?;
        Refinement::new(raw.parent, raw.index, raw.parts).map_err(serde::de::Error::custom)
    }
}

pub fn make_dist(raw: &[f64]) -> Result<Dist> {
    Dist::new(raw.to_vec())
}

pub fn uniform(n: usize) -> Result<Dist> {
    if n == 0 {
        return Err(Error::BadSize("uniform(0)".into()));
    }
    check_len(n)?;
    Ok(Dist(vec![1.0 / n as f64; n]))
}

/// Point mass at `k` on `n` states.
pub fn degenerate(n: usize, k: usize) -> Result<Dist> {
    check_len(n)?;
    if k >= n {
        return Err(Error::BadIndex { index: k, len: n });
    }
    let mut w = vec![0.0; n];
    w[k] = 1.0;
    Ok(Dist(w))
}

/// Parent with the mass at the split index replaced in place by the parts.
pub fn refine(r: &Refinement) -> Result<Dist> {
    let p = r.parent.weights();
    let mut w = Vec::with_capacity(p.len() + r.parts.len() - 1);
    w.extend_from_slice(&p[..r.index]);
    w.extend_from_slice(&r.parts);
    w.extend_from_slice(&p[r.index + 1..]);
    Dist::new(w)
}

/// The normalized split `(q_1/p_n, ..., q_m/p_n)`.
///
/// Fails with [`Error::ZeroMassSplit`] when p_n is zero; the bound term
/// `p_n * H(child)` is then taken to be 0.
pub fn conditional_child(r: &Refinement) -> Result<Dist> {
    let pn = r.split_mass();
    if pn <= TOL_NORM {
        return Err(Error::ZeroMassSplit { index: r.index });
    }
    let w: Vec<f64> = r.parts.iter().map(|q| q / pn).collect();
    Ok(Dist::normalize(w))
}

/// Independent joint `p_i q_j`, row-major.
pub fn product(p: &Dist, q: &Dist) -> Dist {
    let mut w = Vec::with_capacity(p.len() * q.len());
    for &a in p.weights() {
        w.extend(q.weights().iter().map(|&b| a * b));
    }
    Dist(w)
}

/// Joint `p_i p_ij`, row-major.
pub fn joint(p: &Dist, c: &CondDist) -> Result<Dist> {
    if c.n_rows() != p.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} conditional rows for a marginal of length {}",
            c.n_rows(),
            p.len()
        )));
    }
    let mut w = Vec::with_capacity(p.len() * c.n_cols());
    for (&a, row) in p.weights().iter().zip(c.rows()) {
        w.extend(row.weights().iter().map(|&b| a * b));
    }
    Ok(Dist(w))
}

/// Inserts a zero weight so that it lands at `position` (0..=len).
pub fn pad_zero(p: &Dist, position: usize) -> Result<Dist> {
    if position > p.len() {
        return Err(Error::BadIndex {
            index: position,
            len: p.len() + 1,
        });
    }
    check_len(p.len() + 1)?;
    let mut w = p.0.clone();
    w.insert(position, 0.0);
    Ok(Dist(w))
}

/// `out[i] = p[sigma[i]]`.
pub fn permute(p: &Dist, sigma: &[usize]) -> Result<Dist> {
    let n = p.len();
    if sigma.len() != n {
        return Err(Error::BadPermutation(sigma.to_vec()));
    }
    let mut seen = vec![false; n];
    for &s in sigma {
        if s >= n || seen[s] {
            return Err(Error::BadPermutation(sigma.to_vec()));
        }
        seen[s] = true;
    }
    Ok(Dist(sigma.iter().map(|&s| p.0[s]).collect()))
}

/// Uniform draw from the (n-1)-simplex: normalized standard exponentials.
pub fn sample_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Dist> {
    if n == 0 {
        return Err(Error::BadSize("cannot sample from an empty simplex".into()));
    }
    check_len(n)?;
    let e: Vec<f64> = (0..n).map(|_| standard_exponential(rng)).collect();
    let sum: f64 = e.iter().sum();
    Ok(Dist::normalize(e.into_iter().map(|x| x / sum).collect()))
}

/// Seeded convenience wrapper around [`sample_with`].
pub fn sample_random(n: usize, seed: u64) -> Result<Dist> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(n, &mut rng)
}

pub(crate) fn standard_exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // u in [0, 1), so 1 - u is in (0, 1]
    let u: f64 = rng.random();
    -(1.0 - u).ln()
}

/// Uniform random permutation of `0..n` (Fisher-Yates).
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut sigma: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        sigma.swap(i, j);
    }
    sigma
}
