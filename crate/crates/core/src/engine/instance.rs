//! Trial instances, their generation, and predicate evaluation.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AxiomId, CheckConfig};
use crate::catalog::{conditional_entropy_unchecked, shannon, EntropySpec};
use crate::error::{Error, Result};
use crate::simplex::{
    conditional_child, joint, pad_zero, permute, product, random_permutation, refine, sample_with,
    uniform, CondDist, Dist, Refinement,
};

/// Entries of non-degenerate probes for `zero_iff_degenerate` are at least this.
pub const NON_DEGENERATE_FLOOR: f64 = 0.01;

/// Step sizes probed by `continuity_smoke`, largest first.
pub const CONTINUITY_STEPS: [f64; 3] = [1e-3, 1e-4, 1e-5];

/// The concrete inputs of one predicate evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Instance {
    /// A point mass; the entropy must vanish.
    Degenerate {
        dist: Dist,
    },
    /// A distribution bounded away from every vertex; the entropy must not vanish.
    NonDegenerate {
        dist: Dist,
    },
    Permuted {
        dist: Dist,
        sigma: Vec<usize>,
    },
    Refinement(Refinement),
    /// A distribution compared against the uniform law of the same size.
    Sized {
        dist: Dist,
    },
    Padded {
        dist: Dist,
        position: usize,
    },
    PermutedPadded {
        dist: Dist,
        sigma: Vec<usize>,
        position: usize,
    },
    Product {
        p: Dist,
        q: Dist,
    },
    Joint {
        p: Dist,
        cond: CondDist,
    },
    /// Uniform laws on `n < m` states.
    UniformPair {
        n: usize,
        m: usize,
    },
    Tangent {
        dist: Dist,
        direction: Vec<f64>,
    },
    Single {
        dist: Dist,
    },
}

/// How `lhs` and `rhs` are supposed to relate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// lhs <= rhs; margin = lhs - rhs.
    Le,
    /// lhs >= rhs; margin = rhs - lhs.
    Ge,
    /// lhs == rhs; margin = |lhs - rhs|.
    Eq,
    /// lhs = |H| must exceed rhs = tol_violation; margin is the distance of
    /// the distribution from the nearest vertex when it does not.
    NonZero,
    /// lhs is the perturbation response at a smaller step, rhs at the next
    /// larger step; lhs <= rhs.
    Shrinks,
}

/// Result of evaluating a predicate on one instance. Positive margins are
/// violations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub relation: Relation,
}

impl Outcome {
    fn le(lhs: f64, rhs: f64) -> Self {
        Outcome {
            lhs,
            rhs,
            margin: lhs - rhs,
            relation: Relation::Le,
        }
    }

    fn ge(lhs: f64, rhs: f64) -> Self {
        Outcome {
            lhs,
            rhs,
            margin: rhs - lhs,
            relation: Relation::Ge,
        }
    }

    fn eq(lhs: f64, rhs: f64) -> Self {
        Outcome {
            lhs,
            rhs,
            margin: (lhs - rhs).abs(),
            relation: Relation::Eq,
        }
    }

    /// `|lhs - rhs|`, the size of the gap regardless of direction.
    pub fn gap(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// Evaluates the predicate of `axiom` on `instance`.
pub fn evaluate_instance(
    spec: &EntropySpec,
    axiom: AxiomId,
    instance: &Instance,
    cfg: &CheckConfig,
) -> Result<Outcome> {
    let h = |p: &Dist| spec.eval(p);
    let mismatch = || {
        Err(Error::ShapeMismatch(format!(
            "instance kind does not fit axiom {}",
            axiom.as_str()
        )))
    };
    use AxiomId as A;
    let out = match (axiom, instance) {
        (A::ZeroIffDegenerate, Instance::Degenerate { dist }) => Outcome::eq(h(dist), 0.0),
        (A::ZeroIffDegenerate, Instance::NonDegenerate { dist }) => {
            let lhs = h(dist).abs();
            let margin = if lhs <= cfg.tol_violation {
                1.0 - dist.max_weight()
            } else {
                -lhs
            };
            Outcome {
                lhs,
                rhs: cfg.tol_violation,
                margin,
                relation: Relation::NonZero,
            }
        }
        (A::Symmetry, Instance::Permuted { dist, sigma }) => {
            Outcome::eq(h(&permute(dist, sigma)?), h(dist))
        }
        (A::UpperIncreasing | A::LowerIncreasing, Instance::Refinement(r)) => {
            let parent = h(r.parent());
            let increment = h(&refine(r)?) - parent;
            let bound = match conditional_child(r) {
                Ok(child) => r.split_mass() * h(&child),
                Err(Error::ZeroMassSplit { .. }) => 0.0,
                Err(e) => return Err(e),
            };
            if axiom == A::LowerIncreasing {
                Outcome::ge(increment, bound)
            } else {
                let above = Outcome::le(increment, bound);
                let below = Outcome::ge(increment, 0.0);
                if below.margin > above.margin {
                    below
                } else {
                    above
                }
            }
        }
        (A::Maximum, Instance::Sized { dist }) => Outcome::le(h(dist), h(&uniform(dist.len())?)),
        (A::Expansibility, Instance::Padded { dist, position }) => {
            Outcome::eq(h(&pad_zero(dist, *position)?), h(dist))
        }
        (
            A::SymmetricExpansibility,
            Instance::PermutedPadded {
                dist,
                sigma,
                position,
            },
        ) => Outcome::eq(h(&pad_zero(&permute(dist, sigma)?, *position)?), h(dist)),
        (A::UpperSubadditivity | A::WeakSubadditivity, Instance::Product { p, q }) => {
            Outcome::le(h(&product(p, q)), h(p) + h(q))
        }
        (A::WeakSuperadditivity, Instance::Product { p, q }) => {
            Outcome::ge(h(&product(p, q)), h(p) + h(q))
        }
        (
            A::UpperStrongSubadditivity | A::LowerStrongSubadditivity,
            Instance::Joint { p, cond },
        ) => {
            let lhs = h(&joint(p, cond)?);
            let rhs = h(p) + conditional_entropy_unchecked(spec, p, cond);
            if axiom == A::UpperStrongSubadditivity {
                Outcome::le(lhs, rhs)
            } else {
                Outcome::ge(lhs, rhs)
            }
        }
        (A::ExtremalMonotonicity, Instance::UniformPair { n, m }) => {
            if n >= m {
                return Err(Error::BadSize(format!(
                    "uniform pair needs n < m, got {n}, {m}"
                )));
            }
            Outcome::le(h(&uniform(*n)?), h(&uniform(*m)?))
        }
        (A::ContinuitySmoke, Instance::Tangent { dist, direction }) => {
            continuity_response(spec, dist, direction)?
        }
        (A::ShannonEquivalence, Instance::Single { dist }) => {
            let c = spec.eval(&uniform(2)?) / std::f64::consts::LN_2;
            let lhs = h(dist);
            let rhs = c * shannon(dist.weights());
            Outcome {
                lhs,
                rhs,
                margin: (lhs - rhs).abs() / (1.0 + c.abs()),
                relation: Relation::Eq,
            }
        }
        _ => return mismatch(),
    };
    Ok(out)
}

fn continuity_response(spec: &EntropySpec, p: &Dist, d: &[f64]) -> Result<Outcome> {
    if d.len() != p.len() {
        return Err(Error::ShapeMismatch(
            "direction length differs from distribution".into(),
        ));
    }
    let base = spec.eval(p);
    let mut responses = [0.0; CONTINUITY_STEPS.len()];
    for (r, t) in responses.iter_mut().zip(CONTINUITY_STEPS) {
        let moved: Vec<f64> = p
            .weights()
            .iter()
            .zip(d)
            .map(|(x, dx)| x + t * dx)
            .collect();
        *r = (spec.eval(&Dist::new(moved)?) - base).abs();
    }
    let worst = responses
        .windows(2)
        .map(|w| Outcome {
            lhs: w[1],
            rhs: w[0],
            margin: w[1] - w[0],
            relation: Relation::Shrinks,
        })
        .fold(None::<Outcome>, |best, o| match best {
            Some(b) if b.margin >= o.margin => Some(b),
            _ => Some(o),
        });
    Ok(worst.expect("at least two continuity steps"))
}

/// Deterministic cases tried before any random trial.
pub fn seed_instances(axiom: AxiomId, cfg: &CheckConfig) -> Vec<Instance> {
    use AxiomId as A;
    let dists = seed_dists(cfg.max_n);
    let mut out = Vec::new();
    match axiom {
        A::ZeroIffDegenerate => {
            for n in 1..=cfg.max_n {
                for k in 0..n {
                    out.push(Instance::Degenerate {
                        dist: crate::simplex::degenerate(n, k).unwrap(),
                    });
                }
            }
            out.push(Instance::NonDegenerate { dist: two_atom() });
            for n in 2..=cfg.max_n {
                out.push(Instance::NonDegenerate {
                    dist: uniform(n).unwrap(),
                });
            }
        }
        A::Symmetry => {
            for dist in dists {
                let n = dist.len();
                let sigma: Vec<usize> = (0..n).rev().collect();
                out.push(Instance::Permuted { dist, sigma });
            }
        }
        A::UpperIncreasing | A::LowerIncreasing => out.extend(seed_refinements(cfg.max_n)),
        A::Maximum => {
            out.extend(dists.into_iter().map(|dist| Instance::Sized { dist }));
            // uniform on n - 1 states padded to n, for every size the
            // monotonicity scan covers
            for n in cfg.max_n + 1..=cfg.max_n_uniform {
                let mut w = vec![1.0 / (n - 1) as f64; n - 1];
                w.push(0.0);
                out.push(Instance::Sized {
                    dist: Dist::from_normalized(w).unwrap(),
                });
            }
        }
        A::Expansibility => {
            for dist in dists {
                let n = dist.len();
                out.push(Instance::Padded {
                    dist: dist.clone(),
                    position: 0,
                });
                out.push(Instance::Padded { dist, position: n });
            }
        }
        A::SymmetricExpansibility => {
            for dist in dists {
                let n = dist.len();
                let sigma: Vec<usize> = (0..n).rev().collect();
                out.push(Instance::PermutedPadded {
                    dist,
                    sigma,
                    position: n,
                });
            }
        }
        A::UpperSubadditivity | A::WeakSubadditivity | A::WeakSuperadditivity => {
            let small: Vec<Dist> = [
                uniform(2).unwrap(),
                two_atom(),
                near_degenerate(2, 1e-3),
                uniform(cfg.max_n.min(4)).unwrap(),
            ]
            .into();
            for p in &small {
                for q in &small {
                    out.push(Instance::Product {
                        p: p.clone(),
                        q: q.clone(),
                    });
                }
            }
        }
        A::UpperStrongSubadditivity | A::LowerStrongSubadditivity => {
            let half = uniform(2).unwrap();
            let rows = |r: &[&[f64]]| {
                CondDist::new(r.iter().map(|w| Dist::new(w.to_vec()).unwrap()).collect()).unwrap()
            };
            out.push(Instance::Joint {
                p: half.clone(),
                cond: rows(&[&[1.0, 0.0], &[0.0, 1.0]]),
            });
            out.push(Instance::Joint {
                p: half.clone(),
                cond: rows(&[&[0.5, 0.5], &[0.5, 0.5]]),
            });
            out.push(Instance::Joint {
                p: half,
                cond: rows(&[&[0.5, 0.5], &[1.0, 0.0]]),
            });
            out.push(Instance::Joint {
                p: two_atom(),
                cond: rows(&[&[0.9, 0.1], &[0.1, 0.9]]),
            });
            out.push(Instance::Joint {
                p: two_atom(),
                cond: rows(&[&[1.0, 0.0], &[0.5, 0.5]]),
            });
        }
        A::ExtremalMonotonicity => {
            for n in 1..=cfg.max_n_uniform {
                out.push(Instance::UniformPair { n, m: n + 1 });
            }
        }
        A::ContinuitySmoke => {
            for n in 2..=cfg.max_n {
                let mut direction = vec![0.0; n];
                direction[0] = 1.0;
                direction[n - 1] = -1.0;
                out.push(Instance::Tangent {
                    dist: uniform(n).unwrap(),
                    direction,
                });
            }
        }
        A::ShannonEquivalence => {
            out.extend(dists.into_iter().map(|dist| Instance::Single { dist }))
        }
    }
    out
}

fn two_atom() -> Dist {
    Dist::new(vec![0.9, 0.1]).unwrap()
}

/// `(1 - eps, eps/(n-1), ...)`.
fn near_degenerate(n: usize, eps: f64) -> Dist {
    let mut w = vec![eps / (n - 1) as f64; n];
    w[0] = 1.0 - eps;
    Dist::new(w).unwrap()
}

/// Uniform points, near-vertex points, the skewed two-atom point, and
/// uniform laws on a sub-support padded with zeros.
fn seed_dists(max_n: usize) -> Vec<Dist> {
    let mut v = vec![two_atom()];
    for n in 2..=max_n {
        v.push(uniform(n).unwrap());
        v.push(near_degenerate(n, 1e-3));
    }
    for n in 3..=max_n {
        for k in 2..n {
            let mut w = vec![0.0; n];
            w[..k].iter_mut().for_each(|x| *x = 1.0 / k as f64);
            v.push(Dist::from_normalized(w).unwrap());
        }
    }
    v
}

fn split(parent: Dist, index: usize, child: &[f64]) -> Instance {
    let pn = parent.weights()[index];
    let parts = child.iter().map(|c| c * pn).collect();
    Instance::Refinement(Refinement::new(parent, index, parts).unwrap())
}

fn seed_refinements(max_n: usize) -> Vec<Instance> {
    let halves = [0.5, 0.5];
    let mut out = vec![
        split(two_atom(), 0, &halves),
        split(two_atom(), 1, &halves),
        split(uniform(2).unwrap(), 1, &halves),
        split(near_degenerate(2, 1e-3), 0, &halves),
        split(near_degenerate(2, 1e-3), 1, &halves),
        split(two_atom(), 0, &[0.9, 0.1]),
    ];
    for m in 2..=max_n {
        let child = vec![1.0 / m as f64; m];
        out.push(split(Dist::new(vec![1.0]).unwrap(), 0, &child));
        out.push(split(uniform(m).unwrap(), 0, &child));
    }
    out
}

/// The random trial instance for `axiom`.
pub fn random_instance(axiom: AxiomId, cfg: &CheckConfig, rng: &mut ChaCha8Rng) -> Instance {
    use AxiomId as A;
    let size = |rng: &mut ChaCha8Rng| rng.random_range(2..=cfg.max_n);
    let dist = |rng: &mut ChaCha8Rng| {
        let n = size(rng);
        sample_with(n, rng).unwrap()
    };
    match axiom {
        A::ZeroIffDegenerate => Instance::NonDegenerate {
            dist: floored(dist(rng)),
        },
        A::Symmetry => {
            let dist = dist(rng);
            let sigma = random_permutation(dist.len(), rng);
            Instance::Permuted { dist, sigma }
        }
        A::UpperIncreasing | A::LowerIncreasing => {
            let parent = dist(rng);
            let index = rng.random_range(0..parent.len());
            let m = size(rng);
            let child = sample_with(m, rng).unwrap();
            split(parent, index, child.weights())
        }
        A::Maximum => Instance::Sized { dist: dist(rng) },
        A::Expansibility => {
            let dist = dist(rng);
            let position = rng.random_range(0..=dist.len());
            Instance::Padded { dist, position }
        }
        A::SymmetricExpansibility => {
            let dist = dist(rng);
            let sigma = random_permutation(dist.len(), rng);
            let position = rng.random_range(0..=dist.len());
            Instance::PermutedPadded {
                dist,
                sigma,
                position,
            }
        }
        A::UpperSubadditivity | A::WeakSubadditivity | A::WeakSuperadditivity => {
            let p = dist(rng);
            let q = dist(rng);
            Instance::Product { p, q }
        }
        A::UpperStrongSubadditivity | A::LowerStrongSubadditivity => {
            let p = dist(rng);
            let m = size(rng);
            let rows = (0..p.len()).map(|_| sample_with(m, rng).unwrap()).collect();
            Instance::Joint {
                p,
                cond: CondDist::new(rows).unwrap(),
            }
        }
        A::ExtremalMonotonicity => {
            let n = rng.random_range(1..=cfg.max_n_uniform);
            let m = rng.random_range(n + 1..=cfg.max_n_uniform + 1);
            Instance::UniformPair { n, m }
        }
        A::ContinuitySmoke => {
            let dist = floored(dist(rng));
            let mut direction: Vec<f64> = (0..dist.len())
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            let mean = direction.iter().sum::<f64>() / direction.len() as f64;
            direction.iter_mut().for_each(|x| *x -= mean);
            let scale = direction.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            if scale > 0.0 {
                direction.iter_mut().for_each(|x| *x /= scale);
            }
            Instance::Tangent { dist, direction }
        }
        A::ShannonEquivalence => Instance::Single { dist: dist(rng) },
    }
}

/// Mixes `p` toward uniform so every entry is at least [`NON_DEGENERATE_FLOOR`].
fn floored(p: Dist) -> Dist {
    let n = p.len() as f64;
    let keep = 1.0 - NON_DEGENERATE_FLOOR * n;
    Dist::new(
        p.weights()
            .iter()
            .map(|x| NON_DEGENERATE_FLOOR + keep * x)
            .collect(),
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Family;
    use crate::simplex::make_dist;

    fn cfg() -> CheckConfig {
        CheckConfig::default()
    }

    #[test]
    fn renyi_seed_witness_margin() {
        // parent (0.9, 0.1), first mass split in halves
        let spec = EntropySpec::of(Family::Renyi, 2.0);
        let inst = split(make_dist(&[0.9, 0.1]).unwrap(), 0, &[0.5, 0.5]);
        let o = evaluate_instance(&spec, AxiomId::UpperIncreasing, &inst, &cfg()).unwrap();
        // independent evaluation of ln-power-sum form
        let increment = -(0.415f64).ln() + (0.82f64).ln();
        let bound = 0.9 * std::f64::consts::LN_2;
        assert!((o.lhs - increment).abs() < 1e-12);
        assert!((o.rhs - bound).abs() < 1e-12);
        assert!((o.margin - 0.057190).abs() < 1e-5, "{}", o.margin);
        assert_eq!(o.relation, Relation::Le);
    }

    #[test]
    fn seeds_fit_their_axiom() {
        let spec = EntropySpec::of(Family::Tsallis, 2.0);
        for axiom in AxiomId::ALL {
            let seeds = seed_instances(axiom, &cfg());
            assert!(!seeds.is_empty(), "{axiom:?}");
            for s in seeds {
                evaluate_instance(&spec, axiom, &s, &cfg()).unwrap();
            }
        }
    }

    #[test]
    fn random_instances_fit_their_axiom() {
        use rand::SeedableRng;
        let spec = EntropySpec::of(Family::Abe, 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for axiom in AxiomId::ALL {
            for _ in 0..50 {
                let inst = random_instance(axiom, &cfg(), &mut rng);
                evaluate_instance(&spec, axiom, &inst, &cfg()).unwrap();
            }
        }
    }

    #[test]
    fn mismatched_instance_is_rejected() {
        let spec = EntropySpec::shannon();
        let inst = Instance::Single {
            dist: make_dist(&[1.0]).unwrap(),
        };
        assert!(evaluate_instance(&spec, AxiomId::Maximum, &inst, &cfg()).is_err());
    }

    #[test]
    fn zero_mass_split_bound_is_zero() {
        let spec = EntropySpec::of(Family::Tsallis, 2.0);
        let r = Refinement::new(make_dist(&[1.0, 0.0]).unwrap(), 1, vec![0.0, 0.0]).unwrap();
        let o = evaluate_instance(
            &spec,
            AxiomId::UpperIncreasing,
            &Instance::Refinement(r),
            &cfg(),
        )
        .unwrap();
        assert_eq!(o.lhs, 0.0);
        assert_eq!(o.rhs, 0.0);
    }

    #[test]
    fn floored_respects_floor() {
        let p = floored(make_dist(&[1.0, 0.0, 0.0]).unwrap());
        assert!(p.min_weight() >= NON_DEGENERATE_FLOOR - 1e-15);
    }
}
