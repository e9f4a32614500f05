//! Margin-maximizing local search over witness instances.
//!
//! Each step perturbs one distribution inside the instance by moving a random
//! fraction of one coordinate's mass onto another, which keeps the point on
//! the simplex. Refinement parts are rescaled whenever the split weight moves
//! so the split-mass constraint keeps holding. Only strict margin increases
//! are accepted.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::instance::{evaluate_instance, Instance, Outcome};
use super::{AxiomId, CheckConfig};
use crate::catalog::EntropySpec;
use crate::simplex::{CondDist, Dist, Refinement};

const INITIAL_STEP: f64 = 0.25;
const MIN_STEP: f64 = 1e-9;

/// Result of a climb: the best instance seen, its outcome and the number of
/// accepted moves.
#[derive(Debug, Clone)]
pub struct Climbed {
    pub instance: Instance,
    pub outcome: Outcome,
    pub accepted: usize,
}

pub fn hill_climb(
    spec: &EntropySpec,
    axiom: AxiomId,
    start: Instance,
    start_outcome: Outcome,
    cfg: &CheckConfig,
    steps: usize,
    rng: &mut ChaCha8Rng,
) -> Climbed {
    let mut best = Climbed {
        instance: start,
        outcome: start_outcome,
        accepted: 0,
    };
    let mut step = INITIAL_STEP;
    for _ in 0..steps {
        let Some(candidate) = perturb(&best.instance, step, cfg, rng) else {
            break;
        };
        let improved = match evaluate_instance(spec, axiom, &candidate, cfg) {
            Ok(o) if o.margin.is_finite() && o.margin > best.outcome.margin => Some(o),
            _ => None,
        };
        match improved {
            Some(outcome) => {
                best.instance = candidate;
                best.outcome = outcome;
                best.accepted += 1;
                step = (step * 1.5).min(1.0);
            }
            None => {
                step *= 0.8;
                if step < MIN_STEP {
                    step = INITIAL_STEP;
                }
            }
        }
    }
    best
}

/// Moves `step * u * p[j]` from coordinate `j` to coordinate `i`.
fn shift_mass(p: &Dist, step: f64, rng: &mut ChaCha8Rng) -> Option<Dist> {
    let n = p.len();
    if n < 2 {
        return None;
    }
    let j = rng.random_range(0..n);
    let mut i = rng.random_range(0..n - 1);
    if i >= j {
        i += 1;
    }
    let mut w = p.weights().to_vec();
    let delta = step * rng.random::<f64>() * w[j];
    w[j] -= delta;
    w[i] += delta;
    Dist::new(w).ok()
}

fn shift_parts(parts: &[f64], step: f64, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    let total: f64 = parts.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let shape = Dist::new(parts.iter().map(|x| x / total).collect()).ok()?;
    let moved = shift_mass(&shape, step, rng)?;
    Some(moved.weights().iter().map(|x| x * total).collect())
}

fn perturb_refinement(r: &Refinement, step: f64, rng: &mut ChaCha8Rng) -> Option<Refinement> {
    if rng.random_bool(0.5) || r.parts().len() < 2 {
        let parent = shift_mass(r.parent(), step, rng)?;
        let old = r.split_mass();
        let new = parent.weights()[r.index()];
        let parts: Vec<f64> = if old > 0.0 {
            r.parts().iter().map(|x| x / old * new).collect()
        } else {
            let m = r.parts().len() as f64;
            vec![new / m; r.parts().len()]
        };
        Refinement::new(parent, r.index(), parts).ok()
    } else {
        let parts = shift_parts(r.parts(), step, rng)?;
        let total: f64 = parts.iter().sum();
        let pn = r.split_mass();
        let parts = parts.iter().map(|x| x / total * pn).collect();
        Refinement::new(r.parent().clone(), r.index(), parts).ok()
    }
}

fn perturb(
    inst: &Instance,
    step: f64,
    cfg: &CheckConfig,
    rng: &mut ChaCha8Rng,
) -> Option<Instance> {
    Some(match inst {
        // a point mass has nothing to move; the non-degenerate probe is a
        // yes/no condition
        Instance::Degenerate { .. } | Instance::NonDegenerate { .. } => return None,
        Instance::Permuted { dist, sigma } => Instance::Permuted {
            dist: shift_mass(dist, step, rng)?,
            sigma: sigma.clone(),
        },
        Instance::Refinement(r) => Instance::Refinement(perturb_refinement(r, step, rng)?),
        Instance::Sized { dist } => Instance::Sized {
            dist: shift_mass(dist, step, rng)?,
        },
        Instance::Padded { dist, position } => Instance::Padded {
            dist: shift_mass(dist, step, rng)?,
            position: *position,
        },
        Instance::PermutedPadded {
            dist,
            sigma,
            position,
        } => Instance::PermutedPadded {
            dist: shift_mass(dist, step, rng)?,
            sigma: sigma.clone(),
            position: *position,
        },
        Instance::Product { p, q } => {
            if rng.random_bool(0.5) {
                Instance::Product {
                    p: shift_mass(p, step, rng)?,
                    q: q.clone(),
                }
            } else {
                Instance::Product {
                    p: p.clone(),
                    q: shift_mass(q, step, rng)?,
                }
            }
        }
        Instance::Joint { p, cond } => {
            let pick = rng.random_range(0..=cond.n_rows());
            if pick == cond.n_rows() {
                Instance::Joint {
                    p: shift_mass(p, step, rng)?,
                    cond: cond.clone(),
                }
            } else {
                let mut rows = cond.rows().to_vec();
                rows[pick] = shift_mass(&rows[pick], step, rng)?;
                Instance::Joint {
                    p: p.clone(),
                    cond: CondDist::new(rows).ok()?,
                }
            }
        }
        Instance::UniformPair { n, m } => {
            let top = cfg.max_n_uniform + 1;
            let (mut n, mut m) = (*n, *m);
            match rng.random_range(0..4) {
                0 => n = n.saturating_sub(1).max(1),
                1 => n += 1,
                2 => m -= 1,
                _ => m = (m + 1).min(top),
            }
            if n >= m {
                return None;
            }
            Instance::UniformPair { n, m }
        }
        Instance::Tangent { dist, direction } => Instance::Tangent {
            dist: shift_mass(dist, step, rng)?,
            direction: direction.clone(),
        },
        Instance::Single { dist } => Instance::Single {
            dist: shift_mass(dist, step, rng)?,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Family;
    use crate::simplex::make_dist;
    use rand::SeedableRng;

    fn renyi_seed() -> Instance {
        let parent = make_dist(&[0.9, 0.1]).unwrap();
        Instance::Refinement(Refinement::new(parent, 0, vec![0.45, 0.45]).unwrap())
    }

    #[test]
    fn margin_never_decreases() {
        let spec = EntropySpec::of(Family::Renyi, 2.0);
        let cfg = CheckConfig::default();
        let start = renyi_seed();
        let o = evaluate_instance(&spec, AxiomId::UpperIncreasing, &start, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = hill_climb(
            &spec,
            AxiomId::UpperIncreasing,
            start,
            o,
            &cfg,
            200,
            &mut rng,
        );
        assert!(c.outcome.margin >= o.margin);
        assert!(c.outcome.margin >= 0.0572);
        // the stored instance reproduces the reported outcome
        let again = evaluate_instance(&spec, AxiomId::UpperIncreasing, &c.instance, &cfg).unwrap();
        assert_eq!(again, c.outcome);
    }

    #[test]
    fn zero_steps_returns_input() {
        let spec = EntropySpec::of(Family::Renyi, 2.0);
        let cfg = CheckConfig::default();
        let start = renyi_seed();
        let o = evaluate_instance(&spec, AxiomId::UpperIncreasing, &start, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = hill_climb(
            &spec,
            AxiomId::UpperIncreasing,
            start.clone(),
            o,
            &cfg,
            0,
            &mut rng,
        );
        assert_eq!(c.instance, start);
        assert_eq!(c.outcome, o);
        assert_eq!(c.accepted, 0);
    }

    #[test]
    fn tiny_margin_is_not_lost() {
        // Abe near its crossover: start from a barely violating refinement
        let spec = EntropySpec::of(Family::Abe, 2.0);
        let cfg = CheckConfig::default();
        let parent = make_dist(&[0.5, 0.5]).unwrap();
        let start = Instance::Refinement(Refinement::new(parent, 0, vec![0.25, 0.25]).unwrap());
        let o = evaluate_instance(&spec, AxiomId::LowerIncreasing, &start, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = hill_climb(
            &spec,
            AxiomId::LowerIncreasing,
            start,
            o,
            &cfg,
            50,
            &mut rng,
        );
        assert!(c.outcome.margin >= o.margin);
    }

    #[test]
    fn refinement_moves_keep_split_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let Instance::Refinement(mut r) = renyi_seed() else {
            unreachable!()
        };
        for _ in 0..500 {
            if let Some(next) = perturb_refinement(&r, 0.5, &mut rng) {
                r = next;
            }
            let total: f64 = r.parts().iter().sum();
            assert!((total - r.split_mass()).abs() <= 1e-12);
        }
    }
}
