//! Empirical estimation of regularity constants.
//!
//! A collection of linear subspaces `L_1, ..., L_ell` with intersection `N` is
//! regular with constant `kappa` when `dist(x, N) <= kappa * max_i dist(x, L_i)`
//! for every `x`; in finite dimension such a constant always exists. Both
//! sides vanish on `N` and scale linearly, so the search space collapses to
//! the unit sphere of the orthogonal complement of `N`. The estimator samples
//! that sphere, refines the best candidates by subgradient descent on the
//! worst-case distance, adds a multiplicative safety margin, and then checks
//! the constant on a fresh batch, folding any counterexample the batch turns
//! up back into the search until the validation comes out clean.
//!
//! The aggregate `kappa_star` ranges over the subcollection lattice: it is the
//! largest pair constant `kappa({N_1, N_2})` over intersections `N_1, N_2` of
//! nonempty subcollections. Chaining pair constants gives
//! `dist(x, N) <= kappa_star^(ell-1) * max_i dist(x, L_i)`, the form validated
//! here, and it feeds the contraction factor
//! `sqrt(1 - lambda (2 - lambda) kappa_star^(-2(ell-1)))` attached to cycles.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linops::Vector;
use crate::subspaces::{intersect, LinearSubspace};
use crate::tol;

/// How a reported constant was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KappaMethod {
    /// Sampled lower bound with safety margin, validated on fresh samples.
    Empirical,
    /// Closed-form value for a pair of subspaces (reserved; the estimator
    /// currently always reports `Empirical`).
    PairClosedForm,
}

/// Outcome of a regularity estimation.
#[derive(Debug, Clone, Serialize)]
pub struct RegularityReport {
    /// Constant for the collection itself; at least 1.
    pub kappa: f64,
    /// Largest pair constant over the subcollection lattice, clamped above 1.
    pub kappa_star: f64,
    pub method: KappaMethod,
    /// Size of the validation batch behind `max_violation`.
    pub samples_checked: usize,
    /// Largest value of `dist(x, N) - kappa * max_i dist(x, L_i)` seen during
    /// validation; nonpositive when the constant held on every sample.
    pub max_violation: f64,
}

/// The factor by which one cycle of relaxed projections contracts the
/// component orthogonal to the intersection.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ContractionFactor {
    pub value: f64,
    pub lambda: f64,
    pub ell: usize,
    pub kappa_star: f64,
}

/// `sqrt(1 - lambda (2 - lambda) kappa_star^(-2(ell-1)))`, strictly below 1.
pub fn contraction_factor(lambda: f64, ell: usize, kappa_star: f64) -> Result<ContractionFactor> {
    if !(lambda > 0.0 && lambda < 2.0) {
        return Err(Error::LambdaOutsideOpenRange(lambda));
    }
    if ell == 0 {
        return Err(Error::InvalidInput("a cycle needs at least one subspace".into()));
    }
    if !(kappa_star > 1.0) {
        return Err(Error::KappaNotAboveOne(kappa_star));
    }
    let exponent = -2.0 * (ell as f64 - 1.0);
    let value = (1.0 - lambda * (2.0 - lambda) * kappa_star.powf(exponent)).sqrt();
    debug_assert!(value < 1.0);
    Ok(ContractionFactor { value, lambda, ell, kappa_star })
}

/// The ratio `dist(x, N) / max_i dist(x, L_i)` equals `1 / sqrt(h(x))` on the
/// unit sphere of the complement of `N`, where `h(x) = max_i dist(x, L_i)^2`,
/// so maximizing the ratio means minimizing `h`. The minimizer typically sits
/// where several distances tie and `h` is not differentiable; stepping along
/// the average of the near-worst gradients instead of the single worst one
/// keeps the descent from stalling at those kinks.
fn refine_worst_distance(
    collection: &[LinearSubspace],
    perp: &LinearSubspace,
    start: Vector,
) -> (Vector, f64) {
    let h_parts = |x: &Vector| -> Vec<f64> {
        collection.iter().map(|l| (x - l.project(x)).norm_squared()).collect()
    };
    let h_of = |x: &Vector| h_parts(x).into_iter().fold(f64::NEG_INFINITY, f64::max);

    let mut x = start;
    let mut h = h_of(&x);
    let mut eta = 0.25;
    for _ in 0..200 {
        if eta < 1e-14 || h <= 1e-24 {
            break;
        }
        let parts = h_parts(&x);
        let band = h * (1.0 - 1e-3);
        let mut grad = Vector::zeros(x.len());
        let mut active = 0usize;
        for (i, &p) in parts.iter().enumerate() {
            if p >= band {
                grad += (&x - collection[i].project(&x)) * 2.0;
                active += 1;
            }
        }
        grad /= active as f64;
        let projected = perp.project(&(&x - grad * eta));
        let norm = projected.norm();
        if norm < 1e-12 {
            eta *= 0.5;
            continue;
        }
        let candidate = projected / norm;
        let h_candidate = h_of(&candidate);
        if h_candidate < h {
            x = candidate;
            h = h_candidate;
            eta = (eta * 1.5).min(0.5);
        } else {
            eta *= 0.5;
        }
    }
    (x, h)
}

/// Estimates the regularity constant of `collection` by sampling.
///
/// `n_samples` unit vectors in the complement of the intersection seed a
/// multistart search; the most promising starts are refined by projected
/// subgradient descent on the worst-case distance, the result is inflated by
/// [`tol::KAPPA_SAFETY`], and a fresh batch of `n_samples` ambient vectors
/// (shifted seed) checks the final constant. A batch sample that beats the
/// constant is itself a better candidate, so it is fed back into the
/// refinement and the validation repeats until a batch passes cleanly.
///
/// A single subspace and collections whose intersection is everything are
/// regular with `kappa = 1` and skip the search.
pub fn estimate_kappa(
    collection: &[LinearSubspace],
    n_samples: usize,
    seed: u64,
) -> Result<RegularityReport> {
    if collection.is_empty() {
        return Err(Error::EmptyCollection);
    }
    if n_samples == 0 {
        return Err(Error::InvalidInput("n_samples must be at least 1".into()));
    }
    let d = collection[0].dim_ambient();
    for l in collection {
        if l.dim_ambient() != d {
            return Err(Error::DimensionMismatch { expected: d, got: l.dim_ambient() });
        }
    }
    let trivial = |kappa: f64| RegularityReport {
        kappa,
        kappa_star: kappa.max(1.0 + tol::KAPPA_STAR_CLAMP),
        method: KappaMethod::Empirical,
        samples_checked: 0,
        max_violation: 0.0,
    };
    if collection.len() == 1 {
        return Ok(trivial(1.0));
    }
    let meet = intersect(collection, tol::RANK_REL)?;
    if meet.dim() == d {
        return Ok(trivial(1.0));
    }
    let perp = meet.complement();

    let worst_distance = |x: &Vector| -> f64 {
        collection
            .iter()
            .map(|l| (x - l.project(x)).norm_squared())
            .fold(f64::NEG_INFINITY, f64::max)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<(f64, Vector)> = (0..n_samples)
        .map(|_| {
            let x = sample_unit(&mut rng, &perp);
            (worst_distance(&x), x)
        })
        .collect();
    starts.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut best_h = f64::INFINITY;
    for (_, start) in starts.into_iter().take(8) {
        let (_, h) = refine_worst_distance(collection, &perp, start);
        best_h = best_h.min(h);
    }

    let mut kappa = (1.0 / best_h.sqrt()).max(1.0) * tol::KAPPA_SAFETY;
    let mut max_violation = f64::NEG_INFINITY;
    let mut samples_checked = 0usize;
    for round in 0..4u32 {
        let mut validation =
            ChaCha8Rng::seed_from_u64(seed ^ VALIDATION_SALT.rotate_left(round));
        max_violation = f64::NEG_INFINITY;
        let mut counterexample: Option<Vector> = None;
        for _ in 0..n_samples {
            let x = Vector::from_fn(d, |_, _| validation.sample::<f64, _>(StandardNormal));
            let violation = meet.distance(&x) - kappa * worst_distance(&x).sqrt();
            if violation > max_violation {
                max_violation = violation;
                if violation > 0.0 {
                    counterexample = Some(x);
                }
            }
        }
        samples_checked += n_samples;
        let Some(x) = counterexample else { break };
        let projected = perp.project(&x);
        let norm = projected.norm();
        if norm < 1e-12 {
            break;
        }
        let (_, h) = refine_worst_distance(collection, &perp, projected / norm);
        best_h = best_h.min(h);
        kappa = (1.0 / best_h.sqrt()).max(1.0) * tol::KAPPA_SAFETY;
    }

    Ok(RegularityReport {
        kappa,
        kappa_star: kappa.max(1.0 + tol::KAPPA_STAR_CLAMP),
        method: KappaMethod::Empirical,
        samples_checked,
        max_violation,
    })
}

const VALIDATION_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// Pair-constant oracle over the subcollection lattice of one fixed
/// collection, memoizing intersections and pair estimates so that repeated
/// queries (as issued by certificate construction) stay cheap.
pub struct SubcollectionKappa {
    parts: Vec<LinearSubspace>,
    n_samples: usize,
    seed: u64,
    intersections: HashMap<u32, LinearSubspace>,
    pair_kappas: HashMap<(u32, u32), f64>,
}

impl SubcollectionKappa {
    pub fn new(parts: Vec<LinearSubspace>, n_samples: usize, seed: u64) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::EmptyCollection);
        }
        if parts.len() > 32 {
            return Err(Error::GuardExceeded { ell: parts.len(), guard: 32 });
        }
        let d = parts[0].dim_ambient();
        for l in &parts {
            if l.dim_ambient() != d {
                return Err(Error::DimensionMismatch { expected: d, got: l.dim_ambient() });
            }
        }
        Ok(Self {
            parts,
            n_samples,
            seed,
            intersections: HashMap::new(),
            pair_kappas: HashMap::new(),
        })
    }

    pub fn parts(&self) -> &[LinearSubspace] {
        &self.parts
    }

    fn intersection(&mut self, mask: u32) -> Result<LinearSubspace> {
        if let Some(m) = self.intersections.get(&mask) {
            return Ok(m.clone());
        }
        let members: Vec<LinearSubspace> = (0..self.parts.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| self.parts[i].clone())
            .collect();
        let meet = if members.len() == 1 {
            members.into_iter().next().unwrap()
        } else {
            intersect(&members, tol::RANK_REL)?
        };
        self.intersections.insert(mask, meet.clone());
        Ok(meet)
    }

    fn pair_kappa(&mut self, a: u32, b: u32) -> Result<f64> {
        let key = (a.min(b), a.max(b));
        if let Some(&k) = self.pair_kappas.get(&key) {
            return Ok(k);
        }
        let na = self.intersection(key.0)?;
        let nb = self.intersection(key.1)?;
        let pair_seed = self.seed ^ mix_masks(key.0, key.1);
        let kappa = estimate_kappa(&[na, nb], self.n_samples, pair_seed)?.kappa;
        self.pair_kappas.insert(key, kappa);
        Ok(kappa)
    }

    /// Largest pair constant over nonempty subcollections of the given index
    /// set, clamped to at least `1 + KAPPA_STAR_CLAMP`.
    pub fn kappa_star(&mut self, indices: &[usize]) -> Result<f64> {
        let mut mask = 0u32;
        for &i in indices {
            if i >= self.parts.len() {
                return Err(Error::IndexOutOfRange { index: i, len: self.parts.len() });
            }
            mask |= 1 << i;
        }
        if mask == 0 {
            return Err(Error::EmptyCollection);
        }
        let mut best = 1.0f64;
        let mut sub_a = mask;
        while sub_a != 0 {
            let mut sub_b = sub_a;
            loop {
                sub_b = sub_b.wrapping_sub(1) & mask;
                if sub_b == 0 {
                    break;
                }
                if sub_b >= sub_a {
                    continue;
                }
                best = best.max(self.pair_kappa(sub_a, sub_b)?);
            }
            sub_a = sub_a.wrapping_sub(1) & mask;
        }
        Ok(best.max(1.0 + tol::KAPPA_STAR_CLAMP))
    }
}

fn mix_masks(a: u32, b: u32) -> u64 {
    let mut z = ((a as u64) << 32 | b as u64).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z ^ (z >> 31)
}

/// Full regularity report for a collection: its own constant plus the lattice
/// aggregate `kappa_star`, validated in the chained form
/// `dist(x, N) <= kappa_star^(ell-1) * max_i dist(x, L_i)` on fresh samples.
///
/// Enumeration over the lattice is exponential in the collection size and is
/// refused above [`tol::SUBCOLLECTION_GUARD`] unless a larger guard is passed
/// explicitly.
pub fn kappa_star(
    collection: &[LinearSubspace],
    n_samples: usize,
    seed: u64,
) -> Result<RegularityReport> {
    kappa_star_with_guard(collection, n_samples, seed, tol::SUBCOLLECTION_GUARD)
}

pub fn kappa_star_with_guard(
    collection: &[LinearSubspace],
    n_samples: usize,
    seed: u64,
    guard: usize,
) -> Result<RegularityReport> {
    if collection.is_empty() {
        return Err(Error::EmptyCollection);
    }
    if collection.len() > guard {
        return Err(Error::GuardExceeded { ell: collection.len(), guard });
    }
    let base = estimate_kappa(collection, n_samples, seed)?;
    let mut oracle = SubcollectionKappa::new(collection.to_vec(), n_samples, seed)?;
    let indices: Vec<usize> = (0..collection.len()).collect();
    let star = oracle.kappa_star(&indices)?;

    let d = collection[0].dim_ambient();
    let ell = collection.len();
    let meet = intersect(collection, tol::RANK_REL)?;
    let aggregate = star.powi(ell as i32 - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ VALIDATION_SALT.rotate_left(17));
    let mut max_violation = f64::NEG_INFINITY;
    for _ in 0..n_samples {
        let x = Vector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let (sin_meet, _) = meet.sine_cosine(&x);
        let worst = collection
            .iter()
            .map(|l| l.sine_cosine(&x).0)
            .fold(f64::NEG_INFINITY, f64::max);
        let violation = sin_meet - aggregate * worst;
        if violation > max_violation {
            max_violation = violation;
        }
    }

    Ok(RegularityReport {
        kappa: base.kappa,
        kappa_star: star,
        method: KappaMethod::Empirical,
        samples_checked: n_samples,
        max_violation,
    })
}

fn sample_unit(rng: &mut ChaCha8Rng, space: &LinearSubspace) -> Vector {
    loop {
        let g = Vector::from_fn(space.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
        let x = space.basis() * g;
        let norm = x.norm();
        if norm > 1e-9 {
            return x / norm;
        }
    }
}
