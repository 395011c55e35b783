//! Iteration schedules, traces, cycle segmentation, and the boundedness
//! certificate.
//!
//! The central object is the iteration
//!
//! ```text
//! x_{n+1} = R_n(x_n),   R_n = relaxed projector onto A_{i_n} with parameter lambda_n
//! ```
//!
//! where the index sequence `i_n` comes from a [`Schedule`]: cyclic, seeded
//! uniform random, or an explicit word. Unrolling the affine recursion
//! separates a linear word product applied to `x_0` from an accumulated tail
//!
//! ```text
//! x_{n+1} = R_n ... R_0 x_0 + lambda * q(n),
//! q(n) = sum_{j=0..n} R_n ... R_{j+1} a_j      (empty product = identity)
//! ```
//!
//! with all `R` acting through their linear parts. The certificate machinery
//! bounds `|q(n)|` by a constant `C` built recursively over the subcollection
//! lattice, which yields `|x_n| <= |x_0| + lambda * C` for every `n` and every
//! schedule, with no convergence assumption at all.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::linops::Vector;
use crate::subspaces::AffineSubspace;
use crate::tol;

/// How the subspace index of each step is chosen.
#[derive(Debug, Clone)]
pub enum ScheduleKind {
    /// `i_n = n mod ell`, first subspace first.
    Cyclic,
    /// Uniform over the collection, from a counter-based generator keyed by
    /// `(seed, step)`: the index at a step never depends on how many draws
    /// came before it, so traces are reproducible across platforms and
    /// restartable from any step.
    RandomUniform { seed: u64 },
    /// A fixed word of indices, consumed left to right.
    Explicit(Vec<usize>),
}

/// How the relaxation parameter of each step is chosen.
#[derive(Debug, Clone)]
pub enum LambdaRule {
    Fixed(f64),
    /// Per-step parameters in `[0, cap]` with `cap` inside the open interval
    /// `(0, 2)`; the boundedness certificate for `cap` covers every such run.
    Varying { lambdas: Vec<f64>, cap: f64 },
}

impl LambdaRule {
    pub fn fixed(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 2.0) {
            return Err(Error::LambdaOutsideOpenRange(lambda));
        }
        Ok(LambdaRule::Fixed(lambda))
    }

    pub fn varying(lambdas: Vec<f64>, cap: f64) -> Result<Self> {
        if !(cap > 0.0 && cap < 2.0) {
            return Err(Error::LambdaOutsideOpenRange(cap));
        }
        for &l in &lambdas {
            if !l.is_finite() || !(0.0..=cap).contains(&l) {
                return Err(Error::InvalidInput(format!(
                    "per-step relaxation {l} outside [0, {cap}]"
                )));
            }
        }
        Ok(LambdaRule::Varying { lambdas, cap })
    }

    /// `n_steps` parameters drawn uniformly from `[0, cap]`, keyed by
    /// `(seed, step)` on a separate stream from the index draws.
    pub fn varying_uniform(cap: f64, n_steps: usize, seed: u64) -> Result<Self> {
        if !(cap > 0.0 && cap < 2.0) {
            return Err(Error::LambdaOutsideOpenRange(cap));
        }
        let lambdas = (0..n_steps)
            .map(|n| unit_f64(counter_u64(seed, LAMBDA_STREAM, n)) * cap)
            .collect();
        Ok(LambdaRule::Varying { lambdas, cap })
    }
}

/// A complete prescription of one iteration run: index choice plus relaxation
/// rule.
#[derive(Debug, Clone)]
pub struct Schedule {
    kind: ScheduleKind,
    lambda_rule: LambdaRule,
}

impl Schedule {
    pub fn new(kind: ScheduleKind, lambda_rule: LambdaRule) -> Self {
        Schedule { kind, lambda_rule }
    }

    pub fn cyclic(lambda: f64) -> Result<Self> {
        Ok(Self::new(ScheduleKind::Cyclic, LambdaRule::fixed(lambda)?))
    }

    pub fn random(seed: u64, lambda: f64) -> Result<Self> {
        Ok(Self::new(ScheduleKind::RandomUniform { seed }, LambdaRule::fixed(lambda)?))
    }

    pub fn explicit(word: Vec<usize>, lambda: f64) -> Result<Self> {
        Ok(Self::new(ScheduleKind::Explicit(word), LambdaRule::fixed(lambda)?))
    }

    pub fn kind(&self) -> &ScheduleKind {
        &self.kind
    }

    pub fn lambda_rule(&self) -> &LambdaRule {
        &self.lambda_rule
    }

    /// Subspace index used at `step`, for a collection of `ell` subspaces.
    pub fn index_at(&self, step: usize, ell: usize) -> Result<usize> {
        if ell == 0 {
            return Err(Error::EmptyCollection);
        }
        match &self.kind {
            ScheduleKind::Cyclic => Ok(step % ell),
            ScheduleKind::RandomUniform { seed } => {
                let r = counter_u64(*seed, INDEX_STREAM, step);
                Ok((((r as u128) * (ell as u128)) >> 64) as usize)
            }
            ScheduleKind::Explicit(word) => {
                let &i = word
                    .get(step)
                    .ok_or(Error::ScheduleExhausted { supplied: word.len(), step })?;
                if i >= ell {
                    return Err(Error::IndexOutOfRange { index: i, len: ell });
                }
                Ok(i)
            }
        }
    }

    /// Relaxation parameter used at `step`.
    pub fn lambda_at(&self, step: usize) -> Result<f64> {
        match &self.lambda_rule {
            LambdaRule::Fixed(l) => Ok(*l),
            LambdaRule::Varying { lambdas, .. } => lambdas
                .get(step)
                .copied()
                .ok_or(Error::LambdaRuleExhausted { supplied: lambdas.len(), step }),
        }
    }

    /// The single relaxation parameter, when the rule is fixed.
    pub fn fixed_lambda(&self) -> Option<f64> {
        match &self.lambda_rule {
            LambdaRule::Fixed(l) => Some(*l),
            LambdaRule::Varying { .. } => None,
        }
    }

    /// Upper bound on every per-step relaxation parameter.
    pub fn lambda_cap(&self) -> f64 {
        match &self.lambda_rule {
            LambdaRule::Fixed(l) => *l,
            LambdaRule::Varying { cap, .. } => *cap,
        }
    }
}

const INDEX_STREAM: u64 = 0;
const LAMBDA_STREAM: u64 = 1;

fn counter_u64(seed: u64, stream: u64, step: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(step as u128 * 2);
    rng.next_u64()
}

fn unit_f64(r: u64) -> f64 {
    (r >> 11) as f64 / (1u64 << 53) as f64
}

/// Record of one iteration run.
#[derive(Debug, Clone)]
pub struct IterationTrace {
    /// Every iterate including the start; `None` when the run was recorded in
    /// norms-only mode (advisable for runs of 1e5 steps and beyond).
    pub iterates: Option<Vec<Vector>>,
    /// Index chosen at each step; length `n_steps`.
    pub chosen_indices: Vec<usize>,
    /// Relaxation parameter used at each step; length `n_steps`.
    pub lambdas: Vec<f64>,
    /// `norms[n] = |x_n|`; length `n_steps + 1`.
    pub norms: Vec<f64>,
    /// Largest iterate norm over the whole run.
    pub sup_norm: f64,
    pub final_iterate: Vector,
}

/// Runs the iteration, keeping the full iterate history.
pub fn iterate(
    collection: &[AffineSubspace],
    schedule: &Schedule,
    x0: &Vector,
    n_steps: usize,
) -> Result<IterationTrace> {
    iterate_with(collection, schedule, x0, n_steps, true)
}

/// Runs the iteration; `keep_iterates = false` records norms only.
pub fn iterate_with(
    collection: &[AffineSubspace],
    schedule: &Schedule,
    x0: &Vector,
    n_steps: usize,
    keep_iterates: bool,
) -> Result<IterationTrace> {
    let ell = check_collection(collection)?;
    let d = collection[0].dim_ambient();
    if x0.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x0.len() });
    }
    if !x0.iter().all(|t| t.is_finite()) {
        return Err(Error::NonFinite("starting point"));
    }

    let mut x = x0.clone();
    let mut iterates = keep_iterates.then(|| {
        let mut v = Vec::with_capacity(n_steps + 1);
        v.push(x.clone());
        v
    });
    let mut chosen_indices = Vec::with_capacity(n_steps);
    let mut lambdas = Vec::with_capacity(n_steps);
    let mut norms = Vec::with_capacity(n_steps + 1);
    norms.push(x.norm());

    for n in 0..n_steps {
        let i = schedule.index_at(n, ell)?;
        let lam = schedule.lambda_at(n)?;
        x = collection[i].relax(lam, &x);
        chosen_indices.push(i);
        lambdas.push(lam);
        norms.push(x.norm());
        if let Some(hist) = iterates.as_mut() {
            hist.push(x.clone());
        }
    }

    let sup_norm = norms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(IterationTrace {
        iterates,
        chosen_indices,
        lambdas,
        norms,
        sup_norm,
        final_iterate: x,
    })
}

fn check_collection(collection: &[AffineSubspace]) -> Result<usize> {
    let first = collection.first().ok_or(Error::EmptyCollection)?;
    let d = first.dim_ambient();
    for a in collection {
        if a.dim_ambient() != d {
            return Err(Error::DimensionMismatch { expected: d, got: a.dim_ambient() });
        }
    }
    Ok(collection.len())
}

/// The accumulated tail `q(n) = sum_{j=0..n} R_n ... R_{j+1} a_j`, all factors
/// acting through their linear parts.
///
/// Only defined for fixed-parameter schedules; the recursion
/// `q(j) = R_j q(j-1) + a_j` evaluates it in one sweep.
pub fn unrolled_tail(
    collection: &[AffineSubspace],
    schedule: &Schedule,
    n: usize,
) -> Result<Vector> {
    let ell = check_collection(collection)?;
    let lambda = schedule.fixed_lambda().ok_or(Error::VaryingLambdaUnsupported)?;
    let d = collection[0].dim_ambient();
    let mut q = Vector::zeros(d);
    for j in 0..=n {
        let i = schedule.index_at(j, ell)?;
        q = collection[i].direction().relax(lambda, &q) + collection[i].translation();
    }
    Ok(q)
}

/// Norms `|q(n)|` for `n = 0..n_steps`, sharing one sweep of the recursion.
pub fn unrolled_tail_norms(
    collection: &[AffineSubspace],
    schedule: &Schedule,
    n_steps: usize,
) -> Result<Vec<f64>> {
    let ell = check_collection(collection)?;
    let lambda = schedule.fixed_lambda().ok_or(Error::VaryingLambdaUnsupported)?;
    let d = collection[0].dim_ambient();
    let mut q = Vector::zeros(d);
    let mut norms = Vec::with_capacity(n_steps + 1);
    for j in 0..=n_steps {
        let i = schedule.index_at(j, ell)?;
        q = collection[i].direction().relax(lambda, &q) + collection[i].translation();
        norms.push(q.norm());
    }
    Ok(norms)
}

/// A word over subspace indices `0..ell` is a cycle when every index appears
/// at least once and some index appears exactly once.
pub fn is_cycle(word: &[usize], ell: usize) -> bool {
    assert!(ell >= 1, "a cycle is over at least one subspace");
    let mut counts = vec![0usize; ell];
    for &i in word {
        assert!(i < ell, "word index {i} out of range for {ell} subspaces");
        counts[i] += 1;
    }
    counts.iter().all(|&c| c >= 1) && counts.iter().any(|&c| c == 1)
}

/// Greedy factorization of a word into cycles plus a cycle-free remainder.
///
/// The word is scanned in composition order, most recent application first
/// (position 0 corresponds to step `n = word.len()`, the last position to
/// step 1). A segment closes the moment every index has appeared in it; the
/// closing index appears exactly once, so each segment is a cycle, and the
/// trailing remainder never reaches full coverage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmentation {
    /// Half-open position ranges of the cycles, in scan order.
    pub segments: Vec<Range<usize>>,
    /// Trailing positions not absorbed into any cycle.
    pub remainder: Range<usize>,
    /// Number of cycles.
    pub k: usize,
    /// Step-space boundaries `p_0 <= ... <= p_k` for a word standing for steps
    /// `(n, ..., 1)`: cycle `i` (counting from the remainder upward) covers
    /// steps `p_{i-1}+1 ..= p_i`, the remainder covers `1 ..= p_0`.
    pub boundaries: Vec<usize>,
}

pub fn segment_cycles(word: &[usize], ell: usize) -> Segmentation {
    assert!(ell >= 1, "segmentation is over at least one subspace");
    let mut segments = Vec::new();
    let mut seen = vec![false; ell];
    let mut covered = 0usize;
    let mut start = 0usize;
    for (t, &i) in word.iter().enumerate() {
        assert!(i < ell, "word index {i} out of range for {ell} subspaces");
        if !seen[i] {
            seen[i] = true;
            covered += 1;
        }
        if covered == ell {
            segments.push(start..t + 1);
            start = t + 1;
            seen.fill(false);
            covered = 0;
        }
    }
    let remainder = start..word.len();

    let mut boundaries = Vec::with_capacity(segments.len() + 1);
    let mut p = word.len();
    boundaries.push(p);
    for seg in &segments {
        p -= seg.len();
        boundaries.push(p);
    }
    boundaries.reverse();

    Segmentation { k: segments.len(), segments, remainder, boundaries }
}

/// One subcollection's contribution to a boundedness certificate.
#[derive(Debug, Clone, Serialize)]
pub struct LedgerEntry {
    pub indices: Vec<usize>,
    /// Lattice aggregate used for this subcollection; `None` for singletons,
    /// whose constant is `|a| / min(lambda, 1)` directly.
    pub kappa_star: Option<f64>,
    pub constant: f64,
}

/// An explicit bound `|x_n| <= |x_0| + lambda * C` valid for every schedule
/// over the collection and every starting point.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCertificate {
    pub ell: usize,
    pub lambda: f64,
    /// Largest translation norm in the collection.
    pub tau: f64,
    /// Largest constant among proper nonempty subcollections (0 when `ell = 1`).
    pub d_const: f64,
    /// Lattice aggregate for the full collection; `None` when `ell = 1`.
    pub kappa_star: Option<f64>,
    /// The constant `C` itself.
    pub constant: f64,
    /// Constants of every nonempty subcollection, in mask order.
    pub ledger: Vec<LedgerEntry>,
}

/// Builds the certificate by recursing over the subcollection lattice.
///
/// For a single subspace the tail is the geometric sum
/// `q(n) = ((1 - (1-lambda)^(n+1)) / lambda) a`, whose norm never exceeds
/// `|a| / min(lambda, 1)`: the classical `|a| / lambda` holds only up to
/// `lambda = 1`, while for larger `lambda` the alternating sum peaks at
/// `|q(0)| = |a|` itself. For larger subcollections,
///
/// ```text
/// C(S) = (tau_S + D_S) / (1 - sqrt(1 - lambda (2 - lambda) kappa_star(S)^(-2(|S|-1))))
/// ```
///
/// where `tau_S` is the largest translation norm in `S` and `D_S` the largest
/// constant among proper nonempty subcollections of `S`. `kappa_oracle` maps a
/// sorted index set to its lattice aggregate; see
/// [`crate::regularity::SubcollectionKappa`] for the standard choice.
pub fn bound_certificate<F>(
    collection: &[AffineSubspace],
    lambda: f64,
    kappa_oracle: F,
) -> Result<BoundCertificate>
where
    F: FnMut(&[usize]) -> Result<f64>,
{
    bound_certificate_with_guard(collection, lambda, kappa_oracle, tol::SUBCOLLECTION_GUARD)
}

pub fn bound_certificate_with_guard<F>(
    collection: &[AffineSubspace],
    lambda: f64,
    mut kappa_oracle: F,
    guard: usize,
) -> Result<BoundCertificate>
where
    F: FnMut(&[usize]) -> Result<f64>,
{
    let ell = check_collection(collection)?;
    if ell > guard {
        return Err(Error::GuardExceeded { ell, guard });
    }
    if !(lambda > 0.0 && lambda < 2.0) {
        return Err(Error::LambdaOutsideOpenRange(lambda));
    }

    let translation_norms: Vec<f64> =
        collection.iter().map(|a| a.translation().norm()).collect();
    let full: u32 = if ell == 32 { u32::MAX } else { (1u32 << ell) - 1 };
    let mut constants: Vec<f64> = vec![0.0; full as usize + 1];
    let mut ledger = Vec::with_capacity(full as usize);

    for mask in 1..=full {
        let indices: Vec<usize> = (0..ell).filter(|i| mask & (1 << i) != 0).collect();
        let m = indices.len();
        let (kappa, constant) = if m == 1 {
            (None, translation_norms[indices[0]] / lambda.min(1.0))
        } else {
            let tau = indices.iter().map(|&i| translation_norms[i]).fold(0.0, f64::max);
            let mut d_const = 0.0f64;
            let mut sub = (mask - 1) & mask;
            while sub != 0 {
                d_const = d_const.max(constants[sub as usize]);
                sub = (sub - 1) & mask;
            }
            let kappa = kappa_oracle(&indices)?;
            if !(kappa > 1.0) {
                return Err(Error::KappaNotAboveOne(kappa));
            }
            let eps = lambda * (2.0 - lambda) * kappa.powf(-2.0 * (m as f64 - 1.0));
            let denominator = eps / (1.0 + (1.0 - eps).sqrt());
            (Some(kappa), (tau + d_const) / denominator)
        };
        constants[mask as usize] = constant;
        ledger.push(LedgerEntry { indices, kappa_star: kappa, constant });
    }

    let top = ledger.last().expect("full mask present");
    let tau = translation_norms.iter().cloned().fold(0.0, f64::max);
    let d_const = if ell == 1 {
        0.0
    } else {
        let mut d = 0.0f64;
        let mut sub = (full - 1) & full;
        while sub != 0 {
            d = d.max(constants[sub as usize]);
            sub = (sub - 1) & full;
        }
        d
    };
    Ok(BoundCertificate {
        ell,
        lambda,
        tau,
        d_const,
        kappa_star: top.kappa_star,
        constant: top.constant,
        ledger,
    })
}

/// Checks a finished trace against its certificate. Returns `(ok, margin)`
/// where `margin = (|x_0| + lambda C) - sup_norm`; `ok` allows a slack of
/// `CERTIFICATE_SLACK * (1 + C)` for accumulated rounding.
pub fn verify_boundedness(
    trace: &IterationTrace,
    cert: &BoundCertificate,
    x0: &Vector,
) -> (bool, f64) {
    let bound = x0.norm() + cert.lambda * cert.constant;
    let ok = trace.sup_norm <= bound + tol::CERTIFICATE_SLACK * (1.0 + cert.constant);
    (ok, bound - trace.sup_norm)
}
