//! Numerical tolerances used across the crate.
//!
//! Everything here is relative unless stated otherwise. Keeping the constants
//! in one place makes the orderings between them visible: rank decisions are
//! stricter than consistency checks, which are stricter than the slack granted
//! to boundedness certificates.

/// Rank decisions in factorizations, relative to the largest singular value
/// (or largest input column norm for QR-based orthonormalization).
pub const RANK_REL: f64 = 1e-10;

/// Largest orthonormality defect `max|B^T B - I|` accepted when adopting a
/// basis matrix from outside.
pub const BASIS_ORTHONORMALITY: f64 = 1e-10;

/// Default relative accuracy for the iterative operator-norm computation.
pub const OPERATOR_NORM_REL: f64 = 1e-12;

/// Residual threshold deciding whether a linear system is consistent,
/// scaled by `1 + norm(rhs)`.
pub const CONSISTENCY_REL: f64 = 1e-8;

/// Multiplicative safety factor applied to empirically estimated regularity
/// constants before they are reported.
pub const KAPPA_SAFETY: f64 = 1.01;

/// Regularity aggregates are clamped to at least `1 + KAPPA_STAR_CLAMP` so
/// the contraction factors they feed stay strictly below one.
pub const KAPPA_STAR_CLAMP: f64 = 1e-6;

/// Subcollection lattices grow as `2^ell`; enumerations over more subspaces
/// than this must be unlocked explicitly by the caller.
pub const SUBCOLLECTION_GUARD: usize = 8;

/// Residuals below this floor count as exhausted by floating-point noise and
/// are excluded from convergence-rate fits.
pub const RATE_FLOOR: f64 = 1e-13;

/// Slack granted when an empirical sup norm is compared against a certificate
/// bound, scaled by `1 + C`.
pub const CERTIFICATE_SLACK: f64 = 1e-8;
