//! Relaxed projection methods onto finite collections of affine subspaces.
//!
//! The crate revolves around one family of maps: for a closed affine subspace
//! `A = a + L` (translation `a` orthogonal to the direction `L`) and a
//! relaxation parameter `lambda` in `[0, 2]`, the relaxed projector is
//!
//! ```text
//! R(x) = (1 - lambda) * x + lambda * P_A(x)
//! ```
//!
//! `lambda = 1` is the metric projection, `lambda = 2` the reflection. Products
//! of such maps, applied in cyclic, random, or arbitrary order, stay bounded:
//! every iterate satisfies `norm(x_n) <= norm(x_0) + lambda * C` for an explicit
//! constant `C` computable from the geometry of the collection alone. This
//! crate computes that certificate, estimates the regularity constants it
//! needs, decomposes iteration words into contractive cycles, analyses the
//! fixed points of cyclic compositions, and applies the whole machinery to
//! block Kaczmarz iterations for linear systems, consistent or not.
//!
//! Modules:
//! - [`linops`]: dense factorizations (orthonormal bases, minimum-norm least
//!   squares, operator norms, nullspaces) shared by everything else.
//! - [`subspaces`]: linear/affine subspaces in canonical form and the relaxed
//!   projectors themselves.
//! - [`regularity`]: empirical estimation of the regularity constant `kappa`
//!   and its aggregate `kappa_star` over the subcollection lattice.
//! - [`engine`]: iteration schedules, traces, cycle segmentation, and the
//!   boundedness certificate.
//! - [`fixpoint`]: affine maps of compositions, their fixed-point sets, and
//!   linear convergence rates.
//! - [`kaczmarz`]: block Kaczmarz front end mapping linear systems onto the
//!   projection machinery.

pub mod engine;
pub mod error;
pub mod fixpoint;
pub mod kaczmarz;
pub mod linops;
pub mod regularity;
pub mod subspaces;
pub mod tol;

pub use engine::{
    bound_certificate, bound_certificate_with_guard, is_cycle, iterate, iterate_with,
    segment_cycles, unrolled_tail, unrolled_tail_norms, verify_boundedness, BoundCertificate,
    IterationTrace, LambdaRule, LedgerEntry, Schedule, ScheduleKind, Segmentation,
};
pub use error::{Error, Result};
pub use fixpoint::{compose, fixed_points, linear_rate, project_onto_fix, AffineMap, FixedPointSet};
pub use kaczmarz::{blocks_to_affine, gaussian_instance, solve, BlockSystem, KaczmarzReport};
pub use linops::{least_squares, nullspace, operator_norm, orthonormalize, Matrix, Vector};
pub use regularity::{
    contraction_factor, estimate_kappa, kappa_star, kappa_star_with_guard, ContractionFactor,
    KappaMethod, RegularityReport, SubcollectionKappa,
};
pub use subspaces::{intersect, AffineSubspace, LinearSubspace, RelaxedProjector};
