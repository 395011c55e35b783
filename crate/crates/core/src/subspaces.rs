//! Linear and affine subspaces in canonical form, and relaxed projectors.
//!
//! An affine subspace is always stored as `A = a + L` with the translation `a`
//! orthogonal to the direction `L`; constructors canonicalize their input so
//! the invariant cannot be broken from outside. The relaxed projector
//! `R(x) = (1 - lambda) x + lambda P_A(x)` interpolates between the identity
//! (`lambda = 0`), the metric projection (`lambda = 1`) and the reflection
//! (`lambda = 2`).

use crate::error::{Error, Result};
use crate::linops::{self, Matrix, Vector};
use crate::tol;

/// A linear subspace of `R^d`, represented by a `d x k` matrix with
/// orthonormal columns. Both `k = 0` (the zero subspace) and `k = d`
/// (everything) are ordinary values.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSubspace {
    dim_ambient: usize,
    basis: Matrix,
}

impl LinearSubspace {
    /// Adopts `basis` as is, after checking that its columns are orthonormal
    /// to within [`tol::BASIS_ORTHONORMALITY`].
    pub fn from_orthonormal_basis(basis: Matrix) -> Result<Self> {
        let k = basis.ncols();
        let gram = basis.tr_mul(&basis);
        let defect = (gram - Matrix::identity(k, k)).amax();
        if k > 0 && defect > tol::BASIS_ORTHONORMALITY {
            return Err(Error::InvalidInput(format!(
                "basis columns are not orthonormal (defect {defect:.3e})"
            )));
        }
        Ok(Self { dim_ambient: basis.nrows(), basis })
    }

    /// Span of arbitrary vectors, orthonormalized at rank tolerance `tol`.
    pub fn span(dim: usize, vectors: &[Vector], tol: f64) -> Result<Self> {
        let basis = linops::orthonormalize(dim, vectors, tol)?;
        Ok(Self { dim_ambient: dim, basis })
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim_ambient: dim, basis: Matrix::zeros(dim, 0) }
    }

    pub fn full(dim: usize) -> Self {
        Self { dim_ambient: dim, basis: Matrix::identity(dim, dim) }
    }

    pub fn dim_ambient(&self) -> usize {
        self.dim_ambient
    }

    /// Dimension of the subspace itself.
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// Orthogonal projection `B (B^T x)`.
    pub fn project(&self, x: &Vector) -> Vector {
        if self.dim() == 0 {
            return Vector::zeros(self.dim_ambient);
        }
        &self.basis * self.basis.tr_mul(x)
    }

    /// Relaxed projection `(1 - lambda) x + lambda P(x)` with the subspace as
    /// target; linear in `x`.
    pub fn relax(&self, lambda: f64, x: &Vector) -> Vector {
        x * (1.0 - lambda) + self.project(x) * lambda
    }

    /// `(sin, cos)` of the angle between `x` and the subspace:
    /// `sin = dist(x, L) / |x|`, `cos = |P x| / |x|`. The zero vector counts
    /// as lying inside every subspace: `(0, 1)`.
    pub fn sine_cosine(&self, x: &Vector) -> (f64, f64) {
        let norm = x.norm();
        if norm == 0.0 {
            return (0.0, 1.0);
        }
        let p = self.project(x);
        let sin = ((x - &p).norm() / norm).clamp(0.0, 1.0);
        let cos = (p.norm() / norm).clamp(0.0, 1.0);
        (sin, cos)
    }

    /// Distance from `x` to the subspace.
    pub fn distance(&self, x: &Vector) -> f64 {
        (x - self.project(x)).norm()
    }

    /// Orthogonal complement.
    pub fn complement(&self) -> LinearSubspace {
        if self.dim() == 0 {
            return LinearSubspace::full(self.dim_ambient);
        }
        let basis = linops::nullspace(&self.basis.transpose(), tol::RANK_REL);
        LinearSubspace { dim_ambient: self.dim_ambient, basis }
    }

    /// The projector as an explicit `d x d` matrix `B B^T`.
    pub fn projector_matrix(&self) -> Matrix {
        if self.dim() == 0 {
            return Matrix::zeros(self.dim_ambient, self.dim_ambient);
        }
        &self.basis * self.basis.transpose()
    }
}

/// Intersection of linear subspaces, via the nullspace of the stacked
/// complement projectors `I - B_i B_i^T`.
pub fn intersect(parts: &[LinearSubspace], tol: f64) -> Result<LinearSubspace> {
    let first = parts.first().ok_or(Error::EmptyCollection)?;
    let d = first.dim_ambient();
    for p in parts {
        if p.dim_ambient() != d {
            return Err(Error::DimensionMismatch { expected: d, got: p.dim_ambient() });
        }
    }
    let mut stacked = Matrix::zeros(d * parts.len(), d);
    let eye = Matrix::identity(d, d);
    for (i, p) in parts.iter().enumerate() {
        stacked.view_mut((i * d, 0), (d, d)).copy_from(&(&eye - p.projector_matrix()));
    }
    let basis = linops::nullspace(&stacked, tol);
    LinearSubspace::from_orthonormal_basis(basis)
}

/// A closed affine subspace `A = a + L` with `a` orthogonal to `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSubspace {
    direction: LinearSubspace,
    translation: Vector,
}

impl AffineSubspace {
    /// Builds `translation + direction`, replacing the translation by its
    /// component orthogonal to the direction so the stored representative is
    /// canonical.
    pub fn new(direction: LinearSubspace, translation: Vector) -> Result<Self> {
        if translation.len() != direction.dim_ambient() {
            return Err(Error::DimensionMismatch {
                expected: direction.dim_ambient(),
                got: translation.len(),
            });
        }
        if !translation.iter().all(|t| t.is_finite()) {
            return Err(Error::NonFinite("translation"));
        }
        let canonical = &translation - direction.project(&translation);
        Ok(Self { direction, translation: canonical })
    }

    /// A linear subspace viewed as an affine one (translation zero).
    pub fn linear(direction: LinearSubspace) -> Self {
        let translation = Vector::zeros(direction.dim_ambient());
        Self { direction, translation }
    }

    /// The affine subspace through `point` spanned by `spanning`.
    pub fn from_point_and_spanning(point: &Vector, spanning: &[Vector], tol: f64) -> Result<Self> {
        let direction = LinearSubspace::span(point.len(), spanning, tol)?;
        Self::new(direction, point.clone())
    }

    /// The hyperplane `{ x : <normal, x> = offset }`.
    pub fn hyperplane(normal: &Vector, offset: f64) -> Result<Self> {
        let norm2 = normal.norm_squared();
        if norm2 == 0.0 {
            return Err(Error::InvalidInput("hyperplane normal must be nonzero".into()));
        }
        if !normal.iter().all(|t| t.is_finite()) || !offset.is_finite() {
            return Err(Error::NonFinite("hyperplane data"));
        }
        let direction = LinearSubspace::span(normal.len(), &[normal.clone()], tol::RANK_REL)?
            .complement();
        let translation = normal * (offset / norm2);
        Self::new(direction, translation)
    }

    pub fn direction(&self) -> &LinearSubspace {
        &self.direction
    }

    /// The canonical translation; always orthogonal to the direction.
    pub fn translation(&self) -> &Vector {
        &self.translation
    }

    pub fn dim_ambient(&self) -> usize {
        self.direction.dim_ambient()
    }

    /// Metric projection `a + P_L(x)`, using that `a` is orthogonal to `L`.
    pub fn project(&self, x: &Vector) -> Vector {
        self.direction.project(x) + &self.translation
    }

    /// Relaxed projection `(1 - lambda) x + lambda P_A(x)`.
    pub fn relax(&self, lambda: f64, x: &Vector) -> Vector {
        x * (1.0 - lambda) + self.project(x) * lambda
    }

    /// Distance from `x` to the subspace.
    pub fn distance(&self, x: &Vector) -> f64 {
        (x - self.project(x)).norm()
    }
}

/// A relaxed projector with a fixed target and relaxation parameter.
///
/// `lambda` may take the closed-interval endpoints 0 and 2 (identity and
/// reflection); both are nonexpansive.
#[derive(Debug, Clone)]
pub struct RelaxedProjector {
    target: AffineSubspace,
    lambda: f64,
}

impl RelaxedProjector {
    pub fn new(target: AffineSubspace, lambda: f64) -> Result<Self> {
        if !(0.0..=2.0).contains(&lambda) {
            return Err(Error::LambdaOutsideClosedRange(lambda));
        }
        Ok(Self { target, lambda })
    }

    pub fn target(&self) -> &AffineSubspace {
        &self.target
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        self.target.relax(self.lambda, x)
    }

    /// The linear part `(1 - lambda) I + lambda B B^T` as an explicit matrix.
    pub fn linear_matrix(&self) -> Matrix {
        let d = self.target.dim_ambient();
        Matrix::identity(d, d) * (1.0 - self.lambda)
            + self.target.direction().projector_matrix() * self.lambda
    }

    /// The offset `lambda a`, so that `apply(x) = linear_matrix() x + offset()`.
    pub fn offset(&self) -> Vector {
        self.target.translation() * self.lambda
    }
}
