//! Compositions of relaxed projectors as explicit affine maps, their
//! fixed-point sets, and measured linear convergence rates.
//!
//! A cyclic pass `Q = R_ell ... R_1` is itself an affine map `x -> W x + v`
//! with `W` nonexpansive. Whether the iteration `Q^n x_0` settles, and where,
//! is read off from the (possibly empty) solution set of `(I - W) x = v`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linops::{self, Matrix, Vector};
use crate::subspaces::{LinearSubspace, RelaxedProjector};
use crate::tol;

/// The map `x -> linear * x + offset`.
#[derive(Debug, Clone, Serialize)]
pub struct AffineMap {
    pub linear: Matrix,
    pub offset: Vector,
}

impl AffineMap {
    pub fn new(linear: Matrix, offset: Vector) -> Result<Self> {
        if linear.nrows() != linear.ncols() {
            return Err(Error::InvalidInput("affine map matrix must be square".into()));
        }
        if linear.nrows() != offset.len() {
            return Err(Error::DimensionMismatch {
                expected: linear.nrows(),
                got: offset.len(),
            });
        }
        Ok(Self { linear, offset })
    }

    pub fn identity(dim: usize) -> Self {
        Self { linear: Matrix::identity(dim, dim), offset: Vector::zeros(dim) }
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        &self.linear * x + &self.offset
    }

    /// The composition "`self` first, then `next`".
    pub fn then(&self, next: &AffineMap) -> AffineMap {
        AffineMap {
            linear: &next.linear * &self.linear,
            offset: &next.linear * &self.offset + &next.offset,
        }
    }
}

/// Folds a sequence of relaxed projectors (applied left to right) into one
/// explicit affine map.
pub fn compose(projectors: &[RelaxedProjector]) -> Result<AffineMap> {
    let first = projectors.first().ok_or(Error::EmptyCollection)?;
    let d = first.target().dim_ambient();
    let mut map = AffineMap::identity(d);
    for r in projectors {
        if r.target().dim_ambient() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: r.target().dim_ambient(),
            });
        }
        let step = AffineMap { linear: r.linear_matrix(), offset: r.offset() };
        map = map.then(&step);
    }
    Ok(map)
}

/// The solution set of `map(x) = x`, described by one particular solution and
/// the directions along which it is not unique.
#[derive(Debug, Clone)]
pub struct FixedPointSet {
    /// Minimum-norm least-squares solution of `(I - W) x = v`; meaningful as a
    /// fixed point only when `consistent` holds.
    pub particular: Vector,
    /// Kernel of `I - W`.
    pub directions: LinearSubspace,
    pub consistent: bool,
    /// Least-squares residual of `(I - W) x = v`.
    pub residual: f64,
}

/// Solves `(I - W) x = v` in the minimum-norm least-squares sense; the set is
/// consistent when the residual stays below `tol * (1 + |v|)`.
pub fn fixed_points(map: &AffineMap, tol_rel: f64) -> Result<FixedPointSet> {
    let d = map.dim();
    let a = Matrix::identity(d, d) - &map.linear;
    let (particular, residual) = linops::least_squares(&a, &map.offset)?;
    let directions =
        LinearSubspace::from_orthonormal_basis(linops::nullspace(&a, tol::RANK_REL))?;
    let consistent = residual <= tol_rel * (1.0 + map.offset.norm());
    Ok(FixedPointSet { particular, directions, consistent, residual })
}

/// Orthogonal projection of `x0` onto the fixed-point set; errors when the
/// set is empty. The result depends only on the geometry, not on any
/// iteration path.
pub fn project_onto_fix(set: &FixedPointSet, x0: &Vector) -> Result<Vector> {
    if !set.consistent {
        return Err(Error::NoFixedPoint { residual: set.residual });
    }
    let shifted = x0 - &set.particular;
    Ok(&set.particular + set.directions.project(&shifted))
}

/// Runs `x_{n+1} = map(x_n)` and fits a linear convergence rate toward
/// `x_star`.
///
/// Returns `(rate, residuals)` with `residuals[n] = |map^n(x0) - x_star|`.
/// The rate is the geometric mean of consecutive residual ratios over the
/// last half of the run; ratios touching residuals below [`tol::RATE_FLOOR`]
/// are discarded as numerical noise, and a run that spends its entire last
/// half below the floor reports rate 0.
pub fn linear_rate(
    map: &AffineMap,
    x0: &Vector,
    x_star: &Vector,
    n_steps: usize,
) -> Result<(f64, Vec<f64>)> {
    if n_steps < 10 {
        return Err(Error::InvalidInput(format!(
            "rate fitting needs at least 10 steps, got {n_steps}"
        )));
    }
    if x0.len() != map.dim() || x_star.len() != map.dim() {
        return Err(Error::DimensionMismatch { expected: map.dim(), got: x0.len() });
    }
    let mut residuals = Vec::with_capacity(n_steps + 1);
    let mut x = x0.clone();
    residuals.push((&x - x_star).norm());
    for _ in 0..n_steps {
        x = map.apply(&x);
        residuals.push((&x - x_star).norm());
    }
    let mut log_sum = 0.0;
    let mut count = 0usize;
    for n in (n_steps / 2)..n_steps {
        let (r0, r1) = (residuals[n], residuals[n + 1]);
        if r0 > tol::RATE_FLOOR && r1 > tol::RATE_FLOOR {
            log_sum += (r1 / r0).ln();
            count += 1;
        }
    }
    let rate = if count == 0 { 0.0 } else { (log_sum / count as f64).exp() };
    Ok((rate, residuals))
}
