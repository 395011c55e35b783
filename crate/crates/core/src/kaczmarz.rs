//! Block Kaczmarz front end: a linear system `M x = b`, cut into row blocks,
//! becomes a collection of affine subspaces (one per block), and any
//! projection schedule over that collection is a Kaczmarz solver.
//!
//! Each block is required to be consistent on its own so it defines a genuine
//! affine subspace; the system as a whole may well be inconsistent, in which
//! case no schedule converges to a solution, yet every trace stays inside the
//! certificate bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::engine::{self, IterationTrace, Schedule};
use crate::error::{Error, Result};
use crate::linops::{self, Matrix, Vector};
use crate::subspaces::{AffineSubspace, LinearSubspace};
use crate::tol;

/// A linear system with a partition of its rows into blocks.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    matrix: Matrix,
    rhs: Vector,
    blocks: Vec<Vec<usize>>,
}

impl BlockSystem {
    /// Validates that `blocks` is a partition of the row set: every row index
    /// appears in exactly one block and no block is empty.
    pub fn new(matrix: Matrix, rhs: Vector, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let p = matrix.nrows();
        if rhs.len() != p {
            return Err(Error::DimensionMismatch { expected: p, got: rhs.len() });
        }
        if !matrix.iter().all(|t| t.is_finite()) || !rhs.iter().all(|t| t.is_finite()) {
            return Err(Error::NonFinite("system data"));
        }
        let mut seen = vec![false; p];
        for (bi, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidBlocks(format!("block {bi} is empty")));
            }
            for &row in block {
                if row >= p {
                    return Err(Error::InvalidBlocks(format!(
                        "block {bi} references row {row}, but the system has {p} rows"
                    )));
                }
                if seen[row] {
                    return Err(Error::InvalidBlocks(format!(
                        "row {row} appears in more than one block"
                    )));
                }
                seen[row] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidBlocks(format!("row {missing} belongs to no block")));
        }
        Ok(Self { matrix, rhs, blocks })
    }

    /// One block per row.
    pub fn singleton_blocks(matrix: Matrix, rhs: Vector) -> Result<Self> {
        let blocks = (0..matrix.nrows()).map(|i| vec![i]).collect();
        Self::new(matrix, rhs, blocks)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &Vector {
        &self.rhs
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    fn block_rows(&self, bi: usize) -> (Matrix, Vector) {
        let block = &self.blocks[bi];
        let mut m = Matrix::zeros(block.len(), self.matrix.ncols());
        let mut v = Vector::zeros(block.len());
        for (out, &row) in block.iter().enumerate() {
            m.set_row(out, &self.matrix.row(row));
            v[out] = self.rhs[row];
        }
        (m, v)
    }
}

/// Materializes each block `M_I x = b_I` as the affine subspace of its
/// solutions: direction `ker(M_I)`, translation the minimum-norm solution
/// (which lies in the row space, so the pair is canonical by construction).
///
/// A block that is inconsistent on its own has no solutions at all and is
/// reported as an error naming the block.
pub fn blocks_to_affine(system: &BlockSystem) -> Result<Vec<AffineSubspace>> {
    let mut out = Vec::with_capacity(system.blocks.len());
    for bi in 0..system.blocks.len() {
        let (m, v) = system.block_rows(bi);
        let (solution, residual) = linops::least_squares(&m, &v)?;
        if residual > tol::CONSISTENCY_REL * (1.0 + v.norm()) {
            return Err(Error::InconsistentBlock { block: bi, residual });
        }
        let direction =
            LinearSubspace::from_orthonormal_basis(linops::nullspace(&m, tol::RANK_REL))?;
        out.push(AffineSubspace::new(direction, solution)?);
    }
    Ok(out)
}

/// Outcome of a Kaczmarz run.
#[derive(Debug, Clone)]
pub struct KaczmarzReport {
    pub trace: IterationTrace,
    /// `|M x_n - b|` per iterate, including the start.
    pub residuals: Vec<f64>,
    /// Distance from each iterate to the least-squares solution.
    pub lsq_distance: Vec<f64>,
    /// Minimum-norm least-squares solution of the full system.
    pub lsq_solution: Vector,
    /// Residual of that solution; zero exactly when the system is consistent.
    pub lsq_residual: f64,
    /// Whether the full system is consistent at [`tol::CONSISTENCY_REL`].
    pub consistent: bool,
}

/// Runs the projection iteration on the block subspaces and reports residual
/// histories alongside the trace.
pub fn solve(
    system: &BlockSystem,
    schedule: &Schedule,
    x0: &Vector,
    n_steps: usize,
) -> Result<KaczmarzReport> {
    let collection = blocks_to_affine(system)?;
    let trace = engine::iterate(&collection, schedule, x0, n_steps)?;
    let iterates = trace.iterates.as_ref().expect("iterate keeps full history");
    let residuals: Vec<f64> =
        iterates.iter().map(|x| (&system.matrix * x - &system.rhs).norm()).collect();
    let (lsq_solution, lsq_residual) = linops::least_squares(&system.matrix, &system.rhs)?;
    let lsq_distance: Vec<f64> = iterates.iter().map(|x| (x - &lsq_solution).norm()).collect();
    let consistent = lsq_residual <= tol::CONSISTENCY_REL * (1.0 + system.rhs.norm());
    Ok(KaczmarzReport { trace, residuals, lsq_distance, lsq_solution, lsq_residual, consistent })
}

/// A `p x q` system with independent standard normal entries and unit-norm
/// rows, plus an independent standard normal right-hand side. Deterministic
/// in `seed`; for `p > q` the system is almost surely inconsistent.
pub fn gaussian_instance(p: usize, q: usize, seed: u64) -> (Matrix, Vector) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(p);
    for _ in 0..p {
        let row = loop {
            let r = Vector::from_fn(q, |_, _| rng.sample::<f64, _>(StandardNormal));
            let norm = r.norm();
            if norm > 1e-9 {
                break r / norm;
            }
        };
        rows.push(row.transpose());
    }
    let matrix = Matrix::from_rows(&rows);
    let rhs = Vector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
    (matrix, rhs)
}
