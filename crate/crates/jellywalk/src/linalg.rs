//! Dense solver plumbing: LU with partial pivoting, minimum-norm least
//! squares via SVD, and a grounded Laplacian solve.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::graph::VertexId;
use crate::walk::C64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch between matrix and rhs")]
    DimensionMismatch,
    #[error("injected currents do not sum to zero (|sum| = {sum:e})")]
    NonZeroCurrentSum { sum: f64 },
    #[error("ground vertex {0} out of range")]
    InvalidGround(usize),
    #[error("SVD failed to converge")]
    SvdFailure,
}

/// A dense square or rectangular complex system `matrix * x = rhs`.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: DMatrix<C64>,
    pub rhs: DVector<C64>,
}

impl LinearSystem {
    pub fn new(matrix: DMatrix<C64>, rhs: DVector<C64>) -> Result<Self, LinalgError> {
        if matrix.nrows() != rhs.len() {
            return Err(LinalgError::DimensionMismatch);
        }
        Ok(LinearSystem { matrix, rhs })
    }
}

/// Solve a square nonsingular system by LU with partial pivoting.
pub fn lu_solve(sys: &LinearSystem) -> Result<DVector<C64>, LinalgError> {
    let (rows, cols) = sys.matrix.shape();
    if rows != cols {
        return Err(LinalgError::NotSquare { rows, cols });
    }
    sys.matrix
        .clone()
        .lu()
        .solve(&sys.rhs)
        .ok_or(LinalgError::SingularMatrix)
}

/// Minimum-norm least-squares solution via a one-sided Jacobi SVD, with the
/// residual norm `||A x - b||` of the returned solution.
pub fn least_squares_solve(sys: &LinearSystem) -> Result<(DVector<C64>, f64), LinalgError> {
    let svd = JacobiSvd::new(&sys.matrix)?;
    let x = svd.min_norm_solve(&sys.rhs);
    let residual = (&sys.matrix * &x - &sys.rhs).norm();
    Ok((x, residual))
}

/// A factored SVD, reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct JacobiSvd {
    u: DMatrix<C64>,
    sigma: Vec<f64>,
    v: DMatrix<C64>,
}

impl JacobiSvd {
    pub fn new(matrix: &DMatrix<C64>) -> Result<Self, LinalgError> {
        let (u, sigma, v) = jacobi_svd(matrix)?;
        Ok(JacobiSvd { u, sigma, v })
    }

    /// Minimum-norm least-squares solution for one right-hand side.
    pub fn min_norm_solve(&self, rhs: &DVector<C64>) -> DVector<C64> {
        let smax = self.sigma.iter().cloned().fold(0.0, f64::max);
        // Rank cutoff relative to the largest singular value.
        let eps = smax * 1e-12;
        let mut x = DVector::<C64>::zeros(self.v.nrows());
        for k in 0..self.sigma.len() {
            if self.sigma[k] > eps {
                let coeff = self.u.column(k).dotc(rhs) / self.sigma[k];
                x.axpy(coeff, &self.v.column(k), C64::new(1.0, 0.0));
            }
        }
        x
    }
}

// One-sided Jacobi (Hestenes) SVD: rotate column pairs of a working copy of
// A until all pairs are orthogonal, accumulating the rotations in V. Then
// A V = U diag(sigma). Slow but accurate, and the systems here are small.
fn jacobi_svd(a: &DMatrix<C64>) -> Result<(DMatrix<C64>, Vec<f64>, DMatrix<C64>), LinalgError> {
    let (rows, cols) = a.shape();
    let mut w = a.clone();
    let mut v = DMatrix::<C64>::identity(cols, cols);
    let tol = 1e-15;
    let max_sweeps = 60;

    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut off = 0.0f64;
        for i in 0..cols {
            for j in (i + 1)..cols {
                let p = w.column(i).dotc(&w.column(j));
                let alpha = w.column(i).norm_squared();
                let beta = w.column(j).norm_squared();
                let scale = (alpha * beta).sqrt();
                if scale == 0.0 || p.norm() <= tol * scale {
                    continue;
                }
                off = off.max(p.norm() / scale);
                // Phase-align column j so the pair problem becomes real,
                // then apply the classic symmetric Jacobi rotation.
                let phase = p / p.norm();
                let g = p.norm();
                let tau = (beta - alpha) / (2.0 * g);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for row in 0..rows {
                    let wi = w[(row, i)];
                    let wj = w[(row, j)] * phase.conj();
                    w[(row, i)] = c * wi - s * wj;
                    w[(row, j)] = s * wi + c * wj;
                }
                for row in 0..cols {
                    let vi = v[(row, i)];
                    let vj = v[(row, j)] * phase.conj();
                    v[(row, i)] = c * vi - s * vj;
                    v[(row, j)] = s * vi + c * vj;
                }
            }
        }
        if off < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LinalgError::SvdFailure);
    }

    let mut sigma = vec![0.0f64; cols];
    let mut u = DMatrix::<C64>::zeros(rows, cols);
    for k in 0..cols {
        let norm = w.column(k).norm();
        sigma[k] = norm;
        if norm > 0.0 {
            let col = w.column(k) / C64::new(norm, 0.0);
            u.set_column(k, &col);
        }
    }
    Ok((u, sigma, v))
}

/// Solve `L phi = i` for potentials with `phi(ground) = 0`, by deleting the
/// ground row and column. Requires the injected currents to sum to zero.
pub fn grounded_solve(
    laplacian: &DMatrix<C64>,
    injections: &DVector<C64>,
    ground: VertexId,
) -> Result<DVector<C64>, LinalgError> {
    let n = laplacian.nrows();
    if laplacian.ncols() != n || injections.len() != n {
        return Err(LinalgError::DimensionMismatch);
    }
    if ground.0 == 0 || ground.0 > n {
        return Err(LinalgError::InvalidGround(ground.0));
    }
    let total: C64 = injections.iter().sum();
    let scale = injections.norm();
    if total.norm() > 1e-12 * scale.max(1.0) {
        return Err(LinalgError::NonZeroCurrentSum { sum: total.norm() });
    }

    let g = ground.index0();
    let keep: Vec<usize> = (0..n).filter(|&i| i != g).collect();
    if keep.is_empty() {
        // Single-vertex network: the ground is the whole system.
        return Ok(DVector::zeros(1));
    }
    let reduced = DMatrix::from_fn(n - 1, n - 1, |i, j| laplacian[(keep[i], keep[j])]);
    let rhs = DVector::from_fn(n - 1, |i, _| injections[keep[i]]);
    let sol = reduced
        .lu()
        .solve(&rhs)
        .ok_or(LinalgError::SingularMatrix)?;

    let mut phi = DVector::zeros(n);
    for (row, &v) in keep.iter().enumerate() {
        phi[v] = sol[row];
    }
    Ok(phi)
}
