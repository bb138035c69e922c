//! Stationary states of the walk, computed by two independent routes:
//!
//! * `solve_fixed_point` treats one step of the walk as an affine map and
//!   solves the fixed-point equation directly (minimum-norm least squares
//!   when internal eigenvalue-1 modes make the system singular);
//! * `solve_electric` treats the limit currents as a unit-resistance
//!   electrical network and recovers the amplitudes from the Kirchhoff
//!   potentials.
//!
//! Agreement of the two routes is the main correctness check for both.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::graph::{CoreGraph, JellyfishGraph, VertexId};
use crate::linalg::{self, LinalgError};
use crate::walk::{self, AmplitudeState, BoundaryInput, C64, WalkError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("fixed-point system is singular beyond repair (least-squares residual {residual:e})")]
    SingularBeyondRepair { residual: f64 },
    #[error("linear solve failed: {0}")]
    Linalg(#[from] LinalgError),
    #[error("walk error: {0}")]
    Walk(#[from] WalkError),
}

/// Limit amplitudes: core arrows, outgoing tail amplitudes, and the boundary
/// average.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryState {
    pub core: Vec<C64>,
    pub betas: Vec<C64>,
    pub ave: C64,
}

impl StationaryState {
    pub fn as_amplitude_state(&self) -> AmplitudeState {
        AmplitudeState {
            core: self.core.clone(),
            tail_out: self.betas.clone(),
        }
    }

    /// Sup-norm of the one-step fixed-point defect.
    pub fn fixed_point_residual(
        &self,
        g: &JellyfishGraph,
        b: &BoundaryInput,
    ) -> Result<f64, WalkError> {
        let s = self.as_amplitude_state();
        let next = walk::step(g, &s, b)?;
        Ok(next.sup_dist(&s))
    }
}

fn flatten(s: &AmplitudeState) -> DVector<C64> {
    DVector::from_iterator(
        s.len(),
        s.core.iter().chain(s.tail_out.iter()).cloned(),
    )
}

fn unflatten(g: &JellyfishGraph, v: &DVector<C64>) -> AmplitudeState {
    let a = g.num_core_arrows();
    AmplitudeState {
        core: v.iter().take(a).cloned().collect(),
        tail_out: v.iter().skip(a).cloned().collect(),
    }
}

/// The matrix `I - U` of the one-step map restricted to the materialized
/// amplitudes (core arrows then tail-out slots), built column by column from
/// the step function itself.
pub fn fixed_point_matrix(g: &JellyfishGraph) -> Result<DMatrix<C64>, WalkError> {
    let dim = g.num_core_arrows() + g.tail_count();
    let zero_b = BoundaryInput(vec![C64::new(0.0, 0.0); g.tail_count()]);
    let mut i_minus_u = DMatrix::<C64>::identity(dim, dim);
    for j in 0..dim {
        let mut basis = DVector::<C64>::zeros(dim);
        basis[j] = C64::new(1.0, 0.0);
        let col = flatten(&walk::step(g, &unflatten(g, &basis), &zero_b)?);
        for i in 0..dim {
            i_minus_u[(i, j)] -= col[i];
        }
    }
    Ok(i_minus_u)
}

/// A factored fixed-point system, reusable across boundary inputs.
pub struct FixedPointSolver<'g> {
    graph: &'g JellyfishGraph,
    matrix: DMatrix<C64>,
    svd: linalg::JacobiSvd,
}

impl<'g> FixedPointSolver<'g> {
    pub fn new(g: &'g JellyfishGraph) -> Result<Self, SolverError> {
        let matrix = fixed_point_matrix(g)?;
        let svd = linalg::JacobiSvd::new(&matrix)?;
        Ok(FixedPointSolver {
            graph: g,
            matrix,
            svd,
        })
    }

    pub fn solve(&self, b: &BoundaryInput) -> Result<StationaryState, SolverError> {
        let g = self.graph;
        // c = step(0, alpha): the inhomogeneous term of the affine step map.
        let c = flatten(&walk::step(g, &AmplitudeState::zeros(g), b)?);
        let x = self.svd.min_norm_solve(&c);
        let residual = (&self.matrix * &x - &c).norm();
        if residual > 1e-8 {
            return Err(SolverError::SingularBeyondRepair { residual });
        }
        let s = unflatten(g, &x);
        Ok(StationaryState {
            core: s.core,
            betas: s.tail_out,
            ave: b.average(),
        })
    }
}

/// Solve `psi = step(psi)` as a linear system in the core amplitudes and
/// betas, with the boundary constants as the inhomogeneous term. When
/// internal eigenvalue-1 modes make `I - U` singular, the minimum-norm
/// least-squares solution is returned.
pub fn solve_fixed_point(
    g: &JellyfishGraph,
    b: &BoundaryInput,
) -> Result<StationaryState, SolverError> {
    FixedPointSolver::new(g)?.solve(b)
}

/// Combinatorial Laplacian `L = D - A` of the core (tails excluded).
pub fn build_laplacian(core: &CoreGraph) -> DMatrix<f64> {
    let n = core.vertex_count();
    let mut l = DMatrix::zeros(n, n);
    for v in core.vertices() {
        l[(v.index0(), v.index0())] = core.core_degree(v) as f64;
    }
    for a in core.arrows() {
        l[(a.origin.index0(), a.target.index0())] = -1.0;
    }
    l
}

/// Compute the stationary state via the unit-resistance electrical network:
/// inject `alpha_i - ave` at each attachment, solve for potentials grounded
/// at vertex 1, read currents off the potential differences.
pub fn solve_electric(
    g: &JellyfishGraph,
    b: &BoundaryInput,
) -> Result<StationaryState, SolverError> {
    if b.len() != g.tail_count() {
        return Err(SolverError::Walk(WalkError::DimensionMismatch(format!(
            "boundary input has {} entries, graph has {} tails",
            b.len(),
            g.tail_count()
        ))));
    }
    let ave = b.average();
    let n = g.vertex_count();

    let mut injections = DVector::<C64>::zeros(n);
    for t in g.tails() {
        injections[t.attach.index0()] += b.0[t.tail_index] - ave;
    }

    let laplacian = build_laplacian(g.core()).map(|x| C64::new(x, 0.0));
    let phi = linalg::grounded_solve(&laplacian, &injections, VertexId(1))?;

    let core = g
        .core()
        .arrows()
        .iter()
        .map(|a| phi[a.origin.index0()] - phi[a.target.index0()] + ave)
        .collect();
    let betas = b.0.iter().map(|alpha| 2.0 * ave - alpha).collect();

    Ok(StationaryState { core, betas, ave })
}
