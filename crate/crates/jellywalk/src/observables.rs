//! Currents, outflow, accumulation, and the identities tying them together.
//!
//! `J(a) = psi_inf(a) - ave` behaves like an electrical current: it is
//! antisymmetric under arrow reversal and conserved at every vertex when the
//! constant tail inputs are counted. The accumulation `P0(v)` — squared
//! moduli flowing into a vertex minus those flowing out, over core arrows —
//! collapses to `4 * Re(conj(ave) * J_out(v))`:
//!
//! ```text
//! |J + ave|^2 - |-J + ave|^2
//!     = (J + ave)(conj(J) + conj(ave)) - (ave - J)(conj(ave) - conj(J))
//!     = 2 (J conj(ave) + conj(J) ave)
//!     = 4 Re(conj(ave) J)
//! ```
//!
//! summed over the core arrows into `v`, which the current law turns into
//! the total outflow `J_out(v)`. With real boundary input this is the plain
//! product `4 * ave * J_out(v)`.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::graph::{JellyfishGraph, VertexId};
use crate::solver::{self, SolverError, StationaryState};
use crate::walk::{BoundaryInput, C64};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObservableError {
    #[error("solver failed: {0}")]
    Solver(#[from] SolverError),
}

/// The current `J` on every materialized arrow.
#[derive(Debug, Clone, PartialEq)]
pub struct Currents {
    /// Per core arrow, in arrow-id order.
    pub core: Vec<C64>,
    /// Inward tail arrows: `alpha_i - ave`.
    pub tail_in: Vec<C64>,
    /// Outward tail arrows: `beta_i - ave = ave - alpha_i`.
    pub tail_out: Vec<C64>,
}

/// `J(a) = psi_inf(a) - ave` on core arrows and both tail directions.
pub fn current_j(s: &StationaryState, b: &BoundaryInput) -> Currents {
    let ave = s.ave;
    Currents {
        core: s.core.iter().map(|psi| psi - ave).collect(),
        tail_in: b.0.iter().map(|alpha| alpha - ave).collect(),
        tail_out: s.betas.iter().map(|beta| beta - ave).collect(),
    }
}

/// Total current leaving the core at `v` through its tails.
pub fn j_out(g: &JellyfishGraph, cur: &Currents, v: VertexId) -> C64 {
    g.tails_at(v).iter().map(|&ti| cur.tail_out[ti]).sum()
}

/// The Kirchhoff-equivalent form of [`j_out`]: net core current into `v`.
pub fn j_out_core_form(g: &JellyfishGraph, cur: &Currents, v: VertexId) -> C64 {
    g.incoming_arrows(v)
        .expect("vertex in range")
        .iter()
        .map(|a| cur.core[a.id])
        .sum()
}

/// Net accumulation at `v`: squared moduli of core arrows into `v` minus
/// those of the reversed arrows. Tail arrows are excluded.
pub fn p0(g: &JellyfishGraph, s: &StationaryState, v: VertexId) -> f64 {
    g.incoming_arrows(v)
        .expect("vertex in range")
        .iter()
        .map(|a| s.core[a.id].norm_sqr() - s.core[a.reverse_id].norm_sqr())
        .sum()
}

/// Per-vertex check of the accumulation identity
/// `P0(v) = 4 Re(conj(ave) * J_out(v))`.
#[derive(Debug, Clone)]
pub struct Theorem4Check {
    /// (P0, J_out, |P0 - 4 Re(conj(ave) J_out)|) per vertex.
    pub per_vertex: Vec<(f64, C64, f64)>,
    /// Max residual over vertices.
    pub residual: f64,
}

/// Evaluate the accumulation identity at every vertex.
pub fn verify_theorem4(
    g: &JellyfishGraph,
    s: &StationaryState,
    b: &BoundaryInput,
) -> Theorem4Check {
    let cur = current_j(s, b);
    let per_vertex: Vec<(f64, C64, f64)> = g
        .core()
        .vertices()
        .map(|v| {
            let p = p0(g, s, v);
            let jo = j_out(g, &cur, v);
            let predicted = 4.0 * (s.ave.conj() * jo).re;
            (p, jo, (p - predicted).abs())
        })
        .collect();
    let residual = per_vertex.iter().map(|t| t.2).fold(0.0, f64::max);
    Theorem4Check {
        per_vertex,
        residual,
    }
}

/// The `m x m` matrix mapping boundary inputs to outgoing tail amplitudes,
/// computed column by column through the fixed-point solver.
pub fn scattering_matrix(g: &JellyfishGraph) -> Result<DMatrix<C64>, SolverError> {
    let m = g.tail_count();
    let solver = solver::FixedPointSolver::new(g)?;
    let mut s = DMatrix::<C64>::zeros(m, m);
    for j in 0..m {
        let mut alphas = vec![C64::new(0.0, 0.0); m];
        alphas[j] = C64::new(1.0, 0.0);
        let st = solver.solve(&BoundaryInput(alphas))?;
        for i in 0..m {
            s[(i, j)] = st.betas[i];
        }
    }
    Ok(s)
}

/// Entrywise sup distance of a scattering matrix from the `m x m` Grover
/// coin, which it must equal: seen from the tails, the whole core scatters
/// like a single vertex of degree `m`.
pub fn grover_deviation(s: &DMatrix<C64>) -> f64 {
    let m = s.nrows();
    let off = 2.0 / m as f64;
    let mut worst = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            let want = if i == j { off - 1.0 } else { off };
            worst = worst.max((s[(i, j)] - C64::new(want, 0.0)).norm());
        }
    }
    worst
}

/// The random-walk contrast: the limit measure of the simple random walk is
/// edge-uniform, so every arrow gets the same weight regardless of where the
/// dissipation sits.
pub fn random_walk_baseline(g: &JellyfishGraph) -> Vec<f64> {
    let a = g.num_core_arrows();
    if a == 0 {
        return Vec::new();
    }
    vec![1.0 / a as f64; a]
}

/// Argmax of the accumulation. `zero_ave` flags the degenerate case where
/// the boundary average vanishes and `P0` is identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ArgmaxResult {
    pub vertices: Vec<VertexId>,
    pub zero_ave: bool,
}

fn argmax_by<F: Fn(VertexId) -> f64>(g: &JellyfishGraph, f: F) -> Vec<VertexId> {
    let values: Vec<(VertexId, f64)> = g.core().vertices().map(|v| (v, f(v))).collect();
    let max = values.iter().map(|&(_, x)| x).fold(f64::NEG_INFINITY, f64::max);
    // Ties are generic on symmetric graphs; report the whole tie set.
    values
        .iter()
        .filter(|&&(_, x)| (x - max).abs() <= 1e-12 * max.abs().max(1.0))
        .map(|&(v, _)| v)
        .collect()
}

/// Full per-graph observable report.
#[derive(Debug, Clone)]
pub struct ObservableReport {
    pub currents: Currents,
    pub j_out: Vec<C64>,
    pub p0: Vec<f64>,
    pub ave: C64,
    pub thm4_residual: f64,
    pub kirchhoff_residual: f64,
    pub scattering_deviation: f64,
    pub baseline: Vec<f64>,
    pub argmax_p0: ArgmaxResult,
    pub argmax_j_out: Vec<VertexId>,
}

/// Vertices maximizing `P0`. When `ave` vanishes `P0` is identically zero
/// and every vertex ties.
pub fn accumulation_argmax(report: &ObservableReport) -> ArgmaxResult {
    report.argmax_p0.clone()
}

/// Compute every observable and identity residual for a stationary state.
pub fn analyze(
    g: &JellyfishGraph,
    s: &StationaryState,
    b: &BoundaryInput,
) -> Result<ObservableReport, ObservableError> {
    let cur = current_j(s, b);
    let j_out_vec: Vec<C64> = g.core().vertices().map(|v| j_out(g, &cur, v)).collect();
    let p0_vec: Vec<f64> = g.core().vertices().map(|v| p0(g, s, v)).collect();

    let thm4 = verify_theorem4(g, s, b);

    // Kirchhoff residual covers antisymmetry, the per-vertex current law
    // (tail inputs included), and agreement of the two J_out forms.
    let mut kirchhoff = 0.0f64;
    for a in g.core().arrows() {
        kirchhoff = kirchhoff.max((cur.core[a.id] + cur.core[a.reverse_id]).norm());
    }
    for v in g.core().vertices() {
        let mut sum: C64 = g
            .incoming_arrows(v)
            .expect("vertex in range")
            .iter()
            .map(|a| cur.core[a.id])
            .sum();
        for &ti in g.tails_at(v) {
            sum += cur.tail_in[ti];
        }
        kirchhoff = kirchhoff.max(sum.norm());
        kirchhoff =
            kirchhoff.max((j_out(g, &cur, v) - j_out_core_form(g, &cur, v)).norm());
    }

    let scattering_deviation = grover_deviation(&scattering_matrix(g)?);

    let zero_ave = s.ave.norm() < 1e-14;
    let argmax_p0 = if zero_ave {
        ArgmaxResult {
            vertices: g.core().vertices().collect(),
            zero_ave: true,
        }
    } else {
        ArgmaxResult {
            vertices: argmax_by(g, |v| p0_vec[v.index0()]),
            zero_ave: false,
        }
    };
    let argmax_j_out = argmax_by(g, |v| j_out_vec[v.index0()].re);

    Ok(ObservableReport {
        currents: cur,
        j_out: j_out_vec,
        p0: p0_vec,
        ave: s.ave,
        thm4_residual: thm4.residual,
        kirchhoff_residual: kirchhoff,
        scattering_deviation,
        baseline: random_walk_baseline(g),
        argmax_p0,
        argmax_j_out,
    })
}
