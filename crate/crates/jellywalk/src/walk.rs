//! Discrete-time Grover walk evolution with constant boundary injection.
//!
//! At each vertex of degree `r` the amplitudes of the arrows pointing into
//! the vertex (core arrows plus the constant tail inputs) are scattered by
//! the `r x r` Grover coin onto the reversed arrows. Tails contribute their
//! boundary constant as input at every step and receive the outward
//! amplitude in a dedicated slot.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::graph::JellyfishGraph;

pub type C64 = Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    #[error("coin degree must be positive")]
    NonPositiveDegree,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("trajectory is empty")]
    EmptyTrajectory,
}

/// Constant inward amplitudes, one per tail, in tail order.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryInput(pub Vec<C64>);

impl BoundaryInput {
    pub fn real(alphas: &[f64]) -> Self {
        BoundaryInput(alphas.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Arithmetic mean of the boundary amplitudes.
    pub fn average(&self) -> C64 {
        if self.0.is_empty() {
            return C64::new(0.0, 0.0);
        }
        self.0.iter().sum::<C64>() / self.0.len() as f64
    }
}

/// Amplitudes at one time step: one per core arrow plus one outgoing slot
/// per tail (the amplitude on the first outward tail arrow).
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeState {
    pub core: Vec<C64>,
    pub tail_out: Vec<C64>,
}

impl AmplitudeState {
    pub fn zeros(g: &JellyfishGraph) -> Self {
        AmplitudeState {
            core: vec![C64::new(0.0, 0.0); g.num_core_arrows()],
            tail_out: vec![C64::new(0.0, 0.0); g.tail_count()],
        }
    }

    pub fn len(&self) -> usize {
        self.core.len() + self.tail_out.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn matches(&self, g: &JellyfishGraph) -> bool {
        self.core.len() == g.num_core_arrows() && self.tail_out.len() == g.tail_count()
    }

    /// Sup-norm distance to another state.
    pub fn sup_dist(&self, other: &AmplitudeState) -> f64 {
        self.core
            .iter()
            .chain(self.tail_out.iter())
            .zip(other.core.iter().chain(other.tail_out.iter()))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: f64) -> AmplitudeState {
        AmplitudeState {
            core: self.core.iter().map(|a| a * c).collect(),
            tail_out: self.tail_out.iter().map(|a| a * c).collect(),
        }
    }

    fn add_assign(&mut self, other: &AmplitudeState) {
        for (a, b) in self.core.iter_mut().zip(&other.core) {
            *a += b;
        }
        for (a, b) in self.tail_out.iter_mut().zip(&other.tail_out) {
            *a += b;
        }
    }
}

/// Trajectory of states produced by [`evolve`], with per-step sup-norm deltas.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<AmplitudeState>,
    pub deltas: Vec<f64>,
}

/// Result of convergence analysis on a trajectory.
#[derive(Debug, Clone)]
pub struct Convergence {
    /// First step from which the step-to-step delta stays below tolerance.
    pub converged_at: Option<usize>,
    /// Period-2 behavior: two-step deltas vanish while one-step deltas do not.
    pub oscillating: bool,
    /// Time average over the whole trajectory, the fallback limit object.
    pub cesaro: AmplitudeState,
}

/// The `r x r` Grover coin: diagonal `2/r - 1`, off-diagonal `2/r`.
/// Symmetric, orthogonal, and its own inverse.
pub fn grover_coin(r: usize) -> Result<DMatrix<f64>, WalkError> {
    if r == 0 {
        return Err(WalkError::NonPositiveDegree);
    }
    let off = 2.0 / r as f64;
    Ok(DMatrix::from_fn(r, r, |i, j| {
        if i == j {
            off - 1.0
        } else {
            off
        }
    }))
}

/// One step of the Grover walk. Pure function.
pub fn step(
    g: &JellyfishGraph,
    s: &AmplitudeState,
    b: &BoundaryInput,
) -> Result<AmplitudeState, WalkError> {
    if !s.matches(g) {
        return Err(WalkError::DimensionMismatch(format!(
            "state has {} core + {} tail slots, graph needs {} + {}",
            s.core.len(),
            s.tail_out.len(),
            g.num_core_arrows(),
            g.tail_count()
        )));
    }
    if b.len() != g.tail_count() {
        return Err(WalkError::DimensionMismatch(format!(
            "boundary input has {} entries, graph has {} tails",
            b.len(),
            g.tail_count()
        )));
    }

    let mut next = AmplitudeState::zeros(g);
    for v in g.core().vertices() {
        let incoming = g.incoming_arrows(v).expect("vertex in range");
        let tails = g.tails_at(v);
        let r = incoming.len() + tails.len();
        if r == 0 {
            continue;
        }
        let mut sum = C64::new(0.0, 0.0);
        for a in &incoming {
            sum += s.core[a.id];
        }
        for &ti in tails {
            sum += b.0[ti];
        }
        let scale = 2.0 / r as f64;
        // Input on arrow a goes out on its reverse; tail input i goes out on
        // the outward tail arrow i.
        for a in &incoming {
            next.core[a.reverse_id] = scale * sum - s.core[a.id];
        }
        for &ti in tails {
            next.tail_out[ti] = scale * sum - b.0[ti];
        }
    }
    Ok(next)
}

/// Run `t_max` steps from `initial` (all-zero when absent), recording every
/// state and the per-step sup-norm deltas.
pub fn evolve(
    g: &JellyfishGraph,
    b: &BoundaryInput,
    t_max: usize,
    initial: Option<AmplitudeState>,
) -> Result<Trajectory, WalkError> {
    let mut current = initial.unwrap_or_else(|| AmplitudeState::zeros(g));
    if !current.matches(g) {
        return Err(WalkError::DimensionMismatch(
            "initial state does not fit the graph".into(),
        ));
    }
    let mut states = Vec::with_capacity(t_max + 1);
    let mut deltas = Vec::with_capacity(t_max);
    states.push(current.clone());
    for _ in 0..t_max {
        let next = step(g, &current, b)?;
        deltas.push(next.sup_dist(&current));
        states.push(next.clone());
        current = next;
    }
    Ok(Trajectory { states, deltas })
}

// Sustained-delta window: a transient can momentarily stall, so a single
// small delta is not evidence of convergence.
const SUSTAIN_WINDOW: usize = 10;

/// Scan a trajectory for pointwise convergence, period-2 oscillation, and
/// compute the Cesaro time average.
pub fn detect_convergence(traj: &Trajectory, tol: f64) -> Result<Convergence, WalkError> {
    if traj.states.is_empty() {
        return Err(WalkError::EmptyTrajectory);
    }

    let converged_at = first_sustained(&traj.deltas, tol);

    // Two-step deltas, for period-2 detection.
    let p2: Vec<f64> = traj
        .states
        .windows(3)
        .map(|w| w[2].sup_dist(&w[0]))
        .collect();
    let oscillating = converged_at.is_none() && first_sustained(&p2, tol).is_some();

    let mut cesaro = traj.states[0].clone();
    for s in &traj.states[1..] {
        cesaro.add_assign(s);
    }
    let cesaro = cesaro.scaled(1.0 / traj.states.len() as f64);

    Ok(Convergence {
        converged_at,
        oscillating,
        cesaro,
    })
}

// First index from which all deltas stay below tol, sustained for up to
// SUSTAIN_WINDOW entries (truncated at the end of the run). Returns None
// when there are no deltas at all below tolerance.
fn first_sustained(deltas: &[f64], tol: f64) -> Option<usize> {
    if deltas.is_empty() {
        return None;
    }
    (0..deltas.len()).find(|&t| {
        let end = (t + SUSTAIN_WINDOW).min(deltas.len());
        deltas[t..end].iter().all(|&d| d < tol)
    })
}
