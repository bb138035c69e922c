//! Grover quantum walks on jellyfish graphs: a finite symmetric simple core
//! with semi-infinite half-line tails. The crate simulates the walk under
//! constant boundary injection, computes the stationary state by two
//! independent routes (direct fixed point and a unit-resistance electrical
//! network), and evaluates the current, outflow, and accumulation
//! observables together with their identities.
//!
//! ```
//! use jellywalk::graph::build_jellyfish;
//! use jellywalk::solver::solve_electric;
//! use jellywalk::walk::BoundaryInput;
//!
//! let g = build_jellyfish(2, &[(1, 2)], &[1, 2]).unwrap();
//! let s = solve_electric(&g, &BoundaryInput::real(&[1.0, 0.0])).unwrap();
//! assert!((s.betas[1].re - 1.0).abs() < 1e-12);
//! ```

pub mod generate;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod observables;
pub mod solver;
pub mod walk;

pub use graph::{build_jellyfish, JellyfishGraph, VertexId};
pub use solver::{solve_electric, solve_fixed_point, StationaryState};
pub use walk::{evolve, grover_coin, step, AmplitudeState, BoundaryInput, C64};

// The guide's code blocks double as doc-tests so the book stays in sync
// with the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/walk.md")]
    mod walk {}
    #[doc = include_str!("../../../book/src/stationary.md")]
    mod stationary {}
    #[doc = include_str!("../../../book/src/observables.md")]
    mod observables {}
}
