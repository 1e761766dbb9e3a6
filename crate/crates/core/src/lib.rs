//! Adaptive mirror descent for convex problems with functional constraints.
//!
//! The crate solves `min f(x)` subject to `g(x) <= 0`, `x in X`, with
//! first-order oracles only. Iterations switch between *productive* steps
//! (the current point is `eps`-feasible, so the objective is decreased) and
//! *non-productive* steps (the constraint is decreased instead). Step sizes
//! adapt to the observed subgradient norms, so no Lipschitz constant has to
//! be known in advance.
//!
//! ```
//! use mdopt::problems::Problem;
//! use mdopt::solvers::{solve_adaptive, SolveOptions, StopReason};
//!
//! let problem = Problem::by_id("fts-quadratic")?;
//! let setup = problem.prox_setup();
//! let run = solve_adaptive(&problem, &setup, 0.5, &problem.x0, &SolveOptions::default())?;
//! assert_eq!(run.stop_reason, StopReason::CriterionMet);
//! assert!(problem.constraint_value(&run.output) <= 0.5);
//! # Ok::<(), mdopt::Error>(())
//! ```
//!
//! Modules, bottom up:
//!
//! - [`prox`]: feasible sets, the Euclidean prox function and the mirror step;
//! - [`oracles`]: objective and constraint oracles;
//! - [`problems`]: the benchmark instances and their fixtures;
//! - [`solvers`]: the four single-run methods;
//! - [`restarts`]: the halving scheme for strongly convex objectives;
//! - [`bench`] and [`verify`]: the machinery behind the `mdopt` binary.

pub mod bench;
pub mod error;
pub mod oracles;
pub mod problems;
pub mod prox;
pub mod restarts;
pub mod solvers;
pub mod verify;

pub use error::{Error, Result};
pub use prox::Vector;

/// The guide's chapters, compiled as doctests so their snippets stay current.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/geometry.md")]
    pub mod geometry {}
    #[doc = include_str!("../../../book/src/oracles.md")]
    pub mod oracles {}
    #[doc = include_str!("../../../book/src/methods.md")]
    pub mod methods {}
    #[doc = include_str!("../../../book/src/restarts.md")]
    pub mod restarts {}
    #[doc = include_str!("../../../book/src/benchmarks.md")]
    pub mod benchmarks {}
}
