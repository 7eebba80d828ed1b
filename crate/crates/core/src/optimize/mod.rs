//! Solving layer: the ground-truth objective evaluator, exhaustive search,
//! a built-in branch-and-bound, MILP backends and the reduce/solve/unfold
//! pipeline.

mod bnb;
mod brute_force;
mod evaluate;
pub mod external;
mod pipeline;
mod solve;

pub use bnb::{branch_and_bound, BnbStats};
pub use brute_force::{brute_force, next_permutation, search_space, DEFAULT_BUDGET};
pub use evaluate::{evaluate, EventHit, EventKind, ObjectiveBreakdown};
pub use pipeline::{optimize_pipeline, PipelineReport};
pub use solve::{solve, Backend, SolveOptions, SolveReport, Variant};


use thiserror::Error;

use crate::graph::OrderingError;
use crate::ilp::IlpError;
use crate::reduce::ReduceError;

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("malformed ordering: {0}")]
    MalformedOrdering(#[from] OrderingError),
    #[error("search space of {size} orderings exceeds the budget of {budget}")]
    BudgetExceeded { size: u64, budget: u64 },
    #[error("solver failure: {0}")]
    SolverFailure(String),
    #[error("model reported infeasible")]
    Infeasible,
    #[error("model objective {model} differs from evaluated objective {evaluated}")]
    ObjectiveMismatch { model: i64, evaluated: i64 },
    #[error(transparent)]
    Ilp(#[from] IlpError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error("backend {0} is not available in this build")]
    Unavailable(&'static str),
}
