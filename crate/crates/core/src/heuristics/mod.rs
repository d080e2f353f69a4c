//! Surrogate ranking and the greedy placement procedure.

mod placement;
mod priority;

pub use placement::{place, PlacementOutcome, PlacementState};
pub use priority::{
    priorities, priority_gs, priority_sna, priority_wsna, surrogate_order, surrogate_ranking,
    PriorityKind,
};

use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeuristicError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("content {}: {unmet} requests cannot be routed even with every zone hosting", content + 1)]
    Infeasible { content: usize, unmet: u64 },
}
