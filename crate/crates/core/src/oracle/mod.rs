//! Brute-force ground truth for tiny instances.

mod bc;
mod exact;

pub use bc::{bc_bruteforce, BC_MAX_ZONES};
pub use exact::{exact_optimal, OracleSolution, OracleStats};

use thiserror::Error;

use crate::model::{Instance, ModelError};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("instance outside oracle limits: {0}")]
    Limit(String),
    #[error("search exceeded the work budget of {nodes} nodes")]
    Budget { nodes: u64 },
    #[error("no feasible configuration")]
    Infeasible,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Size caps keeping exhaustive search tractable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_zones: usize,
    pub max_contents: usize,
    pub max_total_demand: u64,
    pub max_paths_per_pair: usize,
    /// Search nodes visited before giving up.
    pub work_budget: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_zones: 5, max_contents: 1, max_total_demand: 6, max_paths_per_pair: 2, work_budget: 50_000_000 }
    }
}

impl OracleLimits {
    pub fn check<T: Scalar>(&self, instance: &Instance<T>) -> Result<(), OracleError> {
        let fail = |msg: String| Err(OracleError::Limit(msg));
        if instance.zone_count() > self.max_zones {
            return fail(format!("{} zones > {}", instance.zone_count(), self.max_zones));
        }
        if instance.content_count() > self.max_contents {
            return fail(format!("{} contents > {}", instance.content_count(), self.max_contents));
        }
        if instance.demand.total() > self.max_total_demand {
            return fail(format!("total demand {} > {}", instance.demand.total(), self.max_total_demand));
        }
        let n = instance.zone_count();
        let widest = (0..n * n).map(|p| instance.paths.paths(p / n, p % n).len()).max().unwrap_or(0);
        if widest > self.max_paths_per_pair {
            return fail(format!("{widest} paths per pair > {}", self.max_paths_per_pair));
        }
        Ok(())
    }
}
