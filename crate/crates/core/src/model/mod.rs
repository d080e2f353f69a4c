//! The placement ILP: instance data, configuration evaluation, constraint
//! validation and LP-format export.

mod config;
mod demand;
mod eval;
mod ilp;
mod validate;

pub use config::{Configuration, Flow};
pub use demand::DemandMatrix;
pub use eval::{
    bandwidth_cost, classify_violations, edge_delay, edge_loads, evaluate, path_latency, sla_satisfied,
    total_objective, CostReport, Evaluation, Flags, PathStat,
};
pub use ilp::{export_ilp, expected_variable_count, lp_assignment, IlpOptions, LpModel, LpRow, LpSense};
pub use validate::{validate, violations_to_csv, SlaMode, Violation};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::topology::{undirected, LinkModel, Network, Path, PathSet, Topology, TopologyError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("invalid demand: {0}")]
    Demand(String),
    #[error("edge {from}-{to}: load {load} Mbps exceeds capacity {capacity} Mbps")]
    Capacity { from: u32, to: u32, load: f64, capacity: f64 },
    #[error("load {load} Mbps exceeds LUT range {capacity} Mbps")]
    LutRange { load: f64, capacity: f64 },
    #[error("flow references an unknown path, zone or content: {0}")]
    BadFlow(String),
    #[error("LP export needs {vars} variables, above the cap of {cap}")]
    TooLarge { vars: usize, cap: usize },
    #[error("configuration file line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Scalar inputs of the model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(serialize = "T: Serialize", deserialize = "T: Scalar"))]
pub struct Params<T> {
    /// QoS latency threshold Q, ms.
    pub qos_ms: T,
    /// SLA percentage S in (0, 100].
    pub sla_pct: T,
    /// Content access rate A, Mbps per request.
    pub access_rate: T,
    /// LUT granularity μ, Mbps.
    pub mu: T,
    /// Path latency upper bound 𝕌, ms.
    pub latency_bound: T,
    /// Server and disk access latency T_S, ms.
    pub server_ms: T,
    /// ISP delivery latency T_ISP, ms.
    pub isp_ms: T,
    /// Candidate paths per zone pair.
    pub k_paths: usize,
}

impl<T: Scalar> Default for Params<T> {
    fn default() -> Self {
        Params {
            qos_ms: T::lit(100.0),
            sla_pct: T::lit(98.0),
            access_rate: T::lit(10.0),
            mu: T::lit(10.0),
            latency_bound: T::lit(1000.0),
            server_ms: T::lit(10.0),
            isp_ms: T::lit(10.0),
            k_paths: 3,
        }
    }
}

impl<T: Scalar> Params<T> {
    pub fn check(&self) -> Result<(), ModelError> {
        let positive = [
            ("qos_ms", self.qos_ms),
            ("access_rate", self.access_rate),
            ("mu", self.mu),
            ("latency_bound", self.latency_bound),
            ("server_ms", self.server_ms),
            ("isp_ms", self.isp_ms),
        ];
        for (name, v) in positive {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(ModelError::Params(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.sla_pct > T::zero() && self.sla_pct <= T::lit(100.0)) {
            return Err(ModelError::Params(format!("sla_pct must be in (0, 100], got {}", self.sla_pct)));
        }
        if self.k_paths == 0 {
            return Err(ModelError::Params("k_paths must be at least 1".into()));
        }
        Ok(())
    }

    /// Latency added to every delivery on top of the network path.
    pub fn access_overhead(&self) -> T {
        self.server_ms + self.isp_ms
    }

    /// SLA slack as a fraction, `1 - S/100`.
    pub fn sla_slack(&self) -> T {
        T::one() - self.sla_pct / T::lit(100.0)
    }
}

/// Everything the model needs: network with LUTs, candidate paths, demand
/// and parameters.
#[derive(Clone, Debug)]
pub struct Instance<T> {
    pub network: Network<T>,
    pub paths: PathSet<T>,
    pub demand: DemandMatrix,
    pub params: Params<T>,
}

impl<T: Scalar> Instance<T> {
    pub fn build(
        topology: Topology<T>,
        links: &LinkModel<T>,
        demand: DemandMatrix,
        params: Params<T>,
    ) -> Result<Self, ModelError> {
        params.check()?;
        if demand.zone_count() != topology.zone_count() {
            return Err(ModelError::Demand(format!(
                "demand covers {} zones, topology has {}",
                demand.zone_count(),
                topology.zone_count()
            )));
        }
        if demand.content_count() == 0 {
            return Err(ModelError::Demand("catalog is empty".into()));
        }
        if demand.total() == 0 {
            return Err(ModelError::Demand("no positive request".into()));
        }
        let network = Network::build(topology, links, params.mu, params.latency_bound)?;
        let paths = network.enumerate_paths(params.k_paths);
        Ok(Instance { network, paths, demand, params })
    }

    pub fn topology(&self) -> &Topology<T> {
        &self.network.topology
    }

    pub fn zone_count(&self) -> usize {
        self.network.topology.zone_count()
    }

    pub fn content_count(&self) -> usize {
        self.demand.content_count()
    }

    /// Largest latency a path can reach: every edge at its saturated LUT value.
    pub fn path_latency_bound(&self, path: &Path<T>) -> T {
        path.edges.iter().fold(T::zero(), |acc, &e| acc + self.network.latency[undirected(e)].saturated())
    }

    /// Big constant 𝕂: dominates every feasible request sum and every
    /// perceived latency that can appear in the QoS-flag constraint.
    pub fn big_k(&self) -> T {
        let demand = T::from_units(self.demand.total() + 1);
        let latency = self
            .paths
            .keys()
            .map(|k| self.path_latency_bound(self.paths.get(k).unwrap()))
            .fold(T::zero(), T::max)
            + self.params.access_overhead();
        demand.max(latency)
    }

    /// Cost of placing the whole catalog on every zone with self delivery.
    pub fn all_surrogates_cost(&self) -> T {
        let c = T::from_usize(self.content_count()).unwrap();
        self.topology().zones().iter().fold(T::zero(), |acc, z| acc + z.storage_cost * c)
    }
}
