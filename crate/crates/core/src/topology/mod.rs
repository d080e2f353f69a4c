//! Region/zone network: graph, candidate paths, betweenness and link LUTs.

mod centrality;
mod graph;
mod lut;
mod paths;

pub use centrality::betweenness;
pub use graph::{
    generate_amazon_na, generate_random, generate_regional, reverse, undirected, Edge, LinkKind, RandomTopology,
    StorageCosts, Topology, Zone, AMAZON_NA_REGIONS,
};
pub use lut::{
    build_bandwidth_cost_lut, build_latency_lut, BandwidthCostLut, DelayParams, LatencyLut, LinkModel, Tariff,
};
pub use paths::{enumerate_paths, is_sorted, k_shortest_paths, Path, PathKey, PathSet};

use thiserror::Error;

use crate::scalar::Scalar;

/// Topology file shipped with the crate: the North America storage cloud
/// (3 regions of 5, 3 and 3 zones, 100 Mbps inter-region, 1 Gbps inter-zone).
pub const AMAZON_NA_FIXTURE: &str = include_str!("../../fixtures/amazon_na.topo");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("topology has no zones")]
    Empty,
    #[error("duplicate zone id {0}")]
    DuplicateZone(u32),
    #[error("duplicate region id {0}")]
    DuplicateRegion(u32),
    #[error("zone {zone} references unknown region {region}")]
    UnknownRegion { zone: u32, region: u32 },
    #[error("edge references unknown zone {0}")]
    UnknownZone(u32),
    #[error("self loop on zone {0}")]
    SelfLoop(u32),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(u32, u32),
    #[error("edge {from}-{to} has non-positive capacity")]
    NonPositiveCapacity { from: u32, to: u32 },
    #[error("edge {from}-{to} declared {kind} but its endpoints disagree")]
    KindMismatch { from: u32, to: u32, kind: LinkKind },
    #[error("zone {zone} storage cost {value} outside (0, 1]")]
    StorageCost { zone: u32, value: f64 },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("expected {expected} storage costs, got {got}")]
    CostCount { expected: usize, got: usize },
    #[error("granularity {mu} does not divide capacity {capacity}")]
    Granularity { capacity: f64, mu: f64 },
    #[error("delay parameters need base > 0, queue >= 0 and bound > base")]
    DelayParams,
    #[error("invalid tariff: {0}")]
    Tariff(String),
}

/// Topology plus per-edge lookup tables at granularity `mu`.
#[derive(Clone, Debug)]
pub struct Network<T> {
    pub topology: Topology<T>,
    /// Latency LUT per undirected edge.
    pub latency: Vec<LatencyLut<T>>,
    /// Cost LUT per directed edge.
    pub cost: Vec<BandwidthCostLut<T>>,
    pub mu: T,
    pub latency_bound: T,
}

impl<T: Scalar> Network<T> {
    pub fn build(topology: Topology<T>, links: &LinkModel<T>, mu: T, latency_bound: T) -> Result<Self, TopologyError> {
        let latency = topology
            .undirected_edges()
            .map(|e| build_latency_lut(e, links.delay(e.kind), mu, latency_bound))
            .collect::<Result<Vec<_>, _>>()?;
        let cost = topology
            .edges()
            .iter()
            .map(|e| build_bandwidth_cost_lut(e, links.tariff(e.kind), mu))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Network { topology, latency, cost, mu, latency_bound })
    }

    /// Zero-load latency of every directed edge.
    pub fn zero_load_weights(&self) -> Vec<T> {
        (0..self.topology.edges().len()).map(|e| self.latency[undirected(e)].base()).collect()
    }

    pub fn betweenness(&self) -> Vec<T> {
        betweenness(&self.topology, &self.zero_load_weights())
    }

    pub fn enumerate_paths(&self, k: usize) -> PathSet<T> {
        enumerate_paths(&self.topology, &self.zero_load_weights(), k)
    }
}

/// Parses the bundled North America fixture.
pub fn amazon_na_fixture<T: Scalar>() -> Topology<T> {
    Topology::parse(AMAZON_NA_FIXTURE).expect("bundled fixture is valid")
}
