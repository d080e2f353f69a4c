//! QoS-aware content placement across cloud availability zones.
//!
//! A storage cloud is a graph of zones grouped into regions. Content is
//! pushed onto a subset of zones (surrogates) and requests are routed over
//! candidate paths whose latency and price depend on link load. The crate
//! provides the exact cost model, three surrogate-ranking heuristics, a
//! brute-force oracle for tiny instances and an experiment harness.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the common choices.

pub mod harness;
pub mod heuristics;
pub mod model;
pub mod oracle;
pub mod scalar;
pub mod topology;

pub use heuristics::{place, PlacementOutcome, PriorityKind};
pub use model::{evaluate, validate, Configuration, DemandMatrix, Instance, Params, SlaMode};
pub use scalar::Scalar;
pub use topology::{LinkModel, Network, PathSet, Topology};

pub type TopologyF64 = topology::Topology<f64>;
pub type TopologyF32 = topology::Topology<f32>;
pub type InstanceF64 = model::Instance<f64>;
pub type InstanceF32 = model::Instance<f32>;
pub type ConfigurationF64 = model::Configuration<f64>;
pub type ConfigurationF32 = model::Configuration<f32>;
pub type ParamsF64 = model::Params<f64>;
pub type ParamsF32 = model::Params<f32>;
pub type LinkModelF64 = topology::LinkModel<f64>;
pub type LinkModelF32 = topology::LinkModel<f32>;
pub type SettingsF64 = harness::Settings<f64>;
