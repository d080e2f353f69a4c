//! Objective and derived-variable evaluation for a fixed configuration.

use super::{Configuration, Flow, Instance, ModelError, Params};
use crate::scalar::{lut_index, Scalar};
use crate::topology::{undirected, BandwidthCostLut, LatencyLut, Path, PathKey, PathSet};

/// Load per directed edge, Mbps: `l_e = Σ g · y · A`.
pub fn edge_loads<T: Scalar>(flows: &[Flow<T>], paths: &PathSet<T>, edge_count: usize, access_rate: T) -> Vec<T> {
    let mut loads = vec![T::zero(); edge_count];
    for f in flows {
        if let Some(path) = paths.get(f.key) {
            let mbps = f.amount * access_rate;
            for &e in &path.edges {
                loads[e] = loads[e] + mbps;
            }
        }
    }
    loads
}

/// Delay of an undirected edge, driven by the load of both directions.
pub fn edge_delay<T: Scalar>(lut: &LatencyLut<T>, load_ij: T, load_ji: T, mu: T) -> Result<T, ModelError> {
    let total = load_ij + load_ji;
    let p = lut_index(total, mu);
    lut.values.get(p).copied().ok_or(ModelError::LutRange {
        load: total.as_f64(),
        capacity: (T::from_usize(lut.max_index()).unwrap() * mu).as_f64(),
    })
}

/// Sum of edge delays along the path; zero for self delivery.
pub fn path_latency<T: Scalar>(path: &Path<T>, delays: &[T]) -> T {
    path.edges.iter().fold(T::zero(), |acc, &e| acc + delays[undirected(e)])
}

/// Cost of the directional load on one edge.
pub fn bandwidth_cost<T: Scalar>(lut: &BandwidthCostLut<T>, load: T, mu: T) -> Result<T, ModelError> {
    let p = lut_index(load, mu);
    lut.values.get(p).copied().ok_or(ModelError::LutRange {
        load: load.as_f64(),
        capacity: (T::from_usize(lut.max_index()).unwrap() * mu).as_f64(),
    })
}

/// Usage (`a`) and QoS-violation (`z`) flags per global path id.
#[derive(Clone, Debug, PartialEq)]
pub struct Flags {
    pub used: Vec<bool>,
    pub violated: Vec<bool>,
}

impl Flags {
    pub fn used_count(&self) -> usize {
        self.used.iter().filter(|&&a| a).count()
    }

    pub fn violated_count(&self) -> usize {
        self.violated.iter().filter(|&&z| z).count()
    }
}

/// `a = 1` iff the path carries flow; `z = 1` iff `a = 1` and the perceived
/// latency `γ + T_S + T_ISP` exceeds `Q`.
pub fn classify_violations<T: Scalar>(latencies: &[T], usage: &[T], params: &Params<T>) -> Flags {
    let used: Vec<bool> = usage.iter().map(|&u| u > T::zero()).collect();
    let violated = latencies
        .iter()
        .zip(&used)
        .map(|(&g, &a)| a && g + params.access_overhead() > params.qos_ms)
        .collect();
    Flags { used, violated }
}

/// `Σz ≤ (1 − S/100) · Σa`.
pub fn sla_satisfied<T: Scalar>(violated: usize, used: usize, sla_pct: T) -> bool {
    let hundred = T::lit(100.0);
    let lhs = T::from_usize(violated).unwrap() * hundred;
    let rhs = (hundred - sla_pct) * T::from_usize(used).unwrap();
    lhs <= rhs + T::tolerance() * hundred.max(rhs)
}

/// Statistics of one used path.
#[derive(Clone, Debug, PartialEq)]
pub struct PathStat<T> {
    pub key: PathKey,
    /// Network latency γ, ms.
    pub latency: T,
    /// γ + T_S + T_ISP, ms.
    pub perceived: T,
    /// Requests carried, all contents.
    pub amount: T,
    pub violated: bool,
}

/// The three objective terms and SLA figures of a configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct CostReport<T> {
    pub storage: T,
    pub bandwidth: T,
    /// Σ z·γ/𝕌.
    pub violation_degree: T,
    pub total: T,
    pub used_paths: usize,
    pub violating_paths: usize,
    /// Σz / Σa.
    pub sla_violation_rate: T,
    /// Share of requests delivered on violating paths.
    pub request_violation_rate: T,
    pub sla_met: bool,
    pub paths: Vec<PathStat<T>>,
}

impl<T: Scalar> CostReport<T> {
    /// Storage plus bandwidth, without the QoS term.
    pub fn resource_cost(&self) -> T {
        self.storage + self.bandwidth
    }
}

/// All derived quantities of a configuration.
#[derive(Clone, Debug)]
pub struct Evaluation<T> {
    pub loads: Vec<T>,
    /// Per undirected edge.
    pub delays: Vec<T>,
    /// Per directed edge.
    pub edge_costs: Vec<T>,
    /// γ per global path id.
    pub latencies: Vec<T>,
    /// Σ_k y per global path id.
    pub usage: Vec<T>,
    pub flags: Flags,
    pub report: CostReport<T>,
}

fn check_flows<T: Scalar>(instance: &Instance<T>, config: &Configuration<T>) -> Result<(), ModelError> {
    if config.zone_count() != instance.zone_count() || config.content_count() != instance.content_count() {
        return Err(ModelError::BadFlow("configuration dimensions do not match the instance".into()));
    }
    for f in &config.flows {
        if instance.paths.get(f.key).is_none() || f.content >= instance.content_count() {
            return Err(ModelError::BadFlow(format!("{:?} content {}", f.key, f.content)));
        }
        if !(f.amount >= T::zero()) || !f.amount.is_finite() {
            return Err(ModelError::BadFlow(format!("amount {} on {:?}", f.amount, f.key)));
        }
    }
    Ok(())
}

pub fn evaluate<T: Scalar>(instance: &Instance<T>, config: &Configuration<T>) -> Result<Evaluation<T>, ModelError> {
    check_flows(instance, config)?;
    let net = &instance.network;
    let topo = &net.topology;
    let params = &instance.params;
    let loads = edge_loads(&config.flows, &instance.paths, topo.edges().len(), params.access_rate);

    let capacity_error = |e: usize, load: T| {
        let edge = &topo.edges()[e];
        ModelError::Capacity {
            from: topo.zones()[edge.from].id,
            to: topo.zones()[edge.to].id,
            load: load.as_f64(),
            capacity: edge.capacity.as_f64(),
        }
    };
    let delays = (0..topo.undirected_count())
        .map(|u| {
            edge_delay(&net.latency[u], loads[2 * u], loads[2 * u + 1], net.mu)
                .map_err(|_| capacity_error(2 * u, loads[2 * u] + loads[2 * u + 1]))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let edge_costs = (0..topo.edges().len())
        .map(|e| bandwidth_cost(&net.cost[e], loads[e], net.mu).map_err(|_| capacity_error(e, loads[e])))
        .collect::<Result<Vec<_>, _>>()?;

    let paths = &instance.paths;
    let latencies: Vec<T> = paths.keys().map(|k| path_latency(paths.get(k).unwrap(), &delays)).collect();
    let mut usage = vec![T::zero(); paths.len()];
    for f in &config.flows {
        let g = paths.global_id(f.key);
        usage[g] = usage[g] + f.amount;
    }
    let flags = classify_violations(&latencies, &usage, params);

    let storage = (0..config.zone_count())
        .flat_map(|m| (0..config.content_count()).map(move |k| (m, k)))
        .filter(|&(m, k)| config.placed(m, k))
        .fold(T::zero(), |acc, (m, _)| acc + topo.zones()[m].storage_cost);
    let bandwidth = edge_costs.iter().fold(T::zero(), |acc, &c| acc + c);

    let mut degree = T::zero();
    let mut stats = Vec::new();
    let mut carried = T::zero();
    let mut carried_bad = T::zero();
    for (g, key) in paths.keys().enumerate() {
        if !flags.used[g] {
            continue;
        }
        let violated = flags.violated[g];
        if violated {
            degree = degree + latencies[g] / params.latency_bound;
            carried_bad = carried_bad + usage[g];
        }
        carried = carried + usage[g];
        stats.push(PathStat {
            key,
            latency: latencies[g],
            perceived: latencies[g] + params.access_overhead(),
            amount: usage[g],
            violated,
        });
    }
    let used_paths = flags.used_count();
    let violating_paths = flags.violated_count();
    let ratio = |num: T, den: T| if den > T::zero() { num / den } else { T::zero() };
    let report = CostReport {
        storage,
        bandwidth,
        violation_degree: degree,
        total: storage + bandwidth + degree,
        used_paths,
        violating_paths,
        sla_violation_rate: ratio(T::from_usize(violating_paths).unwrap(), T::from_usize(used_paths).unwrap()),
        request_violation_rate: ratio(carried_bad, carried),
        sla_met: sla_satisfied(violating_paths, used_paths, params.sla_pct),
        paths: stats,
    };
    Ok(Evaluation { loads, delays, edge_costs, latencies, usage, flags, report })
}

pub fn total_objective<T: Scalar>(instance: &Instance<T>, config: &Configuration<T>) -> Result<CostReport<T>, ModelError> {
    evaluate(instance, config).map(|e| e.report)
}
