use std::fmt::{self, Write as _};

use super::{edge_loads, evaluate, Configuration, Instance};
use crate::scalar::{lut_index, Scalar};

/// Whether the SLA constraint is enforced. Baseline heuristics are checked
/// leniently since they never repair SLA violations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlaMode {
    Strict,
    Lenient,
}

/// One violated constraint row.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    /// `demand`, `hosting`, `path_use`, `path_flow`, `qos_flag`, `sla`,
    /// `link_capacity`, `direction_capacity`, or `flow` for malformed records.
    pub constraint: &'static str,
    pub entity: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: lhs {} vs rhs {}", self.constraint, self.entity, self.lhs, self.rhs)
    }
}

pub fn violations_to_csv(violations: &[Violation]) -> String {
    let mut out = String::from("constraint,entity,lhs,rhs\n");
    for v in violations {
        let _ = writeln!(out, "{},\"{}\",{},{}", v.constraint, v.entity, v.lhs, v.rhs);
    }
    out
}

/// Checks a configuration against every model constraint and returns the
/// violated rows; an empty list means the configuration is feasible.
pub fn validate<T: Scalar>(instance: &Instance<T>, config: &Configuration<T>, mode: SlaMode) -> Vec<Violation> {
    let mut out = Vec::new();
    let topo = instance.topology();
    let paths = &instance.paths;
    let id = |m: usize| topo.zones().get(m).map(|z| z.id).unwrap_or(u32::MAX);
    let tol = T::tolerance();

    if config.zone_count() != instance.zone_count() || config.content_count() != instance.content_count() {
        out.push(Violation { constraint: "flow", entity: "dimensions".into(), lhs: 0.0, rhs: 0.0 });
        return out;
    }
    let mut flows_ok = true;
    for f in &config.flows {
        let bad_ref = paths.get(f.key).is_none() || f.content >= instance.content_count();
        if bad_ref || !(f.amount >= T::zero()) || !f.amount.is_finite() {
            flows_ok = false;
            out.push(Violation {
                constraint: "flow",
                entity: format!("m={},n={},x={},k={}", id(f.key.provider), id(f.key.consumer), f.key.index + 1, f.content + 1),
                lhs: f.amount.as_f64(),
                rhs: 0.0,
            });
        }
    }
    if !flows_ok {
        return out;
    }

    let (zones, contents) = (instance.zone_count(), instance.content_count());
    let mut served = vec![T::zero(); zones * contents];
    let mut sent = vec![T::zero(); zones * contents];
    for f in &config.flows {
        served[f.key.consumer * contents + f.content] = served[f.key.consumer * contents + f.content] + f.amount;
        sent[f.key.provider * contents + f.content] = sent[f.key.provider * contents + f.content] + f.amount;
    }
    for n in 0..zones {
        for k in 0..contents {
            let r = T::from_units(instance.demand.get(n, k));
            let y = served[n * contents + k];
            if y < r - tol * r.max(T::one()) {
                out.push(Violation {
                    constraint: "demand",
                    entity: format!("n={},k={}", id(n), k + 1),
                    lhs: y.as_f64(),
                    rhs: r.as_f64(),
                });
            }
            let s = sent[n * contents + k];
            if s > T::zero() && !config.placed(n, k) {
                out.push(Violation {
                    constraint: "hosting",
                    entity: format!("m={},k={}", id(n), k + 1),
                    lhs: s.as_f64(),
                    rhs: 0.0,
                });
            }
        }
    }

    // capacity: bidirectional load must index the latency LUT, directional load the cost LUT
    let net = &instance.network;
    let loads = edge_loads(&config.flows, paths, topo.edges().len(), instance.params.access_rate);
    let mut capacity_ok = true;
    for (u, edge) in topo.undirected_edges().enumerate() {
        let both = loads[2 * u] + loads[2 * u + 1];
        if lut_index(both, net.mu) > net.latency[u].max_index() {
            capacity_ok = false;
            out.push(Violation {
                constraint: "link_capacity",
                entity: format!("e={}-{}", id(edge.from), id(edge.to)),
                lhs: both.as_f64(),
                rhs: edge.capacity.as_f64(),
            });
        }
    }
    for (e, edge) in topo.edges().iter().enumerate() {
        if lut_index(loads[e], net.mu) > net.cost[e].max_index() {
            capacity_ok = false;
            out.push(Violation {
                constraint: "direction_capacity",
                entity: format!("e={}->{}", id(edge.from), id(edge.to)),
                lhs: loads[e].as_f64(),
                rhs: edge.capacity.as_f64(),
            });
        }
    }
    if !capacity_ok {
        return out;
    }

    let eval = match evaluate(instance, config) {
        Ok(e) => e,
        Err(err) => {
            out.push(Violation { constraint: "link_capacity", entity: err.to_string(), lhs: 0.0, rhs: 0.0 });
            return out;
        }
    };
    let big_k = instance.big_k();
    for (g, key) in paths.keys().enumerate() {
        let usage = eval.usage[g];
        let (a, z) = (eval.flags.used[g], eval.flags.violated[g]);
        let entity = || format!("m={},n={},x={}", id(key.provider), id(key.consumer), key.index + 1);
        if usage > big_k * if a { T::one() } else { T::zero() } {
            out.push(Violation { constraint: "path_use", entity: entity(), lhs: usage.as_f64(), rhs: 0.0 });
        }
        if a && usage < T::one() - tol {
            out.push(Violation { constraint: "path_flow", entity: entity(), lhs: usage.as_f64(), rhs: 1.0 });
        }
        let perceived = eval.latencies[g] + instance.params.access_overhead();
        if a && !z && perceived > instance.params.qos_ms {
            out.push(Violation {
                constraint: "qos_flag",
                entity: entity(),
                lhs: perceived.as_f64(),
                rhs: instance.params.qos_ms.as_f64(),
            });
        }
        if z && !a {
            out.push(Violation { constraint: "qos_flag", entity: entity(), lhs: 1.0, rhs: 0.0 });
        }
    }
    if mode == SlaMode::Strict && !eval.report.sla_met {
        out.push(Violation {
            constraint: "sla",
            entity: "sla".into(),
            lhs: eval.report.violating_paths as f64,
            rhs: (instance.params.sla_slack() * T::from_usize(eval.report.used_paths).unwrap()).as_f64(),
        });
    }
    out
}
