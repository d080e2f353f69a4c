//! LP-format export of the full linearized model.
//!
//! Variable families (zone ids external, path and content indices 1-based):
//! `x_m_k`, `y_m_n_x_k`, `a_m_n_x`, `z_m_n_x`, `w1_m_n_x` (= z·γ),
//! `w2_m_n_x` (= a·γ), `l_i_j` per directed edge, `d_i_j` per undirected edge,
//! `f_i_j_p` latency LUT selectors per undirected edge and `h_i_j_p` cost LUT
//! selectors per directed edge. Path latency γ and edge cost β are
//! substituted as linear expressions.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{evaluate, Configuration, Instance, ModelError};
use crate::scalar::{lut_index, Scalar};
use crate::topology::PathKey;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpSense {
    Le,
    Ge,
    Eq,
}

impl LpSense {
    fn symbol(self) -> &'static str {
        match self {
            LpSense::Le => "<=",
            LpSense::Ge => ">=",
            LpSense::Eq => "=",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpRow {
    pub name: String,
    pub terms: Vec<(String, f64)>,
    pub sense: LpSense,
    pub rhs: f64,
}

impl LpRow {
    pub fn lhs(&self, values: &HashMap<String, f64>) -> f64 {
        self.terms.iter().map(|(v, c)| c * values.get(v).copied().unwrap_or(0.0)).sum()
    }

    /// Whether the row holds at `values`, up to an absolute/relative tolerance.
    pub fn holds(&self, values: &HashMap<String, f64>, tol: f64) -> bool {
        let lhs = self.lhs(values);
        let slack = tol * lhs.abs().max(self.rhs.abs()).max(1.0);
        match self.sense {
            LpSense::Le => lhs <= self.rhs + slack,
            LpSense::Ge => lhs >= self.rhs - slack,
            LpSense::Eq => (lhs - self.rhs).abs() <= slack,
        }
    }
}

/// In-memory linear model, written out with [`LpModel::to_lp_string`].
#[derive(Clone, Debug, Default)]
pub struct LpModel {
    pub objective: Vec<(String, f64)>,
    pub rows: Vec<LpRow>,
    /// Every variable, in declaration order.
    pub variables: Vec<String>,
    pub binaries: Vec<String>,
    pub upper_bounds: Vec<(String, f64)>,
}

impl LpModel {
    pub fn variable_count(&self) -> usize {
        self.variables.len()
    }

    pub fn objective_value(&self, values: &HashMap<String, f64>) -> f64 {
        self.objective.iter().map(|(v, c)| c * values.get(v).copied().unwrap_or(0.0)).sum()
    }

    pub fn to_lp_string(&self) -> String {
        let mut out = String::new();
        out.push_str("\\ QoS-aware content placement\nMinimize\n obj:");
        write_terms(&mut out, &self.objective);
        out.push_str("\nSubject To\n");
        for row in &self.rows {
            let _ = write!(out, " {}:", row.name);
            write_terms(&mut out, &row.terms);
            let _ = writeln!(out, " {} {}", row.sense.symbol(), num(row.rhs));
        }
        out.push_str("Bounds\n");
        for (v, ub) in &self.upper_bounds {
            let _ = writeln!(out, " 0 <= {v} <= {}", num(*ub));
        }
        out.push_str("Binary\n");
        for chunk in self.binaries.chunks(8) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
        out.push_str("End\n");
        out
    }
}

fn num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v}")
    }
}

fn write_terms(out: &mut String, terms: &[(String, f64)]) {
    if terms.is_empty() {
        out.push_str(" 0 x_dummy_zero");
        return;
    }
    for (i, (var, coef)) in terms.iter().enumerate() {
        if i > 0 && i % 6 == 0 {
            out.push_str("\n   ");
        }
        let sign = if *coef < 0.0 { '-' } else { '+' };
        let mag = coef.abs();
        if mag == 1.0 {
            let _ = write!(out, " {sign} {var}");
        } else {
            let _ = write!(out, " {sign} {} {var}", num(mag));
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IlpOptions {
    pub max_variables: usize,
}

impl Default for IlpOptions {
    fn default() -> Self {
        IlpOptions { max_variables: 200_000 }
    }
}

struct Names<'a, T> {
    instance: &'a Instance<T>,
}

impl<T: Scalar> Names<'_, T> {
    fn id(&self, m: usize) -> u32 {
        self.instance.topology().zones()[m].id
    }
    fn x(&self, m: usize, k: usize) -> String {
        format!("x_{}_{}", self.id(m), k + 1)
    }
    fn tuple(&self, key: PathKey) -> String {
        format!("{}_{}_{}", self.id(key.provider), self.id(key.consumer), key.index + 1)
    }
    fn y(&self, key: PathKey, k: usize) -> String {
        format!("y_{}_{}", self.tuple(key), k + 1)
    }
    fn edge(&self, e: usize) -> String {
        let edge = &self.instance.topology().edges()[e];
        format!("{}_{}", self.id(edge.from), self.id(edge.to))
    }
    fn l(&self, e: usize) -> String {
        format!("l_{}", self.edge(e))
    }
    fn d(&self, u: usize) -> String {
        format!("d_{}", self.edge(2 * u))
    }
    fn f(&self, u: usize, p: usize) -> String {
        format!("f_{}_{p}", self.edge(2 * u))
    }
    fn h(&self, e: usize, p: usize) -> String {
        format!("h_{}_{p}", self.edge(e))
    }
}

/// Closed-form variable count of the exported model.
pub fn expected_variable_count<T: Scalar>(instance: &Instance<T>) -> usize {
    let v = instance.zone_count();
    let c = instance.content_count();
    let paths = instance.paths.len();
    let topo = instance.topology();
    let e = topo.edges().len();
    let e_prime = topo.undirected_count();
    let f: usize = instance.network.latency.iter().map(|l| l.values.len()).sum();
    let h: usize = instance.network.cost.iter().map(|l| l.values.len()).sum();
    v * c + paths * (c + 2) + e + f + h + e_prime + 2 * paths
}

/// Builds the linearized model for an instance.
pub fn export_ilp<T: Scalar>(instance: &Instance<T>, options: &IlpOptions) -> Result<LpModel, ModelError> {
    let vars = expected_variable_count(instance);
    if vars > options.max_variables {
        return Err(ModelError::TooLarge { vars, cap: options.max_variables });
    }
    let names = Names { instance };
    let topo = instance.topology();
    let net = &instance.network;
    let params = &instance.params;
    let paths = &instance.paths;
    let (zones, contents) = (instance.zone_count(), instance.content_count());
    let big_k = instance.big_k().as_f64();
    let mu = net.mu.as_f64();
    let eps = 1e-6 * mu;
    let mut lp = LpModel::default();

    // variables
    for m in 0..zones {
        for k in 0..contents {
            lp.variables.push(names.x(m, k));
            lp.binaries.push(names.x(m, k));
        }
    }
    for key in paths.keys() {
        for k in 0..contents {
            lp.variables.push(names.y(key, k));
        }
        let t = names.tuple(key);
        for fam in ["a", "z"] {
            lp.variables.push(format!("{fam}_{t}"));
            lp.binaries.push(format!("{fam}_{t}"));
        }
        lp.variables.push(format!("w1_{t}"));
        lp.variables.push(format!("w2_{t}"));
    }
    for e in 0..topo.edges().len() {
        lp.variables.push(names.l(e));
        lp.upper_bounds.push((names.l(e), topo.edges()[e].capacity.as_f64()));
        for p in 0..net.cost[e].values.len() {
            lp.variables.push(names.h(e, p));
            lp.binaries.push(names.h(e, p));
        }
    }
    for u in 0..topo.undirected_count() {
        lp.variables.push(names.d(u));
        for p in 0..net.latency[u].values.len() {
            lp.variables.push(names.f(u, p));
            lp.binaries.push(names.f(u, p));
        }
    }

    // objective: storage + bandwidth + degree
    for m in 0..zones {
        for k in 0..contents {
            lp.objective.push((names.x(m, k), topo.zones()[m].storage_cost.as_f64()));
        }
    }
    for e in 0..topo.edges().len() {
        for (p, w) in net.cost[e].values.iter().enumerate() {
            if *w != T::zero() {
                lp.objective.push((names.h(e, p), w.as_f64()));
            }
        }
    }
    let inv_bound = 1.0 / params.latency_bound.as_f64();
    for key in paths.keys() {
        lp.objective.push((format!("w1_{}", names.tuple(key)), inv_bound));
    }

    // (1) demand
    for n in 0..zones {
        for k in 0..contents {
            let terms = (0..zones)
                .flat_map(|m| (0..paths.paths(m, n).len()).map(move |x| PathKey { provider: m, consumer: n, index: x }))
                .map(|key| (names.y(key, k), 1.0))
                .collect();
            lp.rows.push(LpRow {
                name: format!("dem_{}_{}", names.id(n), k + 1),
                terms,
                sense: LpSense::Ge,
                rhs: instance.demand.get(n, k) as f64,
            });
        }
    }
    // (2) hosting
    for m in 0..zones {
        for k in 0..contents {
            let mut terms: Vec<(String, f64)> = (0..zones)
                .flat_map(|n| (0..paths.paths(m, n).len()).map(move |x| PathKey { provider: m, consumer: n, index: x }))
                .map(|key| (names.y(key, k), 1.0))
                .collect();
            terms.push((names.x(m, k), -big_k));
            lp.rows.push(LpRow { name: format!("host_{}_{}", names.id(m), k + 1), terms, sense: LpSense::Le, rhs: 0.0 });
        }
    }
    let overhead = params.access_overhead().as_f64();
    for key in paths.keys() {
        let t = names.tuple(key);
        let ys: Vec<(String, f64)> = (0..contents).map(|k| (names.y(key, k), 1.0)).collect();
        // (3), (4) usage
        let mut upper = ys.clone();
        upper.push((format!("a_{t}"), -big_k));
        lp.rows.push(LpRow { name: format!("useu_{t}"), terms: upper, sense: LpSense::Le, rhs: 0.0 });
        let mut lower = ys;
        lower.push((format!("a_{t}"), -1.0));
        lp.rows.push(LpRow { name: format!("usel_{t}"), terms: lower, sense: LpSense::Ge, rhs: 0.0 });
        // (5) QoS flag, with w2 = a·γ
        lp.rows.push(LpRow {
            name: format!("qos_{t}"),
            terms: vec![(format!("w2_{t}"), 1.0), (format!("a_{t}"), overhead), (format!("z_{t}"), -big_k)],
            sense: LpSense::Le,
            rhs: params.qos_ms.as_f64(),
        });
        // w = b·γ linearizations, γ = Σ d over path edges (11)
        let path = paths.get(key).unwrap();
        let bound = instance.path_latency_bound(path).as_f64();
        let gamma: Vec<(String, f64)> =
            path.edges.iter().map(|&e| (names.d(crate::topology::undirected(e)), -1.0)).collect();
        for (w, b) in [("w1", "z"), ("w2", "a")] {
            let wv = format!("{w}_{t}");
            let bv = format!("{b}_{t}");
            lp.rows.push(LpRow {
                name: format!("{w}ub_{t}"),
                terms: vec![(wv.clone(), 1.0), (bv.clone(), -bound)],
                sense: LpSense::Le,
                rhs: 0.0,
            });
            let mut le_gamma = vec![(wv.clone(), 1.0)];
            le_gamma.extend(gamma.iter().cloned());
            lp.rows.push(LpRow { name: format!("{w}lg_{t}"), terms: le_gamma, sense: LpSense::Le, rhs: 0.0 });
            let mut ge = vec![(wv, 1.0)];
            ge.extend(gamma.iter().cloned());
            ge.push((bv, -bound));
            lp.rows.push(LpRow { name: format!("{w}lb_{t}"), terms: ge, sense: LpSense::Ge, rhs: -bound });
        }
    }
    // (6) SLA
    let slack = params.sla_slack().as_f64();
    let mut sla = Vec::new();
    for key in paths.keys() {
        let t = names.tuple(key);
        sla.push((format!("z_{t}"), 1.0));
        sla.push((format!("a_{t}"), -slack));
    }
    lp.rows.push(LpRow { name: "sla".into(), terms: sla, sense: LpSense::Le, rhs: 0.0 });
    // (7) loads
    let rate = params.access_rate.as_f64();
    for e in 0..topo.edges().len() {
        let mut terms = vec![(names.l(e), 1.0)];
        for key in paths.keys() {
            if paths.get(key).unwrap().contains_edge(e) {
                for k in 0..contents {
                    terms.push((names.y(key, k), -rate));
                }
            }
        }
        lp.rows.push(LpRow { name: format!("load_{}", names.edge(e)), terms, sense: LpSense::Eq, rhs: 0.0 });
    }
    // (8)–(10) latency LUT selection on the bidirectional load
    for u in 0..topo.undirected_count() {
        let lut = &net.latency[u];
        let mut idx = vec![(names.l(2 * u), 1.0), (names.l(2 * u + 1), 1.0)];
        idx.extend((1..lut.values.len()).map(|p| (names.f(u, p), -mu * p as f64)));
        lp.rows.push(LpRow { name: format!("latidx_{}", names.edge(2 * u)), terms: idx.clone(), sense: LpSense::Le, rhs: 0.0 });
        lp.rows.push(LpRow { name: format!("latidxlo_{}", names.edge(2 * u)), terms: idx, sense: LpSense::Ge, rhs: eps - mu });
        lp.rows.push(LpRow {
            name: format!("latone_{}", names.edge(2 * u)),
            terms: (0..lut.values.len()).map(|p| (names.f(u, p), 1.0)).collect(),
            sense: LpSense::Eq,
            rhs: 1.0,
        });
        let mut delay = vec![(names.d(u), 1.0)];
        delay.extend(lut.values.iter().enumerate().map(|(p, v)| (names.f(u, p), -v.as_f64())));
        lp.rows.push(LpRow { name: format!("delay_{}", names.edge(2 * u)), terms: delay, sense: LpSense::Eq, rhs: 0.0 });
    }
    // (12)–(13) cost LUT selection on the directional load; (14) lives in the objective
    for e in 0..topo.edges().len() {
        let lut = &net.cost[e];
        let mut idx = vec![(names.l(e), 1.0)];
        idx.extend((1..lut.values.len()).map(|p| (names.h(e, p), -mu * p as f64)));
        lp.rows.push(LpRow { name: format!("costidx_{}", names.edge(e)), terms: idx.clone(), sense: LpSense::Le, rhs: 0.0 });
        lp.rows.push(LpRow { name: format!("costidxlo_{}", names.edge(e)), terms: idx, sense: LpSense::Ge, rhs: eps - mu });
        lp.rows.push(LpRow {
            name: format!("costone_{}", names.edge(e)),
            terms: (0..lut.values.len()).map(|p| (names.h(e, p), 1.0)).collect(),
            sense: LpSense::Eq,
            rhs: 1.0,
        });
    }
    Ok(lp)
}

/// Values of every exported variable for a configuration.
pub fn lp_assignment<T: Scalar>(instance: &Instance<T>, config: &Configuration<T>) -> Result<HashMap<String, f64>, ModelError> {
    let eval = evaluate(instance, config)?;
    let names = Names { instance };
    let topo = instance.topology();
    let net = &instance.network;
    let paths = &instance.paths;
    let mut values = HashMap::new();
    let bit = |b: bool| if b { 1.0 } else { 0.0 };
    for m in 0..instance.zone_count() {
        for k in 0..instance.content_count() {
            values.insert(names.x(m, k), bit(config.placed(m, k)));
        }
    }
    for key in paths.keys() {
        for k in 0..instance.content_count() {
            values.insert(names.y(key, k), 0.0);
        }
    }
    for f in &config.flows {
        *values.get_mut(&names.y(f.key, f.content)).unwrap() += f.amount.as_f64();
    }
    for (g, key) in paths.keys().enumerate() {
        let t = names.tuple(key);
        let (a, z) = (eval.flags.used[g], eval.flags.violated[g]);
        let gamma = eval.latencies[g].as_f64();
        values.insert(format!("a_{t}"), bit(a));
        values.insert(format!("z_{t}"), bit(z));
        values.insert(format!("w1_{t}"), bit(z) * gamma);
        values.insert(format!("w2_{t}"), bit(a) * gamma);
    }
    for e in 0..topo.edges().len() {
        values.insert(names.l(e), eval.loads[e].as_f64());
        let chosen = lut_index(eval.loads[e], net.mu);
        for p in 0..net.cost[e].values.len() {
            values.insert(names.h(e, p), bit(p == chosen));
        }
    }
    for u in 0..topo.undirected_count() {
        values.insert(names.d(u), eval.delays[u].as_f64());
        let chosen = lut_index(eval.loads[2 * u] + eval.loads[2 * u + 1], net.mu);
        for p in 0..net.latency[u].values.len() {
            values.insert(names.f(u, p), bit(p == chosen));
        }
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DemandMatrix, Flow, Params};
    use crate::topology::{LinkKind, LinkModel, Topology, Zone};

    fn two_zone() -> Instance<f64> {
        let zones = (1..=2).map(|id| Zone { id, region: 1, storage_cost: 0.5 }).collect();
        let topo = Topology::new(vec![1], zones, vec![(1, 2, 100.0, LinkKind::InterZone)]).unwrap();
        let params = Params { k_paths: 1, ..Params::default() };
        Instance::build(topo, &LinkModel::default(), DemandMatrix::single(&[1, 2]), params).unwrap()
    }

    #[test]
    fn variable_count_matches_enumeration() {
        let inst = two_zone();
        let lp = export_ilp(&inst, &IlpOptions::default()).unwrap();
        assert_eq!(lp.variable_count(), expected_variable_count(&inst));
        // 2 x + 4·(1 y + a + z) + 2 l + 11 f + 22 h + 1 d + 4·(w1 + w2)
        assert_eq!(lp.variable_count(), 2 + 12 + 2 + 11 + 22 + 1 + 8);
        let mut sorted = lp.variables.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), lp.variable_count());
    }

    #[test]
    fn feasible_assignment_satisfies_rows() {
        let inst = two_zone();
        let mut cfg = Configuration::empty(2, 1);
        cfg.set_placed(0, 0, true);
        cfg.flows.push(Flow { key: PathKey { provider: 0, consumer: 0, index: 0 }, content: 0, amount: 1.0 });
        cfg.flows.push(Flow { key: PathKey { provider: 0, consumer: 1, index: 0 }, content: 0, amount: 2.0 });
        let lp = export_ilp(&inst, &IlpOptions::default()).unwrap();
        let values = lp_assignment(&inst, &cfg).unwrap();
        for row in &lp.rows {
            assert!(row.holds(&values, 1e-9), "{} lhs {}", row.name, row.lhs(&values));
        }
        let report = crate::model::total_objective(&inst, &cfg).unwrap();
        assert!((lp.objective_value(&values) - report.total).abs() < 1e-12);
    }

    #[test]
    fn variable_cap_enforced() {
        let inst = two_zone();
        assert!(matches!(export_ilp(&inst, &IlpOptions { max_variables: 10 }), Err(ModelError::TooLarge { .. })));
    }

    #[test]
    fn lp_text_has_sections() {
        let text = export_ilp(&two_zone(), &IlpOptions::default()).unwrap().to_lp_string();
        for section in ["Minimize", "Subject To", "Bounds", "Binary", "End"] {
            assert!(text.contains(section));
        }
    }
}
