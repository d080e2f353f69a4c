use super::{OracleError, OracleLimits};
use crate::model::{evaluate, Configuration, CostReport, Flow, Instance, SlaMode};
use crate::scalar::{approx_eq, whole_units, Scalar};
use crate::topology::{undirected, PathKey};

/// Search counters.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleStats {
    pub placements: u64,
    pub nodes: u64,
    pub leaves: u64,
    pub feasible: u64,
}

#[derive(Clone, Debug)]
pub struct OracleSolution<T> {
    pub config: Configuration<T>,
    pub report: CostReport<T>,
    pub stats: OracleStats,
}

struct Search<'a, T> {
    instance: &'a Instance<T>,
    mode: SlaMode,
    budget: u64,
    /// `(consumer, content)` of every demand unit, grouped.
    units: Vec<(usize, usize)>,
    /// Candidate tuples per content for the current placement.
    tuples: Vec<Vec<PathKey>>,
    choice: Vec<usize>,
    capacity: Vec<u64>,
    directed_units: Vec<u64>,
    edge_cost: Vec<T>,
    bandwidth: T,
    storage: T,
    placement: Vec<bool>,
    best: Option<(T, usize, Vec<bool>, Configuration<T>, CostReport<T>)>,
    stats: OracleStats,
}

impl<T: Scalar> Search<'_, T> {
    fn unit_cost(&self, e: usize, units: u64) -> T {
        let load = T::from_units(units) * self.instance.params.access_rate;
        let lut = &self.instance.network.cost[e];
        lut.values[crate::scalar::lut_index(load, self.instance.network.mu).min(lut.max_index())]
    }

    fn apply(&mut self, key: PathKey, add: bool) {
        let path = self.instance.paths.get(key).unwrap();
        for &e in &path.edges {
            let u = undirected(e);
            if add {
                self.capacity[u] -= 1;
                self.directed_units[e] += 1;
            } else {
                self.capacity[u] += 1;
                self.directed_units[e] -= 1;
            }
            let cost = self.unit_cost(e, self.directed_units[e]);
            self.bandwidth = self.bandwidth - self.edge_cost[e] + cost;
            self.edge_cost[e] = cost;
        }
    }

    fn fits(&self, key: PathKey) -> bool {
        self.instance.paths.get(key).unwrap().edges.iter().all(|&e| self.capacity[undirected(e)] > 0)
    }

    fn bound_exceeded(&self) -> bool {
        match &self.best {
            Some((best, ..)) => {
                let partial = self.storage + self.bandwidth;
                partial > *best && !approx_eq(partial, *best)
            }
            None => false,
        }
    }

    fn dfs(&mut self, depth: usize) -> Result<(), OracleError> {
        self.stats.nodes += 1;
        if self.stats.nodes > self.budget {
            return Err(OracleError::Budget { nodes: self.budget });
        }
        if self.bound_exceeded() {
            return Ok(());
        }
        if depth == self.units.len() {
            return self.leaf();
        }
        let (consumer, content) = self.units[depth];
        // units of the same demand take non-decreasing tuple indices
        let start = if depth > 0 && self.units[depth - 1] == (consumer, content) { self.choice[depth - 1] } else { 0 };
        for i in start..self.tuples[content].len() {
            let key = self.tuples[content][i];
            if key.consumer != consumer || !self.fits(key) {
                continue;
            }
            self.choice[depth] = i;
            self.apply(key, true);
            let r = self.dfs(depth + 1);
            self.apply(key, false);
            r?;
        }
        Ok(())
    }

    fn leaf(&mut self) -> Result<(), OracleError> {
        self.stats.leaves += 1;
        let inst = self.instance;
        let mut cfg = Configuration::empty(inst.zone_count(), inst.content_count());
        for m in 0..inst.zone_count() {
            for k in 0..inst.content_count() {
                cfg.set_placed(m, k, self.placement[m * inst.content_count() + k]);
            }
        }
        for (d, &(_, content)) in self.units.iter().enumerate() {
            let key = self.tuples[content][self.choice[d]];
            cfg.flows.push(Flow { key, content, amount: T::one() });
        }
        let cfg = cfg.canonical();
        let report = evaluate(inst, &cfg)?.report;
        if self.mode == SlaMode::Strict && !report.sla_met {
            return Ok(());
        }
        self.stats.feasible += 1;
        let providers = cfg.provider_count();
        let better = match &self.best {
            None => true,
            Some((obj, prov, place, ..)) => {
                if approx_eq(report.total, *obj) {
                    (providers, &self.placement) < (*prov, place)
                } else {
                    report.total < *obj
                }
            }
        };
        if better {
            self.best = Some((report.total, providers, self.placement.clone(), cfg, report));
        }
        Ok(())
    }
}

/// Exhaustive minimum-objective configuration with integral per-request
/// routing. In [`SlaMode::Lenient`] the SLA row is dropped.
pub fn exact_optimal<T: Scalar>(
    instance: &Instance<T>,
    limits: &OracleLimits,
    mode: SlaMode,
) -> Result<OracleSolution<T>, OracleError> {
    limits.check(instance)?;
    let (zones, contents) = (instance.zone_count(), instance.content_count());
    let slots = zones * contents;
    let alpha: Vec<T> = (0..slots).map(|s| instance.topology().zones()[s / contents].storage_cost).collect();
    let mut units = Vec::new();
    for n in 0..zones {
        for k in 0..contents {
            for _ in 0..instance.demand.get(n, k) {
                units.push((n, k));
            }
        }
    }
    // placements cheapest first so the bound tightens early
    let mut masks: Vec<u64> = (1..(1u64 << slots)).collect();
    let storage_of = |mask: u64| (0..slots).filter(|s| mask >> s & 1 == 1).fold(T::zero(), |acc, s| acc + alpha[s]);
    masks.sort_by(|&a, &b| storage_of(a).partial_cmp(&storage_of(b)).unwrap().then(a.count_ones().cmp(&b.count_ones())).then(a.cmp(&b)));

    let topo = instance.topology();
    let rate = instance.params.access_rate;
    let mut search = Search {
        instance,
        mode,
        budget: limits.work_budget,
        choice: vec![0; units.len()],
        units,
        tuples: Vec::new(),
        capacity: topo.undirected_edges().map(|e| whole_units(e.capacity, rate)).collect(),
        directed_units: vec![0; topo.edges().len()],
        edge_cost: vec![T::zero(); topo.edges().len()],
        bandwidth: T::zero(),
        storage: T::zero(),
        placement: Vec::new(),
        best: None,
        stats: OracleStats::default(),
    };
    for mask in masks {
        let placement: Vec<bool> = (0..slots).map(|s| mask >> s & 1 == 1).collect();
        let hosts = |k: usize| (0..zones).filter(|&m| placement[m * contents + k]).collect::<Vec<_>>();
        if (0..contents).any(|k| instance.demand.content_total(k) > 0 && hosts(k).is_empty()) {
            continue;
        }
        search.stats.placements += 1;
        search.storage = storage_of(mask);
        if search.bound_exceeded() {
            continue;
        }
        search.tuples = (0..contents)
            .map(|k| instance.paths.keys().filter(|key| placement[key.provider * contents + k]).collect())
            .collect();
        search.placement = placement;
        search.dfs(0)?;
    }
    let stats = search.stats.clone();
    match search.best {
        Some((_, _, _, config, report)) => Ok(OracleSolution { config, report, stats }),
        None => Err(OracleError::Infeasible),
    }
}
