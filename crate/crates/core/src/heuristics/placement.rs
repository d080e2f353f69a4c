use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use super::{surrogate_ranking, HeuristicError, PriorityKind};
use crate::model::{evaluate, Configuration, CostReport, Evaluation, Flow, Instance};
use crate::scalar::{whole_units, Scalar};
use crate::topology::{undirected, PathKey};

/// Result of one placement run.
#[derive(Clone, Debug)]
pub struct PlacementOutcome<T> {
    pub config: Configuration<T>,
    pub report: CostReport<T>,
    /// Report right before the violation-degree pass; W-SNA only.
    pub before_pass: Option<CostReport<T>>,
    /// Every zone hosts the content and the SLA still fails.
    pub best_effort: bool,
    /// Provider zones per content, in selection order.
    pub providers: Vec<Vec<usize>>,
    pub repair_rounds: usize,
}

type FlowMap = BTreeMap<(PathKey, usize), u64>;

/// Mutable search state. Capacities and demand are counted in whole
/// requests, each request occupying `A` Mbps on every edge of its path.
#[derive(Clone, Debug)]
pub struct PlacementState<'a, T> {
    instance: &'a Instance<T>,
    /// Residual requests per undirected edge, both directions combined.
    capacity: Vec<u64>,
    residual: Vec<u64>,
    flows: FlowMap,
    placed: Vec<bool>,
    providers: Vec<Vec<usize>>,
    surrogates: Vec<VecDeque<usize>>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Preference {
    Nearest,
    IntraRegion,
}

impl<'a, T: Scalar> PlacementState<'a, T> {
    pub fn new(instance: &'a Instance<T>, order: &[usize]) -> Self {
        let topo = instance.topology();
        let rate = instance.params.access_rate;
        let capacity = topo.undirected_edges().map(|e| whole_units(e.capacity, rate)).collect();
        let (zones, contents) = (instance.zone_count(), instance.content_count());
        let residual = (0..zones).flat_map(|m| (0..contents).map(move |k| (m, k))).map(|(m, k)| instance.demand.get(m, k)).collect();
        PlacementState {
            instance,
            capacity,
            residual,
            flows: BTreeMap::new(),
            placed: vec![false; zones * contents],
            providers: vec![Vec::new(); contents],
            surrogates: vec![order.iter().copied().collect(); contents],
        }
    }

    fn slot(&self, zone: usize, content: usize) -> usize {
        zone * self.instance.content_count() + content
    }

    pub fn residual(&self, zone: usize, content: usize) -> u64 {
        self.residual[self.slot(zone, content)]
    }

    pub fn providers(&self, content: usize) -> &[usize] {
        &self.providers[content]
    }

    /// Residual capacity of an undirected edge in requests.
    pub fn edge_capacity(&self, undirected_edge: usize) -> u64 {
        self.capacity[undirected_edge]
    }

    fn bottleneck(&self, key: PathKey) -> u64 {
        let path = self.instance.paths.get(key).unwrap();
        path.edges.iter().map(|&e| self.capacity[undirected(e)]).min().unwrap_or(u64::MAX)
    }

    fn add_flow(&mut self, key: PathKey, content: usize, units: u64) {
        for &e in &self.instance.paths.get(key).unwrap().edges {
            self.capacity[undirected(e)] -= units;
        }
        *self.flows.entry((key, content)).or_insert(0) += units;
        let s = self.slot(key.consumer, content);
        self.residual[s] -= units;
    }

    fn release(&mut self, key: PathKey, content: usize) -> u64 {
        let units = self.flows.remove(&(key, content)).unwrap_or(0);
        for &e in &self.instance.paths.get(key).unwrap().edges {
            self.capacity[undirected(e)] += units;
        }
        let s = self.slot(key.consumer, content);
        self.residual[s] += units;
        units
    }

    /// Moves the next surrogate of `content` into its provider array.
    fn add_provider(&mut self, content: usize) -> Option<usize> {
        let zone = self.surrogates[content].pop_front()?;
        self.providers[content].push(zone);
        let s = self.slot(zone, content);
        self.placed[s] = true;
        Some(zone)
    }

    /// Serves as much of one consumer's residual demand as the given
    /// providers and current capacities allow.
    fn serve(&mut self, consumer: usize, content: usize, providers: &[usize], pref: Preference, skip: Option<PathKey>) {
        let topo = self.instance.topology();
        let paths = &self.instance.paths;
        let mut candidates = providers.to_vec();
        candidates.sort_by(|&a, &b| {
            let dist = |p: usize| paths.distance(p, consumer);
            let remote = |p: usize| !topo.same_region(p, consumer);
            let by_dist = dist(a).partial_cmp(&dist(b)).unwrap_or(std::cmp::Ordering::Equal);
            match pref {
                Preference::Nearest => by_dist.then(remote(a).cmp(&remote(b))),
                Preference::IntraRegion => remote(a).cmp(&remote(b)).then(by_dist),
            }
            .then(a.cmp(&b))
        });
        for p in candidates {
            for index in 0..paths.paths(p, consumer).len() {
                let need = self.residual(consumer, content);
                if need == 0 {
                    return;
                }
                let key = PathKey { provider: p, consumer, index };
                if Some(key) == skip {
                    continue;
                }
                let units = self.bottleneck(key).min(need);
                if units > 0 {
                    self.add_flow(key, content, units);
                }
            }
        }
    }

    /// Serves the listed consumers from the current providers, adding
    /// surrogates whenever a full pass leaves demand unmet.
    pub fn satisfy_consumers(&mut self, content: usize, consumers: &[usize]) -> Result<(), HeuristicError> {
        let mut queue: Vec<usize> = consumers.iter().copied().filter(|&c| self.residual(c, content) > 0).collect();
        queue.sort_by(|&a, &b| self.residual(b, content).cmp(&self.residual(a, content)).then(a.cmp(&b)));
        let mut queue: VecDeque<usize> = queue.into();
        if queue.is_empty() {
            return Ok(());
        }
        if self.providers[content].is_empty() {
            self.add_provider(content).ok_or(HeuristicError::Infeasible { content, unmet: self.unmet(content) })?;
        }
        loop {
            for _ in 0..queue.len() {
                let c = queue.pop_front().unwrap();
                let providers = self.providers[content].clone();
                self.serve(c, content, &providers, Preference::Nearest, None);
                if self.residual(c, content) > 0 {
                    queue.push_back(c);
                }
            }
            if queue.is_empty() {
                return Ok(());
            }
            let added = self
                .add_provider(content)
                .ok_or(HeuristicError::Infeasible { content, unmet: self.unmet(content) })?;
            let topo = self.instance.topology();
            let (mut near, far): (VecDeque<usize>, VecDeque<usize>) =
                queue.into_iter().partition(|&c| topo.same_region(c, added));
            near.extend(far);
            queue = near;
        }
    }

    fn unmet(&self, content: usize) -> u64 {
        (0..self.instance.zone_count()).map(|m| self.residual(m, content)).sum()
    }

    fn consumers(&self, content: usize) -> Vec<usize> {
        (0..self.instance.zone_count()).filter(|&m| self.residual(m, content) > 0).collect()
    }

    fn region_consumers(&self, content: usize, zone: usize) -> Vec<usize> {
        let topo = self.instance.topology();
        self.consumers(content).into_iter().filter(|&c| topo.same_region(c, zone)).collect()
    }

    /// Pops the top surrogate, then serves its region before everyone else.
    fn content_placement(&mut self, content: usize) -> Result<(), HeuristicError> {
        if self.unmet(content) == 0 {
            return Ok(());
        }
        let first = self
            .add_provider(content)
            .ok_or(HeuristicError::Infeasible { content, unmet: self.unmet(content) })?;
        let local = self.region_consumers(content, first);
        self.satisfy_consumers(content, &local)?;
        let rest = self.consumers(content);
        self.satisfy_consumers(content, &rest)
    }

    /// Releases the region's demand currently served from other regions and
    /// serves it again, so that a newly added provider picks it up.
    fn resatisfy_region(&mut self, content: usize, zone: usize) -> Result<(), HeuristicError> {
        let topo = self.instance.topology();
        let remote: Vec<PathKey> = self
            .flows
            .keys()
            .filter(|(key, k)| {
                *k == content && topo.same_region(key.consumer, zone) && !topo.same_region(key.provider, zone)
            })
            .map(|(key, _)| *key)
            .collect();
        for key in remote {
            self.release(key, content);
        }
        let local = self.region_consumers(content, zone);
        self.satisfy_consumers(content, &local)?;
        let rest = self.consumers(content);
        self.satisfy_consumers(content, &rest)
    }

    pub fn configuration(&self) -> Configuration<T> {
        let mut cfg = Configuration::empty(self.instance.zone_count(), self.instance.content_count());
        for m in 0..self.instance.zone_count() {
            for k in 0..self.instance.content_count() {
                if self.placed[self.slot(m, k)] {
                    cfg.set_placed(m, k, true);
                }
            }
        }
        cfg.flows = self
            .flows
            .iter()
            .filter(|(_, &u)| u > 0)
            .map(|(&(key, content), &u)| Flow { key, content, amount: T::from_units(u) })
            .collect();
        cfg
    }

    fn evaluate(&self) -> Result<Evaluation<T>, HeuristicError> {
        Ok(evaluate(self.instance, &self.configuration())?)
    }

    fn snapshot(&self) -> (Vec<bool>, Vec<((PathKey, usize), u64)>) {
        (self.placed.clone(), self.flows.iter().filter(|(_, &u)| u > 0).map(|(k, u)| (*k, *u)).collect())
    }

    /// Flow tuples on QoS-violating paths, in key order.
    fn violating(&self, eval: &Evaluation<T>) -> Vec<(PathKey, usize)> {
        self.flows
            .iter()
            .filter(|(_, &u)| u > 0)
            .filter(|((key, _), _)| eval.flags.violated[self.instance.paths.global_id(*key)])
            .map(|(&tuple, _)| tuple)
            .collect()
    }

    /// Re-serves violating tuples until the SLA holds, adding surrogates when
    /// rerouting alone stops making progress. Returns the number of rounds
    /// and whether the SLA is still unmet with every zone hosting.
    pub fn sla_repair(&mut self) -> Result<(usize, bool), HeuristicError> {
        let mut seen = HashSet::new();
        seen.insert(self.snapshot());
        let mut rounds = 0;
        loop {
            let eval = self.evaluate()?;
            if eval.report.sla_met {
                return Ok((rounds, false));
            }
            rounds += 1;
            let before = self.snapshot();
            let tuples = self.violating(&eval);
            let affected: BTreeSet<usize> = tuples.iter().map(|&(_, k)| k).collect();
            for (key, k) in tuples {
                self.release(key, k);
            }
            for &k in &affected {
                let consumers = self.consumers(k);
                self.satisfy_consumers(k, &consumers)?;
            }
            let after = self.snapshot();
            if after == before || !seen.insert(after) {
                let mut grew = false;
                for &k in &affected {
                    if let Some(zone) = self.add_provider(k) {
                        grew = true;
                        self.resatisfy_region(k, zone)?;
                    }
                }
                if !grew {
                    return Ok((rounds, !self.evaluate()?.report.sla_met));
                }
                seen.insert(self.snapshot());
            }
        }
    }

    /// Moves demand off violating paths onto existing providers, keeping a
    /// move only when it lowers the violation degree without raising the
    /// bandwidth cost or breaking the SLA.
    pub fn minimize_violation_degree(&mut self) -> Result<(), HeuristicError> {
        let eval = self.evaluate()?;
        for (key, content) in self.violating(&eval) {
            let current = self.evaluate()?;
            let g = self.instance.paths.global_id(key);
            if !current.flags.violated[g] || !self.flows.contains_key(&(key, content)) {
                continue;
            }
            let saved = self.clone();
            self.release(key, content);
            let providers = self.providers[content].clone();
            self.serve(key.consumer, content, &providers, Preference::IntraRegion, Some(key));
            let rest = self.residual(key.consumer, content);
            if rest > 0 {
                if self.bottleneck(key) < rest {
                    *self = saved;
                    continue;
                }
                self.add_flow(key, content, rest);
            }
            let next = self.evaluate()?;
            let better = next.report.violation_degree < current.report.violation_degree
                && next.report.bandwidth <= current.report.bandwidth
                && (next.report.sla_met || !current.report.sla_met);
            if !better {
                *self = saved;
            }
        }
        Ok(())
    }
}

/// Runs the full placement procedure for one heuristic.
pub fn place<T: Scalar>(instance: &Instance<T>, kind: PriorityKind) -> Result<PlacementOutcome<T>, HeuristicError> {
    let order = surrogate_ranking(instance, kind);
    let mut state = PlacementState::new(instance, &order);
    let mut contents: Vec<usize> = (0..instance.content_count()).collect();
    contents.sort_by(|&a, &b| instance.demand.content_total(b).cmp(&instance.demand.content_total(a)).then(a.cmp(&b)));
    for k in contents {
        state.content_placement(k)?;
    }
    let mut before_pass = None;
    let mut best_effort = false;
    let mut repair_rounds = 0;
    if kind == PriorityKind::Wsna {
        (repair_rounds, best_effort) = state.sla_repair()?;
        before_pass = Some(state.evaluate()?.report);
        state.minimize_violation_degree()?;
    }
    let config = state.configuration();
    let report = state.evaluate()?.report;
    Ok(PlacementOutcome { config, report, before_pass, best_effort, providers: state.providers.clone(), repair_rounds })
}
