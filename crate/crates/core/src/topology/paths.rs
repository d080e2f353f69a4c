//! Loopless k-shortest path enumeration (Yen) over zero-load latencies.
//!
//! Ties between equal-latency paths are broken by the lexicographic order of
//! their zone-index sequences, which makes the output fully deterministic.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};

use super::Topology;
use crate::scalar::{approx_eq, definitely_less, Scalar};

/// A simple path between two zones.
#[derive(Clone, Debug, PartialEq)]
pub struct Path<T> {
    /// Zone indices, source first. A self path holds just the source.
    pub zones: Vec<usize>,
    /// Directed edge indices, in travel order.
    pub edges: Vec<usize>,
    /// Zero-load latency, ms.
    pub base_latency: T,
}

impl<T: Scalar> Path<T> {
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains_edge(&self, e: usize) -> bool {
        self.edges.contains(&e)
    }
}

/// Candidate paths for every ordered zone pair, with a flat global index
/// over all `(m, n, x)` tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSet<T> {
    zone_count: usize,
    pairs: Vec<Vec<Path<T>>>,
    offsets: Vec<usize>,
}

/// Identifies path `x` of the ordered pair `(provider, consumer)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathKey {
    pub provider: usize,
    pub consumer: usize,
    pub index: usize,
}

impl<T: Scalar> PathSet<T> {
    pub fn zone_count(&self) -> usize {
        self.zone_count
    }

    pub fn paths(&self, from: usize, to: usize) -> &[Path<T>] {
        &self.pairs[from * self.zone_count + to]
    }

    pub fn get(&self, key: PathKey) -> Option<&Path<T>> {
        if key.provider >= self.zone_count || key.consumer >= self.zone_count {
            return None;
        }
        self.paths(key.provider, key.consumer).get(key.index)
    }

    /// Total number of path tuples, Σ|π_{m,n}|.
    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn global_id(&self, key: PathKey) -> usize {
        self.offsets[key.provider * self.zone_count + key.consumer] + key.index
    }

    /// All path tuples in `(m, n, x)` order.
    pub fn keys(&self) -> impl Iterator<Item = PathKey> + '_ {
        let n = self.zone_count;
        (0..n * n).flat_map(move |pair| {
            (0..self.pairs[pair].len()).map(move |index| PathKey { provider: pair / n, consumer: pair % n, index })
        })
    }

    /// Zero-load latency of the best path between two zones.
    pub fn distance(&self, from: usize, to: usize) -> T {
        self.paths(from, to).first().map(|p| p.base_latency).unwrap_or_else(T::infinity)
    }
}

#[derive(Clone, Debug)]
struct Candidate<T> {
    cost: T,
    zones: Vec<usize>,
    edges: Vec<usize>,
}

fn path_order<T: Scalar>(a_cost: T, a_zones: &[usize], b_cost: T, b_zones: &[usize]) -> Ordering {
    if approx_eq(a_cost, b_cost) {
        a_zones.cmp(b_zones)
    } else if a_cost < b_cost {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

impl<T: Scalar> PartialEq for Candidate<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Scalar> Eq for Candidate<T> {}
impl<T: Scalar> PartialOrd for Candidate<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for Candidate<T> {
    // reversed for a min-heap
    fn cmp(&self, other: &Self) -> Ordering {
        path_order(other.cost, &other.zones, self.cost, &self.zones)
    }
}

/// Lexicographically-least shortest path from `source` to `target`, avoiding
/// `blocked_zones` and `blocked_edges` (directed). Weights are per directed edge.
fn shortest_path<T: Scalar>(
    topo: &Topology<T>,
    weights: &[T],
    source: usize,
    target: usize,
    blocked_zones: &[bool],
    blocked_edges: &BTreeSet<usize>,
) -> Option<Candidate<T>> {
    let n = topo.zone_count();
    let mut best: Vec<Option<(T, Vec<usize>, Vec<usize>)>> = vec![None; n];
    let mut done = vec![false; n];
    best[source] = Some((T::zero(), vec![source], Vec::new()));
    let mut heap = BinaryHeap::new();
    heap.push(Candidate { cost: T::zero(), zones: vec![source], edges: Vec::new() });
    while let Some(Candidate { cost, zones, edges }) = heap.pop() {
        let u = *zones.last().unwrap();
        if done[u] {
            continue;
        }
        match &best[u] {
            Some((c, z, _)) if !approx_eq(*c, cost) || *z != zones => continue,
            _ => {}
        }
        done[u] = true;
        if u == target {
            return Some(Candidate { cost, zones, edges });
        }
        for &e in topo.out_edges(u) {
            let v = topo.edges()[e].to;
            if done[v] || blocked_zones[v] || blocked_edges.contains(&e) {
                continue;
            }
            let next_cost = cost + weights[e];
            let mut next_zones = zones.clone();
            next_zones.push(v);
            let better = match &best[v] {
                None => true,
                Some((c, z, _)) => path_order(next_cost, &next_zones, *c, z) == Ordering::Less,
            };
            if better {
                let mut next_edges = edges.clone();
                next_edges.push(e);
                best[v] = Some((next_cost, next_zones.clone(), next_edges.clone()));
                heap.push(Candidate { cost: next_cost, zones: next_zones, edges: next_edges });
            }
        }
    }
    None
}

fn path_cost<T: Scalar>(weights: &[T], edges: &[usize]) -> T {
    edges.iter().fold(T::zero(), |acc, &e| acc + weights[e])
}

/// Up to `k` loopless shortest paths from `source` to `target` (Yen).
pub fn k_shortest_paths<T: Scalar>(
    topo: &Topology<T>,
    weights: &[T],
    source: usize,
    target: usize,
    k: usize,
) -> Vec<Path<T>> {
    if source == target {
        return vec![Path { zones: vec![source], edges: Vec::new(), base_latency: T::zero() }];
    }
    let n = topo.zone_count();
    let no_zones = vec![false; n];
    let Some(first) = shortest_path(topo, weights, source, target, &no_zones, &BTreeSet::new()) else {
        return Vec::new();
    };
    let mut accepted: Vec<Candidate<T>> = vec![first];
    let mut pool: Vec<Candidate<T>> = Vec::new();
    while accepted.len() < k {
        let last = accepted.last().unwrap().clone();
        for spur_pos in 0..last.zones.len() - 1 {
            let spur = last.zones[spur_pos];
            let root_zones = &last.zones[..=spur_pos];
            let root_edges = &last.edges[..spur_pos];
            let mut blocked_edges = BTreeSet::new();
            for p in &accepted {
                if p.zones.len() > spur_pos + 1 && &p.zones[..=spur_pos] == root_zones {
                    blocked_edges.insert(p.edges[spur_pos]);
                }
            }
            let mut blocked_zones = vec![false; n];
            for &z in &root_zones[..spur_pos] {
                blocked_zones[z] = true;
            }
            if let Some(spur_path) = shortest_path(topo, weights, spur, target, &blocked_zones, &blocked_edges) {
                let mut zones = root_zones.to_vec();
                zones.extend_from_slice(&spur_path.zones[1..]);
                let mut edges = root_edges.to_vec();
                edges.extend_from_slice(&spur_path.edges);
                let cost = path_cost(weights, &edges);
                let dup = accepted.iter().chain(pool.iter()).any(|c| c.zones == zones);
                if !dup {
                    pool.push(Candidate { cost, zones, edges });
                }
            }
        }
        if pool.is_empty() {
            break;
        }
        let best = (0..pool.len())
            .min_by(|&a, &b| path_order(pool[a].cost, &pool[a].zones, pool[b].cost, &pool[b].zones))
            .unwrap();
        accepted.push(pool.swap_remove(best));
    }
    accepted
        .into_iter()
        .map(|c| Path { base_latency: path_cost(weights, &c.edges), zones: c.zones, edges: c.edges })
        .collect()
}

/// Enumerates up to `k` paths for every ordered pair, using the given
/// per-directed-edge zero-load latencies as weights.
pub fn enumerate_paths<T: Scalar>(topo: &Topology<T>, weights: &[T], k: usize) -> PathSet<T> {
    let n = topo.zone_count();
    let k = k.max(1);
    let mut pairs = Vec::with_capacity(n * n);
    let mut offsets = Vec::with_capacity(n * n + 1);
    offsets.push(0);
    for m in 0..n {
        for t in 0..n {
            let paths = k_shortest_paths(topo, weights, m, t, k);
            offsets.push(offsets.last().unwrap() + paths.len());
            pairs.push(paths);
        }
    }
    PathSet { zone_count: n, pairs, offsets }
}

/// Whether the paths of each pair are sorted by latency (ties lexicographic).
pub fn is_sorted<T: Scalar>(paths: &[Path<T>]) -> bool {
    paths.windows(2).all(|w| !definitely_less(w[1].base_latency, w[0].base_latency))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{LinkKind, Zone};

    fn topo(n: u32, links: &[(u32, u32)]) -> Topology<f64> {
        let zones = (1..=n).map(|id| Zone { id, region: 1, storage_cost: 0.5 }).collect();
        let links = links.iter().map(|&(a, b)| (a, b, 100.0, LinkKind::InterZone)).collect();
        Topology::new(vec![1], zones, links).unwrap()
    }

    #[test]
    fn line_has_unique_path() {
        let t = topo(3, &[(1, 2), (2, 3)]);
        let w = vec![1.0; t.edges().len()];
        let ps = enumerate_paths(&t, &w, 2);
        let p = ps.paths(0, 2);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].zones, vec![0, 1, 2]);
        assert_eq!(p[0].edges.len(), 2);
    }

    #[test]
    fn four_cycle_gives_two_equal_paths() {
        let t = topo(4, &[(1, 2), (2, 3), (3, 4), (4, 1)]);
        let w = vec![1.0; t.edges().len()];
        let ps = enumerate_paths(&t, &w, 2);
        let p = ps.paths(0, 2);
        assert_eq!(p.len(), 2);
        assert_eq!(p[0].base_latency, 2.0);
        assert_eq!(p[1].base_latency, 2.0);
        assert_eq!(p[0].zones, vec![0, 1, 2]);
        assert_eq!(p[1].zones, vec![0, 3, 2]);
    }

    #[test]
    fn self_pair_is_empty_path() {
        let t = topo(2, &[(1, 2)]);
        let ps = enumerate_paths(&t, &[1.0, 1.0], 3);
        let p = ps.paths(1, 1);
        assert_eq!(p.len(), 1);
        assert!(p[0].is_empty());
        assert_eq!(p[0].base_latency, 0.0);
    }

    #[test]
    fn k_paths_sorted_and_simple() {
        let t = topo(5, &[(1, 2), (2, 3), (3, 4), (4, 5), (1, 3), (2, 4), (3, 5), (1, 5)]);
        let w: Vec<f64> = (0..t.edges().len()).map(|e| 1.0 + (e / 2) as f64 * 0.5).collect();
        let ps = enumerate_paths(&t, &w, 4);
        for m in 0..5 {
            for n in 0..5 {
                let paths = ps.paths(m, n);
                assert!(is_sorted(paths));
                for p in paths {
                    let set: BTreeSet<_> = p.zones.iter().collect();
                    assert_eq!(set.len(), p.zones.len());
                    assert_eq!(p.zones[0], m);
                    assert_eq!(*p.zones.last().unwrap(), n);
                }
                for (i, a) in paths.iter().enumerate() {
                    for b in &paths[i + 1..] {
                        assert_ne!(a.zones, b.zones);
                    }
                }
            }
        }
        assert_eq!(ps.len(), ps.keys().count());
    }
}
