//! Weighted betweenness centrality (Brandes).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::Topology;
use crate::scalar::{approx_eq, definitely_less, Scalar};

struct Item<T> {
    dist: T,
    zone: usize,
}

impl<T: Scalar> PartialEq for Item<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Scalar> Eq for Item<T> {}
impl<T: Scalar> PartialOrd for Item<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for Item<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.partial_cmp(&self.dist).unwrap_or(Ordering::Equal).then(other.zone.cmp(&self.zone))
    }
}

/// Betweenness of every zone: sum over unordered pairs `{s, t}` not
/// containing `v` of the fraction of shortest `s`–`t` paths through `v`.
/// `weights` is indexed by directed edge.
pub fn betweenness<T: Scalar>(topo: &Topology<T>, weights: &[T]) -> Vec<T> {
    let n = topo.zone_count();
    let mut bc = vec![T::zero(); n];
    for s in 0..n {
        let mut dist = vec![T::infinity(); n];
        let mut sigma = vec![T::zero(); n];
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut order = Vec::with_capacity(n);
        let mut settled = vec![false; n];
        dist[s] = T::zero();
        sigma[s] = T::one();
        let mut heap = BinaryHeap::new();
        heap.push(Item { dist: T::zero(), zone: s });
        while let Some(Item { dist: d, zone: u }) = heap.pop() {
            if settled[u] || d > dist[u] {
                continue;
            }
            settled[u] = true;
            order.push(u);
            for &e in topo.out_edges(u) {
                let v = topo.edges()[e].to;
                if settled[v] {
                    continue;
                }
                let alt = d + weights[e];
                if definitely_less(alt, dist[v]) {
                    dist[v] = alt;
                    sigma[v] = sigma[u];
                    preds[v].clear();
                    preds[v].push(u);
                    heap.push(Item { dist: alt, zone: v });
                } else if approx_eq(alt, dist[v]) {
                    sigma[v] = sigma[v] + sigma[u];
                    preds[v].push(u);
                }
            }
        }
        let mut delta = vec![T::zero(); n];
        for &w in order.iter().rev() {
            for &v in &preds[w] {
                delta[v] = delta[v] + sigma[v] / sigma[w] * (T::one() + delta[w]);
            }
            if w != s {
                bc[w] = bc[w] + delta[w];
            }
        }
    }
    // each unordered pair was counted from both endpoints
    let half = T::lit(0.5);
    bc.into_iter().map(|b| b * half).collect()
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
    fn line() {
        let t = topo(3, &[(1, 2), (2, 3)]);
        assert_eq!(betweenness(&t, &[1.0; 4]), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn star() {
        let t = topo(4, &[(1, 2), (1, 3), (1, 4)]);
        assert_eq!(betweenness(&t, &[1.0; 6]), vec![3.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn four_cycle() {
        let t = topo(4, &[(1, 2), (2, 3), (3, 4), (4, 1)]);
        assert_eq!(betweenness(&t, &[1.0; 8]), vec![0.5; 4]);
    }

    #[test]
    fn triangle() {
        let t = topo(3, &[(1, 2), (2, 3), (1, 3)]);
        assert_eq!(betweenness(&t, &[1.0; 6]), vec![0.0; 3]);
    }

    #[test]
    fn weights_reroute() {
        // triangle with an expensive direct link 1-3: all 1-3 traffic transits 2
        let t = topo(3, &[(1, 2), (2, 3), (1, 3)]);
        let w = [1.0, 1.0, 1.0, 1.0, 5.0, 5.0];
        assert_eq!(betweenness(&t, &w), vec![0.0, 1.0, 0.0]);
    }
}
