//! Latency and bandwidth-cost lookup tables.
//!
//! Both tables are indexed by load in units of the granularity `mu`. The
//! latency table follows a queueing curve `d0 + q * rho / (1 - rho)` clamped at
//! the path-latency bound; the cost table integrates a tiered, volume
//! discounted tariff.

use serde::{Deserialize, Serialize};

use super::{Edge, LinkKind, TopologyError};
use crate::scalar::{divides, Scalar};

/// Per-link-class delay model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelayParams<T> {
    /// Zero-load delay (processing, propagation, transmission), ms.
    pub base_ms: T,
    /// Queueing scale, ms.
    pub queue_ms: T,
}

/// Tiered tariff: `(upper tier boundary as a fraction of capacity, rate per Mbps)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tariff<T> {
    pub tiers: Vec<(T, T)>,
}

impl<T: Scalar> Tariff<T> {
    pub fn flat(rate: T) -> Self {
        Tariff { tiers: vec![(T::one(), rate)] }
    }

    fn check(&self) -> Result<(), TopologyError> {
        let bad = |msg: &str| Err(TopologyError::Tariff(msg.to_string()));
        if self.tiers.is_empty() {
            return bad("tariff has no tiers");
        }
        let mut prev_bound = T::zero();
        for (i, &(bound, rate)) in self.tiers.iter().enumerate() {
            if !(bound > prev_bound) {
                return bad("tier boundaries must be strictly increasing");
            }
            if rate < T::zero() {
                return bad("tier rates must be non-negative");
            }
            if i > 0 && !(rate < self.tiers[i - 1].1) {
                return bad("tier rates must be strictly decreasing");
            }
            prev_bound = bound;
        }
        if prev_bound < T::one() {
            return bad("last tier must cover the full capacity");
        }
        Ok(())
    }

    /// Cumulative cost of `load` Mbps on a link of `capacity` Mbps.
    pub fn cost(&self, load: T, capacity: T) -> T {
        let mut lower = T::zero();
        let mut total = T::zero();
        for &(bound, rate) in &self.tiers {
            let upper = bound * capacity;
            if load <= lower {
                break;
            }
            total = total + (load.min(upper) - lower) * rate;
            lower = upper;
        }
        total
    }
}

/// Delay and tariff parameters for both link classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(serialize = "T: Serialize", deserialize = "T: Scalar"))]
pub struct LinkModel<T> {
    pub inter_zone_delay: DelayParams<T>,
    pub inter_region_delay: DelayParams<T>,
    pub inter_zone_tariff: Tariff<T>,
    pub inter_region_tariff: Tariff<T>,
}

impl<T: Scalar> LinkModel<T> {
    pub fn delay(&self, kind: LinkKind) -> &DelayParams<T> {
        match kind {
            LinkKind::InterZone => &self.inter_zone_delay,
            LinkKind::InterRegion => &self.inter_region_delay,
        }
    }

    pub fn tariff(&self, kind: LinkKind) -> &Tariff<T> {
        match kind {
            LinkKind::InterZone => &self.inter_zone_tariff,
            LinkKind::InterRegion => &self.inter_region_tariff,
        }
    }
}

impl<T: Scalar> Default for LinkModel<T> {
    /// Inter-zone d0 = 2 ms, inter-region d0 = 40 ms, queueing scale 8·d0.
    /// Tariffs are normalized so that a saturated inter-region link costs about
    /// as much as storing one replica, and inter-zone traffic is an order of
    /// magnitude cheaper per Mbps.
    fn default() -> Self {
        LinkModel {
            inter_zone_delay: DelayParams { base_ms: T::lit(2.0), queue_ms: T::lit(16.0) },
            inter_region_delay: DelayParams { base_ms: T::lit(40.0), queue_ms: T::lit(320.0) },
            inter_zone_tariff: Tariff { tiers: vec![(T::lit(0.4), T::lit(2e-4)), (T::one(), T::lit(1e-4))] },
            inter_region_tariff: Tariff { tiers: vec![(T::lit(0.4), T::lit(1.2e-2)), (T::one(), T::lit(8e-3))] },
        }
    }
}

/// Latency table `V[p]`, ms, for total bidirectional load `p * mu`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatencyLut<T> {
    pub values: Vec<T>,
}

impl<T: Scalar> LatencyLut<T> {
    pub fn base(&self) -> T {
        self.values[0]
    }

    pub fn max_index(&self) -> usize {
        self.values.len() - 1
    }

    pub fn saturated(&self) -> T {
        self.values[self.max_index()]
    }
}

/// Cost table `W[p]` for directional load `p * mu`.
#[derive(Clone, Debug, PartialEq)]
pub struct BandwidthCostLut<T> {
    pub values: Vec<T>,
}

impl<T: Scalar> BandwidthCostLut<T> {
    pub fn max_index(&self) -> usize {
        self.values.len() - 1
    }
}

fn slots<T: Scalar>(capacity: T, mu: T) -> Result<usize, TopologyError> {
    if !(mu > T::zero()) || !divides(mu, capacity) {
        return Err(TopologyError::Granularity { capacity: capacity.as_f64(), mu: mu.as_f64() });
    }
    Ok((capacity / mu).round().to_usize().unwrap_or(0))
}

pub fn build_latency_lut<T: Scalar>(
    edge: &Edge<T>,
    params: &DelayParams<T>,
    mu: T,
    upper_ms: T,
) -> Result<LatencyLut<T>, TopologyError> {
    let n = slots(edge.capacity, mu)?;
    if !(params.base_ms > T::zero()) || params.queue_ms < T::zero() || !(upper_ms > params.base_ms) {
        return Err(TopologyError::DelayParams);
    }
    let values = (0..=n)
        .map(|p| {
            if p == n {
                return upper_ms;
            }
            let rho = T::from_usize(p).unwrap() * mu / edge.capacity;
            (params.base_ms + params.queue_ms * rho / (T::one() - rho)).min(upper_ms)
        })
        .collect();
    Ok(LatencyLut { values })
}

pub fn build_bandwidth_cost_lut<T: Scalar>(
    edge: &Edge<T>,
    tariff: &Tariff<T>,
    mu: T,
) -> Result<BandwidthCostLut<T>, TopologyError> {
    tariff.check()?;
    let n = slots(edge.capacity, mu)?;
    let values = (0..=n).map(|p| tariff.cost(T::from_usize(p).unwrap() * mu, edge.capacity)).collect();
    Ok(BandwidthCostLut { values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(capacity: f64) -> Edge<f64> {
        Edge { from: 0, to: 1, capacity, kind: LinkKind::InterZone }
    }

    #[test]
    fn latency_endpoints_and_midpoint() {
        let params = DelayParams { base_ms: 2.0, queue_ms: 8.0 };
        let lut = build_latency_lut(&edge(100.0), &params, 10.0, 1000.0).unwrap();
        assert_eq!(lut.values.len(), 11);
        assert_eq!(lut.values[0], 2.0);
        assert_eq!(lut.values[10], 1000.0);
        // rho = 0.5: 2 + 8 * 0.5 / 0.5
        assert!((lut.values[5] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn latency_rejects_bad_granularity() {
        let params = DelayParams { base_ms: 2.0, queue_ms: 8.0 };
        assert!(matches!(
            build_latency_lut(&edge(100.0), &params, 30.0, 1000.0),
            Err(TopologyError::Granularity { .. })
        ));
    }

    #[test]
    fn tiered_cost() {
        let tariff = Tariff { tiers: vec![(0.4, 1.0), (1.0, 0.5)] };
        let lut = build_bandwidth_cost_lut(&edge(100.0), &tariff, 10.0).unwrap();
        assert_eq!(lut.values[0], 0.0);
        assert!((lut.values[6] - 50.0).abs() < 1e-12);
        assert!((lut.values[10] - 70.0).abs() < 1e-12);
    }

    #[test]
    fn flat_tariff_is_linear() {
        let lut = build_bandwidth_cost_lut(&edge(100.0), &Tariff::flat(0.3), 10.0).unwrap();
        for (p, w) in lut.values.iter().enumerate() {
            assert!((w - 0.3 * p as f64 * 10.0).abs() < 1e-12);
        }
    }

    #[test]
    fn non_decreasing_rates_rejected() {
        let tariff = Tariff { tiers: vec![(0.4, 1.0), (1.0, 1.0)] };
        assert!(matches!(build_bandwidth_cost_lut(&edge(100.0), &tariff, 10.0), Err(TopologyError::Tariff(_))));
        let tariff = Tariff { tiers: vec![(0.4, 1.0), (1.0, 2.0)] };
        assert!(build_bandwidth_cost_lut(&edge(100.0), &tariff, 10.0).is_err());
    }

    #[test]
    fn default_inter_region_tariff_dominates() {
        let model = LinkModel::<f64>::default();
        let zone = build_bandwidth_cost_lut(&edge(1000.0), &model.inter_zone_tariff, 10.0).unwrap();
        let region = build_bandwidth_cost_lut(&edge(100.0), &model.inter_region_tariff, 10.0).unwrap();
        for p in 1..region.values.len() {
            assert!(region.values[p] > zone.values[p]);
        }
    }
}
