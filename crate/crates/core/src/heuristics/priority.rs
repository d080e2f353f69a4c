use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::{DemandMatrix, Instance};
use crate::scalar::Scalar;
use crate::topology::Topology;

/// Surrogate ranking rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorityKind {
    /// Weighted social network analysis: demand share, storage cost and
    /// centrality combined. Also runs the SLA repair and degree passes.
    Wsna,
    /// Greedy on requests per unit storage cost.
    Gs,
    /// Betweenness centrality only.
    Sna,
}

impl PriorityKind {
    pub const ALL: [PriorityKind; 3] = [PriorityKind::Gs, PriorityKind::Wsna, PriorityKind::Sna];

    pub fn as_str(self) -> &'static str {
        match self {
            PriorityKind::Wsna => "WSNA",
            PriorityKind::Gs => "GS",
            PriorityKind::Sna => "SNA",
        }
    }
}

impl fmt::Display for PriorityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PriorityKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "").as_str() {
            "wsna" => Ok(PriorityKind::Wsna),
            "gs" => Ok(PriorityKind::Gs),
            "sna" => Ok(PriorityKind::Sna),
            _ => Err(format!("unknown heuristic `{s}` (expected wsna, gs or sna)")),
        }
    }
}

/// BC share of a zone; uniform when no zone carries transit paths.
fn bc_share<T: Scalar>(zone: usize, bc: &[T]) -> T {
    let total = bc.iter().copied().sum::<T>();
    if total > T::zero() {
        bc[zone] / total
    } else {
        T::one() / T::from_usize(bc.len()).unwrap()
    }
}

pub fn priority_wsna<T: Scalar>(zone: usize, demand: &DemandMatrix, bc: &[T], topo: &Topology<T>) -> T {
    let total = demand.total();
    if total == 0 {
        return T::zero();
    }
    let share = T::from_units(demand.zone_total(zone)) / T::from_units(total);
    let storage = T::one() - topo.zones()[zone].storage_cost;
    share * storage * bc_share(zone, bc)
}

pub fn priority_gs<T: Scalar>(zone: usize, demand: &DemandMatrix, topo: &Topology<T>) -> T {
    let catalog = T::from_usize(demand.content_count()).unwrap() * topo.zones()[zone].storage_cost;
    T::from_units(demand.zone_total(zone)) / catalog
}

pub fn priority_sna<T: Scalar>(zone: usize, bc: &[T]) -> T {
    bc_share(zone, bc)
}

/// Priority of every zone under `kind`.
pub fn priorities<T: Scalar>(instance: &Instance<T>, kind: PriorityKind) -> Vec<T> {
    let topo = instance.topology();
    let zones = 0..instance.zone_count();
    match kind {
        PriorityKind::Gs => zones.map(|m| priority_gs(m, &instance.demand, topo)).collect(),
        PriorityKind::Wsna => {
            let bc = instance.network.betweenness();
            zones.map(|m| priority_wsna(m, &instance.demand, &bc, topo)).collect()
        }
        PriorityKind::Sna => {
            let bc = instance.network.betweenness();
            zones.map(|m| priority_sna(m, &bc)).collect()
        }
    }
}

/// Zone indices by priority, highest first; ties go to the lower index.
pub fn surrogate_order<T: Scalar>(priorities: &[T]) -> Vec<usize> {
    ranked(&[priorities])
}

/// Sorts zones by several descending keys in turn, then by index.
fn ranked<T: Scalar>(keys: &[&[T]]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..keys[0].len()).collect();
    order.sort_by(|&a, &b| {
        keys.iter()
            .map(|k| k[b].partial_cmp(&k[a]).unwrap_or(Ordering::Equal))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// Surrogate list for a heuristic. W-SNA priorities are products and often
/// tie at zero, so its ties fall back to the BC share and then the request
/// share before the zone index.
pub fn surrogate_ranking<T: Scalar>(instance: &Instance<T>, kind: PriorityKind) -> Vec<usize> {
    let p = priorities(instance, kind);
    if kind != PriorityKind::Wsna {
        return surrogate_order(&p);
    }
    let bc = instance.network.betweenness();
    let demand: Vec<T> = (0..instance.zone_count()).map(|m| T::from_units(instance.demand.zone_total(m))).collect();
    ranked(&[&p, &bc, &demand])
}
