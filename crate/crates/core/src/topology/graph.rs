use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TopologyError;
use crate::scalar::Scalar;

/// Link class. Inter-region links cross the public Internet and are slower
/// and pricier than the links between zones of one region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LinkKind {
    InterZone,
    InterRegion,
}

impl LinkKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LinkKind::InterZone => "inter-zone",
            LinkKind::InterRegion => "inter-region",
        }
    }
}

impl fmt::Display for LinkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LinkKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inter-zone" | "zone" | "intra-region" => Ok(LinkKind::InterZone),
            "inter-region" | "region" => Ok(LinkKind::InterRegion),
            other => Err(format!("unknown edge kind `{other}`")),
        }
    }
}

/// A cloud zone, i.e. a candidate surrogate.
#[derive(Clone, Debug, PartialEq)]
pub struct Zone<T> {
    /// External id as written in topology files.
    pub id: u32,
    pub region: u32,
    /// Normalized storage cost per content, in (0, 1].
    pub storage_cost: T,
}

/// Directed edge between two zone indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge<T> {
    pub from: usize,
    pub to: usize,
    /// Mbps.
    pub capacity: T,
    pub kind: LinkKind,
}

/// Region/zone graph.
///
/// Directed edges are stored in reverse pairs: edge `2i` is the declared
/// direction and `2i + 1` its reverse, so the undirected edge of `e` is
/// `e / 2` and its reverse is `e ^ 1`. Zones are kept sorted by external id,
/// so index order and id order agree.
#[derive(Clone, Debug, PartialEq)]
pub struct Topology<T> {
    zones: Vec<Zone<T>>,
    regions: Vec<u32>,
    edges: Vec<Edge<T>>,
    out_edges: Vec<Vec<usize>>,
}

impl<T: Scalar> Topology<T> {
    /// Validates and builds a topology. `links` lists one direction of each
    /// undirected edge as `(zone id, zone id, capacity, kind)`; reverses are added.
    pub fn new(
        regions: Vec<u32>,
        zones: Vec<Zone<T>>,
        links: Vec<(u32, u32, T, LinkKind)>,
    ) -> Result<Self, TopologyError> {
        if zones.is_empty() {
            return Err(TopologyError::Empty);
        }
        let mut region_set = BTreeSet::new();
        for &r in &regions {
            if !region_set.insert(r) {
                return Err(TopologyError::DuplicateRegion(r));
            }
        }
        let mut zones = zones;
        zones.sort_by_key(|z| z.id);
        let mut index = HashMap::new();
        for (i, z) in zones.iter().enumerate() {
            if index.insert(z.id, i).is_some() {
                return Err(TopologyError::DuplicateZone(z.id));
            }
            if !region_set.contains(&z.region) {
                return Err(TopologyError::UnknownRegion { zone: z.id, region: z.region });
            }
            if !(z.storage_cost > T::zero() && z.storage_cost <= T::one()) {
                return Err(TopologyError::StorageCost { zone: z.id, value: z.storage_cost.as_f64() });
            }
        }

        let mut edges = Vec::with_capacity(2 * links.len());
        let mut seen = BTreeSet::new();
        for (a, b, capacity, kind) in links {
            let from = *index.get(&a).ok_or(TopologyError::UnknownZone(a))?;
            let to = *index.get(&b).ok_or(TopologyError::UnknownZone(b))?;
            if from == to {
                return Err(TopologyError::SelfLoop(a));
            }
            if !seen.insert((from.min(to), from.max(to))) {
                return Err(TopologyError::DuplicateEdge(a, b));
            }
            if !(capacity > T::zero()) || !capacity.is_finite() {
                return Err(TopologyError::NonPositiveCapacity { from: a, to: b });
            }
            let cross = zones[from].region != zones[to].region;
            if cross != (kind == LinkKind::InterRegion) {
                return Err(TopologyError::KindMismatch { from: a, to: b, kind });
            }
            edges.push(Edge { from, to, capacity, kind });
            edges.push(Edge { from: to, to: from, capacity, kind });
        }

        let mut out_edges = vec![Vec::new(); zones.len()];
        for (e, edge) in edges.iter().enumerate() {
            out_edges[edge.from].push(e);
        }
        for list in &mut out_edges {
            list.sort_by_key(|&e| edges[e].to);
        }

        let topo = Topology { zones, regions: region_set.into_iter().collect(), edges, out_edges };
        if !topo.is_connected() {
            return Err(TopologyError::Disconnected);
        }
        Ok(topo)
    }

    /// Parses the line-oriented topology format:
    /// `region <id>`, `zone <id> <region> <alpha>`, `edge <i> <j> <mbps> <kind>`.
    pub fn parse(text: &str) -> Result<Self, TopologyError> {
        let mut regions = Vec::new();
        let mut zones = Vec::new();
        let mut links = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = n + 1;
            let err = |msg: String| TopologyError::Parse { line: lineno, msg };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| -> Result<f64, TopologyError> {
                s.parse::<f64>().map_err(|_| err(format!("invalid number `{s}`")))
            };
            let id = |s: &str| -> Result<u32, TopologyError> {
                s.parse::<u32>().map_err(|_| err(format!("invalid id `{s}`")))
            };
            match (fields[0], fields.len()) {
                ("region", 2) => regions.push(id(fields[1])?),
                ("zone", 4) => zones.push(Zone {
                    id: id(fields[1])?,
                    region: id(fields[2])?,
                    storage_cost: T::lit(num(fields[3])?),
                }),
                ("edge", 5) => {
                    let kind = fields[4].parse::<LinkKind>().map_err(err)?;
                    links.push((id(fields[1])?, id(fields[2])?, T::lit(num(fields[3])?), kind));
                }
                (kw @ ("region" | "zone" | "edge"), len) => {
                    return Err(err(format!("`{kw}` takes {} fields, got {}", arity(kw), len - 1)));
                }
                (other, _) => return Err(err(format!("unknown directive `{other}`"))),
            }
        }
        Self::new(regions, zones, links)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.regions {
            let _ = writeln!(out, "region {r}");
        }
        for z in &self.zones {
            let _ = writeln!(out, "zone {} {} {}", z.id, z.region, z.storage_cost);
        }
        for e in self.edges.iter().step_by(2) {
            let _ = writeln!(
                out,
                "edge {} {} {} {}",
                self.zones[e.from].id, self.zones[e.to].id, e.capacity, e.kind
            );
        }
        out
    }

    pub fn zones(&self) -> &[Zone<T>] {
        &self.zones
    }

    pub fn zone_count(&self) -> usize {
        self.zones.len()
    }

    pub fn regions(&self) -> &[u32] {
        &self.regions
    }

    /// Directed edge set E.
    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    /// Size of the undirected edge set E′.
    pub fn undirected_count(&self) -> usize {
        self.edges.len() / 2
    }

    /// Undirected edges as their declared direction.
    pub fn undirected_edges(&self) -> impl Iterator<Item = &Edge<T>> {
        self.edges.iter().step_by(2)
    }

    pub fn out_edges(&self, zone: usize) -> &[usize] {
        &self.out_edges[zone]
    }

    pub fn index_of(&self, id: u32) -> Option<usize> {
        self.zones.binary_search_by_key(&id, |z| z.id).ok()
    }

    pub fn same_region(&self, a: usize, b: usize) -> bool {
        self.zones[a].region == self.zones[b].region
    }

    pub fn zones_in_region(&self, region: u32) -> impl Iterator<Item = usize> + '_ {
        self.zones.iter().enumerate().filter(move |(_, z)| z.region == region).map(|(i, _)| i)
    }

    /// Directed edge index from `a` to `b`, if adjacent.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.out_edges[a].iter().copied().find(|&e| self.edges[e].to == b)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.zones.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &e in &self.out_edges[u] {
                let v = self.edges[e].to;
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

fn arity(kw: &str) -> usize {
    match kw {
        "region" => 1,
        "zone" => 3,
        _ => 4,
    }
}

/// Undirected edge of `e`.
#[inline]
pub fn undirected(e: usize) -> usize {
    e / 2
}

/// Reverse direction of `e`.
#[inline]
pub fn reverse(e: usize) -> usize {
    e ^ 1
}

/// Where zone storage costs come from when generating a topology.
#[derive(Clone, Debug)]
pub enum StorageCosts<T> {
    /// One value per zone, in zone-id order.
    Fixed(Vec<T>),
    /// Uniform draw in [0.2, 1.0] from a seeded generator.
    Seeded(u64),
}

impl<T: Scalar> StorageCosts<T> {
    fn resolve(&self, count: usize) -> Result<Vec<T>, TopologyError> {
        match self {
            StorageCosts::Fixed(v) if v.len() == count => Ok(v.clone()),
            StorageCosts::Fixed(v) => Err(TopologyError::CostCount { expected: count, got: v.len() }),
            StorageCosts::Seeded(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..count).map(|_| T::lit(round3(rng.gen_range(0.2..=1.0)))).collect())
            }
        }
    }
}

fn round3(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

/// Zones per region of the North America storage cloud.
pub const AMAZON_NA_REGIONS: [usize; 3] = [5, 3, 3];

/// Builds the three-region North America topology: zones of one region form a
/// full mesh, and each region pair is joined by one link between the
/// lowest-id zones of the two regions. Zone ids run 1..=11, regions 1..=3.
pub fn generate_amazon_na<T: Scalar>(
    inter_region_capacity: T,
    inter_zone_capacity: T,
    costs: &StorageCosts<T>,
) -> Result<Topology<T>, TopologyError> {
    generate_regional(&AMAZON_NA_REGIONS, inter_region_capacity, inter_zone_capacity, costs)
}

/// Full-mesh regions joined pairwise through their gateway (lowest-id) zones.
pub fn generate_regional<T: Scalar>(
    zones_per_region: &[usize],
    inter_region_capacity: T,
    inter_zone_capacity: T,
    costs: &StorageCosts<T>,
) -> Result<Topology<T>, TopologyError> {
    let total: usize = zones_per_region.iter().sum();
    let alphas = costs.resolve(total)?;
    let mut zones = Vec::with_capacity(total);
    let mut gateways = Vec::new();
    let mut links = Vec::new();
    let mut next = 1u32;
    for (r, &count) in zones_per_region.iter().enumerate() {
        let region = r as u32 + 1;
        let ids: Vec<u32> = (next..next + count as u32).collect();
        next += count as u32;
        gateways.push(ids[0]);
        for &id in &ids {
            zones.push(Zone { id, region, storage_cost: alphas[id as usize - 1] });
        }
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                links.push((a, b, inter_zone_capacity, LinkKind::InterZone));
            }
        }
    }
    for (i, &a) in gateways.iter().enumerate() {
        for &b in &gateways[i + 1..] {
            links.push((a, b, inter_region_capacity, LinkKind::InterRegion));
        }
    }
    let regions = (1..=zones_per_region.len() as u32).collect();
    Topology::new(regions, zones, links)
}

/// Shape of a random connected topology.
#[derive(Clone, Debug)]
pub struct RandomTopology<T> {
    pub zones: usize,
    pub regions: usize,
    pub inter_zone_capacity: T,
    pub inter_region_capacity: T,
    /// Probability of each non-tree zone pair getting an extra link.
    pub extra_edge_probability: f64,
}

/// Random connected topology: a random spanning tree plus extra links.
/// Zones are assigned to regions round-robin after a seeded shuffle; costs
/// are uniform in [0.2, 1.0].
pub fn generate_random<T: Scalar>(shape: &RandomTopology<T>, seed: u64) -> Result<Topology<T>, TopologyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = shape.zones;
    let region_count = shape.regions.clamp(1, n.max(1));
    let mut region_of: Vec<u32> = (0..n).map(|i| (i % region_count) as u32 + 1).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        region_of.swap(i, j);
    }
    let zones: Vec<Zone<T>> = (0..n)
        .map(|i| Zone {
            id: i as u32 + 1,
            region: region_of[i],
            storage_cost: T::lit(round3(rng.gen_range(0.2..=1.0))),
        })
        .collect();
    let link = |a: usize, b: usize| {
        let kind = if region_of[a] == region_of[b] { LinkKind::InterZone } else { LinkKind::InterRegion };
        let cap = match kind {
            LinkKind::InterZone => shape.inter_zone_capacity,
            LinkKind::InterRegion => shape.inter_region_capacity,
        };
        (a as u32 + 1, b as u32 + 1, cap, kind)
    };
    let mut present = BTreeSet::new();
    let mut links = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        present.insert((u, v));
        links.push(link(u, v));
    }
    for a in 0..n {
        for b in a + 1..n {
            if !present.contains(&(a, b)) && rng.gen_bool(shape.extra_edge_probability) {
                links.push(link(a, b));
            }
        }
    }
    let regions = (1..=region_count as u32).collect();
    Topology::new(regions, zones, links)
}
