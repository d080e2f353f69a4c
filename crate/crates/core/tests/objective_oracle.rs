//! Recomputes the objective of heuristic and oracle configurations straight
//! from the link formulas, without the lookup tables or the evaluator.

mod common;

use cdnplace::heuristics::{place, PriorityKind};
use cdnplace::model::{evaluate, Configuration, Instance, SlaMode};
use cdnplace::oracle::{exact_optimal, OracleLimits};
use cdnplace::topology::{amazon_na_fixture, LinkKind, LinkModel, Network};

use common::{cheap_links, random_instance, tiny_instance};

struct Recomputed {
    storage: f64,
    bandwidth: f64,
    degree: f64,
    used: usize,
    violating: usize,
}

fn tariff_cost(tiers: &[(f64, f64)], load: f64, capacity: f64) -> f64 {
    let mut cost = 0.0;
    let mut from = 0.0;
    for &(bound, price) in tiers {
        let to = bound * capacity;
        cost += price * (load.min(to) - from).max(0.0);
        from = to;
    }
    cost
}

fn recompute(inst: &Instance<f64>, links: &LinkModel<f64>, cfg: &Configuration<f64>) -> Recomputed {
    let topo = inst.topology();
    let p = &inst.params;
    let mu = p.mu;
    let mut storage = 0.0;
    for m in 0..inst.zone_count() {
        for k in 0..inst.content_count() {
            if cfg.placed(m, k) {
                storage += topo.zones()[m].storage_cost;
            }
        }
    }
    // Mbps per ordered zone pair
    let n = inst.zone_count();
    let mut load = vec![vec![0.0; n]; n];
    let mut usage = std::collections::BTreeMap::new();
    for f in &cfg.flows {
        let path = inst.paths.get(f.key).unwrap();
        for hop in path.zones.windows(2) {
            load[hop[0]][hop[1]] += f.amount * p.access_rate;
        }
        *usage.entry(f.key).or_insert(0.0) += f.amount;
    }
    let slots = |l: f64| (l / mu - 1e-9).ceil().max(0.0) * mu;
    let mut bandwidth = 0.0;
    for e in topo.edges() {
        let tiers: Vec<(f64, f64)> = links.tariff(e.kind).tiers.clone();
        bandwidth += tariff_cost(&tiers, slots(load[e.from][e.to]), e.capacity);
    }
    let delay = |a: usize, b: usize| {
        let e = &topo.edges()[topo.edge_between(a, b).unwrap()];
        let d = links.delay(e.kind);
        let rho = slots(load[a][b] + load[b][a]) / e.capacity;
        if rho >= 1.0 {
            p.latency_bound
        } else {
            (d.base_ms + d.queue_ms * rho / (1.0 - rho)).min(p.latency_bound)
        }
    };
    let (mut degree, mut used, mut violating) = (0.0, 0, 0);
    for (&key, &amount) in &usage {
        if amount <= 0.0 {
            continue;
        }
        used += 1;
        let path = inst.paths.get(key).unwrap();
        let gamma: f64 = path.zones.windows(2).map(|h| delay(h[0], h[1])).sum();
        if gamma + p.server_ms + p.isp_ms > p.qos_ms {
            violating += 1;
            degree += gamma / p.latency_bound;
        }
    }
    Recomputed { storage, bandwidth, degree, used, violating }
}

fn assert_matches(inst: &Instance<f64>, links: &LinkModel<f64>, cfg: &Configuration<f64>, label: &str) {
    let want = recompute(inst, links, cfg);
    let got = evaluate(inst, cfg).unwrap().report;
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(1.0);
    assert!(close(got.storage, want.storage), "{label}: storage {} vs {}", got.storage, want.storage);
    assert!(close(got.bandwidth, want.bandwidth), "{label}: bandwidth {} vs {}", got.bandwidth, want.bandwidth);
    assert!(close(got.violation_degree, want.degree), "{label}: degree {} vs {}", got.violation_degree, want.degree);
    assert_eq!((got.used_paths, got.violating_paths), (want.used, want.violating), "{label}");
    let total = want.storage + want.bandwidth + want.degree;
    assert!(close(got.total, total), "{label}: total {} vs {total}", got.total);
}

#[test]
fn heuristic_configurations_match_the_formulas() {
    let links = LinkModel::default();
    for seed in 0..60u64 {
        let inst = random_instance(seed, 4 + (seed as usize % 8), 1 + (seed as usize % 2));
        for kind in PriorityKind::ALL {
            let out = place(&inst, kind).unwrap();
            assert_matches(&inst, &links, &out.config, &format!("seed {seed} {kind}"));
        }
    }
}

#[test]
fn oracle_configurations_match_the_formulas() {
    for seed in 0..25u64 {
        let inst = tiny_instance(seed);
        // tiny_instance picks one of two link models; recover which one
        let links = [LinkModel::default(), cheap_links()]
            .into_iter()
            .find(|l| {
                let net = Network::build(inst.topology().clone(), l, inst.params.mu, inst.params.latency_bound).unwrap();
                net.cost == inst.network.cost
            })
            .unwrap();
        let sol = exact_optimal(&inst, &OracleLimits::default(), SlaMode::Lenient).unwrap();
        assert_matches(&inst, &links, &sol.config, &format!("tiny seed {seed}"));
    }
}

#[test]
fn cross_region_hop_adds_base_delays() {
    let topo = amazon_na_fixture::<f64>();
    let net = Network::build(topo, &LinkModel::default(), 10.0, 1000.0).unwrap();
    let paths = net.enumerate_paths(3);
    // zone 2 reaches zone 6 through gateway 1: one inter-zone and one inter-region hop
    let (a, b) = (net.topology.index_of(2).unwrap(), net.topology.index_of(6).unwrap());
    let best = &paths.paths(a, b)[0];
    assert_eq!(best.zones, vec![a, net.topology.index_of(1).unwrap(), b]);
    let kinds: Vec<LinkKind> = best.edges.iter().map(|&e| net.topology.edges()[e].kind).collect();
    assert_eq!(kinds, vec![LinkKind::InterZone, LinkKind::InterRegion]);
    assert_eq!(best.base_latency, 42.0);
    assert_eq!(paths.distance(a, b), 42.0);
}
