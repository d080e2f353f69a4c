mod common;

use cdnplace::heuristics::{place, priorities, surrogate_order, surrogate_ranking, PriorityKind};
use cdnplace::model::{validate, DemandMatrix, Instance, SlaMode};
use cdnplace::topology::{
    build_bandwidth_cost_lut, build_latency_lut, generate_random, is_sorted, DelayParams, Edge, LinkKind, LinkModel,
    RandomTopology, Tariff, Topology,
};
use proptest::prelude::*;

use common::random_instance;

fn rescaled(inst: &Instance<f64>, factor: u64) -> Instance<f64> {
    Instance::build(inst.topology().clone(), &LinkModel::default(), inst.demand.scaled(factor), inst.params.clone())
        .unwrap()
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn priority_order_ignores_demand_scale(seed in 0u64..10_000, zones in 3usize..10, factor in 2u64..50) {
        let inst = random_instance(seed, zones, 1);
        let big = rescaled(&inst, factor);
        for kind in PriorityKind::ALL {
            prop_assert_eq!(surrogate_ranking(&inst, kind), surrogate_ranking(&big, kind));
            prop_assert_eq!(surrogate_order(&priorities(&inst, kind)), surrogate_order(&priorities(&big, kind)));
        }
    }

    #[test]
    fn placement_is_deterministic(seed in 0u64..10_000, zones in 2usize..10, contents in 1usize..3) {
        let inst = random_instance(seed, zones, contents);
        for kind in PriorityKind::ALL {
            let a = place(&inst, kind).unwrap();
            let b = place(&inst, kind).unwrap();
            prop_assert_eq!(&a.config, &b.config);
            prop_assert_eq!(a.report.total.to_bits(), b.report.total.to_bits());
        }
    }

    #[test]
    fn placement_meets_demand_exactly(seed in 0u64..10_000, zones in 2usize..11, contents in 1usize..3) {
        let inst = random_instance(seed, zones, contents);
        for kind in PriorityKind::ALL {
            let out = place(&inst, kind).unwrap();
            let mut served = DemandMatrix::zeros(zones, contents);
            for f in &out.config.flows {
                prop_assert!(out.config.placed(f.key.provider, f.content));
                prop_assert_eq!(f.amount.fract(), 0.0);
                let n = f.key.consumer;
                served.set(n, f.content, served.get(n, f.content) + f.amount as u64);
            }
            prop_assert_eq!(&served, &inst.demand);
            let mode = if kind == PriorityKind::Wsna { SlaMode::Strict } else { SlaMode::Lenient };
            let bad = validate(&inst, &out.config, mode);
            prop_assert!(bad.is_empty(), "{} {:?}", kind, bad);
        }
    }

    #[test]
    fn providers_grow_along_the_ranking(seed in 0u64..10_000, zones in 2usize..11, contents in 1usize..3) {
        let inst = random_instance(seed, zones, contents);
        let ceiling = inst.all_surrogates_cost();
        for kind in PriorityKind::ALL {
            let ranking = surrogate_ranking(&inst, kind);
            let out = place(&inst, kind).unwrap();
            prop_assert!(out.report.storage <= ceiling + 1e-12);
            for (k, providers) in out.providers.iter().enumerate() {
                prop_assert_eq!(providers.as_slice(), &ranking[..providers.len()]);
                let hosted: Vec<usize> = out.config.providers(k).collect();
                let mut sorted = providers.clone();
                sorted.sort_unstable();
                prop_assert_eq!(hosted, sorted);
            }
            if kind == PriorityKind::Wsna && !out.best_effort {
                prop_assert!(out.report.sla_met);
            }
        }
    }

    #[test]
    fn latency_lut_is_monotone(cap_slots in 1usize..40, base in 0.5f64..50.0, queue in 0.0f64..400.0) {
        let edge = Edge { from: 0, to: 1, capacity: cap_slots as f64 * 10.0, kind: LinkKind::InterZone };
        let lut = build_latency_lut(&edge, &DelayParams { base_ms: base, queue_ms: queue }, 10.0, 1000.0).unwrap();
        prop_assert_eq!(lut.values.len(), cap_slots + 1);
        prop_assert_eq!(lut.values[0], base);
        prop_assert_eq!(lut.values[cap_slots], 1000.0);
        prop_assert!(lut.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn cost_lut_is_monotone_and_concave(cap_slots in 1usize..40, split in 0.1f64..0.9, high in 1e-4f64..1.0, ratio in 0.1f64..0.9) {
        let edge = Edge { from: 0, to: 1, capacity: cap_slots as f64 * 10.0, kind: LinkKind::InterRegion };
        let tariff = Tariff { tiers: vec![(split, high), (1.0, high * ratio)] };
        let lut = build_bandwidth_cost_lut(&edge, &tariff, 10.0).unwrap();
        prop_assert_eq!(lut.values[0], 0.0);
        let steps: Vec<f64> = lut.values.windows(2).map(|w| w[1] - w[0]).collect();
        prop_assert!(steps.iter().all(|&s| s > 0.0));
        prop_assert!(steps.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn candidate_paths_are_sorted_simple_and_distinct(seed in 0u64..10_000, zones in 2usize..9, k in 1usize..5) {
        let shape = RandomTopology {
            zones,
            regions: 2,
            inter_zone_capacity: 1000.0,
            inter_region_capacity: 100.0,
            extra_edge_probability: 0.5,
        };
        let topo: Topology<f64> = generate_random(&shape, seed).unwrap();
        let net = cdnplace::topology::Network::build(topo, &LinkModel::default(), 10.0, 1000.0).unwrap();
        let paths = net.enumerate_paths(k);
        for a in 0..zones {
            for b in 0..zones {
                let list = paths.paths(a, b);
                prop_assert!(!list.is_empty() && list.len() <= k);
                prop_assert!(is_sorted(list));
                for (i, p) in list.iter().enumerate() {
                    prop_assert_eq!(p.zones.first(), Some(&a));
                    prop_assert_eq!(p.zones.last(), Some(&b));
                    let mut seen = p.zones.clone();
                    seen.sort_unstable();
                    seen.dedup();
                    prop_assert_eq!(seen.len(), p.zones.len());
                    prop_assert!(list[..i].iter().all(|q| q.zones != p.zones));
                }
            }
        }
    }

    #[test]
    fn topology_text_round_trips(seed in 0u64..10_000, zones in 1usize..12) {
        let shape = RandomTopology {
            zones,
            regions: 3,
            inter_zone_capacity: 1000.0,
            inter_region_capacity: 100.0,
            extra_edge_probability: 0.3,
        };
        let topo: Topology<f64> = generate_random(&shape, seed).unwrap();
        prop_assert_eq!(Topology::parse(&topo.to_text()).unwrap(), topo);
    }
}

#[test]
fn single_precision_runs_end_to_end() {
    let topo = cdnplace::topology::amazon_na_fixture::<f32>();
    let demand = DemandMatrix::single(&[2, 1, 3, 1, 2, 4, 1, 1, 2, 3, 1]);
    let params = cdnplace::ParamsF32 { access_rate: 40.0, ..Default::default() };
    let inst = Instance::build(topo, &LinkModel::default(), demand, params).unwrap();
    for kind in PriorityKind::ALL {
        let out = place(&inst, kind).unwrap();
        let mode = if kind == PriorityKind::Wsna { SlaMode::Strict } else { SlaMode::Lenient };
        assert!(validate(&inst, &out.config, mode).is_empty(), "{kind}");
    }
}
