#![allow(dead_code)]

use cdnplace::harness::{run_experiment, ExperimentRow, Settings};
use cdnplace::model::{DemandMatrix, Instance, Params};
use cdnplace::topology::{amazon_na_fixture, generate_random, LinkModel, RandomTopology};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random connected instance with `zones` zones and `contents` contents,
/// demands in 0..=5 with at least one positive entry.
pub fn random_instance(seed: u64, zones: usize, contents: usize) -> Instance<f64> {
    random_instance_with(seed, zones, contents, Params::default())
}

/// As [`random_instance`], with `base` supplying every parameter but the rate.
pub fn random_instance_with(seed: u64, zones: usize, contents: usize, base: Params<f64>) -> Instance<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let shape = RandomTopology {
        zones,
        regions: rng.gen_range(1..=3),
        inter_zone_capacity: 1000.0,
        inter_region_capacity: 100.0,
        extra_edge_probability: 0.3,
    };
    let topo = generate_random(&shape, seed).unwrap();
    let mut demand = DemandMatrix::zeros(zones, contents);
    for n in 0..zones {
        for k in 0..contents {
            demand.set(n, k, rng.gen_range(0..=5));
        }
    }
    if demand.total() == 0 {
        demand.set(0, 0, 1);
    }
    let rate = [10.0, 30.0, 60.0, 100.0][rng.gen_range(0..4)];
    let params = Params { access_rate: rate, ..base };
    Instance::build(topo, &LinkModel::default(), demand, params).unwrap()
}

/// Instance small enough for the exhaustive oracle: 2 to 5 zones, one
/// content, per-zone demand at most 3 and total at most 6, two paths per pair.
/// Link capacities are tight so routing choices matter.
pub fn tiny_instance(seed: u64) -> Instance<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9) + 7);
    let zones = rng.gen_range(2..=5);
    let shape = RandomTopology {
        zones,
        regions: rng.gen_range(1..=2),
        inter_zone_capacity: [30.0, 50.0, 1000.0][rng.gen_range(0..3)],
        inter_region_capacity: [20.0, 30.0, 100.0][rng.gen_range(0..3)],
        extra_edge_probability: 0.4,
    };
    let topo = generate_random(&shape, seed).unwrap();
    let mut demand = vec![0u64; zones];
    let mut left = 6u64;
    for d in demand.iter_mut() {
        *d = rng.gen_range(0..=3u64.min(left));
        left -= *d;
    }
    if demand.iter().all(|&d| d == 0) {
        demand[zones - 1] = 1;
    }
    let links = if rng.gen_bool(0.5) { LinkModel::default() } else { cheap_links() };
    let params = Params { access_rate: 10.0, k_paths: 2, ..Params::default() };
    Instance::build(topo, &links, DemandMatrix::single(&demand), params).unwrap()
}

/// Link model with tariffs a hundred times lower than the default, so that
/// remote delivery competes with local storage.
pub fn cheap_links() -> LinkModel<f64> {
    let mut links = LinkModel::default();
    for tariff in [&mut links.inter_zone_tariff, &mut links.inter_region_tariff] {
        for tier in tariff.tiers.iter_mut() {
            tier.1 /= 100.0;
        }
    }
    links
}

/// The default experiment grid on the North America topology.
pub fn default_grid(seed: u64) -> Vec<ExperimentRow> {
    let settings = Settings::<f64> { seed, ..Settings::default() };
    run_experiment(
        &amazon_na_fixture(),
        &settings.links,
        &settings.params,
        &settings.scenario_list(),
        &settings.rates,
        &settings.kinds,
    )
    .unwrap()
}
