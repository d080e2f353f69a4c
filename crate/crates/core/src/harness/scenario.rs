use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::model::DemandMatrix;
use crate::scalar::Scalar;
use crate::topology::Topology;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    /// Every zone requests content.
    Dense,
    /// A seeded subset of zones requests content.
    Sparse,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::Dense => "dense",
            ScenarioKind::Sparse => "sparse",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dense" => Ok(ScenarioKind::Dense),
            "sparse" => Ok(ScenarioKind::Sparse),
            _ => Err(format!("unknown scenario `{s}` (expected dense or sparse)")),
        }
    }
}

/// Demand generator settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub seed: u64,
    /// Inclusive range of requests per zone and content.
    pub demand_range: (u64, u64),
    /// Share of zones with demand in sparse scenarios.
    pub sparse_fraction: f64,
    pub contents: usize,
}

impl Scenario {
    pub fn new(kind: ScenarioKind, seed: u64) -> Self {
        Scenario { kind, seed, demand_range: (1, 5), sparse_fraction: 0.3, contents: 1 }
    }

    fn check(&self) -> Result<(), HarnessError> {
        let (lo, hi) = self.demand_range;
        if lo == 0 || lo > hi {
            return Err(HarnessError::Scenario(format!("demand range [{lo}, {hi}] must satisfy 1 <= lo <= hi")));
        }
        if !(self.sparse_fraction > 0.0 && self.sparse_fraction <= 1.0) {
            return Err(HarnessError::Scenario(format!("sparse fraction {} must be in (0, 1]", self.sparse_fraction)));
        }
        if self.contents == 0 {
            return Err(HarnessError::Scenario("catalog needs at least one content".into()));
        }
        Ok(())
    }
}

/// Number of zones with demand in a sparse scenario.
pub fn sparse_zone_count(zones: usize, fraction: f64) -> usize {
    ((fraction * zones as f64) - 1e-9).ceil().clamp(1.0, zones as f64) as usize
}

/// Seeded demand matrix for a scenario.
pub fn gen_scenario<T: Scalar>(topology: &Topology<T>, scenario: &Scenario) -> Result<DemandMatrix, HarnessError> {
    scenario.check()?;
    let zones = topology.zone_count();
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let active: Vec<usize> = match scenario.kind {
        ScenarioKind::Dense => (0..zones).collect(),
        ScenarioKind::Sparse => {
            let mut picked = sample(&mut rng, zones, sparse_zone_count(zones, scenario.sparse_fraction)).into_vec();
            picked.sort_unstable();
            picked
        }
    };
    let (lo, hi) = scenario.demand_range;
    let mut demand = DemandMatrix::zeros(zones, scenario.contents);
    for m in active {
        for k in 0..scenario.contents {
            demand.set(m, k, rng.gen_range(lo..=hi));
        }
    }
    Ok(demand)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::amazon_na_fixture;

    #[test]
    fn dense_covers_every_zone() {
        let topo = amazon_na_fixture::<f64>();
        let d = gen_scenario(&topo, &Scenario::new(ScenarioKind::Dense, 7)).unwrap();
        assert!((0..11).all(|m| (1..=5).contains(&d.get(m, 0))));
        assert_eq!(d, gen_scenario(&topo, &Scenario::new(ScenarioKind::Dense, 7)).unwrap());
    }

    #[test]
    fn sparse_picks_ceil_fraction() {
        let topo = amazon_na_fixture::<f64>();
        let d = gen_scenario(&topo, &Scenario::new(ScenarioKind::Sparse, 3)).unwrap();
        assert_eq!((0..11).filter(|&m| d.get(m, 0) > 0).count(), 4);
        assert_eq!(sparse_zone_count(10, 0.3), 3);
    }

    #[test]
    fn bad_range_rejected() {
        let topo = amazon_na_fixture::<f64>();
        let s = Scenario { demand_range: (0, 3), ..Scenario::new(ScenarioKind::Dense, 1) };
        assert!(gen_scenario(&topo, &s).is_err());
    }
}
