//! Scenario generation, experiment sweeps and plot-data emission.

mod experiment;
mod plot;
mod scenario;

pub use experiment::{rows_from_csv, rows_to_csv, run_experiment, runtime_csv, ExperimentRow};
pub use plot::{emit_plotdata, Axis, PlotFilter};
pub use scenario::{gen_scenario, sparse_zone_count, Scenario, ScenarioKind};

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::heuristics::PriorityKind;
use crate::model::{ModelError, Params};
use crate::scalar::Scalar;
use crate::topology::LinkModel;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("plot data: {0}")]
    Plot(String),
    #[error("settings: {0}")]
    Settings(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Experiment settings, loadable from TOML. Every field has a default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(serialize = "T: Serialize", deserialize = "T: Scalar"))]
pub struct Settings<T> {
    pub params: Params<T>,
    pub links: LinkModel<T>,
    pub inter_region_capacity: T,
    pub inter_zone_capacity: T,
    pub seed: u64,
    pub scenarios: Vec<ScenarioKind>,
    pub rates: Vec<T>,
    pub kinds: Vec<PriorityKind>,
    pub demand_range: (u64, u64),
    pub sparse_fraction: f64,
    pub contents: usize,
}

impl<T: Scalar> Default for Settings<T> {
    fn default() -> Self {
        Settings {
            params: Params::default(),
            links: LinkModel::default(),
            inter_region_capacity: T::lit(100.0),
            inter_zone_capacity: T::lit(1000.0),
            seed: 1,
            scenarios: vec![ScenarioKind::Dense, ScenarioKind::Sparse],
            rates: (1..=10).map(|i| T::lit(10.0 * i as f64)).collect(),
            kinds: PriorityKind::ALL.to_vec(),
            demand_range: (1, 5),
            sparse_fraction: 0.3,
            contents: 1,
        }
    }
}

impl<T: Scalar> Settings<T> {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let settings: Self = toml::from_str(text).map_err(|e| HarnessError::Settings(e.to_string()))?;
        settings.params.check()?;
        Ok(settings)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("settings serialize")
    }

    pub fn scenario(&self, kind: ScenarioKind) -> Scenario {
        Scenario {
            kind,
            seed: self.seed,
            demand_range: self.demand_range,
            sparse_fraction: self.sparse_fraction,
            contents: self.contents,
        }
    }

    pub fn scenario_list(&self) -> Vec<Scenario> {
        self.scenarios.iter().map(|&k| self.scenario(k)).collect()
    }
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), HarnessError> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|source| HarnessError::Io { path: path.display().to_string(), source })
}

/// Writes `results.csv`, `runtime.csv` and one `plot_<axis>_<scenario>.csv`
/// per panel, plus degree panels at the lowest and highest rate.
pub fn write_outputs(dir: &Path, rows: &[ExperimentRow]) -> Result<Vec<String>, HarnessError> {
    fs::create_dir_all(dir).map_err(|source| HarnessError::Io { path: dir.display().to_string(), source })?;
    let mut written = vec!["results.csv".to_string(), "runtime.csv".to_string()];
    write(dir, "results.csv", &rows_to_csv(rows))?;
    write(dir, "runtime.csv", &runtime_csv(rows))?;
    let mut scenarios: Vec<ScenarioKind> = rows.iter().map(|r| r.scenario).collect();
    scenarios.sort();
    scenarios.dedup();
    for scenario in scenarios {
        let ok: Vec<f64> = rows.iter().filter(|r| r.scenario == scenario && r.is_ok()).map(|r| r.rate).collect();
        if ok.is_empty() {
            continue;
        }
        for axis in Axis::ALL {
            let filter = PlotFilter { scenario: Some(scenario), rate: None };
            let name = format!("plot_{}_{}.csv", axis.as_str(), scenario);
            write(dir, &name, &emit_plotdata(rows, axis, &filter)?)?;
            written.push(name);
        }
        let low = ok.iter().copied().fold(f64::INFINITY, f64::min);
        let high = ok.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (tag, rate) in [("low", low), ("high", high)] {
            let filter = PlotFilter { scenario: Some(scenario), rate: Some(rate) };
            let name = format!("plot_degree_{scenario}_{tag}.csv");
            write(dir, &name, &emit_plotdata(rows, Axis::Degree, &filter)?)?;
            written.push(name);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let s = Settings::<f64>::default();
        assert_eq!(s.params.qos_ms, 100.0);
        assert_eq!(s.params.sla_pct, 98.0);
        assert_eq!(s.params.server_ms, 10.0);
        assert_eq!(s.params.isp_ms, 10.0);
        assert_eq!(Settings::<f64>::from_toml(&s.to_toml()).unwrap(), s);
    }

    #[test]
    fn partial_toml_keeps_defaults() {
        let s = Settings::<f64>::from_toml("seed = 9\n[params]\nqos_ms = 80.0\n").unwrap();
        assert_eq!(s.seed, 9);
        assert_eq!(s.params.qos_ms, 80.0);
        assert_eq!(s.params.sla_pct, 98.0);
        assert!(Settings::<f64>::from_toml("bogus = 1\n").is_err());
    }
}
