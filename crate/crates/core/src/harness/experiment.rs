use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{gen_scenario, HarnessError, Scenario, ScenarioKind};
use crate::heuristics::{place, PlacementOutcome, PriorityKind};
use crate::model::{CostReport, Instance, Params};
use crate::scalar::Scalar;
use crate::topology::{LinkModel, Topology};

/// One (scenario, rate, heuristic) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub scenario: ScenarioKind,
    pub seed: u64,
    pub rate: f64,
    pub kind: PriorityKind,
    /// `ok`, or the error that stopped the cell.
    pub status: String,
    pub storage: f64,
    pub bandwidth: f64,
    /// Storage plus bandwidth.
    pub total_cost: f64,
    /// Storage, bandwidth and violation degree.
    pub objective: f64,
    pub providers: usize,
    pub used_paths: usize,
    pub violating_paths: usize,
    pub sla_violation_rate: f64,
    pub request_violation_rate: f64,
    pub violation_degree: f64,
    /// Degree before the final pass; equals `violation_degree` for baselines.
    pub degree_before_pass: f64,
    pub storage_before_pass: f64,
    pub bandwidth_before_pass: f64,
    pub sla_met: bool,
    pub best_effort: bool,
    /// Mean and 95th percentile of perceived latency over used paths, ms.
    pub latency_mean: f64,
    pub latency_p95: f64,
    /// Mean perceived latency weighted by requests, ms.
    pub latency_mean_weighted: f64,
    /// Cost of hosting on every zone with self delivery.
    pub upper_bound: f64,
    #[serde(skip)]
    pub runtime_ms: f64,
}

impl ExperimentRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

fn latency_stats<T: Scalar>(report: &CostReport<T>) -> (f64, f64, f64) {
    if report.paths.is_empty() {
        return (0.0, 0.0, 0.0);
    }
    let mut lat: Vec<f64> = report.paths.iter().map(|p| p.perceived.as_f64()).collect();
    let mean = lat.iter().sum::<f64>() / lat.len() as f64;
    lat.sort_by(f64::total_cmp);
    let rank = ((0.95 * lat.len() as f64) - 1e-9).ceil().max(1.0) as usize;
    let p95 = lat[rank - 1];
    let carried: f64 = report.paths.iter().map(|p| p.amount.as_f64()).sum();
    let weighted = report.paths.iter().map(|p| p.perceived.as_f64() * p.amount.as_f64()).sum::<f64>() / carried;
    (mean, p95, weighted)
}

fn row_from<T: Scalar>(
    scenario: &Scenario,
    rate: T,
    kind: PriorityKind,
    upper_bound: T,
    outcome: Result<PlacementOutcome<T>, String>,
    runtime_ms: f64,
) -> ExperimentRow {
    let mut row = ExperimentRow {
        scenario: scenario.kind,
        seed: scenario.seed,
        rate: rate.as_f64(),
        kind,
        status: "ok".into(),
        storage: 0.0,
        bandwidth: 0.0,
        total_cost: 0.0,
        objective: 0.0,
        providers: 0,
        used_paths: 0,
        violating_paths: 0,
        sla_violation_rate: 0.0,
        request_violation_rate: 0.0,
        violation_degree: 0.0,
        degree_before_pass: 0.0,
        storage_before_pass: 0.0,
        bandwidth_before_pass: 0.0,
        sla_met: false,
        best_effort: false,
        latency_mean: 0.0,
        latency_p95: 0.0,
        latency_mean_weighted: 0.0,
        upper_bound: upper_bound.as_f64(),
        runtime_ms,
    };
    let out = match outcome {
        Ok(out) => out,
        Err(msg) => {
            row.status = msg;
            return row;
        }
    };
    let r = &out.report;
    let before = out.before_pass.as_ref().unwrap_or(r);
    let (mean, p95, weighted) = latency_stats(r);
    ExperimentRow {
        storage: r.storage.as_f64(),
        bandwidth: r.bandwidth.as_f64(),
        total_cost: r.resource_cost().as_f64(),
        objective: r.total.as_f64(),
        providers: out.config.provider_count(),
        used_paths: r.used_paths,
        violating_paths: r.violating_paths,
        sla_violation_rate: r.sla_violation_rate.as_f64(),
        request_violation_rate: r.request_violation_rate.as_f64(),
        violation_degree: r.violation_degree.as_f64(),
        degree_before_pass: before.violation_degree.as_f64(),
        storage_before_pass: before.storage.as_f64(),
        bandwidth_before_pass: before.bandwidth.as_f64(),
        sla_met: r.sla_met,
        best_effort: out.best_effort,
        latency_mean: mean,
        latency_p95: p95,
        latency_mean_weighted: weighted,
        ..row
    }
}

/// Runs every (scenario, rate, heuristic) cell. Cells run in parallel; the
/// rows come back in scenario, rate, heuristic order.
pub fn run_experiment<T: Scalar>(
    topology: &Topology<T>,
    links: &LinkModel<T>,
    params: &Params<T>,
    scenarios: &[Scenario],
    rates: &[T],
    kinds: &[PriorityKind],
) -> Result<Vec<ExperimentRow>, HarnessError> {
    if let Some(bad) = rates.iter().find(|r| !(**r > T::zero())) {
        return Err(HarnessError::Scenario(format!("access rate {bad} must be positive")));
    }
    let demands = scenarios.iter().map(|s| gen_scenario(topology, s)).collect::<Result<Vec<_>, _>>()?;
    let cells: Vec<(usize, T)> =
        (0..scenarios.len()).flat_map(|s| rates.iter().map(move |&r| (s, r))).collect();
    let rows = cells
        .par_iter()
        .flat_map_iter(|&(s, rate)| {
            let params = Params { access_rate: rate, ..params.clone() };
            let instance = Instance::build(topology.clone(), links, demands[s].clone(), params);
            kinds.iter().map(move |&kind| {
                let scenario = &scenarios[s];
                match &instance {
                    Ok(inst) => {
                        let start = Instant::now();
                        let outcome = place(inst, kind).map_err(|e| e.to_string());
                        let ms = start.elapsed().as_secs_f64() * 1e3;
                        row_from(scenario, rate, kind, inst.all_surrogates_cost(), outcome, ms)
                    }
                    Err(e) => row_from(scenario, rate, kind, T::zero(), Err(e.to_string()), 0.0),
                }
            })
            .collect::<Vec<_>>()
        })
        .collect();
    Ok(rows)
}

/// Results table; runtime is left out so reruns compare byte for byte.
pub fn rows_to_csv(rows: &[ExperimentRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
}

/// Reads a results table written by [`rows_to_csv`]; runtimes come back as 0.
pub fn rows_from_csv(text: &str) -> Result<Vec<ExperimentRow>, HarnessError> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<Vec<ExperimentRow>, _>>()
        .map_err(|e| HarnessError::Plot(format!("results table: {e}")))
}

/// Wall-clock runtime per cell.
pub fn runtime_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::from("scenario,seed,rate,kind,runtime_ms\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{},{:.3}\n", r.scenario, r.seed, r.rate, r.kind, r.runtime_ms));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::amazon_na_fixture;

    #[test]
    fn cell_count_and_order() {
        let topo = amazon_na_fixture::<f64>();
        let scenarios = [Scenario::new(ScenarioKind::Dense, 1), Scenario::new(ScenarioKind::Sparse, 1)];
        let rates = [10.0, 50.0];
        let kinds = PriorityKind::ALL;
        let rows = run_experiment(&topo, &LinkModel::default(), &Params::default(), &scenarios, &rates, &kinds).unwrap();
        assert_eq!(rows.len(), 12);
        assert_eq!(rows[3].rate, 50.0);
        assert_eq!(rows[6].scenario, ScenarioKind::Sparse);
        assert!(rows.iter().all(|r| r.is_ok() && r.total_cost <= r.upper_bound));
        let text = rows_to_csv(&rows);
        assert!(text.starts_with("scenario,seed,rate,kind,status,"));
        let back = rows_from_csv(&text).unwrap();
        assert_eq!(rows_to_csv(&back), text);
    }
}
