use std::fmt::Write as _;
use std::str::FromStr;

use super::{ExperimentRow, HarnessError, ScenarioKind};
use crate::heuristics::PriorityKind;

/// Metric plotted against the access rate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Cost,
    Providers,
    Latency,
    Sla,
    Degree,
}

impl Axis {
    pub const ALL: [Axis; 5] = [Axis::Cost, Axis::Providers, Axis::Latency, Axis::Sla, Axis::Degree];

    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Cost => "cost",
            Axis::Providers => "providers",
            Axis::Latency => "latency",
            Axis::Sla => "sla",
            Axis::Degree => "degree",
        }
    }

    fn value(self, row: &ExperimentRow) -> f64 {
        match self {
            Axis::Cost => row.total_cost,
            Axis::Providers => row.providers as f64,
            Axis::Latency => row.latency_mean,
            Axis::Sla => row.sla_violation_rate,
            Axis::Degree => row.violation_degree,
        }
    }
}

impl FromStr for Axis {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Axis::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| HarnessError::Plot(format!("unknown axis `{s}` (expected cost, providers, latency, sla or degree)")))
    }
}

/// Which rows feed a panel.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PlotFilter {
    pub scenario: Option<ScenarioKind>,
    pub rate: Option<f64>,
}

impl PlotFilter {
    fn keep(&self, row: &ExperimentRow) -> bool {
        self.scenario.is_none_or(|s| s == row.scenario) && self.rate.is_none_or(|r| r == row.rate) && row.is_ok()
    }
}

/// CSV with columns `rate,GS,WSNA,SNA`, one line per access rate. When several
/// seeds match, values are averaged.
pub fn emit_plotdata(rows: &[ExperimentRow], axis: Axis, filter: &PlotFilter) -> Result<String, HarnessError> {
    let kept: Vec<&ExperimentRow> = rows.iter().filter(|r| filter.keep(r)).collect();
    if kept.is_empty() {
        return Err(HarnessError::Plot(format!("no successful rows match the {} panel filter", axis.as_str())));
    }
    let mut rates: Vec<f64> = kept.iter().map(|r| r.rate).collect();
    rates.sort_by(f64::total_cmp);
    rates.dedup();
    let mut out = String::from("rate");
    for kind in PriorityKind::ALL {
        let _ = write!(out, ",{kind}");
    }
    out.push('\n');
    for rate in rates {
        let _ = write!(out, "{rate}");
        for kind in PriorityKind::ALL {
            let values: Vec<f64> =
                kept.iter().filter(|r| r.rate == rate && r.kind == kind).map(|r| axis.value(r)).collect();
            if values.is_empty() {
                out.push(',');
            } else {
                let _ = write!(out, ",{}", values.iter().sum::<f64>() / values.len() as f64);
            }
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_axis_rejected() {
        assert!("colour".parse::<Axis>().is_err());
        assert_eq!("sla".parse::<Axis>().unwrap(), Axis::Sla);
    }

    #[test]
    fn empty_match_is_an_error() {
        assert!(emit_plotdata(&[], Axis::Cost, &PlotFilter::default()).is_err());
    }
}
