use std::fmt::Write as _;

use super::ModelError;
use crate::scalar::Scalar;
use crate::topology::{PathKey, Topology};

/// Requests of one content delivered on one path, `y_{m,n,x,k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Flow<T> {
    pub key: PathKey,
    pub content: usize,
    /// Request units.
    pub amount: T,
}

/// Placement bits plus flow assignments. Loads, delays and flags are derived
/// by [`super::evaluate`].
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration<T> {
    zones: usize,
    contents: usize,
    placement: Vec<bool>,
    pub flows: Vec<Flow<T>>,
}

impl<T: Scalar> Configuration<T> {
    pub fn empty(zones: usize, contents: usize) -> Self {
        Configuration { zones, contents, placement: vec![false; zones * contents], flows: Vec::new() }
    }

    /// Every zone stores every content and serves itself.
    pub fn all_surrogates(demand: &super::DemandMatrix) -> Self {
        let mut cfg = Self::empty(demand.zone_count(), demand.content_count());
        for m in 0..demand.zone_count() {
            for k in 0..demand.content_count() {
                cfg.set_placed(m, k, true);
                let r = demand.get(m, k);
                if r > 0 {
                    cfg.flows.push(Flow {
                        key: PathKey { provider: m, consumer: m, index: 0 },
                        content: k,
                        amount: T::from_units(r),
                    });
                }
            }
        }
        cfg
    }

    pub fn zone_count(&self) -> usize {
        self.zones
    }

    pub fn content_count(&self) -> usize {
        self.contents
    }

    pub fn placed(&self, zone: usize, content: usize) -> bool {
        self.placement[zone * self.contents + content]
    }

    pub fn set_placed(&mut self, zone: usize, content: usize, on: bool) {
        self.placement[zone * self.contents + content] = on;
    }

    pub fn providers(&self, content: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.zones).filter(move |&m| self.placed(m, content))
    }

    /// Zones hosting at least one content.
    pub fn provider_count(&self) -> usize {
        (0..self.zones).filter(|&m| (0..self.contents).any(|k| self.placed(m, k))).count()
    }

    pub fn placement_count(&self) -> usize {
        self.placement.iter().filter(|&&b| b).count()
    }

    /// Flows sorted by key and content, with duplicate tuples merged.
    pub fn canonical(&self) -> Self {
        let mut flows = self.flows.clone();
        flows.sort_by(|a, b| a.key.cmp(&b.key).then(a.content.cmp(&b.content)));
        let mut merged: Vec<Flow<T>> = Vec::with_capacity(flows.len());
        for f in flows {
            match merged.last_mut() {
                Some(last) if last.key == f.key && last.content == f.content => last.amount = last.amount + f.amount,
                _ => merged.push(f),
            }
        }
        Configuration { flows: merged, ..self.clone() }
    }

    /// Rows `x,m,k` and `y,m,n,x,k,amount`, with external zone ids and
    /// 1-based path and content indices.
    pub fn to_csv(&self, topo: &Topology<T>) -> String {
        let mut out = String::from("# x,zone,content | y,provider,consumer,path,content,amount\n");
        let id = |m: usize| topo.zones()[m].id;
        for m in 0..self.zones {
            for k in 0..self.contents {
                if self.placed(m, k) {
                    let _ = writeln!(out, "x,{},{}", id(m), k + 1);
                }
            }
        }
        for f in &self.canonical().flows {
            let _ = writeln!(
                out,
                "y,{},{},{},{},{}",
                id(f.key.provider),
                id(f.key.consumer),
                f.key.index + 1,
                f.content + 1,
                f.amount
            );
        }
        out
    }

    pub fn from_csv(text: &str, topo: &Topology<T>, contents: usize) -> Result<Self, ModelError> {
        let mut cfg = Self::empty(topo.zone_count(), contents);
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        for (i, rec) in reader.records().enumerate() {
            let line = i + 1;
            let rec = rec.map_err(|e| ModelError::Parse { line, msg: e.to_string() })?;
            let err = |msg: String| ModelError::Parse { line, msg };
            let int = |idx: usize| -> Result<usize, ModelError> {
                rec.get(idx)
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| err(format!("field {} is not an integer", idx + 1)))
            };
            let zone = |idx: usize| -> Result<usize, ModelError> {
                let v = int(idx)?;
                topo.index_of(v as u32).ok_or_else(|| err(format!("unknown zone {v}")))
            };
            let one_based = |idx: usize| -> Result<usize, ModelError> {
                int(idx)?.checked_sub(1).ok_or_else(|| err("indices start at 1".into()))
            };
            match (rec.get(0), rec.len()) {
                (Some("x"), 3) => {
                    let k = one_based(2)?;
                    if k >= contents {
                        return Err(err(format!("content {} outside catalog", k + 1)));
                    }
                    cfg.set_placed(zone(1)?, k, true);
                }
                (Some("y"), 6) => {
                    let amount = rec
                        .get(5)
                        .and_then(|s| s.parse::<f64>().ok())
                        .ok_or_else(|| err("amount is not a number".into()))?;
                    cfg.flows.push(Flow {
                        key: PathKey { provider: zone(1)?, consumer: zone(2)?, index: one_based(3)? },
                        content: one_based(4)?,
                        amount: T::lit(amount),
                    });
                }
                _ => return Err(err("expected `x,m,k` or `y,m,n,x,k,amount`".into())),
            }
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::amazon_na_fixture;

    #[test]
    fn csv_round_trip() {
        let topo = amazon_na_fixture::<f64>();
        let mut cfg = Configuration::<f64>::empty(11, 1);
        cfg.set_placed(0, 0, true);
        cfg.flows.push(Flow { key: PathKey { provider: 0, consumer: 5, index: 1 }, content: 0, amount: 2.0 });
        cfg.flows.push(Flow { key: PathKey { provider: 0, consumer: 0, index: 0 }, content: 0, amount: 3.0 });
        let back = Configuration::from_csv(&cfg.to_csv(&topo), &topo, 1).unwrap();
        assert_eq!(back, cfg.canonical());
    }

    #[test]
    fn canonical_merges_duplicates() {
        let mut cfg = Configuration::<f64>::empty(2, 1);
        let key = PathKey { provider: 0, consumer: 1, index: 0 };
        cfg.flows.push(Flow { key, content: 0, amount: 1.0 });
        cfg.flows.push(Flow { key, content: 0, amount: 2.0 });
        let c = cfg.canonical();
        assert_eq!(c.flows.len(), 1);
        assert_eq!(c.flows[0].amount, 3.0);
    }

    #[test]
    fn malformed_rows_rejected() {
        let topo = amazon_na_fixture::<f64>();
        assert!(Configuration::<f64>::from_csv("x,1\n", &topo, 1).is_err());
        assert!(Configuration::<f64>::from_csv("x,1,2\n", &topo, 1).is_err());
        assert!(Configuration::<f64>::from_csv("y,1,2,0,1,3\n", &topo, 1).is_err());
    }
}
