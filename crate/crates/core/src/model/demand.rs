use std::fmt::Write as _;

use super::ModelError;
use crate::scalar::Scalar;
use crate::topology::Topology;

/// Request counts `r[m][k]` per zone and content.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DemandMatrix {
    zones: usize,
    contents: usize,
    requests: Vec<u64>,
}

impl DemandMatrix {
    pub fn zeros(zones: usize, contents: usize) -> Self {
        DemandMatrix { zones, contents, requests: vec![0; zones * contents] }
    }

    /// Single-content demand from one count per zone.
    pub fn single(per_zone: &[u64]) -> Self {
        DemandMatrix { zones: per_zone.len(), contents: 1, requests: per_zone.to_vec() }
    }

    pub fn zone_count(&self) -> usize {
        self.zones
    }

    pub fn content_count(&self) -> usize {
        self.contents
    }

    pub fn get(&self, zone: usize, content: usize) -> u64 {
        self.requests[zone * self.contents + content]
    }

    pub fn set(&mut self, zone: usize, content: usize, requests: u64) {
        self.requests[zone * self.contents + content] = requests;
    }

    pub fn total(&self) -> u64 {
        self.requests.iter().sum()
    }

    pub fn zone_total(&self, zone: usize) -> u64 {
        (0..self.contents).map(|k| self.get(zone, k)).sum()
    }

    pub fn content_total(&self, content: usize) -> u64 {
        (0..self.zones).map(|m| self.get(m, content)).sum()
    }

    pub fn scaled(&self, factor: u64) -> Self {
        DemandMatrix { requests: self.requests.iter().map(|r| r * factor).collect(), ..self.clone() }
    }

    /// `zone,content,requests` rows with external zone ids and 1-based content.
    pub fn to_csv<T: Scalar>(&self, topo: &Topology<T>) -> String {
        let mut out = String::from("zone,content,requests\n");
        for m in 0..self.zones {
            for k in 0..self.contents {
                let _ = writeln!(out, "{},{},{}", topo.zones()[m].id, k + 1, self.get(m, k));
            }
        }
        out
    }

    pub fn from_csv<T: Scalar>(text: &str, topo: &Topology<T>) -> Result<Self, ModelError> {
        let mut rows = Vec::new();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        for (i, rec) in reader.records().enumerate() {
            let line = i + 1;
            let rec = rec.map_err(|e| ModelError::Parse { line, msg: e.to_string() })?;
            if rec.get(0) == Some("zone") {
                continue;
            }
            let parse = |idx: usize| -> Result<u64, ModelError> {
                rec.get(idx)
                    .and_then(|s| s.parse::<u64>().ok())
                    .ok_or_else(|| ModelError::Parse { line, msg: format!("field {} is not an integer", idx + 1) })
            };
            let zone = parse(0)?;
            let content = parse(1)?;
            let requests = parse(2)?;
            let m = topo
                .index_of(zone as u32)
                .ok_or_else(|| ModelError::Parse { line, msg: format!("unknown zone {zone}") })?;
            if content == 0 {
                return Err(ModelError::Parse { line, msg: "content ids start at 1".into() });
            }
            rows.push((m, content as usize - 1, requests));
        }
        let contents = rows.iter().map(|r| r.1 + 1).max().unwrap_or(1);
        let mut d = DemandMatrix::zeros(topo.zone_count(), contents);
        for (m, k, r) in rows {
            d.set(m, k, d.get(m, k) + r);
        }
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::amazon_na_fixture;

    #[test]
    fn csv_round_trip() {
        let topo = amazon_na_fixture::<f64>();
        let mut d = DemandMatrix::zeros(11, 2);
        d.set(0, 0, 3);
        d.set(10, 1, 5);
        let back = DemandMatrix::from_csv(&d.to_csv(&topo), &topo).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.total(), 8);
        assert_eq!(back.zone_total(10), 5);
    }

    #[test]
    fn unknown_zone_rejected() {
        let topo = amazon_na_fixture::<f64>();
        assert!(DemandMatrix::from_csv("99,1,3\n", &topo).is_err());
    }
}
