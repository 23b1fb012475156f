//! Published measured/predicted tables and quoted summary values.
//!
//! Shipped as CSV under `data/`; every row is in `|g1 p1 g2 p2>` order.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::counts::CountsTable;
use crate::error::{Error, Result};
use crate::protocol::{ExperimentId, ExperimentSpec};

pub const REFERENCE_TABLES_V1: &str = include_str!("../data/reference_tables_v1.csv");
pub const QUOTED_VALUES_V1: &str = include_str!("../data/quoted_values_v1.csv");

/// Table id of the per-run breakdown.
pub const GROUP_TABLE: &str = "VI";

/// Summary numbers quoted alongside a table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuotedValues {
    pub experiment: ExperimentId,
    pub fidelity: f64,
    pub observable: String,
    pub measured: Vec<f64>,
    pub ideal: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceDataset {
    /// `(table, row)` → counts, e.g. `("I", "measured")` or `("VI", "IVb")`.
    rows: BTreeMap<(String, String), CountsTable>,
    quoted: BTreeMap<ExperimentId, QuotedValues>,
}

fn parse_tuple(s: &str) -> Result<Vec<f64>> {
    s.split_whitespace()
        .map(|x| {
            x.parse::<f64>()
                .map_err(|e| Error::Reference(format!("bad number '{x}': {e}")))
        })
        .collect()
}

impl ReferenceDataset {
    /// The dataset compiled into the library.
    pub fn embedded() -> Self {
        Self::parse(REFERENCE_TABLES_V1, QUOTED_VALUES_V1).expect("embedded reference data parses")
    }

    pub fn parse(tables_csv: &str, quoted_csv: &str) -> Result<Self> {
        let err = |e: csv::Error| Error::Reference(e.to_string());
        let mut rows = BTreeMap::new();
        let mut rdr = csv::Reader::from_reader(tables_csv.as_bytes());
        let headers = rdr.headers().map_err(err)?.clone();
        if headers.len() < 4 || &headers[0] != "table" || &headers[1] != "row" {
            return Err(Error::Reference("expected 'table,row,<bins>' header".into()));
        }
        for rec in rdr.records() {
            let rec = rec.map_err(err)?;
            let bins: Vec<u64> = rec
                .iter()
                .skip(2)
                .map(|x| {
                    x.trim()
                        .parse::<u64>()
                        .map_err(|e| Error::Reference(format!("bad count '{x}': {e}")))
                })
                .collect::<Result<_>>()?;
            let key = (rec[0].to_string(), rec[1].to_string());
            if rows.insert(key.clone(), CountsTable::new(bins)?).is_some() {
                return Err(Error::Reference(format!("duplicate row {key:?}")));
            }
        }

        let mut quoted = BTreeMap::new();
        let mut rdr = csv::Reader::from_reader(quoted_csv.as_bytes());
        for rec in rdr.records() {
            let rec = rec.map_err(err)?;
            if rec.len() != 5 {
                return Err(Error::Reference(format!("quoted row has {} fields", rec.len())));
            }
            let experiment: ExperimentId = rec[0].parse()?;
            let fidelity = rec[1]
                .parse::<f64>()
                .map_err(|e| Error::Reference(e.to_string()))?;
            quoted.insert(
                experiment,
                QuotedValues {
                    experiment,
                    fidelity,
                    observable: rec[2].to_string(),
                    measured: parse_tuple(&rec[3])?,
                    ideal: parse_tuple(&rec[4])?,
                },
            );
        }
        Ok(Self { rows, quoted })
    }

    pub fn row(&self, table: &str, row: &str) -> Result<&CountsTable> {
        self.rows
            .get(&(table.to_string(), row.to_string()))
            .ok_or_else(|| Error::Reference(format!("no row '{row}' in table {table}")))
    }

    pub fn measured(&self, id: ExperimentId) -> Result<&CountsTable> {
        self.row(id.as_str(), "measured")
    }

    pub fn predicted(&self, id: ExperimentId) -> Result<&CountsTable> {
        self.row(id.as_str(), "predicted")
    }

    /// A per-run row of the breakdown table, e.g. `"IVb"`.
    pub fn group(&self, name: &str) -> Result<&CountsTable> {
        self.row(GROUP_TABLE, name)
    }

    pub fn groups(&self) -> impl Iterator<Item = (&str, &CountsTable)> {
        self.rows
            .iter()
            .filter(|((t, _), _)| t == GROUP_TABLE)
            .map(|((_, r), c)| (r.as_str(), c))
    }

    pub fn quoted(&self, id: ExperimentId) -> Result<&QuotedValues> {
        self.quoted
            .get(&id)
            .ok_or_else(|| Error::Reference(format!("no quoted values for {id}")))
    }

    /// Measured shot total of each variant, read from its breakdown row.
    pub fn variant_totals(&self, spec: &ExperimentSpec) -> Result<Vec<u64>> {
        spec.variants
            .iter()
            .map(|v| Ok(self.group(&v.reference_group)?.total()))
            .collect()
    }

    /// Bin-wise sum of the breakdown rows of every variant.
    pub fn aggregate_variants(&self, spec: &ExperimentSpec) -> Result<CountsTable> {
        let tables: Vec<&CountsTable> = spec
            .variants
            .iter()
            .map(|v| self.group(&v.reference_group))
            .collect::<Result<_>>()?;
        CountsTable::aggregate(tables)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::build_experiment;

    #[test]
    fn embedded_parses() {
        let d = ReferenceDataset::embedded();
        assert_eq!(d.groups().count(), 13);
        assert_eq!(d.measured(ExperimentId::I).unwrap().total(), 8093);
        assert_eq!(d.predicted(ExperimentId::I).unwrap().total(), 8094);
        assert_eq!(d.quoted(ExperimentId::III).unwrap().ideal, vec![0.56]);
    }

    #[test]
    fn group_totals() {
        let d = ReferenceDataset::embedded();
        assert_eq!(d.group("IVb").unwrap().total(), 970);
        assert_eq!(d.group("IVc").unwrap().total(), 1015);
        assert_eq!(d.group("IVd").unwrap().total(), 952);
        assert_eq!(d.measured(ExperimentId::II).unwrap().total(), 8192);
    }

    #[test]
    fn variant_rows_exist_for_every_experiment() {
        let d = ReferenceDataset::embedded();
        for id in ExperimentId::ALL {
            let agg = d.aggregate_variants(&build_experiment(id)).unwrap();
            assert_eq!(&agg, d.measured(id).unwrap(), "experiment {id}");
        }
    }

    #[test]
    fn malformed_inputs() {
        assert!(ReferenceDataset::parse("a,b\n", QUOTED_VALUES_V1).is_err());
        let dup = "table,row,0,1\nI,measured,1,2\nI,measured,3,4\n";
        assert!(ReferenceDataset::parse(dup, "experiment,fidelity,observable,measured,ideal\n").is_err());
        let bad = "table,row,0,1\nI,measured,1,x\n";
        assert!(ReferenceDataset::parse(bad, "").is_err());
    }
}
