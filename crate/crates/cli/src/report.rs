use serde_json::Value;

use crate::{Failure, Format};

/// Result of one verb: a JSON document and, for tabular verbs, a CSV table.
pub struct Report {
    pub json: Value,
    pub table: Option<Table>,
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn json(json: Value) -> Report {
        Report { json, table: None }
    }

    pub fn with_table(json: Value, header: &[&str], rows: Vec<Vec<String>>) -> Report {
        let header = header.iter().map(|s| s.to_string()).collect();
        Report { json, table: Some(Table { header, rows }) }
    }

    pub fn render(&self, format: Format) -> Result<String, Failure> {
        match format {
            // serde_json maps keep keys sorted, so output is byte-stable.
            Format::Json => Ok(format!("{}\n", serde_json::to_string_pretty(&self.json).expect("serializable"))),
            Format::Csv => {
                let table = self
                    .table
                    .as_ref()
                    .ok_or_else(|| Failure::Parse("this verb has no CSV form; use --format json".into()))?;
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| Failure::Other(e.to_string());
                w.write_record(&table.header).map_err(io)?;
                for row in &table.rows {
                    w.write_record(row).map_err(io)?;
                }
                let bytes = w.into_inner().map_err(|e| Failure::Other(e.to_string()))?;
                Ok(String::from_utf8(bytes).expect("utf-8"))
            }
        }
    }
}
