//! CSV output for assembled tables and the per-column path metadata.

use std::io::Write;

use inferxpath_core::infer::{MatchMode, Table};
use inferxpath_core::pretty_print;
use inferxpath_core::semantic::{Provenance, SemanticSet};
use serde::Serialize;

pub fn write_csv<W: Write>(table: &Table, out: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize, Debug, PartialEq)]
pub struct PathsMetadata {
    pub key: KeyMetadata,
    pub columns: Vec<ColumnMetadata>,
}

#[derive(Serialize, Debug, PartialEq)]
pub struct KeyMetadata {
    pub name: String,
    pub source: String,
}

#[derive(Serialize, Debug, PartialEq)]
pub struct ColumnMetadata {
    pub name: String,
    /// `None` when no path was found; the column is then absent from the CSV.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xpath: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost: Option<[u32; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<&'static str>,
}

pub fn paths_metadata(key: &SemanticSet, values: &[SemanticSet], table: &Table) -> PathsMetadata {
    let source = match &key.provenance {
        Provenance::Recognizer(name) => format!("recognizer:{name}"),
        Provenance::XPath(e) => format!("xpath:{}", pretty_print(e)),
        Provenance::Partition { parent, signature } => format!("partition:{parent}#{signature}"),
    };
    let columns = values
        .iter()
        .zip(&table.columns)
        .map(|(v, c)| match c {
            Some(c) => ColumnMetadata {
                name: c.name.clone(),
                xpath: Some(pretty_print(&c.expr)),
                cost: Some(c.cost.as_array()),
                mode: Some(match c.mode {
                    MatchMode::Exact => "exact",
                    MatchMode::Sample => "sample",
                }),
            },
            None => ColumnMetadata { name: v.name.clone(), xpath: None, cost: None, mode: None },
        })
        .collect();
    PathsMetadata { key: KeyMetadata { name: key.name.clone(), source }, columns }
}
