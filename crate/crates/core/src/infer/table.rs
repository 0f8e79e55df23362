use alloc::string::String;
use alloc::vec::Vec;

use super::search::search;
use super::{Cost, InferError, MatchMode, PathQuery, SearchOptions};
use crate::eval::{Evaluator, NodeSet};
use crate::semantic::SemanticSet;
use crate::xpath::Expr;

/// The path chosen for one value column.
#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub name: String,
    pub expr: Expr,
    pub cost: Cost,
    pub mode: MatchMode,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    /// Key set name, then one name per value set that found a path.
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Value columns in input order; `None` where no path was found.
    pub columns: Vec<Option<Column>>,
}

impl Table {
    /// Indices of value sets without a path.
    pub fn missing(&self) -> Vec<usize> {
        self.columns.iter().enumerate().filter(|(_, c)| c.is_none()).map(|(i, _)| i).collect()
    }
}

/// One row per key member: the key's text, then the text each inferred
/// path yields from that key alone.
///
/// Exact inference is tried first, then sample inference. Value sets for
/// which neither finds a path are left out of the rows and reported by
/// [`Table::missing`].
pub fn assemble_table(
    key: &SemanticSet,
    values: &[SemanticSet],
    evaluator: &Evaluator<'_>,
    options: SearchOptions,
) -> Result<Table, InferError> {
    if key.members.is_empty() {
        return Err(InferError::EmptySource);
    }
    let mut columns = Vec::with_capacity(values.len());
    for v in values {
        let mut found = None;
        for mode in [MatchMode::Exact, MatchMode::Sample] {
            let q = PathQuery::new(key.members.clone(), v.members.clone(), mode).with_limit(1).with_options(options);
            let mut stream = search(&q, evaluator)?;
            if let Some(p) = stream.next().transpose()? {
                found = Some(Column { name: v.name.clone(), expr: p.expr, cost: p.cost, mode });
                break;
            }
        }
        columns.push(found);
    }
    let mut header = alloc::vec![key.name.clone()];
    header.extend(columns.iter().flatten().map(|c| c.name.clone()));
    let mut rows = Vec::with_capacity(key.members.len());
    for k in &key.members {
        let mut row = alloc::vec![evaluator.string_value(k)?];
        for c in columns.iter().flatten() {
            let cell = match evaluator.evaluate(&c.expr, &NodeSet::single(k.clone()))? {
                crate::eval::Value::NodeSet(ns) => match ns.first() {
                    Some(n) => evaluator.string_value(n)?,
                    None => String::new(),
                },
                _ => String::new(),
            };
            row.push(cell);
        }
        rows.push(row);
    }
    Ok(Table { header, rows, columns })
}
