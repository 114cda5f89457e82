use crate::docmodel::{Entity, EntityType};
use crate::latex::TableGrid;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Row,
    Col,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inconsistency {
    pub axis: Axis,
    pub index: usize,
    pub types: BTreeMap<EntityType, usize>,
}

/// Minimum number of distinct types in one row or column to flag it.
pub const INCONSISTENCY_THRESHOLD: usize = 3;

/// Rows and columns whose entities span too many types. The header row is
/// left out of column counts and the header column out of row counts.
pub fn structure_diagnostics(grid: &TableGrid, entities: &[Entity]) -> Vec<Inconsistency> {
    let mut rows: BTreeMap<usize, BTreeMap<EntityType, usize>> = BTreeMap::new();
    let mut cols: BTreeMap<usize, BTreeMap<EntityType, usize>> = BTreeMap::new();
    for e in entities {
        let Some((i, j)) = e.anchor.cell() else { continue };
        if grid.cell(i, j).is_none_or(|c| c.is_empty()) {
            continue;
        }
        if j > 0 {
            *rows.entry(i).or_default().entry(e.etype).or_default() += 1;
        }
        if i > 0 {
            *cols.entry(j).or_default().entry(e.etype).or_default() += 1;
        }
    }
    let flag = |axis: Axis, m: BTreeMap<usize, BTreeMap<EntityType, usize>>| {
        m.into_iter()
            .filter(|(_, t)| t.len() >= INCONSISTENCY_THRESHOLD)
            .map(move |(index, types)| Inconsistency { axis, index, types })
            .collect::<Vec<_>>()
    };
    let mut out = flag(Axis::Row, rows);
    out.extend(flag(Axis::Col, cols));
    out
}
