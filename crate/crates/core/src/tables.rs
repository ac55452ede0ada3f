//! Precomputed bounding tables.
//!
//! Optimized Gauss-Lobatto nodal tables ship with the crate for orders 1 to 7
//! (M = p+1 ..= p+3) and for order 3 up to M = 20. Published reference tables
//! for orders 2 to 6 are available through [`reference_table`]. A directory
//! named by `POLYBOUND_TABLE_DIR` takes precedence over the bundled files.

use std::path::PathBuf;

use crate::basis::{make_node_set, BasisFamily, BasisSpec, NodeKind};
use crate::boxopt::{parse_table_with, optimize_nodes, optimize_values, BoundingTable, DEFAULT_SAMPLES};
use crate::error::Result;

pub const TABLE_DIR_VAR: &str = "POLYBOUND_TABLE_DIR";

macro_rules! bundle {
    ($($p:literal, $m:literal;)*) => {
        &[$(($p, $m, include_str!(concat!("../tables/lobatto-nodal_p", $p, "_m", $m, ".tbl"))),)*]
    };
}

static OPTIMIZED: &[(usize, usize, &str)] = bundle! {
    1, 2; 1, 3; 1, 4;
    2, 3; 2, 4; 2, 5;
    3, 4; 3, 5; 3, 6; 3, 7; 3, 8; 3, 9; 3, 10; 3, 11; 3, 12; 3, 13; 3, 14; 3, 15; 3, 16; 3, 17; 3, 18; 3, 19; 3, 20;
    4, 5; 4, 6; 4, 7;
    5, 6; 5, 7; 5, 8;
    6, 7; 6, 8; 6, 9;
    7, 8; 7, 9; 7, 10;
};

macro_rules! reference {
    ($($p:literal, $m:literal;)*) => {
        &[$(($p, $m, include_str!(concat!("../fixtures/lobatto_p", $p, "_m", $m, ".tbl"))),)*]
    };
}

static REFERENCE: &[(usize, usize, &str)] = reference! {
    2, 3; 2, 4; 2, 5;
    3, 4; 3, 5; 3, 6;
    4, 5; 4, 6; 4, 7;
    5, 6; 5, 7; 5, 8;
    6, 7; 6, 8; 6, 9;
};

/// File name used for a table in a table directory.
pub fn file_name(family: BasisFamily, p: usize, kind: NodeKind, m: usize) -> String {
    match kind {
        NodeKind::Optimized => format!("{}_p{p}_m{m}.tbl", family.name()),
        other => format!("{}_p{p}_{}_m{m}.tbl", family.name(), other.name()),
    }
}

pub fn table_dir() -> Option<PathBuf> {
    std::env::var_os(TABLE_DIR_VAR).map(PathBuf::from)
}

fn mark_optimized(table: BoundingTable) -> Result<BoundingTable> {
    let nodes = table.nodes().clone().with_kind(NodeKind::Optimized);
    table.with_nodes(nodes)
}

/// The bundled optimized table, if one ships for `(p, m)`.
pub fn bundled_table(p: usize, m: usize) -> Option<Result<BoundingTable>> {
    OPTIMIZED
        .iter()
        .find(|e| e.0 == p && e.1 == m)
        .map(|e| parse_table_with(e.2, false).and_then(mark_optimized))
}

/// Published reference table for Gauss-Lobatto order `p` with `m` nodes.
pub fn reference_table(p: usize, m: usize) -> Option<Result<BoundingTable>> {
    REFERENCE.iter().find(|e| e.0 == p && e.1 == m).map(|e| parse_table_with(e.2, false))
}

/// All shipped reference tables as `(p, m, table)`.
pub fn reference_tables() -> Result<Vec<(usize, usize, BoundingTable)>> {
    REFERENCE.iter().map(|e| Ok((e.0, e.1, parse_table_with(e.2, false)?))).collect()
}

/// Looks up or computes a table.
///
/// Order: table directory, bundled files, then computation. Computing an
/// optimized table runs the full node search and can take seconds.
pub fn get_table(family: BasisFamily, p: usize, kind: NodeKind, m: usize) -> Result<BoundingTable> {
    if let Some(dir) = table_dir() {
        let path = dir.join(file_name(family, p, kind, m));
        if path.exists() {
            let t = crate::boxopt::load_table(&path)?;
            return if kind == NodeKind::Optimized { mark_optimized(t) } else { Ok(t) };
        }
    }
    if family == BasisFamily::LobattoNodal && kind == NodeKind::Optimized {
        if let Some(t) = bundled_table(p, m) {
            return t;
        }
    }
    let basis = BasisSpec::new(family, p)?;
    if kind == NodeKind::Optimized {
        return optimize_nodes(&basis, m).map(|(_, t)| t);
    }
    let nodes = make_node_set(kind, m)?;
    optimize_values(&basis, &nodes, DEFAULT_SAMPLES)
}

/// Optimized Gauss-Lobatto tables for order `p` with `M = p+1 ..= p+count`.
///
/// Orders without bundled tables fall back to Gauss-Lobatto control nodes,
/// which avoids a node search at run time.
pub fn ladder(p: usize, count: usize) -> Result<Vec<BoundingTable>> {
    (p + 1..=p + count)
        .map(|m| {
            let in_dir = table_dir()
                .is_some_and(|d| d.join(file_name(BasisFamily::LobattoNodal, p, NodeKind::Optimized, m)).exists());
            if in_dir || bundled_table(p, m).is_some() {
                get_table(BasisFamily::LobattoNodal, p, NodeKind::Optimized, m)
            } else {
                let basis = BasisSpec::lobatto(p)?;
                optimize_values(&basis, &make_node_set(NodeKind::GaussLobatto, m)?, DEFAULT_SAMPLES)
            }
        })
        .collect()
}
