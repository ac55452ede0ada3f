//! Text serialization of bounding tables (`polybound-table v1`).

use std::fmt::Write as _;
use std::path::Path;

use super::{verify_table, BoundingTable, Provenance};
use crate::basis::{make_node_set, BasisFamily, BasisSpec, NodeKind, NodeSet};
use crate::error::{Error, Result};
use crate::poly::{parse_floats, parse_key_values};

/// Tables whose worst violation is below this are refused unless forced.
const VIOLATION_TOL: f64 = -1e-12;

fn join(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:?}")).collect();
    parts.join(" ")
}

pub fn format_table(table: &BoundingTable) -> String {
    let mut s = String::from("polybound-table v1\n");
    let _ = writeln!(
        s,
        "family={} p={} M={} epsilon={:?} provenance={}",
        table.basis().family(),
        table.basis().order(),
        table.m(),
        table.epsilon(),
        table.provenance()
    );
    let _ = writeln!(s, "nodes: {}", join(table.nodes().positions()));
    for i in 0..table.n() {
        let _ = writeln!(s, "L {}: {}", i + 1, join(table.lower_row(i)));
    }
    for i in 0..table.n() {
        let _ = writeln!(s, "U {}: {}", i + 1, join(table.upper_row(i)));
    }
    s
}

/// Recognizes standard node families so that loaded tables keep their kind.
fn classify_nodes(positions: Vec<f64>) -> Result<NodeSet> {
    let m = positions.len();
    for kind in NodeKind::STANDARD {
        if let Ok(std) = make_node_set(kind, m) {
            if std.positions() == positions.as_slice() {
                return Ok(std);
            }
        }
    }
    NodeSet::explicit(positions)
}

/// Parses a table and verifies it, refusing violating tables unless `force`.
pub fn parse_table_with(text: &str, force: bool) -> Result<BoundingTable> {
    let table = parse_table(text)?;
    if !force {
        let q = verify_table(&table);
        if q.max_violation < VIOLATION_TOL {
            return Err(Error::VerificationFailed(q.max_violation));
        }
    }
    Ok(table)
}

/// Parses a table without verification.
pub fn parse_table(text: &str) -> Result<BoundingTable> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let mut last = 0;
    let mut next = |what: &str| -> Result<(usize, &str)> {
        match lines.next() {
            Some((ln, l)) => {
                last = ln;
                Ok((ln, l))
            }
            None => Err(Error::Parse {
                line: last + 1,
                message: format!("unexpected end of file, expected {what}"),
            }),
        }
    };

    let (ln, magic) = next("header")?;
    if magic != "polybound-table v1" {
        return Err(Error::Parse { line: ln, message: format!("bad magic `{magic}`") });
    }
    let (ln, meta) = next("metadata line")?;
    let kv = parse_key_values(meta, ln)?;
    let wrap = |line: usize| move |e: Error| Error::Parse { line, message: e.to_string() };
    let family: BasisFamily = kv.get("family", ln)?.parse().map_err(wrap(ln))?;
    let p: usize = kv.get_parsed("p", ln)?;
    let m: usize = kv.get_parsed("M", ln)?;
    let epsilon: f64 = kv.get_parsed("epsilon", ln)?;
    let provenance: Provenance = kv.get("provenance", ln)?.parse().map_err(wrap(ln))?;
    let basis = BasisSpec::new(family, p).map_err(wrap(ln))?;
    let n = basis.len();

    let (ln, nodes_line) = next("nodes line")?;
    let rest = nodes_line
        .strip_prefix("nodes:")
        .ok_or_else(|| Error::Parse { line: ln, message: "expected `nodes:`".into() })?;
    let positions = parse_floats(rest, ln)?;
    if positions.len() != m {
        return Err(Error::Parse { line: ln, message: format!("expected {m} nodes, found {}", positions.len()) });
    }
    let nodes = classify_nodes(positions).map_err(wrap(ln))?;

    let mut rows = [Vec::with_capacity(n), Vec::with_capacity(n)];
    for (side, tag) in ["L", "U"].iter().enumerate() {
        for i in 1..=n {
            let label = format!("{tag} {i}:");
            let (ln, line) = next(&format!("record `{label}`"))?;
            let rest = line
                .strip_prefix(&label)
                .ok_or_else(|| Error::Parse { line: ln, message: format!("expected record `{label}`") })?;
            let values = parse_floats(rest, ln)?;
            if values.len() != m {
                return Err(Error::Parse {
                    line: ln,
                    message: format!("record `{label}` has {} values, expected {m}", values.len()),
                });
            }
            rows[side].push(values);
        }
    }
    let [lower, upper] = rows;
    let provenance = match provenance {
        Provenance::Published => Provenance::Published,
        _ => Provenance::LoadedFromFile,
    };
    BoundingTable::new(basis, nodes, lower, upper, epsilon, provenance)
}

pub fn save_table(table: &BoundingTable, path: &Path) -> Result<()> {
    std::fs::write(path, format_table(table))?;
    Ok(())
}

/// Loads and verifies a table file.
pub fn load_table(path: &Path) -> Result<BoundingTable> {
    load_table_with(path, false)
}

pub fn load_table_with(path: &Path, force: bool) -> Result<BoundingTable> {
    parse_table_with(&std::fs::read_to_string(path)?, force)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxopt::optimize_values;

    #[test]
    fn round_trip_is_bitwise() {
        let b = BasisSpec::lobatto(3).unwrap();
        let nodes = make_node_set(NodeKind::GaussLobatto, 5).unwrap();
        let t = optimize_values(&b, &nodes, 500).unwrap();
        let back = parse_table_with(&format_table(&t), false).unwrap();
        assert_eq!(back.lower(), t.lower());
        assert_eq!(back.upper(), t.upper());
        assert_eq!(back.nodes(), t.nodes());
        assert_eq!(back.provenance(), Provenance::LoadedFromFile);
    }

    #[test]
    fn truncated_file_names_the_record() {
        let text = "polybound-table v1\nfamily=lobatto-nodal p=1 M=2 epsilon=1e-6 provenance=optimized-here\n\
                    nodes: -1.0 1.0\nL 1: 1.0 0.0\nL 2: 0.0 1.0\nU 1: 1.0 0.0\n";
        match parse_table(text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 7);
                assert!(message.contains("U 2:"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn violating_table_is_refused_unless_forced() {
        let text = "polybound-table v1\nfamily=lobatto-nodal p=2 M=3 epsilon=1e-6 provenance=optimized-here\n\
                    nodes: -1.0 0.0 1.0\nL 1: 0 0 0\nL 2: 0 0 0\nL 3: 0 0 0\nU 1: 1 0 0\nU 2: 1 1 1\nU 3: 0 0 1\n";
        assert!(matches!(parse_table_with(text, false), Err(Error::VerificationFailed(_))));
        assert!(parse_table_with(text, true).is_ok());
    }
}
