//! The `polybound-mesh v1` text format.

use std::fmt::Write as _;
use std::path::Path;

use super::CurvedMesh;
use crate::error::{Error, Result};
use crate::poly::{parse_floats, parse_key_values};

pub fn format_mesh(mesh: &CurvedMesh) -> String {
    let mut s = String::from("polybound-mesh v1\n");
    let _ = writeln!(s, "dim=2 p={} elements={}", mesh.order(), mesh.len());
    for nodes in mesh.elements() {
        let parts: Vec<String> = nodes.iter().flat_map(|[x, y]| [format!("{x:?}"), format!("{y:?}")]).collect();
        s.push_str(&parts.join(" "));
        s.push('\n');
    }
    s
}

pub fn parse_mesh(text: &str) -> Result<CurvedMesh> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let (ln, magic) = lines.next().ok_or(Error::Parse { line: 1, message: "empty mesh file".into() })?;
    if magic != "polybound-mesh v1" {
        return Err(Error::Parse { line: ln, message: format!("bad magic `{magic}`") });
    }
    let (ln, meta) = lines.next().ok_or(Error::Parse { line: ln + 1, message: "missing metadata line".into() })?;
    let kv = parse_key_values(meta, ln)?;
    let dim: usize = kv.get_parsed("dim", ln)?;
    if dim != 2 {
        return Err(Error::Parse { line: ln, message: format!("only dim=2 meshes are supported, got {dim}") });
    }
    let p: usize = kv.get_parsed("p", ln)?;
    let count: usize = kv.get_parsed("elements", ln)?;
    let per = (p + 1) * (p + 1);
    let mut elements = Vec::with_capacity(count);
    let mut last = ln;
    for e in 0..count {
        let (ln, line) = lines.next().ok_or(Error::Parse {
            line: last + 1,
            message: format!("unexpected end of file, expected element {e}"),
        })?;
        last = ln;
        let v = parse_floats(line, ln)?;
        if v.len() != 2 * per {
            return Err(Error::Parse {
                line: ln,
                message: format!("element {e} has {} values, expected {}", v.len(), 2 * per),
            });
        }
        elements.push(v.chunks(2).map(|c| [c[0], c[1]]).collect());
    }
    if let Some((ln, _)) = lines.next() {
        return Err(Error::Parse { line: ln, message: format!("trailing data after {count} elements") });
    }
    CurvedMesh::new(p, elements)
}

pub fn save_mesh(mesh: &CurvedMesh, path: &Path) -> Result<()> {
    std::fs::write(path, format_mesh(mesh))?;
    Ok(())
}

pub fn load_mesh(path: &Path) -> Result<CurvedMesh> {
    parse_mesh(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshcheck::perturbed_mesh;

    #[test]
    fn round_trip() {
        let m = perturbed_mesh(2, 2, 0.2, 3).unwrap();
        assert_eq!(parse_mesh(&format_mesh(&m)).unwrap(), m);
    }

    #[test]
    fn short_element_line() {
        let text = "polybound-mesh v1\ndim=2 p=1 elements=1\n0 0 1 0 0 1 1\n";
        assert!(matches!(parse_mesh(text), Err(Error::Parse { line: 3, .. })));
    }
}
