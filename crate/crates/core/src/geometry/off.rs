//! ASCII OFF input and output.

use std::fmt::Write as _;
use std::path::Path;

use super::TriangleMesh;
use crate::{Error, Result};

/// Parses an OFF document: `OFF`, a counts line `V F E`, `V` vertex lines
/// with 3 or 4 coordinates, and `F` triangle lines `3 a b c`.
/// Comments (`#`) and blank lines are ignored.
pub fn parse_off(text: &str) -> Result<TriangleMesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let bad = |line: usize, message: &str| Error::MalformedOff {
        line,
        message: message.to_string(),
    };

    let (line, header) = lines.next().ok_or_else(|| bad(0, "empty input"))?;
    let mut header_rest = header.strip_prefix("OFF").ok_or_else(|| bad(line, "missing OFF header"))?.trim().to_string();
    let counts_line = if header_rest.is_empty() {
        let (l, c) = lines.next().ok_or_else(|| bad(line, "missing counts line"))?;
        header_rest = c.to_string();
        l
    } else {
        line
    };
    let counts: Vec<usize> = header_rest
        .split_whitespace()
        .map(|s| s.parse().map_err(|_| bad(counts_line, "counts must be nonnegative integers")))
        .collect::<Result<_>>()?;
    if counts.len() < 2 {
        return Err(bad(counts_line, "counts line needs vertex and face counts"));
    }
    let (nv, nf) = (counts[0], counts[1]);

    let mut coords = Vec::new();
    let mut width = None;
    for _ in 0..nv {
        let (l, text) = lines.next().ok_or_else(|| bad(counts_line, "fewer vertex lines than declared"))?;
        let values: Vec<f64> = text
            .split_whitespace()
            .map(|s| s.parse::<f64>().map_err(|_| bad(l, "vertex coordinate is not a number")))
            .collect::<Result<_>>()?;
        if values.len() != 3 && values.len() != 4 {
            return Err(bad(l, "vertices need 3 or 4 coordinates"));
        }
        match width {
            None => width = Some(values.len()),
            Some(w) if w != values.len() => return Err(bad(l, "vertices mix 3 and 4 coordinates")),
            _ => {}
        }
        coords.extend(values);
    }

    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (l, text) = lines.next().ok_or_else(|| bad(counts_line, "fewer face lines than declared"))?;
        let ids: Vec<usize> = text
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| bad(l, "face entries must be vertex indices")))
            .collect::<Result<_>>()?;
        if ids.first() != Some(&3) || ids.len() < 4 {
            return Err(bad(l, "only triangle faces are supported"));
        }
        let tri = [ids[1], ids[2], ids[3]];
        if tri.iter().any(|&v| v >= nv) {
            return Err(bad(l, "face references a vertex out of range"));
        }
        triangles.push(tri);
    }
    if let Some((l, _)) = lines.next() {
        return Err(bad(l, "trailing content after the declared faces"));
    }
    TriangleMesh::new(width.unwrap_or(3), coords, triangles)
}

pub fn load_off(path: impl AsRef<Path>) -> Result<TriangleMesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_off(&text)
}

/// Serializes coordinate vertices and triangles. Periodic identifications are
/// not representable in OFF and are dropped.
pub fn to_off(mesh: &TriangleMesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "OFF\n{} {} 0", mesh.vertex_count(), mesh.triangles().len());
    for v in 0..mesh.vertex_count() {
        let row: Vec<String> = mesh.vertex(v).iter().map(|x| format!("{x:.17e}")).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    for [a, b, c] in mesh.triangles() {
        let _ = writeln!(out, "3 {a} {b} {c}");
    }
    out
}

pub fn save_off(mesh: &TriangleMesh, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_off(mesh)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{clifford_torus, icosphere};

    #[test]
    fn round_trip() {
        for mesh in [icosphere(1).unwrap(), clifford_torus(6).unwrap()] {
            let back = parse_off(&to_off(&mesh)).unwrap();
            assert_eq!(back, mesh);
        }
    }

    #[test]
    fn tetrahedron_with_comments() {
        let text = "OFF # header\n4 4 6\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n\n3 0 2 1\n3 0 1 3\n3 0 3 2\n3 1 2 3\n";
        let m = parse_off(text).unwrap();
        assert!(m.is_closed());
        assert_eq!(m.euler_characteristic(), 2);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_off("PLY\n"), Err(Error::MalformedOff { .. })));
        assert!(matches!(parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n"), Err(Error::MalformedOff { .. })));
        assert!(matches!(
            parse_off("OFF\n4 1 0\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n4 0 1 3 2\n"),
            Err(Error::MalformedOff { .. })
        ));
        // A dangling edge given as a two-vertex face.
        assert!(matches!(
            parse_off("OFF\n4 2 0\n0 0 0\n1 0 0\n0 1 0\n2 2 0\n3 0 1 2\n2 2 3\n"),
            Err(Error::MalformedOff { .. })
        ));
        assert!(matches!(
            parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n"),
            Err(Error::MalformedOff { .. })
        ));
    }
}
