//! ASCII PLY triangle meshes and solid voxelization.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{BinaryGrid, Connectivity, Dims};

/// Resolution used for benchmark meshes when none is given.
pub const DEFAULT_RESOLUTION: usize = 150;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
}

impl TriangleMesh {
    /// Checks index range, degenerate faces and finite coordinates.
    pub fn validate(&self) -> Result<()> {
        if let Some(v) = self.vertices.iter().find(|v| v.iter().any(|c| !c.is_finite())) {
            return Err(Error::Domain(format!("non-finite vertex {v:?}")));
        }
        for (i, f) in self.faces.iter().enumerate() {
            if f.iter().any(|&k| k >= self.vertices.len()) {
                return Err(Error::Domain(format!("face {i} has an out-of-range index")));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::Domain(format!("face {i} is degenerate")));
            }
        }
        Ok(())
    }

    /// Axis-aligned bounds as `(min, max)`.
    pub fn bounds(&self) -> ([f64; 3], [f64; 3]) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for v in &self.vertices {
            for a in 0..3 {
                lo[a] = lo[a].min(v[a]);
                hi[a] = hi[a].max(v[a]);
            }
        }
        (lo, hi)
    }

    /// Serializes as ASCII PLY.
    pub fn to_ply(&self) -> String {
        let mut s = format!(
            "ply\nformat ascii 1.0\nelement vertex {}\nproperty float x\nproperty float y\nproperty float z\nelement face {}\nproperty list uchar int vertex_indices\nend_header\n",
            self.vertices.len(),
            self.faces.len()
        );
        for v in &self.vertices {
            s.push_str(&format!("{} {} {}\n", v[0], v[1], v[2]));
        }
        for f in &self.faces {
            s.push_str(&format!("3 {} {} {}\n", f[0], f[1], f[2]));
        }
        s
    }
}

#[derive(Debug)]
enum Property {
    Scalar(String),
    List(String),
}

#[derive(Debug)]
struct Element {
    name: String,
    count: usize,
    props: Vec<Property>,
}

pub fn parse_ply(path: impl AsRef<Path>) -> Result<TriangleMesh> {
    let bytes = fs::read(path)?;
    let text = String::from_utf8_lossy(&bytes);
    parse_ply_str(&text)
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

pub fn parse_ply_str(text: &str) -> Result<TriangleMesh> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, "ply")) => {}
        _ => return Err(parse_err(1, "missing 'ply' magic")),
    }
    let mut elements: Vec<Element> = Vec::new();
    let mut saw_format = false;
    loop {
        let Some((ln, line)) = lines.next() else {
            return Err(parse_err(0, "unexpected end of file in header"));
        };
        let tok: Vec<&str> = line.split_whitespace().collect();
        match tok.as_slice() {
            ["end_header"] => break,
            ["format", "ascii", _] => saw_format = true,
            ["format", kind, ..] => {
                return Err(Error::Unsupported(format!("PLY format '{kind}'")))
            }
            ["comment", ..] | ["obj_info", ..] | [] => {}
            ["element", name, count] => {
                let count = count
                    .parse()
                    .map_err(|_| parse_err(ln, format!("bad element count '{count}'")))?;
                elements.push(Element { name: name.to_string(), count, props: Vec::new() });
            }
            ["property", "list", _, _, name] => elements
                .last_mut()
                .ok_or_else(|| parse_err(ln, "property before any element"))?
                .props
                .push(Property::List(name.to_string())),
            ["property", _, name] => elements
                .last_mut()
                .ok_or_else(|| parse_err(ln, "property before any element"))?
                .props
                .push(Property::Scalar(name.to_string())),
            _ => return Err(parse_err(ln, format!("unrecognized header line '{line}'"))),
        }
    }
    if !saw_format {
        return Err(parse_err(0, "missing format line"));
    }

    let declared_vertices = elements.iter().find(|e| e.name == "vertex").map_or(0, |e| e.count);
    let mut mesh = TriangleMesh::default();
    let mut body = lines.filter(|(_, l)| !l.is_empty());
    let mut last_line = 0;
    for el in &elements {
        let axes: Vec<Option<usize>> = ["x", "y", "z"]
            .iter()
            .map(|n| el.props.iter().position(|p| matches!(p, Property::Scalar(s) if s == n)))
            .collect();
        if el.name == "vertex" && axes.iter().any(Option::is_none) {
            return Err(parse_err(0, "vertex element lacks x/y/z properties"));
        }
        for i in 0..el.count {
            let Some((ln, line)) = body.next() else {
                return Err(parse_err(
                    last_line,
                    format!(
                        "element count mismatch: header declares {} {} elements, found {i}",
                        el.count, el.name
                    ),
                ));
            };
            last_line = ln;
            let tok: Vec<&str> = line.split_whitespace().collect();
            match el.name.as_str() {
                "vertex" => {
                    if tok.len() != el.props.len()
                        || el.props.iter().any(|p| matches!(p, Property::List(_)))
                    {
                        return Err(parse_err(
                            ln,
                            format!(
                                "element count mismatch: vertex {i} of {} has {} values, expected {}",
                                el.count,
                                tok.len(),
                                el.props.len()
                            ),
                        ));
                    }
                    let mut v = [0.0f64; 3];
                    for (a, slot) in axes.iter().enumerate() {
                        let t = tok[slot.expect("checked above")];
                        v[a] = t
                            .parse()
                            .map_err(|_| parse_err(ln, format!("bad coordinate '{t}'")))?;
                        if !v[a].is_finite() {
                            return Err(parse_err(ln, format!("non-finite coordinate '{t}'")));
                        }
                    }
                    mesh.vertices.push(v);
                }
                "face" => {
                    let f = parse_face(&el.props, &tok, ln)?;
                    if let Some(k) = f.iter().find(|&&k| k >= declared_vertices) {
                        return Err(parse_err(
                            ln,
                            format!("vertex index {k} out of range ({declared_vertices} vertices)"),
                        ));
                    }
                    mesh.faces.push(f);
                }
                _ => {}
            }
        }
    }
    if let Some((ln, _)) = body.next() {
        return Err(parse_err(ln, "element count mismatch: data continues past the declared elements"));
    }
    Ok(mesh)
}

fn parse_face(props: &[Property], tok: &[&str], ln: usize) -> Result<[usize; 3]> {
    let mut pos = 0;
    let mut face = None;
    for p in props {
        match p {
            Property::Scalar(_) => pos += 1,
            Property::List(name) => {
                let n: usize = tok
                    .get(pos)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| parse_err(ln, "bad face list length"))?;
                let items = tok
                    .get(pos + 1..pos + 1 + n)
                    .ok_or_else(|| parse_err(ln, "face list shorter than its length"))?;
                pos += 1 + n;
                if name != "vertex_indices" && name != "vertex_index" {
                    continue;
                }
                if n != 3 {
                    return Err(Error::Unsupported(format!(
                        "line {ln}: face with {n} vertices; only triangles are supported"
                    )));
                }
                let mut f = [0usize; 3];
                for (k, t) in items.iter().enumerate() {
                    f[k] = t
                        .parse()
                        .map_err(|_| parse_err(ln, format!("bad vertex index '{t}'")))?;
                }
                face = Some(f);
            }
        }
    }
    if pos != tok.len() {
        return Err(parse_err(ln, format!("face has {} values, expected {pos}", tok.len())));
    }
    let f = face.ok_or_else(|| parse_err(ln, "face element lacks vertex_indices"))?;
    if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
        return Err(parse_err(ln, "degenerate face"));
    }
    Ok(f)
}

struct Row {
    y: f64,
    z: f64,
}

/// x coordinates where the line `{y, z}` pierces the mesh, or `None` when a
/// triangle is hit on its edge.
fn row_crossings(mesh: &TriangleMesh, row: &Row) -> Vec<f64> {
    let mut xs = Vec::new();
    for f in &mesh.faces {
        let [a, b, c] = f.map(|k| mesh.vertices[k]);
        // signed areas in the yz projection
        let e = |p: [f64; 3], q: [f64; 3]| (q[1] - p[1]) * (row.z - p[2]) - (q[2] - p[2]) * (row.y - p[1]);
        let (w0, w1, w2) = (e(b, c), e(c, a), e(a, b));
        let inside = (w0 > 0.0 && w1 > 0.0 && w2 > 0.0) || (w0 < 0.0 && w1 < 0.0 && w2 < 0.0);
        if !inside {
            continue;
        }
        let s = w0 + w1 + w2;
        xs.push((w0 * a[0] + w1 * b[0] + w2 * c[0]) / s);
    }
    xs.sort_by(f64::total_cmp);
    xs
}

/// Solid voxelization: the mesh is scaled uniformly so its longest axis spans
/// `resolution − 2` cells, leaving one background cell on every side. A voxel
/// is foreground when a +x ray from its center crosses the surface an odd
/// number of times.
pub fn voxelize(mesh: &TriangleMesh, resolution: usize) -> Result<BinaryGrid> {
    if resolution < 8 {
        return Err(Error::Parameter(format!("resolution must be >= 8, got {resolution}")));
    }
    mesh.validate()?;
    if mesh.faces.is_empty() {
        return Err(Error::Voxelization("mesh has no faces".into()));
    }
    let (lo, hi) = mesh.bounds();
    let span = (0..3).map(|a| hi[a] - lo[a]).fold(0.0, f64::max);
    if span <= 0.0 {
        return Err(Error::Voxelization("mesh has zero extent".into()));
    }
    let scale = (resolution - 2) as f64 / span;
    let mut n = [0usize; 3];
    for a in 0..3 {
        n[a] = (((hi[a] - lo[a]) * scale - 1e-9).ceil().max(1.0) as usize) + 2;
    }
    let dims = Dims::new3(n[0], n[1], n[2]);
    let center = |a: usize, i: usize| lo[a] + (i as f64 - 0.5) / scale;
    let jitters = [[1.0e-7, 2.3e-7], [-3.1e-7, 1.7e-7]];

    let rows: Vec<(usize, usize)> =
        (0..n[2]).flat_map(|z| (0..n[1]).map(move |y| (y, z))).collect();
    let filled: Vec<Vec<usize>> = rows
        .par_iter()
        .map(|&(y, z)| {
            for j in jitters {
                let row = Row {
                    y: center(1, y) + j[0] * span,
                    z: center(2, z) + j[1] * span,
                };
                let xs = row_crossings(mesh, &row);
                if xs.len() % 2 == 1 {
                    continue;
                }
                let cells = (0..n[0])
                    .filter(|&x| {
                        let cx = center(0, x);
                        xs.iter().filter(|&&v| v > cx).count() % 2 == 1
                    })
                    .map(|x| dims.index([x, y, z]))
                    .collect();
                return Ok(cells);
            }
            Err(Error::Voxelization(format!(
                "inconsistent ray parity at row y={y}, z={z}; mesh is not watertight"
            )))
        })
        .collect::<Result<_>>()?;
    let grid = BinaryGrid::from_indices(dims, filled.into_iter().flatten());
    if grid.is_blank() {
        return Err(Error::Voxelization("no voxel centers inside the mesh".into()));
    }
    Ok(grid.largest_component(Connectivity::Full))
}
