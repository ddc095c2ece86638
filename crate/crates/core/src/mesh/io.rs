//! OFF export/import plus a sidecar carrying charts, per-triangle chart
//! coordinates and named subcomplexes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{Chart, Subcomplex, TriMesh};
use crate::error::{Error, Result};
use crate::geom::Vec3;

const SIDECAR_HEADER: &str = "nonsaddle-sidecar 1";

/// Everything in a sidecar file besides the combinatorics.
#[derive(Clone, Debug)]
pub struct Sidecar {
    pub charts: Vec<Chart>,
    pub tri_chart: Vec<usize>,
    pub corners: Vec<[Vec3; 3]>,
    pub subcomplexes: BTreeMap<String, Subcomplex>,
}

pub fn write_mesh(m: &TriMesh) -> String {
    let mut s = String::new();
    writeln!(s, "OFF").unwrap();
    writeln!(s, "{} {} 0", m.num_vertices(), m.num_triangles()).unwrap();
    for (_, p) in m.vertex_positions() {
        writeln!(s, "{} {} {}", p[0], p[1], p[2]).unwrap();
    }
    for t in m.triangles() {
        writeln!(s, "3 {} {} {}", t[0], t[1], t[2]).unwrap();
    }
    s
}

pub fn write_sidecar(m: &TriMesh, subs: &[(&str, &Subcomplex)]) -> String {
    let mut s = String::new();
    writeln!(s, "{SIDECAR_HEADER}").unwrap();
    writeln!(s, "charts {}", m.charts().len()).unwrap();
    for c in m.charts() {
        writeln!(s, "chart {}", serde_json::to_string(c).expect("chart serializes")).unwrap();
    }
    writeln!(s, "triangles {}", m.num_triangles()).unwrap();
    for t in 0..m.num_triangles() {
        let c = m.corners(t);
        write!(s, "tc {} {}", t, m.chart_of(t)).unwrap();
        for p in c {
            write!(s, " {} {} {}", p[0], p[1], p[2]).unwrap();
        }
        s.push('\n');
    }
    for (name, sub) in subs {
        if name.contains(char::is_whitespace) {
            continue;
        }
        let ids = |mask: &[bool]| -> String {
            (0..mask.len()).filter(|&i| mask[i]).map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
        };
        writeln!(s, "sub {name} v {}", ids(&sub.verts)).unwrap();
        let edges: Vec<String> =
            m.edges().iter().enumerate().filter(|(e, _)| sub.edges[*e]).map(|(_, [a, b])| format!("{a} {b}")).collect();
        writeln!(s, "sub {name} e {}", edges.join(" ")).unwrap();
        writeln!(s, "sub {name} t {}", ids(&sub.tris)).unwrap();
    }
    s
}

fn tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split_whitespace()
}

fn parse<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T> {
    tok.ok_or_else(|| Error::Parse(format!("missing {what}")))?.parse().map_err(|_| Error::Parse(format!("bad {what}")))
}

/// Parse the OFF part: vertex positions and triangles.
pub fn read_off(text: &str) -> Result<(Vec<Vec3>, Vec<[usize; 3]>)> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    if lines.next() != Some("OFF") {
        return Err(Error::Parse("missing OFF header".into()));
    }
    let counts = lines.next().ok_or_else(|| Error::Parse("missing counts line".into()))?;
    let mut c = tokens(counts);
    let nv: usize = parse(c.next(), "vertex count")?;
    let nf: usize = parse(c.next(), "face count")?;
    let mut verts = Vec::with_capacity(nv);
    for _ in 0..nv {
        let l = lines.next().ok_or_else(|| Error::Parse("truncated vertex list".into()))?;
        let mut t = tokens(l);
        verts.push([parse(t.next(), "x")?, parse(t.next(), "y")?, parse(t.next(), "z")?]);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let l = lines.next().ok_or_else(|| Error::Parse("truncated face list".into()))?;
        let mut t = tokens(l);
        let k: usize = parse(t.next(), "face size")?;
        if k != 3 {
            return Err(Error::Parse(format!("only triangles are supported, got a {k}-gon")));
        }
        faces.push([parse(t.next(), "index")?, parse(t.next(), "index")?, parse(t.next(), "index")?]);
    }
    Ok((verts, faces))
}

pub fn read_sidecar(text: &str, m_vertices: usize, tris: &[[usize; 3]]) -> Result<Sidecar> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some(SIDECAR_HEADER) {
        return Err(Error::Parse("missing sidecar header".into()));
    }
    let mut charts = Vec::new();
    let mut tri_chart = vec![usize::MAX; tris.len()];
    let mut corners = vec![[[0.0; 3]; 3]; tris.len()];
    let mut raw: BTreeMap<String, (Vec<usize>, Vec<[usize; 2]>, Vec<usize>)> = BTreeMap::new();
    for line in lines {
        let (head, rest) = line.split_once(' ').unwrap_or((line, ""));
        match head {
            "charts" | "triangles" => {}
            "chart" => charts.push(serde_json::from_str::<Chart>(rest)?),
            "tc" => {
                let mut t = tokens(rest);
                let id: usize = parse(t.next(), "triangle id")?;
                if id >= tris.len() {
                    return Err(Error::Parse(format!("triangle id {id} out of range")));
                }
                tri_chart[id] = parse(t.next(), "chart id")?;
                for corner in corners[id].iter_mut() {
                    for x in corner.iter_mut() {
                        *x = parse(t.next(), "coordinate")?;
                    }
                }
            }
            "sub" => {
                let mut t = tokens(rest);
                let name = t.next().ok_or_else(|| Error::Parse("unnamed subcomplex".into()))?.to_string();
                let kind = t.next().ok_or_else(|| Error::Parse("missing simplex kind".into()))?;
                let ids: Vec<usize> =
                    t.map(|x| x.parse().map_err(|_| Error::Parse("bad simplex id".into()))).collect::<Result<_>>()?;
                let entry = raw.entry(name).or_default();
                match kind {
                    "v" => entry.0 = ids,
                    "e" => {
                        if ids.len() % 2 != 0 {
                            return Err(Error::Parse("odd edge endpoint list".into()));
                        }
                        entry.1 = ids.chunks(2).map(|c| [c[0], c[1]]).collect();
                    }
                    "t" => entry.2 = ids,
                    other => return Err(Error::Parse(format!("unknown simplex kind {other}"))),
                }
            }
            other => return Err(Error::Parse(format!("unknown sidecar record {other}"))),
        }
    }
    if tri_chart.iter().any(|&c| c >= charts.len()) {
        return Err(Error::Parse("some triangle has no chart record".into()));
    }
    let mesh = TriMesh::new(m_vertices, tris.to_vec(), charts.clone(), tri_chart.clone(), corners.clone())?;
    let mut subcomplexes = BTreeMap::new();
    for (name, (vs, es, ts)) in raw {
        let mut s = Subcomplex::empty(&mesh);
        for v in vs {
            *s.verts.get_mut(v).ok_or_else(|| Error::Parse("vertex id out of range".into()))? = true;
        }
        for [a, b] in es {
            let e = mesh.edge_index(a, b).ok_or_else(|| Error::Parse(format!("no edge {a}-{b}")))?;
            s.edges[e] = true;
        }
        for t in ts {
            *s.tris.get_mut(t).ok_or_else(|| Error::Parse("triangle id out of range".into()))? = true;
        }
        if !s.is_face_closed(&mesh) {
            return Err(Error::Parse(format!("subcomplex {name} is not closed under faces")));
        }
        subcomplexes.insert(name, s);
    }
    Ok(Sidecar { charts, tri_chart, corners, subcomplexes })
}

/// Rebuild a mesh from OFF text and its sidecar.
pub fn read_mesh(off: &str, sidecar: &str) -> Result<(TriMesh, BTreeMap<String, Subcomplex>)> {
    let (verts, tris) = read_off(off)?;
    let sc = read_sidecar(sidecar, verts.len(), &tris)?;
    let mesh = TriMesh::new(verts.len(), tris, sc.charts, sc.tri_chart, sc.corners)?;
    Ok((mesh, sc.subcomplexes))
}

#[cfg(test)]
mod tests {
    use super::super::{build_sphere, core_piece, disk_piece, glue, GluePattern};
    use super::*;

    #[test]
    fn round_trip_preserves_everything() {
        let core = core_piece(1, 0).unwrap();
        let d = disk_piece(0);
        let (m, k) = glue(&core, &[&d], &GluePattern::sequential(&[&d])).unwrap();
        let off = write_mesh(&m);
        let sc = write_sidecar(&m, &[("K", &k)]);
        let (back, subs) = read_mesh(&off, &sc).unwrap();
        assert_eq!(back.canonical_hash(), m.canonical_hash());
        assert_eq!(back.triangles(), m.triangles());
        assert_eq!(back.all_corners(), m.all_corners());
        assert_eq!(subs["K"], k);
        assert_eq!(write_sidecar(&back, &[("K", &subs["K"])]), sc);
    }

    #[test]
    fn sphere_round_trip() {
        let s = build_sphere(2);
        let (back, _) = read_mesh(&write_mesh(&s), &write_sidecar(&s, &[])).unwrap();
        assert_eq!(back.canonical_hash(), s.canonical_hash());
    }

    #[test]
    fn rejects_non_triangles_and_bad_headers() {
        assert!(read_off("OFF\n1 1 0\n0 0 0\n4 0 0 0 0\n").is_err());
        assert!(read_off("PLY\n").is_err());
        assert!(read_sidecar("nope", 0, &[]).is_err());
    }
}
