//! Triangulated surfaces, surface pieces with boundary, and subcomplexes.
//!
//! Every triangle lives in exactly one drawing chart and stores its corner
//! coordinates in that chart. Planar charts use the `xy` components; the
//! spherical chart stores points of the unit sphere. Pieces glued along
//! boundary circles keep their own charts, so a seam vertex has one set of
//! coordinates per incident chart.

mod build;
mod glue;
mod io;
mod locate;

pub use build::{
    annulus_piece, build_sphere, core_piece, disk_piece, handle_layout, handle_piece, planar_domain, sphere_with_holes,
    subdivide_piece, HandleLayout, PlanarDomain, ANNULUS_RADII, ANNULUS_SADDLE, CIRCLE_EDGES, DISK_RADIUS,
};
pub use glue::{glue, GluePattern};
pub use io::{read_mesh, read_off, read_sidecar, write_mesh, write_sidecar, Sidecar};
pub use locate::{chart_coords, triangle_contains, Locator};

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{self, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartKind {
    Plane,
    Sphere,
}

/// A regular polygon standing in for a round boundary circle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: [f64; 2],
    pub radius: f64,
    pub n: usize,
    pub phase: f64,
}

impl Circle {
    pub fn new(center: [f64; 2], radius: f64, n: usize) -> Self {
        Circle { center, radius, n, phase: 0.0 }
    }

    /// Vertex `i` of the polygon, counter-clockwise from angle `phase`.
    ///
    /// Mesh vertices on the circle are produced by this function, so frozen-set
    /// distance queries against the polygon see bitwise-identical corners.
    pub fn vertex(&self, i: usize) -> Vec3 {
        let a = self.phase + std::f64::consts::TAU * (i % self.n) as f64 / self.n as f64;
        [self.center[0] + self.radius * a.cos(), self.center[1] + self.radius * a.sin(), 0.0]
    }

    pub fn edge_length(&self) -> f64 {
        geom::dist(self.vertex(0), self.vertex(1))
    }

    /// Distance from a planar point to the polygon boundary.
    pub fn distance(&self, p: Vec3) -> f64 {
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        let step = std::f64::consts::TAU / self.n as f64;
        let a = (dy.atan2(dx) - self.phase).rem_euclid(std::f64::consts::TAU);
        let k = (a / step).floor() as usize;
        let mut best = f64::INFINITY;
        for j in [k + self.n - 1, k, k + 1] {
            let d = geom::segment_distance(p, self.vertex(j), self.vertex(j + 1));
            best = best.min(d);
        }
        best
    }

    /// Whether a planar point lies strictly inside the polygon.
    pub fn contains(&self, p: Vec3) -> bool {
        (0..self.n).all(|i| geom::orient2d(self.vertex(i), self.vertex(i + 1), p) > 0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "k")]
pub enum PieceKind {
    Core,
    Disk,
    Annulus,
    Handle(usize),
    Sphere,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Chart {
    pub kind: ChartKind,
    pub label: String,
    pub piece: PieceKind,
    /// Boundary circles in chart coordinates; for planar pieces index 0 is the
    /// outer circle and the rest are holes.
    pub circles: Vec<Circle>,
}

/// An oriented triangle complex with a drawing atlas. May have boundary.
#[derive(Clone, Debug)]
pub struct TriMesh {
    num_vertices: usize,
    triangles: Vec<[usize; 3]>,
    charts: Vec<Chart>,
    tri_chart: Vec<usize>,
    corners: Vec<[Vec3; 3]>,
    edges: Vec<[usize; 2]>,
    edge_lookup: HashMap<(usize, usize), usize>,
    tri_edges: Vec<[usize; 3]>,
    edge_tris: Vec<Vec<usize>>,
    vertex_tris: Vec<Vec<usize>>,
}

impl TriMesh {
    pub fn new(
        num_vertices: usize,
        triangles: Vec<[usize; 3]>,
        charts: Vec<Chart>,
        tri_chart: Vec<usize>,
        corners: Vec<[Vec3; 3]>,
    ) -> Result<Self> {
        if tri_chart.len() != triangles.len() || corners.len() != triangles.len() {
            return Err(Error::Mesh("per-triangle chart data has the wrong length".into()));
        }
        let mut edges = Vec::new();
        let mut edge_lookup = HashMap::new();
        let mut tri_edges = Vec::with_capacity(triangles.len());
        let mut edge_tris: Vec<Vec<usize>> = Vec::new();
        let mut vertex_tris = vec![Vec::new(); num_vertices];
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= num_vertices) {
                return Err(Error::Mesh(format!("triangle {t} references a missing vertex")));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::Mesh(format!("triangle {t} is degenerate")));
            }
            if tri_chart[t] >= charts.len() {
                return Err(Error::Mesh(format!("triangle {t} references a missing chart")));
            }
            let mut te = [0; 3];
            for i in 0..3 {
                let (a, b) = (tri[i], tri[(i + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let e = *edge_lookup.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    edge_tris.push(Vec::new());
                    edges.len() - 1
                });
                edge_tris[e].push(t);
                te[i] = e;
                vertex_tris[tri[i]].push(t);
            }
            tri_edges.push(te);
        }
        Ok(TriMesh {
            num_vertices,
            triangles,
            charts,
            tri_chart,
            corners,
            edges,
            edge_lookup,
            tri_edges,
            edge_tris,
            vertex_tris,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }
    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }
    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }
    pub fn chart_of(&self, t: usize) -> usize {
        self.tri_chart[t]
    }
    pub fn tri_charts(&self) -> &[usize] {
        &self.tri_chart
    }
    pub fn corners(&self, t: usize) -> &[Vec3; 3] {
        &self.corners[t]
    }
    pub fn all_corners(&self) -> &[[Vec3; 3]] {
        &self.corners
    }
    pub fn tri_edges(&self, t: usize) -> [usize; 3] {
        self.tri_edges[t]
    }
    pub fn edge_triangles(&self, e: usize) -> &[usize] {
        &self.edge_tris[e]
    }
    pub fn vertex_triangles(&self, v: usize) -> &[usize] {
        &self.vertex_tris[v]
    }
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_lookup.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// Triangles sharing an edge with `t`.
    pub fn edge_neighbors(&self, t: usize) -> impl Iterator<Item = usize> + '_ {
        self.tri_edges[t].iter().flat_map(move |&e| self.edge_tris[e].iter().copied().filter(move |&u| u != t))
    }

    /// Position of vertex `v` in the chart of triangle `t`.
    pub fn corner_of(&self, t: usize, v: usize) -> Option<Vec3> {
        let tri = self.triangles[t];
        (0..3).find(|&i| tri[i] == v).map(|i| self.corners[t][i])
    }

    /// The first chart position recorded for each vertex.
    pub fn vertex_positions(&self) -> Vec<(usize, Vec3)> {
        let mut out = vec![(usize::MAX, [0.0; 3]); self.num_vertices];
        for (t, tri) in self.triangles.iter().enumerate() {
            for i in 0..3 {
                if out[tri[i]].0 == usize::MAX {
                    out[tri[i]] = (self.tri_chart[t], self.corners[t][i]);
                }
            }
        }
        out
    }

    pub fn boundary_edges(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edge_tris[e].len() == 1).collect()
    }

    pub fn is_closed(&self) -> bool {
        self.edge_tris.iter().all(|ts| ts.len() == 2)
    }

    /// Every edge with two incident triangles is traversed once in each direction.
    pub fn is_consistently_oriented(&self) -> bool {
        let mut dir: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &self.triangles {
            for i in 0..3 {
                *dir.entry((tri[i], tri[(i + 1) % 3])).or_default() += 1;
            }
        }
        dir.values().all(|&c| c == 1)
    }

    /// Whether some choice of triangle orientations makes the complex consistent.
    pub fn is_orientable(&self) -> bool {
        if self.edge_tris.iter().any(|ts| ts.len() > 2) {
            return false;
        }
        let n = self.triangles.len();
        let mut flip: Vec<Option<bool>> = vec![None; n];
        for start in 0..n {
            if flip[start].is_some() {
                continue;
            }
            flip[start] = Some(false);
            let mut queue = VecDeque::from([start]);
            while let Some(t) = queue.pop_front() {
                let ft = flip[t].unwrap();
                for &e in &self.tri_edges[t] {
                    for &u in &self.edge_tris[e] {
                        if u == t {
                            continue;
                        }
                        let [a, b] = self.edges[e];
                        let same = self.traverses(t, a, b) == self.traverses(u, a, b);
                        // consistent neighbours traverse the shared edge oppositely
                        let fu = if same { !ft } else { ft };
                        match flip[u] {
                            None => {
                                flip[u] = Some(fu);
                                queue.push_back(u);
                            }
                            Some(x) if x != fu => return false,
                            _ => {}
                        }
                    }
                }
            }
        }
        true
    }

    fn traverses(&self, t: usize, a: usize, b: usize) -> bool {
        let tri = self.triangles[t];
        (0..3).any(|i| tri[i] == a && tri[(i + 1) % 3] == b)
    }

    pub fn is_connected(&self) -> bool {
        if self.num_vertices == 0 {
            return true;
        }
        let mut seen = vec![false; self.num_vertices];
        let mut adj = vec![Vec::new(); self.num_vertices];
        for &[a, b] in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// Boundary circles as vertex cycles in the orientation induced by the triangles.
    pub fn boundary_cycles(&self) -> Result<Vec<Vec<usize>>> {
        let mut next: HashMap<usize, usize> = HashMap::new();
        for e in self.boundary_edges() {
            let t = self.edge_tris[e][0];
            let [a, b] = self.edges[e];
            let (from, to) = if self.traverses(t, a, b) { (a, b) } else { (b, a) };
            if next.insert(from, to).is_some() {
                return Err(Error::Mesh(format!("boundary is not a disjoint union of circles at vertex {from}")));
            }
        }
        let mut starts: Vec<usize> = next.keys().copied().collect();
        starts.sort_unstable();
        let mut used = std::collections::HashSet::new();
        let mut cycles = Vec::new();
        for s in starts {
            if used.contains(&s) {
                continue;
            }
            let mut cyc = vec![s];
            used.insert(s);
            let mut v = next[&s];
            while v != s {
                if !used.insert(v) {
                    return Err(Error::Mesh("boundary cycle is not simple".into()));
                }
                cyc.push(v);
                v = *next.get(&v).ok_or_else(|| Error::Mesh("open boundary chain".into()))?;
            }
            cycles.push(cyc);
        }
        Ok(cycles)
    }

    /// Midpoint (1 → 4) subdivision. Old vertices keep their ids; the midpoint
    /// of edge `e` becomes vertex `V + e`.
    pub fn subdivide(&self) -> Subdivision {
        let v0 = self.num_vertices;
        let mut tris = Vec::with_capacity(4 * self.triangles.len());
        let mut corners = Vec::with_capacity(4 * self.triangles.len());
        let mut tri_chart = Vec::with_capacity(4 * self.triangles.len());
        let mut parent = Vec::with_capacity(4 * self.triangles.len());
        for (t, tri) in self.triangles.iter().enumerate() {
            let te = self.tri_edges[t];
            let m = [v0 + te[0], v0 + te[1], v0 + te[2]];
            let c = self.corners[t];
            let sphere = self.charts[self.tri_chart[t]].kind == ChartKind::Sphere;
            let mid = |a: Vec3, b: Vec3| {
                let p = geom::midpoint(a, b);
                if sphere {
                    geom::normalize(p)
                } else {
                    p
                }
            };
            let mc = [mid(c[0], c[1]), mid(c[1], c[2]), mid(c[2], c[0])];
            let kids = [
                ([tri[0], m[0], m[2]], [c[0], mc[0], mc[2]]),
                ([m[0], tri[1], m[1]], [mc[0], c[1], mc[1]]),
                ([m[2], m[1], tri[2]], [mc[2], mc[1], c[2]]),
                ([m[0], m[1], m[2]], [mc[0], mc[1], mc[2]]),
            ];
            for (k, kc) in kids {
                tris.push(k);
                corners.push(kc);
                tri_chart.push(self.tri_chart[t]);
                parent.push(t);
            }
        }
        let mesh = TriMesh::new(v0 + self.edges.len(), tris, self.charts.clone(), tri_chart, corners)
            .expect("subdivision of a valid mesh is valid");
        Subdivision { mesh, parent, coarse_vertices: v0, coarse_edges: self.edges.clone() }
    }

    /// Components of a triangle set under edge adjacency, each sorted, ordered by least id.
    pub fn triangle_components(&self, member: &[bool]) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.triangles.len()];
        let mut out = Vec::new();
        for s in 0..self.triangles.len() {
            if !member[s] || comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut cells = vec![s];
            comp[s] = id;
            let mut i = 0;
            while i < cells.len() {
                let t = cells[i];
                i += 1;
                for u in self.edge_neighbors(t) {
                    if member[u] && comp[u] == usize::MAX {
                        comp[u] = id;
                        cells.push(u);
                    }
                }
            }
            cells.sort_unstable();
            out.push(cells);
        }
        out
    }

    /// Relabeling-invariant hash of the vertex/triangle incidence structure
    /// (Weisfeiler–Lehman colour refinement).
    pub fn canonical_hash(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let h = |x: &dyn Fn(&mut std::collections::hash_map::DefaultHasher)| {
            let mut s = std::collections::hash_map::DefaultHasher::new();
            x(&mut s);
            s.finish()
        };
        let mut color: Vec<u64> = (0..self.num_vertices).map(|v| h(&|s| self.vertex_tris[v].len().hash(s))).collect();
        for _ in 0..6 {
            let tri_color: Vec<u64> = self
                .triangles
                .iter()
                .map(|t| {
                    let mut c = [color[t[0]], color[t[1]], color[t[2]]];
                    c.sort_unstable();
                    h(&|s| c.hash(s))
                })
                .collect();
            color = (0..self.num_vertices)
                .map(|v| {
                    let mut cs: Vec<u64> = self.vertex_tris[v].iter().map(|&t| tri_color[t]).collect();
                    cs.sort_unstable();
                    h(&|s| (color[v], &cs).hash(s))
                })
                .collect();
        }
        let mut all = color.clone();
        all.sort_unstable();
        h(&|s| (self.num_vertices, self.edges.len(), self.triangles.len(), &all).hash(s))
    }
}

/// Result of one midpoint subdivision with the bookkeeping needed to carry
/// subcomplexes across.
#[derive(Clone, Debug)]
pub struct Subdivision {
    pub mesh: TriMesh,
    pub parent: Vec<usize>,
    coarse_vertices: usize,
    coarse_edges: Vec<[usize; 2]>,
}

impl Subdivision {
    /// Image of a coarse subcomplex: child triangles, half edges, old vertices
    /// and midpoints of member edges.
    pub fn map_subcomplex(&self, s: &Subcomplex) -> Subcomplex {
        let mut out = Subcomplex::empty(&self.mesh);
        for (t, &p) in self.parent.iter().enumerate() {
            if s.tris[p] {
                out.tris[t] = true;
            }
        }
        for v in 0..self.coarse_vertices {
            out.verts[v] = s.verts[v];
        }
        for (e, &[a, b]) in self.coarse_edges.iter().enumerate() {
            if s.edges[e] {
                let m = self.coarse_vertices + e;
                out.verts[m] = true;
                for end in [a, b] {
                    if let Some(fe) = self.mesh.edge_index(end, m) {
                        out.edges[fe] = true;
                    }
                }
            }
        }
        out.close(&self.mesh);
        out
    }
}

/// A closed, connected, orientable triangulated surface.
#[derive(Clone, Debug)]
pub struct TriangulatedSurface {
    mesh: TriMesh,
    genus: u32,
}

impl std::ops::Deref for TriangulatedSurface {
    type Target = TriMesh;
    fn deref(&self) -> &TriMesh {
        &self.mesh
    }
}

impl TriangulatedSurface {
    pub fn from_mesh(mesh: TriMesh) -> Result<Self> {
        if !mesh.is_closed() {
            return Err(Error::Mesh("surface is not closed: some edge does not have two triangles".into()));
        }
        if !mesh.is_connected() {
            return Err(Error::Mesh("1-skeleton is not connected".into()));
        }
        if !mesh.is_orientable() {
            return Err(Error::Orientation("surface is not orientable".into()));
        }
        if !mesh.is_consistently_oriented() {
            return Err(Error::Orientation("triangle orientations are inconsistent".into()));
        }
        let chi = mesh.euler_characteristic();
        let genus = genus_from_euler(chi)?;
        Ok(TriangulatedSurface { mesh, genus })
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    /// Stored genus tag; always equals `(2 − χ) / 2`.
    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn subdivide(&self) -> (TriangulatedSurface, Subdivision) {
        let sub = self.mesh.subdivide();
        let surf = TriangulatedSurface { mesh: sub.mesh.clone(), genus: self.genus };
        (surf, sub)
    }

    /// `levels` rounds of subdivision carrying a subcomplex along.
    pub fn refine_with(&self, k: &Subcomplex, levels: usize) -> (TriangulatedSurface, Subcomplex, Vec<usize>) {
        let mut surf = self.clone();
        let mut kk = k.clone();
        let mut parent: Vec<usize> = (0..self.num_triangles()).collect();
        for _ in 0..levels {
            let (s, sub) = surf.subdivide();
            kk = sub.map_subcomplex(&kk);
            parent = sub.parent.iter().map(|&p| parent[p]).collect();
            surf = s;
        }
        (surf, kk, parent)
    }
}

pub fn euler_characteristic(m: &TriMesh) -> i64 {
    m.euler_characteristic()
}

/// Genus of a closed orientable surface from χ = 2 − 2g.
pub fn genus_from_euler(chi: i64) -> Result<u32> {
    if chi > 2 || chi.rem_euclid(2) != 0 {
        return Err(Error::Mesh(format!("Euler characteristic {chi} is not that of a closed orientable surface")));
    }
    Ok(((2 - chi) / 2) as u32)
}

pub fn genus(m: &TriMesh) -> Result<u32> {
    if !m.is_closed() {
        return Err(Error::Mesh("genus requires a closed surface".into()));
    }
    if !m.is_orientable() {
        return Err(Error::Orientation("genus requires an orientable surface".into()));
    }
    genus_from_euler(m.euler_characteristic())
}

/// A compact surface with boundary, produced by the piece builders.
#[derive(Clone, Debug)]
pub struct SurfacePiece {
    pub mesh: TriMesh,
    /// Boundary circles as vertex cycles in the induced orientation, in the
    /// same order as the chart's `circles`.
    pub boundary: Vec<Vec<usize>>,
    pub kind: PieceKind,
}

impl SurfacePiece {
    pub fn euler_characteristic(&self) -> i64 {
        self.mesh.euler_characteristic()
    }
    pub fn num_boundary_circles(&self) -> usize {
        self.boundary.len()
    }
    pub fn circle(&self, i: usize) -> Circle {
        self.mesh.charts[0].circles[i]
    }
}

/// A face-closed set of simplices of a parent mesh.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subcomplex {
    pub verts: Vec<bool>,
    pub edges: Vec<bool>,
    pub tris: Vec<bool>,
}

impl Subcomplex {
    pub fn empty(m: &TriMesh) -> Self {
        Subcomplex {
            verts: vec![false; m.num_vertices()],
            edges: vec![false; m.num_edges()],
            tris: vec![false; m.num_triangles()],
        }
    }

    pub fn full(m: &TriMesh) -> Self {
        Subcomplex {
            verts: vec![true; m.num_vertices()],
            edges: vec![true; m.num_edges()],
            tris: vec![true; m.num_triangles()],
        }
    }

    pub fn from_triangles(m: &TriMesh, tris: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Subcomplex::empty(m);
        for t in tris {
            s.tris[t] = true;
        }
        s.close(m);
        s
    }

    pub fn from_triangle_mask(m: &TriMesh, mask: &[bool]) -> Self {
        Self::from_triangles(m, (0..mask.len()).filter(|&t| mask[t]))
    }

    pub fn from_vertices(m: &TriMesh, verts: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Subcomplex::empty(m);
        for v in verts {
            s.verts[v] = true;
        }
        s
    }

    /// Add every face of every member simplex.
    pub fn close(&mut self, m: &TriMesh) {
        for t in 0..m.num_triangles() {
            if self.tris[t] {
                for e in m.tri_edges(t) {
                    self.edges[e] = true;
                }
            }
        }
        for (e, &[a, b]) in m.edges().iter().enumerate() {
            if self.edges[e] {
                self.verts[a] = true;
                self.verts[b] = true;
            }
        }
    }

    pub fn is_face_closed(&self, m: &TriMesh) -> bool {
        (0..m.num_triangles()).all(|t| !self.tris[t] || m.tri_edges(t).iter().all(|&e| self.edges[e]))
            && m.edges().iter().enumerate().all(|(e, &[a, b])| !self.edges[e] || (self.verts[a] && self.verts[b]))
    }

    pub fn contains_triangle(&self, t: usize) -> bool {
        self.tris[t]
    }
    pub fn contains_vertex(&self, v: usize) -> bool {
        self.verts[v]
    }
    pub fn triangle_ids(&self) -> Vec<usize> {
        (0..self.tris.len()).filter(|&t| self.tris[t]).collect()
    }
    pub fn num_triangles(&self) -> usize {
        self.tris.iter().filter(|&&b| b).count()
    }
    pub fn is_empty(&self) -> bool {
        !self.verts.iter().any(|&b| b)
    }

    pub fn euler_characteristic(&self) -> i64 {
        let c = |v: &Vec<bool>| v.iter().filter(|&&b| b).count() as i64;
        c(&self.verts) - c(&self.edges) + c(&self.tris)
    }

    pub fn union(&self, other: &Subcomplex) -> Subcomplex {
        let or = |a: &Vec<bool>, b: &Vec<bool>| a.iter().zip(b).map(|(x, y)| *x || *y).collect();
        Subcomplex {
            verts: or(&self.verts, &other.verts),
            edges: or(&self.edges, &other.edges),
            tris: or(&self.tris, &other.tris),
        }
    }

    pub fn is_subset_of(&self, other: &Subcomplex) -> bool {
        let sub = |a: &Vec<bool>, b: &Vec<bool>| a.iter().zip(b).all(|(x, y)| !*x || *y);
        sub(&self.verts, &other.verts) && sub(&self.edges, &other.edges) && sub(&self.tris, &other.tris)
    }
}

/// Closed star of `s` iterated `rings` times.
pub fn star_neighborhood(m: &TriMesh, s: &Subcomplex, rings: usize) -> Subcomplex {
    let mut cur = s.clone();
    for _ in 0..rings {
        let mut next = cur.clone();
        for v in 0..m.num_vertices() {
            if cur.verts[v] {
                for &t in m.vertex_triangles(v) {
                    next.tris[t] = true;
                }
            }
        }
        next.close(m);
        cur = next;
    }
    cur
}

/// Triangle mask of the `rings`-fold star of a triangle mask.
pub fn star_cells(m: &TriMesh, cells: &[bool], rings: usize) -> Vec<bool> {
    star_neighborhood(m, &Subcomplex::from_triangle_mask(m, cells), rings).tris
}
