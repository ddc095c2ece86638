//! Vector fields on charted surfaces, the freezing bump, and the builtin
//! constructions.

mod builtin;
mod integrate;
mod spec;

pub use builtin::*;
pub use integrate::{
    entrance_time, exit_time, integrate, time_tau_map, CellRegion, Integrator, Point, Region, Termination, Trajectory,
};
pub use spec::{builtin_fixture, load_flow_spec, FlowSource, FlowSpec, FIXTURE_NAMES};

use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::geom::{self, Vec3};
use crate::mesh::{ChartKind, Circle, Subcomplex, TriMesh};

/// Default length scale of the freezing bump, in chart units.
pub const BUMP_SCALE: f64 = 0.05;

/// An analytic vector field in one chart's coordinates.
pub trait ChartField: Send + Sync + Debug {
    fn velocity(&self, p: Vec3) -> Vec3;
}

/// Closed sets on which the frozen field vanishes, in chart coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Frozen {
    Polygon { circle: Circle },
    Point { at: Vec3 },
    Disk { center: Vec3, radius: f64 },
    Segment { a: Vec3, b: Vec3 },
    Triangle { corners: [Vec3; 3] },
    Everything,
}

impl Frozen {
    pub fn distance(&self, p: Vec3) -> f64 {
        match self {
            Frozen::Polygon { circle } => circle.distance(p),
            Frozen::Point { at } => geom::dist(p, *at),
            Frozen::Disk { center, radius } => (geom::dist(p, *center) - radius).max(0.0),
            Frozen::Segment { a, b } => geom::segment_distance(p, *a, *b),
            Frozen::Triangle { corners } => {
                if corners.iter().all(|c| c[2] == 0.0) && p[2] == 0.0 {
                    geom::triangle_distance2d(p, corners)
                } else {
                    // spherical chart: chordal distance to the flat triangle's edges, zero inside the cone
                    let s = [
                        geom::dot(geom::cross(corners[0], corners[1]), p),
                        geom::dot(geom::cross(corners[1], corners[2]), p),
                        geom::dot(geom::cross(corners[2], corners[0]), p),
                    ];
                    if s.iter().all(|&x| x >= 0.0) {
                        0.0
                    } else {
                        geom::segment_distance(p, corners[0], corners[1])
                            .min(geom::segment_distance(p, corners[1], corners[2]))
                            .min(geom::segment_distance(p, corners[2], corners[0]))
                    }
                }
            }
            Frozen::Everything => 0.0,
        }
    }

    /// Cheap lower bound on `distance`.
    fn distance_lower_bound(&self, p: Vec3) -> f64 {
        match self {
            Frozen::Polygon { circle } => {
                let r = geom::dist(p, [circle.center[0], circle.center[1], 0.0]);
                // the inscribed polygon lies between the circle and its apothem
                let apothem = circle.radius * (std::f64::consts::PI / circle.n as f64).cos();
                if r > circle.radius {
                    r - circle.radius
                } else {
                    (apothem - r).max(0.0)
                }
            }
            Frozen::Segment { a, b } => {
                let c = geom::midpoint(*a, *b);
                (geom::dist(p, c) - 0.5 * geom::dist(*a, *b)).max(0.0)
            }
            Frozen::Triangle { corners } if p[2] == 0.0 && corners.iter().all(|c| c[2] == 0.0) => {
                let c = geom::centroid(corners);
                let r = corners.iter().map(|x| geom::dist(*x, c)).fold(0.0, f64::max);
                (geom::dist(p, c) - r).max(0.0)
            }
            _ => 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixedKind {
    Attracting,
    Repelling,
    HyperbolicSaddle,
    DegenerateSaddle,
    CircleOfFixedPoints,
    /// A frozen 2-dimensional region.
    StationaryRegion,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum Locus {
    Point { chart: usize, at: Vec3 },
    Circle { chart: usize, circle: Circle },
    Disk { chart: usize, center: Vec3, radius: f64 },
    Cells { chart: usize },
}

impl Locus {
    pub fn chart(&self) -> usize {
        match self {
            Locus::Point { chart, .. }
            | Locus::Circle { chart, .. }
            | Locus::Disk { chart, .. }
            | Locus::Cells { chart } => *chart,
        }
    }

    /// Chart distance from `p`, or `None` when `p` is in another chart.
    pub fn distance(&self, chart: usize, p: Vec3) -> Option<f64> {
        if chart != self.chart() {
            return None;
        }
        Some(match self {
            Locus::Point { at, .. } => geom::dist(p, *at),
            Locus::Circle { circle, .. } => circle.distance(p),
            Locus::Disk { center, radius, .. } => (geom::dist(p, *center) - radius).max(0.0),
            Locus::Cells { .. } => 0.0,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaggedFixedPoint {
    pub kind: FixedKind,
    pub locus: Locus,
    /// Part of the stationary continuum under study.
    pub in_k: bool,
}

/// Field and frozen set of one chart.
#[derive(Clone, Debug, Default)]
pub struct ChartFlow {
    pub field: Option<Arc<dyn ChartField>>,
    pub frozen: Vec<Frozen>,
}

/// A vector field on a charted surface: a per-chart analytic field or
/// per-vertex vectors interpolated barycentrically, multiplied by the
/// freezing bump of the frozen primitives.
#[derive(Clone, Debug)]
pub struct Flow {
    pub name: String,
    pub charts: Vec<ChartFlow>,
    pub vertex_field: Option<Vec<Vec3>>,
    pub bump_scale: f64,
    pub tagged: Vec<TaggedFixedPoint>,
    /// Subcomplex on which the field vanishes identically.
    pub frozen_set: Option<Subcomplex>,
}

impl Flow {
    pub fn zero(m: &TriMesh) -> Flow {
        Flow {
            name: "zero".into(),
            charts: vec![ChartFlow::default(); m.charts().len()],
            vertex_field: None,
            bump_scale: BUMP_SCALE,
            tagged: vec![],
            frozen_set: None,
        }
    }

    pub fn from_vertex_vectors(m: &TriMesh, vectors: Vec<Vec3>) -> Flow {
        let mut f = Flow::zero(m);
        f.name = "vertex-field".into();
        f.vertex_field = Some(vectors);
        f
    }

    /// Freezing factor at a chart point: `min(1, (d/h)²)` over the frozen primitives.
    pub fn bump(&self, chart: usize, p: Vec3) -> f64 {
        let h = self.bump_scale;
        let mut b: f64 = 1.0;
        for f in &self.charts[chart].frozen {
            if f.distance_lower_bound(p) >= h {
                continue;
            }
            let d = f.distance(p);
            if d < 1e-12 * h {
                return 0.0;
            }
            b = b.min((d / h) * (d / h));
        }
        b
    }

    /// Unfrozen field at `p` in the chart of triangle `t`.
    pub fn raw_velocity(&self, m: &TriMesh, t: usize, p: Vec3) -> Vec3 {
        let chart = m.chart_of(t);
        let v = if let Some(vf) = &self.vertex_field {
            let c = crate::mesh::chart_coords(m, t, p);
            let tri = m.triangle(t);
            let mut v = [0.0; 3];
            for i in 0..3 {
                v = geom::axpy(v, c[i], vf[tri[i]]);
            }
            v
        } else if let Some(f) = &self.charts[chart].field {
            f.velocity(p)
        } else {
            return [0.0; 3];
        };
        if m.charts()[chart].kind == ChartKind::Sphere {
            // keep the field tangent
            let n = geom::normalize(p);
            geom::axpy(v, -geom::dot(v, n), n)
        } else {
            [v[0], v[1], 0.0]
        }
    }

    pub fn velocity(&self, m: &TriMesh, t: usize, p: Vec3) -> Vec3 {
        let b = self.bump(m.chart_of(t), p);
        if b == 0.0 {
            return [0.0; 3];
        }
        let v = self.raw_velocity(m, t, p);
        geom::scale(v, b)
    }

    /// Tagged fixed points that do not belong to the stationary continuum.
    pub fn isolated_fixed_points(&self) -> impl Iterator<Item = &TaggedFixedPoint> {
        self.tagged.iter().filter(|f| !f.in_k)
    }

    /// Largest field magnitude over the vertex positions of every chart.
    pub fn max_speed(&self, m: &TriMesh) -> f64 {
        let mut best: f64 = 0.0;
        for t in 0..m.num_triangles() {
            for p in m.corners(t) {
                best = best.max(geom::norm(self.velocity(m, t, *p)));
            }
            best = best.max(geom::norm(self.velocity(m, t, geom::centroid(m.corners(t)))));
        }
        best
    }
}

/// Multiply the field by a bump vanishing exactly on `s`: frozen triangles,
/// loose edges and loose vertices become frozen primitives in every chart
/// they touch.
pub fn beck_freeze(flow: &Flow, m: &TriMesh, s: &Subcomplex) -> Flow {
    let mut out = flow.clone();
    let mut covered_edge = vec![false; m.num_edges()];
    let mut covered_vert = vec![false; m.num_vertices()];
    for t in 0..m.num_triangles() {
        if s.tris[t] {
            let c = m.chart_of(t);
            out.charts[c].frozen.push(Frozen::Triangle { corners: *m.corners(t) });
            for e in m.tri_edges(t) {
                covered_edge[e] = true;
            }
            for v in m.triangle(t) {
                covered_vert[v] = true;
            }
        }
    }
    for (e, &[a, b]) in m.edges().iter().enumerate() {
        if s.edges[e] && !covered_edge[e] {
            for &t in m.edge_triangles(e) {
                let (pa, pb) = (m.corner_of(t, a).unwrap(), m.corner_of(t, b).unwrap());
                out.charts[m.chart_of(t)].frozen.push(Frozen::Segment { a: pa, b: pb });
            }
            covered_vert[a] = true;
            covered_vert[b] = true;
        }
    }
    for v in 0..m.num_vertices() {
        if s.verts[v] && !covered_vert[v] {
            let mut seen = Vec::new();
            for &t in m.vertex_triangles(v) {
                let c = m.chart_of(t);
                let p = m.corner_of(t, v).unwrap();
                if !seen.contains(&(c, p)) {
                    seen.push((c, p));
                    out.charts[c].frozen.push(Frozen::Point { at: p });
                }
            }
        }
    }
    out.frozen_set = Some(match &flow.frozen_set {
        Some(f) => f.union(s),
        None => s.clone(),
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{disk_piece, Subcomplex};

    #[derive(Debug)]
    struct Radial;
    impl ChartField for Radial {
        fn velocity(&self, p: Vec3) -> Vec3 {
            p
        }
    }

    #[test]
    fn empty_freeze_keeps_the_field() {
        let d = disk_piece(0);
        let mut f = Flow::zero(&d.mesh);
        f.charts[0].field = Some(Arc::new(Radial));
        let g = beck_freeze(&f, &d.mesh, &Subcomplex::empty(&d.mesh));
        for t in 0..d.mesh.num_triangles() {
            let c = geom::centroid(d.mesh.corners(t));
            assert_eq!(f.velocity(&d.mesh, t, c), g.velocity(&d.mesh, t, c));
        }
    }

    #[test]
    fn frozen_simplices_are_exactly_still() {
        let d = disk_piece(0);
        let mut f = Flow::zero(&d.mesh);
        f.charts[0].field = Some(Arc::new(Radial));
        let s = Subcomplex::from_triangles(&d.mesh, [0, 5, 9]);
        let g = beck_freeze(&f, &d.mesh, &s);
        for t in s.triangle_ids() {
            let c = d.mesh.corners(t);
            for p in [c[0], c[1], c[2], geom::centroid(c), geom::midpoint(c[0], c[1])] {
                assert_eq!(g.velocity(&d.mesh, t, p), [0.0; 3]);
            }
        }
        // far from the frozen set the field is untouched
        let far = (0..d.mesh.num_triangles())
            .find(|&t| {
                let c = geom::centroid(d.mesh.corners(t));
                s.triangle_ids().iter().all(|&u| geom::dist(c, geom::centroid(d.mesh.corners(u))) > 0.5)
            })
            .unwrap();
        let c = geom::centroid(d.mesh.corners(far));
        assert_eq!(g.velocity(&d.mesh, far, c), f.velocity(&d.mesh, far, c));
    }

    #[test]
    fn polygon_vertices_are_at_distance_zero() {
        let c = Circle::new([0.3, -0.2], 0.7, 32);
        for i in 0..32 {
            assert_eq!(c.distance(c.vertex(i)), 0.0);
        }
        assert!((c.distance([0.3, -0.2, 0.0]) - 0.7 * (std::f64::consts::PI / 32.0).cos()).abs() < 1e-12);
    }
}
