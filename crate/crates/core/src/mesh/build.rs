//! Builders for the planar pieces and the octahedral sphere.

use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};

use super::{Chart, ChartKind, Circle, PieceKind, SurfacePiece, TriMesh, TriangulatedSurface};
use crate::error::{Error, Result};
use crate::geom::{self, Vec3};

/// Edge count of every boundary circle before subdivision.
pub const CIRCLE_EDGES: usize = 32;

/// Disk piece radius.
pub const DISK_RADIUS: f64 = 1.0;
/// Annulus inner and outer radii.
pub const ANNULUS_RADII: (f64, f64) = (0.4, 1.6);
/// Position of the broken fibre's rest point in the degenerate annulus.
pub const ANNULUS_SADDLE: [f64; 2] = [1.0, 0.0];
const HANDLE_HOLE_RADIUS: f64 = 0.22;
const HANDLE_PITCH: f64 = 1.6;
const CORE_HOLE_RADIUS: f64 = 0.25;
const CORE_PITCH: f64 = 0.8;

/// A planar region bounded by an outer polygon with polygonal holes.
#[derive(Clone, Debug)]
pub struct PlanarDomain {
    pub outer: Circle,
    pub holes: Vec<Circle>,
    pub spacing: f64,
    /// Points that must be mesh vertices (rest points, centres, fibre points).
    pub required: Vec<[f64; 2]>,
}

impl PlanarDomain {
    fn inside(&self, p: Vec3) -> bool {
        self.outer.contains(p) && !self.holes.iter().any(|h| h.contains(p))
    }

    fn clearance(&self, p: Vec3) -> f64 {
        self.holes.iter().chain(std::iter::once(&self.outer)).map(|c| c.distance(p)).fold(f64::INFINITY, f64::min)
    }
}

/// Constrained Delaunay triangulation of a planar domain. Boundary vertices
/// come first: outer circle, then each hole, in polygon order.
pub fn planar_domain(d: &PlanarDomain, kind: PieceKind, label: &str) -> Result<SurfacePiece> {
    if d.spacing <= 0.0 {
        return Err(Error::Param("lattice spacing must be positive".into()));
    }
    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> = ConstrainedDelaunayTriangulation::new();
    let mut points: Vec<Vec3> = Vec::new();
    let insert = |cdt: &mut ConstrainedDelaunayTriangulation<Point2<f64>>,
                  p: Vec3,
                  points: &mut Vec<Vec3>|
     -> Result<Option<spade::handles::FixedVertexHandle>> {
        let h = cdt
            .insert(Point2::new(p[0], p[1]))
            .map_err(|e| Error::Mesh(format!("triangulation insert failed: {e:?}")))?;
        if h.index() == points.len() {
            points.push(p);
            Ok(Some(h))
        } else {
            Ok(None)
        }
    };
    let circles: Vec<Circle> = std::iter::once(d.outer).chain(d.holes.iter().copied()).collect();
    for c in &circles {
        let mut hs = Vec::with_capacity(c.n);
        for i in 0..c.n {
            let h = insert(&mut cdt, c.vertex(i), &mut points)?
                .ok_or_else(|| Error::Mesh("boundary circles overlap".into()))?;
            hs.push(h);
        }
        for i in 0..c.n {
            if !cdt.can_add_constraint(hs[i], hs[(i + 1) % c.n]) {
                return Err(Error::Mesh("boundary circles intersect".into()));
            }
            cdt.add_constraint(hs[i], hs[(i + 1) % c.n]);
        }
    }
    let s = d.spacing;
    let mut required: Vec<Vec3> = Vec::new();
    for r in &d.required {
        let p = [r[0], r[1], 0.0];
        if !d.inside(p) || d.clearance(p) < 0.25 * s {
            return Err(Error::Mesh(format!("required point {r:?} is too close to the boundary")));
        }
        if insert(&mut cdt, p, &mut points)?.is_some() {
            required.push(p);
        }
    }
    let row = s * 3f64.sqrt() / 2.0;
    let extent = d.outer.radius;
    let jmax = (extent / row).ceil() as i64;
    let imax = (extent / s).ceil() as i64 + 1;
    for j in -jmax..=jmax {
        let y = d.outer.center[1] + j as f64 * row;
        let shift = if j.rem_euclid(2) == 1 { 0.5 * s } else { 0.0 };
        for i in -imax..=imax {
            let p = [d.outer.center[0] + i as f64 * s + shift, y, 0.0];
            if !d.inside(p) || d.clearance(p) < 0.5 * s {
                continue;
            }
            if required.iter().any(|&q| geom::dist(p, q) < 0.55 * s) {
                continue;
            }
            insert(&mut cdt, p, &mut points)?;
        }
    }

    let mut tris = Vec::new();
    for f in cdt.inner_faces() {
        let vs = f.vertices();
        let ids = [vs[0].fix().index(), vs[1].fix().index(), vs[2].fix().index()];
        let c = geom::centroid(&[points[ids[0]], points[ids[1]], points[ids[2]]]);
        if d.inside(c) {
            tris.push(ids);
        }
    }
    tris.sort_unstable();

    let mut used = vec![false; points.len()];
    for t in &tris {
        for &v in t {
            used[v] = true;
        }
    }
    let mut remap = vec![usize::MAX; points.len()];
    let mut kept = Vec::new();
    for (v, &u) in used.iter().enumerate() {
        if u {
            remap[v] = kept.len();
            kept.push(points[v]);
        }
    }
    let nb: usize = circles.iter().map(|c| c.n).sum();
    if (0..nb).any(|v| remap[v] != v) {
        return Err(Error::Mesh("a boundary vertex is not covered by the triangulation".into()));
    }
    let tris: Vec<[usize; 3]> = tris.iter().map(|t| [remap[t[0]], remap[t[1]], remap[t[2]]]).collect();
    let corners: Vec<[Vec3; 3]> = tris.iter().map(|t| [kept[t[0]], kept[t[1]], kept[t[2]]]).collect();

    let mut boundary = Vec::new();
    let mut off = 0;
    for (ci, c) in circles.iter().enumerate() {
        let cyc: Vec<usize> = if ci == 0 {
            (0..c.n).map(|i| off + i).collect()
        } else {
            (0..c.n).map(|i| off + (c.n - i) % c.n).collect()
        };
        boundary.push(cyc);
        off += c.n;
    }
    let chart = Chart { kind: ChartKind::Plane, label: label.to_string(), piece: kind, circles };
    let ntri = tris.len();
    let mesh = TriMesh::new(kept.len(), tris, vec![chart], vec![0; ntri], corners)?;
    Ok(SurfacePiece { mesh, boundary, kind })
}

/// Midpoint-subdivide a piece `levels` times, keeping the boundary cycles.
pub fn subdivide_piece(mut p: SurfacePiece, levels: usize) -> SurfacePiece {
    for _ in 0..levels {
        let v0 = p.mesh.num_vertices();
        let boundary = p
            .boundary
            .iter()
            .map(|cyc| {
                let n = cyc.len();
                let mut out = Vec::with_capacity(2 * n);
                for i in 0..n {
                    let (a, b) = (cyc[i], cyc[(i + 1) % n]);
                    out.push(a);
                    out.push(v0 + p.mesh.edge_index(a, b).expect("boundary edge exists"));
                }
                out
            })
            .collect();
        let sub = p.mesh.subdivide();
        p = SurfacePiece { mesh: sub.mesh, boundary, kind: p.kind };
    }
    p
}

pub fn disk_piece(level: usize) -> SurfacePiece {
    let d = PlanarDomain {
        outer: Circle::new([0.0, 0.0], DISK_RADIUS, CIRCLE_EDGES),
        holes: vec![],
        spacing: 0.2,
        required: vec![[0.0, 0.0]],
    };
    let p = planar_domain(&d, PieceKind::Disk, "disk").expect("builtin disk domain is valid");
    subdivide_piece(p, level)
}

/// Annulus with the outer circle first and the inner circle second.
pub fn annulus_piece(level: usize) -> SurfacePiece {
    let d = PlanarDomain {
        outer: Circle::new([0.0, 0.0], ANNULUS_RADII.1, CIRCLE_EDGES),
        holes: vec![Circle::new([0.0, 0.0], ANNULUS_RADII.0, CIRCLE_EDGES)],
        spacing: 0.15,
        required: vec![ANNULUS_SADDLE],
    };
    let p = planar_domain(&d, PieceKind::Annulus, "annulus").expect("builtin annulus domain is valid");
    subdivide_piece(p, level)
}

/// Geometry of the `k`-hole handle chart.
#[derive(Clone, Debug)]
pub struct HandleLayout {
    pub centers: Vec<[f64; 2]>,
    pub hole_radius: f64,
    pub outer_radius: f64,
    /// Rest points of the log-potential between adjacent centres.
    pub saddles: Vec<[f64; 2]>,
}

pub fn handle_layout(k: usize) -> HandleLayout {
    let centers: Vec<[f64; 2]> = (0..k).map(|j| [(j as f64 - (k as f64 - 1.0) / 2.0) * HANDLE_PITCH, 0.0]).collect();
    let grad = |x: f64| centers.iter().map(|c| 1.0 / (x - c[0])).sum::<f64>();
    let mut saddles = Vec::new();
    for w in centers.windows(2) {
        let (mut lo, mut hi) = (w[0][0] + 1e-9, w[1][0] - 1e-9);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if grad(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        saddles.push([0.5 * (lo + hi), 0.0]);
    }
    HandleLayout {
        outer_radius: 0.5 * (k as f64 - 1.0) * HANDLE_PITCH + 1.4,
        hole_radius: HANDLE_HOLE_RADIUS,
        centers,
        saddles,
    }
}

/// Sphere with `k + 1` holes: the outer circle first, then `k` inner holes.
pub fn handle_piece(k: usize, level: usize) -> Result<SurfacePiece> {
    if k < 2 {
        return Err(Error::Param(format!("handle needs at least 2 maxima, got {k}; use the annulus for k = 1")));
    }
    let lay = handle_layout(k);
    let mut required = lay.saddles.clone();
    // fibres above and below each saddle so its unstable branches are resolved
    let s = 0.2;
    let row = s * 3f64.sqrt() / 2.0;
    for sp in &lay.saddles {
        let mut j = 1;
        while (j as f64) * row < lay.outer_radius - 0.5 * s {
            for sign in [1.0, -1.0] {
                let p = [sp[0], sign * j as f64 * row];
                if p[0].hypot(p[1]) < lay.outer_radius - 0.5 * s {
                    required.push(p);
                }
            }
            j += 1;
        }
    }
    let d = PlanarDomain {
        outer: Circle::new([0.0, 0.0], lay.outer_radius, CIRCLE_EDGES),
        holes: lay.centers.iter().map(|&c| Circle::new(c, lay.hole_radius, CIRCLE_EDGES)).collect(),
        spacing: s,
        required,
    };
    let p = planar_domain(&d, PieceKind::Handle(k), &format!("handle{k}"))?;
    Ok(subdivide_piece(p, level))
}

/// Planar model of a sphere with `holes` holes: outer circle plus `holes − 1`
/// inner holes on the x-axis.
pub fn core_piece(holes: usize, level: usize) -> Result<SurfacePiece> {
    if holes == 0 {
        return Err(Error::Refused("a sphere with no holes is closed; use build_sphere".into()));
    }
    let inner = holes - 1;
    let centers: Vec<[f64; 2]> =
        (0..inner).map(|j| [(j as f64 - (inner as f64 - 1.0) / 2.0) * CORE_PITCH, 0.0]).collect();
    let outer = if inner == 0 { 0.9 } else { 0.5 * (inner as f64 - 1.0) * CORE_PITCH + 0.9 };
    let d = PlanarDomain {
        outer: Circle::new([0.0, 0.0], outer, CIRCLE_EDGES),
        holes: centers.iter().map(|&c| Circle::new(c, CORE_HOLE_RADIUS, CIRCLE_EDGES)).collect(),
        spacing: 0.22,
        required: vec![],
    };
    let p = planar_domain(&d, PieceKind::Core, "core")?;
    Ok(subdivide_piece(p, level))
}

/// Sphere with `holes` boundary circles; χ = 2 − holes.
pub fn sphere_with_holes(holes: usize, subdiv: usize) -> Result<SurfacePiece> {
    core_piece(holes, subdiv)
}

/// Octahedron on the unit sphere, midpoint-subdivided `subdiv` times with the
/// new vertices pushed back onto the sphere.
pub fn build_sphere(subdiv: usize) -> TriangulatedSurface {
    let v: [Vec3; 6] =
        [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, -1.0]];
    let tris = vec![[0, 2, 4], [2, 1, 4], [1, 3, 4], [3, 0, 4], [2, 0, 5], [1, 2, 5], [3, 1, 5], [0, 3, 5]];
    let corners = tris.iter().map(|t: &[usize; 3]| [v[t[0]], v[t[1]], v[t[2]]]).collect();
    let chart = Chart { kind: ChartKind::Sphere, label: "sphere".into(), piece: PieceKind::Sphere, circles: vec![] };
    let mut mesh = TriMesh::new(6, tris, vec![chart], vec![0; 8], corners).expect("octahedron is valid");
    for _ in 0..subdiv {
        mesh = mesh.subdivide().mesh;
    }
    TriangulatedSurface::from_mesh(mesh).expect("subdivided octahedron is a sphere")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_piece(p: &SurfacePiece, circles: usize) {
        assert_eq!(p.boundary.len(), circles);
        assert!(p.mesh.is_consistently_oriented());
        assert!(p.mesh.is_connected());
        let mut got = p.mesh.boundary_cycles().unwrap();
        let mut want = p.boundary.clone();
        let canon = |c: &mut Vec<usize>| {
            let k = (0..c.len()).min_by_key(|&i| c[i]).unwrap();
            c.rotate_left(k);
        };
        got.iter_mut().for_each(canon);
        want.iter_mut().for_each(canon);
        got.sort();
        want.sort();
        assert_eq!(got, want);
        for t in 0..p.mesh.num_triangles() {
            let c = p.mesh.corners(t);
            assert!(geom::orient2d(c[0], c[1], c[2]) > 0.0, "triangle {t} is not ccw");
        }
    }

    #[test]
    fn sphere_with_holes_euler_characteristic() {
        for (h, s) in [(4, 1), (1, 0), (2, 2), (3, 0), (6, 0)] {
            let p = sphere_with_holes(h, s).unwrap();
            check_piece(&p, h);
            assert_eq!(p.euler_characteristic(), 2 - h as i64, "holes={h}");
        }
        assert!(matches!(sphere_with_holes(0, 0), Err(Error::Refused(_))));
    }

    #[test]
    fn builtin_pieces_have_expected_boundary() {
        check_piece(&disk_piece(0), 1);
        check_piece(&annulus_piece(1), 2);
        for k in 2..=4 {
            let p = handle_piece(k, 0).unwrap();
            check_piece(&p, k + 1);
            assert_eq!(p.euler_characteristic(), 2 - (k as i64 + 1));
        }
        assert!(handle_piece(1, 0).is_err());
    }

    #[test]
    fn circles_keep_equal_edge_counts() {
        for level in 0..2 {
            let n = CIRCLE_EDGES << level;
            assert!(disk_piece(level).boundary.iter().all(|c| c.len() == n));
            assert!(core_piece(3, level).unwrap().boundary.iter().all(|c| c.len() == n));
            assert!(handle_piece(3, level).unwrap().boundary.iter().all(|c| c.len() == n));
        }
    }

    #[test]
    fn required_points_become_vertices() {
        let p = annulus_piece(0);
        let pos = p.mesh.vertex_positions();
        assert!(pos.iter().any(|(_, x)| x[0] == ANNULUS_SADDLE[0] && x[1] == 0.0));
        let lay = handle_layout(3);
        let h = handle_piece(3, 0).unwrap();
        let pos = h.mesh.vertex_positions();
        for s in &lay.saddles {
            assert!(pos.iter().any(|(_, x)| x[0] == s[0] && x[1] == s[1]));
        }
    }

    #[test]
    fn handle_saddles_are_critical() {
        let lay = handle_layout(3);
        assert_eq!(lay.saddles.len(), 2);
        for s in &lay.saddles {
            let g: f64 = lay.centers.iter().map(|c| 1.0 / (s[0] - c[0])).sum();
            assert!(g.abs() < 1e-9);
        }
    }

    #[test]
    fn sphere_counts() {
        let s0 = build_sphere(0);
        assert_eq!((s0.num_vertices(), s0.num_edges(), s0.num_triangles()), (6, 12, 8));
        for s in 0..=3 {
            let m = build_sphere(s);
            assert_eq!(m.euler_characteristic(), 2);
            assert_eq!(m.num_triangles(), 8 * 4usize.pow(s as u32));
            assert_eq!(m.genus(), 0);
        }
    }
}
