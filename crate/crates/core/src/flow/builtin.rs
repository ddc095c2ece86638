//! Builtin pieces, the generator, the worked examples and the sphere families.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{ChartField, ChartFlow, FixedKind, Flow, Frozen, Locus, TaggedFixedPoint, BUMP_SCALE};
use crate::error::{Error, Result};
use crate::geom::{self, Vec3};
use crate::mesh::{
    annulus_piece, build_sphere, core_piece, disk_piece, glue, handle_layout, handle_piece, ChartKind, GluePattern,
    Subcomplex, SurfacePiece, TriMesh, TriangulatedSurface, ANNULUS_SADDLE,
};

/// Length scale of the degenerate-saddle pinch.
pub const PINCH_SCALE: f64 = 0.1;
/// Radius of the frozen disk inside the repelled cap of the second example.
pub const CAP_REGION_RADIUS: f64 = 0.3;
/// Latitude half-width of the equatorial block on the sphere.
pub const BAND_HALF_WIDTH: f64 = 0.5;
/// Subdivision level of the sphere used by the families.
pub const FAMILY_SUBDIV: usize = 4;

const CIRCLE_LIFT: f64 = 10.0;
const CIRCLE_DRIFT: f64 = 10.0;
const EMPTY_PUSH: f64 = 20.0;
const SADDLE_LAMBDA: f64 = 0.2;

/// `v = −x`: attracting node at the chart origin.
#[derive(Debug, Clone, Copy)]
pub struct Sink;

impl ChartField for Sink {
    fn velocity(&self, p: Vec3) -> Vec3 {
        [-p[0], -p[1], 0.0]
    }
}

/// Unit radial field `x/|x|`, optionally pinched to zero at one point with
/// the quadratic factor `min(1, |x − p|²/s²)`.
#[derive(Debug, Clone, Copy)]
pub struct RadialOut {
    pub pinch: Option<([f64; 2], f64)>,
}

impl ChartField for RadialOut {
    fn velocity(&self, p: Vec3) -> Vec3 {
        let r = p[0].hypot(p[1]);
        if r == 0.0 {
            return [0.0; 3];
        }
        let mut f = 1.0 / r;
        if let Some((q, s)) = self.pinch {
            let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2);
            f *= (d2 / (s * s)).min(1.0);
        }
        [p[0] * f, p[1] * f, 0.0]
    }
}

/// Normalised gradient `g/(1+|g|)` of `Σ log|x − c_j|`: the centres repel,
/// infinity attracts, and the rest points between centres are saddles.
#[derive(Debug, Clone)]
pub struct LogGradient {
    pub centers: Vec<[f64; 2]>,
}

impl ChartField for LogGradient {
    fn velocity(&self, p: Vec3) -> Vec3 {
        let mut g = [0.0; 2];
        for c in &self.centers {
            let (dx, dy) = (p[0] - c[0], p[1] - c[1]);
            let r2 = dx * dx + dy * dy;
            if r2 == 0.0 {
                return [0.0; 3];
            }
            g[0] += dx / r2;
            g[1] += dy / r2;
        }
        let n = 1.0 + g[0].hypot(g[1]);
        [g[0] / n, g[1] / n, 0.0]
    }
}

/// `v = A x` in a planar chart.
#[derive(Debug, Clone, Copy)]
pub struct Linear {
    pub a: [[f64; 2]; 2],
}

impl ChartField for Linear {
    fn velocity(&self, p: Vec3) -> Vec3 {
        [self.a[0][0] * p[0] + self.a[0][1] * p[1], self.a[1][0] * p[0] + self.a[1][1] * p[1], 0.0]
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Constant {
    pub v: [f64; 2],
}

impl ChartField for Constant {
    fn velocity(&self, _: Vec3) -> Vec3 {
        [self.v[0], self.v[1], 0.0]
    }
}

/// Latitude/longitude field on the unit sphere:
/// `θ' = s·drift·(1 − cos θ)`, `φ' = s·cos φ·(−sin φ + lift·(1 − cos θ) + push)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereField {
    pub drift: f64,
    pub lift: f64,
    pub push: f64,
    pub scale: f64,
}

impl SphereField {
    pub fn circle(lambda: f64) -> Self {
        SphereField { drift: CIRCLE_DRIFT * lambda, lift: CIRCLE_LIFT * lambda, push: 0.0, scale: 1.0 }
    }
}

impl ChartField for SphereField {
    fn velocity(&self, p: Vec3) -> Vec3 {
        let [x, y, z] = p;
        let rho = x.hypot(y);
        // (1 − cos θ), bounded; its factors below vanish at the poles
        let one_minus_cos = if rho > 0.0 { (rho - x) / rho } else { 0.0 };
        let th = self.scale * self.drift * one_minus_cos;
        let g = self.scale * (-z + self.lift * one_minus_cos + self.push);
        [-th * y - g * z * x, th * x - g * z * y, g * (x * x + y * y)]
    }
}

/// Latitude of a point of the unit sphere.
pub fn latitude(p: Vec3) -> f64 {
    let n = geom::normalize(p);
    n[2].clamp(-1.0, 1.0).asin()
}

/// Longitude in `[0, 2π)`.
pub fn longitude(p: Vec3) -> f64 {
    p[1].atan2(p[0]).rem_euclid(std::f64::consts::TAU)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnnulusVariant {
    HomoclinicFibered,
    DegenerateSaddle,
}

impl std::str::FromStr for AnnulusVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "homoclinic-fibered" => Ok(AnnulusVariant::HomoclinicFibered),
            "degenerate-saddle" => Ok(AnnulusVariant::DegenerateSaddle),
            _ => Err(Error::Param(format!("unknown annulus variant {s}"))),
        }
    }
}

/// A surface piece with its flow; `boundary` is the frozen boundary.
#[derive(Clone, Debug)]
pub struct PieceFlow {
    pub piece: SurfacePiece,
    pub flow: Flow,
    pub boundary: Subcomplex,
}

/// A closed surface with a stationary continuum `k` and a flow.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub surface: TriangulatedSurface,
    pub k: Subcomplex,
    pub flow: Flow,
    pub genus: u32,
    /// Generator partition; empty for fixtures not built by the generator.
    pub ks: Vec<usize>,
    pub annulus_variant: Option<AnnulusVariant>,
}

fn boundary_subcomplex(p: &SurfacePiece) -> Subcomplex {
    let m = &p.mesh;
    let mut s = Subcomplex::empty(m);
    for cyc in &p.boundary {
        for (i, &a) in cyc.iter().enumerate() {
            let b = cyc[(i + 1) % cyc.len()];
            s.verts[a] = true;
            if let Some(e) = m.edge_index(a, b) {
                s.edges[e] = true;
            }
        }
    }
    s
}

fn piece_chart_flow(p: &SurfacePiece, field: Arc<dyn ChartField>) -> ChartFlow {
    let frozen = p.mesh.charts()[0].circles.iter().map(|&circle| Frozen::Polygon { circle }).collect();
    ChartFlow { field: Some(field), frozen }
}

fn circle_tags(p: &SurfacePiece, chart: usize) -> Vec<TaggedFixedPoint> {
    p.mesh.charts()[0]
        .circles
        .iter()
        .map(|&circle| TaggedFixedPoint {
            kind: FixedKind::CircleOfFixedPoints,
            locus: Locus::Circle { chart, circle },
            in_k: true,
        })
        .collect()
}

fn disk_content(p: &SurfacePiece, chart: usize) -> (ChartFlow, Vec<TaggedFixedPoint>) {
    let mut tags = circle_tags(p, chart);
    tags.push(TaggedFixedPoint {
        kind: FixedKind::Attracting,
        locus: Locus::Point { chart, at: [0.0; 3] },
        in_k: false,
    });
    (piece_chart_flow(p, Arc::new(Sink)), tags)
}

fn annulus_content(p: &SurfacePiece, chart: usize, variant: AnnulusVariant) -> (ChartFlow, Vec<TaggedFixedPoint>) {
    let mut tags = circle_tags(p, chart);
    let pinch = match variant {
        AnnulusVariant::HomoclinicFibered => None,
        AnnulusVariant::DegenerateSaddle => {
            let at = [ANNULUS_SADDLE[0], ANNULUS_SADDLE[1], 0.0];
            tags.push(TaggedFixedPoint {
                kind: FixedKind::DegenerateSaddle,
                locus: Locus::Point { chart, at },
                in_k: false,
            });
            Some((ANNULUS_SADDLE, PINCH_SCALE))
        }
    };
    (piece_chart_flow(p, Arc::new(RadialOut { pinch })), tags)
}

fn handle_content(p: &SurfacePiece, chart: usize, k: usize) -> (ChartFlow, Vec<TaggedFixedPoint>) {
    let lay = handle_layout(k);
    let mut tags = circle_tags(p, chart);
    for s in &lay.saddles {
        tags.push(TaggedFixedPoint {
            kind: FixedKind::HyperbolicSaddle,
            locus: Locus::Point { chart, at: [s[0], s[1], 0.0] },
            in_k: false,
        });
    }
    (piece_chart_flow(p, Arc::new(LogGradient { centers: lay.centers })), tags)
}

fn piece_flow(p: SurfacePiece, content: (ChartFlow, Vec<TaggedFixedPoint>), name: &str) -> PieceFlow {
    let boundary = boundary_subcomplex(&p);
    let flow = Flow {
        name: name.into(),
        charts: vec![content.0],
        vertex_field: None,
        bump_scale: BUMP_SCALE,
        tagged: content.1,
        frozen_set: Some(boundary.clone()),
    };
    PieceFlow { piece: p, flow, boundary }
}

/// Disk with frozen boundary and attracting centre.
pub fn disk_flow(subdiv: usize) -> PieceFlow {
    let p = disk_piece(subdiv);
    let c = disk_content(&p, 0);
    piece_flow(p, c, "disk")
}

/// Annulus with both circles frozen; orbits run from the inner to the outer circle.
pub fn annulus_flow(variant: AnnulusVariant, subdiv: usize) -> PieceFlow {
    let p = annulus_piece(subdiv);
    let c = annulus_content(&p, 0, variant);
    piece_flow(p, c, "annulus")
}

/// Sphere with `k + 1` holes: the `k` inner circles repel, the outer attracts.
pub fn handle_flow(k: usize, subdiv: usize) -> Result<PieceFlow> {
    let p = handle_piece(k, subdiv)?;
    let c = handle_content(&p, 0, k);
    Ok(piece_flow(p, c, &format!("handle{k}")))
}

enum Cap {
    Disk,
    RepelledRegion,
    Annulus(AnnulusVariant),
    Handle(usize),
}

fn assemble(
    name: &str,
    caps: &[Cap],
    level: usize,
    genus: u32,
    ks: Vec<usize>,
    variant: Option<AnnulusVariant>,
) -> Result<Fixture> {
    let mut pieces = Vec::with_capacity(caps.len());
    for cap in caps {
        pieces.push(match cap {
            Cap::Disk | Cap::RepelledRegion => disk_piece(level),
            Cap::Annulus(_) => annulus_piece(level),
            Cap::Handle(k) => handle_piece(*k, level)?,
        });
    }
    let holes: usize = pieces.iter().map(|p| p.boundary.len()).sum();
    let core = core_piece(holes, level)?;
    let refs: Vec<&SurfacePiece> = pieces.iter().collect();
    let (surface, k) = glue(&core, &refs, &GluePattern::sequential(&refs))?;

    let mut charts = vec![ChartFlow::default()];
    let mut tagged = vec![];
    for (i, (cap, p)) in caps.iter().zip(&pieces).enumerate() {
        let chart = i + 1;
        let (cf, tags) = match cap {
            Cap::Disk => disk_content(p, chart),
            Cap::RepelledRegion => {
                let mut tags = circle_tags(p, chart);
                tags.push(TaggedFixedPoint {
                    kind: FixedKind::StationaryRegion,
                    locus: Locus::Disk { chart, center: [0.0; 3], radius: CAP_REGION_RADIUS },
                    in_k: false,
                });
                let mut cf = piece_chart_flow(p, Arc::new(Sink));
                cf.frozen.push(Frozen::Disk { center: [0.0; 3], radius: CAP_REGION_RADIUS });
                (cf, tags)
            }
            Cap::Annulus(v) => annulus_content(p, chart, *v),
            Cap::Handle(k) => handle_content(p, chart, *k),
        };
        charts.push(cf);
        tagged.extend(tags);
    }
    let mut frozen_set = k.clone();
    for t in 0..surface.num_triangles() {
        let chart = surface.chart_of(t);
        if chart > 0
            && matches!(caps[chart - 1], Cap::RepelledRegion)
            && surface.corners(t).iter().all(|c| geom::norm(*c) <= CAP_REGION_RADIUS)
        {
            frozen_set.tris[t] = true;
        }
    }
    frozen_set.close(&surface);
    let flow = Flow {
        name: name.into(),
        charts,
        vertex_field: None,
        bump_scale: BUMP_SCALE,
        tagged,
        frozen_set: Some(frozen_set),
    };
    Ok(Fixture { name: name.into(), surface, k, flow, genus, ks, annulus_variant: variant })
}

/// Flow on a genus-`g` surface with a frozen core K whose region of
/// influence has one component per entry of `ks`: a disk cap for 0, a
/// pinched annulus for 1, a `k`-handle for `k ≥ 2`.
pub fn generator(g: u32, ks: &[usize], level: usize) -> Result<Fixture> {
    let ks: Vec<usize> = if ks.is_empty() && g == 0 { vec![0] } else { ks.to_vec() };
    let sum: usize = ks.iter().sum();
    if sum != g as usize {
        return Err(Error::Param(format!("partition {ks:?} sums to {sum}, expected g = {g}")));
    }
    let caps: Vec<Cap> = ks
        .iter()
        .map(|&k| match k {
            0 => Cap::Disk,
            1 => Cap::Annulus(AnnulusVariant::DegenerateSaddle),
            k => Cap::Handle(k),
        })
        .collect();
    let variant = ks.contains(&1).then_some(AnnulusVariant::DegenerateSaddle);
    let name = format!("generator-{g}-{}", ks.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","));
    assemble(&name, &caps, level, g, ks, variant)
}

/// Genus 2: core with four holes and two annuli made of homoclinic orbits.
pub fn example1_fixture(level: usize) -> Result<Fixture> {
    let caps = [Cap::Annulus(AnnulusVariant::HomoclinicFibered), Cap::Annulus(AnnulusVariant::HomoclinicFibered)];
    assemble("example1", &caps, level, 2, vec![], Some(AnnulusVariant::HomoclinicFibered))
}

/// Genus 2: one purely repelled cap around a frozen disk and one 2-handle
/// carrying a hyperbolic saddle.
pub fn example2_fixture(level: usize) -> Result<Fixture> {
    let caps = [Cap::RepelledRegion, Cap::Handle(2)];
    assemble("example2", &caps, level, 2, vec![], None)
}

/// Torus with K a frozen torus-minus-disk and a repelling disk cap.
pub fn torus_nonsep(level: usize) -> Result<Fixture> {
    let core = core_piece(3, level)?;
    let a = annulus_piece(level);
    let d = disk_piece(level);
    let pattern = GluePattern { pairs: vec![(0, 0, 0), (1, 0, 1), (2, 1, 0)], preserve_direction: false };
    let (surface, core_k) = glue(&core, &[&a, &d], &pattern)?;
    // the annulus is frozen together with the core
    let mut k = core_k;
    for t in 0..surface.num_triangles() {
        if surface.chart_of(t) == 1 {
            k.tris[t] = true;
        }
    }
    k.close(&surface);
    let (disk_cf, mut tags) = disk_content(&d, 2);
    let ann_circles = a.mesh.charts()[0].circles.clone();
    for circle in ann_circles {
        tags.push(TaggedFixedPoint {
            kind: FixedKind::CircleOfFixedPoints,
            locus: Locus::Circle { chart: 1, circle },
            in_k: true,
        });
    }
    let flow = Flow {
        name: "torus-nonsep".into(),
        charts: vec![ChartFlow::default(), ChartFlow::default(), disk_cf],
        vertex_field: None,
        bump_scale: BUMP_SCALE,
        tagged: tags,
        frozen_set: Some(k.clone()),
    };
    Ok(Fixture { name: "torus-nonsep".into(), surface, k, flow, genus: 1, ks: vec![], annulus_variant: None })
}

/// Equator of the subdivided octahedron as a 1-dimensional subcomplex.
pub fn equator(m: &TriMesh) -> Subcomplex {
    let mut s = Subcomplex::empty(m);
    for t in 0..m.num_triangles() {
        for &v in &m.triangle(t) {
            if m.corner_of(t, v).unwrap()[2] == 0.0 {
                s.verts[v] = true;
            }
        }
    }
    for (e, &[a, b]) in m.edges().iter().enumerate() {
        s.edges[e] = s.verts[a] && s.verts[b];
    }
    s
}

/// Triangles of the equatorial band `|latitude| ≤ BAND_HALF_WIDTH`.
pub fn equatorial_band(m: &TriMesh) -> Subcomplex {
    let mask: Vec<bool> =
        (0..m.num_triangles()).map(|t| latitude(geom::centroid(m.corners(t))).abs() <= BAND_HALF_WIDTH).collect();
    Subcomplex::from_triangle_mask(m, &mask)
}

fn sphere_flow(name: &str, field: SphereField) -> Flow {
    let x = |k, a: Vec3| TaggedFixedPoint { kind: k, locus: Locus::Point { chart: 0, at: a }, in_k: false };
    let mut tagged = vec![x(FixedKind::Repelling, [0.0, 0.0, 1.0]), x(FixedKind::Repelling, [0.0, 0.0, -1.0])];
    if field.scale < 0.0 {
        for t in &mut tagged {
            t.kind = FixedKind::Attracting;
        }
    }
    let still = field.drift == 0.0 && field.lift == 0.0 && field.push == 0.0;
    if still {
        tagged.push(TaggedFixedPoint {
            kind: FixedKind::CircleOfFixedPoints,
            locus: Locus::Circle { chart: 0, circle: crate::mesh::Circle::new([0.0, 0.0], 1.0, 4) },
            in_k: true,
        });
    } else if field.push == 0.0 {
        tagged.push(TaggedFixedPoint {
            kind: FixedKind::DegenerateSaddle,
            locus: Locus::Point { chart: 0, at: [1.0, 0.0, 0.0] },
            in_k: true,
        });
    }
    Flow {
        name: name.into(),
        charts: vec![ChartFlow { field: Some(Arc::new(field)), frozen: vec![] }],
        vertex_field: None,
        bump_scale: BUMP_SCALE,
        tagged,
        frozen_set: None,
    }
}

/// Sphere fixture of the circle family at a fixed parameter.
pub fn sphere_circle(lambda: f64, subdiv: usize) -> Fixture {
    let surface = build_sphere(subdiv);
    let k = equator(&surface);
    let mut flow = sphere_flow("sphere-circle", SphereField::circle(lambda));
    if lambda == 0.0 {
        flow.frozen_set = Some(k.clone());
    }
    Fixture { name: format!("sphere-circle-{lambda}"), surface, k, flow, genus: 0, ks: vec![], annulus_variant: None }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    SphereCircle,
    ConstantNonsaddle,
    ConstantSaddle,
    Empty,
    Reversed,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 5] = [
        FamilyKind::SphereCircle,
        FamilyKind::ConstantNonsaddle,
        FamilyKind::ConstantSaddle,
        FamilyKind::Empty,
        FamilyKind::Reversed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::SphereCircle => "sphere-circle",
            FamilyKind::ConstantNonsaddle => "constant-nonsaddle",
            FamilyKind::ConstantSaddle => "constant-saddle",
            FamilyKind::Empty => "empty",
            FamilyKind::Reversed => "reversed",
        }
    }
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FamilyKind::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| Error::Param(format!("unknown family {s}")))
    }
}

/// λ-family of flows on a fixed surface with a fixed block.
#[derive(Clone, Debug)]
pub struct FlowFamily {
    pub kind: FamilyKind,
    pub surface: TriangulatedSurface,
    pub block: Subcomplex,
    /// Sampled Lipschitz constant of the field in λ.
    pub modulus: f64,
}

impl FlowFamily {
    pub fn new(kind: FamilyKind, subdiv: usize) -> Self {
        let surface = build_sphere(subdiv);
        let block = equatorial_band(&surface);
        let modulus = match kind {
            FamilyKind::SphereCircle => 2.0 * (CIRCLE_DRIFT + CIRCLE_LIFT),
            FamilyKind::Empty => EMPTY_PUSH,
            FamilyKind::Reversed => 2.0,
            FamilyKind::ConstantNonsaddle | FamilyKind::ConstantSaddle => 0.0,
        };
        FlowFamily { kind, surface, block, modulus }
    }

    pub fn field(&self, lambda: f64) -> SphereField {
        match self.kind {
            FamilyKind::SphereCircle => SphereField::circle(lambda),
            FamilyKind::ConstantNonsaddle => SphereField::circle(0.0),
            FamilyKind::ConstantSaddle => SphereField::circle(SADDLE_LAMBDA),
            FamilyKind::Empty => SphereField { drift: 0.0, lift: 0.0, push: EMPTY_PUSH * lambda, scale: 1.0 },
            FamilyKind::Reversed => SphereField { scale: 1.0 - 2.0 * lambda, ..SphereField::circle(0.0) },
        }
    }

    pub fn flow(&self, lambda: f64) -> Flow {
        sphere_flow(&format!("{}@{lambda}", self.kind.name()), self.field(lambda))
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.surface
    }
}

pub fn sphere_circle_family() -> FlowFamily {
    FlowFamily::new(FamilyKind::SphereCircle, FAMILY_SUBDIV)
}

/// Whether chart `c` of `m` is the sphere chart.
pub fn is_sphere_chart(m: &TriMesh, c: usize) -> bool {
    m.charts()[c].kind == ChartKind::Sphere
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{integrate, Integrator, Point};
    use crate::mesh::Locator;

    fn locate(m: &TriMesh, chart: usize, p: Vec3) -> Point {
        let t = Locator::new(m).locate(m, chart, p).expect("point lies in the chart");
        Point { tri: t, pos: p }
    }

    /// Every vertex, edge midpoint and centroid of the frozen set is still.
    fn assert_frozen_fidelity(m: &TriMesh, f: &Flow) {
        let s = f.frozen_set.as_ref().unwrap();
        for t in 0..m.num_triangles() {
            let tri = m.triangle(t);
            let c = m.corners(t);
            for i in 0..3 {
                if s.verts[tri[i]] {
                    assert_eq!(f.velocity(m, t, c[i]), [0.0; 3], "vertex {} in triangle {t}", tri[i]);
                }
                let e = m.tri_edges(t)[i];
                if s.edges[e] {
                    let mid = geom::midpoint(c[i], c[(i + 1) % 3]);
                    assert_eq!(f.velocity(m, t, mid), [0.0; 3], "edge {e}");
                }
            }
            if s.tris[t] {
                assert_eq!(f.velocity(m, t, geom::centroid(c)), [0.0; 3]);
            }
        }
    }

    #[test]
    fn builtin_frozen_sets_are_exactly_still() {
        for fx in [
            generator(2, &[1, 1], 0).unwrap(),
            generator(2, &[0, 2], 0).unwrap(),
            example1_fixture(0).unwrap(),
            example2_fixture(0).unwrap(),
            torus_nonsep(0).unwrap(),
            sphere_circle(0.0, 3),
        ] {
            assert_frozen_fidelity(&fx.surface, &fx.flow);
        }
        for p in [disk_flow(1), annulus_flow(AnnulusVariant::DegenerateSaddle, 0), handle_flow(3, 0).unwrap()] {
            assert_frozen_fidelity(&p.piece.mesh, &p.flow);
        }
    }

    #[test]
    fn field_vanishes_at_tagged_points() {
        let fx = generator(3, &[0, 1, 2], 0).unwrap();
        let m = &fx.surface;
        for tag in &fx.flow.tagged {
            if let Locus::Point { chart, at } = tag.locus {
                let p = locate(m, chart, at);
                assert!(geom::norm(fx.flow.velocity(m, p.tri, at)) < 1e-9, "{tag:?}");
            }
        }
    }

    #[test]
    fn continuous_across_seams() {
        // both sides of every seam are frozen, so the field agrees (at zero)
        let fx = generator(2, &[0, 2], 0).unwrap();
        let m = &fx.surface;
        for (e, &[a, b]) in m.edges().iter().enumerate() {
            let ts = m.edge_triangles(e);
            if m.chart_of(ts[0]) == m.chart_of(ts[1]) {
                continue;
            }
            for &t in ts {
                let mid = geom::midpoint(m.corner_of(t, a).unwrap(), m.corner_of(t, b).unwrap());
                assert_eq!(fx.flow.velocity(m, t, mid), [0.0; 3]);
            }
        }
    }

    #[test]
    fn generator_rejects_bad_partitions() {
        assert!(matches!(generator(2, &[1], 0), Err(Error::Param(_))));
        let s = generator(0, &[], 0).unwrap();
        assert_eq!(s.surface.genus(), 0);
        assert_eq!(s.ks, vec![0]);
    }

    #[test]
    fn tagged_counts_follow_the_partition() {
        let fx = generator(3, &[0, 1, 2], 0).unwrap();
        let count = |k| fx.flow.isolated_fixed_points().filter(|t| t.kind == k).count();
        assert_eq!(count(FixedKind::Attracting), 1);
        assert_eq!(count(FixedKind::DegenerateSaddle), 1);
        assert_eq!(count(FixedKind::HyperbolicSaddle), 1);
        let h = handle_flow(3, 0).unwrap();
        assert_eq!(h.flow.isolated_fixed_points().count(), 2);
        assert_eq!(h.piece.boundary.len(), 4);
    }

    #[test]
    fn disk_orbit_runs_from_boundary_to_centre() {
        let d = disk_flow(1);
        let m = &d.piece.mesh;
        let x = locate(m, 0, [0.5, 0.0, 0.0]);
        let fwd = integrate(m, &d.flow, x, 30.0, 0.01).unwrap().last();
        assert!(geom::norm(fwd.pos) < 1e-6);
        let back = integrate(m, &d.flow, x, -200.0, 0.01).unwrap().last();
        assert!(1.0 - geom::norm(back.pos) < 0.02);
    }

    #[test]
    fn pinched_fibre_ends_at_the_degenerate_saddle() {
        let a = annulus_flow(AnnulusVariant::DegenerateSaddle, 0);
        let m = &a.piece.mesh;
        // a quarter of the way from the inner circle along the pinched fibre
        let x = locate(m, 0, [0.7, 0.0, 0.0]);
        let end = integrate(m, &a.flow, x, 200.0, 0.01).unwrap().last();
        assert!(geom::dist(end.pos, [1.0, 0.0, 0.0]) < 0.01);
        for variant in [AnnulusVariant::HomoclinicFibered, AnnulusVariant::DegenerateSaddle] {
            let a = annulus_flow(variant, 0);
            let m = &a.piece.mesh;
            let x = locate(m, 0, [0.0, 1.0, 0.0]);
            let f = integrate(m, &a.flow, x, 200.0, 0.01).unwrap().last();
            let b = integrate(m, &a.flow, x, -200.0, 0.01).unwrap().last();
            assert!(1.6 - geom::norm(f.pos) < 0.02);
            assert!(geom::norm(b.pos) - 0.4 < 0.02);
        }
    }

    #[test]
    fn handle_saddle_has_one_expanding_and_one_contracting_direction() {
        for k in [2, 3] {
            let h = handle_flow(k, 0).unwrap();
            let m = &h.piece.mesh;
            for tag in h.flow.isolated_fixed_points() {
                let Locus::Point { at, .. } = tag.locus else { unreachable!() };
                let e = 1e-5;
                let v = |dx: f64, dy: f64| {
                    let p = [at[0] + dx, at[1] + dy, 0.0];
                    let t = locate(m, 0, p);
                    h.flow.velocity(m, t.tri, p)
                };
                let (vx, vy) = (
                    geom::scale(geom::sub(v(e, 0.0), v(-e, 0.0)), 0.5 / e),
                    geom::scale(geom::sub(v(0.0, e), v(0.0, -e)), 0.5 / e),
                );
                let (tr, det) = (vx[0] + vy[1], vx[0] * vy[1] - vx[1] * vy[0]);
                assert!(det < 0.0, "saddle needs eigenvalues of opposite sign: tr {tr} det {det}");
            }
        }
    }

    #[test]
    fn off_separatrix_point_reaches_the_attracting_circle() {
        let h = handle_flow(2, 0).unwrap();
        let m = &h.piece.mesh;
        let x = locate(m, 0, [0.33, 0.41, 0.0]);
        let end = integrate(m, &h.flow, x, 300.0, 0.01).unwrap().last();
        let outer = handle_layout(2).outer_radius;
        assert!(outer - geom::norm(end.pos) < 0.02);
    }

    #[test]
    fn sphere_family_at_zero_attracts_to_the_equator() {
        let fam = sphere_circle_family();
        let m = fam.mesh();
        let f = fam.flow(0.0);
        let x = locate(m, 0, geom::normalize([0.3, 0.7, 0.2]));
        let end = integrate(m, &f, x, 40.0, 0.01).unwrap().last();
        assert!(latitude(end.pos).abs() < 1e-6);
    }

    #[test]
    fn saddle_witness_leaves_the_band_both_ways() {
        let fam = sphere_circle_family();
        let m = fam.mesh();
        let f = fam.flow(0.2);
        let it = Integrator::new(m, &f, 0.01).unwrap();
        let p = geom::normalize([0.1f64.cos(), 0.1f64.sin(), 0.05]);
        let x = locate(m, 0, p);
        let band = equatorial_band(m);
        for dir in [1.0, -1.0] {
            let mut left = false;
            it.follow(x, dir * 200.0, |_, q| {
                left = !band.tris[q.tri];
                !left
            });
            assert!(left, "direction {dir}");
        }
    }

    #[test]
    fn sphere_family_is_continuous_in_lambda() {
        let fam = sphere_circle_family();
        let m = fam.mesh();
        for t in (0..m.num_triangles()).step_by(37) {
            let c = geom::centroid(m.corners(t));
            for i in 0..10 {
                let (l0, l1) = (i as f64 * 0.05, i as f64 * 0.05 + 1e-4);
                let d = geom::dist(fam.flow(l0).velocity(m, t, c), fam.flow(l1).velocity(m, t, c));
                assert!(d <= fam.modulus * 1e-4 + 1e-12);
            }
        }
    }
}
