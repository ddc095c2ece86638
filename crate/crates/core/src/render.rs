//! SVG phase portraits drawn on the chart atlas.

use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{k_cells, Label};
use crate::error::{Error, Result};
use crate::flow::{latitude, longitude, FixedKind, Flow, Integrator, Locus, Point, TaggedFixedPoint};
use crate::geom::{self, Vec3};
use crate::mesh::{ChartKind, Locator, Subcomplex, TriMesh};

use std::f64::consts::{PI, TAU};

#[derive(Clone, Debug)]
pub struct RenderOptions {
    /// Height of every chart panel in pixels.
    pub height: f64,
    pub streamlines: usize,
    pub seed: u64,
    pub step: f64,
    /// Integration time of each streamline.
    pub length: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { height: 360.0, streamlines: 120, seed: 1, step: 0.01, length: 4.0 }
    }
}

const MARGIN: f64 = 16.0;

fn label_colour(l: Label) -> &'static str {
    match l {
        Label::InK => "#8c8c8c",
        Label::Homoclinic => "#b48ad6",
        Label::PurelyAttracted => "#8fb8e8",
        Label::PurelyRepelled => "#f0a58a",
        Label::OutsideInfluence => "#ffffff",
        Label::Undetermined => "#f3e37a",
    }
}

/// Planar drawing coordinates of a chart point: the point itself for plane
/// charts, (longitude, latitude) for the sphere.
fn project(kind: ChartKind, p: Vec3) -> [f64; 2] {
    match kind {
        ChartKind::Plane => [p[0], p[1]],
        ChartKind::Sphere => [longitude(p), latitude(p)],
    }
}

/// Projected corners; sphere triangles across the longitude seam are
/// unwrapped to the right.
fn project_triangle(kind: ChartKind, c: &[Vec3; 3]) -> [[f64; 2]; 3] {
    let mut q = c.map(|p| project(kind, p));
    if kind == ChartKind::Sphere {
        let lo = q.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let hi = q.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        if hi - lo > PI {
            for p in &mut q {
                if p[0] < PI {
                    p[0] += TAU;
                }
            }
        }
        // a pole corner takes the mean longitude of the other two
        for i in 0..3 {
            if c[i][0].hypot(c[i][1]) < 1e-12 {
                q[i][0] = 0.5 * (q[(i + 1) % 3][0] + q[(i + 2) % 3][0]);
            }
        }
    }
    q
}

/// Panel placement of one chart: drawing coordinates to pixels.
struct Panel {
    kind: ChartKind,
    min: [f64; 2],
    scale: f64,
    offset: f64,
    width: f64,
}

impl Panel {
    fn px(&self, q: [f64; 2], height: f64) -> (f64, f64) {
        let x = self.offset + MARGIN + (q[0] - self.min[0]) * self.scale;
        // y grows downwards in SVG
        let y = height - MARGIN - (q[1] - self.min[1]) * self.scale;
        (x, y)
    }
}

fn panels(m: &TriMesh, height: f64) -> Vec<Panel> {
    let n = m.charts().len();
    let mut lo = vec![[f64::INFINITY; 2]; n];
    let mut hi = vec![[f64::NEG_INFINITY; 2]; n];
    for t in 0..m.num_triangles() {
        let c = m.chart_of(t);
        for q in project_triangle(m.charts()[c].kind, m.corners(t)) {
            for a in 0..2 {
                lo[c][a] = lo[c][a].min(q[a]);
                hi[c][a] = hi[c][a].max(q[a]);
            }
        }
    }
    let mut offset = 0.0;
    let mut out = Vec::with_capacity(n);
    for c in 0..n {
        let (w, h) = ((hi[c][0] - lo[c][0]).max(1e-9), (hi[c][1] - lo[c][1]).max(1e-9));
        let scale = (height - 2.0 * MARGIN) / h;
        let width = w * scale + 2.0 * MARGIN;
        out.push(Panel { kind: m.charts()[c].kind, min: lo[c], scale, offset, width });
        offset += width;
    }
    out
}

fn points_attr(pts: &[(f64, f64)]) -> String {
    let mut s = String::new();
    for (i, (x, y)) in pts.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{x:.2},{y:.2}");
    }
    s
}

fn polyline(out: &mut String, pts: &[(f64, f64)], style: &str) {
    if pts.len() >= 2 {
        let _ = writeln!(out, r##"<polyline points="{}" {style}/>"##, points_attr(pts));
    }
}

/// Drawing-coordinate runs of an orbit, split at chart changes and seams.
fn orbit_runs(m: &TriMesh, samples: &[Point]) -> Vec<(usize, Vec<[f64; 2]>)> {
    let mut runs: Vec<(usize, Vec<[f64; 2]>)> = Vec::new();
    for p in samples {
        let c = m.chart_of(p.tri);
        let q = project(m.charts()[c].kind, p.pos);
        match runs.last_mut() {
            Some((rc, run)) if *rc == c && run.last().is_some_and(|l| (l[0] - q[0]).abs() < PI) => run.push(q),
            _ => runs.push((c, vec![q])),
        }
    }
    runs
}

fn draw_orbit(out: &mut String, m: &TriMesh, panels: &[Panel], height: f64, samples: &[Point], style: &str) {
    for (c, run) in orbit_runs(m, samples) {
        let pts: Vec<(f64, f64)> = run.iter().map(|&q| panels[c].px(q, height)).collect();
        polyline(out, &pts, style);
    }
}

fn trace(it: &Integrator, x: Point, duration: f64) -> Vec<Point> {
    let mut pts = vec![x];
    it.follow(x, duration, |_, p| {
        pts.push(*p);
        true
    });
    pts
}

/// Jacobian of a planar chart field at `p` by central differences.
fn jacobian(m: &TriMesh, flow: &Flow, t: usize, p: Vec3) -> [[f64; 2]; 2] {
    let h = 1e-5;
    let mut j = [[0.0; 2]; 2];
    for a in 0..2 {
        let mut e = [0.0; 3];
        e[a] = h;
        let f1 = flow.raw_velocity(m, t, geom::add(p, e));
        let f0 = flow.raw_velocity(m, t, geom::sub(p, e));
        for b in 0..2 {
            j[b][a] = (f1[b] - f0[b]) / (2.0 * h);
        }
    }
    j
}

/// Eigenvectors `(stable, unstable)` of a 2×2 saddle Jacobian.
fn saddle_directions(j: [[f64; 2]; 2]) -> Option<([f64; 2], [f64; 2])> {
    let (a, b, c, d) = (j[0][0], j[0][1], j[1][0], j[1][1]);
    let tr = a + d;
    let det = a * d - b * c;
    let disc = tr * tr / 4.0 - det;
    if det >= 0.0 || disc <= 0.0 {
        return None;
    }
    let vec = |l: f64| {
        let v = if b.abs() > 1e-12 {
            [b, l - a]
        } else if c.abs() > 1e-12 {
            [l - d, c]
        } else if (l - a).abs() < 1e-12 {
            [1.0, 0.0]
        } else {
            [0.0, 1.0]
        };
        let n = v[0].hypot(v[1]);
        [v[0] / n, v[1] / n]
    };
    let s = disc.sqrt();
    Some((vec(tr / 2.0 - s), vec(tr / 2.0 + s)))
}

fn glyph(out: &mut String, kind: FixedKind, x: f64, y: f64) {
    let _ = match kind {
        FixedKind::Attracting => writeln!(out, r##"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="#1f4e8c"/>"##),
        FixedKind::Repelling => {
            writeln!(
                out,
                r##"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="white" stroke="#b2401c" stroke-width="1.5"/>"##
            )
        }
        FixedKind::HyperbolicSaddle => writeln!(
            out,
            r##"<path d="M{:.2},{:.2}L{:.2},{:.2}M{:.2},{:.2}L{:.2},{:.2}" stroke="black" stroke-width="2"/>"##,
            x - 4.0,
            y - 4.0,
            x + 4.0,
            y + 4.0,
            x - 4.0,
            y + 4.0,
            x + 4.0,
            y - 4.0
        ),
        FixedKind::DegenerateSaddle => writeln!(
            out,
            r##"<path d="M{x:.2},{:.2}L{:.2},{y:.2}L{x:.2},{:.2}L{:.2},{y:.2}Z" fill="black"/>"##,
            y - 5.0,
            x + 5.0,
            y + 5.0,
            x - 5.0
        ),
        FixedKind::CircleOfFixedPoints | FixedKind::StationaryRegion => Ok(()),
    };
}

fn draw_tag(out: &mut String, m: &TriMesh, panels: &[Panel], height: f64, tag: &TaggedFixedPoint) {
    let panel = &panels[tag.locus.chart()];
    match &tag.locus {
        Locus::Point { at, .. } => {
            let (x, y) = panel.px(project(panel.kind, *at), height);
            glyph(out, tag.kind, x, y);
        }
        Locus::Circle { circle, .. } => {
            let pts: Vec<(f64, f64)> =
                (0..=circle.n).map(|i| panel.px(project(panel.kind, circle.vertex(i)), height)).collect();
            let pts = if panel.kind == ChartKind::Sphere {
                // the equator of the sphere is a horizontal line in the panel
                let y = panel.px([0.0, 0.0], height).1;
                vec![(panel.offset + MARGIN, y), (panel.offset + panel.width - MARGIN, y)]
            } else {
                pts
            };
            polyline(out, &pts, r##"fill="none" stroke="#2b2b2b" stroke-width="3""##);
        }
        Locus::Disk { center, radius, .. } => {
            let (x, y) = panel.px(project(panel.kind, *center), height);
            let _ = writeln!(
                out,
                r##"<circle cx="{x:.2}" cy="{y:.2}" r="{:.2}" fill="none" stroke="#2b2b2b" stroke-width="2"/>"##,
                radius * panel.scale
            );
        }
        Locus::Cells { .. } => {}
    }
    let _ = m;
}

/// SVG drawing of the mesh and `k`; with `labels` (one per triangle) also
/// the trichotomy colours, streamlines, fixed-point glyphs and the
/// separatrices of hyperbolic saddles.
pub fn render_svg(
    m: &TriMesh,
    flow: &Flow,
    k: &Subcomplex,
    labels: Option<&[Label]>,
    opts: &RenderOptions,
) -> Result<String> {
    if let Some(l) = labels {
        if l.len() != m.num_triangles() {
            return Err(Error::Param(format!("{} labels for {} cells", l.len(), m.num_triangles())));
        }
    }
    let h = opts.height;
    let panels = panels(m, h);
    let width: f64 = panels.iter().map(|p| p.width).sum();
    let mut out = String::new();
    let _ = writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{h:.0}" viewBox="0 0 {width:.2} {h:.2}">"##
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="white"/>"##);

    let kc = k_cells(m, k);
    let has_k_tris = k.tris.iter().any(|&x| x);
    let _ = writeln!(out, r##"<g stroke="#d0d0d0" stroke-width="0.4">"##);
    for t in 0..m.num_triangles() {
        let panel = &panels[m.chart_of(t)];
        let q = project_triangle(panel.kind, m.corners(t));
        let pts: Vec<(f64, f64)> = q.iter().map(|&p| panel.px(p, h)).collect();
        let fill = match labels {
            Some(l) => label_colour(l[t]),
            None if has_k_tris && kc[t] => label_colour(Label::InK),
            None => "#ffffff",
        };
        let _ = writeln!(out, r##"<polygon points="{}" fill="{fill}"/>"##, points_attr(&pts));
    }
    let _ = writeln!(out, "</g>");

    // 1-dimensional parts of K
    let mut k_edges = String::new();
    for t in 0..m.num_triangles() {
        let panel = &panels[m.chart_of(t)];
        let tri = m.triangle(t);
        let q = project_triangle(panel.kind, m.corners(t));
        for i in 0..3 {
            let j = (i + 1) % 3;
            let Some(e) = m.edge_index(tri[i], tri[j]) else { continue };
            // each edge once, from its first triangle
            if k.edges[e] && !k.tris[t] && m.edge_triangles(e)[0] == t {
                let (a, b) = (panel.px(q[i], h), panel.px(q[j], h));
                let _ =
                    writeln!(k_edges, r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"##, a.0, a.1, b.0, b.1);
            }
        }
    }
    if !k_edges.is_empty() {
        let _ = writeln!(out, r##"<g stroke="#555555" stroke-width="2.5">"##);
        out.push_str(&k_edges);
        let _ = writeln!(out, "</g>");
    }

    if labels.is_some() {
        let it = Integrator::new(m, flow, opts.step)?;
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let _ = writeln!(out, r##"<g fill="none" stroke="#3a3a3a" stroke-width="0.7" stroke-opacity="0.7">"##);
        for _ in 0..opts.streamlines {
            let t = rng.gen_range(0..m.num_triangles());
            let (a, b): (f64, f64) = (rng.gen(), rng.gen());
            let (a, b) = if a + b > 1.0 { (1.0 - a, 1.0 - b) } else { (a, b) };
            let c = m.corners(t);
            let pos = geom::add(geom::add(geom::scale(c[0], 1.0 - a - b), geom::scale(c[1], a)), geom::scale(c[2], b));
            let pts = trace(&it, Point { tri: t, pos }, opts.length);
            draw_orbit(&mut out, m, &panels, h, &pts, "");
        }
        let _ = writeln!(out, "</g>");

        let locator = Locator::new(m);
        let _ = writeln!(out, r##"<g fill="none" stroke="#b2401c" stroke-width="1.4">"##);
        for tag in flow.tagged.iter().filter(|t| t.kind == FixedKind::HyperbolicSaddle) {
            let Locus::Point { chart, at } = tag.locus else { continue };
            if panels[chart].kind != ChartKind::Plane {
                continue;
            }
            let Some(t) = locator.locate(m, chart, at) else { continue };
            let Some((stable, unstable)) = saddle_directions(jacobian(m, flow, t, at)) else { continue };
            let eps = 1e-3;
            for (v, dir) in [(stable, -1.0), (unstable, 1.0)] {
                for sign in [1.0, -1.0] {
                    let p = [at[0] + sign * eps * v[0], at[1] + sign * eps * v[1], 0.0];
                    let Some(tp) = locator.locate(m, chart, p) else { continue };
                    let pts = trace(&it, Point { tri: tp, pos: p }, dir * 4.0 * opts.length);
                    draw_orbit(&mut out, m, &panels, h, &pts, "");
                }
            }
        }
        let _ = writeln!(out, "</g>");

        for tag in &flow.tagged {
            draw_tag(&mut out, m, &panels, h, tag);
        }
    }
    let _ = writeln!(out, "</svg>");
    Ok(out)
}
