//! RK4 integration with walking point location across charts.

use super::Flow;
use crate::error::{Error, Result};
use crate::geom::{self, Vec3};
use crate::mesh::{chart_coords, ChartKind, TriMesh};

/// A point of the surface: a triangle and a position in that triangle's chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub tri: usize,
    pub pos: Vec3,
}

impl Point {
    pub fn centroid(m: &TriMesh, t: usize) -> Point {
        Point { tri: t, pos: geom::centroid(m.corners(t)) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    TimeHorizon,
    /// The visitor asked to stop.
    Stopped,
    /// The orbit crossed the boundary of a surface with boundary.
    LeftDomain,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    /// `(signed time, point)` samples, starting with the initial point.
    pub samples: Vec<(f64, Point)>,
    pub reason: Termination,
}

impl Trajectory {
    pub fn last(&self) -> Point {
        self.samples.last().expect("a trajectory has its initial point").1
    }
}

const WALK_LIMIT: usize = 256;
const WALK_EPS: f64 = 1e-12;

pub struct Integrator<'a> {
    pub mesh: &'a TriMesh,
    pub flow: &'a Flow,
    pub step: f64,
}

impl<'a> Integrator<'a> {
    pub fn new(mesh: &'a TriMesh, flow: &'a Flow, step: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::Integration(format!("step must be positive and finite, got {step}")));
        }
        if flow.charts.len() != mesh.charts().len() {
            return Err(Error::Param(format!(
                "flow has {} charts but the mesh has {}",
                flow.charts.len(),
                mesh.charts().len()
            )));
        }
        Ok(Integrator { mesh, flow, step })
    }

    pub fn velocity(&self, x: &Point) -> Vec3 {
        self.flow.velocity(self.mesh, x.tri, x.pos)
    }

    /// Walk from triangle `t` towards the triangle containing chart point `p`,
    /// changing charts across seams. `None` when the walk leaves the surface.
    pub fn relocate(&self, t: usize, p: Vec3) -> Option<Point> {
        let m = self.mesh;
        let (mut t, mut p) = (t, p);
        if m.charts()[m.chart_of(t)].kind == ChartKind::Sphere {
            p = geom::normalize(p);
        }
        let mut prev = usize::MAX;
        for _ in 0..WALK_LIMIT {
            let c = chart_coords(m, t, p);
            let mut i = 0;
            for j in 1..3 {
                if c[j] < c[i] {
                    i = j;
                }
            }
            if c[i] >= -WALK_EPS {
                return Some(Point { tri: t, pos: p });
            }
            let e = m.tri_edges(t)[(i + 1) % 3];
            let u = m.edge_triangles(e).iter().copied().find(|&u| u != t)?;
            if u == prev {
                // oscillating across an edge the point sits on
                return Some(Point { tri: t, pos: p });
            }
            if m.chart_of(u) != m.chart_of(t) {
                p = self.transfer(t, u, e, p);
            }
            prev = t;
            t = u;
        }
        Some(Point { tri: t, pos: p })
    }

    /// Similarity map from the chart of `t` to the chart of `u` fixing their shared edge.
    fn transfer(&self, t: usize, u: usize, e: usize, p: Vec3) -> Vec3 {
        let m = self.mesh;
        let [a, b] = m.edges()[e];
        let (pa, pb) = (m.corner_of(t, a).unwrap(), m.corner_of(t, b).unwrap());
        let (qa, qb) = (m.corner_of(u, a).unwrap(), m.corner_of(u, b).unwrap());
        if m.charts()[m.chart_of(t)].kind == ChartKind::Sphere {
            return p;
        }
        let d = [pb[0] - pa[0], pb[1] - pa[1]];
        let q = [qb[0] - qa[0], qb[1] - qa[1]];
        let den = d[0] * d[0] + d[1] * d[1];
        // ratio q/d as a complex number
        let r = [(q[0] * d[0] + q[1] * d[1]) / den, (q[1] * d[0] - q[0] * d[1]) / den];
        let z = [p[0] - pa[0], p[1] - pa[1]];
        [qa[0] + r[0] * z[0] - r[1] * z[1], qa[1] + r[0] * z[1] + r[1] * z[0], 0.0]
    }

    /// One RK4 step of signed size `h`.
    pub fn rk4(&self, x: &Point, h: f64) -> Option<Point> {
        let m = self.mesh;
        let f = |p: Vec3| self.flow.velocity(m, x.tri, p);
        let k1 = f(x.pos);
        let k2 = f(geom::axpy(x.pos, 0.5 * h, k1));
        let k3 = f(geom::axpy(x.pos, 0.5 * h, k2));
        let k4 = f(geom::axpy(x.pos, h, k3));
        let mut d = geom::add(geom::add(k1, k4), geom::scale(geom::add(k2, k3), 2.0));
        d = geom::scale(d, h / 6.0);
        if d == [0.0; 3] {
            return Some(*x);
        }
        self.relocate(x.tri, geom::add(x.pos, d))
    }

    /// Follow the orbit of `x` for signed time `duration`, calling `visit`
    /// after every step; the visitor returns `false` to stop.
    pub fn follow<F: FnMut(f64, &Point) -> bool>(
        &self,
        x: Point,
        duration: f64,
        mut visit: F,
    ) -> (Point, f64, Termination) {
        let dir = duration.signum();
        let total = duration.abs();
        let mut t = 0.0;
        let mut p = x;
        while t < total {
            if self.velocity(&p) == [0.0; 3] {
                // rest point: the orbit is constant
                return (p, dir * total, Termination::TimeHorizon);
            }
            let h = self.step.min(total - t);
            match self.rk4(&p, dir * h) {
                Some(q) => p = q,
                None => return (p, dir * t, Termination::LeftDomain),
            }
            t += h;
            if !visit(dir * t, &p) {
                return (p, dir * t, Termination::Stopped);
            }
        }
        (p, dir * total, Termination::TimeHorizon)
    }
}

/// Sampled orbit segment over signed time `duration`.
pub fn integrate(m: &TriMesh, flow: &Flow, x: Point, duration: f64, step: f64) -> Result<Trajectory> {
    let it = Integrator::new(m, flow, step)?;
    let mut samples = vec![(0.0, x)];
    let (_, _, reason) = it.follow(x, duration, |t, p| {
        samples.push((t, *p));
        true
    });
    Ok(Trajectory { samples, reason })
}

/// Time-`tau` map; `None` if the orbit leaves the surface first.
pub fn time_tau_map(m: &TriMesh, flow: &Flow, x: Point, tau: f64, step: f64) -> Result<Option<Point>> {
    let it = Integrator::new(m, flow, step)?;
    let (p, _, reason) = it.follow(x, tau, |_, _| true);
    Ok((reason != Termination::LeftDomain).then_some(p))
}

/// Membership test for the exit and entrance times.
pub trait Region {
    fn contains(&self, x: &Point) -> bool;
}

/// Union of closed triangles given by a mask.
pub struct CellRegion<'a> {
    pub cells: &'a [bool],
}

impl Region for CellRegion<'_> {
    fn contains(&self, x: &Point) -> bool {
        self.cells[x.tri]
    }
}

impl<F: Fn(&Point) -> bool> Region for F {
    fn contains(&self, x: &Point) -> bool {
        self(x)
    }
}

/// `sup{t ≥ 0 : x[0,t] ⊂ N}` for signed direction `dir`, or `None` when the
/// orbit stays in `N` up to `t_max`.
fn first_exit(it: &Integrator, region: &dyn Region, x: Point, dir: f64, t_max: f64) -> Option<f64> {
    if !region.contains(&x) {
        return Some(0.0);
    }
    let mut last = (0.0, x);
    let (_, t_end, reason) = it.follow(x, dir * t_max, |t, p| {
        if region.contains(p) {
            last = (t.abs(), *p);
            true
        } else {
            false
        }
    });
    if reason == Termination::TimeHorizon {
        return None;
    }
    // bisect the crossing inside the final step
    let (t0, p0) = last;
    let mut lo = 0.0;
    let mut hi = if reason == Termination::LeftDomain { it.step } else { (t_end.abs() - t0).max(0.0) };
    let inside = |h: f64| it.rk4(&p0, dir * h).is_some_and(|q| region.contains(&q));
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(t0 + 0.5 * (lo + hi))
}

/// Exit time `t^o(x)` from `region`.
pub fn exit_time(
    m: &TriMesh,
    flow: &Flow,
    region: &dyn Region,
    x: Point,
    step: f64,
    t_max: f64,
) -> Result<Option<f64>> {
    let it = Integrator::new(m, flow, step)?;
    Ok(first_exit(&it, region, x, 1.0, t_max))
}

/// Entrance time `t^i(x)`: the exit time of the reversed flow.
pub fn entrance_time(
    m: &TriMesh,
    flow: &Flow,
    region: &dyn Region,
    x: Point,
    step: f64,
    t_max: f64,
) -> Result<Option<f64>> {
    let it = Integrator::new(m, flow, step)?;
    Ok(first_exit(&it, region, x, -1.0, t_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::ChartField;
    use crate::mesh::{build_sphere, disk_piece, Locator, Subcomplex};
    use std::sync::Arc;

    #[derive(Debug)]
    struct Rotation;
    impl ChartField for Rotation {
        fn velocity(&self, p: Vec3) -> Vec3 {
            [-p[1], p[0], 0.0]
        }
    }

    #[test]
    fn rotation_returns_after_a_period() {
        let d = disk_piece(0);
        let mut f = Flow::zero(&d.mesh);
        f.charts[0].field = Some(Arc::new(Rotation));
        let loc = Locator::new(&d.mesh);
        let x0 = [0.5, 0.0, 0.0];
        let t = loc.locate(&d.mesh, 0, x0).unwrap();
        let tr = integrate(&d.mesh, &f, Point { tri: t, pos: x0 }, std::f64::consts::TAU, 0.01).unwrap();
        let end = tr.last();
        assert_eq!(tr.reason, Termination::TimeHorizon);
        assert!(geom::dist(end.pos, x0) < 1e-8);
        assert!(crate::mesh::triangle_contains(&d.mesh, end.tri, end.pos, 1e-9));
    }

    #[test]
    fn sphere_rotation_stays_on_the_sphere() {
        let s = build_sphere(2);
        let mut f = Flow::zero(&s);
        f.charts[0].field = Some(Arc::new(Rotation));
        let x0 = geom::normalize([0.6, 0.1, 0.3]);
        let t = Locator::new(&s).locate(&s, 0, x0).unwrap();
        let tr = integrate(&s, &f, Point { tri: t, pos: x0 }, std::f64::consts::TAU, 0.01).unwrap();
        let end = tr.last();
        assert!((geom::norm(end.pos) - 1.0).abs() < 1e-12);
        assert!(geom::dist(end.pos, x0) < 1e-7);
        assert!(crate::mesh::triangle_contains(&s, end.tri, end.pos, 1e-9));
    }

    #[test]
    fn backward_then_forward_is_identity() {
        let d = disk_piece(1);
        let mut f = Flow::zero(&d.mesh);
        f.charts[0].field = Some(Arc::new(Rotation));
        let x = Point::centroid(&d.mesh, 17);
        let fwd = integrate(&d.mesh, &f, x, 1.3, 0.01).unwrap().last();
        let back = integrate(&d.mesh, &f, fwd, -1.3, 0.01).unwrap().last();
        assert!(geom::dist(back.pos, x.pos) < 1e-9);
    }

    #[test]
    fn region_not_containing_start_has_zero_exit_time() {
        let d = disk_piece(0);
        let f = Flow::zero(&d.mesh);
        let none = Subcomplex::empty(&d.mesh);
        let r = CellRegion { cells: &none.tris };
        let x = Point::centroid(&d.mesh, 0);
        assert_eq!(exit_time(&d.mesh, &f, &r, x, 0.01, 10.0).unwrap(), Some(0.0));
        let all = Subcomplex::full(&d.mesh);
        let r = CellRegion { cells: &all.tris };
        assert_eq!(exit_time(&d.mesh, &f, &r, x, 0.01, 10.0).unwrap(), None);
    }

    #[test]
    fn bad_step_is_rejected() {
        let d = disk_piece(0);
        let f = Flow::zero(&d.mesh);
        assert!(Integrator::new(&d.mesh, &f, 0.0).is_err());
        assert!(Integrator::new(&d.mesh, &f, f64::NAN).is_err());
    }
}
