use super::{ChartKind, TriMesh};
use crate::geom::{self, Vec3};

/// Generalised barycentric coordinates of `p` in triangle `t`, in that
/// triangle's chart. On the sphere these are the (unnormalised) signed
/// volumes against the opposite edges.
pub fn chart_coords(m: &TriMesh, t: usize, p: Vec3) -> [f64; 3] {
    let c = m.corners(t);
    match m.charts()[m.chart_of(t)].kind {
        ChartKind::Plane => geom::barycentric2d(p, c),
        ChartKind::Sphere => {
            let s = [
                geom::dot(geom::cross(c[1], c[2]), p),
                geom::dot(geom::cross(c[2], c[0]), p),
                geom::dot(geom::cross(c[0], c[1]), p),
            ];
            let tot = s[0] + s[1] + s[2];
            if tot <= 0.0 {
                // antipodal side
                [-1.0, -1.0, -1.0]
            } else {
                [s[0] / tot, s[1] / tot, s[2] / tot]
            }
        }
    }
}

pub fn triangle_contains(m: &TriMesh, t: usize, p: Vec3, eps: f64) -> bool {
    chart_coords(m, t, p).iter().all(|&x| x >= -eps)
}

/// Bucket grid over each chart for point location.
#[derive(Clone, Debug)]
pub struct Locator {
    grids: Vec<ChartGrid>,
}

#[derive(Clone, Debug)]
struct ChartGrid {
    lo: Vec3,
    cell: f64,
    dims: [usize; 3],
    buckets: Vec<Vec<usize>>,
}

impl ChartGrid {
    fn index(&self, p: Vec3) -> Option<usize> {
        let mut idx = [0usize; 3];
        for k in 0..3 {
            let f = ((p[k] - self.lo[k]) / self.cell).floor();
            if f < 0.0 || f >= self.dims[k] as f64 {
                return None;
            }
            idx[k] = f as usize;
        }
        Some((idx[2] * self.dims[1] + idx[1]) * self.dims[0] + idx[0])
    }
}

impl Locator {
    pub fn new(m: &TriMesh) -> Self {
        let mut grids = Vec::new();
        for chart in 0..m.charts().len() {
            let members: Vec<usize> = (0..m.num_triangles()).filter(|&t| m.chart_of(t) == chart).collect();
            let mut lo = [f64::INFINITY; 3];
            let mut hi = [f64::NEG_INFINITY; 3];
            let mut edge = 0.0;
            for &t in &members {
                let c = m.corners(t);
                for p in c {
                    for k in 0..3 {
                        lo[k] = lo[k].min(p[k]);
                        hi[k] = hi[k].max(p[k]);
                    }
                }
                edge += geom::dist(c[0], c[1]);
            }
            if members.is_empty() {
                grids.push(ChartGrid { lo: [0.0; 3], cell: 1.0, dims: [1, 1, 1], buckets: vec![vec![]] });
                continue;
            }
            let cell = (2.0 * edge / members.len() as f64).max(1e-9);
            let mut dims = [1usize; 3];
            for k in 0..3 {
                lo[k] -= 1e-9;
                dims[k] = (((hi[k] - lo[k]) / cell).ceil() as usize).max(1);
            }
            let mut g = ChartGrid { lo, cell, dims, buckets: vec![Vec::new(); dims[0] * dims[1] * dims[2]] };
            let sphere = m.charts()[chart].kind == ChartKind::Sphere;
            for &t in &members {
                let c = m.corners(t);
                // spherical triangles bulge past the chord bounding box
                let pad = if sphere {
                    let e = geom::dist(c[0], c[1]).max(geom::dist(c[1], c[2])).max(geom::dist(c[2], c[0]));
                    e * e
                } else {
                    0.0
                };
                let mut a = [usize::MAX; 3];
                let mut b = [0usize; 3];
                for k in 0..3 {
                    let mn = c.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min) - pad;
                    let mx = c.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max) + pad;
                    a[k] = (((mn - g.lo[k]) / cell).floor().max(0.0) as usize).min(dims[k] - 1);
                    b[k] = (((mx - g.lo[k]) / cell).floor().max(0.0) as usize).min(dims[k] - 1);
                }
                for z in a[2]..=b[2] {
                    for y in a[1]..=b[1] {
                        for x in a[0]..=b[0] {
                            g.buckets[(z * dims[1] + y) * dims[0] + x].push(t);
                        }
                    }
                }
            }
            grids.push(g);
        }
        Locator { grids }
    }

    /// A triangle of `chart` containing `p`, preferring the one with the
    /// largest minimum coordinate.
    pub fn locate(&self, m: &TriMesh, chart: usize, p: Vec3) -> Option<usize> {
        let g = self.grids.get(chart)?;
        let b = g.index(p)?;
        let mut best = None;
        let mut score = -1e-9;
        for &t in &g.buckets[b] {
            let c = chart_coords(m, t, p);
            let s = c[0].min(c[1]).min(c[2]);
            if s >= score {
                score = s;
                best = Some(t);
            }
        }
        best
    }
}
