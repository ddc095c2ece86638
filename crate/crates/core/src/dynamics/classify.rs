//! Trichotomy labels from forward and backward limit estimates.

use serde::{Deserialize, Serialize};

use super::AnalysisParams;
use crate::error::Result;
use crate::flow::{Flow, Integrator, Locus, Point, Termination};
use crate::geom;
use crate::mesh::{Subcomplex, TriMesh};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    InK,
    Homoclinic,
    PurelyAttracted,
    PurelyRepelled,
    OutsideInfluence,
    Undetermined,
}

impl Label {
    pub fn in_influence(self) -> bool {
        matches!(self, Label::Homoclinic | Label::PurelyAttracted | Label::PurelyRepelled)
    }

    /// Precedence when a cell's samples disagree.
    fn rank(self) -> u8 {
        match self {
            Label::Undetermined => 0,
            Label::InK => 1,
            Label::Homoclinic => 2,
            Label::PurelyAttracted => 3,
            Label::PurelyRepelled => 4,
            Label::OutsideInfluence => 5,
        }
    }

    /// Combine sample labels: undetermined and in-K samples only decide a
    /// cell when nothing else is known.
    pub fn merge(labels: impl IntoIterator<Item = Label>) -> Label {
        labels.into_iter().max_by_key(|l| l.rank()).unwrap_or(Label::Undetermined)
    }
}

/// Estimated limit set of one time direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    K,
    /// Index into the flow's tagged fixed points.
    Fixed(usize),
    /// Field below the stall threshold for the fixed-point dwell.
    Stalled,
    Undetermined,
}

const STALL_SPEED: f64 = 1e-9;

/// Triangles meeting `k`: its triangles when it has any, otherwise every
/// triangle with a vertex in `k`.
pub fn k_cells(m: &TriMesh, k: &Subcomplex) -> Vec<bool> {
    if k.tris.iter().any(|&x| x) {
        k.tris.clone()
    } else {
        (0..m.num_triangles()).map(|t| m.triangle(t).iter().any(|&v| k.verts[v])).collect()
    }
}

pub struct Classifier<'a> {
    pub it: Integrator<'a>,
    pub k_cells: Vec<bool>,
    pub near_k: Vec<bool>,
    pub k: &'a Subcomplex,
    loci: Vec<(usize, &'a Locus)>,
    params: &'a AnalysisParams,
}

impl<'a> Classifier<'a> {
    pub fn new(m: &'a TriMesh, flow: &'a Flow, k: &'a Subcomplex, params: &'a AnalysisParams) -> Result<Self> {
        let it = Integrator::new(m, flow, params.step)?;
        let kc = k_cells(m, k);
        let near_k = crate::mesh::star_cells(m, &kc, params.target_rings);
        let loci = flow.tagged.iter().enumerate().filter(|(_, t)| !t.in_k).map(|(i, t)| (i, &t.locus)).collect();
        Ok(Classifier { it, k_cells: kc, near_k, k, loci, params })
    }

    fn near_fixed(&self, x: &Point) -> Option<usize> {
        let chart = self.it.mesh.chart_of(x.tri);
        self.loci
            .iter()
            .find(|(_, l)| l.distance(chart, x.pos).is_some_and(|d| d < self.params.fixed_radius))
            .map(|&(i, _)| i)
    }

    /// The set the orbit of `x` settles at in direction `dir`.
    pub fn target(&self, x: Point, dir: f64) -> Target {
        let p = self.params;
        let mut k_since: Option<f64> = None;
        let mut fixed: Option<(usize, f64)> = None;
        let mut stall: Option<f64> = None;
        let mut found = Target::Undetermined;
        let (end, _, reason) = self.it.follow(x, dir * p.t_max, |t, q| {
            let t = t.abs();
            if self.near_k[q.tri] {
                let s = *k_since.get_or_insert(t);
                if t - s >= p.dwell {
                    found = Target::K;
                    return false;
                }
            } else {
                k_since = None;
            }
            match (self.near_fixed(q), fixed) {
                (Some(i), Some((j, s))) if i == j => {
                    if t - s >= p.fixed_dwell {
                        found = Target::Fixed(i);
                        return false;
                    }
                }
                (Some(i), _) => fixed = Some((i, t)),
                (None, _) => fixed = None,
            }
            if geom::norm(self.it.velocity(q)) < STALL_SPEED {
                let s = *stall.get_or_insert(t);
                if t - s >= p.fixed_dwell {
                    found = Target::Stalled;
                    return false;
                }
            } else {
                stall = None;
            }
            true
        });
        if reason == Termination::TimeHorizon && self.it.velocity(&end) == [0.0; 3] {
            // reached a rest point exactly
            return self.rest_target(&end);
        }
        found
    }

    fn rest_target(&self, x: &Point) -> Target {
        if self.k_cells[x.tri] || self.near_k[x.tri] {
            Target::K
        } else if let Some(i) = self.near_fixed(x) {
            Target::Fixed(i)
        } else {
            Target::Stalled
        }
    }

    /// Label of a sample; `vertex` names the mesh vertex when the sample is one.
    pub fn classify(&self, x: Point, vertex: Option<usize>) -> Label {
        if self.it.velocity(&x) == [0.0; 3] {
            let in_k = match vertex {
                Some(v) => self.k.verts[v],
                None => self.k.tris[x.tri],
            };
            return if in_k { Label::InK } else { Label::OutsideInfluence };
        }
        let fwd = self.target(x, 1.0);
        if fwd == Target::Undetermined {
            return Label::Undetermined;
        }
        let back = self.target(x, -1.0);
        match (fwd, back) {
            (_, Target::Undetermined) => Label::Undetermined,
            (Target::K, Target::K) => Label::Homoclinic,
            (Target::K, _) => Label::PurelyAttracted,
            (_, Target::K) => Label::PurelyRepelled,
            _ => Label::OutsideInfluence,
        }
    }
}

/// Label of one point of the surface.
pub fn classify_point(m: &TriMesh, flow: &Flow, k: &Subcomplex, x: Point, params: &AnalysisParams) -> Result<Label> {
    Ok(Classifier::new(m, flow, k, params)?.classify(x, None))
}

/// Labels of every cell: the merge of its vertex and centroid samples.
/// Vertex samples are shared between the cells around them.
pub fn label_cells(c: &Classifier) -> (Vec<Label>, usize, usize) {
    let m = c.it.mesh;
    let mut vertex_label: Vec<Option<Label>> = vec![None; m.num_vertices()];
    let mut labels = Vec::with_capacity(m.num_triangles());
    let mut samples = 0;
    let mut undetermined = 0;
    for t in 0..m.num_triangles() {
        if c.k_cells[t] {
            labels.push(Label::InK);
            continue;
        }
        let tri = m.triangle(t);
        let corners = m.corners(t);
        let mut ls = [Label::Undetermined; 4];
        for i in 0..3 {
            let v = tri[i];
            ls[i] = *vertex_label[v].get_or_insert_with(|| {
                let l = c.classify(Point { tri: t, pos: corners[i] }, Some(v));
                samples += 1;
                if l == Label::Undetermined {
                    undetermined += 1;
                }
                l
            });
        }
        ls[3] = c.classify(Point::centroid(m, t), None);
        samples += 1;
        if ls[3] == Label::Undetermined {
            undetermined += 1;
        }
        let mut l = Label::merge(ls);
        if l == Label::InK && !c.k_cells[t] {
            // a cell outside K whose samples all sit on K
            l = Label::Undetermined;
        }
        labels.push(l);
    }
    (labels, samples, undetermined)
}
