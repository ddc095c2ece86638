//! Region-of-influence decomposition: components, K-ends, complexity,
//! dissonant cells and the fixed-point census.

use serde::{Deserialize, Serialize};

use super::classify::{label_cells, Classifier, Label};
use super::grid::{
    block_unchecked, build_grid, cell_crossing_time, is_isolating_neighborhood, GridDynamics, IsolatingBlock,
};
use super::AnalysisParams;
use crate::error::Result;
use crate::flow::{FixedKind, Flow};
use crate::geom;
use crate::mesh::{star_neighborhood, Subcomplex, TriMesh};

/// Components of the cells selected by `member`, by edge adjacency, numbered
/// by least cell id.
pub fn cell_components(m: &TriMesh, member: &[bool]) -> Vec<Option<usize>> {
    let mut comp = vec![None; m.num_triangles()];
    let mut next = 0;
    for s in 0..m.num_triangles() {
        if !member[s] || comp[s].is_some() {
            continue;
        }
        comp[s] = Some(next);
        let mut stack = vec![s];
        while let Some(t) = stack.pop() {
            for u in m.edge_neighbors(t) {
                if member[u] && comp[u].is_none() {
                    comp[u] = Some(next);
                    stack.push(u);
                }
            }
        }
        next += 1;
    }
    comp
}

fn num_components(comp: &[Option<usize>]) -> usize {
    comp.iter().flatten().max().map_or(0, |&c| c + 1)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCounts {
    pub in_k: usize,
    pub homoclinic: usize,
    pub purely_attracted: usize,
    pub purely_repelled: usize,
    pub outside: usize,
    pub undetermined: usize,
}

impl LabelCounts {
    fn add(&mut self, l: Label) {
        match l {
            Label::InK => self.in_k += 1,
            Label::Homoclinic => self.homoclinic += 1,
            Label::PurelyAttracted => self.purely_attracted += 1,
            Label::PurelyRepelled => self.purely_repelled += 1,
            Label::OutsideInfluence => self.outside += 1,
            Label::Undetermined => self.undetermined += 1,
        }
    }

    fn of<'a>(labels: impl IntoIterator<Item = &'a Label>) -> Self {
        let mut c = LabelCounts::default();
        for &l in labels {
            c.add(l);
        }
        c
    }
}

/// A component of `I(K) ∖ K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfluenceComponent {
    pub least_cell: usize,
    pub cells: usize,
    pub labels: LabelCounts,
    /// K-ends assigned to this component.
    pub ends: usize,
    /// Components of `(N ∖ K) ∩ C`, counted directly.
    pub ends_direct: usize,
    pub local_complexity: i64,
}

/// A component of `M ∖ K` at cell level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplementComponent {
    pub least_cell: usize,
    pub cells: usize,
    pub labels: LabelCounts,
    /// Components of the block collar inside this component.
    pub boundary_components: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub attracting: usize,
    pub hyperbolic_saddle: usize,
    pub degenerate_saddle: usize,
    /// Counted from a linearisation at stalled vertices rather than from tags.
    pub heuristic: bool,
}

impl Census {
    pub fn total(&self) -> usize {
        self.attracting + self.hyperbolic_saddle + self.degenerate_saddle
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub cells: usize,
    pub invariant: usize,
    pub plus: usize,
    pub minus: usize,
    pub entrance: usize,
    pub exit: usize,
    pub collar_components: usize,
    pub isolating: bool,
    pub nonsaddle: bool,
    pub boundary_disjoint: bool,
    /// Cells whose image sampling never resolved.
    pub unresolved: usize,
    /// Labels of the cells of `N ∖ K`.
    pub labels: LabelCounts,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfluenceReport {
    pub num_cells: usize,
    pub tau: f64,
    #[serde(with = "rle")]
    pub labels: Vec<Label>,
    pub label_counts: LabelCounts,
    pub components: Vec<InfluenceComponent>,
    pub complement: Vec<ComplementComponent>,
    /// `k`: number of components of `N ∖ K`.
    pub k_ends: usize,
    /// For each end, the component of `I(K) ∖ K` it belongs to.
    pub end_assignment: Vec<Option<usize>>,
    /// Sum of local complexities.
    pub complexity: i64,
    pub complexity_k_minus_m: i64,
    pub complexity_direct: i64,
    pub dissonant: Vec<usize>,
    pub census: Census,
    pub block: BlockSummary,
    pub samples: usize,
    pub undetermined_samples: usize,
    pub valid: bool,
    pub notes: Vec<String>,
}

impl InfluenceReport {
    pub fn m(&self) -> usize {
        self.components.len()
    }

    pub fn local_complexities(&self) -> Vec<i64> {
        self.components.iter().map(|c| c.local_complexity).collect()
    }

    pub fn undetermined_fraction(&self) -> f64 {
        self.undetermined_samples as f64 / self.samples.max(1) as f64
    }
}

mod rle {
    use super::Label;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(labels: &[Label], s: S) -> Result<S::Ok, S::Error> {
        let mut runs: Vec<(Label, usize)> = Vec::new();
        for &l in labels {
            match runs.last_mut() {
                Some((x, n)) if *x == l => *n += 1,
                _ => runs.push((l, 1)),
            }
        }
        runs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Label>, D::Error> {
        let runs: Vec<(Label, usize)> = Vec::deserialize(d)?;
        Ok(runs.into_iter().flat_map(|(l, n)| std::iter::repeat_n(l, n)).collect())
    }
}

/// Cells labelled purely attracted or purely repelled with an edge
/// neighbour labelled homoclinic.
pub fn detect_dissonant(m: &TriMesh, labels: &[Label]) -> Vec<usize> {
    (0..m.num_triangles())
        .filter(|&t| {
            matches!(labels[t], Label::PurelyAttracted | Label::PurelyRepelled)
                && m.edge_neighbors(t).any(|u| labels[u] == Label::Homoclinic)
        })
        .collect()
}

/// Number of K-ends and the `I(K) ∖ K` component of each, by majority of
/// the end's labelled cells.
pub fn k_ends(m: &TriMesh, block: &[bool], k_cells: &[bool], comp_of: &[Option<usize>]) -> (usize, Vec<Option<usize>>) {
    let member: Vec<bool> = (0..m.num_triangles()).map(|t| block[t] && !k_cells[t]).collect();
    let ends = cell_components(m, &member);
    let k = num_components(&ends);
    let m_comps = num_components(comp_of);
    let mut votes = vec![vec![0usize; m_comps]; k];
    for t in 0..m.num_triangles() {
        if let (Some(e), Some(c)) = (ends[t], comp_of[t]) {
            votes[e][c] += 1;
        }
    }
    let assignment = votes
        .iter()
        .map(|v| {
            let (best, &n) = v.iter().enumerate().max_by_key(|&(i, &n)| (n, std::cmp::Reverse(i)))?;
            (n > 0).then_some(best)
        })
        .collect();
    (k, assignment)
}

/// Census of isolated fixed points outside `I(K)`: from the tags of a
/// tagged flow, otherwise from a linearisation at stalled vertices.
pub fn fixed_point_census(m: &TriMesh, flow: &Flow, k: &Subcomplex) -> Census {
    let mut c = Census::default();
    if !flow.tagged.is_empty() {
        for t in flow.isolated_fixed_points() {
            match t.kind {
                FixedKind::Attracting => c.attracting += 1,
                FixedKind::HyperbolicSaddle => c.hyperbolic_saddle += 1,
                FixedKind::DegenerateSaddle => c.degenerate_saddle += 1,
                _ => {}
            }
        }
        return c;
    }
    c.heuristic = true;
    for v in 0..m.num_vertices() {
        if k.verts[v] {
            continue;
        }
        let Some(&t) = m.vertex_triangles(v).first() else { continue };
        let p = m.corner_of(t, v).unwrap();
        if geom::norm(flow.velocity(m, t, p)) > 1e-12 {
            continue;
        }
        // isolated: every neighbouring vertex moves
        let isolated = m.vertex_triangles(v).iter().all(|&u| {
            m.triangle(u).iter().all(|&w| w == v || geom::norm(flow.velocity(m, u, m.corner_of(u, w).unwrap())) > 1e-12)
        });
        if !isolated {
            continue;
        }
        let e = 1e-4 * crate::dynamics::grid::mean_edge_length(m);
        let vel = |dx: f64, dy: f64| {
            let q = [p[0] + dx, p[1] + dy, p[2]];
            flow.velocity(m, t, q)
        };
        let jx = geom::scale(geom::sub(vel(e, 0.0), vel(-e, 0.0)), 0.5 / e);
        let jy = geom::scale(geom::sub(vel(0.0, e), vel(0.0, -e)), 0.5 / e);
        let (tr, det) = (jx[0] + jy[1], jx[0] * jy[1] - jx[1] * jy[0]);
        if det < -1e-9 {
            c.hyperbolic_saddle += 1;
        } else if det > 1e-9 && tr < 0.0 {
            c.attracting += 1;
        } else if det.abs() <= 1e-9 {
            c.degenerate_saddle += 1;
        }
    }
    c
}

/// Grid times tried, in cell-crossing times, when none is given.
pub const TAU_CELLS: [f64; 5] = [4.0, 2.0, 8.0, 1.0, 16.0];

/// Grid and block on `n`. Without a fixed τ, tries the multiples in
/// `TAU_CELLS` and keeps the first certified block, or else the first.
pub fn certify_block(
    m: &TriMesh,
    flow: &Flow,
    n: &[bool],
    params: &AnalysisParams,
) -> Result<(f64, GridDynamics, bool, IsolatingBlock)> {
    let taus: Vec<f64> = match params.tau {
        Some(t) => vec![t],
        None => {
            let base = cell_crossing_time(m, flow, None);
            TAU_CELLS.iter().map(|c| c * base).collect()
        }
    };
    let mut first = None;
    for &tau in &taus {
        let grid = build_grid(m, flow, tau, params.substeps, params.bloat, Some(n))?;
        let isolating = is_isolating_neighborhood(m, &grid, n);
        let block = block_unchecked(m, &grid, n);
        if isolating && block.certified() {
            return Ok((tau, grid, isolating, block));
        }
        first.get_or_insert((tau, grid, isolating, block));
    }
    Ok(first.expect("at least one grid time"))
}

/// Everything computed on one refined surface.
pub struct Decomposition {
    pub report: InfluenceReport,
    pub grid: GridDynamics,
    pub block: IsolatingBlock,
    pub k_cells: Vec<bool>,
}

/// Block around `k`, trichotomy labels, components, ends, complexity,
/// dissonant cells and census.
pub fn influence_decomposition(
    m: &TriMesh,
    k: &Subcomplex,
    flow: &Flow,
    params: &AnalysisParams,
) -> Result<Decomposition> {
    let classifier = Classifier::new(m, flow, k, params)?;
    let kc = classifier.k_cells.clone();
    let n_sub = if k.tris.iter().any(|&x| x) {
        star_neighborhood(m, k, params.block_rings)
    } else {
        star_neighborhood(m, &Subcomplex::from_triangle_mask(m, &kc), params.block_rings)
    };
    let n = n_sub.tris;
    let (tau, grid, isolating, block) = certify_block(m, flow, &n, params)?;

    let (labels, samples, undetermined) = label_cells(&classifier);
    let label_counts = LabelCounts::of(&labels);

    let in_influence: Vec<bool> = labels.iter().zip(&kc).map(|(l, &kk)| !kk && l.in_influence()).collect();
    let comp_of = cell_components(m, &in_influence);
    let m_comps = num_components(&comp_of);
    let (k_count, end_assignment) = k_ends(m, &n, &kc, &comp_of);

    let mut components = Vec::with_capacity(m_comps);
    for c in 0..m_comps {
        let cells: Vec<usize> = (0..m.num_triangles()).filter(|&t| comp_of[t] == Some(c)).collect();
        let ends = end_assignment.iter().filter(|&&a| a == Some(c)).count();
        let member: Vec<bool> = (0..m.num_triangles()).map(|t| comp_of[t] == Some(c) && n[t]).collect();
        let ends_direct = num_components(&cell_components(m, &member));
        components.push(InfluenceComponent {
            least_cell: cells[0],
            cells: cells.len(),
            labels: LabelCounts::of(cells.iter().map(|&t| &labels[t])),
            ends,
            ends_direct,
            local_complexity: ends as i64 - 1,
        });
    }
    let complexity: i64 = components.iter().map(|c| c.local_complexity).sum();
    let complexity_k_minus_m = k_count as i64 - m_comps as i64;
    let complexity_direct = components.iter().map(|c| c.ends_direct as i64).sum::<i64>() - m_comps as i64;

    let not_k: Vec<bool> = kc.iter().map(|&x| !x).collect();
    let comp_m = cell_components(m, &not_k);
    let collar_comps = vertex_components(m, &block.collar);
    let mut complement = Vec::new();
    for c in 0..num_components(&comp_m) {
        let cells: Vec<usize> = (0..m.num_triangles()).filter(|&t| comp_m[t] == Some(c)).collect();
        let mut boundary: Vec<usize> = cells.iter().filter_map(|&t| collar_comps[t]).collect();
        boundary.sort_unstable();
        boundary.dedup();
        complement.push(ComplementComponent {
            least_cell: cells[0],
            cells: cells.len(),
            labels: LabelCounts::of(cells.iter().map(|&t| &labels[t])),
            boundary_components: boundary.len(),
        });
    }

    let dissonant = detect_dissonant(m, &labels);
    let census = fixed_point_census(m, flow, k);
    let block_summary = BlockSummary {
        cells: count(&n),
        invariant: count(&block.invariant),
        plus: count(&block.plus),
        minus: count(&block.minus),
        entrance: count(&block.entrance),
        exit: count(&block.exit),
        collar_components: num_components(&collar_comps),
        isolating,
        nonsaddle: block.nonsaddle,
        boundary_disjoint: block.boundary_disjoint,
        unresolved: grid.unresolved,
        labels: LabelCounts::of((0..m.num_triangles()).filter(|&t| n[t] && !kc[t]).map(|t| &labels[t])),
    };

    let mut notes = Vec::new();
    let frac = undetermined as f64 / samples.max(1) as f64;
    if frac >= params.max_undetermined {
        notes.push(format!("undetermined fraction {frac:.4} exceeds {}", params.max_undetermined));
    }
    if !isolating {
        notes.push("block is not an isolating neighborhood".into());
    }
    if !block.certified() {
        notes.push("block certificate N = N⁺ ∪ N⁻ with disjoint entrance and exit failed".into());
    }
    if components.iter().any(|c| c.local_complexity < 0) {
        notes.push("a component of the region of influence has no K-end".into());
    }
    if end_assignment.iter().any(|a| a.is_none()) {
        notes.push("a K-end meets no labelled component".into());
    }
    let valid = notes.is_empty();
    let report = InfluenceReport {
        num_cells: m.num_triangles(),
        tau,
        labels,
        label_counts,
        components,
        complement,
        k_ends: k_count,
        end_assignment,
        complexity,
        complexity_k_minus_m,
        complexity_direct,
        dissonant,
        census,
        block: block_summary,
        samples,
        undetermined_samples: undetermined,
        valid,
        notes,
    };
    Ok(Decomposition { report, grid, block, k_cells: kc })
}

fn count(x: &[bool]) -> usize {
    x.iter().filter(|&&b| b).count()
}

/// Components of a cell set by vertex adjacency.
pub fn vertex_components(m: &TriMesh, member: &[bool]) -> Vec<Option<usize>> {
    let mut comp = vec![None; m.num_triangles()];
    let mut next = 0;
    for s in 0..m.num_triangles() {
        if !member[s] || comp[s].is_some() {
            continue;
        }
        comp[s] = Some(next);
        let mut stack = vec![s];
        while let Some(t) = stack.pop() {
            for v in m.triangle(t) {
                for &u in m.vertex_triangles(v) {
                    if member[u] && comp[u].is_none() {
                        comp[u] = Some(next);
                        stack.push(u);
                    }
                }
            }
        }
        next += 1;
    }
    comp
}
