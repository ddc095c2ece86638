//! Combinatorial Conley analysis of a flow around a stationary continuum.

mod classify;
mod grid;
mod report;

pub use classify::{classify_point, k_cells, label_cells, Classifier, Label, Target};
pub(crate) use grid::block_unchecked;
pub use grid::{
    backward_invariant_part, build_grid, cell_crossing_time, collar, forward_invariant_part, invariant_part,
    is_isolating_neighborhood, isolating_block_refine, mean_edge_length, one_ring, Bloat, GridDynamics, IsolatingBlock,
};
pub use report::{
    cell_components, certify_block, detect_dissonant, fixed_point_census, influence_decomposition, k_ends,
    vertex_components, BlockSummary, Census, ComplementComponent, Decomposition, InfluenceComponent, InfluenceReport,
    LabelCounts, TAU_CELLS,
};

use serde::{Deserialize, Serialize};

use crate::flow::Flow;
use crate::geom;
use crate::mesh::{Subcomplex, TriangulatedSurface};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisParams {
    /// Integration step for classification.
    pub step: f64,
    pub t_max: f64,
    /// Time an orbit must stay in the target star of K.
    pub dwell: f64,
    /// Time an orbit must stay near a tagged fixed point.
    pub fixed_dwell: f64,
    pub fixed_radius: f64,
    /// Rings of the star of K used as the block.
    pub block_rings: usize,
    /// Rings of the star of K counted as "near K".
    pub target_rings: usize,
    /// Grid time; `None` picks it from the field.
    pub tau: Option<f64>,
    pub substeps: usize,
    pub bloat: Bloat,
    /// Extra midpoint subdivisions before the analysis.
    pub refine: usize,
    pub max_undetermined: f64,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        AnalysisParams {
            step: 0.01,
            t_max: 1000.0,
            dwell: 1.0,
            fixed_dwell: 10.0,
            fixed_radius: 0.05,
            block_rings: 3,
            target_rings: 2,
            tau: None,
            substeps: 24,
            bloat: Bloat::Edge,
            refine: 1,
            max_undetermined: 0.01,
        }
    }
}

/// Surface, stationary set and flow after `levels` midpoint subdivisions.
/// A vertex field is extended by averaging across each split edge.
pub fn refine_problem(
    surface: &TriangulatedSurface,
    k: &Subcomplex,
    flow: &Flow,
    levels: usize,
) -> (TriangulatedSurface, Subcomplex, Flow) {
    let mut surf = surface.clone();
    let mut k = k.clone();
    let mut flow = flow.clone();
    for _ in 0..levels {
        let coarse_edges = surf.mesh().edges().to_vec();
        let (s, sub) = surf.subdivide();
        k = sub.map_subcomplex(&k);
        if let Some(vf) = &flow.vertex_field {
            let mut fine = vf.clone();
            fine.extend(coarse_edges.iter().map(|&[a, b]| geom::midpoint(vf[a], vf[b])));
            flow.vertex_field = Some(fine);
        }
        flow.frozen_set = flow.frozen_set.as_ref().map(|f| sub.map_subcomplex(f));
        surf = s;
    }
    (surf, k, flow)
}
