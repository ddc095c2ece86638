//! Sweeps of λ-families: the invariant part of a fixed neighbourhood, the
//! two cohomological non-saddle criteria and a direct saddle probe.

use serde::{Deserialize, Serialize};

use crate::algebra::{induced_map_degree, subcomplex_cohomology, Coeff};
use crate::dynamics::{
    block_unchecked, build_grid, cell_components, cell_crossing_time, collar, invariant_part,
    is_isolating_neighborhood, Bloat, GridDynamics, IsolatingBlock, TAU_CELLS,
};
use crate::error::{Error, Result};
use crate::flow::{Flow, FlowFamily, Integrator, Point, Termination};
use crate::geom::{self, Vec3};
use crate::mesh::{star_cells, Subcomplex, TriMesh};
use crate::verify::{Status, Verdict};
use crate::SCHEMA;

/// Hypothesis of the sweep that differs from the smooth setting.
pub const DEVIATION: &str =
    "the family is assumed Lipschitz in (x, λ) at the sampled resolution instead of differentiable";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepParams {
    pub step: f64,
    pub substeps: usize,
    pub bloat: Bloat,
    /// Grid time; `None` searches multiples of the cell-crossing time.
    pub tau: Option<f64>,
    /// Nested stars probed for saddle witnesses; 0 skips the probe.
    pub depth: usize,
    /// Horizon of the probe trajectories.
    pub probe_time: f64,
}

impl Default for SweepParams {
    fn default() -> Self {
        SweepParams { step: 0.01, substeps: 24, bloat: Bloat::Edge, tau: None, depth: 3, probe_time: 20.0 }
    }
}

/// 11 points on `[0, 0.5]`.
pub fn default_lambda_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 20.0).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub lambda: f64,
    pub tau: f64,
    /// Cells whose image did not resolve at the deepest split.
    pub unresolved: usize,
    /// Cells of `K_λ = Inv(N)`.
    pub k_cells: Vec<usize>,
    pub empty: bool,
    pub isolating: bool,
    /// `N = N⁺ ∪ N⁻` with disjoint entrance and exit cells.
    pub certified: bool,
    /// Sampled transversality of the field on `∂N` matches λ = 0.
    pub persistent: bool,
    pub rchar: bool,
    pub strongrob: bool,
    /// `None` when the probe was skipped.
    pub saddle_probe: Option<bool>,
    /// ℤ₂ Betti numbers of the `K_λ` cell union, at the working resolution.
    pub betti_k: [usize; 3],
}

impl Column {
    /// Columns that take part in the criteria.
    pub fn counted(&self) -> bool {
        !self.empty && self.isolating
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustnessVerdict {
    pub agreement: Verdict,
    pub corollary: Verdict,
    /// First grid λ at which `K_λ` is a saddle.
    pub transition: Option<f64>,
    /// Non-saddle at the first positive grid λ.
    pub persists: Option<bool>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub schema: u32,
    pub family: String,
    pub deviation: String,
    pub params: SweepParams,
    pub lambda_grid: Vec<f64>,
    pub block_cells: Vec<usize>,
    pub columns: Vec<Column>,
    pub notes: Vec<String>,
    pub verdict: RobustnessVerdict,
}

impl SweepResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: SweepResult = serde_json::from_str(text)?;
        if r.schema != SCHEMA {
            return Err(Error::Parse(format!("sweep schema {} is not supported (expected {SCHEMA})", r.schema)));
        }
        Ok(r)
    }

    pub fn exit_code(&self) -> i32 {
        if self.verdict.passed {
            0
        } else {
            1
        }
    }
}

fn mask_to_ids(mask: &[bool]) -> Vec<usize> {
    (0..mask.len()).filter(|&c| mask[c]).collect()
}

/// Grid on `n` at the first of `first` then the searched multiples of the
/// cell-crossing time that isolates `n`, preferring a certified block.
fn select_grid(
    m: &TriMesh,
    flow: &Flow,
    n: &[bool],
    first: Option<f64>,
    p: &SweepParams,
) -> Result<(GridDynamics, bool, IsolatingBlock)> {
    let mut taus: Vec<f64> = first.into_iter().collect();
    if p.tau.is_none() {
        let base = cell_crossing_time(m, flow, Some(n));
        taus.extend(TAU_CELLS.iter().map(|c| c * base));
    }
    let mut fallback = None;
    for &tau in &taus {
        let grid = build_grid(m, flow, tau, p.substeps, p.bloat, Some(n))?;
        let isolating = is_isolating_neighborhood(m, &grid, n);
        let block = block_unchecked(m, &grid, n);
        if isolating && (block.certified() || first == Some(tau)) {
            return Ok((grid, isolating, block));
        }
        let better = match &fallback {
            None => true,
            Some((_, iso, _)) => isolating && !iso,
        };
        if better {
            fallback = Some((grid, isolating, block));
        }
    }
    Ok(fallback.expect("at least one grid time"))
}

/// Every component of `N ∖ K` holds exactly one component of the collar.
pub fn rchar_criterion(m: &TriMesh, n: &[bool], k: &[bool]) -> bool {
    let rest: Vec<bool> = (0..n.len()).map(|c| n[c] && !k[c]).collect();
    let comp = cell_components(m, &rest);
    let col = collar(m, n);
    let col_comp = cell_components(m, &col);
    let count = comp.iter().flatten().max().map_or(0, |&x| x + 1);
    let mut seen: Vec<Vec<usize>> = vec![Vec::new(); count];
    for c in 0..n.len() {
        if let (Some(a), Some(b)) = (comp[c], col_comp[c]) {
            if !seen[a].contains(&b) {
                seen[a].push(b);
            }
        }
    }
    seen.iter().all(|s| s.len() == 1)
}

/// The inclusion of the `K` cell union into `N` is a ℤ₂-cohomology
/// isomorphism in degrees 0, 1 and 2.
pub fn strongrob_criterion(m: &TriMesh, n: &[bool], k: &[bool]) -> Result<bool> {
    let outer = Subcomplex::from_triangle_mask(m, n);
    let inner = Subcomplex::from_triangle_mask(m, k);
    for degree in 0..=2 {
        if !induced_map_degree(m, &outer, &inner, degree, Coeff::Z2)?.is_isomorphism() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sample points of a cell: its centroid and the midpoints between the
/// centroid and each corner.
fn cell_samples(m: &TriMesh, t: usize) -> [Point; 4] {
    let c = m.corners(t);
    let g = geom::centroid(c);
    let half = |v: Vec3| Point { tri: t, pos: geom::midpoint(g, v) };
    [Point { tri: t, pos: g }, half(c[0]), half(c[1]), half(c[2])]
}

/// Whether some sample of each of the nested stars `U_j` of `k` (rings
/// `depth − 1` down to 0, inside `n`) leaves `n` in both time directions
/// within `horizon`. `None` when `depth` is 0.
pub fn saddle_probe(
    m: &TriMesh,
    flow: &Flow,
    k: &[bool],
    n: &[bool],
    depth: usize,
    step: f64,
    horizon: f64,
) -> Result<Option<bool>> {
    if depth == 0 {
        return Ok(None);
    }
    if !k.iter().any(|&x| x) {
        return Ok(Some(false));
    }
    let it = Integrator::new(m, flow, step)?;
    let leaves = |x: Point, dir: f64| {
        let (_, _, reason) = it.follow(x, dir * horizon, |_, p| n[p.tri]);
        reason != Termination::TimeHorizon
    };
    let outer: Vec<bool> = star_cells(m, k, depth - 1).iter().zip(n).map(|(&a, &b)| a && b).collect();
    // a witness cell has a sample escaping both ways
    let witness: Vec<bool> = (0..m.num_triangles())
        .map(|t| outer[t] && cell_samples(m, t).into_iter().any(|x| leaves(x, 1.0) && leaves(x, -1.0)))
        .collect();
    for rings in (0..depth).rev() {
        let u = star_cells(m, k, rings);
        if !(0..u.len()).any(|t| u[t] && n[t] && witness[t]) {
            return Ok(Some(false));
        }
    }
    Ok(Some(true))
}

/// Sign of the field against the outward normal at the midpoint of every
/// edge between a cell of `n` and a cell outside it.
pub fn boundary_transversality(m: &TriMesh, flow: &Flow, n: &[bool]) -> Vec<i8> {
    let mut out = Vec::new();
    for t in 0..m.num_triangles() {
        if !n[t] {
            continue;
        }
        let tri = m.triangle(t);
        let c = m.corners(t);
        for i in 0..3 {
            let (a, b) = (tri[i], tri[(i + 1) % 3]);
            let e = m.edge_index(a, b).expect("triangle edge");
            if m.edge_triangles(e).iter().all(|&u| n[u]) {
                continue;
            }
            let (pa, pb, pc) = (c[i], c[(i + 1) % 3], c[(i + 2) % 3]);
            let mid = geom::midpoint(pa, pb);
            let along = geom::sub(pb, pa);
            let d = geom::sub(mid, pc);
            let normal = geom::axpy(d, -geom::dot(d, along) / geom::dot(along, along), along);
            let s = geom::dot(flow.velocity(m, t, mid), normal);
            out.push(if s > 0.0 {
                1
            } else if s < 0.0 {
                -1
            } else {
                0
            });
        }
    }
    out
}

/// The entrance and exit sets of the block at λ = 0 keep their roles at
/// `lambda`: the sampled boundary field keeps its nonzero signs.
pub fn check_block_persistence(family: &FlowFamily, n: &[bool], lambda: f64) -> bool {
    let m = family.mesh();
    let base = boundary_transversality(m, &family.flow(0.0), n);
    let now = boundary_transversality(m, &family.flow(lambda), n);
    base.iter().all(|&s| s != 0) && base == now
}

fn column(family: &FlowFamily, n: &[bool], lambda: f64, tau0: f64, base: &[i8], p: &SweepParams) -> Result<Column> {
    let m = family.mesh();
    let flow = family.flow(lambda);
    let (grid, isolating, block) = select_grid(m, &flow, n, Some(tau0), p)?;
    let k = invariant_part(&grid, n);
    let empty = !k.iter().any(|&x| x);
    let now = boundary_transversality(m, &flow, n);
    let persistent = base.iter().all(|&s| s != 0) && now == base;
    let betti_k =
        if empty { [0; 3] } else { subcomplex_cohomology(m, &Subcomplex::from_triangle_mask(m, &k), Coeff::Z2)?.betti };
    Ok(Column {
        lambda,
        tau: grid.tau,
        unresolved: grid.unresolved,
        k_cells: mask_to_ids(&k),
        empty,
        isolating,
        certified: isolating && block.certified(),
        persistent,
        rchar: rchar_criterion(m, n, &k),
        strongrob: strongrob_criterion(m, n, &k)?,
        saddle_probe: saddle_probe(m, &flow, &k, n, p.depth, p.step, p.probe_time)?,
        betti_k,
    })
}

/// Sweep `family` over `grid` with the family's block as `N`.
pub fn sweep(family: &FlowFamily, grid: &[f64], p: &SweepParams) -> Result<SweepResult> {
    sweep_on(family, &family.block.tris, grid, p)
}

/// Sweep `family` over `grid` with the neighbourhood `n`, which must be
/// isolating at λ = 0.
pub fn sweep_on(family: &FlowFamily, n: &[bool], grid: &[f64], p: &SweepParams) -> Result<SweepResult> {
    if grid.is_empty() {
        return Err(Error::Param("empty λ grid".into()));
    }
    let m = family.mesh();
    // the grid time isolating N at λ = 0 is kept along the family
    let (grid0, iso0, _) = select_grid(m, &family.flow(0.0), n, p.tau, p)?;
    if !iso0 {
        return Err(Error::Refused("N is not an isolating neighborhood at λ = 0".into()));
    }
    let base = boundary_transversality(m, &family.flow(0.0), n);
    let columns = grid.iter().map(|&l| column(family, n, l, grid0.tau, &base, p)).collect::<Result<Vec<_>>>()?;
    let mut notes = Vec::new();
    for c in &columns {
        if c.empty {
            notes.push(format!("λ = {}: K_λ is empty; excluded from the criteria", c.lambda));
        } else if !c.isolating {
            notes.push(format!("λ = {}: N does not isolate K_λ; excluded from the criteria", c.lambda));
        }
    }
    if p.depth == 0 {
        notes.push("saddle probe skipped (depth 0)".into());
    }
    let verdict = robustness_verdict(&columns);
    Ok(SweepResult {
        schema: SCHEMA,
        family: family.kind.name().into(),
        deviation: DEVIATION.into(),
        params: p.clone(),
        lambda_grid: grid.to_vec(),
        block_cells: mask_to_ids(n),
        columns,
        notes,
        verdict,
    })
}

/// Pointwise agreement of `rchar`, `strongrob` and the negated probe, and
/// the corollary that non-saddleness persists exactly where the cohomology
/// of `K_λ` matches that of `K₀`.
pub fn robustness_verdict(columns: &[Column]) -> RobustnessVerdict {
    let counted: Vec<&Column> = columns.iter().filter(|c| c.counted()).collect();
    let mut bad = Vec::new();
    for c in &counted {
        let probe_ok = c.saddle_probe.is_none_or(|s| s != c.rchar);
        if c.rchar != c.strongrob || !probe_ok {
            bad.push(format!(
                "λ = {}: rchar {}, strongrob {}, saddle probe {:?}",
                c.lambda, c.rchar, c.strongrob, c.saddle_probe
            ));
        }
    }
    let agreement = if counted.is_empty() {
        Verdict {
            check: "criteria_agreement".into(),
            status: Status::NotApplicable,
            detail: "no column with nonempty isolated K_λ".into(),
        }
    } else {
        Verdict {
            check: "criteria_agreement".into(),
            status: if bad.is_empty() { Status::Pass } else { Status::Fail },
            detail: if bad.is_empty() { format!("{} columns agree", counted.len()) } else { bad.join("; ") },
        }
    };

    let base = columns.iter().find(|c| c.lambda == 0.0 && c.counted());
    let corollary = match base {
        None => Verdict {
            check: "cohomology_corollary".into(),
            status: Status::NotApplicable,
            detail: "no λ = 0 column".into(),
        },
        Some(b) if !b.rchar => Verdict {
            check: "cohomology_corollary".into(),
            status: Status::NotApplicable,
            detail: "K₀ is a saddle".into(),
        },
        Some(b) => {
            let wrong: Vec<String> = counted
                .iter()
                .filter(|c| (c.betti_k == b.betti_k) != c.rchar)
                .map(|c| format!("λ = {}: betti {:?} vs {:?}, non-saddle {}", c.lambda, c.betti_k, b.betti_k, c.rchar))
                .collect();
            Verdict {
                check: "cohomology_corollary".into(),
                status: if wrong.is_empty() { Status::Pass } else { Status::Fail },
                detail: if wrong.is_empty() {
                    "non-saddle exactly where H*(K_λ) ≅ H*(K₀)".into()
                } else {
                    wrong.join("; ")
                },
            }
        }
    };

    let transition = counted.iter().find(|c| !c.rchar).map(|c| c.lambda);
    let persists = counted.iter().find(|c| c.lambda > 0.0).map(|c| c.rchar);
    let passed = agreement.status != Status::Fail && corollary.status != Status::Fail;
    RobustnessVerdict { agreement, corollary, transition, persists, passed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{FamilyKind, FlowFamily, FAMILY_SUBDIV};

    fn quick() -> SweepParams {
        SweepParams::default()
    }

    #[test]
    fn rchar_on_hand_made_masks() {
        let fam = FlowFamily::new(FamilyKind::SphereCircle, 3);
        let m = fam.mesh();
        let n = fam.block.tris.clone();
        // K = N: no components, vacuously true
        assert!(rchar_criterion(m, &n, &n));
        assert!(strongrob_criterion(m, &n, &n).unwrap());
        // K = one cell: one annular component meeting both collar circles
        let one: Vec<bool> = (0..n.len()).map(|c| Some(c) == n.iter().position(|&x| x)).collect();
        assert!(!rchar_criterion(m, &n, &one));
        assert!(!strongrob_criterion(m, &n, &one).unwrap());
    }

    #[test]
    fn probe_without_depth_is_skipped() {
        let fam = FlowFamily::new(FamilyKind::SphereCircle, 3);
        let n = fam.block.tris.clone();
        let r = saddle_probe(fam.mesh(), &fam.flow(0.0), &n, &n, 0, 0.01, 1.0).unwrap();
        assert_eq!(r, None);
    }

    #[test]
    fn persistence_of_the_reversed_family() {
        let fam = FlowFamily::new(FamilyKind::Reversed, 3);
        let n = fam.block.tris.clone();
        assert!(check_block_persistence(&fam, &n, 0.0));
        assert!(check_block_persistence(&fam, &n, 0.2));
        assert!(!check_block_persistence(&fam, &n, 1.0));
    }

    #[test]
    fn single_point_grid_is_one_nonsaddle_column() {
        let fam = FlowFamily::new(FamilyKind::SphereCircle, FAMILY_SUBDIV);
        let r = sweep(&fam, &[0.0], &quick()).unwrap();
        assert_eq!(r.columns.len(), 1);
        let c = &r.columns[0];
        assert!(c.isolating && c.certified && c.rchar && c.strongrob, "{c:?}");
        assert_eq!(c.saddle_probe, Some(false));
        assert_eq!(c.betti_k, [1, 1, 0]);
        assert!(r.verdict.passed);
    }

    #[test]
    fn sweep_json_round_trips() {
        let fam = FlowFamily::new(FamilyKind::ConstantNonsaddle, FAMILY_SUBDIV);
        let r = sweep(&fam, &[0.0, 0.25], &SweepParams { depth: 0, ..quick() }).unwrap();
        let back = SweepResult::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.notes.iter().any(|n| n.contains("skipped")));
        assert!(r.columns.iter().all(|c| c.saddle_probe.is_none()));
    }
}
