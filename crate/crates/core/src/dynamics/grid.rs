//! Outer approximation of the time-τ map by a multivalued cell map.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{Flow, Integrator, Point, Termination};
use crate::geom;
use crate::mesh::TriMesh;

/// Multivalued map on cells with its exact transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct GridDynamics {
    pub tau: f64,
    /// Cells hit by the sampled time-τ images, before bloating.
    pub hits: Vec<Vec<u32>>,
    pub forward: Vec<Vec<u32>>,
    pub backward: Vec<Vec<u32>>,
    /// Cells whose image could not be resolved at the deepest split.
    pub unresolved: usize,
}

impl GridDynamics {
    /// Wrap an arbitrary multivalued map; images are sorted and deduplicated.
    pub fn from_map(mut forward: Vec<Vec<u32>>) -> Self {
        for f in &mut forward {
            f.sort_unstable();
            f.dedup();
        }
        let backward = transpose(&forward);
        GridDynamics { tau: 0.0, hits: forward.clone(), forward, backward, unresolved: 0 }
    }

    pub fn num_cells(&self) -> usize {
        self.forward.len()
    }
}

fn transpose(forward: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut backward = vec![Vec::new(); forward.len()];
    for (c, img) in forward.iter().enumerate() {
        for &d in img {
            backward[d as usize].push(c as u32);
        }
    }
    backward
}

/// Triangles sharing a vertex with `t`, including `t`.
pub fn one_ring(m: &TriMesh) -> Vec<Vec<u32>> {
    (0..m.num_triangles())
        .map(|t| {
            let mut r: Vec<u32> =
                m.triangle(t).iter().flat_map(|&v| m.vertex_triangles(v).iter().map(|&u| u as u32)).collect();
            r.sort_unstable();
            r.dedup();
            r
        })
        .collect()
}

pub fn mean_edge_length(m: &TriMesh) -> f64 {
    let mut total = 0.0;
    let mut n = 0usize;
    for t in 0..m.num_triangles() {
        let c = m.corners(t);
        for i in 0..3 {
            total += geom::dist(c[i], c[(i + 1) % 3]);
            n += 1;
        }
    }
    total / n.max(1) as f64
}

/// Time for a typical point to cross one cell: (mean edge)/(median nonzero
/// centroid speed over `cells`). Falls back to 1 for a frozen field.
pub fn cell_crossing_time(m: &TriMesh, flow: &Flow, cells: Option<&[bool]>) -> f64 {
    let mut speeds: Vec<f64> = (0..m.num_triangles())
        .filter(|&t| cells.is_none_or(|c| c[t]))
        .map(|t| geom::norm(flow.velocity(m, t, geom::centroid(m.corners(t)))))
        .filter(|&s| s > 0.0)
        .collect();
    if speeds.is_empty() {
        return 1.0;
    }
    speeds.sort_by(f64::total_cmp);
    let median = speeds[speeds.len() / 2];
    mean_edge_length(m) / median
}

/// Cells added around each sampled image cell.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bloat {
    None,
    #[default]
    Edge,
    /// Every triangle sharing a vertex.
    Ring,
}

/// Deepest split of a cell when sampling its image.
const MAX_SPLIT_DEPTH: u32 = 6;

/// Flows a lattice of points of one cell, splitting any sub-triangle whose
/// corner images are not in touching cells.
struct CellImage<'a> {
    it: &'a Integrator<'a>,
    ring: &'a [Vec<u32>],
    t: usize,
    corners: [crate::geom::Vec3; 3],
    tau: f64,
    cache: HashMap<(u32, u32), Option<u32>>,
    unresolved: bool,
}

impl CellImage<'_> {
    const RES: u32 = 1 << MAX_SPLIT_DEPTH;

    fn image(&mut self, key: (u32, u32)) -> Option<u32> {
        if let Some(&c) = self.cache.get(&key) {
            return c;
        }
        let r = Self::RES as f64;
        let (a, b) = (key.0 as f64 / r, key.1 as f64 / r);
        let w = [a, b, 1.0 - a - b];
        let mut pos = [0.0; 3];
        for (c, wi) in self.corners.iter().zip(w) {
            pos = geom::axpy(pos, wi, *c);
        }
        let (p, _, reason) = self.it.follow(Point { tri: self.t, pos }, self.tau, |_, _| true);
        let img = (reason != Termination::LeftDomain).then_some(p.tri as u32);
        self.cache.insert(key, img);
        img
    }

    fn touching(&self, a: Option<u32>, b: Option<u32>) -> bool {
        match (a, b) {
            (Some(a), Some(b)) => self.ring[a as usize].binary_search(&b).is_ok(),
            _ => true,
        }
    }

    fn refine(&mut self, k: [(u32, u32); 3], depth: u32, force: bool) {
        let img = k.map(|x| self.image(x));
        let resolved = (0..3).all(|i| self.touching(img[i], img[(i + 1) % 3]));
        if resolved && !force {
            return;
        }
        if depth == MAX_SPLIT_DEPTH {
            self.unresolved |= !resolved;
            return;
        }
        let mid = |a: (u32, u32), b: (u32, u32)| ((a.0 + b.0) / 2, (a.1 + b.1) / 2);
        let (m01, m12, m20) = (mid(k[0], k[1]), mid(k[1], k[2]), mid(k[2], k[0]));
        self.refine([k[0], m01, m20], depth + 1, false);
        self.refine([m01, k[1], m12], depth + 1, false);
        self.refine([m20, m12, k[2]], depth + 1, false);
        self.refine([m01, m12, m20], depth + 1, false);
    }
}

/// Time-τ images of each cell in `mask` (all cells when `None`), bloated by
/// `bloat`. Each cell is split until the images of neighbouring samples
/// land in touching cells. Cells outside the mask get empty images.
pub fn build_grid(
    m: &TriMesh,
    flow: &Flow,
    tau: f64,
    substeps: usize,
    bloat: Bloat,
    mask: Option<&[bool]>,
) -> Result<GridDynamics> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::Param(format!("grid time must be positive, got {tau}")));
    }
    let it = Integrator::new(m, flow, tau / substeps.max(1) as f64)?;
    let ring = one_ring(m);
    let n = m.num_triangles();
    let mut hits = vec![Vec::new(); n];
    let mut forward = vec![Vec::new(); n];
    let mut unresolved = 0;
    let r = CellImage::RES;
    for t in 0..n {
        if mask.is_some_and(|mk| !mk[t]) {
            continue;
        }
        let mut ci = CellImage {
            it: &it,
            ring: &ring,
            t,
            corners: *m.corners(t),
            tau,
            cache: HashMap::new(),
            unresolved: false,
        };
        ci.refine([(r, 0), (0, r), (0, 0)], 0, true);
        let mut h: Vec<u32> = ci.cache.values().flatten().copied().collect();
        h.sort_unstable();
        h.dedup();
        let mut f: Vec<u32> = match bloat {
            Bloat::None => h.clone(),
            Bloat::Edge => h
                .iter()
                .flat_map(|&d| std::iter::once(d).chain(m.edge_neighbors(d as usize).map(|u| u as u32)))
                .collect(),
            Bloat::Ring => h.iter().flat_map(|&d| ring[d as usize].iter().copied()).collect(),
        };
        f.sort_unstable();
        f.dedup();
        unresolved += ci.unresolved as usize;
        hits[t] = h;
        forward[t] = f;
    }
    let backward = transpose(&forward);
    Ok(GridDynamics { tau, hits, forward, backward, unresolved })
}

fn prune(g: &GridDynamics, n: &[bool], use_forward: bool, use_backward: bool) -> Vec<bool> {
    let mut s = n.to_vec();
    let count = |img: &[u32], s: &[bool]| img.iter().filter(|&&d| s[d as usize]).count();
    let mut out_deg: Vec<usize> = (0..s.len()).map(|c| if s[c] { count(&g.forward[c], &s) } else { 0 }).collect();
    let mut in_deg: Vec<usize> = (0..s.len()).map(|c| if s[c] { count(&g.backward[c], &s) } else { 0 }).collect();
    let mut queue: Vec<usize> = (0..s.len())
        .filter(|&c| s[c] && ((use_forward && out_deg[c] == 0) || (use_backward && in_deg[c] == 0)))
        .collect();
    for &c in &queue {
        s[c] = false;
    }
    while let Some(c) = queue.pop() {
        // c left S: its predecessors lose a successor, its successors a predecessor
        for &p in &g.backward[c] {
            let p = p as usize;
            if s[p] {
                out_deg[p] -= 1;
                if use_forward && out_deg[p] == 0 {
                    s[p] = false;
                    queue.push(p);
                }
            }
        }
        for &d in &g.forward[c] {
            let d = d as usize;
            if s[d] {
                in_deg[d] -= 1;
                if use_backward && in_deg[d] == 0 {
                    s[d] = false;
                    queue.push(d);
                }
            }
        }
    }
    s
}

/// Largest `S ⊆ N` on which every cell has a successor and a predecessor in `S`.
pub fn invariant_part(g: &GridDynamics, n: &[bool]) -> Vec<bool> {
    prune(g, n, true, true)
}

/// Cells of `N` admitting a forward combinatorial orbit in `N`.
pub fn forward_invariant_part(g: &GridDynamics, n: &[bool]) -> Vec<bool> {
    prune(g, n, true, false)
}

/// Cells of `N` admitting a backward combinatorial orbit in `N`.
pub fn backward_invariant_part(g: &GridDynamics, n: &[bool]) -> Vec<bool> {
    prune(g, n, false, true)
}

/// Cells of `N` sharing a vertex with a cell outside `N`.
pub fn collar(m: &TriMesh, n: &[bool]) -> Vec<bool> {
    let mut outside_vertex = vec![false; m.num_vertices()];
    for t in 0..m.num_triangles() {
        if !n[t] {
            for v in m.triangle(t) {
                outside_vertex[v] = true;
            }
        }
    }
    (0..m.num_triangles()).map(|t| n[t] && m.triangle(t).iter().any(|&v| outside_vertex[v])).collect()
}

/// `Inv(N)` avoids the collar of `N`. The whole surface has an empty collar
/// and is therefore isolating.
pub fn is_isolating_neighborhood(m: &TriMesh, g: &GridDynamics, n: &[bool]) -> bool {
    let inv = invariant_part(g, n);
    let col = collar(m, n);
    !inv.iter().zip(&col).any(|(&a, &b)| a && b)
}

/// Cell-level isolating block. Entrance cells are collar cells with no
/// backward orbit in `N`, exit cells those with no forward orbit in `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsolatingBlock {
    pub cells: Vec<bool>,
    pub invariant: Vec<bool>,
    pub plus: Vec<bool>,
    pub minus: Vec<bool>,
    pub collar: Vec<bool>,
    pub entrance: Vec<bool>,
    pub exit: Vec<bool>,
    /// `N = N⁺ ∪ N⁻`.
    pub nonsaddle: bool,
    /// `N^i ∩ N^o = ∅`.
    pub boundary_disjoint: bool,
}

impl IsolatingBlock {
    pub fn certified(&self) -> bool {
        self.nonsaddle && self.boundary_disjoint
    }
}

pub fn isolating_block_refine(m: &TriMesh, g: &GridDynamics, n: &[bool]) -> Result<IsolatingBlock> {
    if !is_isolating_neighborhood(m, g, n) {
        return Err(Error::Refused("the invariant part touches the collar; N is not an isolating neighborhood".into()));
    }
    Ok(block_unchecked(m, g, n))
}

pub(crate) fn block_unchecked(m: &TriMesh, g: &GridDynamics, n: &[bool]) -> IsolatingBlock {
    let invariant = invariant_part(g, n);
    let plus = forward_invariant_part(g, n);
    let minus = backward_invariant_part(g, n);
    let col = collar(m, n);
    let entrance: Vec<bool> = (0..n.len()).map(|c| col[c] && !minus[c]).collect();
    let exit: Vec<bool> = (0..n.len()).map(|c| col[c] && !plus[c]).collect();
    let nonsaddle = (0..n.len()).all(|c| !n[c] || plus[c] || minus[c]);
    let boundary_disjoint = !entrance.iter().zip(&exit).any(|(&a, &b)| a && b);
    IsolatingBlock {
        cells: n.to_vec(),
        invariant,
        plus,
        minus,
        collar: col,
        entrance,
        exit,
        nonsaddle,
        boundary_disjoint,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{ChartFlow, Constant};
    use crate::mesh::{build_sphere, disk_piece, Subcomplex};
    use proptest::prelude::*;
    use std::sync::Arc;

    #[test]
    fn zero_field_maps_each_cell_to_its_ring() {
        let s = build_sphere(1);
        let g = build_grid(&s, &Flow::zero(&s), 0.5, 8, Bloat::Ring, None).unwrap();
        assert_eq!(g.forward, one_ring(&s));
        let all = vec![true; s.num_triangles()];
        assert_eq!(invariant_part(&g, &all), all);
        assert!(is_isolating_neighborhood(&s, &g, &all));
    }

    #[test]
    fn small_translation_stays_in_the_two_ring() {
        let d = disk_piece(1);
        let m = &d.mesh;
        let mut f = Flow::zero(m);
        let h = 0.3 * mean_edge_length(m);
        f.charts[0] = ChartFlow { field: Some(Arc::new(Constant { v: [h, 0.0] })), frozen: vec![] };
        let g = build_grid(m, &f, 1.0, 16, Bloat::Edge, None).unwrap();
        for t in 0..m.num_triangles() {
            let two = crate::mesh::star_cells(m, &Subcomplex::from_triangles(m, [t]).tris, 2);
            assert!(g.forward[t].iter().all(|&u| two[u as usize]), "cell {t}");
        }
    }

    #[test]
    fn acyclic_map_has_empty_invariant_part() {
        // a path 0 → 1 → … → 9 → nothing inside N
        let map: Vec<Vec<u32>> = (0..10).map(|c| if c < 9 { vec![c + 1] } else { vec![] }).collect();
        let g = GridDynamics::from_map(map);
        assert!(invariant_part(&g, &[true; 10]).iter().all(|&x| !x));
    }

    fn random_map(n: usize, seed: u64) -> GridDynamics {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let map = (0..n).map(|_| (0..rng.gen_range(0..3)).map(|_| rng.gen_range(0..n as u32)).collect()).collect();
        GridDynamics::from_map(map)
    }

    fn is_invariant(g: &GridDynamics, s: &[bool]) -> bool {
        (0..s.len())
            .filter(|&c| s[c])
            .all(|c| g.forward[c].iter().any(|&d| s[d as usize]) && g.backward[c].iter().any(|&d| s[d as usize]))
    }

    proptest! {
        #[test]
        fn invariant_part_is_maximal(seed in any::<u64>(), n in 5usize..120) {
            let g = random_map(n, seed);
            let mask: Vec<bool> = (0..n).map(|c| (c as u64).wrapping_mul(seed | 1) % 5 != 0).collect();
            let s = invariant_part(&g, &mask);
            prop_assert!(is_invariant(&g, &s));
            prop_assert!((0..n).all(|c| !s[c] || mask[c]));
            for c in 0..n {
                if mask[c] && !s[c] {
                    let mut t = s.clone();
                    t[c] = true;
                    prop_assert!(!is_invariant(&g, &t));
                }
            }
        }

        #[test]
        fn shrinking_n_shrinks_the_invariant_part(seed in any::<u64>(), n in 5usize..80) {
            let g = random_map(n, seed);
            let big = vec![true; n];
            let small: Vec<bool> = (0..n).map(|c| c % 3 != 1).collect();
            let (a, b) = (invariant_part(&g, &small), invariant_part(&g, &big));
            prop_assert!((0..n).all(|c| !a[c] || b[c]));
        }
    }

    #[test]
    fn transpose_is_exact() {
        let g = random_map(60, 7);
        for c in 0..60 {
            for &d in &g.forward[c] {
                assert!(g.backward[d as usize].contains(&(c as u32)));
            }
            for &p in &g.backward[c] {
                assert!(g.forward[p as usize].contains(&(c as u32)));
            }
        }
    }

    #[test]
    fn frozen_neighbourhood_is_its_own_block() {
        let s = build_sphere(2);
        let g = build_grid(&s, &Flow::zero(&s), 1.0, 4, Bloat::Edge, None).unwrap();
        let n = crate::mesh::star_cells(&s, &Subcomplex::from_triangles(&s, [0]).tris, 1);
        // zero field: every cell self-maps, so N⁺ = N⁻ = N but the collar is invariant
        let b = block_unchecked(&s, &g, &n);
        assert_eq!(b.plus, n);
        assert_eq!(b.minus, n);
        assert!(b.nonsaddle);
        assert!(!is_isolating_neighborhood(&s, &g, &n));
    }
}
