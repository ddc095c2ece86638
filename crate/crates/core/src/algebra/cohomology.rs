use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::reduce::{dense_rank, reduce_columns, Field, Reduction, SparseVec};
use super::snf::invariant_factors;
use super::Coeff;
use crate::error::{Error, Result};
use crate::mesh::{Subcomplex, TriMesh};

/// Simplicial chain complex in degrees 0..=2 with boundary matrices as
/// `(face, simplex, coefficient)` triples.
#[derive(Clone, Debug)]
pub struct ChainData {
    pub counts: [usize; 3],
    pub boundary1: Vec<(usize, usize, i64)>,
    pub boundary2: Vec<(usize, usize, i64)>,
    /// Parent-mesh id of each local simplex, ascending.
    pub ids: [Vec<usize>; 3],
}

impl ChainData {
    pub fn from_subcomplex(m: &TriMesh, s: &Subcomplex) -> Self {
        let pick = |mask: &[bool]| -> Vec<usize> { (0..mask.len()).filter(|&i| mask[i]).collect() };
        let ids = [pick(&s.verts), pick(&s.edges), pick(&s.tris)];
        let local = |v: &Vec<usize>| -> HashMap<usize, usize> { v.iter().enumerate().map(|(k, &g)| (g, k)).collect() };
        let (lv, le) = (local(&ids[0]), local(&ids[1]));
        let mut boundary1 = Vec::with_capacity(2 * ids[1].len());
        for (k, &e) in ids[1].iter().enumerate() {
            let [a, b] = m.edges()[e];
            boundary1.push((lv[&a], k, -1));
            boundary1.push((lv[&b], k, 1));
        }
        let mut boundary2 = Vec::with_capacity(3 * ids[2].len());
        for (k, &t) in ids[2].iter().enumerate() {
            let tri = m.triangle(t);
            for i in 0..3 {
                let (a, b) = (tri[i], tri[(i + 1) % 3]);
                let e = m.edge_index(a, b).expect("triangle edge exists");
                boundary2.push((le[&e], k, if a < b { 1 } else { -1 }));
            }
        }
        ChainData { counts: [ids[0].len(), ids[1].len(), ids[2].len()], boundary1, boundary2, ids }
    }

    pub fn of_mesh(m: &TriMesh) -> Self {
        Self::from_subcomplex(m, &Subcomplex::full(m))
    }

    /// Verify ∂₁∘∂₂ = 0.
    pub fn check(&self) -> Result<()> {
        let mut by_edge: Vec<Vec<(usize, i64)>> = vec![Vec::new(); self.counts[1]];
        for &(v, e, c) in &self.boundary1 {
            if v >= self.counts[0] || e >= self.counts[1] {
                return Err(Error::Contract("boundary₁ entry out of range".into()));
            }
            by_edge[e].push((v, c));
        }
        let mut by_tri: Vec<Vec<(usize, i64)>> = vec![Vec::new(); self.counts[2]];
        for &(e, t, c) in &self.boundary2 {
            if e >= self.counts[1] || t >= self.counts[2] {
                return Err(Error::Contract("boundary₂ entry out of range".into()));
            }
            by_tri[t].push((e, c));
        }
        for (t, es) in by_tri.iter().enumerate() {
            let mut acc: HashMap<usize, i64> = HashMap::new();
            for &(e, c) in es {
                for &(v, d) in &by_edge[e] {
                    *acc.entry(v).or_default() += c * d;
                }
            }
            if acc.values().any(|&x| x != 0) {
                return Err(Error::Contract(format!("∂₁∘∂₂ ≠ 0 on 2-simplex {t}")));
            }
        }
        Ok(())
    }

    fn coboundary_columns(&self, field: Field) -> (Vec<SparseVec>, Vec<SparseVec>) {
        let mut d0: Vec<Vec<(u32, i64)>> = vec![Vec::new(); self.counts[0]];
        for &(v, e, c) in &self.boundary1 {
            d0[v].push((e as u32, c));
        }
        let mut d1: Vec<Vec<(u32, i64)>> = vec![Vec::new(); self.counts[1]];
        for &(e, t, c) in &self.boundary2 {
            d1[e].push((t as u32, c));
        }
        let fin = |cols: Vec<Vec<(u32, i64)>>| -> Vec<SparseVec> {
            cols.into_iter()
                .map(|mut c| {
                    c.sort_unstable();
                    let mut out: SparseVec = Vec::with_capacity(c.len());
                    for (i, x) in c {
                        let x = field.from_i64(x);
                        match out.last_mut() {
                            Some(last) if last.0 == i => last.1 = (last.1 + x) % field.p,
                            _ => out.push((i, x)),
                        }
                    }
                    out.retain(|&(_, x)| x != 0);
                    out
                })
                .collect()
        };
        (fin(d0), fin(d1))
    }
}

/// Column reductions of both coboundaries with essential classes per degree.
#[derive(Clone, Debug)]
struct Reduced {
    field: Field,
    red: [Reduction; 2],
    /// Essential local simplex ids per degree, ascending.
    essential: [Vec<usize>; 3],
    /// Representative cocycle (local ids) for each essential class.
    reps: [Vec<SparseVec>; 3],
}

impl Reduced {
    fn new(data: &ChainData, field: Field) -> Self {
        let (d0, d1) = data.coboundary_columns(field);
        let r0 = reduce_columns(field, data.counts[1], d0, true);
        let r1 = reduce_columns(field, data.counts[2], d1, true);
        let mut essential: [Vec<usize>; 3] = Default::default();
        let mut reps: [Vec<SparseVec>; 3] = Default::default();
        for v in 0..data.counts[0] {
            if r0.reduced[v].is_empty() {
                essential[0].push(v);
                reps[0].push(r0.ops.as_ref().unwrap()[v].clone());
            }
        }
        for e in 0..data.counts[1] {
            if r1.reduced[e].is_empty() && r0.low_owner[e].is_none() {
                essential[1].push(e);
                reps[1].push(r1.ops.as_ref().unwrap()[e].clone());
            }
        }
        for t in 0..data.counts[2] {
            if r1.low_owner[t].is_none() {
                essential[2].push(t);
                reps[2].push(vec![(t as u32, 1)]);
            }
        }
        Reduced { field, red: [r0, r1], essential, reps }
    }

    /// Coordinates of a degree-`d` cocycle in the essential basis.
    fn decompose(&self, d: usize, z: &SparseVec) -> Result<Vec<u64>> {
        let f = self.field;
        let ess: HashMap<u32, usize> = self.essential[d].iter().enumerate().map(|(k, &s)| (s as u32, k)).collect();
        let mut coords = vec![0u64; self.essential[d].len()];
        let mut z = z.clone();
        while let Some(&(low, x)) = z.last() {
            let lower = if d == 0 { None } else { self.red[d - 1].low_owner[low as usize] };
            if let Some(j) = lower {
                let col = &self.red[d - 1].reduced[j as usize];
                let q = f.mul(x, f.inv(col.last().unwrap().1));
                z = f.axpy(&z, f.p - q, col);
            } else if let Some(&k) = ess.get(&low) {
                let w = &self.reps[d][k];
                let q = f.mul(x, f.inv(w.last().unwrap().1));
                coords[k] = (coords[k] + q) % f.p;
                z = f.axpy(&z, f.p - q, w);
            } else {
                return Err(Error::Contract(format!("restricted cochain of degree {d} is not a cocycle")));
            }
        }
        Ok(coords)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CohomologyResult {
    pub coeff: Coeff,
    pub betti: [usize; 3],
    /// Torsion divisors (> 1) per degree; empty over ℤ₂.
    pub torsion: [Vec<i64>; 3],
    /// Representative cocycles per degree as `(parent simplex id, value)`.
    pub representatives: [Vec<Vec<(usize, i64)>>; 3],
}

pub fn cohomology(data: &ChainData, coeff: Coeff) -> Result<CohomologyResult> {
    data.check()?;
    let field = coeff.field();
    let red = Reduced::new(data, field);
    let mut representatives: [Vec<Vec<(usize, i64)>>; 3] = Default::default();
    for d in 0..3 {
        representatives[d] = red.reps[d]
            .iter()
            .map(|w| w.iter().map(|&(i, x)| (data.ids[d][i as usize], field.lift(x))).collect())
            .collect();
    }
    let mut torsion: [Vec<i64>; 3] = Default::default();
    let mut betti = [red.essential[0].len(), red.essential[1].len(), red.essential[2].len()];
    if coeff == Coeff::Z {
        let f1 = invariant_factors(data.counts[0], data.counts[1], &data.boundary1);
        let f2 = invariant_factors(data.counts[1], data.counts[2], &data.boundary2);
        // H^k torsion comes from the invariant factors of δ^{k−1} = ∂_kᵀ
        torsion[1] = f1.iter().copied().filter(|&x| x > 1).collect();
        torsion[2] = f2.iter().copied().filter(|&x| x > 1).collect();
        let (r1, r2) = (f1.len(), f2.len());
        betti = [data.counts[0] - r1, data.counts[1] - r1 - r2, data.counts[2] - r2];
    }
    Ok(CohomologyResult { coeff, betti, torsion, representatives })
}

pub fn surface_cohomology(m: &TriMesh, coeff: Coeff) -> Result<CohomologyResult> {
    cohomology(&ChainData::of_mesh(m), coeff)
}

pub fn subcomplex_cohomology(m: &TriMesh, s: &Subcomplex, coeff: Coeff) -> Result<CohomologyResult> {
    cohomology(&ChainData::from_subcomplex(m, s), coeff)
}

/// Matrix of the restriction map on cohomology in one degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InducedMap {
    pub coeff: Coeff,
    pub degree: usize,
    /// `target_rank × source_rank`, columns indexed by the source basis.
    pub matrix: Vec<Vec<i64>>,
    pub source_rank: usize,
    pub target_rank: usize,
    pub kernel_rank: usize,
    pub image_rank: usize,
    pub cokernel_rank: usize,
}

impl InducedMap {
    pub fn is_monomorphism(&self) -> bool {
        self.kernel_rank == 0
    }
    pub fn is_isomorphism(&self) -> bool {
        self.kernel_rank == 0 && self.cokernel_rank == 0
    }
    pub fn kernel_rank(&self) -> usize {
        self.kernel_rank
    }
    pub fn image_rank(&self) -> usize {
        self.image_rank
    }

    /// `self` after `first`: the composite restriction.
    pub fn compose_after(&self, first: &InducedMap) -> Vec<Vec<i64>> {
        let f = self.coeff.field();
        let (rows, mid, cols) = (self.target_rank, self.source_rank, first.source_rank);
        let mut out = vec![vec![0i64; cols]; rows];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                let mut acc = 0u64;
                for k in 0..mid {
                    acc = (acc + f.mul(f.from_i64(self.matrix[i][k]), f.from_i64(first.matrix[k][j]))) % f.p;
                }
                *slot = f.lift(acc);
            }
        }
        out
    }
}

/// Restriction `H^d(A) → H^d(B)` for subcomplexes `B ⊆ A` of one mesh.
pub fn induced_map_degree(
    m: &TriMesh,
    outer: &Subcomplex,
    inner: &Subcomplex,
    degree: usize,
    coeff: Coeff,
) -> Result<InducedMap> {
    if degree > 2 {
        return Err(Error::Param(format!("degree {degree} is out of range")));
    }
    if !inner.is_subset_of(outer) {
        return Err(Error::Contract("inner complex is not contained in the outer one".into()));
    }
    let field = coeff.field();
    let da = ChainData::from_subcomplex(m, outer);
    let db = ChainData::from_subcomplex(m, inner);
    let ra = Reduced::new(&da, field);
    let rb = Reduced::new(&db, field);
    let local_b: HashMap<usize, u32> = db.ids[degree].iter().enumerate().map(|(k, &g)| (g, k as u32)).collect();
    let mut columns = Vec::with_capacity(ra.reps[degree].len());
    for w in &ra.reps[degree] {
        let mut z: SparseVec =
            w.iter().filter_map(|&(i, x)| local_b.get(&da.ids[degree][i as usize]).map(|&k| (k, x))).collect();
        z.sort_unstable();
        columns.push(rb.decompose(degree, &z)?);
    }
    let (src, tgt) = (ra.essential[degree].len(), rb.essential[degree].len());
    let matrix: Vec<Vec<i64>> = (0..tgt).map(|i| (0..src).map(|j| field.lift(columns[j][i])).collect()).collect();
    let image_rank = if tgt == 0 || src == 0 { 0 } else { dense_rank(field, &matrix) };
    Ok(InducedMap {
        coeff,
        degree,
        matrix,
        source_rank: src,
        target_rank: tgt,
        kernel_rank: src - image_rank,
        image_rank,
        cokernel_rank: tgt - image_rank,
    })
}

/// `i*: H¹(M) → H¹(K)` for `K ⊆ M`.
pub fn induced_map(m: &TriMesh, k: &Subcomplex, coeff: Coeff) -> Result<InducedMap> {
    induced_map_degree(m, &Subcomplex::full(m), k, 1, coeff)
}

pub fn is_monomorphism(im: &InducedMap) -> bool {
    im.is_monomorphism()
}
pub fn kernel_rank(im: &InducedMap) -> usize {
    im.kernel_rank
}
pub fn image_rank(im: &InducedMap) -> usize {
    im.image_rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_sphere, core_piece, disk_piece, glue, star_neighborhood, GluePattern};

    #[test]
    fn sphere_betti() {
        let s = build_sphere(1);
        for c in [Coeff::Z, Coeff::Z2] {
            let h = surface_cohomology(&s, c).unwrap();
            assert_eq!(h.betti, [1, 0, 1]);
            assert!(h.torsion.iter().all(|t| t.is_empty()));
        }
    }

    #[test]
    fn disk_and_circle() {
        let d = disk_piece(0);
        let h = surface_cohomology(&d.mesh, Coeff::Z2).unwrap();
        assert_eq!(h.betti, [1, 0, 0]);
        let mut ring = Subcomplex::empty(&d.mesh);
        for e in d.mesh.boundary_edges() {
            ring.edges[e] = true;
        }
        ring.close(&d.mesh);
        let h = subcomplex_cohomology(&d.mesh, &ring, Coeff::Z).unwrap();
        assert_eq!(h.betti, [1, 1, 0]);
        assert_eq!(h.representatives[1].len(), 1);
    }

    #[test]
    fn projective_plane_has_two_torsion() {
        // minimal 6-vertex RP²
        let tris = [
            [0, 1, 2],
            [0, 2, 3],
            [0, 3, 4],
            [0, 4, 5],
            [0, 5, 1],
            [1, 2, 4],
            [2, 3, 5],
            [3, 4, 1],
            [4, 5, 2],
            [5, 1, 3],
        ];
        let mut b1 = Vec::new();
        let mut b2 = Vec::new();
        let mut edges: Vec<[usize; 2]> = Vec::new();
        for (t, tri) in tris.iter().enumerate() {
            for i in 0..3 {
                let (a, b) = (tri[i], tri[(i + 1) % 3]);
                let key = [a.min(b), a.max(b)];
                let e = match edges.iter().position(|x| *x == key) {
                    Some(e) => e,
                    None => {
                        edges.push(key);
                        b1.push((key[0], edges.len() - 1, -1));
                        b1.push((key[1], edges.len() - 1, 1));
                        edges.len() - 1
                    }
                };
                b2.push((e, t, if a < b { 1 } else { -1 }));
            }
        }
        let data = ChainData {
            counts: [6, edges.len(), 10],
            boundary1: b1,
            boundary2: b2,
            ids: [(0..6).collect(), (0..15).collect(), (0..10).collect()],
        };
        let z = cohomology(&data, Coeff::Z).unwrap();
        assert_eq!(z.betti, [1, 0, 0]);
        assert_eq!(z.torsion[2], vec![2]);
        let z2 = cohomology(&data, Coeff::Z2).unwrap();
        assert_eq!(z2.betti, [1, 1, 1]);
    }

    #[test]
    fn inconsistent_boundaries_are_rejected() {
        let data = ChainData {
            counts: [2, 1, 1],
            boundary1: vec![(0, 0, -1), (1, 0, 1)],
            boundary2: vec![(0, 0, 1)],
            ids: [vec![0, 1], vec![0], vec![0]],
        };
        assert!(matches!(cohomology(&data, Coeff::Z2), Err(Error::Contract(_))));
    }

    #[test]
    fn identity_on_whole_surface() {
        let core = core_piece(4, 0).unwrap();
        let a = crate::mesh::annulus_piece(0);
        let (m, _) = glue(&core, &[&a, &a], &GluePattern::sequential(&[&a, &a])).unwrap();
        for c in [Coeff::Z2, Coeff::Z] {
            let im = induced_map(&m, &Subcomplex::full(&m), c).unwrap();
            assert_eq!(im.source_rank, 4);
            assert_eq!(im.kernel_rank, 0);
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(im.matrix[i][j], (i == j) as i64);
                }
            }
        }
    }

    #[test]
    fn sphere_map_is_zero() {
        let s = build_sphere(2);
        let v = Subcomplex::from_vertices(&s, [0]);
        let k = star_neighborhood(&s, &v, 1);
        let im = induced_map(&s, &k, Coeff::Z2).unwrap();
        assert_eq!((im.source_rank, im.kernel_rank, im.image_rank), (0, 0, 0));
    }
}
