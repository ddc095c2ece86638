use std::collections::HashMap;

use super::{Subcomplex, SurfacePiece, TriMesh, TriangulatedSurface};
use crate::error::{Error, Result};

/// Pairing of core boundary circles with piece boundary circles.
#[derive(Clone, Debug, Default)]
pub struct GluePattern {
    /// `(core circle, piece index, piece circle)`.
    pub pairs: Vec<(usize, usize, usize)>,
    /// Identify circles preserving their induced direction; this produces a
    /// non-orientable complex and exists to exercise the orientation check.
    pub preserve_direction: bool,
}

impl GluePattern {
    /// Attach piece circles in order to consecutive core circles.
    pub fn sequential(pieces: &[&SurfacePiece]) -> Self {
        let mut pairs = Vec::new();
        let mut next = 0;
        for (pi, p) in pieces.iter().enumerate() {
            for c in 0..p.boundary.len() {
                pairs.push((next, pi, c));
                next += 1;
            }
        }
        GluePattern { pairs, preserve_direction: false }
    }
}

/// Glue pieces onto a core. Vertices are numbered by `(piece id, local id)`
/// with the core as piece 0; seam vertices keep their core id. Returns the
/// closed surface and the image of the core.
pub fn glue(
    core: &SurfacePiece,
    pieces: &[&SurfacePiece],
    pattern: &GluePattern,
) -> Result<(TriangulatedSurface, Subcomplex)> {
    let mut core_used = vec![false; core.boundary.len()];
    let mut piece_used: Vec<Vec<bool>> = pieces.iter().map(|p| vec![false; p.boundary.len()]).collect();
    for &(cc, pi, pc) in &pattern.pairs {
        let slot = core_used.get_mut(cc).ok_or_else(|| Error::Glue(format!("core has no boundary circle {cc}")))?;
        let pslot = piece_used
            .get_mut(pi)
            .and_then(|v| v.get_mut(pc))
            .ok_or_else(|| Error::Glue(format!("piece {pi} has no boundary circle {pc}")))?;
        if *slot || *pslot {
            return Err(Error::Glue("pattern uses a boundary circle twice".into()));
        }
        *slot = true;
        *pslot = true;
        let (a, b) = (core.boundary[cc].len(), pieces[pi].boundary[pc].len());
        if a != b {
            return Err(Error::Glue(format!("core circle {cc} has {a} edges but piece {pi} circle {pc} has {b}")));
        }
    }
    if core_used.iter().any(|&u| !u) || piece_used.iter().flatten().any(|&u| !u) {
        return Err(Error::Glue("pattern is not a perfect matching of boundary circles".into()));
    }

    let cm = &core.mesh;
    let mut charts = cm.charts().to_vec();
    let mut tris: Vec<[usize; 3]> = cm.triangles().to_vec();
    let mut tri_chart: Vec<usize> = cm.tri_charts().to_vec();
    let mut corners = cm.all_corners().to_vec();
    let mut next = cm.num_vertices();
    for (pi, p) in pieces.iter().enumerate() {
        let mut seam: HashMap<usize, usize> = HashMap::new();
        for &(cc, _, pc) in pattern.pairs.iter().filter(|x| x.1 == pi) {
            let cyc = &core.boundary[cc];
            let pcyc = &p.boundary[pc];
            let n = cyc.len();
            for (j, &v) in pcyc.iter().enumerate() {
                let target = if pattern.preserve_direction { cyc[j] } else { cyc[(n - j) % n] };
                seam.insert(v, target);
            }
        }
        let mut map = vec![usize::MAX; p.mesh.num_vertices()];
        for (v, slot) in map.iter_mut().enumerate() {
            *slot = match seam.get(&v) {
                Some(&t) => t,
                None => {
                    next += 1;
                    next - 1
                }
            };
        }
        let chart_off = charts.len();
        charts.extend(p.mesh.charts().iter().cloned());
        for t in 0..p.mesh.num_triangles() {
            let tri = p.mesh.triangle(t);
            tris.push([map[tri[0]], map[tri[1]], map[tri[2]]]);
            tri_chart.push(chart_off + p.mesh.chart_of(t));
            corners.push(*p.mesh.corners(t));
        }
    }
    let mesh = TriMesh::new(next, tris, charts, tri_chart, corners)?;
    let k = Subcomplex::from_triangles(&mesh, 0..cm.num_triangles());
    let surf = TriangulatedSurface::from_mesh(mesh)?;
    Ok((surf, k))
}

#[cfg(test)]
mod tests {
    use super::super::{annulus_piece, core_piece, disk_piece, handle_piece};
    use super::*;

    #[test]
    fn core_with_two_annuli_is_genus_two() {
        let core = core_piece(4, 0).unwrap();
        let a = annulus_piece(0);
        let (m, k) = glue(&core, &[&a, &a], &GluePattern::sequential(&[&a, &a])).unwrap();
        assert_eq!(m.euler_characteristic(), -2);
        assert_eq!(m.genus(), 2);
        assert!(k.is_face_closed(&m));
        assert_eq!(k.num_triangles(), core.mesh.num_triangles());
    }

    #[test]
    fn disk_cap_makes_a_sphere() {
        let core = core_piece(1, 0).unwrap();
        let d = disk_piece(0);
        let (m, _) = glue(&core, &[&d], &GluePattern::sequential(&[&d])).unwrap();
        assert_eq!(m.euler_characteristic(), 2);
        assert_eq!(m.genus(), 0);
    }

    #[test]
    fn disk_and_handle_give_genus_two() {
        let core = core_piece(4, 0).unwrap();
        let d = disk_piece(0);
        let h = handle_piece(2, 0).unwrap();
        let (m, _) = glue(&core, &[&d, &h], &GluePattern::sequential(&[&d, &h])).unwrap();
        assert_eq!(m.euler_characteristic(), -2);
        assert_eq!(m.genus(), 2);
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        let core = core_piece(1, 0).unwrap();
        let d = disk_piece(1);
        let err = glue(&core, &[&d], &GluePattern::sequential(&[&d])).unwrap_err();
        assert!(matches!(err, Error::Glue(_)));
    }

    #[test]
    fn incomplete_matching_is_rejected() {
        let core = core_piece(2, 0).unwrap();
        let d = disk_piece(0);
        let err = glue(&core, &[&d], &GluePattern::sequential(&[&d])).unwrap_err();
        assert!(matches!(err, Error::Glue(_)));
    }

    #[test]
    fn direction_preserving_glue_is_not_orientable() {
        let core = core_piece(2, 0).unwrap();
        let a = annulus_piece(0);
        let mut pat = GluePattern::sequential(&[&a]);
        pat.preserve_direction = true;
        let err = glue(&core, &[&a], &pat).unwrap_err();
        assert!(matches!(err, Error::Orientation(_)), "{err:?}");
    }

    #[test]
    fn gluing_order_does_not_change_the_complex() {
        let core = core_piece(6, 0).unwrap();
        let d = disk_piece(0);
        let a = annulus_piece(0);
        let h = handle_piece(2, 0).unwrap();
        let (m1, _) = glue(&core, &[&d, &a, &h], &GluePattern::sequential(&[&d, &a, &h])).unwrap();
        // the same circle assignment, listed with the pieces in another order
        let pat2 = GluePattern {
            pairs: vec![(3, 0, 0), (4, 0, 1), (5, 0, 2), (1, 1, 0), (2, 1, 1), (0, 2, 0)],
            preserve_direction: false,
        };
        let (m2, _) = glue(&core, &[&h, &a, &d], &pat2).unwrap();
        assert_eq!(m1.canonical_hash(), m2.canonical_hash());
        assert_eq!(
            (m1.num_vertices(), m1.num_edges(), m1.num_triangles()),
            (m2.num_vertices(), m2.num_edges(), m2.num_triangles())
        );
    }
}
