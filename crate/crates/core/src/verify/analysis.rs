//! The analysis document: topology, cohomology of the inclusion, and the
//! region-of-influence report of one fixture.

use serde::{Deserialize, Serialize};

use crate::algebra::{induced_map, subcomplex_cohomology, surface_cohomology, Coeff, InducedMap};
use crate::dynamics::{influence_decomposition, refine_problem, AnalysisParams, Decomposition, InfluenceReport};
use crate::error::{Error, Result};
use crate::flow::{AnnulusVariant, Fixture, Flow};
use crate::mesh::{Subcomplex, TriangulatedSurface};
use crate::SCHEMA;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceSummary {
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
    pub euler_characteristic: i64,
    pub genus: u32,
    pub canonical_hash: u64,
}

impl SurfaceSummary {
    pub fn of(s: &TriangulatedSurface) -> Self {
        SurfaceSummary {
            vertices: s.num_vertices(),
            edges: s.num_edges(),
            triangles: s.num_triangles(),
            euler_characteristic: s.euler_characteristic(),
            genus: s.genus(),
            canonical_hash: s.canonical_hash(),
        }
    }
}

/// Cohomology of `M` and `K` and the restriction `i*` in degree 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CohomologySummary {
    pub coeff: Coeff,
    pub betti_m: [usize; 3],
    pub betti_k: [usize; 3],
    pub torsion_m: [Vec<i64>; 3],
    pub torsion_k: [Vec<i64>; 3],
    pub induced: InducedMap,
}

impl CohomologySummary {
    pub fn compute(s: &TriangulatedSurface, k: &Subcomplex, coeff: Coeff) -> Result<Self> {
        let hm = surface_cohomology(s.mesh(), coeff)?;
        let hk = subcomplex_cohomology(s.mesh(), k, coeff)?;
        let induced = induced_map(s.mesh(), k, coeff)?;
        Ok(CohomologySummary {
            coeff,
            betti_m: hm.betti,
            betti_k: hk.betti,
            torsion_m: hm.torsion,
            torsion_k: hk.torsion,
            induced,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Construction {
    pub g: u32,
    pub ks: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub fixture: String,
    pub surface: SurfaceSummary,
    /// Generator parameters, for generator fixtures only.
    pub construction: Option<Construction>,
    pub annulus_variant: Option<AnnulusVariant>,
    pub params: AnalysisParams,
    /// ℤ₂ first; a ℤ summary follows when requested.
    pub cohomology: Vec<CohomologySummary>,
    pub influence: InfluenceReport,
}

impl AnalysisReport {
    pub fn z2(&self) -> Result<&CohomologySummary> {
        self.cohomology
            .iter()
            .find(|c| c.coeff == Coeff::Z2)
            .ok_or_else(|| Error::Parse("report has no ℤ₂ cohomology".into()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: AnalysisReport = serde_json::from_str(text)?;
        if r.schema != SCHEMA {
            return Err(Error::Parse(format!("report schema {} is not supported (expected {SCHEMA})", r.schema)));
        }
        Ok(r)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// A fixture after analysis, with the refined objects the report was
/// computed on.
pub struct Analysis {
    pub report: AnalysisReport,
    pub surface: TriangulatedSurface,
    pub k: Subcomplex,
    pub flow: Flow,
    pub decomposition: Decomposition,
}

pub fn analyze(f: &Fixture, params: &AnalysisParams, coeff: Coeff) -> Result<Analysis> {
    let mut cohomology = vec![CohomologySummary::compute(&f.surface, &f.k, Coeff::Z2)?];
    if coeff == Coeff::Z {
        cohomology.push(CohomologySummary::compute(&f.surface, &f.k, Coeff::Z)?);
    }
    let (surface, k, flow) = refine_problem(&f.surface, &f.k, &f.flow, params.refine);
    let decomposition = influence_decomposition(surface.mesh(), &k, &flow, params)?;
    let report = AnalysisReport {
        schema: SCHEMA,
        fixture: f.name.clone(),
        surface: SurfaceSummary::of(&f.surface),
        construction: (!f.ks.is_empty()).then(|| Construction { g: f.genus, ks: f.ks.clone() }),
        annulus_variant: f.annulus_variant,
        params: params.clone(),
        cohomology,
        influence: decomposition.report.clone(),
    };
    Ok(Analysis { report, surface, k, flow, decomposition })
}

pub fn analyze_fixture(f: &Fixture, params: &AnalysisParams, coeff: Coeff) -> Result<AnalysisReport> {
    Ok(analyze(f, params, coeff)?.report)
}
