//! Machine checks of the complexity, structure and census theorems.

mod analysis;
mod checks;

pub use analysis::{
    analyze, analyze_fixture, Analysis, AnalysisReport, CohomologySummary, Construction, SurfaceSummary,
};
pub use checks::{
    census_formula, check_census, check_complexity_bounds, check_complexity_consistency, check_genus_bound,
    check_nonsep, check_structure, verify_report, Status, Verdict, VerdictDocument,
};
