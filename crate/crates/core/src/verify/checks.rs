//! Theorem checks on an analysis report, each a three-valued verdict.

use serde::{Deserialize, Serialize};

use super::analysis::AnalysisReport;
use crate::dynamics::LabelCounts;
use crate::error::Result;
use crate::SCHEMA;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub status: Status,
    pub detail: String,
}

impl Verdict {
    fn new(check: &str, status: Status, detail: impl Into<String>) -> Self {
        Verdict { check: check.into(), status, detail: detail.into() }
    }

    fn assert(check: &str, ok: bool, detail: impl Into<String>) -> Self {
        Verdict::new(check, if ok { Status::Pass } else { Status::Fail }, detail)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictDocument {
    pub schema: u32,
    pub subject: String,
    pub verdicts: Vec<Verdict>,
    pub passed: bool,
    pub warnings: Vec<String>,
}

impl VerdictDocument {
    /// 1 when any check failed, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn failed(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| v.status == Status::Fail)
    }

    pub fn get(&self, check: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.check == check)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdicts serialize")
    }
}

/// Dissonant cells vanish and every component of `M ∖ K` is uniformly
/// attracted or repelled with one collar component, when `i*` is injective.
pub fn check_structure(r: &AnalysisReport) -> Result<Verdict> {
    const NAME: &str = "check_structure";
    let im = &r.z2()?.induced;
    if !im.is_monomorphism() {
        return Ok(Verdict::new(NAME, Status::NotApplicable, format!("i* has kernel rank {} over Z2", im.kernel_rank)));
    }
    let inf = &r.influence;
    let mut problems = Vec::new();
    if !inf.dissonant.is_empty() {
        problems.push(format!("{} dissonant cells", inf.dissonant.len()));
    }
    for c in &inf.complement {
        if !uniform(&c.labels) {
            problems.push(format!("component at cell {} mixes labels {:?}", c.least_cell, c.labels));
        }
        if c.boundary_components != 1 {
            problems
                .push(format!("component at cell {} meets {} collar components", c.least_cell, c.boundary_components));
        }
    }
    let detail = if problems.is_empty() {
        format!("{} components of M∖K, each uniform with one collar component", inf.complement.len())
    } else {
        problems.join("; ")
    };
    Ok(Verdict::assert(NAME, problems.is_empty(), detail))
}

/// Cells of the region of influence in a complement component carry one
/// trichotomy label, attracted or repelled.
fn uniform(l: &LabelCounts) -> bool {
    l.homoclinic == 0 && l.undetermined == 0 && (l.purely_attracted == 0 || l.purely_repelled == 0)
}

/// `𝔠 ≤ rank ker i*₁`, `𝔠 ≤ rank im i*₁` and `𝔠 ≤ b₁(K)` over ℤ₂.
pub fn check_complexity_bounds(r: &AnalysisReport) -> Result<Verdict> {
    let z2 = r.z2()?;
    let c = r.influence.complexity;
    let (ker, im, b1k) = (z2.induced.kernel_rank as i64, z2.induced.image_rank as i64, z2.betti_k[1] as i64);
    Ok(Verdict::assert(
        "check_complexity_bounds",
        c <= ker && c <= im && c <= b1k,
        format!("complexity {c}, rank ker {ker}, rank im {im}, b1(K) {b1k}"),
    ))
}

pub fn check_genus_bound(r: &AnalysisReport) -> Verdict {
    let (c, g) = (r.influence.complexity, r.surface.genus as i64);
    Verdict::assert("check_genus_bound", c <= g, format!("complexity {c}, genus {g}"))
}

/// With `rank H¹(K) = rank H¹(M)` and `M ∖ K` connected, `N ∖ K` is all
/// attracted or all repelled.
pub fn check_nonsep(r: &AnalysisReport) -> Result<Verdict> {
    const NAME: &str = "check_nonsep";
    let z2 = r.z2()?;
    let inf = &r.influence;
    if z2.betti_k[1] != z2.betti_m[1] || inf.complement.len() != 1 {
        return Ok(Verdict::new(
            NAME,
            Status::NotApplicable,
            format!("b1(K) {} vs b1(M) {}, {} components of M∖K", z2.betti_k[1], z2.betti_m[1], inf.complement.len()),
        ));
    }
    let l = &inf.block.labels;
    let total = l.in_k + l.homoclinic + l.purely_attracted + l.purely_repelled + l.outside + l.undetermined;
    let kind = if total > 0 && l.purely_attracted == total {
        Some("an attractor")
    } else if total > 0 && l.purely_repelled == total {
        Some("a repeller")
    } else {
        None
    };
    Ok(match kind {
        Some(k) => Verdict::new(NAME, Status::Pass, format!("K is {k}")),
        None => Verdict::new(NAME, Status::Fail, format!("labels of N∖K are mixed: {l:?}")),
    })
}

/// Isolated fixed points number `(l, g − k − m, m)` by type, where `k`,
/// `m`, `l` count the partition entries above, equal to and below 1.
pub fn check_census(r: &AnalysisReport) -> Verdict {
    const NAME: &str = "check_census";
    let Some(c) = &r.construction else {
        return Verdict::new(NAME, Status::NotApplicable, "not a generator fixture");
    };
    let (expected, total) = census_formula(c.g, &c.ks);
    let got = &r.influence.census;
    let actual = (got.attracting, got.hyperbolic_saddle, got.degenerate_saddle);
    Verdict::assert(
        NAME,
        actual == expected && got.total() == total,
        format!("expected (attracting, hyperbolic, degenerate) = {expected:?} with total {total}, found {actual:?}"),
    )
}

/// `((l, g − k − m, m), g − k + l)` for a partition.
pub fn census_formula(g: u32, ks: &[usize]) -> ((usize, usize, usize), usize) {
    let k = ks.iter().filter(|&&x| x > 1).count();
    let m = ks.iter().filter(|&&x| x == 1).count();
    let l = ks.iter().filter(|&&x| x == 0).count();
    let g = g as usize;
    ((l, g - k - m, m), g - k + l)
}

/// The three complexity counts agree, local complexities are non-negative
/// and, on a valid report, vanish exactly on components without homoclinic
/// cells.
pub fn check_complexity_consistency(r: &AnalysisReport) -> Verdict {
    let inf = &r.influence;
    let mut problems = Vec::new();
    let local: i64 = inf.components.iter().map(|c| c.local_complexity).sum();
    if !(inf.complexity == local
        && inf.complexity == inf.complexity_k_minus_m
        && inf.complexity == inf.complexity_direct)
    {
        problems.push(format!(
            "complexity {}, sum of local {}, k − m {}, direct {}",
            inf.complexity, local, inf.complexity_k_minus_m, inf.complexity_direct
        ));
    }
    if inf.k_ends as i64 - inf.components.len() as i64 != inf.complexity_k_minus_m {
        problems.push("k − m does not match the end and component counts".into());
    }
    for c in &inf.components {
        if c.local_complexity < 0 {
            problems.push(format!("component at cell {} has local complexity {}", c.least_cell, c.local_complexity));
        }
        if inf.valid && (c.local_complexity == 0) != (c.labels.homoclinic == 0) {
            problems.push(format!(
                "component at cell {} has local complexity {} and {} homoclinic cells",
                c.least_cell, c.local_complexity, c.labels.homoclinic
            ));
        }
    }
    let detail = if problems.is_empty() { format!("complexity {}", inf.complexity) } else { problems.join("; ") };
    Verdict::assert("check_complexity_consistency", problems.is_empty(), detail)
}

/// Every check on one report. The theorem checks assume a certified block;
/// on an invalid report they are not applicable.
pub fn verify_report(r: &AnalysisReport) -> Result<VerdictDocument> {
    let mut warnings = Vec::new();
    let mut verdicts = vec![check_complexity_consistency(r)];
    if r.influence.valid {
        verdicts.push(check_structure(r)?);
        verdicts.push(check_complexity_bounds(r)?);
        verdicts.push(check_genus_bound(r));
        verdicts.push(check_nonsep(r)?);
        verdicts.push(check_census(r));
    } else {
        warnings.push(format!("report is not valid: {}", r.influence.notes.join("; ")));
        for name in ["check_structure", "check_complexity_bounds", "check_genus_bound", "check_nonsep", "check_census"]
        {
            verdicts.push(Verdict::new(name, Status::NotApplicable, "no certified non-saddle block"));
        }
    }
    if r.influence.census.heuristic {
        warnings.push("fixed-point census is heuristic".into());
    }
    for v in &verdicts {
        if v.status == Status::NotApplicable {
            warnings.push(format!("{} not applicable: {}", v.check, v.detail));
        }
    }
    let passed = verdicts.iter().all(|v| v.status != Status::Fail);
    Ok(VerdictDocument { schema: SCHEMA, subject: r.fixture.clone(), verdicts, passed, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Coeff;
    use crate::dynamics::AnalysisParams;
    use crate::flow::generator;
    use crate::verify::analyze_fixture;

    fn torus_report() -> AnalysisReport {
        analyze_fixture(&generator(1, &[1], 0).unwrap(), &AnalysisParams::default(), Coeff::Z2).unwrap()
    }

    #[test]
    fn census_formula_examples() {
        assert_eq!(census_formula(2, &[1, 1]), ((0, 0, 2), 2));
        assert_eq!(census_formula(2, &[0, 2]), ((1, 1, 0), 2));
        assert_eq!(census_formula(4, &[0, 1, 3]), ((1, 2, 1), 4));
        assert_eq!(census_formula(0, &[0]), ((1, 0, 0), 1));
    }

    #[test]
    fn torus_passes_and_tampering_fails() {
        let r = torus_report();
        let doc = verify_report(&r).unwrap();
        assert!(doc.passed, "{}", doc.to_json());
        assert_eq!(doc.exit_code(), 0);
        assert_eq!(doc.get("check_census").unwrap().status, Status::Pass);

        let mut bad = r.clone();
        bad.influence.complexity += 1;
        let doc = verify_report(&bad).unwrap();
        assert_eq!(doc.exit_code(), 1);
        let failed: Vec<&str> = doc.failed().map(|v| v.check.as_str()).collect();
        assert!(failed.contains(&"check_genus_bound") && failed.contains(&"check_complexity_bounds"), "{failed:?}");
    }

    #[test]
    fn invalid_reports_skip_the_theorem_checks() {
        let mut r = torus_report();
        r.influence.valid = false;
        r.influence.complexity = 7;
        r.influence.complexity_direct = 7;
        r.influence.complexity_k_minus_m = 7;
        r.influence.k_ends += 6;
        r.influence.components[0].local_complexity = 7;
        let doc = verify_report(&r).unwrap();
        for v in &doc.verdicts[1..] {
            assert_eq!(v.status, Status::NotApplicable, "{}", v.check);
        }
        assert!(doc.passed);
        assert!(doc.warnings.iter().any(|w| w.starts_with("report is not valid")));
    }

    #[test]
    fn report_json_round_trips_and_checks_schema() {
        let r = torus_report();
        let text = r.to_json();
        assert_eq!(AnalysisReport::from_json(&text).unwrap(), r);
        let wrong = text.replacen("\"schema\": 1", "\"schema\": 2", 1);
        assert!(AnalysisReport::from_json(&wrong).is_err());
    }
}
