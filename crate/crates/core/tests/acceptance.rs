//! The acceptance suite. Each criterion prints one PASS/FAIL line; the test
//! fails if any criterion does.

use std::io::Write;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nonsaddle::algebra::{smith_normal_form, surface_cohomology, Coeff, IntegerMatrix};
use nonsaddle::continuation::{default_lambda_grid, sweep, SweepParams};
use nonsaddle::dynamics::{invariant_part, AnalysisParams, GridDynamics};
use nonsaddle::flow::{
    example1_fixture, example2_fixture, exit_time, generator, sphere_circle, torus_nonsep, ChartField, FamilyKind,
    Fixture, Flow, FlowFamily, Point, FAMILY_SUBDIV,
};
use nonsaddle::geom::{self, Vec3};
use nonsaddle::mesh::{planar_domain, Circle, Locator, PieceKind, PlanarDomain};
use nonsaddle::verify::{analyze_fixture, check_structure, AnalysisReport, Status};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

/// Criterion lines go straight to stderr so they show without `--nocapture`.
fn report_line(id: usize, name: &str, o: &Outcome, elapsed: Duration, limit: Option<f64>) -> bool {
    let in_time = limit.is_none_or(|l| elapsed.as_secs_f64() < l);
    let ok = o.ok && in_time;
    let limit = limit.map(|l| format!(" (limit {l} s)")).unwrap_or_default();
    let line = format!(
        "criterion {id:2} {name}: {} [{:.2} s{limit}] {}\n",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        o.detail
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    ok
}

fn timed<F: FnOnce() -> Outcome>(f: F) -> (Outcome, Duration) {
    let t = Instant::now();
    let o = f();
    (o, t.elapsed())
}

fn cohomology_engine() -> Outcome {
    let mut bad = Vec::new();
    for g in 0..=3u32 {
        let ks = if g == 0 { vec![0] } else { vec![g as usize] };
        let fx = generator(g, &ks, 0).unwrap();
        for coeff in [Coeff::Z, Coeff::Z2] {
            let h = surface_cohomology(fx.surface.mesh(), coeff).unwrap();
            let want = [1, 2 * g as usize, 1];
            if h.betti != want || h.torsion.iter().any(|t| !t.is_empty()) {
                bad.push(format!("g {g} {coeff:?}: betti {:?} torsion {:?}", h.betti, h.torsion));
            }
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { "betti (1, 2g, 1), no torsion, g ≤ 3".into() } else { bad.join("; ") })
}

fn snf_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..200 {
        let (r, c) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        let a = IntegerMatrix::from_rows(&rows);
        let (u, d, v) = smith_normal_form(&a);
        if u.mul(&a).mul(&v) != d || !d.is_diagonal() {
            return outcome(false, format!("matrix {trial}: D ≠ UAV"));
        }
        if !u.determinant().abs().is_one() || !v.determinant().abs().is_one() {
            return outcome(false, format!("matrix {trial}: transform not unimodular"));
        }
        let diag: Vec<BigInt> = (0..r.min(c)).map(|k| d.get(k, k).clone()).collect();
        if diag.iter().any(|x| x.is_negative()) {
            return outcome(false, format!("matrix {trial}: negative diagonal"));
        }
        for w in diag.windows(2) {
            let divides = if w[0].is_zero() { w[1].is_zero() } else { (&w[1] % &w[0]).is_zero() };
            if !divides {
                return outcome(false, format!("matrix {trial}: {} does not divide {}", w[0], w[1]));
            }
        }
        let g = rows.iter().flatten().fold(BigInt::zero(), |acc, &x| acc.gcd(&BigInt::from(x)));
        if diag[0] != g {
            return outcome(false, format!("matrix {trial}: d1 {} vs gcd {g}", diag[0]));
        }
    }
    outcome(true, "200 matrices up to 8×8")
}

fn random_partition(rng: &mut ChaCha8Rng, g: usize) -> Vec<usize> {
    let mut left = g;
    let mut ks = Vec::new();
    while left > 0 {
        let k = rng.gen_range(1..=left);
        ks.push(k);
        left -= k;
    }
    if ks.is_empty() || rng.gen_bool(0.3) {
        ks.push(0);
    }
    ks
}

fn gluing_arithmetic() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let g = rng.gen_range(0..=4usize);
        let ks = random_partition(&mut rng, g);
        let fx = generator(g as u32, &ks, 0).unwrap();
        let chi = fx.surface.mesh().euler_characteristic();
        if chi != 2 - 2 * g as i64 {
            return outcome(false, format!("g {g} {ks:?}: χ = {chi}"));
        }
    }
    outcome(true, "20 random configurations, χ = 2 − 2g")
}

fn analysis(fx: &Fixture) -> AnalysisReport {
    analyze_fixture(fx, &AnalysisParams::default(), Coeff::Z2).unwrap()
}

fn example_1() -> Outcome {
    let r = analysis(&example1_fixture(0).unwrap());
    let inf = &r.influence;
    let local = inf.local_complexities();
    let ok = inf.valid && inf.complexity == 2 && local == [1, 1] && inf.dissonant.is_empty();
    outcome(ok, format!("complexity {}, local {local:?}, {} dissonant", inf.complexity, inf.dissonant.len()))
}

fn example_2() -> Outcome {
    let r = analysis(&example2_fixture(0).unwrap());
    let inf = &r.influence;
    let mut local = inf.local_complexities();
    local.sort_unstable();
    let ok =
        inf.valid && inf.complexity == 2 && local == [0, 2] && !inf.dissonant.is_empty() && inf.census.total() == 1;
    outcome(
        ok,
        format!(
            "complexity {}, local {local:?}, {} dissonant, {} fixed points",
            inf.complexity,
            inf.dissonant.len(),
            inf.census.total()
        ),
    )
}

/// Every partition of g ≤ 3 into positive parts, each also with an extra
/// 0 part; g = 0 is the single cap.
fn configurations() -> Vec<(u32, Vec<usize>)> {
    let mut out = vec![(0, vec![0])];
    let parts: [&[&[usize]]; 3] = [&[&[1]], &[&[2], &[1, 1]], &[&[3], &[2, 1], &[1, 1, 1]]];
    for (i, ps) in parts.iter().enumerate() {
        for p in *ps {
            out.push((i as u32 + 1, p.to_vec()));
            let mut q = p.to_vec();
            q.push(0);
            out.push((i as u32 + 1, q));
        }
    }
    out
}

fn census_suite(reports: &[(u32, Vec<usize>, AnalysisReport)]) -> Outcome {
    let mut bad = Vec::new();
    for (g, ks, r) in reports {
        let count = |f: fn(usize) -> bool| ks.iter().filter(|&&x| f(x)).count();
        let (k, m, l) = (count(|x| x > 1), count(|x| x == 1), count(|x| x == 0));
        let g = *g as usize;
        let (want, total) = ((l, g - k - m, m), g - k + l);
        let c = &r.influence.census;
        if (c.attracting, c.hyperbolic_saddle, c.degenerate_saddle) != want || c.total() != total {
            bad.push(format!("{g} {ks:?}: {c:?} vs {want:?}"));
        }
    }
    let n = reports.len();
    outcome(bad.is_empty(), if bad.is_empty() { format!("{n} configurations") } else { bad.join("; ") })
}

fn bound_suite(reports: &[(u32, Vec<usize>, AnalysisReport)]) -> Outcome {
    let mut bad = Vec::new();
    for (g, ks, r) in reports {
        let z2 = r.z2().unwrap();
        let c = r.influence.complexity;
        let (ker, im) = (z2.induced.kernel_rank as i64, z2.induced.image_rank as i64);
        if !r.influence.valid || c != *g as i64 || c > ker || c > im {
            bad.push(format!("{g} {ks:?}: complexity {c}, ker {ker}, im {im}"));
        }
    }
    let n = reports.len();
    outcome(
        bad.is_empty(),
        if bad.is_empty() { format!("{n} configurations, complexity = g ≤ ranks") } else { bad.join("; ") },
    )
}

fn torus_case(reports: &[(u32, Vec<usize>, AnalysisReport)]) -> Outcome {
    let r = &reports.iter().find(|(g, ks, _)| *g == 1 && ks == &[1]).unwrap().2;
    let c = r.influence.complexity;
    outcome(c == 1, format!("complexity {c}"))
}

fn structure_gating(reports: &[AnalysisReport]) -> Outcome {
    let mut gated = 0;
    let mut bad = Vec::new();
    for r in reports {
        let mono = r.z2().unwrap().induced.is_monomorphism();
        if r.surface.genus == 0 && !mono {
            bad.push(format!("{}: sphere fixture without injective i*", r.fixture));
        }
        if mono {
            gated += 1;
            let v = check_structure(r).unwrap();
            if v.status != Status::Pass {
                bad.push(format!("{}: {}", r.fixture, v.detail));
            }
        }
    }
    let ok = bad.is_empty() && gated > 0;
    outcome(ok, if bad.is_empty() { format!("{gated} fixtures with injective i*") } else { bad.join("; ") })
}

fn continuation() -> Outcome {
    let fam = FlowFamily::new(FamilyKind::SphereCircle, FAMILY_SUBDIV);
    let grid = default_lambda_grid();
    let r = match sweep(&fam, &grid, &SweepParams::default()) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let mut bad = Vec::new();
    for c in &r.columns {
        let at_zero = c.lambda == 0.0;
        let probe = c.saddle_probe;
        if !c.counted() {
            bad.push(format!("λ {} not isolating", c.lambda));
        } else if c.rchar != at_zero || c.strongrob != at_zero || probe != Some(!at_zero) {
            bad.push(format!("λ {}: rchar {} strongrob {} probe {probe:?}", c.lambda, c.rchar, c.strongrob));
        }
        let b1 = if at_zero { 1 } else { 0 };
        if c.betti_k[1] != b1 {
            bad.push(format!("λ {}: b1(K) {}", c.lambda, c.betti_k[1]));
        }
    }
    if r.columns.len() != 11 {
        bad.push(format!("{} columns", r.columns.len()));
    }
    if !r.verdict.passed {
        bad.push("robustness verdict failed".into());
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() { format!("11 columns, transition at {:?}", r.verdict.transition) } else { bad.join("; ") },
    )
}

/// Removal to a fixed point by full sweeps, independent of the library's
/// worklist pruning.
fn naive_invariant_part(g: &GridDynamics, n: &[bool]) -> Vec<bool> {
    let mut s = n.to_vec();
    loop {
        let mut changed = false;
        for c in 0..s.len() {
            if s[c] {
                let succ = g.forward[c].iter().any(|&d| s[d as usize]);
                let pred = (0..s.len()).any(|p| s[p] && g.forward[p].contains(&(c as u32)));
                if !succ || !pred {
                    s[c] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            return s;
        }
    }
}

fn is_invariant(g: &GridDynamics, s: &[bool]) -> bool {
    (0..s.len())
        .filter(|&c| s[c])
        .all(|c| g.forward[c].iter().any(|&d| s[d as usize]) && g.backward[c].iter().any(|&d| s[d as usize]))
}

fn invariant_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..30 {
        let n = rng.gen_range(1..=500usize);
        let degree = rng.gen_range(0..=3usize);
        let map: Vec<Vec<u32>> = (0..n)
            .map(|c| {
                let mut img: Vec<u32> = (0..rng.gen_range(0..=degree)).map(|_| rng.gen_range(0..n as u32)).collect();
                // some local structure, so the invariant parts are not all empty
                if rng.gen_bool(0.5) {
                    img.push(((c + 1) % n) as u32);
                }
                img
            })
            .collect();
        let g = GridDynamics::from_map(map);
        let mask: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.85)).collect();
        let s = invariant_part(&g, &mask);
        if (0..n).any(|c| s[c] && !mask[c]) || !is_invariant(&g, &s) {
            return outcome(false, format!("grid {trial}: result not an invariant subset of N"));
        }
        if s != naive_invariant_part(&g, &mask) {
            return outcome(false, format!("grid {trial}: differs from full-sweep removal"));
        }
        for c in (0..n).filter(|&c| mask[c] && !s[c]) {
            let mut t = s.clone();
            t[c] = true;
            if is_invariant(&g, &t) {
                return outcome(false, format!("grid {trial}: adding cell {c} stays invariant"));
            }
        }
        for c in 0..n {
            if g.forward[c].iter().any(|&d| !g.backward[d as usize].contains(&(c as u32))) {
                return outcome(false, format!("grid {trial}: backward map is not the transpose"));
            }
        }
    }
    outcome(true, "30 random grids up to 500 cells")
}

#[derive(Debug)]
struct Radial;

impl ChartField for Radial {
    fn velocity(&self, p: Vec3) -> Vec3 {
        [p[0], p[1], 0.0]
    }
}

fn exit_time_check() -> Outcome {
    let d = PlanarDomain { outer: Circle::new([0.0, 0.0], 3.0, 48), holes: vec![], spacing: 0.3, required: vec![] };
    let piece = planar_domain(&d, PieceKind::Disk, "radial").unwrap();
    let m = &piece.mesh;
    let mut flow = Flow::zero(m);
    flow.charts[0].field = Some(Arc::new(Radial));
    let x0 = [0.6, 0.8, 0.0];
    let t = Locator::new(m).locate(m, 0, x0).unwrap();
    let inside = |x: &Point| geom::norm(x.pos) <= 2.0;
    let got = exit_time(m, &flow, &inside, Point { tri: t, pos: x0 }, 0.01, 10.0).unwrap();
    let want = std::f64::consts::LN_2;
    match got {
        Some(t) => outcome((t - want).abs() < 1e-3, format!("t = {t:.6}, ln 2 = {want:.6}")),
        None => outcome(false, "orbit did not leave"),
    }
}

#[test]
fn acceptance() {
    let mut all = true;
    let mut run = |id: usize, name: &str, limit: Option<f64>, f: &mut dyn FnMut() -> Outcome| {
        let (o, t) = timed(f);
        all &= report_line(id, name, &o, t, limit);
    };
    run(1, "cohomology engine", Some(5.0), &mut cohomology_engine);
    run(2, "Smith normal form", Some(5.0), &mut snf_suite);
    run(3, "gluing arithmetic", None, &mut gluing_arithmetic);
    run(4, "first example", Some(60.0), &mut example_1);
    run(5, "second example", Some(60.0), &mut example_2);

    let t = Instant::now();
    let reports: Vec<(u32, Vec<usize>, AnalysisReport)> = configurations()
        .into_iter()
        .map(|(g, ks)| {
            let r = analysis(&generator(g, &ks, 0).unwrap());
            (g, ks, r)
        })
        .collect();
    let shared = t.elapsed();
    let _ = std::io::stderr().write_all(format!("generator analyses: {:.2} s\n", shared.as_secs_f64()).as_bytes());
    run(6, "census formula", None, &mut || census_suite(&reports));
    run(7, "bound suite", None, &mut || bound_suite(&reports));
    run(8, "torus case", None, &mut || torus_case(&reports));
    run(9, "structure gating", None, &mut || {
        let mut rs: Vec<AnalysisReport> = reports.iter().map(|(_, _, r)| r.clone()).collect();
        rs.push(analysis(&example1_fixture(0).unwrap()));
        rs.push(analysis(&example2_fixture(0).unwrap()));
        rs.push(analysis(&torus_nonsep(0).unwrap()));
        rs.push(analysis(&sphere_circle(0.0, 3)));
        structure_gating(&rs)
    });
    run(10, "continuation equivalence", Some(120.0), &mut continuation);
    run(11, "invariant-set oracle", Some(30.0), &mut invariant_oracle);
    run(12, "exit time", Some(1.0), &mut exit_time_check);
    assert!(all, "some acceptance criteria failed");
}
