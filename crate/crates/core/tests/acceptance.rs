//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p hcontact --test acceptance`.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use hcontact::area::{QuadratureDomain, Rect};
use hcontact::field::{mollify, Bump, IntrinsicFunction, ScalarField, TestField, DEFAULT_QUAD};
use hcontact::heisenberg::{contact_defect, contact_lift, control_map, family_map, lift_leaf, HPoint};
use hcontact::profile::{check_admissibility, LagrangianProfile, ZetaWindow};
use hcontact::variation::{scaled_difference, variation_report, DiffeoFamily, ReportOptions, VariationProblem, VariationReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CELLS: usize = 64;
const ORDER: usize = 4;
const FIELDS: usize = 10;
const ALIGN_CELLS: usize = 16;
const BUMPS_PER_COMPONENT: usize = 2;
const SEED: u64 = 20261015;

const TOL_CRITICAL: f64 = 1e-6;
const TOL_STABLE: f64 = 1e-8;
const TOL_FIRST_FD: f64 = 1e-5;
const CONTROL_FIRST_MIN: f64 = 1e-3;
const TOL_SECOND_FD: f64 = 1e-4;
const TOL_FORMS: f64 = 1e-6;
const TOL_MARGIN_REL: f64 = 1e-10;
const TOL_PDE: f64 = 1e-6;
const CONTROL_PDE_MIN: f64 = 1e-2;
const TOL_STRAIGHT: f64 = 1e-10;
const TOL_CONTACT: f64 = 1e-7;
const CONTACT_H: f64 = 1e-5;
const CONTACT_EPS: f64 = 1e-2;
const CONTROL_CONTACT_MIN: f64 = 1e-1;
const TOL_ADJOINT: f64 = 1e-8;
const SUITE_BUDGET: Duration = Duration::from_secs(120);

struct Case {
    label: &'static str,
    func: IntrinsicFunction,
    rect: Rect,
    /// Smooth enough for the finite-difference oracles.
    smooth: bool,
    leaves: Vec<f64>,
}

struct CaseResult {
    label: &'static str,
    smooth: bool,
    area: f64,
    reports: Vec<VariationReport>,
    pde: f64,
}

fn window(a: f64, b: f64) -> ZetaWindow {
    ZetaWindow::new(a, b).unwrap()
}

fn cases() -> Vec<Case> {
    let wide = window(-30.0, 30.0);
    let mollified = mollify(&LagrangianProfile::cubic(window(-3.0, 3.0)), 0.1, DEFAULT_QUAD).unwrap();
    vec![
        Case {
            label: "plane(1)",
            func: IntrinsicFunction::new(LagrangianProfile::plane(1.0, wide)),
            rect: Rect::unit(),
            smooth: true,
            leaves: vec![-0.5, 0.0, 0.5],
        },
        Case {
            label: "ramp(1)",
            func: IntrinsicFunction::new(LagrangianProfile::ramp(1.0, wide)),
            rect: Rect::unit(),
            smooth: true,
            leaves: vec![-0.5, 0.0, 0.5],
        },
        Case {
            label: "cubic",
            func: IntrinsicFunction::new(LagrangianProfile::cubic(wide)),
            rect: Rect::new(0.5, 1.0, 2.0, 3.0).unwrap(),
            smooth: false,
            leaves: vec![8.0, 10.0, 12.0],
        },
        Case {
            label: "mollified-cubic(0.1)",
            func: IntrinsicFunction::new(mollified),
            rect: Rect::new(-0.3, 0.3, -0.3, 0.3).unwrap(),
            smooth: true,
            leaves: vec![-0.2, 0.0, 0.2],
        },
    ]
}

fn fields(rect: &Rect, seed: u64) -> Vec<TestField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..FIELDS)
        .map(|_| TestField::random_aligned(&mut rng, rect, ALIGN_CELLS, BUMPS_PER_COMPONENT))
        .collect()
}

fn run_case(case: &Case) -> CaseResult {
    let d = QuadratureDomain::new(case.rect, CELLS, ORDER).unwrap();
    let prob = VariationProblem::new(&case.func, &d).unwrap();
    let opts = ReportOptions::default();
    let pde = prob.minimal_pde_residual().unwrap().sup;
    let reports = fields(&case.rect, SEED)
        .into_iter()
        .enumerate()
        .map(|(i, f)| variation_report(&prob, &DiffeoFamily::new(f), &format!("random-{i}"), &opts, Some(pde)).unwrap())
        .collect();
    CaseResult {
        label: case.label,
        smooth: case.smooth,
        area: prob.area(),
        reports,
        pde,
    }
}

struct Line {
    passed: bool,
    text: String,
}

fn line(n: usize, passed: bool, text: String) -> Line {
    Line {
        passed,
        text: format!("{} criterion {n}: {text}", if passed { "PASS" } else { "FAIL" }),
    }
}

fn max_of(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, f64::max)
}

fn criterion_1(results: &[CaseResult], elapsed: Duration) -> Line {
    let worst = max_of(results.iter().flat_map(|r| r.reports.iter().map(move |x| x.first_analytic.abs() / r.area)));
    let ok = worst <= TOL_CRITICAL && elapsed <= SUITE_BUDGET;
    line(
        1,
        ok,
        format!(
            "max |gamma'(0)|/area = {worst:.3e} (tol {TOL_CRITICAL:e}) over {} fields, suite time {:.1}s (budget {}s)",
            results.len() * FIELDS,
            elapsed.as_secs_f64(),
            SUITE_BUDGET.as_secs()
        ),
    )
}

fn criterion_2(results: &[CaseResult]) -> Line {
    let worst = results
        .iter()
        .flat_map(|r| r.reports.iter().map(move |x| x.second_analytic / r.area))
        .fold(f64::INFINITY, f64::min);
    line(2, worst >= -TOL_STABLE, format!("min II/area = {worst:.3e} (tol -{TOL_STABLE:e})"))
}

fn criterion_3(results: &[CaseResult]) -> Line {
    let smooth = max_of(
        results
            .iter()
            .filter(|r| r.smooth)
            .flat_map(|r| r.reports.iter())
            .map(|x| scaled_difference(x.first_analytic, x.first_fd, x.first_scale)),
    );
    let f = IntrinsicFunction::eta_tau();
    let d = QuadratureDomain::new(Rect::unit(), CELLS, ORDER).unwrap();
    let prob = VariationProblem::new(&f, &d).unwrap();
    let opts = ReportOptions::default();
    let control: Vec<VariationReport> = fields(&Rect::unit(), SEED)
        .into_iter()
        .map(|t| variation_report(&prob, &DiffeoFamily::new(t), "control", &opts, None).unwrap())
        .collect();
    let largest = max_of(control.iter().map(|x| x.first_analytic.abs()));
    let control_fd = max_of(control.iter().map(|x| scaled_difference(x.first_analytic, x.first_fd, x.first_scale)));
    let ok = smooth <= TOL_FIRST_FD && largest > CONTROL_FIRST_MIN && control_fd <= TOL_FIRST_FD;
    line(
        3,
        ok,
        format!(
            "smooth FD mismatch {smooth:.3e}, eta*tau max |gamma'(0)| = {largest:.3e} (> {CONTROL_FIRST_MIN:e}) with FD mismatch {control_fd:.3e} (tol {TOL_FIRST_FD:e})"
        ),
    )
}

fn criterion_4(results: &[CaseResult]) -> Line {
    let worst = max_of(
        results
            .iter()
            .filter(|r| r.smooth)
            .flat_map(|r| r.reports.iter())
            .map(|x| scaled_difference(x.second_analytic, x.second_fd, x.second_scale)),
    );
    line(4, worst <= TOL_SECOND_FD, format!("max II vs FD gamma''(0) mismatch {worst:.3e} (tol {TOL_SECOND_FD:e})"))
}

fn criterion_5(results: &[CaseResult]) -> Line {
    let mut parts = Vec::new();
    let mut ok = true;
    for r in results.iter().filter(|r| r.label == "ramp(1)" || r.label.starts_with("mollified")) {
        let worst = max_of(
            r.reports
                .iter()
                .map(|x| scaled_difference(x.second_analytic, x.ii_lagrangian.unwrap(), 0.0)),
        );
        ok &= worst <= TOL_FORMS && r.reports.len() == FIELDS;
        parts.push(format!("{} {worst:.3e}", r.label));
    }
    line(5, ok, format!("II forms relative gap: {} (tol {TOL_FORMS:e})", parts.join(", ")))
}

fn criterion_6() -> Line {
    let cubic = LagrangianProfile::cubic(window(-8.0, 8.0));
    let plane = LagrangianProfile::plane(1.5, window(-8.0, 8.0));
    let affine = LagrangianProfile::affine(1.0, 2.0, window(-1.0, 1.0));
    let verdicts = [
        check_admissibility(&cubic, 400, 1e-10).unwrap().passed,
        check_admissibility(&plane, 400, 1e-10).unwrap().passed,
        !check_admissibility(&affine, 400, 1e-10).unwrap().passed,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (s, t): (f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (z, zp) = (s.powi(3), t.powi(3));
        let margin = 2.0 * (cubic.a(z).unwrap() - cubic.a(zp).unwrap()) * (z - zp)
            - (cubic.b(z).unwrap() - cubic.b(zp).unwrap()).powi(2);
        let oracle = 3.0 * (s - t).powi(4);
        worst = worst.max((margin - oracle).abs() / oracle);
    }
    let ok = verdicts.iter().all(|&v| v) && worst <= TOL_MARGIN_REL;
    line(
        6,
        ok,
        format!(
            "cubic pass {}, constant pass {}, affine(1,2) fail {}, cubic margin vs 3(s-s')^4 relative {worst:.3e} (tol {TOL_MARGIN_REL:e})",
            verdicts[0], verdicts[1], verdicts[2]
        ),
    )
}

fn criterion_7(results: &[CaseResult]) -> Line {
    let smooth = max_of(results.iter().map(|r| r.pde));
    let f = IntrinsicFunction::eta_tau();
    let d = QuadratureDomain::new(Rect::unit(), CELLS, ORDER).unwrap();
    let control = VariationProblem::new(&f, &d).unwrap().minimal_pde_residual().unwrap().sup;
    let ok = smooth <= TOL_PDE && control >= CONTROL_PDE_MIN;
    line(
        7,
        ok,
        format!("Lagrangian residual {smooth:.3e} (tol {TOL_PDE:e}), eta*tau residual {control:.3e} (min {CONTROL_PDE_MIN:e})"),
    )
}

fn criterion_8(cases: &[Case]) -> Line {
    let mut straight: f64 = 0.0;
    let mut defect: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x5eed);
    for case in cases {
        let (e0, e1) = (case.rect.eta0, case.rect.eta1);
        let ts: Vec<f64> = (0..=100).map(|i| e0 + (e1 - e0) * i as f64 / 100.0).collect();
        for &zeta in &case.leaves {
            straight = straight.max(lift_leaf(&case.func, zeta, &ts).unwrap().max_second_difference());
        }
        for field in fields(&case.rect, SEED).into_iter().take(3) {
            let fam = DiffeoFamily::new(field);
            let phi = family_map(&fam, CONTACT_EPS);
            let map = |p: HPoint| contact_lift(&phi, p);
            let r = case.rect;
            let samples: Vec<HPoint> = (0..20)
                .map(|_| {
                    HPoint::second(
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(r.eta0..r.eta1),
                        rng.gen_range(r.tau0..r.tau1),
                    )
                })
                .collect();
            defect = defect.max(contact_defect(&map, &samples, CONTACT_H).unwrap());
        }
    }
    let samples: Vec<HPoint> = (0..50)
        .map(|_| HPoint::second(rng.gen_range(-1.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)))
        .collect();
    let control = contact_defect(&control_map, &samples, CONTACT_H).unwrap();
    let ok = straight <= TOL_STRAIGHT && defect <= TOL_CONTACT && control >= CONTROL_CONTACT_MIN;
    line(
        8,
        ok,
        format!(
            "leaf second differences {straight:.3e} (tol {TOL_STRAIGHT:e}), contact defect {defect:.3e} (tol {TOL_CONTACT:e}, h {CONTACT_H:e}), control map {control:.3e} (min {CONTROL_CONTACT_MIN:e})"
        ),
    )
}

fn criterion_9() -> Line {
    let raw = LagrangianProfile::cubic(window(-3.0, 3.0));
    let mut sups = Vec::new();
    let mut admissible = true;
    for eps in [0.2, 0.1, 0.05] {
        let m = mollify(&raw, eps, DEFAULT_QUAD).unwrap();
        admissible &= check_admissibility(&m, 400, 1e-10).unwrap().passed;
        let w = m.window();
        // The cusp of A at 0 dominates; sample it densely.
        let mut zetas = w.grid(4001);
        zetas.extend((0..=4000).map(|i| -2.0 * eps + 4.0 * eps * i as f64 / 4000.0));
        let sup = max_of(
            zetas
                .into_iter()
                .filter(|&z| w.contains(z))
                .map(|z| (m.a(z).unwrap() - raw.a(z).unwrap()).abs()),
        );
        sups.push(sup);
    }
    let monotone = sups.windows(2).all(|p| p[1] < p[0]);
    line(
        9,
        admissible && monotone,
        format!(
            "admissible for eps 0.2, 0.1, 0.05: {admissible}; sup |A_eps - A| = {:.4}, {:.4}, {:.4}",
            sups[0], sups[1], sups[2]
        ),
    )
}

fn criterion_10() -> Line {
    let f = IntrinsicFunction::new(LagrangianProfile::plane(1.0, window(-30.0, 30.0)));
    let d = QuadratureDomain::new(Rect::unit(), CELLS, ORDER).unwrap();
    let prob = VariationProblem::new(&f, &d).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 10);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let a: Arc<dyn ScalarField> = Arc::new(Bump::random_aligned(&mut rng, &Rect::unit(), ALIGN_CELLS));
        let b: Arc<dyn ScalarField> = Arc::new(Bump::random_aligned(&mut rng, &Rect::unit(), ALIGN_CELLS));
        worst = worst.max(prob.adjoint_pairing(a.as_ref(), b.as_ref()).unwrap().value.abs());
    }
    line(10, worst <= TOL_ADJOINT, format!("max adjoint pairing residual {worst:.3e} over 5 pairs (tol {TOL_ADJOINT:e})"))
}

fn main() -> ExitCode {
    let cases = cases();
    let start = Instant::now();
    let results: Vec<CaseResult> = cases.iter().map(run_case).collect();
    let elapsed = start.elapsed();

    let lines = [
        criterion_1(&results, elapsed),
        criterion_2(&results),
        criterion_3(&results),
        criterion_4(&results),
        criterion_5(&results),
        criterion_6(),
        criterion_7(&results),
        criterion_8(&cases),
        criterion_9(),
        criterion_10(),
    ];
    for l in &lines {
        println!("{}", l.text);
    }
    let failed = lines.iter().filter(|l| !l.passed).count();
    println!("acceptance: {} passed, {failed} failed", lines.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
