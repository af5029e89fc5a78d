//! The five experiment commands. Each writes its files into the output directory
//! (atomically, one file at a time) and returns an [`Outcome`].

use std::fmt;
use std::fs;
use std::path::PathBuf;

use log::{info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::ExperimentConfig;
use crate::area::intrinsic_area;
use crate::error::{Error, Result};
use crate::field::{integral_curve, mollified_samples};
use crate::heisenberg::{
    contact_defect, contact_lift, control_map, family_map, graph_point, horizontality_defect,
    lift_curve, lift_graph_mesh, lift_leaf, Curve3, HPoint,
};
use crate::profile::{check_admissibility, AdmissibilityReport, LagrangianProfile};
use crate::variation::{
    variation_report, Check, DiffeoFamily, PdeResidual, VariationProblem, VariationReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    CheckProfile,
    Area,
    Variation,
    Lift,
    Mollify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// At least one computation hit a degenerate geometry and was aborted.
    Degenerate,
}

impl Status {
    fn from_checks(passed: bool) -> Self {
        if passed {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Degenerate => "DEGENERATE",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: Status,
    /// Files written, in order.
    pub files: Vec<PathBuf>,
    /// One line for humans.
    pub summary: String,
}

pub fn run(cmd: Command, cfg: &ExperimentConfig) -> Result<Outcome> {
    match cmd {
        Command::CheckProfile => cmd_check_profile(cfg),
        Command::Area => cmd_area(cfg),
        Command::Variation => cmd_variation(cfg),
        Command::Lift => cmd_lift(cfg),
        Command::Mollify => cmd_mollify(cfg),
    }
}

struct OutDir {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl OutDir {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let dir = cfg.out_dir();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, files: Vec::new() })
    }

    /// Writes to a temporary sibling and renames it into place.
    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.tmp"));
        fs::write(&tmp, bytes)?;
        fs::rename(&tmp, &path)?;
        info!("wrote {}", path.display());
        self.files.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        self.write(name, &bytes)
    }

    fn with<F>(&mut self, name: &str, fill: F) -> Result<()>
    where
        F: FnOnce(&mut Vec<u8>) -> Result<()>,
    {
        let mut bytes = Vec::new();
        fill(&mut bytes)?;
        self.write(name, &bytes)
    }

    fn finish(self, status: Status, summary: String) -> Outcome {
        Outcome { status, files: self.files, summary }
    }
}

pub fn cmd_check_profile(cfg: &ExperimentConfig) -> Result<Outcome> {
    let profile = cfg.lagrangian_profile()?;
    let adm = &cfg.admissibility;
    let report = check_admissibility(&profile, adm.samples, adm.tol)?;
    let mut out = OutDir::new(cfg)?;
    out.json("admissibility.json", &report)?;
    let summary = format!(
        "{}: admissibility {} ({} of {} pairs failed)",
        report.profile,
        if report.passed { "passed" } else { "failed" },
        report.failed_pairs,
        adm.samples * (adm.samples - 1) / 2
    );
    Ok(out.finish(Status::from_checks(report.passed), summary))
}

#[derive(Debug, Clone, Serialize)]
struct AreaRow {
    cells: usize,
    order: usize,
    nodes: usize,
    area: f64,
    change: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
struct AreaSummary {
    profile: String,
    levels: Vec<AreaRow>,
    /// Richardson estimate assuming the rule's nominal order `2q` in the cell size.
    richardson: f64,
    /// `|A_finest − A_previous|`.
    convergence_estimate: f64,
    /// `(A₁ − A₀)/(A₂ − A₁)` for the last three levels; `2^{2q}` for smooth integrands.
    observed_ratio: Option<f64>,
    /// `max(1e-8, 1e3 · convergence_estimate)`.
    tol_quad: f64,
}

pub fn cmd_area(cfg: &ExperimentConfig) -> Result<Outcome> {
    let levels = cfg.area.levels;
    if levels < 2 {
        return Err(Error::Config("area.levels must be at least 2".into()));
    }
    let func = cfg.function()?;
    let base = cfg.domain.build()?;
    let mut rows: Vec<AreaRow> = Vec::with_capacity(levels);
    for k in 0..levels {
        let domain = base.refined(1 << k)?;
        let area = intrinsic_area(&func, &domain)?;
        let change = rows.last().map(|r| area - r.area);
        rows.push(AreaRow {
            cells: domain.cells().0,
            order: domain.order(),
            nodes: domain.len(),
            area,
            change,
        });
    }
    let last = rows[levels - 1].area;
    let delta = rows[levels - 1].change.unwrap_or(0.0);
    let p = 2.0 * cfg.domain.order as f64;
    let observed_ratio = (levels >= 3).then(|| {
        rows[levels - 2].change.unwrap_or(f64::NAN) / delta
    });
    let summary = AreaSummary {
        profile: func.name(),
        richardson: last + delta / (2f64.powf(p) - 1.0),
        convergence_estimate: delta.abs(),
        observed_ratio,
        tol_quad: (1e3 * delta.abs()).max(1e-8),
        levels: rows,
    };
    let mut out = OutDir::new(cfg)?;
    out.csv("area.csv", &summary.levels)?;
    out.json("area.json", &summary)?;
    let line = format!(
        "{}: area {:.12} (Richardson {:.12}, change {:.2e})",
        summary.profile, last, summary.richardson, summary.convergence_estimate
    );
    Ok(out.finish(Status::Pass, line))
}

#[derive(Debug, Clone, Serialize)]
struct AbortedField {
    field: String,
    reason: String,
}

#[derive(Debug, Clone, Serialize)]
struct VariationSummary {
    profile: String,
    seed: u64,
    area: f64,
    pde_residual: Option<PdeResidual>,
    reports: Vec<VariationReport>,
    aborted: Vec<AbortedField>,
    passed: bool,
}

pub fn cmd_variation(cfg: &ExperimentConfig) -> Result<Outcome> {
    let func = cfg.function()?;
    let domain = cfg.domain.build()?;
    let fields = cfg.test_fields()?;
    let problem = VariationProblem::new(&func, &domain)?;
    let pde = if cfg.variation.pde {
        match problem.minimal_pde_residual() {
            Ok(r) => Some(r),
            Err(e) if e.is_numerical_degeneracy() => {
                warn!("PDE residual skipped: {e}");
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    let mut reports = Vec::new();
    let mut aborted = Vec::new();
    for (name, field) in fields {
        let fam = DiffeoFamily::new(field);
        match variation_report(&problem, &fam, &name, &cfg.variation.options, pde.map(|r| r.sup)) {
            Ok(r) => {
                if !r.passed {
                    let failed: Vec<_> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
                    warn!("field {name}: failed {}", failed.join(", "));
                }
                reports.push(r);
            }
            Err(e) if e.is_numerical_degeneracy() => {
                warn!("field {name} aborted: {e}");
                aborted.push(AbortedField { field: name, reason: e.to_string() });
            }
            Err(e) => return Err(e),
        }
    }
    let passed = aborted.is_empty() && reports.iter().all(|r| r.passed);
    let summary = VariationSummary {
        profile: func.name(),
        seed: cfg.seed,
        area: problem.area(),
        pde_residual: pde,
        reports,
        aborted,
        passed,
    };
    let mut out = OutDir::new(cfg)?;
    out.json("variation.json", &summary)?;
    let rows: Vec<_> = summary.reports.iter().map(VariationReport::row).collect();
    out.csv("variation.csv", &rows)?;
    let status = if !summary.aborted.is_empty() {
        Status::Degenerate
    } else {
        Status::from_checks(passed)
    };
    let max_first = summary
        .reports
        .iter()
        .map(|r| r.first_analytic.abs())
        .fold(0.0, f64::max);
    let line = format!(
        "{}: {} fields, {} passed, {} aborted, max |first variation| {:.2e}",
        summary.profile,
        summary.reports.len() + summary.aborted.len(),
        summary.reports.iter().filter(|r| r.passed).count(),
        summary.aborted.len(),
        max_first
    );
    Ok(out.finish(status, line))
}

#[derive(Debug, Clone, Serialize)]
struct CurveSummary {
    file: String,
    label: Option<f64>,
    max_second_difference: f64,
    horizontality_defect: f64,
}

#[derive(Debug, Clone, Serialize)]
struct LiftSummary {
    profile: String,
    curves: Vec<CurveSummary>,
    mesh: String,
    checks: Vec<Check>,
    passed: bool,
}

fn uniform(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn curve_csv(out: &mut OutDir, name: &str, curve: &Curve3) -> Result<()> {
    out.with(name, |buf| curve.write_csv(buf))
}

pub fn cmd_lift(cfg: &ExperimentConfig) -> Result<Outcome> {
    let lift = &cfg.lift;
    if lift.samples < 3 {
        return Err(Error::Config("lift.samples must be at least 3".into()));
    }
    let func = cfg.function()?;
    let rect = cfg.domain.rect()?;
    let ts = uniform(rect.eta0, rect.eta1, lift.samples);
    let mut out = OutDir::new(cfg)?;
    let mut curves = Vec::new();
    let mut checks = Vec::new();

    if func.is_lagrangian() {
        let mut worst: f64 = 0.0;
        for (i, &zeta) in lift.leaves.iter().enumerate() {
            let c = lift_leaf(&func, zeta, &ts)?;
            let file = format!("leaf_{i}.csv");
            curve_csv(&mut out, &file, &c)?;
            let s = CurveSummary {
                file,
                label: Some(zeta),
                max_second_difference: c.max_second_difference(),
                horizontality_defect: horizontality_defect(&c)?,
            };
            worst = worst.max(s.max_second_difference);
            curves.push(s);
        }
        if !lift.leaves.is_empty() {
            checks.push(Check::at_most("leaves_straight", worst, lift.tol_straight));
        }
    } else {
        let tau_mid = 0.5 * (rect.tau0 + rect.tau1);
        let planar = integral_curve(&func, [rect.eta0, tau_mid], (rect.eta0, rect.eta1), lift.samples - 1)?;
        let c = lift_curve(&func, &planar)?;
        curve_csv(&mut out, "curve.csv", &c)?;
        curves.push(CurveSummary {
            file: "curve.csv".into(),
            label: None,
            max_second_difference: c.max_second_difference(),
            horizontality_defect: horizontality_defect(&c)?,
        });
    }

    let vertical = Curve3::new(
        ts.clone(),
        ts.iter().map(|&t| HPoint::first(0.0, 0.0, t)).collect(),
    )?;
    checks.push(Check::at_least(
        "vertical_control",
        horizontality_defect(&vertical)?,
        lift.control_min,
    ));

    let mesh = lift_graph_mesh(&func, &rect, lift.mesh[0], lift.mesh[1])?;
    out.with("graph.obj", |buf| mesh.write_obj(buf))?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x5eed));
    let mut on_graph = Vec::with_capacity(lift.contact_samples);
    let mut control = Vec::with_capacity(lift.contact_samples);
    for _ in 0..lift.contact_samples {
        let eta = rng.gen_range(rect.eta0..rect.eta1);
        let tau = rng.gen_range(rect.tau0..rect.tau1);
        on_graph.push(graph_point(&func, eta, tau)?);
        control.push(HPoint::second(rng.gen_range(-1.0..1.0), eta, tau));
    }
    if let Some((name, field)) = cfg.test_fields()?.into_iter().next() {
        let fam = DiffeoFamily::new(field);
        let phi = family_map(&fam, lift.contact_eps);
        let map = |p| contact_lift(&phi, p);
        let d = contact_defect(&map, &on_graph, lift.contact_h)?;
        info!("contact defect of field {name} at eps = {}: {d:.3e}", lift.contact_eps);
        checks.push(Check::at_most("contact_defect", d, lift.tol_contact));
    }
    if !control.is_empty() {
        let d = contact_defect(&control_map, &control, lift.contact_h)?;
        checks.push(Check::at_least("control_map_defect", d, lift.control_min));
    }

    let passed = checks.iter().all(|c| c.passed);
    let summary = LiftSummary {
        profile: func.name(),
        curves,
        mesh: "graph.obj".into(),
        checks,
        passed,
    };
    out.json("lift.json", &summary)?;
    let line = format!(
        "{}: {}",
        summary.profile,
        summary
            .checks
            .iter()
            .map(|c| format!("{} {:.2e}", c.name, c.value))
            .collect::<Vec<_>>()
            .join(", ")
    );
    Ok(out.finish(Status::from_checks(passed), line))
}

#[derive(Debug, Clone, Serialize)]
struct MollifyLevel {
    eps: f64,
    file: String,
    /// Sup over the mollified window of `|A_ε − A|`.
    sup_a_error: f64,
    admissibility: AdmissibilityReport,
}

#[derive(Debug, Clone, Serialize)]
struct MollifySummary {
    profile: String,
    levels: Vec<MollifyLevel>,
    monotone: bool,
    passed: bool,
}

/// `sup |A_ε − A|` on a uniform grid of the mollified window, refined to the same
/// number of points within `2ε` of every breakpoint, where the error peaks.
fn sup_a_error(base: &LagrangianProfile, smooth: &LagrangianProfile, eps: f64, n: usize) -> Result<f64> {
    let w = smooth.window();
    let n = n.max(2);
    let mut zetas = w.grid(n);
    for b in base.rule().breakpoints() {
        zetas.extend((0..n).map(|i| b - 2.0 * eps + 4.0 * eps * i as f64 / (n - 1) as f64));
    }
    let mut worst: f64 = 0.0;
    for z in zetas.into_iter().filter(|&z| w.contains(z)) {
        worst = worst.max((smooth.a(z)? - base.a(z)?).abs());
    }
    Ok(worst)
}

pub fn cmd_mollify(cfg: &ExperimentConfig) -> Result<Outcome> {
    let base = cfg.base_profile()?;
    let m = &cfg.mollify;
    if m.eps.is_empty() {
        return Err(Error::Config("mollify.eps must not be empty".into()));
    }
    let mut out = OutDir::new(cfg)?;
    let mut levels = Vec::new();
    for &eps in &m.eps {
        let sampled = mollified_samples(&base, eps, m.quad, eps / 8.0)?;
        let file = format!("mollified_{eps}.csv");
        out.with(&file, |buf| sampled.write_csv(buf))?;
        let smooth = LagrangianProfile::sampled(sampled);
        let admissibility = check_admissibility(&smooth, cfg.admissibility.samples, cfg.admissibility.tol)?;
        levels.push(MollifyLevel {
            eps,
            file,
            sup_a_error: sup_a_error(&base, &smooth, eps, m.samples)?,
            admissibility,
        });
    }
    let monotone = levels.windows(2).all(|w| w[1].sup_a_error < w[0].sup_a_error);
    let passed = monotone && levels.iter().all(|l| l.admissibility.passed);
    let summary = MollifySummary {
        profile: base.name(),
        levels,
        monotone,
        passed,
    };
    out.json("mollify.json", &summary)?;
    let line = format!(
        "{}: sup|A_eps - A| = [{}], monotone {}, admissible {}",
        summary.profile,
        summary
            .levels
            .iter()
            .map(|l| format!("{:.3e}", l.sup_a_error))
            .collect::<Vec<_>>()
            .join(", "),
        summary.monotone,
        summary.levels.iter().all(|l| l.admissibility.passed)
    );
    Ok(out.finish(Status::from_checks(passed), line))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    fn config(text: &str, dir: &Path) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::from_toml(text).unwrap();
        cfg.out = Some(dir.to_path_buf());
        cfg
    }

    #[test]
    fn area_of_tilted_plane() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(
            "[profile]\nname = \"plane(1)\"\nwindow = [-10.0, 10.0]\n[domain]\ncells = 2\n",
            dir.path(),
        );
        let o = cmd_area(&cfg).unwrap();
        assert_eq!(o.status, Status::Pass);
        let json: serde_json::Value =
            serde_json::from_slice(&fs::read(dir.path().join("area.json")).unwrap()).unwrap();
        let r = json["richardson"].as_f64().unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13, "{r}");
        let csv = fs::read_to_string(dir.path().join("area.csv")).unwrap();
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with("cells,order,nodes,area,change"));
    }

    #[test]
    fn zero_field_variation_is_zero() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(
            "[profile]\nname = \"ramp(1)\"\nwindow = [-10.0, 10.0]\n[domain]\ncells = 8\n[fields]\nrandom = 0\n[[fields.explicit]]\nname = \"zero\"\n",
            dir.path(),
        );
        let o = cmd_variation(&cfg).unwrap();
        assert_eq!(o.status, Status::Pass, "{}", o.summary);
        let json: serde_json::Value =
            serde_json::from_slice(&fs::read(dir.path().join("variation.json")).unwrap()).unwrap();
        let r = &json["reports"][0];
        for key in ["first_analytic", "second_analytic", "first_fd", "second_fd"] {
            assert_eq!(r[key].as_f64().unwrap(), 0.0, "{key}");
        }
    }

    #[test]
    fn affine_counterexample_fails_check() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config("[profile]\nname = \"affine(1, 2)\"\nwindow = [-2.0, 2.0]\n", dir.path());
        assert_eq!(cmd_check_profile(&cfg).unwrap().status, Status::Fail);
    }
}
