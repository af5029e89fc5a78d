//! Per-field summary of the variation pipeline with pass/fail checks.

use serde::{Deserialize, Serialize};

use super::fd::{fd_derivatives, fd_schedule, scaled_difference};
use super::functional::VariationProblem;
use super::DiffeoFamily;
use crate::area::Rect;
use crate::error::Result;

/// Steps and tolerances for [`variation_report`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReportOptions {
    /// Base steps `h`; `γ` is sampled at `0, ±h, ±2h` for each.
    pub base_steps: Vec<f64>,
    /// Scaled relative tolerance between analytic and FD `γ′(0)`.
    pub tol_first_fd: f64,
    /// Scaled relative tolerance between analytic and FD `γ″(0)`.
    pub tol_second_fd: f64,
    /// Relative tolerance between the two forms of `II_f`.
    pub tol_lagrangian: f64,
    /// `|γ′(0)| ≤ tol_critical · area` is required of critical functions.
    pub tol_critical: f64,
    /// `II_f ≥ −tol_stability · area` is required of critical functions.
    pub tol_stability: f64,
    /// Sup-norm bound on the minimal-surface PDE residual of foliation-backed functions.
    pub tol_pde: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            base_steps: vec![1e-2, 5e-3],
            tol_first_fd: 1e-5,
            tol_second_fd: 1e-4,
            tol_lagrangian: 1e-6,
            tol_critical: 1e-6,
            tol_stability: 1e-8,
            tol_pde: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }

    pub fn at_least(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            tolerance,
            passed: value >= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationReport {
    pub profile: String,
    pub field: String,
    pub domain: Rect,
    pub cells: usize,
    pub order: usize,
    /// `γ(0)`.
    pub gamma0: f64,
    /// Samples `(ε, γ(ε))`.
    pub gamma_eps: Vec<(f64, f64)>,
    pub first_analytic: f64,
    /// `∫ |γ′ integrand|`, the scale of `γ′(0)`.
    pub first_scale: f64,
    pub first_fd: f64,
    pub first_fd_error: f64,
    /// `II_f(V₁, V₂)`.
    pub second_analytic: f64,
    /// Analytic `γ″(0)` including the terms in `W`.
    pub second_with_w: f64,
    pub second_scale: f64,
    pub second_fd: f64,
    pub second_fd_error: f64,
    pub pde_residual: Option<f64>,
    pub ii_lagrangian: Option<f64>,
    pub ii_lagrangian_excluded_nodes: Option<usize>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// One flat CSV row per report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationRow {
    pub profile: String,
    pub field: String,
    pub eta0: f64,
    pub eta1: f64,
    pub tau0: f64,
    pub tau1: f64,
    pub cells: usize,
    pub order: usize,
    pub gamma0: f64,
    pub first_analytic: f64,
    pub first_fd: f64,
    pub first_fd_error: f64,
    pub second_analytic: f64,
    pub second_with_w: f64,
    pub second_fd: f64,
    pub second_fd_error: f64,
    pub pde_residual: Option<f64>,
    pub ii_lagrangian: Option<f64>,
    pub passed: bool,
}

impl VariationReport {
    pub fn row(&self) -> VariationRow {
        VariationRow {
            profile: self.profile.clone(),
            field: self.field.clone(),
            eta0: self.domain.eta0,
            eta1: self.domain.eta1,
            tau0: self.domain.tau0,
            tau1: self.domain.tau1,
            cells: self.cells,
            order: self.order,
            gamma0: self.gamma0,
            first_analytic: self.first_analytic,
            first_fd: self.first_fd,
            first_fd_error: self.first_fd_error,
            second_analytic: self.second_analytic,
            second_with_w: self.second_with_w,
            second_fd: self.second_fd,
            second_fd_error: self.second_fd_error,
            pde_residual: self.pde_residual,
            ii_lagrangian: self.ii_lagrangian,
            passed: self.passed,
        }
    }
}

/// Runs the analytic and FD pipeline for one family.
///
/// Criticality, stability, the agreement of both `II_f` forms and the PDE
/// residual (when supplied) are only checked for foliation-backed functions;
/// the FD agreement is checked always.
pub fn variation_report(
    problem: &VariationProblem<'_>,
    fam: &DiffeoFamily,
    field_label: &str,
    opts: &ReportOptions,
    pde_residual: Option<f64>,
) -> Result<VariationReport> {
    let at_zero = problem.gamma_derivatives(fam, 0.0)?;
    let mut gamma_eps = Vec::new();
    for eps in fd_schedule(&opts.base_steps) {
        let g = if eps == 0.0 {
            at_zero.value.value
        } else {
            problem.gamma(fam, eps)?
        };
        gamma_eps.push((eps, g));
    }
    let fd = fd_derivatives(&gamma_eps)?;
    let ii = problem.second_variation(fam)?;
    let area = problem.area();

    let mut checks = vec![
        Check::at_most(
            "first_fd",
            scaled_difference(at_zero.first.value, fd.first, at_zero.first.abs),
            opts.tol_first_fd,
        ),
        Check::at_most(
            "second_fd",
            scaled_difference(at_zero.second.value, fd.second, at_zero.second.abs),
            opts.tol_second_fd,
        ),
    ];

    let lagrangian = problem.func().is_lagrangian();
    let mut ii_lagrangian = None;
    let mut excluded = None;
    if lagrangian {
        checks.push(Check::at_most(
            "critical",
            at_zero.first.value.abs() / area,
            opts.tol_critical,
        ));
        checks.push(Check::at_least(
            "stable",
            ii.value / area,
            -opts.tol_stability,
        ));
        let l = problem.second_variation_lagrangian(fam)?;
        checks.push(Check::at_most(
            "second_forms_agree",
            scaled_difference(ii.value, l.value, 0.0),
            opts.tol_lagrangian,
        ));
        ii_lagrangian = Some(l.value);
        excluded = Some(l.excluded_nodes);
        if let Some(r) = pde_residual {
            checks.push(Check::at_most("pde_residual", r, opts.tol_pde));
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    let domain = problem.domain();
    Ok(VariationReport {
        profile: problem.func().name(),
        field: field_label.to_string(),
        domain: domain.rect(),
        cells: domain.cells().0,
        order: domain.order(),
        gamma0: at_zero.value.value,
        gamma_eps,
        first_analytic: at_zero.first.value,
        first_scale: at_zero.first.abs,
        first_fd: fd.first,
        first_fd_error: fd.first_error,
        second_analytic: ii.value,
        second_with_w: at_zero.second.value,
        second_scale: at_zero.second.abs,
        second_fd: fd.second,
        second_fd_error: fd.second_error,
        pde_residual,
        ii_lagrangian,
        ii_lagrangian_excluded_nodes: excluded,
        checks,
        passed,
    })
}
