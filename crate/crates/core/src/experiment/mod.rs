//! Config-driven experiments behind the command-line tool.
//!
//! A config is a TOML file. Every section except `[profile]` may be omitted, and
//! every numerical tolerance has an explicit default. Random test fields are
//! drawn from a ChaCha8 stream seeded by `seed`, so a config and a seed fully
//! determine every output byte.
//!
//! ```toml
//! seed = 7
//! out = "results"
//!
//! [profile]
//! name = "plane(1)"        # or csv = "profile.csv", or name = "eta_tau"
//! window = [-30.0, 30.0]
//! # mollify = 0.1
//!
//! [domain]
//! eta0 = 0.0
//! eta1 = 1.0
//! tau0 = 0.0
//! tau1 = 1.0
//! cells = 64
//! order = 4
//!
//! [fields]
//! random = 10
//!
//! [[fields.explicit]]
//! name = "one-bump"
//! v2 = [{ amplitude = 0.01, eta_c = 0.5, tau_c = 0.5, w_eta = 0.25, w_tau = 0.25 }]
//! ```

mod commands;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::area::{QuadratureDomain, Rect};
use crate::error::{Error, Result};
use crate::field::{mollify, Bump, IntrinsicFunction, ScalarField, SumField, TestField, DEFAULT_QUAD, DEFAULT_TOL};
use crate::profile::{LagrangianProfile, SampledProfile, ZetaWindow};
use crate::variation::ReportOptions;

pub use commands::{
    cmd_area, cmd_check_profile, cmd_lift, cmd_mollify, cmd_variation, run, Command, Outcome, Status,
};

fn default_seed() -> u64 {
    0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Output directory; relative paths are taken from the config file's directory.
    #[serde(default)]
    pub out: Option<PathBuf>,
    pub profile: ProfileSpec,
    #[serde(default)]
    pub domain: DomainSpec,
    #[serde(default)]
    pub fields: FieldsSpec,
    #[serde(default)]
    pub admissibility: AdmissibilitySpec,
    #[serde(default)]
    pub area: AreaSpec,
    #[serde(default)]
    pub variation: VariationSpec,
    #[serde(default)]
    pub lift: LiftSpec,
    #[serde(default)]
    pub mollify: MollifySpec,
}

/// Either a registry name (`plane(α)`, `ramp(c)`, `cubic`, `affine(a, b)`), an
/// explicit closed-form function (`eta_tau`, `const(c)`), or a sampled CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub csv: Option<PathBuf>,
    /// Label window `[ζ_min, ζ_max]` for registry profiles.
    #[serde(default)]
    pub window: Option<[f64; 2]>,
    /// Mollify the profile at this radius before use.
    #[serde(default)]
    pub mollify: Option<f64>,
    #[serde(default = "default_quad")]
    pub mollify_quad: usize,
    /// Relative tolerance of the leaf-label inversion.
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_quad() -> usize {
    DEFAULT_QUAD
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DomainSpec {
    pub eta0: f64,
    pub eta1: f64,
    pub tau0: f64,
    pub tau1: f64,
    pub cells: usize,
    pub order: usize,
}

impl Default for DomainSpec {
    fn default() -> Self {
        Self {
            eta0: 0.0,
            eta1: 1.0,
            tau0: 0.0,
            tau1: 1.0,
            cells: 64,
            order: 4,
        }
    }
}

impl DomainSpec {
    pub fn rect(&self) -> Result<Rect> {
        Rect::new(self.eta0, self.eta1, self.tau0, self.tau1)
            .map_err(|e| Error::Config(format!("domain: {e}")))
    }

    pub fn build(&self) -> Result<QuadratureDomain> {
        QuadratureDomain::new(self.rect()?, self.cells, self.order)
            .map_err(|e| Error::Config(format!("domain: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldsSpec {
    /// Number of seeded random fields.
    pub random: usize,
    pub bumps_per_component: usize,
    /// Random bump supports are unions of cells of an `align_cells × align_cells`
    /// grid on the domain. Set to 0 to place them freely inside the domain.
    pub align_cells: usize,
    pub explicit: Vec<ExplicitFieldSpec>,
}

impl Default for FieldsSpec {
    fn default() -> Self {
        Self {
            random: 10,
            bumps_per_component: 2,
            align_cells: 16,
            explicit: Vec::new(),
        }
    }
}

/// A test field given bump by bump. Empty lists are zero components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitFieldSpec {
    pub name: String,
    #[serde(default)]
    pub v1: Vec<Bump>,
    #[serde(default)]
    pub v2: Vec<Bump>,
    #[serde(default)]
    pub w1: Vec<Bump>,
    #[serde(default)]
    pub w2: Vec<Bump>,
}

impl ExplicitFieldSpec {
    pub fn build(&self) -> Result<TestField> {
        let component = |bumps: &[Bump]| -> Result<Arc<dyn ScalarField>> {
            let parts = bumps
                .iter()
                .map(|b| {
                    Bump::new(b.amplitude, b.eta_c, b.tau_c, b.w_eta, b.w_tau)
                        .map(|b| Arc::new(b) as Arc<dyn ScalarField>)
                        .map_err(|e| Error::Config(format!("field `{}`: {e}", self.name)))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Arc::new(SumField(parts)))
        };
        let field = TestField::new(component(&self.v1)?, component(&self.v2)?);
        if self.w1.is_empty() && self.w2.is_empty() {
            Ok(field)
        } else {
            Ok(field.with_w(component(&self.w1)?, component(&self.w2)?))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdmissibilitySpec {
    pub samples: usize,
    pub tol: f64,
}

impl Default for AdmissibilitySpec {
    fn default() -> Self {
        Self {
            samples: 400,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AreaSpec {
    /// Number of refinement levels, each doubling the cells per direction.
    pub levels: usize,
}

impl Default for AreaSpec {
    fn default() -> Self {
        Self { levels: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VariationSpec {
    #[serde(flatten)]
    pub options: ReportOptions,
    /// Compute the minimal-surface PDE residual.
    pub pde: bool,
}

impl Default for VariationSpec {
    fn default() -> Self {
        Self {
            options: ReportOptions::default(),
            pde: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LiftSpec {
    /// Leaf labels whose lifts are written and tested for straightness.
    pub leaves: Vec<f64>,
    /// Samples per lifted leaf or curve, over the domain's `η` range.
    pub samples: usize,
    /// Vertex grid of the lifted graph mesh.
    pub mesh: [usize; 2],
    /// `ε` of the family `φ^ε` whose contact lift is tested.
    pub contact_eps: f64,
    /// Number of seeded graph points at which the contact defect is measured.
    pub contact_samples: usize,
    /// Relative FD step of the contact defect.
    pub contact_h: f64,
    pub tol_straight: f64,
    pub tol_contact: f64,
    /// Lower bound the non-contact control map's defect must reach.
    pub control_min: f64,
}

impl Default for LiftSpec {
    fn default() -> Self {
        Self {
            leaves: vec![-0.5, 0.0, 0.5],
            samples: 101,
            mesh: [32, 32],
            contact_eps: 1e-2,
            contact_samples: 50,
            contact_h: 1e-5,
            tol_straight: 1e-10,
            tol_contact: 1e-7,
            control_min: 1e-1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MollifySpec {
    /// Radii, largest first; the approximation error must decrease along it.
    pub eps: Vec<f64>,
    pub quad: usize,
    /// Grid size for the sup-norm of `A_ε − A`.
    pub samples: usize,
}

impl Default for MollifySpec {
    fn default() -> Self {
        Self {
            eps: vec![0.2, 0.1, 0.05],
            quad: DEFAULT_QUAD,
            samples: 2001,
        }
    }
}

/// Command-line overrides applied on top of a loaded config.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub cells: Option<usize>,
    pub order: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a config and resolves its relative paths against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(csv) = self.profile.csv.as_mut() {
            resolve(csv);
        }
        if let Some(out) = self.out.as_mut() {
            resolve(out);
        }
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(out) = &o.out {
            self.out = Some(out.clone());
        }
        if let Some(cells) = o.cells {
            self.domain.cells = cells;
        }
        if let Some(order) = o.order {
            self.domain.order = order;
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    /// The foliation profile, mollified when requested. Explicit functions are a config error here.
    pub fn lagrangian_profile(&self) -> Result<LagrangianProfile> {
        let base = self.base_profile()?;
        match self.profile.mollify {
            Some(eps) => mollify(&base, eps, self.profile.mollify_quad),
            None => Ok(base),
        }
    }

    /// The foliation profile as configured, ignoring `profile.mollify`.
    pub fn base_profile(&self) -> Result<LagrangianProfile> {
        let p = &self.profile;
        Ok(match (&p.name, &p.csv) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("profile: give either `name` or `csv`, not both".into()))
            }
            (None, None) => return Err(Error::Config("profile: `name` or `csv` is required".into())),
            (None, Some(csv)) => LagrangianProfile::sampled(SampledProfile::load_csv(csv)?),
            (Some(name), None) => {
                if explicit_function(name)?.is_some() {
                    return Err(Error::Config(format!(
                        "profile `{name}` is a closed-form function, not a parabola foliation"
                    )));
                }
                let [lo, hi] = p
                    .window
                    .ok_or_else(|| Error::Config(format!("profile `{name}` needs a `window`")))?;
                let window =
                    ZetaWindow::new(lo, hi).map_err(|e| Error::Config(format!("profile window: {e}")))?;
                LagrangianProfile::from_name(name, window)
                    .map_err(|e| Error::Config(format!("profile: {e}")))?
            }
        })
    }

    /// The intrinsic function under study.
    pub fn function(&self) -> Result<IntrinsicFunction> {
        if let Some(name) = &self.profile.name {
            if let Some(f) = explicit_function(name)? {
                if self.profile.mollify.is_some() {
                    return Err(Error::Config(format!("profile `{name}` cannot be mollified")));
                }
                return Ok(f);
            }
        }
        Ok(IntrinsicFunction::with_tol(self.lagrangian_profile()?, self.profile.tol))
    }

    /// Explicit fields in config order, then `fields.random` seeded random fields.
    pub fn test_fields(&self) -> Result<Vec<(String, TestField)>> {
        let mut out = Vec::new();
        for spec in &self.fields.explicit {
            out.push((spec.name.clone(), spec.build()?));
        }
        let rect = self.domain.rect()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let f = &self.fields;
        for i in 0..f.random {
            let field = if f.align_cells > 0 {
                if f.align_cells < 6 {
                    return Err(Error::Config("fields.align_cells must be 0 or at least 6".into()));
                }
                TestField::random_aligned(&mut rng, &rect, f.align_cells, f.bumps_per_component)
            } else {
                TestField::random(&mut rng, &rect, f.bumps_per_component)
            };
            out.push((format!("random-{i}"), field));
        }
        Ok(out)
    }
}

fn explicit_function(name: &str) -> Result<Option<IntrinsicFunction>> {
    let trimmed = name.trim();
    if trimmed == "eta_tau" {
        return Ok(Some(IntrinsicFunction::eta_tau()));
    }
    if let Some(arg) = trimmed.strip_prefix("const(").and_then(|r| r.strip_suffix(')')) {
        let c: f64 = arg
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("profile `{name}`: bad constant")))?;
        return Ok(Some(IntrinsicFunction::constant(c)));
    }
    Ok(None)
}
