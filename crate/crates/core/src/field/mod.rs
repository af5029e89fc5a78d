//! Planar intrinsic functions `f` and the operators `∇ᶠ = ∂_η + f∂_τ`, `Δᶠ`.
//!
//! A Lagrangian profile determines `f` implicitly: the leaf label `ζ*` of a point
//! is found by inverting `τ = g(η, ζ)`, then `f = A(ζ*)η + B(ζ*)` and
//! `ψ = ∇ᶠf = A(ζ*)`. For negative controls an explicit closed-form `f` with
//! analytic partials can be used instead.

mod curve;
mod jet;
mod mollify;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::profile::LagrangianProfile;

pub use curve::{integral_curve, integral_curve_with, CurveMode, PlanarCurve};
pub use jet::{poly_bump, Bump, FnField, Jet2, ScalarField, SumField, Support, TestField, ZeroField};
pub use mollify::{bump_kernel, mollified_samples, mollify, mollify_with_spacing, BUMP_MASS, DEFAULT_QUAD};

/// Default root-finding tolerance, relative to `1 + |τ|`.
pub const DEFAULT_TOL: f64 = 1e-14;

type FJetFn = Arc<dyn Fn(f64, f64) -> Jet2 + Send + Sync>;

/// Closed-form `f(η, τ)` given through its second-order jet.
#[derive(Clone)]
pub struct ExplicitFunction {
    name: String,
    jet: FJetFn,
}

impl ExplicitFunction {
    pub fn new(
        name: impl Into<String>,
        jet: impl Fn(f64, f64) -> Jet2 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            jet: Arc::new(jet),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn jet(&self, eta: f64, tau: f64) -> Jet2 {
        (self.jet)(eta, tau)
    }
}

impl fmt::Debug for ExplicitFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExplicitFunction")
            .field("name", &self.name)
            .finish()
    }
}

/// Evaluator for `f`, `ψ = ∇ᶠf` and their `τ`-derivatives at planar points.
#[derive(Debug, Clone)]
pub enum IntrinsicFunction {
    /// `f` generated by a parabola foliation.
    Lagrangian { profile: LagrangianProfile, tol: f64 },
    /// `f` given in closed form; not, in general, a solution of `Δᶠf = 0`.
    Explicit(ExplicitFunction),
}

/// `f` and `ψ` at one point, plus the leaf label when there is one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointValues {
    pub f: f64,
    pub psi: f64,
    pub zeta: Option<f64>,
}

/// `∂_τ f` and `∂_τ ψ` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauDerivatives {
    pub dtau_f: f64,
    pub dtau_psi: f64,
}

impl IntrinsicFunction {
    pub fn new(profile: LagrangianProfile) -> Self {
        Self::Lagrangian {
            profile,
            tol: DEFAULT_TOL,
        }
    }

    pub fn with_tol(profile: LagrangianProfile, tol: f64) -> Self {
        Self::Lagrangian { profile, tol }
    }

    pub fn explicit(
        name: impl Into<String>,
        jet: impl Fn(f64, f64) -> Jet2 + Send + Sync + 'static,
    ) -> Self {
        Self::Explicit(ExplicitFunction::new(name, jet))
    }

    /// The non-critical control `f(η, τ) = ητ`.
    pub fn eta_tau() -> Self {
        Self::explicit("eta*tau", |e, t| Jet2 {
            v: e * t,
            e: t,
            t: e,
            ee: 0.0,
            et: 1.0,
            tt: 0.0,
        })
    }

    /// `f ≡ c`.
    pub fn constant(c: f64) -> Self {
        Self::explicit(format!("const({c})"), move |_, _| Jet2::constant(c))
    }

    pub fn name(&self) -> String {
        match self {
            Self::Lagrangian { profile, .. } => profile.name(),
            Self::Explicit(e) => e.name().to_string(),
        }
    }

    pub fn profile(&self) -> Option<&LagrangianProfile> {
        match self {
            Self::Lagrangian { profile, .. } => Some(profile),
            Self::Explicit(_) => None,
        }
    }

    pub fn is_lagrangian(&self) -> bool {
        matches!(self, Self::Lagrangian { .. })
    }

    /// Label of the leaf through `(η, τ)`.
    pub fn invert(&self, eta: f64, tau: f64) -> Result<f64> {
        match self {
            Self::Lagrangian { profile, tol } => profile.invert(eta, tau, tol * (1.0 + tau.abs())),
            Self::Explicit(e) => Err(Error::InvalidInput(format!(
                "`{}` is not defined by a foliation",
                e.name()
            ))),
        }
    }

    /// `f` and `ψ` from a single foliation inversion.
    pub fn point(&self, eta: f64, tau: f64) -> Result<PointValues> {
        match self {
            Self::Lagrangian { profile, .. } => {
                let zeta = self.invert(eta, tau)?;
                let a = profile.a(zeta)?;
                let b = profile.b(zeta)?;
                Ok(PointValues {
                    f: a * eta + b,
                    psi: a,
                    zeta: Some(zeta),
                })
            }
            Self::Explicit(e) => {
                let j = e.jet(eta, tau);
                if !(j.v.is_finite() && j.e.is_finite() && j.t.is_finite()) {
                    return Err(Error::NonFinite { what: "f", zeta: tau });
                }
                Ok(PointValues {
                    f: j.v,
                    psi: j.e + j.v * j.t,
                    zeta: None,
                })
            }
        }
    }

    pub fn eval_f(&self, eta: f64, tau: f64) -> Result<f64> {
        Ok(self.point(eta, tau)?.f)
    }

    pub fn eval_psi(&self, eta: f64, tau: f64) -> Result<f64> {
        Ok(self.point(eta, tau)?.psi)
    }

    /// `∂_τ f` and `∂_τ ψ`.
    ///
    /// For foliations, `∂_τ ζ* = 1/∂_ζ g(η, ζ*)`, so `∂_τψ = A′/∂_ζ g` and
    /// `∂_τ f = (A′η + B′)/∂_ζ g`. Profiles without derivatives fall back to
    /// central differences in `τ` with step `ε_mach^{1/3}(1 + |τ|)`.
    pub fn tau_derivatives(&self, eta: f64, tau: f64) -> Result<TauDerivatives> {
        match self {
            Self::Lagrangian { profile, .. } => {
                let zeta = self.invert(eta, tau)?;
                let v = profile.values(zeta)?;
                match (v.a_prime, v.b_prime) {
                    (Some(ap), Some(bp)) => {
                        if !(ap.is_finite() && bp.is_finite()) {
                            return Err(Error::NonFinite {
                                what: "A' or B'",
                                zeta,
                            });
                        }
                        let dg = 0.5 * ap * eta * eta + bp * eta + 1.0;
                        if !(dg > 0.0) {
                            return Err(Error::DegenerateFoliation {
                                eta,
                                tau,
                                dzeta_g: dg,
                            });
                        }
                        Ok(TauDerivatives {
                            dtau_f: (ap * eta + bp) / dg,
                            dtau_psi: ap / dg,
                        })
                    }
                    _ => {
                        let h = f64::EPSILON.cbrt() * (1.0 + tau.abs());
                        let p = self.point(eta, tau + h)?;
                        let m = self.point(eta, tau - h)?;
                        Ok(TauDerivatives {
                            dtau_f: (p.f - m.f) / (2.0 * h),
                            dtau_psi: (p.psi - m.psi) / (2.0 * h),
                        })
                    }
                }
            }
            Self::Explicit(e) => {
                let j = e.jet(eta, tau);
                Ok(TauDerivatives {
                    dtau_f: j.t,
                    dtau_psi: j.et + j.t * j.t + j.v * j.tt,
                })
            }
        }
    }

    pub fn eval_dtau_psi(&self, eta: f64, tau: f64) -> Result<f64> {
        Ok(self.tau_derivatives(eta, tau)?.dtau_psi)
    }

    pub fn eval_dtau_f(&self, eta: f64, tau: f64) -> Result<f64> {
        Ok(self.tau_derivatives(eta, tau)?.dtau_f)
    }

    /// `∇ᶠv` at `(η, τ)`.
    pub fn nabla_f(&self, v: &dyn ScalarField, eta: f64, tau: f64) -> Result<f64> {
        let p = self.point(eta, tau)?;
        Ok(nabla(&v.jet(eta, tau), p.f))
    }

    /// `Δᶠv` at `(η, τ)`.
    pub fn delta_f(&self, v: &dyn ScalarField, eta: f64, tau: f64) -> Result<f64> {
        let p = self.point(eta, tau)?;
        Ok(laplacian(&v.jet(eta, tau), p.f, p.psi))
    }
}

/// `∂_η v + f ∂_τ v`.
pub fn nabla(v: &Jet2, f: f64) -> f64 {
    v.e + f * v.t
}

/// `∂_η²v + 2f ∂_η∂_τ v + f² ∂_τ²v + ψ ∂_τ v`.
pub fn laplacian(v: &Jet2, f: f64, psi: f64) -> f64 {
    v.ee + 2.0 * f * v.et + f * f * v.tt + psi * v.t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::ZetaWindow;

    fn cubic() -> IntrinsicFunction {
        IntrinsicFunction::new(LagrangianProfile::cubic(ZetaWindow::new(-30.0, 30.0).unwrap()))
    }

    #[test]
    fn explicit_function_psi_and_tau_derivatives() {
        let f = IntrinsicFunction::eta_tau();
        let p = f.point(2.0, 3.0).unwrap();
        assert_eq!(p.f, 6.0);
        // ψ = τ + ητ·η = τ(1 + η²)
        assert_eq!(p.psi, 15.0);
        let d = f.tau_derivatives(2.0, 3.0).unwrap();
        assert_eq!(d.dtau_f, 2.0);
        // ∂_τψ = 1 + η²
        assert_eq!(d.dtau_psi, 5.0);
    }

    #[test]
    fn cubic_point_matches_closed_form() {
        let f = cubic();
        for (e, t) in [(0.5, 0.5), (-0.3, 1.2), (1.1, -0.7)] {
            let p = f.point(e, t).unwrap();
            let r: f64 = t - e * e * e;
            let f_cf = 3.0 * e * e - 3.0 * r.cbrt().powi(2);
            let psi_cf = 6.0 * e + 6.0 * r.cbrt();
            assert!((p.f - f_cf).abs() < 1e-11, "({e},{t}): {} vs {f_cf}", p.f);
            assert!((p.psi - psi_cf).abs() < 1e-10);
        }
    }

    #[test]
    fn fd_fallback_for_profiles_without_derivatives() {
        use crate::profile::FnRule;
        let w = ZetaWindow::new(-10.0, 10.0).unwrap();
        let bare = LagrangianProfile::new(Arc::new(FnRule::new("ramp-bare", |z| z, |_| 0.0)), w);
        let exact = IntrinsicFunction::new(LagrangianProfile::ramp(1.0, w));
        let fallback = IntrinsicFunction::new(bare);
        for (e, t) in [(0.3, 0.4), (-1.0, 2.0)] {
            let a = exact.tau_derivatives(e, t).unwrap();
            let b = fallback.tau_derivatives(e, t).unwrap();
            assert!((a.dtau_psi - b.dtau_psi).abs() < 1e-8);
            assert!((a.dtau_f - b.dtau_f).abs() < 1e-8);
        }
    }

    #[test]
    fn degenerate_foliation_is_reported() {
        // A ≡ 0, B = ζ³/3 − ζ: g(1, ζ) = ζ³/3 is increasing but ∂_ζ g(1, 0) = 0.
        use crate::profile::FnRule;
        let rule = FnRule::new("flat", |_| 0.0, |z| z * z * z / 3.0 - z)
            .with_derivatives(|_| 0.0, |z| z * z - 1.0);
        let w = ZetaWindow::new(-2.0, 2.0).unwrap();
        let f = IntrinsicFunction::new(LagrangianProfile::new(Arc::new(rule), w));
        let err = f.tau_derivatives(1.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::DegenerateFoliation { .. }), "{err:?}");
    }

    #[test]
    fn explicit_functions_cannot_be_inverted() {
        assert!(IntrinsicFunction::eta_tau().invert(0.0, 0.0).is_err());
    }
}
