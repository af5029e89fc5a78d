//! Contact variations of intrinsic graphs.
//!
//! A family of planar maps `φ^ε = p + εV + (ε²/2)W` acts on `f` by
//! `f̄∘φ = ∇ᶠφ₂/∇ᶠφ₁`, and the area of the new graph is
//! `γ(ε) = ∫ √(1 + (ψ̄∘φ^ε)²) J_{φ^ε}`, which can be evaluated on the original
//! quadrature nodes without inverting `φ^ε`.

mod fd;
mod functional;
mod report;

use crate::error::{Error, Result};
use crate::field::{laplacian, nabla, Jet2, PointValues, TestField};

pub use fd::{fd_derivatives, fd_schedule, scaled_difference, FdEstimate};
pub use functional::{
    adjoint_pairing_residual, first_variation, gamma, minimal_pde_residual, second_variation,
    second_variation_lagrangian, triple_identity_residual, GammaDerivatives, Integral,
    LagrangianSecondVariation, PdeResidual, VariationProblem, PDE_STEP,
};
pub use report::{variation_report, Check, ReportOptions, VariationReport, VariationRow};

/// `|∇ᶠφ₁|` below this is treated as a degenerate pushforward.
pub const PUSHFORWARD_MIN: f64 = 1e-8;

/// The family `φ^ε(p) = p + εV(p) + (ε²/2)W(p)`.
#[derive(Debug, Clone)]
pub struct DiffeoFamily {
    field: TestField,
}

/// Jets of `φ^ε`, `∂_ε φ^ε` and `∂_ε² φ^ε` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyJets {
    pub phi: [Jet2; 2],
    pub d_phi: [Jet2; 2],
    pub dd_phi: [Jet2; 2],
}

impl DiffeoFamily {
    pub fn new(field: TestField) -> Self {
        Self { field }
    }

    pub fn field(&self) -> &TestField {
        &self.field
    }

    pub fn jets(&self, eta: f64, tau: f64, eps: f64) -> FamilyJets {
        let v = self.field.v_jets(eta, tau);
        let w = self.field.w_jets(eta, tau);
        let id = [Jet2::eta(eta), Jet2::tau(tau)];
        let phi = [0, 1].map(|i| id[i] + eps * v[i] + (0.5 * eps * eps) * w[i]);
        let d_phi = [0, 1].map(|i| v[i] + eps * w[i]);
        FamilyJets {
            phi,
            d_phi,
            dd_phi: w,
        }
    }
}

/// `∇ᶠ` and `Δᶠ` of the components of `φ`, `∂_εφ` and `∂_ε²φ`, named after the
/// quantities `N₁ = ∇ᶠφ₁`, `N₂ = ∇ᶠφ₂`, `D₁ = Δᶠφ₁`, `D₂ = Δᶠφ₂` and their
/// `ε`-derivatives.
#[derive(Debug, Clone, Copy)]
struct Pushed {
    n1: [f64; 3],
    n2: [f64; 3],
    d1: [f64; 3],
    d2: [f64; 3],
}

impl Pushed {
    fn new(p: &PointValues, j: &FamilyJets) -> Self {
        let n = |jet: &Jet2| nabla(jet, p.f);
        let d = |jet: &Jet2| laplacian(jet, p.f, p.psi);
        Self {
            n1: [n(&j.phi[0]), n(&j.d_phi[0]), n(&j.dd_phi[0])],
            n2: [n(&j.phi[1]), n(&j.d_phi[1]), n(&j.dd_phi[1])],
            d1: [d(&j.phi[0]), d(&j.d_phi[0]), d(&j.dd_phi[0])],
            d2: [d(&j.phi[1]), d(&j.d_phi[1]), d(&j.dd_phi[1])],
        }
    }

    fn check(&self, eta: f64, tau: f64) -> Result<()> {
        let value = self.n1[0];
        if !(value.abs() >= PUSHFORWARD_MIN) {
            return Err(Error::DegeneratePushforward { eta, tau, value });
        }
        Ok(())
    }

    fn f_bar(&self) -> f64 {
        self.n2[0] / self.n1[0]
    }

    fn psi_bar(&self) -> f64 {
        let n1 = self.n1[0];
        self.d2[0] / (n1 * n1) - self.n2[0] * self.d1[0] / (n1 * n1 * n1)
    }

    /// `A_f(ε) = ∂_ε (ψ̄∘φ^ε)`.
    fn coefficient_a(&self) -> f64 {
        let [n1, dn1, _] = self.n1;
        let [n2, dn2, _] = self.n2;
        let [d1, dd1, _] = self.d1;
        let [d2, dd2, _] = self.d2;
        let (i2, i3, i4) = (n1.powi(-2), n1.powi(-3), n1.powi(-4));
        dd2 * i2 - 2.0 * d2 * dn1 * i3 - dn2 * d1 * i3 + 3.0 * n2 * d1 * dn1 * i4 - n2 * dd1 * i3
    }

    /// `B_f(ε) = ∂_ε² (ψ̄∘φ^ε)`.
    fn coefficient_b(&self) -> f64 {
        let [n1, a1, b1] = self.n1;
        let [n2, a2, b2] = self.n2;
        let [d1, e1, g1] = self.d1;
        let [d2, e2, g2] = self.d2;
        let (i2, i3, i4, i5) = (n1.powi(-2), n1.powi(-3), n1.powi(-4), n1.powi(-5));
        g2 * i2 - 2.0 * e2 * a1 * i3 - 2.0 * e2 * a1 * i3 - 2.0 * d2 * b1 * i3
            + 6.0 * d2 * a1 * a1 * i4
            - b2 * d1 * i3
            - a2 * e1 * i3
            + 3.0 * a2 * d1 * a1 * i4
            + 3.0 * a2 * d1 * a1 * i4
            + 3.0 * n2 * e1 * a1 * i4
            + 3.0 * n2 * d1 * b1 * i4
            - 12.0 * n2 * d1 * a1 * a1 * i5
            - a2 * e1 * i3
            - n2 * g1 * i3
            + 3.0 * n2 * e1 * a1 * i4
    }
}

/// `(f̄∘φ, ψ̄∘φ)` at `(η, τ)` for a map `φ` given by the jets of its components.
pub fn pushforward_at(p: &PointValues, phi: &[Jet2; 2], eta: f64, tau: f64) -> Result<(f64, f64)> {
    let j = FamilyJets {
        phi: *phi,
        d_phi: [Jet2::ZERO; 2],
        dd_phi: [Jet2::ZERO; 2],
    };
    let pushed = Pushed::new(p, &j);
    pushed.check(eta, tau)?;
    Ok((pushed.f_bar(), pushed.psi_bar()))
}

/// `(f̄∘φ, ψ̄∘φ)` at `(η, τ)`.
pub fn pushforward(
    func: &crate::field::IntrinsicFunction,
    phi: &[Jet2; 2],
    eta: f64,
    tau: f64,
) -> Result<(f64, f64)> {
    pushforward_at(&func.point(eta, tau)?, phi, eta, tau)
}

/// `A_f(ε)` at `(η, τ)`.
pub fn variation_coefficient_a(
    func: &crate::field::IntrinsicFunction,
    fam: &DiffeoFamily,
    eps: f64,
    eta: f64,
    tau: f64,
) -> Result<f64> {
    let p = func.point(eta, tau)?;
    let pushed = Pushed::new(&p, &fam.jets(eta, tau, eps));
    pushed.check(eta, tau)?;
    Ok(pushed.coefficient_a())
}

/// `B_f(ε)` at `(η, τ)`.
pub fn variation_coefficient_b(
    func: &crate::field::IntrinsicFunction,
    fam: &DiffeoFamily,
    eps: f64,
    eta: f64,
    tau: f64,
) -> Result<f64> {
    let p = func.point(eta, tau)?;
    let pushed = Pushed::new(&p, &fam.jets(eta, tau, eps));
    pushed.check(eta, tau)?;
    Ok(pushed.coefficient_b())
}

/// `J_φ = ∂_ηφ₁∂_τφ₂ − ∂_τφ₁∂_ηφ₂` and its first two `ε`-derivatives.
pub fn jacobian_derivatives(j: &FamilyJets) -> [f64; 3] {
    let [p1, p2] = &j.phi;
    let [a1, a2] = &j.d_phi;
    let [b1, b2] = &j.dd_phi;
    let jac = p1.e * p2.t - p1.t * p2.e;
    let d = a1.e * p2.t + p1.e * a2.t - a1.t * p2.e - p1.t * a2.e;
    let dd = b1.e * p2.t + 2.0 * a1.e * a2.t + p1.e * b2.t
        - (b1.t * p2.e + 2.0 * a1.t * a2.e + p1.t * b2.e);
    [jac, d, dd]
}

/// Integrands of `γ(ε)`, `γ′(ε)` and `γ″(ε)` at one node.
pub(crate) fn gamma_integrands(
    p: &PointValues,
    j: &FamilyJets,
    eta: f64,
    tau: f64,
) -> Result<[f64; 3]> {
    let pushed = Pushed::new(p, j);
    pushed.check(eta, tau)?;
    let [jac, jac1, jac2] = jacobian_derivatives(j);
    if !(jac > 0.0) {
        return Err(Error::Orientation {
            eta,
            tau,
            jacobian: jac,
        });
    }
    let psi = pushed.psi_bar();
    let a = pushed.coefficient_a();
    let b = pushed.coefficient_b();
    let q = 1.0 + psi * psi;
    let s = q.sqrt();
    let g0 = s * jac;
    let g1 = psi / s * a * jac + s * jac1;
    let g2 = a * a / (q * s) * jac + psi * b / s * jac + 2.0 * psi * a / s * jac1 + s * jac2;
    Ok([g0, g1, g2])
}
