//! Quadrature of `γ(ε)`, its derivatives, both forms of the second variation,
//! the critical-point PDE residual and the adjoint identities of `∇ᶠ`.

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{gamma_integrands, DiffeoFamily};
use crate::area::{area_from_samples, NodeSamples, QuadratureDomain};
use crate::error::{Error, Result};
use crate::field::{integral_curve, laplacian, nabla, IntrinsicFunction, Jet2, PointValues, ScalarField};

/// An integral together with the integral of its absolute integrand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    /// `Σ wᵢ |gᵢ|`; the natural scale for judging how close `value` is to zero.
    pub abs: f64,
}

/// `γ(ε)`, `γ′(ε)`, `γ″(ε)` by quadrature of their analytic integrands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaDerivatives {
    pub value: Integral,
    pub first: Integral,
    pub second: Integral,
}

/// The sum-of-squares form of the second variation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagrangianSecondVariation {
    pub value: f64,
    /// `∫ A_f(0)² / (1 + ψ²)^{3/2}`.
    pub gradient_block: f64,
    /// `∫ ∂_τψ / (1 + ψ²)^{3/2} · (∇ᶠV₂ − ∇ᶠ(fV₁))²`.
    pub transverse_block: f64,
    pub abs: f64,
    /// Nodes where `∂_τψ` could not be evaluated (degenerate leaves); they are
    /// left out of `transverse_block`.
    pub excluded_nodes: usize,
}

/// Sup-norm of `(∇ᶠ + 2∂_τ f) ∇ᶠ(ψ/√(1+ψ²))` over quadrature nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdeResidual {
    pub sup: f64,
    pub worst_node: Option<[f64; 2]>,
    pub step: f64,
    pub excluded_nodes: usize,
}

/// Step along integral curves for the PDE residual.
pub const PDE_STEP: f64 = 1e-3;

/// An intrinsic function sampled on a quadrature domain, ready for repeated
/// variation computations with different families.
#[derive(Debug)]
pub struct VariationProblem<'a> {
    func: &'a IntrinsicFunction,
    domain: &'a QuadratureDomain,
    samples: NodeSamples,
    area: f64,
}

impl<'a> VariationProblem<'a> {
    pub fn new(func: &'a IntrinsicFunction, domain: &'a QuadratureDomain) -> Result<Self> {
        let samples = NodeSamples::evaluate(func, domain)?;
        let area = area_from_samples(&samples, domain);
        Ok(Self {
            func,
            domain,
            samples,
            area,
        })
    }

    pub fn func(&self) -> &IntrinsicFunction {
        self.func
    }

    pub fn domain(&self) -> &QuadratureDomain {
        self.domain
    }

    pub fn samples(&self) -> &NodeSamples {
        &self.samples
    }

    /// `γ(0)`, the intrinsic area over the domain.
    pub fn area(&self) -> f64 {
        self.area
    }

    fn check_support(&self, fam: &DiffeoFamily) -> Result<()> {
        if fam.field().support().within(&self.domain.rect()) {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "test field support {:?} is not contained in the domain {:?}",
                fam.field().support(),
                self.domain.rect()
            )))
        }
    }

    /// Evaluates `g` at every node in parallel; the lowest-index error wins.
    fn map_nodes<T, G>(&self, g: G) -> Result<Vec<T>>
    where
        T: Send,
        G: Fn(f64, f64, &PointValues) -> Result<T> + Sync,
    {
        self.domain
            .nodes()
            .par_iter()
            .zip(self.samples.values.par_iter())
            .map(|(&[eta, tau], p)| g(eta, tau, p))
            .collect::<Vec<_>>()
            .into_iter()
            .collect()
    }

    fn integral(&self, values: &[f64]) -> Integral {
        Integral {
            value: self.domain.integrate(values),
            abs: self.domain.integrate_abs(values),
        }
    }

    /// `γ(ε)` and its first two derivatives.
    pub fn gamma_derivatives(&self, fam: &DiffeoFamily, eps: f64) -> Result<GammaDerivatives> {
        self.check_support(fam)?;
        let rows = self.map_nodes(|eta, tau, p| gamma_integrands(p, &fam.jets(eta, tau, eps), eta, tau))?;
        let col = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<_>>();
        Ok(GammaDerivatives {
            value: self.integral(&col(0)),
            first: self.integral(&col(1)),
            second: self.integral(&col(2)),
        })
    }

    /// `γ(ε) = ∫ √(1 + (ψ̄∘φ^ε)²) J_{φ^ε}`.
    pub fn gamma(&self, fam: &DiffeoFamily, eps: f64) -> Result<f64> {
        Ok(self.gamma_derivatives(fam, eps)?.value.value)
    }

    /// `γ′(0) = ∫ ψ/√(1+ψ²) · A_f(0) + √(1+ψ²) (∂_ηV₁ + ∂_τV₂)`.
    pub fn first_variation(&self, fam: &DiffeoFamily) -> Result<Integral> {
        Ok(self.gamma_derivatives(fam, 0.0)?.first)
    }

    /// The second variation `II_f(V₁, V₂)` (terms in `W` excluded).
    pub fn second_variation(&self, fam: &DiffeoFamily) -> Result<Integral> {
        self.check_support(fam)?;
        let vals = self.map_nodes(|eta, tau, p| {
            let [v1, v2] = fam.field().v_jets(eta, tau);
            Ok(second_variation_integrand(p, &v1, &v2))
        })?;
        Ok(self.integral(&vals))
    }

    /// `II_f` in the form `∫ A_f(0)²/(1+ψ²)^{3/2} + ∂_τψ/(1+ψ²)^{3/2} (∇ᶠV₂ − ∇ᶠ(fV₁))²`,
    /// valid when `Δᶠf = 0`.
    pub fn second_variation_lagrangian(&self, fam: &DiffeoFamily) -> Result<LagrangianSecondVariation> {
        if !self.func.is_lagrangian() {
            return Err(Error::InvalidInput(format!(
                "the sum-of-squares second variation needs a foliation-backed function, got `{}`",
                self.func.name()
            )));
        }
        self.check_support(fam)?;
        let rows = self.map_nodes(|eta, tau, p| {
            let [v1, v2] = fam.field().v_jets(eta, tau);
            let q = 1.0 + p.psi * p.psi;
            let q32 = q * q.sqrt();
            let nv1 = nabla(&v1, p.f);
            let a0 = laplacian(&v2, p.f, p.psi) - 2.0 * p.psi * nv1 - p.f * laplacian(&v1, p.f, p.psi);
            let grad = a0 * a0 / q32;
            let cross = nabla(&v2, p.f) - (p.psi * v1.v + p.f * nv1);
            if cross == 0.0 {
                return Ok((grad, Some(0.0)));
            }
            match self.func.tau_derivatives(eta, tau) {
                Ok(d) => Ok((grad, Some(d.dtau_psi / q32 * cross * cross))),
                Err(e) if e.is_numerical_degeneracy() => Ok((grad, None)),
                Err(e) => Err(e),
            }
        })?;
        let grad: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let trans: Vec<f64> = rows.iter().map(|r| r.1.unwrap_or(0.0)).collect();
        let excluded_nodes = rows.iter().filter(|r| r.1.is_none()).count();
        if excluded_nodes > 0 {
            warn!(
                "{excluded_nodes} node(s) excluded from the transverse block: d_tau psi unavailable near degenerate leaves"
            );
        }
        let g = self.integral(&grad);
        let t = self.integral(&trans);
        Ok(LagrangianSecondVariation {
            value: g.value + t.value,
            gradient_block: g.value,
            transverse_block: t.value,
            abs: g.abs + t.abs,
            excluded_nodes,
        })
    }

    /// `∫ a∇ᶠb + ∇ᶠa·b + ∂_τf·a·b`, which vanishes for compactly supported `a·b`.
    pub fn adjoint_pairing(&self, a: &dyn ScalarField, b: &dyn ScalarField) -> Result<Integral> {
        let vals = self.map_nodes(|eta, tau, p| {
            let (ja, jb) = (a.jet(eta, tau), b.jet(eta, tau));
            if ja == Jet2::ZERO || jb == Jet2::ZERO {
                return Ok(0.0);
            }
            let ft = self.func.eval_dtau_f(eta, tau)?;
            Ok(ja.v * nabla(&jb, p.f) + nabla(&ja, p.f) * jb.v + ft * ja.v * jb.v)
        })?;
        Ok(self.integral(&vals))
    }

    /// `∫ a ∂_τb ∇ᶠc + ∇ᶠa ∂_τb c + a ∂_τ(∇ᶠb) c`, which vanishes for compactly
    /// supported fields.
    pub fn triple_identity(
        &self,
        a: &dyn ScalarField,
        b: &dyn ScalarField,
        c: &dyn ScalarField,
    ) -> Result<Integral> {
        let vals = self.map_nodes(|eta, tau, p| {
            let (ja, jb, jc) = (a.jet(eta, tau), b.jet(eta, tau), c.jet(eta, tau));
            if ja == Jet2::ZERO || jb == Jet2::ZERO || jc == Jet2::ZERO {
                return Ok(0.0);
            }
            let ft = self.func.eval_dtau_f(eta, tau)?;
            let dtau_nabla_b = jb.et + ft * jb.t + p.f * jb.tt;
            Ok(ja.v * jb.t * nabla(&jc, p.f)
                + nabla(&ja, p.f) * jb.t * jc.v
                + ja.v * dtau_nabla_b * jc.v)
        })?;
        Ok(self.integral(&vals))
    }

    /// Residual of `(∇ᶠ + 2∂_τf) ∇ᶠ(ψ/√(1+ψ²)) = 0`, with `∇ᶠ` evaluated by central
    /// differences of `ψ/√(1+ψ²)` along the integral curve through each node.
    pub fn minimal_pde_residual(&self) -> Result<PdeResidual> {
        let h = PDE_STEP;
        let u = |psi: f64| psi / (1.0 + psi * psi).sqrt();
        let rows = self.map_nodes(|eta, tau, p| {
            let attempt = || -> Result<f64> {
                let fwd = integral_curve(self.func, [eta, tau], (0.0, h), 1)?;
                let bwd = integral_curve(self.func, [eta, tau], (0.0, -h), 1)?;
                if fwd.truncated || bwd.truncated {
                    return Err(Error::OutOfWindow {
                        eta,
                        tau,
                        zeta_min: f64::NAN,
                        zeta_max: f64::NAN,
                    });
                }
                let up = u(self.func.eval_psi(fwd.eta[1], fwd.tau[1])?);
                let um = u(self.func.eval_psi(bwd.eta[1], bwd.tau[1])?);
                let u0 = u(p.psi);
                let d1 = (up - um) / (2.0 * h);
                let d2 = (up - 2.0 * u0 + um) / (h * h);
                let ft = self.func.eval_dtau_f(eta, tau)?;
                Ok(d2 + 2.0 * ft * d1)
            };
            match attempt() {
                Ok(r) => Ok(Some(r)),
                Err(e) if e.is_numerical_degeneracy() => Ok(None),
                Err(e) => Err(e),
            }
        })?;
        let mut sup = 0.0f64;
        let mut worst_node = None;
        let mut excluded_nodes = 0;
        for (node, r) in self.domain.nodes().iter().zip(&rows) {
            match r {
                Some(r) if r.abs() > sup => {
                    sup = r.abs();
                    worst_node = Some(*node);
                }
                Some(_) => {}
                None => excluded_nodes += 1,
            }
        }
        if excluded_nodes > 0 {
            warn!("{excluded_nodes} node(s) excluded from the PDE residual near degenerate leaves");
        }
        Ok(PdeResidual {
            sup,
            worst_node,
            step: h,
            excluded_nodes,
        })
    }
}

/// The four-block integrand of `II_f(V₁, V₂)`.
pub(crate) fn second_variation_integrand(p: &PointValues, v1: &Jet2, v2: &Jet2) -> f64 {
    let (f, psi) = (p.f, p.psi);
    let q = 1.0 + psi * psi;
    let s = q.sqrt();
    let nv1 = nabla(v1, f);
    let nv2 = nabla(v2, f);
    let dv1 = laplacian(v1, f, psi);
    let dv2 = laplacian(v2, f, psi);
    let a0 = dv2 - 2.0 * psi * nv1 - f * dv1;
    a0 * a0 / (q * s)
        + psi / s * (-4.0 * dv2 * nv1 - 2.0 * nv2 * dv1 + 6.0 * f * nv1 * dv1 + 6.0 * psi * nv1 * nv1)
        + 2.0 * psi / s * a0 * (v1.e + v2.t)
        + 2.0 * s * (v1.e * v2.t - v1.t * v2.e)
}

/// `γ(ε)` over the domain.
pub fn gamma(
    func: &IntrinsicFunction,
    fam: &DiffeoFamily,
    eps: f64,
    domain: &QuadratureDomain,
) -> Result<f64> {
    VariationProblem::new(func, domain)?.gamma(fam, eps)
}

/// `γ′(0)` over the domain.
pub fn first_variation(func: &IntrinsicFunction, fam: &DiffeoFamily, domain: &QuadratureDomain) -> Result<f64> {
    Ok(VariationProblem::new(func, domain)?.first_variation(fam)?.value)
}

/// `II_f(V₁, V₂)` over the domain.
pub fn second_variation(func: &IntrinsicFunction, fam: &DiffeoFamily, domain: &QuadratureDomain) -> Result<f64> {
    Ok(VariationProblem::new(func, domain)?.second_variation(fam)?.value)
}

pub fn second_variation_lagrangian(
    func: &IntrinsicFunction,
    fam: &DiffeoFamily,
    domain: &QuadratureDomain,
) -> Result<LagrangianSecondVariation> {
    VariationProblem::new(func, domain)?.second_variation_lagrangian(fam)
}

pub fn minimal_pde_residual(func: &IntrinsicFunction, domain: &QuadratureDomain) -> Result<PdeResidual> {
    VariationProblem::new(func, domain)?.minimal_pde_residual()
}

pub fn adjoint_pairing_residual(
    func: &IntrinsicFunction,
    domain: &QuadratureDomain,
    a: &dyn ScalarField,
    b: &dyn ScalarField,
) -> Result<f64> {
    Ok(VariationProblem::new(func, domain)?.adjoint_pairing(a, b)?.value)
}

pub fn triple_identity_residual(
    func: &IntrinsicFunction,
    domain: &QuadratureDomain,
    a: &dyn ScalarField,
    b: &dyn ScalarField,
    c: &dyn ScalarField,
) -> Result<f64> {
    Ok(VariationProblem::new(func, domain)?.triple_identity(a, b, c)?.value)
}
