//! Lagrangian parabola foliations.
//!
//! A profile is a pair of functions `A(ζ)`, `B(ζ)` describing the family of
//! parabolas `g(t, ζ) = A(ζ) t²/2 + B(ζ) t + ζ`. When the map
//! `(t, ζ) ↦ (t, g(t, ζ))` is a homeomorphism of the plane, the rule
//! `f(t, g(t, ζ)) = A(ζ) t + B(ζ)` defines an intrinsically C¹ function whose
//! intrinsic gradient `∇ᶠf` equals `A(ζ)` along each parabola.

mod admissibility;
mod rules;
mod sampled;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use admissibility::{
    check_admissibility, check_admissibility_with, AdmissibilityReport, GrowthCheck, GrowthThresholds,
    PairMargin,
};
pub use rules::{Affine, Cubic, FnRule, Plane, Ramp};
pub use sampled::SampledProfile;

/// Closed interval of leaf labels on which a profile is used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaWindow {
    pub min: f64,
    pub max: f64,
}

impl ZetaWindow {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min >= max {
            return Err(Error::InvalidInput(format!(
                "empty or non-finite zeta window [{min}, {max}]"
            )));
        }
        Ok(Self { min, max })
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    pub fn contains(&self, zeta: f64) -> bool {
        zeta >= self.min && zeta <= self.max
    }

    /// `n` equally spaced points from `min` to `max` inclusive.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![0.5 * (self.min + self.max)],
            _ => {
                let step = self.width() / (n - 1) as f64;
                (0..n)
                    .map(|i| {
                        if i == n - 1 {
                            self.max
                        } else {
                            self.min + step * i as f64
                        }
                    })
                    .collect()
            }
        }
    }
}

/// Evaluator bundle for the foliation data `A`, `B` and, when smooth, their derivatives.
pub trait ProfileRule: Send + Sync + fmt::Debug {
    /// Registry-style name, e.g. `plane(1)`.
    fn name(&self) -> String;

    /// Value of `∇ᶠf` on the leaf through `(0, ζ)`.
    fn a(&self, zeta: f64) -> f64;

    /// Value of `f` at `(0, ζ)`.
    fn b(&self, zeta: f64) -> f64;

    fn a_prime(&self, _zeta: f64) -> Option<f64> {
        None
    }

    fn b_prime(&self, _zeta: f64) -> Option<f64> {
        None
    }

    /// Labels where `A` or `B` fail to be smooth. Used to split convolution integrals.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// A foliation rule together with the window of labels on which it is certified.
#[derive(Debug, Clone)]
pub struct LagrangianProfile {
    rule: Arc<dyn ProfileRule>,
    window: ZetaWindow,
}

/// `A`, `B` and their derivatives at a single label.
#[derive(Debug, Clone, Copy)]
pub struct ProfileValues {
    pub a: f64,
    pub b: f64,
    pub a_prime: Option<f64>,
    pub b_prime: Option<f64>,
}

impl LagrangianProfile {
    pub fn new(rule: Arc<dyn ProfileRule>, window: ZetaWindow) -> Self {
        Self { rule, window }
    }

    pub fn plane(alpha: f64, window: ZetaWindow) -> Self {
        Self::new(Arc::new(Plane { alpha }), window)
    }

    pub fn ramp(c: f64, window: ZetaWindow) -> Self {
        Self::new(Arc::new(Ramp { c }), window)
    }

    pub fn cubic(window: ZetaWindow) -> Self {
        Self::new(Arc::new(Cubic), window)
    }

    pub fn affine(a: f64, b: f64, window: ZetaWindow) -> Self {
        Self::new(Arc::new(Affine { a, b }), window)
    }

    pub fn sampled(profile: SampledProfile) -> Self {
        let window = profile.window();
        Self::new(Arc::new(profile), window)
    }

    /// Builds a profile from a registry name: `plane(alpha)`, `cubic`, `ramp(c)`
    /// or `affine(a, b)`.
    pub fn from_name(spec: &str, window: ZetaWindow) -> Result<Self> {
        Ok(Self::new(rules::parse_rule(spec)?, window))
    }

    pub fn name(&self) -> String {
        self.rule.name()
    }

    pub fn rule(&self) -> &Arc<dyn ProfileRule> {
        &self.rule
    }

    pub fn window(&self) -> ZetaWindow {
        self.window
    }

    pub fn with_window(&self, window: ZetaWindow) -> Self {
        Self {
            rule: Arc::clone(&self.rule),
            window,
        }
    }

    pub fn a(&self, zeta: f64) -> Result<f64> {
        finite("A", zeta, self.rule.a(zeta))
    }

    pub fn b(&self, zeta: f64) -> Result<f64> {
        finite("B", zeta, self.rule.b(zeta))
    }

    pub fn values(&self, zeta: f64) -> Result<ProfileValues> {
        Ok(ProfileValues {
            a: self.a(zeta)?,
            b: self.b(zeta)?,
            a_prime: self.rule.a_prime(zeta),
            b_prime: self.rule.b_prime(zeta),
        })
    }

    pub fn has_derivatives(&self) -> bool {
        let z = 0.5 * (self.window.min + self.window.max);
        self.rule.a_prime(z).is_some() && self.rule.b_prime(z).is_some()
    }

    /// The parabola `g(t, ζ) = A(ζ) t²/2 + B(ζ) t + ζ`.
    pub fn leaf(&self, t: f64, zeta: f64) -> Result<f64> {
        let a = self.a(zeta)?;
        let b = self.b(zeta)?;
        Ok(leaf_value(a, b, t, zeta))
    }

    /// `∂_ζ g(t, ζ)`, when the rule supplies derivatives.
    pub fn dzeta_leaf(&self, t: f64, zeta: f64) -> Option<f64> {
        let ap = self.rule.a_prime(zeta)?;
        let bp = self.rule.b_prime(zeta)?;
        Some(0.5 * ap * t * t + bp * t + 1.0)
    }

    /// Label of the leaf through `(η, τ)`.
    ///
    /// `ζ ↦ g(η, ζ)` is strictly increasing for admissible profiles, so the root
    /// is bracketed by expanding outward from `ζ = τ` (exact when `η = 0`) and
    /// then refined by bisection, accelerated by Newton steps when `∂_ζ g`
    /// is available. Returns once `|g(η, ζ) − τ| ≤ tol` or the bracket has
    /// collapsed to adjacent floating point numbers. When `∂_ζ g` is available the
    /// root then gets one more Newton step, kept only if it shrinks the residual.
    pub fn invert(&self, eta: f64, tau: f64, tol: f64) -> Result<f64> {
        let z = self.bracket_root(eta, tau, tol)?;
        let Some(d) = self.dzeta_leaf(eta, z).filter(|d| *d > 0.0 && d.is_finite()) else {
            return Ok(z);
        };
        let r = self.leaf(eta, z)? - tau;
        let polished = z - r / d;
        if r != 0.0 && self.window.contains(polished) {
            if let Ok(g) = self.leaf(eta, polished) {
                if (g - tau).abs() < r.abs() {
                    return Ok(polished);
                }
            }
        }
        Ok(z)
    }

    fn bracket_root(&self, eta: f64, tau: f64, tol: f64) -> Result<f64> {
        if !(eta.is_finite() && tau.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "cannot invert foliation at non-finite point ({eta}, {tau})"
            )));
        }
        let w = self.window;
        let resid = |z: f64| -> Result<f64> { Ok(self.leaf(eta, z)? - tau) };
        let out_of_window = || Error::OutOfWindow {
            eta,
            tau,
            zeta_min: w.min,
            zeta_max: w.max,
        };

        let z0 = tau.clamp(w.min, w.max);
        let r0 = resid(z0)?;
        if r0.abs() <= tol {
            return Ok(z0);
        }

        // Bracket expansion.
        let mut step = r0.abs().max(1e-8 * (1.0 + w.width()));
        let (mut lo, mut hi, mut r_lo, mut r_hi);
        if r0 < 0.0 {
            lo = z0;
            r_lo = r0;
            loop {
                if lo >= w.max {
                    return Err(out_of_window());
                }
                let z = (lo + step).min(w.max);
                let r = resid(z)?;
                if r >= 0.0 {
                    hi = z;
                    r_hi = r;
                    break;
                }
                lo = z;
                r_lo = r;
                step *= 2.0;
            }
        } else {
            hi = z0;
            r_hi = r0;
            loop {
                if hi <= w.min {
                    return Err(out_of_window());
                }
                let z = (hi - step).max(w.min);
                let r = resid(z)?;
                if r <= 0.0 {
                    lo = z;
                    r_lo = r;
                    break;
                }
                hi = z;
                r_hi = r;
                step *= 2.0;
            }
        }
        if r_lo.abs() <= tol {
            return Ok(lo);
        }
        if r_hi.abs() <= tol {
            return Ok(hi);
        }

        // Safeguarded Newton / bisection.
        let mut x = 0.5 * (lo + hi);
        for _ in 0..400 {
            let r = resid(x)?;
            if r.abs() <= tol {
                return Ok(x);
            }
            if r < 0.0 {
                lo = x;
                r_lo = r;
            } else {
                hi = x;
                r_hi = r;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                // Bracket exhausted: return the endpoint with the smaller residual.
                return Ok(if r_lo.abs() <= r_hi.abs() { lo } else { hi });
            }
            let newton = self
                .dzeta_leaf(eta, x)
                .filter(|d| d.is_finite() && *d > 0.0)
                .map(|d| x - r / d)
                .filter(|z| *z > lo && *z < hi);
            x = match newton {
                // Reject Newton steps that would not at least halve the bracket's
                // distance to the far side; bisection guarantees progress.
                Some(z) if (z - x).abs() < 0.5 * (hi - lo) => z,
                _ => mid,
            };
        }
        Ok(x)
    }
}

pub(crate) fn leaf_value(a: f64, b: f64, t: f64, zeta: f64) -> f64 {
    0.5 * a * t * t + b * t + zeta
}

fn finite(what: &'static str, zeta: f64, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { what, zeta })
    }
}
