//! Contact lifts `Φ(ξ, η, τ) = (∇^ξφ₂/∇^ξφ₁, φ₁, φ₂)` of planar maps and a
//! finite-difference test of `dΦ(H) ⊂ H`.

use super::{CoordKind, HPoint};
use crate::error::{Error, Result};
use crate::field::{nabla, Jet2};
use crate::variation::{DiffeoFamily, PUSHFORWARD_MIN};

/// The planar map `φ^ε` of a family as a jet-valued closure, for [`contact_lift`].
pub fn family_map(fam: &DiffeoFamily, eps: f64) -> impl Fn(f64, f64) -> Result<[Jet2; 2]> + '_ {
    move |eta, tau| Ok(fam.jets(eta, tau, eps).phi)
}

/// `Φ(ξ, η, τ)` for a second-kind point, with `∇^ξ = ∂_η + ξ∂_τ`.
///
/// `phi` returns the jets of both components of the planar map at `(η, τ)`.
/// Fails with [`Error::DegeneratePushforward`] when `|∇^ξφ₁| < PUSHFORWARD_MIN`.
pub fn contact_lift<P>(phi: &P, p: HPoint) -> Result<HPoint>
where
    P: Fn(f64, f64) -> Result<[Jet2; 2]> + ?Sized,
{
    p.require(CoordKind::Second)?;
    let (xi, eta, tau) = (p.x, p.y, p.z);
    let [p1, p2] = phi(eta, tau)?;
    let n1 = nabla(&p1, xi);
    if !(n1.abs() >= PUSHFORWARD_MIN) {
        return Err(Error::DegeneratePushforward { eta, tau, value: n1 });
    }
    Ok(HPoint::second(nabla(&p2, xi) / n1, p1.v, p2.v))
}

/// `(ξ, η, τ) ↦ (ξ, η, τ + ξ²)`, a diffeomorphism that is not contact.
pub fn control_map(p: HPoint) -> Result<HPoint> {
    p.require(CoordKind::Second)?;
    Ok(HPoint::second(p.x, p.y, p.z + p.x * p.x))
}

/// Components of `dΦ(X̃)` and `dΦ(Ỹ)` in the frame `(X̃, Ỹ, Z̃)` at `Φ(p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameComponents {
    pub image: HPoint,
    pub d_x: [f64; 3],
    pub d_y: [f64; 3],
}

impl FrameComponents {
    /// `max(|Z̃-part of dΦ(X̃)|, |Z̃-part of dΦ(Ỹ)|)`; zero for contact maps.
    pub fn vertical(&self) -> f64 {
        self.d_x[2].abs().max(self.d_y[2].abs())
    }
}

/// `dΦ(X̃)` and `dΦ(Ỹ)` at the second-kind point `p` by central differences with
/// step `h`, decomposed in the frame at `Φ(p)`.
///
/// A vector `(v_ξ, v_η, v_τ)` at `q` has frame components
/// `(v_ξ, v_η, v_τ − q_ξ v_η)`.
pub fn contact_differential<M>(map: &M, p: HPoint, h: f64) -> Result<FrameComponents>
where
    M: Fn(HPoint) -> Result<HPoint> + ?Sized,
{
    p.require(CoordKind::Second)?;
    let image = map(p)?;
    image.require(CoordKind::Second)?;
    let derivative = |dir: [f64; 3]| -> Result<[f64; 3]> {
        let c = p.coords();
        let plus = map(p.with_coords([0, 1, 2].map(|k| c[k] + h * dir[k])))?.coords();
        let minus = map(p.with_coords([0, 1, 2].map(|k| c[k] - h * dir[k])))?.coords();
        Ok([0, 1, 2].map(|k| (plus[k] - minus[k]) / (2.0 * h)))
    };
    let frame = |v: [f64; 3]| [v[0], v[1], v[2] - image.x * v[1]];
    let d_x = frame(derivative([1.0, 0.0, 0.0])?);
    let d_y = frame(derivative([0.0, 1.0, p.x])?);
    if !d_x.iter().chain(&d_y).all(|v| v.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "frame decomposition of dPhi is not finite at ({}, {}, {})",
            p.x, p.y, p.z
        )));
    }
    Ok(FrameComponents { image, d_x, d_y })
}

/// Largest Z̃-component of `dΦ(X̃)` and `dΦ(Ỹ)` over `samples`, differentiating with
/// step `h · (1 + |p|)` at each sample `p`.
pub fn contact_defect<M>(map: &M, samples: &[HPoint], h: f64) -> Result<f64>
where
    M: Fn(HPoint) -> Result<HPoint> + ?Sized,
{
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("contact defect needs h > 0, got {h}")));
    }
    let mut worst: f64 = 0.0;
    for &p in samples {
        let c = contact_differential(map, p, h * (1.0 + p.norm()))?;
        worst = worst.max(c.vertical());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity(eta: f64, tau: f64) -> Result<[Jet2; 2]> {
        Ok([Jet2::eta(eta), Jet2::tau(tau)])
    }

    fn samples() -> Vec<HPoint> {
        vec![
            HPoint::second(0.5, 0.1, -0.3),
            HPoint::second(-1.0, 0.7, 0.2),
            HPoint::second(2.0, -0.4, 1.1),
        ]
    }

    #[test]
    fn identity_lift_is_identity() {
        for p in samples() {
            assert_eq!(contact_lift(&identity, p).unwrap(), p);
        }
        let lift = |p| contact_lift(&identity, p);
        // Only central-difference round-off, about machine epsilon over h.
        assert!(contact_defect(&lift, &samples(), 1e-5).unwrap() < 1e-10);
    }

    #[test]
    fn vertical_translation() {
        let shift = |eta: f64, tau: f64| Ok([Jet2::eta(eta), Jet2::tau(tau) + Jet2::constant(0.7)]);
        let p = contact_lift(&shift, HPoint::second(1.5, 0.2, 0.3)).unwrap();
        assert_eq!(p.coords(), [1.5, 0.2, 1.0]);
    }

    #[test]
    fn degenerate_denominator() {
        // φ₁ = τ: ∇^ξφ₁ = ξ vanishes on ξ = 0.
        let swap = |eta: f64, tau: f64| Ok([Jet2::tau(tau), Jet2::eta(eta)]);
        let err = contact_lift(&swap, HPoint::second(0.0, 1.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::DegeneratePushforward { .. }));
        assert!(contact_lift(&swap, HPoint::first(0.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn control_map_defect_is_two_xi() {
        let c = contact_differential(&control_map, HPoint::second(0.3, 1.0, -2.0), 1e-5).unwrap();
        assert!((c.d_x[2] - 0.6).abs() < 1e-9);
        assert!(c.d_y[2].abs() < 1e-9);
    }

    #[test]
    fn nonlinear_map_is_contact() {
        // φ = (η + τ²/4, τ + sin η / 3)
        let phi = |e: f64, t: f64| {
            Ok([
                Jet2 { v: e + 0.25 * t * t, e: 1.0, t: 0.5 * t, ee: 0.0, et: 0.0, tt: 0.5 },
                Jet2 { v: t + e.sin() / 3.0, e: e.cos() / 3.0, t: 1.0, ee: -e.sin() / 3.0, et: 0.0, tt: 0.0 },
            ])
        };
        let lift = |p| contact_lift(&phi, p);
        let d = contact_defect(&lift, &samples(), 1e-5).unwrap();
        assert!(d < 1e-8, "{d}");
    }
}
