//! Smooth planar test fields with analytic partial derivatives up to order two.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::area::Rect;
use crate::error::{Error, Result};

/// Value and partials `(v, ∂_η v, ∂_τ v, ∂_η²v, ∂_η∂_τ v, ∂_τ²v)` at a point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub e: f64,
    pub t: f64,
    pub ee: f64,
    pub et: f64,
    pub tt: f64,
}

impl Jet2 {
    pub const ZERO: Jet2 = Jet2 {
        v: 0.0,
        e: 0.0,
        t: 0.0,
        ee: 0.0,
        et: 0.0,
        tt: 0.0,
    };

    pub fn constant(c: f64) -> Self {
        Self { v: c, ..Self::ZERO }
    }

    /// Jet of the coordinate function `η`.
    pub fn eta(eta: f64) -> Self {
        Self {
            v: eta,
            e: 1.0,
            ..Self::ZERO
        }
    }

    /// Jet of the coordinate function `τ`.
    pub fn tau(tau: f64) -> Self {
        Self {
            v: tau,
            t: 1.0,
            ..Self::ZERO
        }
    }

    /// Jet of the product `self · other` (Leibniz rule).
    pub fn product(&self, o: &Jet2) -> Jet2 {
        Jet2 {
            v: self.v * o.v,
            e: self.e * o.v + self.v * o.e,
            t: self.t * o.v + self.v * o.t,
            ee: self.ee * o.v + 2.0 * self.e * o.e + self.v * o.ee,
            et: self.et * o.v + self.e * o.t + self.t * o.e + self.v * o.et,
            tt: self.tt * o.v + 2.0 * self.t * o.t + self.v * o.tt,
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.v, self.e, self.t, self.ee, self.et, self.tt]
            .iter()
            .all(|x| x.is_finite())
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2 {
            v: self.v + o.v,
            e: self.e + o.e,
            t: self.t + o.t,
            ee: self.ee + o.ee,
            et: self.et + o.et,
            tt: self.tt + o.tt,
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        self + (-o)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        -1.0 * self
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, j: Jet2) -> Jet2 {
        Jet2 {
            v: self * j.v,
            e: self * j.e,
            t: self * j.t,
            ee: self * j.ee,
            et: self * j.et,
            tt: self * j.tt,
        }
    }
}

/// Where a field may be nonzero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    Empty,
    /// Closed rectangle outside of which the field vanishes identically.
    Compact(Rect),
    Unbounded,
}

impl Support {
    pub fn union(self, other: Support) -> Support {
        match (self, other) {
            (Support::Empty, s) | (s, Support::Empty) => s,
            (Support::Unbounded, _) | (_, Support::Unbounded) => Support::Unbounded,
            (Support::Compact(a), Support::Compact(b)) => Support::Compact(a.union(&b)),
        }
    }

    /// True if the support lies inside the closed rectangle `r`.
    pub fn within(&self, r: &Rect) -> bool {
        match self {
            Support::Empty => true,
            Support::Compact(s) => {
                s.eta0 >= r.eta0 && s.eta1 <= r.eta1 && s.tau0 >= r.tau0 && s.tau1 <= r.tau1
            }
            Support::Unbounded => false,
        }
    }
}

/// A real function of `(η, τ)` with analytic partials up to second order.
pub trait ScalarField: Send + Sync + fmt::Debug {
    fn jet(&self, eta: f64, tau: f64) -> Jet2;

    fn support(&self) -> Support;

    fn value(&self, eta: f64, tau: f64) -> f64 {
        self.jet(eta, tau).v
    }
}

/// The polynomial bump `β(u) = (1 − u²)⁴` on `|u| < 1`, zero elsewhere; returns `(β, β′, β″)`.
pub fn poly_bump(u: f64) -> (f64, f64, f64) {
    if u.abs() >= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    let s = 1.0 - u * u;
    let s2 = s * s;
    (s2 * s2, -8.0 * u * s2 * s, s2 * (56.0 * u * u - 8.0))
}

/// Tensor-product bump `a · β((η − η_c)/w_η) · β((τ − τ_c)/w_τ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub amplitude: f64,
    pub eta_c: f64,
    pub tau_c: f64,
    pub w_eta: f64,
    pub w_tau: f64,
}

impl Bump {
    pub fn new(amplitude: f64, eta_c: f64, tau_c: f64, w_eta: f64, w_tau: f64) -> Result<Self> {
        let ok = [amplitude, eta_c, tau_c, w_eta, w_tau]
            .iter()
            .all(|x| x.is_finite());
        if !ok || w_eta <= 0.0 || w_tau <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "bump needs finite parameters and positive widths, got w = ({w_eta}, {w_tau})"
            )));
        }
        Ok(Self {
            amplitude,
            eta_c,
            tau_c,
            w_eta,
            w_tau,
        })
    }

    /// A bump placed uniformly at random so that its support lies in `region`,
    /// with half-widths in `[0.15, 0.35]` of the region size.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, region: &Rect) -> Self {
        let le = region.eta1 - region.eta0;
        let lt = region.tau1 - region.tau0;
        let w_eta = rng.gen_range(0.15..0.35) * le;
        let w_tau = rng.gen_range(0.15..0.35) * lt;
        let eta_c = rng.gen_range((region.eta0 + w_eta)..(region.eta1 - w_eta));
        let tau_c = rng.gen_range((region.tau0 + w_tau)..(region.tau1 - w_tau));
        Self::with_random_amplitude(rng, eta_c, tau_c, w_eta, w_tau)
    }

    /// A random bump whose support is a union of whole cells of the `cells × cells`
    /// grid on `rect`, at least one cell away from its boundary.
    ///
    /// Quadrature integrands are then smooth inside every cell, so composite
    /// rules on this grid or any refinement of it keep their full order.
    pub fn random_aligned<R: Rng + ?Sized>(rng: &mut R, rect: &Rect, cells: usize) -> Self {
        assert!(cells >= 6, "aligned bumps need at least 6 cells per direction");
        let span = |rng: &mut R, lo: f64, hi: f64| {
            let h = (hi - lo) / cells as f64;
            let max_len = (cells - 2).min((0.7 * cells as f64).round() as usize);
            let min_len = ((0.3 * cells as f64).round() as usize).clamp(2, max_len);
            let len = rng.gen_range(min_len..=max_len);
            let start = rng.gen_range(1..=(cells - 1 - len));
            let a = lo + h * start as f64;
            let b = lo + h * (start + len) as f64;
            (0.5 * (a + b), 0.5 * (b - a))
        };
        let (eta_c, w_eta) = span(rng, rect.eta0, rect.eta1);
        let (tau_c, w_tau) = span(rng, rect.tau0, rect.tau1);
        Self::with_random_amplitude(rng, eta_c, tau_c, w_eta, w_tau)
    }

    /// Amplitude of magnitude `[0.1, 0.5] · w_η w_τ`, which keeps all partials up to
    /// second order of unit size whatever the widths.
    fn with_random_amplitude<R: Rng + ?Sized>(
        rng: &mut R,
        eta_c: f64,
        tau_c: f64,
        w_eta: f64,
        w_tau: f64,
    ) -> Self {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let amplitude = sign * rng.gen_range(0.1..0.5) * w_eta * w_tau;
        Self {
            amplitude,
            eta_c,
            tau_c,
            w_eta,
            w_tau,
        }
    }

    pub fn support_rect(&self) -> Rect {
        Rect {
            eta0: self.eta_c - self.w_eta,
            eta1: self.eta_c + self.w_eta,
            tau0: self.tau_c - self.w_tau,
            tau1: self.tau_c + self.w_tau,
        }
    }
}

impl ScalarField for Bump {
    fn jet(&self, eta: f64, tau: f64) -> Jet2 {
        let (be, be1, be2) = poly_bump((eta - self.eta_c) / self.w_eta);
        let (bt, bt1, bt2) = poly_bump((tau - self.tau_c) / self.w_tau);
        let a = self.amplitude;
        let (ie, it) = (1.0 / self.w_eta, 1.0 / self.w_tau);
        Jet2 {
            v: a * be * bt,
            e: a * be1 * ie * bt,
            t: a * be * bt1 * it,
            ee: a * be2 * ie * ie * bt,
            et: a * be1 * bt1 * ie * it,
            tt: a * be * bt2 * it * it,
        }
    }

    fn support(&self) -> Support {
        if self.amplitude == 0.0 {
            Support::Empty
        } else {
            Support::Compact(self.support_rect())
        }
    }
}

/// The zero field.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroField;

impl ScalarField for ZeroField {
    fn jet(&self, _eta: f64, _tau: f64) -> Jet2 {
        Jet2::ZERO
    }
    fn support(&self) -> Support {
        Support::Empty
    }
}

/// Sum of fields.
#[derive(Debug, Clone, Default)]
pub struct SumField(pub Vec<Arc<dyn ScalarField>>);

impl ScalarField for SumField {
    fn jet(&self, eta: f64, tau: f64) -> Jet2 {
        self.0
            .iter()
            .fold(Jet2::ZERO, |acc, f| acc + f.jet(eta, tau))
    }
    fn support(&self) -> Support {
        self.0
            .iter()
            .fold(Support::Empty, |acc, f| acc.union(f.support()))
    }
}

type JetFn = Arc<dyn Fn(f64, f64) -> Jet2 + Send + Sync>;

/// Field given by a closure returning its jet, with a declared support.
#[derive(Clone)]
pub struct FnField {
    name: String,
    jet: JetFn,
    support: Support,
}

impl FnField {
    pub fn new(
        name: impl Into<String>,
        support: Support,
        jet: impl Fn(f64, f64) -> Jet2 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            jet: Arc::new(jet),
            support,
        }
    }
}

impl fmt::Debug for FnField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnField")
            .field("name", &self.name)
            .field("support", &self.support)
            .finish()
    }
}

impl ScalarField for FnField {
    fn jet(&self, eta: f64, tau: f64) -> Jet2 {
        (self.jet)(eta, tau)
    }
    fn support(&self) -> Support {
        self.support
    }
}

/// A planar vector field `V = (V₁, V₂)` generating a variation, with an optional
/// second-order correction `W = (W₁, W₂)`.
#[derive(Debug, Clone)]
pub struct TestField {
    v: [Arc<dyn ScalarField>; 2],
    w: Option<[Arc<dyn ScalarField>; 2]>,
}

impl TestField {
    pub fn new(v1: Arc<dyn ScalarField>, v2: Arc<dyn ScalarField>) -> Self {
        Self {
            v: [v1, v2],
            w: None,
        }
    }

    pub fn zero() -> Self {
        Self::new(Arc::new(ZeroField), Arc::new(ZeroField))
    }

    pub fn with_w(mut self, w1: Arc<dyn ScalarField>, w2: Arc<dyn ScalarField>) -> Self {
        self.w = Some([w1, w2]);
        self
    }

    /// Each component is a sum of `bumps_per_component` random bumps supported in `region`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, region: &Rect, bumps_per_component: usize) -> Self {
        Self::from_bumps(|| Bump::random(rng, region), bumps_per_component)
    }

    /// Like [`TestField::random`] with supports aligned to a `cells × cells` grid on `rect`
    /// (see [`Bump::random_aligned`]).
    pub fn random_aligned<R: Rng + ?Sized>(
        rng: &mut R,
        rect: &Rect,
        cells: usize,
        bumps_per_component: usize,
    ) -> Self {
        Self::from_bumps(|| Bump::random_aligned(rng, rect, cells), bumps_per_component)
    }

    fn from_bumps(mut bump: impl FnMut() -> Bump, per_component: usize) -> Self {
        let mut component = || -> Arc<dyn ScalarField> {
            let bumps = (0..per_component)
                .map(|_| Arc::new(bump()) as Arc<dyn ScalarField>)
                .collect();
            Arc::new(SumField(bumps))
        };
        let v1 = component();
        let v2 = component();
        Self::new(v1, v2)
    }

    pub fn v(&self) -> &[Arc<dyn ScalarField>; 2] {
        &self.v
    }

    pub fn w(&self) -> Option<&[Arc<dyn ScalarField>; 2]> {
        self.w.as_ref()
    }

    /// Jets of `V₁`, `V₂`.
    pub fn v_jets(&self, eta: f64, tau: f64) -> [Jet2; 2] {
        [self.v[0].jet(eta, tau), self.v[1].jet(eta, tau)]
    }

    /// Jets of `W₁`, `W₂` (zero when `W` is absent).
    pub fn w_jets(&self, eta: f64, tau: f64) -> [Jet2; 2] {
        match &self.w {
            Some(w) => [w[0].jet(eta, tau), w[1].jet(eta, tau)],
            None => [Jet2::ZERO; 2],
        }
    }

    pub fn support(&self) -> Support {
        let mut s = self.v[0].support().union(self.v[1].support());
        if let Some(w) = &self.w {
            s = s.union(w[0].support()).union(w[1].support());
        }
        s
    }

    /// A rectangle strictly containing the support (`None` if the support is unbounded
    /// or empty).
    pub fn support_box(&self) -> Option<Rect> {
        match self.support() {
            Support::Compact(r) => {
                let pad_e = 1e-9 * (1.0 + (r.eta1 - r.eta0).abs());
                let pad_t = 1e-9 * (1.0 + (r.tau1 - r.tau0).abs());
                Some(Rect {
                    eta0: r.eta0 - pad_e,
                    eta1: r.eta1 + pad_e,
                    tau0: r.tau0 - pad_t,
                    tau1: r.tau1 + pad_t,
                })
            }
            _ => None,
        }
    }
}
