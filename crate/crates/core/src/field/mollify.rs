//! Smoothing a profile by convolution with the standard bump mollifier.
//!
//! `A_ε = A * ρ_ε` and `B_ε = B * ρ_ε` are computed at knots of spacing `ε/8`
//! together with their exact derivatives `A * ρ′_ε`, `B * ρ′_ε`, and stored as
//! a sampled profile. Convolving both functions with the same non-negative
//! kernel preserves the admissibility inequality, so the result stays admissible.

use crate::area::gauss_legendre;
use crate::error::{Error, Result};
use crate::profile::{LagrangianProfile, SampledProfile};

/// `∫_{−1}^{1} exp(−1/(1 − x²)) dx`.
pub const BUMP_MASS: f64 = 0.443_993_816_168_079_4;

/// `ρ_ε(r)` and `ρ′_ε(r)` for the unit-mass bump of radius `ε`.
pub fn bump_kernel(r: f64, eps: f64) -> (f64, f64) {
    let x = r / eps;
    if x.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let s = 1.0 - x * x;
    let rho = (-1.0 / s).exp() / (BUMP_MASS * eps);
    (rho, rho * (-2.0 * r / (eps * eps)) / (s * s))
}

/// Quadrature points per convolution piece; enough for round-off level accuracy.
pub const DEFAULT_QUAD: usize = 64;

/// Mollifies with knot spacing `ε/8`.
pub fn mollify(profile: &LagrangianProfile, eps: f64, n_quad: usize) -> Result<LagrangianProfile> {
    mollify_with_spacing(profile, eps, n_quad, eps / 8.0)
}

/// [`mollified_samples`] wrapped as a profile.
pub fn mollify_with_spacing(
    profile: &LagrangianProfile,
    eps: f64,
    n_quad: usize,
    spacing: f64,
) -> Result<LagrangianProfile> {
    mollified_samples(profile, eps, n_quad, spacing).map(LagrangianProfile::sampled)
}

/// Mollifies `profile` at radius `eps`, tabulating the result every `spacing` on
/// `[ζ_min + ε, ζ_max − ε]`.
///
/// Each convolution integral is split at the rule's breakpoints and every piece
/// is integrated with `n_quad` Gauss–Legendre points after the substitution
/// `u = a + (b − a)S(y)`, `S(y) = 10y³ − 15y⁴ + 6y⁵`. `S′` vanishes to second order
/// at both ends, which tames the kernel's essential singularity at `±ε` and
/// the breakpoint cusps (such as `ζ^{1/3}` for the cubic profile). The result is
/// divided by the discrete kernel mass so constants are reproduced exactly.
pub fn mollified_samples(
    profile: &LagrangianProfile,
    eps: f64,
    n_quad: usize,
    spacing: f64,
) -> Result<SampledProfile> {
    if !(eps > 0.0 && eps.is_finite()) || n_quad == 0 || !(spacing > 0.0) {
        return Err(Error::InvalidInput(format!(
            "mollify needs eps > 0, n_quad > 0 and spacing > 0, got {eps}, {n_quad}, {spacing}"
        )));
    }
    let w = profile.window();
    let lo = w.min + eps;
    let hi = w.max - eps;
    if lo >= hi {
        return Err(Error::OutOfWindow {
            eta: f64::NAN,
            tau: f64::NAN,
            zeta_min: w.min,
            zeta_max: w.max,
        });
    }
    let n = ((hi - lo) / spacing).ceil() as usize + 1;
    let knots: Vec<f64> = (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect();

    let (gx, gw) = gauss_legendre(n_quad);
    let nodes: Vec<(f64, f64)> = gx
        .iter()
        .zip(&gw)
        .map(|(&x, &wt)| {
            let y = 0.5 * (x + 1.0);
            let s = y * y * y * (10.0 + y * (-15.0 + 6.0 * y));
            let ds = 30.0 * y * y * (1.0 - y) * (1.0 - y);
            (s, 0.5 * wt * ds)
        })
        .collect();
    let breakpoints = profile.rule().breakpoints();

    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    let mut da = Vec::with_capacity(n);
    let mut db = Vec::with_capacity(n);
    for &z in &knots {
        let mut cuts = vec![z - eps];
        cuts.extend(
            breakpoints
                .iter()
                .copied()
                .filter(|&p| p > z - eps && p < z + eps),
        );
        cuts.push(z + eps);
        cuts.sort_by(f64::total_cmp);

        // Moments: mass, A·ρ, B·ρ, ρ′, A·ρ′, B·ρ′.
        let mut m = [0.0f64; 6];
        for piece in cuts.windows(2) {
            let (p0, len) = (piece[0], piece[1] - piece[0]);
            for &(s, ws) in &nodes {
                let u = p0 + len * s;
                let (rho, drho) = bump_kernel(z - u, eps);
                if rho == 0.0 && drho == 0.0 {
                    continue;
                }
                let wq = ws * len;
                let av = profile.a(u)?;
                let bv = profile.b(u)?;
                m[0] += wq * rho;
                m[1] += wq * av * rho;
                m[2] += wq * bv * rho;
                m[3] += wq * drho;
                m[4] += wq * av * drho;
                m[5] += wq * bv * drho;
            }
        }
        let ae = m[1] / m[0];
        let be = m[2] / m[0];
        a.push(ae);
        b.push(be);
        da.push((m[4] - ae * m[3]) / m[0]);
        db.push((m[5] - be * m[3]) / m[0]);
    }
    let name = format!("mollified({}, {})", profile.name(), eps);
    SampledProfile::with_derivatives(name, knots, a, b, da, db)
}
