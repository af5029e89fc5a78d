//! Integral curves of `∇ᶠ = ∂_η + f∂_τ`.

use std::io::Write;

use log::warn;
use serde::Serialize;

use super::IntrinsicFunction;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveMode {
    /// Exact leaf for foliation-backed functions, RK4 otherwise.
    Auto,
    /// The parabola `τ = g(η, ζ*)` through the start point.
    ExactLeaf,
    /// Fixed-step classical Runge–Kutta on `η̇ = 1, τ̇ = f(η, τ)`.
    Rk4,
}

/// A sampled planar curve `t ↦ (η(t), τ(t))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanarCurve {
    pub t: Vec<f64>,
    pub eta: Vec<f64>,
    pub tau: Vec<f64>,
    /// Set when integration stopped early because `f` could not be evaluated.
    pub truncated: bool,
}

impl PlanarCurve {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// CSV with columns `t,eta,tau`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "eta", "tau"])?;
        for i in 0..self.len() {
            w.write_record([
                self.t[i].to_string(),
                self.eta[i].to_string(),
                self.tau[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Integral curve starting at `p0` at time `t_range.0`, sampled at `n_steps + 1`
/// equally spaced times up to `t_range.1`.
pub fn integral_curve(
    func: &IntrinsicFunction,
    p0: [f64; 2],
    t_range: (f64, f64),
    n_steps: usize,
) -> Result<PlanarCurve> {
    integral_curve_with(func, p0, t_range, n_steps, CurveMode::Auto)
}

pub fn integral_curve_with(
    func: &IntrinsicFunction,
    p0: [f64; 2],
    t_range: (f64, f64),
    n_steps: usize,
    mode: CurveMode,
) -> Result<PlanarCurve> {
    let (t0, t1) = t_range;
    if n_steps == 0 || !(t0.is_finite() && t1.is_finite()) || t0 == t1 {
        return Err(Error::InvalidInput(format!(
            "integral curve needs n_steps > 0 and a non-empty time range, got {n_steps} on [{t0}, {t1}]"
        )));
    }
    let h = (t1 - t0) / n_steps as f64;
    let times: Vec<f64> = (0..=n_steps)
        .map(|k| if k == n_steps { t1 } else { t0 + h * k as f64 })
        .collect();
    let exact = match mode {
        CurveMode::Auto => func.is_lagrangian(),
        CurveMode::ExactLeaf => true,
        CurveMode::Rk4 => false,
    };

    if exact {
        let profile = func.profile().ok_or_else(|| {
            Error::InvalidInput(format!("`{}` has no foliation to follow", func.name()))
        })?;
        let zeta = func.invert(p0[0], p0[1])?;
        let eta: Vec<f64> = times.iter().map(|t| p0[0] + (t - t0)).collect();
        let tau = eta
            .iter()
            .map(|&e| profile.leaf(e, zeta))
            .collect::<Result<Vec<_>>>()?;
        return Ok(PlanarCurve {
            t: times,
            eta,
            tau,
            truncated: false,
        });
    }

    let mut curve = PlanarCurve {
        t: vec![t0],
        eta: vec![p0[0]],
        tau: vec![p0[1]],
        truncated: false,
    };
    let (mut e, mut tau) = (p0[0], p0[1]);
    for k in 0..n_steps {
        match rk4_step(func, e, tau, h) {
            Ok(next) => {
                e = p0[0] + (times[k + 1] - t0);
                tau = next;
                curve.t.push(times[k + 1]);
                curve.eta.push(e);
                curve.tau.push(tau);
            }
            Err(err) if err.is_numerical_degeneracy() => {
                warn!("integral curve truncated at t = {}: {err}", times[k]);
                curve.truncated = true;
                break;
            }
            Err(err) => return Err(err),
        }
    }
    Ok(curve)
}

fn rk4_step(func: &IntrinsicFunction, e: f64, tau: f64, h: f64) -> Result<f64> {
    let k1 = func.eval_f(e, tau)?;
    let k2 = func.eval_f(e + 0.5 * h, tau + 0.5 * h * k1)?;
    let k3 = func.eval_f(e + 0.5 * h, tau + 0.5 * h * k2)?;
    let k4 = func.eval_f(e + h, tau + h * k3)?;
    Ok(tau + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}
