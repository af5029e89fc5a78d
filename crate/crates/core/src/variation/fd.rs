//! Richardson-extrapolated central differences of `γ(ε)` at `ε = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite-difference estimates of `γ′(0)` and `γ″(0)` with error estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdEstimate {
    pub first: f64,
    pub second: f64,
    pub first_error: f64,
    pub second_error: f64,
}

/// The `ε` values needed by [`fd_derivatives`] for the given base steps: `0`, `±h`, `±2h`.
pub fn fd_schedule(base_steps: &[f64]) -> Vec<f64> {
    let mut eps = vec![0.0];
    for &h in base_steps {
        for e in [h, -h, 2.0 * h, -2.0 * h] {
            if !eps.iter().any(|x: &f64| (x - e).abs() <= 1e-15 * e.abs()) {
                eps.push(e);
            }
        }
    }
    eps.sort_by(f64::total_cmp);
    eps
}

/// Estimates `γ′(0)` and `γ″(0)` from samples `(ε, γ(ε))`.
///
/// For every base step `h` with samples at `0, ±h, ±2h`, the central
/// differences at steps `h` and `2h` are combined by one Richardson step
/// (`(4D(h) − D(2h))/3`, fourth order). The estimate uses the smallest base
/// step; the error estimate is its disagreement with the next larger one.
pub fn fd_derivatives(samples: &[(f64, f64)]) -> Result<FdEstimate> {
    let lookup = |e: f64| -> Option<f64> {
        samples
            .iter()
            .find(|(x, _)| (x - e).abs() <= 1e-9 * e.abs().max(1e-12))
            .map(|&(_, g)| g)
    };
    let g0 = lookup(0.0)
        .ok_or_else(|| Error::InvalidInput("finite differences need a sample at eps = 0".into()))?;

    let mut steps: Vec<f64> = samples
        .iter()
        .map(|&(e, _)| e.abs())
        .filter(|&h| h > 0.0)
        .collect();
    steps.sort_by(f64::total_cmp);
    steps.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());

    let mut levels = Vec::new();
    for &h in &steps {
        let vals = [h, -h, 2.0 * h, -2.0 * h].map(lookup);
        if let [Some(p1), Some(m1), Some(p2), Some(m2)] = vals {
            let d1h = (p1 - m1) / (2.0 * h);
            let d1h2 = (p2 - m2) / (4.0 * h);
            let d2h = (p1 - 2.0 * g0 + m1) / (h * h);
            let d2h2 = (p2 - 2.0 * g0 + m2) / (4.0 * h * h);
            levels.push((
                (4.0 * d1h - d1h2) / 3.0,
                (4.0 * d2h - d2h2) / 3.0,
            ));
        }
    }
    if levels.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "finite differences need symmetric samples at ±h, ±2h for at least two base steps, found {}",
            levels.len()
        )));
    }
    let (first, second) = levels[0];
    let (first_next, second_next) = levels[1];
    Ok(FdEstimate {
        first,
        second,
        first_error: (first - first_next).abs(),
        second_error: (second - second_next).abs(),
    })
}

/// `|a − b| / max(|a|, |b|, scale)`: a relative difference that stays meaningful
/// when both values are near zero, with `scale` the natural size of the quantity
/// (for an integral, the integral of the absolute integrand).
pub fn scaled_difference(a: f64, b: f64, scale: f64) -> f64 {
    let denom = a.abs().max(b.abs()).max(scale.abs());
    if denom == 0.0 {
        0.0
    } else {
        (a - b).abs() / denom
    }
}
