//! Sampled certification that `(t, ζ) ↦ (t, g(t, ζ))` is a homeomorphism.
//!
//! Injectivity holds iff for every pair of labels either `A` and `B` agree
//! (the equal-`A` case) or `2(A − A′)(ζ − ζ′) > (B − B′)²` (the margin case).
//! Surjectivity is an asymptotic growth condition on `ζ − B²/(2A)`; on a
//! finite window we only record its values at the edges and compare them
//! with thresholds.

use serde::{Deserialize, Serialize};

use super::LagrangianProfile;
use crate::error::{Error, Result};

/// A sampled pair of labels and its margin `2(A−A′)(ζ−ζ′) − (B−B′)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairMargin {
    pub zeta: f64,
    pub zeta_prime: f64,
    pub margin: f64,
}

/// Edge value of `ζ − B(ζ)²/(2A(ζ))` for the growth conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthCheck {
    /// `"upper"` (condition 2, needed when `A > 0` somewhere) or `"lower"` (condition 3).
    pub edge: String,
    pub zeta: f64,
    /// `None` when the condition does not apply (no sampled `A` of the relevant sign).
    pub value: Option<f64>,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub profile: String,
    pub passed: bool,
    pub n_samples: usize,
    pub tol: f64,
    /// Pair with the smallest margin; `None` when every pair has equal `A`.
    pub worst_pair: Option<PairMargin>,
    /// Worst `|B − B′|` among pairs with equal `A`.
    pub worst_equal_a_gap: f64,
    pub pairs_equal_a: usize,
    pub pairs_margin: usize,
    pub failed_pairs: usize,
    pub growth_checks: Vec<GrowthCheck>,
}

/// Thresholds for the edge growth checks. The default puts both at the window midpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthThresholds {
    pub upper: f64,
    pub lower: f64,
}

impl GrowthThresholds {
    pub fn midpoint(profile: &LagrangianProfile) -> Self {
        let w = profile.window();
        let mid = 0.5 * (w.min + w.max);
        Self {
            upper: mid,
            lower: mid,
        }
    }
}

/// Checks the pair condition on all pairs of an `n_samples` uniform grid and
/// the growth conditions at the window edges, with midpoint thresholds.
pub fn check_admissibility(
    profile: &LagrangianProfile,
    n_samples: usize,
    tol: f64,
) -> Result<AdmissibilityReport> {
    check_admissibility_with(profile, n_samples, tol, GrowthThresholds::midpoint(profile))
}

pub fn check_admissibility_with(
    profile: &LagrangianProfile,
    n_samples: usize,
    tol: f64,
    thresholds: GrowthThresholds,
) -> Result<AdmissibilityReport> {
    if n_samples < 2 {
        return Err(Error::InvalidInput(format!(
            "admissibility needs at least 2 samples, got {n_samples}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let window = profile.window();
    let zetas = window.grid(n_samples);
    let ab = zetas
        .iter()
        .map(|&z| Ok((profile.a(z)?, profile.b(z)?)))
        .collect::<Result<Vec<_>>>()?;

    let mut worst_pair: Option<PairMargin> = None;
    let mut worst_equal_a_gap = 0.0f64;
    let (mut pairs_equal_a, mut pairs_margin, mut failed_pairs) = (0, 0, 0);

    for i in 0..n_samples {
        for j in (i + 1)..n_samples {
            let (a_i, b_i) = ab[i];
            let (a_j, b_j) = ab[j];
            let dz = zetas[i] - zetas[j];
            let da = a_i - a_j;
            let db = b_i - b_j;
            if da.abs() <= tol {
                pairs_equal_a += 1;
                worst_equal_a_gap = worst_equal_a_gap.max(db.abs());
                if db.abs() > tol {
                    failed_pairs += 1;
                }
            } else {
                pairs_margin += 1;
                let margin = 2.0 * da * dz - db * db;
                let scale = (1.0 + dz.abs()).powi(2);
                if margin < -tol * scale {
                    failed_pairs += 1;
                }
                if worst_pair.is_none_or(|w| margin < w.margin) {
                    worst_pair = Some(PairMargin {
                        zeta: zetas[i],
                        zeta_prime: zetas[j],
                        margin,
                    });
                }
            }
        }
    }

    let any_positive = ab.iter().any(|&(a, _)| a > 0.0);
    let any_negative = ab.iter().any(|&(a, _)| a < 0.0);
    let growth = |edge: &str, idx: usize, applies: bool, threshold: f64| {
        let (a, b) = ab[idx];
        let zeta = zetas[idx];
        let value = (applies && a != 0.0).then(|| zeta - b * b / (2.0 * a));
        let passed = match (applies, value) {
            (false, _) => true,
            (true, None) => false,
            (true, Some(v)) if edge == "upper" => v > threshold,
            (true, Some(v)) => v < threshold,
        };
        GrowthCheck {
            edge: edge.to_string(),
            zeta,
            value,
            threshold,
            passed,
        }
    };
    // A is non-decreasing on admissible profiles, so the relevant sign is attained at the edge.
    let growth_checks = vec![
        growth("upper", n_samples - 1, any_positive, thresholds.upper),
        growth("lower", 0, any_negative, thresholds.lower),
    ];

    let passed = failed_pairs == 0 && growth_checks.iter().all(|g| g.passed);
    Ok(AdmissibilityReport {
        profile: profile.name(),
        passed,
        n_samples,
        tol,
        worst_pair,
        worst_equal_a_gap,
        pairs_equal_a,
        pairs_margin,
        failed_pairs,
        growth_checks,
    })
}
