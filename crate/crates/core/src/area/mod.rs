//! Quadrature on planar rectangles and the intrinsic area `∫ √(1 + ψ²) dη dτ`.

mod quadrature;

use rayon::prelude::*;

use crate::error::Result;
use crate::field::{IntrinsicFunction, PointValues};

pub use quadrature::{gauss_legendre, pairwise_sum, QuadratureDomain, Rect};

/// `f`, `ψ` (and the leaf label, if any) at every node of a domain.
#[derive(Debug, Clone)]
pub struct NodeSamples {
    pub values: Vec<PointValues>,
}

impl NodeSamples {
    /// Evaluates `func` at all nodes in parallel. On failure the error of the
    /// lowest-index failing node is returned, so the outcome is deterministic.
    pub fn evaluate(func: &IntrinsicFunction, domain: &QuadratureDomain) -> Result<Self> {
        let values = domain
            .nodes()
            .par_iter()
            .map(|&[eta, tau]| func.point(eta, tau))
            .collect::<Vec<_>>()
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { values })
    }

    pub fn psi(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().map(|p| p.psi)
    }
}

/// Intrinsic area of the graph of `f` over the domain's rectangle.
pub fn intrinsic_area(func: &IntrinsicFunction, domain: &QuadratureDomain) -> Result<f64> {
    let samples = NodeSamples::evaluate(func, domain)?;
    Ok(area_from_samples(&samples, domain))
}

pub fn area_from_samples(samples: &NodeSamples, domain: &QuadratureDomain) -> f64 {
    let integrand: Vec<f64> = samples.psi().map(|p| (1.0 + p * p).sqrt()).collect();
    domain.integrate(&integrand)
}
