use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned rectangle `[η₀, η₁] × [τ₀, τ₁]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub eta0: f64,
    pub eta1: f64,
    pub tau0: f64,
    pub tau1: f64,
}

impl Rect {
    pub fn new(eta0: f64, eta1: f64, tau0: f64, tau1: f64) -> Result<Self> {
        let ok = [eta0, eta1, tau0, tau1].iter().all(|v| v.is_finite());
        if !ok || eta0 >= eta1 || tau0 >= tau1 {
            return Err(Error::InvalidInput(format!(
                "degenerate rectangle [{eta0}, {eta1}] x [{tau0}, {tau1}]"
            )));
        }
        Ok(Self {
            eta0,
            eta1,
            tau0,
            tau1,
        })
    }

    pub fn unit() -> Self {
        Self {
            eta0: 0.0,
            eta1: 1.0,
            tau0: 0.0,
            tau1: 1.0,
        }
    }

    pub fn area(&self) -> f64 {
        (self.eta1 - self.eta0) * (self.tau1 - self.tau0)
    }

    pub fn contains(&self, eta: f64, tau: f64) -> bool {
        eta >= self.eta0 && eta <= self.eta1 && tau >= self.tau0 && tau <= self.tau1
    }

    /// True if `other` lies in the interior of `self`.
    pub fn strictly_contains(&self, other: &Rect) -> bool {
        other.eta0 > self.eta0
            && other.eta1 < self.eta1
            && other.tau0 > self.tau0
            && other.tau1 < self.tau1
    }

    pub fn union(&self, other: &Rect) -> Rect {
        Rect {
            eta0: self.eta0.min(other.eta0),
            eta1: self.eta1.max(other.eta1),
            tau0: self.tau0.min(other.tau0),
            tau1: self.tau1.max(other.tau1),
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi's initial guess, then Newton on P_n.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Composite tensor Gauss–Legendre rule on a rectangle.
#[derive(Debug, Clone)]
pub struct QuadratureDomain {
    rect: Rect,
    cells_eta: usize,
    cells_tau: usize,
    order: usize,
    nodes: Vec<[f64; 2]>,
    weights: Vec<f64>,
}

impl QuadratureDomain {
    /// `cells × cells` cells with an `order`-point rule per direction in each cell.
    pub fn new(rect: Rect, cells: usize, order: usize) -> Result<Self> {
        Self::with_cells(rect, cells, cells, order)
    }

    pub fn with_cells(rect: Rect, cells_eta: usize, cells_tau: usize, order: usize) -> Result<Self> {
        if cells_eta == 0 || cells_tau == 0 || order == 0 {
            return Err(Error::InvalidInput(
                "quadrature needs at least one cell and one node per direction".into(),
            ));
        }
        let (gx, gw) = gauss_legendre(order);
        let he = (rect.eta1 - rect.eta0) / cells_eta as f64;
        let ht = (rect.tau1 - rect.tau0) / cells_tau as f64;
        let mut nodes = Vec::with_capacity(cells_eta * cells_tau * order * order);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for ci in 0..cells_eta {
            let e0 = rect.eta0 + he * ci as f64;
            for cj in 0..cells_tau {
                let t0 = rect.tau0 + ht * cj as f64;
                for (xi, wi) in gx.iter().zip(&gw) {
                    let eta = e0 + 0.5 * he * (xi + 1.0);
                    for (xj, wj) in gx.iter().zip(&gw) {
                        let tau = t0 + 0.5 * ht * (xj + 1.0);
                        nodes.push([eta, tau]);
                        weights.push(0.25 * he * ht * wi * wj);
                    }
                }
            }
        }
        Ok(Self {
            rect,
            cells_eta,
            cells_tau,
            order,
            nodes,
            weights,
        })
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn cells(&self) -> (usize, usize) {
        (self.cells_eta, self.cells_tau)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Same rectangle and order with the cell count multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::with_cells(
            self.rect,
            self.cells_eta * factor,
            self.cells_tau * factor,
            self.order,
        )
    }

    /// Weighted sum of per-node values, summed pairwise in node order.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.weights.len());
        let products: Vec<f64> = values.iter().zip(&self.weights).map(|(v, w)| v * w).collect();
        pairwise_sum(&products)
    }

    /// `Σ wᵢ |vᵢ|`, the natural scale of an integral.
    pub fn integrate_abs(&self, values: &[f64]) -> f64 {
        let products: Vec<f64> = values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| v.abs() * w)
            .collect();
        pairwise_sum(&products)
    }
}

/// Deterministic pairwise (cascade) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_low_order_rules() {
        let (x, w) = gauss_legendre(2);
        let r = 1.0 / 3f64.sqrt();
        assert!((x[0] + r).abs() < 1e-15 && (x[1] - r).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15 && (w[1] - 1.0).abs() < 1e-15);

        let (x, w) = gauss_legendre(3);
        let r = (0.6f64).sqrt();
        assert!((x[0] + r).abs() < 1e-15 && x[1] == 0.0 && (x[2] - r).abs() < 1e-15);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-15 && (w[0] - 5.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn rule_is_exact_to_degree_2n_minus_1() {
        for n in [1, 4, 7, 16, 40] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg} q={q}");
            }
        }
    }

    #[test]
    fn weights_sum_to_rectangle_area() {
        let rect = Rect::new(-0.5, 1.25, 2.0, 3.5).unwrap();
        let d = QuadratureDomain::with_cells(rect, 5, 7, 4).unwrap();
        let ones = vec![1.0; d.len()];
        assert!((d.integrate(&ones) - rect.area()).abs() < 1e-13);
        assert_eq!(d.len(), 5 * 7 * 16);
    }

    #[test]
    fn tensor_rule_integrates_bivariate_polynomial() {
        let rect = Rect::new(0.0, 2.0, -1.0, 1.0).unwrap();
        let d = QuadratureDomain::new(rect, 3, 4).unwrap();
        let vals: Vec<f64> = d
            .nodes()
            .iter()
            .map(|[e, t]| e.powi(7) * t.powi(6) + e * t)
            .collect();
        // ∫₀² η⁷ dη · ∫₋₁¹ τ⁶ dτ = 32 · 2/7
        assert!((d.integrate(&vals) - 32.0 * 2.0 / 7.0).abs() < 1e-11);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(Rect::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(QuadratureDomain::new(Rect::unit(), 0, 4).is_err());
    }
}
