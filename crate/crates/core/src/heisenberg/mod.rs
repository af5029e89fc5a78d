//! The first Heisenberg group: group law, graph lifts, horizontality and contact lifts.
//!
//! Points carry a coordinate tag. First-kind (exponential) coordinates `(x, y, z)`
//! use the product `(a,b,c)*(x,y,z) = (a+x, b+y, c+z+½(ay−bx))` and the frame
//! `X = ∂x − (y/2)∂z`, `Y = ∂y + (x/2)∂z`. Second-kind coordinates `(ξ, η, τ)`
//! use the frame `X̃ = ∂ξ`, `Ỹ = ∂η + ξ∂τ`, `Z̃ = ∂τ`. Nothing converts between
//! the two kinds; operations reject points of the wrong kind.

mod contact;
mod export;

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{IntrinsicFunction, PlanarCurve};

pub use contact::{
    contact_defect, contact_differential, contact_lift, control_map, family_map, FrameComponents,
};
pub use export::{lift_graph_mesh, SurfaceMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordKind {
    /// Exponential coordinates `(x, y, z)`.
    First,
    /// Coordinates `(ξ, η, τ)` of the second kind.
    Second,
}

impl CoordKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CoordKind::First => "first-kind",
            CoordKind::Second => "second-kind",
        }
    }
}

impl fmt::Display for CoordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A point of the group. For second-kind points `(x, y, z)` hold `(ξ, η, τ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub kind: CoordKind,
}

impl HPoint {
    pub fn first(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z, kind: CoordKind::First }
    }

    pub fn second(xi: f64, eta: f64, tau: f64) -> Self {
        Self { x: xi, y: eta, z: tau, kind: CoordKind::Second }
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn with_coords(&self, c: [f64; 3]) -> Self {
        Self { x: c[0], y: c[1], z: c[2], kind: self.kind }
    }

    /// Euclidean norm of the coordinate triple.
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn require(&self, kind: CoordKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::KindMismatch {
                expected: kind.as_str(),
                found: self.kind.as_str(),
            })
        }
    }
}

pub fn group_multiply(p: HPoint, q: HPoint) -> Result<HPoint> {
    p.require(CoordKind::First)?;
    q.require(CoordKind::First)?;
    Ok(HPoint::first(
        p.x + q.x,
        p.y + q.y,
        p.z + q.z + 0.5 * (p.x * q.y - p.y * q.x),
    ))
}

pub fn inverse(p: HPoint) -> Result<HPoint> {
    p.require(CoordKind::First)?;
    Ok(HPoint::first(-p.x, -p.y, -p.z))
}

/// The point `(f, η, τ − ηf/2)` of the intrinsic graph of `f` above `(η, τ)`.
pub fn lift_graph(func: &IntrinsicFunction, eta: f64, tau: f64) -> Result<HPoint> {
    let f = func.eval_f(eta, tau)?;
    Ok(HPoint::first(f, eta, tau - 0.5 * eta * f))
}

/// The same graph point in second-kind coordinates, `(f, η, τ)`.
pub fn graph_point(func: &IntrinsicFunction, eta: f64, tau: f64) -> Result<HPoint> {
    Ok(HPoint::second(func.eval_f(eta, tau)?, eta, tau))
}

/// `π_X(x, y, z) = (y, z + xy/2)`, the inverse of [`lift_graph`] on the graph.
pub fn project_x(p: HPoint) -> Result<(f64, f64)> {
    p.require(CoordKind::First)?;
    Ok((p.y, p.z + 0.5 * p.x * p.y))
}

/// A sampled curve in the group, all points of one kind.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve3 {
    t: Vec<f64>,
    points: Vec<HPoint>,
}

impl Curve3 {
    pub fn new(t: Vec<f64>, points: Vec<HPoint>) -> Result<Self> {
        if t.len() != points.len() {
            return Err(Error::InvalidInput(format!(
                "curve has {} parameters but {} points",
                t.len(),
                points.len()
            )));
        }
        if let Some(first) = points.first() {
            for p in &points {
                p.require(first.kind)?;
            }
        }
        Ok(Self { t, points })
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn points(&self) -> &[HPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn kind(&self) -> Option<CoordKind> {
        self.points.first().map(|p| p.kind)
    }

    /// Largest `|p_{i+1} − 2p_i + p_{i−1}|` over interior samples and components.
    /// Zero up to round-off exactly when uniformly sampled points lie on a line.
    pub fn max_second_difference(&self) -> f64 {
        self.points
            .windows(3)
            .flat_map(|w| {
                let (a, b, c) = (w[0].coords(), w[1].coords(), w[2].coords());
                (0..3).map(move |k| (a[k] - 2.0 * b[k] + c[k]).abs())
            })
            .fold(0.0, f64::max)
    }

    /// CSV with columns `t,x,y,z`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "x", "y", "z"])?;
        for (t, p) in self.t.iter().zip(&self.points) {
            w.write_record([t, &p.x, &p.y, &p.z].map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Lifts a planar curve pointwise onto the intrinsic graph of `func`.
pub fn lift_curve(func: &IntrinsicFunction, curve: &PlanarCurve) -> Result<Curve3> {
    let points = curve
        .eta
        .iter()
        .zip(&curve.tau)
        .map(|(&e, &t)| lift_graph(func, e, t))
        .collect::<Result<Vec<_>>>()?;
    Curve3::new(curve.t.clone(), points)
}

/// Lift of the leaf `t ↦ (t, g(t, ζ))` sampled at `ts`, evaluating `f` through
/// the foliation at every point. In exact arithmetic this is the straight line
/// `(At + B, t, Bt/2 + ζ)`.
pub fn lift_leaf(func: &IntrinsicFunction, zeta: f64, ts: &[f64]) -> Result<Curve3> {
    let profile = func.profile().ok_or_else(|| {
        Error::InvalidInput(format!("`{}` is not backed by a parabola foliation", func.name()))
    })?;
    let points = ts
        .iter()
        .map(|&t| lift_graph(func, t, profile.leaf(t, zeta)?))
        .collect::<Result<Vec<_>>>()?;
    Curve3::new(ts.to_vec(), points)
}

/// Largest violation of horizontality over interior samples, with velocities by
/// central differences.
///
/// For first-kind curves this is `|ż + (yẋ − xẏ)/2|`; for second-kind curves the
/// contact form is `dτ − ξ dη`, giving `|τ̇ − ξη̇|`. Needs at least three samples
/// with a uniform parameter step.
pub fn horizontality_defect(curve: &Curve3) -> Result<f64> {
    let n = curve.len();
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "horizontality needs at least 3 samples, got {n}"
        )));
    }
    let t = curve.t();
    let dt = (t[n - 1] - t[0]) / (n - 1) as f64;
    let uniform = t
        .windows(2)
        .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.abs().max(f64::MIN_POSITIVE));
    if !(dt != 0.0 && uniform) {
        return Err(Error::InvalidInput(
            "horizontality needs a uniform, non-zero parameter step".into(),
        ));
    }
    let p = curve.points();
    let mut worst: f64 = 0.0;
    for i in 1..n - 1 {
        let (a, b, c) = (p[i - 1], p[i], p[i + 1]);
        let dx = (c.x - a.x) / (2.0 * dt);
        let dy = (c.y - a.y) / (2.0 * dt);
        let dz = (c.z - a.z) / (2.0 * dt);
        let defect = match b.kind {
            CoordKind::First => dz + 0.5 * (b.y * dx - b.x * dy),
            CoordKind::Second => dz - b.x * dy,
        };
        worst = worst.max(defect.abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{LagrangianProfile, ZetaWindow};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn product_examples() {
        let p = group_multiply(HPoint::first(1.0, 0.0, 0.0), HPoint::first(0.0, 1.0, 0.0)).unwrap();
        assert_eq!(p, HPoint::first(1.0, 1.0, 0.5));
        let q = HPoint::first(0.3, -1.2, 2.0);
        let e = group_multiply(q, inverse(q).unwrap()).unwrap();
        assert_eq!(e.coords(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn kinds_are_not_mixed() {
        let err = group_multiply(HPoint::first(0.0, 0.0, 0.0), HPoint::second(0.0, 0.0, 0.0));
        assert!(matches!(err, Err(Error::KindMismatch { .. })));
        assert!(project_x(HPoint::second(1.0, 1.0, 1.0)).is_err());
        assert!(Curve3::new(
            vec![0.0, 1.0],
            vec![HPoint::first(0.0, 0.0, 0.0), HPoint::second(0.0, 0.0, 0.0)]
        )
        .is_err());
    }

    #[test]
    fn associativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut pt = || HPoint::first(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        for _ in 0..100 {
            let (a, b, c) = (pt(), pt(), pt());
            let l = group_multiply(group_multiply(a, b).unwrap(), c).unwrap();
            let r = group_multiply(a, group_multiply(b, c).unwrap()).unwrap();
            for k in 0..3 {
                assert!((l.coords()[k] - r.coords()[k]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn graph_lift_and_projection() {
        let zero = IntrinsicFunction::constant(0.0);
        assert_eq!(lift_graph(&zero, 0.4, -1.0).unwrap(), HPoint::first(0.0, 0.4, -1.0));
        let cubic = IntrinsicFunction::new(LagrangianProfile::cubic(ZetaWindow::new(-50.0, 50.0).unwrap()));
        let p = lift_graph(&cubic, 1.0, 1.0).unwrap();
        assert!((p.x - 3.0).abs() < 1e-12 && p.y == 1.0 && (p.z + 0.5).abs() < 1e-12);
        let (e, t) = project_x(p).unwrap();
        assert!((e - 1.0).abs() < 1e-15 && (t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vertical_line_has_unit_defect() {
        let ts: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        let pts = ts.iter().map(|&t| HPoint::first(0.0, 0.0, t)).collect();
        let c = Curve3::new(ts, pts).unwrap();
        assert!((horizontality_defect(&c).unwrap() - 1.0).abs() < 1e-12);
        let short = Curve3::new(vec![0.0, 1.0], vec![HPoint::first(0.0, 0.0, 0.0); 2]).unwrap();
        assert!(horizontality_defect(&short).is_err());
    }

    #[test]
    fn second_kind_horizontal_line() {
        // ξ = 2 and τ = 2η is tangent to Ỹ + 0·X̃ everywhere.
        let ts: Vec<f64> = (0..5).map(|i| i as f64).collect();
        let pts = ts.iter().map(|&t| HPoint::second(2.0, t, 2.0 * t)).collect();
        let c = Curve3::new(ts, pts).unwrap();
        assert!(horizontality_defect(&c).unwrap() < 1e-14);
    }
}
