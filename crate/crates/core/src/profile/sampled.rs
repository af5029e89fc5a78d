//! Profiles given by samples `(ζ_k, A_k, B_k)` and piecewise cubic Hermite interpolation.
//!
//! `A` uses Fritsch–Carlson limited slopes so that non-decreasing data stay
//! non-decreasing; `B` uses plain three-point slopes. When exact derivatives
//! are known (mollified profiles) they are used as Hermite slopes, with the
//! monotonicity limiter still applied to `A`.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ProfileRule, ZetaWindow};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SampledProfile {
    name: String,
    zeta: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
    da: Vec<f64>,
    db: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    zeta: f64,
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "B")]
    b: f64,
    #[serde(rename = "A_prime", default, skip_serializing_if = "Option::is_none")]
    a_prime: Option<f64>,
    #[serde(rename = "B_prime", default, skip_serializing_if = "Option::is_none")]
    b_prime: Option<f64>,
}

impl SampledProfile {
    /// Interpolates samples, estimating slopes from the data.
    pub fn from_samples(
        name: impl Into<String>,
        zeta: Vec<f64>,
        a: Vec<f64>,
        b: Vec<f64>,
    ) -> Result<Self> {
        validate(&zeta, &[&a, &b])?;
        let da = pchip_slopes(&zeta, &a);
        let db = three_point_slopes(&zeta, &b);
        Ok(Self {
            name: name.into(),
            zeta,
            a,
            b,
            da,
            db,
        })
    }

    /// Interpolates samples with known derivatives.
    pub fn with_derivatives(
        name: impl Into<String>,
        zeta: Vec<f64>,
        a: Vec<f64>,
        b: Vec<f64>,
        a_prime: Vec<f64>,
        b_prime: Vec<f64>,
    ) -> Result<Self> {
        validate(&zeta, &[&a, &b, &a_prime, &b_prime])?;
        let mut da = a_prime;
        limit_monotone(&zeta, &a, &mut da);
        Ok(Self {
            name: name.into(),
            zeta,
            a,
            b,
            da,
            db: b_prime,
        })
    }

    pub fn window(&self) -> ZetaWindow {
        ZetaWindow {
            min: self.zeta[0],
            max: *self.zeta.last().expect("validated non-empty"),
        }
    }

    pub fn knots(&self) -> &[f64] {
        &self.zeta
    }

    pub fn len(&self) -> usize {
        self.zeta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeta.is_empty()
    }

    pub fn read_csv<R: Read>(name: impl Into<String>, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let rows = rdr.deserialize::<Row>().collect::<Result<Vec<_>, _>>()?;
        let zeta = rows.iter().map(|r| r.zeta).collect();
        let a = rows.iter().map(|r| r.a).collect();
        let b = rows.iter().map(|r| r.b).collect();
        let a_prime: Option<Vec<f64>> = rows.iter().map(|r| r.a_prime).collect();
        let b_prime: Option<Vec<f64>> = rows.iter().map(|r| r.b_prime).collect();
        match (a_prime, b_prime) {
            (Some(da), Some(db)) if !rows.is_empty() => {
                Self::with_derivatives(name, zeta, a, b, da, db)
            }
            _ => Self::from_samples(name, zeta, a, b),
        }
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(format!("custom({})", path.display()), file)
    }

    /// Writes columns `zeta, A, B, A_prime, B_prime` (the Hermite slopes in use).
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        for k in 0..self.zeta.len() {
            wtr.serialize(Row {
                zeta: self.zeta[k],
                a: self.a[k],
                b: self.b[k],
                a_prime: Some(self.da[k]),
                b_prime: Some(self.db[k]),
            })?;
        }
        wtr.flush()?;
        Ok(())
    }

    fn locate(&self, zeta: f64) -> Option<usize> {
        let n = self.zeta.len();
        if !(zeta >= self.zeta[0] && zeta <= self.zeta[n - 1]) {
            return None;
        }
        let i = self.zeta.partition_point(|&z| z <= zeta);
        Some(i.saturating_sub(1).min(n - 2))
    }

    fn hermite(&self, y: &[f64], d: &[f64], zeta: f64) -> (f64, f64) {
        let Some(i) = self.locate(zeta) else {
            return (f64::NAN, f64::NAN);
        };
        let h = self.zeta[i + 1] - self.zeta[i];
        let t = (zeta - self.zeta[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let value = h00 * y[i] + h10 * h * d[i] + h01 * y[i + 1] + h11 * h * d[i + 1];
        let deriv = (6.0 * t2 - 6.0 * t) * (y[i] - y[i + 1]) / h
            + (3.0 * t2 - 4.0 * t + 1.0) * d[i]
            + (3.0 * t2 - 2.0 * t) * d[i + 1];
        (value, deriv)
    }
}

impl ProfileRule for SampledProfile {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn a(&self, zeta: f64) -> f64 {
        self.hermite(&self.a, &self.da, zeta).0
    }
    fn b(&self, zeta: f64) -> f64 {
        self.hermite(&self.b, &self.db, zeta).0
    }
    fn a_prime(&self, zeta: f64) -> Option<f64> {
        Some(self.hermite(&self.a, &self.da, zeta).1)
    }
    fn b_prime(&self, zeta: f64) -> Option<f64> {
        Some(self.hermite(&self.b, &self.db, zeta).1)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.zeta.clone()
    }
}

fn validate(zeta: &[f64], columns: &[&Vec<f64>]) -> Result<()> {
    if zeta.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "sampled profile needs at least 2 samples, got {}",
            zeta.len()
        )));
    }
    if columns.iter().any(|c| c.len() != zeta.len()) {
        return Err(Error::InvalidInput("sample columns differ in length".into()));
    }
    if let Some(k) = zeta.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(format!(
            "zeta samples must be strictly increasing (row {})",
            k + 1
        )));
    }
    for (k, &z) in zeta.iter().enumerate() {
        if !z.is_finite() || columns.iter().any(|c| !c[k].is_finite()) {
            return Err(Error::NonFinite {
                what: "sample",
                zeta: z,
            });
        }
    }
    Ok(())
}

fn secants(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| (ys[1] - ys[0]) / (xs[1] - xs[0]))
        .collect()
}

/// Monotone slopes (weighted harmonic mean of neighbouring secants).
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let del = secants(x, y);
    if n == 2 {
        return vec![del[0]; 2];
    }
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        let (d0, d1) = (del[k - 1], del[k]);
        if d0 * d1 <= 0.0 {
            continue;
        }
        let h0 = x[k] - x[k - 1];
        let h1 = x[k + 1] - x[k];
        let w1 = 2.0 * h1 + h0;
        let w2 = h1 + 2.0 * h0;
        d[k] = (w1 + w2) / (w1 / d0 + w2 / d1);
    }
    d[0] = del[0];
    d[n - 1] = del[n - 2];
    limit_monotone(x, y, &mut d);
    d
}

fn three_point_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let del = secants(x, y);
    if n == 2 {
        return vec![del[0]; 2];
    }
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        let h0 = x[k] - x[k - 1];
        let h1 = x[k + 1] - x[k];
        d[k] = (h1 * del[k - 1] + h0 * del[k]) / (h0 + h1);
    }
    d[0] = 2.0 * del[0] - d[1];
    d[n - 1] = 2.0 * del[n - 2] - d[n - 2];
    d
}

/// Fritsch–Carlson limiter: keeps each Hermite piece monotone wherever the data are.
fn limit_monotone(x: &[f64], y: &[f64], d: &mut [f64]) {
    let del = secants(x, y);
    for (k, &s) in del.iter().enumerate() {
        if s == 0.0 {
            d[k] = 0.0;
            d[k + 1] = 0.0;
            continue;
        }
        if d[k] / s < 0.0 {
            d[k] = 0.0;
        }
        if d[k + 1] / s < 0.0 {
            d[k + 1] = 0.0;
        }
        let alpha = d[k] / s;
        let beta = d[k + 1] / s;
        let r2 = alpha * alpha + beta * beta;
        if r2 > 9.0 {
            let tau = 3.0 / r2.sqrt();
            d[k] = tau * alpha * s;
            d[k + 1] = tau * beta * s;
        }
    }
}
