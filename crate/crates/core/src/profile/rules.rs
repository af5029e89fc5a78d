use std::fmt;
use std::sync::Arc;

use super::ProfileRule;
use crate::error::{Error, Result};

/// `A ≡ α`, `B ≡ 0`: the intrinsic graph of `f(η, τ) = αη`, a vertical plane.
#[derive(Debug, Clone, Copy)]
pub struct Plane {
    pub alpha: f64,
}

impl ProfileRule for Plane {
    fn name(&self) -> String {
        format!("plane({})", self.alpha)
    }
    fn a(&self, _zeta: f64) -> f64 {
        self.alpha
    }
    fn b(&self, _zeta: f64) -> f64 {
        0.0
    }
    fn a_prime(&self, _zeta: f64) -> Option<f64> {
        Some(0.0)
    }
    fn b_prime(&self, _zeta: f64) -> Option<f64> {
        Some(0.0)
    }
}

/// `A(ζ) = cζ`, `B ≡ 0`. For `c > 0` this gives `f(η, τ) = cητ / (1 + cη²/2)`.
#[derive(Debug, Clone, Copy)]
pub struct Ramp {
    pub c: f64,
}

impl ProfileRule for Ramp {
    fn name(&self) -> String {
        format!("ramp({})", self.c)
    }
    fn a(&self, zeta: f64) -> f64 {
        self.c * zeta
    }
    fn b(&self, _zeta: f64) -> f64 {
        0.0
    }
    fn a_prime(&self, _zeta: f64) -> Option<f64> {
        Some(self.c)
    }
    fn b_prime(&self, _zeta: f64) -> Option<f64> {
        Some(0.0)
    }
}

/// `A(ζ) = aζ`, `B(ζ) = bζ`. Admissible iff `2a ≥ b²` (with equality only when both vanish).
#[derive(Debug, Clone, Copy)]
pub struct Affine {
    pub a: f64,
    pub b: f64,
}

impl ProfileRule for Affine {
    fn name(&self) -> String {
        format!("affine({}, {})", self.a, self.b)
    }
    fn a(&self, zeta: f64) -> f64 {
        self.a * zeta
    }
    fn b(&self, zeta: f64) -> f64 {
        self.b * zeta
    }
    fn a_prime(&self, _zeta: f64) -> Option<f64> {
        Some(self.a)
    }
    fn b_prime(&self, _zeta: f64) -> Option<f64> {
        Some(self.b)
    }
}

/// Foliation generated by `h(s) = s³`: `A(ζ) = 6ζ^{1/3}`, `B(ζ) = −3ζ^{2/3}`.
///
/// The resulting function is `f(η, τ) = 3η² − 3(τ − η³)^{2/3}`, with
/// `∇ᶠf = 6η + 6(τ − η³)^{1/3}`. The foliation degenerates (`∂_ζ g = 0`)
/// along the curve `τ = η³`.
#[derive(Debug, Clone, Copy)]
pub struct Cubic;

impl ProfileRule for Cubic {
    fn name(&self) -> String {
        "cubic".to_string()
    }
    fn a(&self, zeta: f64) -> f64 {
        6.0 * zeta.cbrt()
    }
    fn b(&self, zeta: f64) -> f64 {
        let s = zeta.cbrt();
        -3.0 * s * s
    }
    fn a_prime(&self, zeta: f64) -> Option<f64> {
        let s = zeta.cbrt();
        Some(2.0 / (s * s))
    }
    fn b_prime(&self, zeta: f64) -> Option<f64> {
        Some(-2.0 / zeta.cbrt())
    }
    fn breakpoints(&self) -> Vec<f64> {
        vec![0.0]
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Profile given by arbitrary closures; derivatives are optional.
#[derive(Clone)]
pub struct FnRule {
    name: String,
    a: ScalarFn,
    b: ScalarFn,
    a_prime: Option<ScalarFn>,
    b_prime: Option<ScalarFn>,
    breakpoints: Vec<f64>,
}

impl FnRule {
    pub fn new(
        name: impl Into<String>,
        a: impl Fn(f64) -> f64 + Send + Sync + 'static,
        b: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            a: Arc::new(a),
            b: Arc::new(b),
            a_prime: None,
            b_prime: None,
            breakpoints: Vec::new(),
        }
    }

    pub fn with_derivatives(
        mut self,
        a_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
        b_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.a_prime = Some(Arc::new(a_prime));
        self.b_prime = Some(Arc::new(b_prime));
        self
    }

    pub fn with_breakpoints(mut self, breakpoints: Vec<f64>) -> Self {
        self.breakpoints = breakpoints;
        self
    }
}

impl fmt::Debug for FnRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnRule")
            .field("name", &self.name)
            .field("has_derivatives", &self.a_prime.is_some())
            .finish()
    }
}

impl ProfileRule for FnRule {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn a(&self, zeta: f64) -> f64 {
        (self.a)(zeta)
    }
    fn b(&self, zeta: f64) -> f64 {
        (self.b)(zeta)
    }
    fn a_prime(&self, zeta: f64) -> Option<f64> {
        self.a_prime.as_ref().map(|d| d(zeta))
    }
    fn b_prime(&self, zeta: f64) -> Option<f64> {
        self.b_prime.as_ref().map(|d| d(zeta))
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.breakpoints.clone()
    }
}

/// Parses `name` or `name(p1, p2, ...)`.
pub(crate) fn parse_call(spec: &str) -> Result<(String, Vec<f64>)> {
    let spec = spec.trim();
    let Some(open) = spec.find('(') else {
        return Ok((spec.to_string(), Vec::new()));
    };
    if !spec.ends_with(')') {
        return Err(Error::Config(format!("malformed profile name `{spec}`")));
    }
    let name = spec[..open].trim().to_string();
    let inner = &spec[open + 1..spec.len() - 1];
    let params = inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad parameter `{s}` in `{spec}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((name, params))
}

pub(crate) fn parse_rule(spec: &str) -> Result<Arc<dyn ProfileRule>> {
    let (name, p) = parse_call(spec)?;
    let arity = |n: usize| -> Result<()> {
        if p.len() == n {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "profile `{name}` takes {n} parameter(s), got {}",
                p.len()
            )))
        }
    };
    let rule: Arc<dyn ProfileRule> = match name.as_str() {
        "plane" => {
            arity(1)?;
            Arc::new(Plane { alpha: p[0] })
        }
        "ramp" => {
            arity(1)?;
            Arc::new(Ramp { c: p[0] })
        }
        "affine" => {
            arity(2)?;
            Arc::new(Affine { a: p[0], b: p[1] })
        }
        "cubic" => {
            arity(0)?;
            Arc::new(Cubic)
        }
        other => return Err(Error::Config(format!("unknown profile `{other}`"))),
    };
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_registry_names() {
        assert_eq!(parse_rule("plane(1)").unwrap().name(), "plane(1)");
        assert_eq!(parse_rule(" ramp( 2.5 ) ").unwrap().name(), "ramp(2.5)");
        assert_eq!(parse_rule("cubic").unwrap().name(), "cubic");
        assert_eq!(parse_rule("affine(1, 2)").unwrap().a(3.0), 3.0);
        assert!(parse_rule("plane").is_err());
        assert!(parse_rule("cubic(1)").is_err());
        assert!(parse_rule("saddle(1)").is_err());
        assert!(parse_rule("plane(x)").is_err());
    }

    #[test]
    fn cubic_derivatives_match_finite_differences() {
        let h = 1e-6;
        for z in [-3.0, -0.5, 0.2, 1.0, 7.0] {
            let da = (Cubic.a(z + h) - Cubic.a(z - h)) / (2.0 * h);
            let db = (Cubic.b(z + h) - Cubic.b(z - h)) / (2.0 * h);
            assert!((da - Cubic.a_prime(z).unwrap()).abs() < 1e-6 * (1.0 + da.abs()));
            assert!((db - Cubic.b_prime(z).unwrap()).abs() < 1e-6 * (1.0 + db.abs()));
        }
    }
}
