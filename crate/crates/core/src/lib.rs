//! Numerical tools for intrinsic graphs in the first Heisenberg group.
//!
//! * [`profile`]: parabola foliations `(A, B)` and their admissibility.
//! * [`field`]: the intrinsic function `f` they generate, `∇ᶠ`, `Δᶠ`, test fields,
//!   integral curves and mollification.
//! * [`area`]: tensor Gauss–Legendre quadrature and the intrinsic area.
//! * [`variation`]: pushforward of `f` under planar diffeomorphisms, first and
//!   second contact variations, and finite-difference cross-checks.
//! * [`heisenberg`]: group law, graph lifts, horizontality and contact lifts.
//! * [`experiment`]: configuration files and the commands behind the CLI.

pub mod area;
pub mod error;
pub mod experiment;
pub mod field;
pub mod heisenberg;
pub mod profile;
pub mod variation;

pub use error::{Error, Result};
