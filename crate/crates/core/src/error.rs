use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite {what} at zeta = {zeta}")]
    NonFinite { what: &'static str, zeta: f64 },

    #[error("point (eta = {eta}, tau = {tau}) is not reached by leaves labelled inside [{zeta_min}, {zeta_max}]")]
    OutOfWindow {
        eta: f64,
        tau: f64,
        zeta_min: f64,
        zeta_max: f64,
    },

    #[error("degenerate foliation at (eta = {eta}, tau = {tau}): d_zeta g = {dzeta_g}")]
    DegenerateFoliation { eta: f64, tau: f64, dzeta_g: f64 },

    #[error("degenerate pushforward at (eta = {eta}, tau = {tau}): nabla^f phi_1 = {value}")]
    DegeneratePushforward { eta: f64, tau: f64, value: f64 },

    #[error("orientation lost at (eta = {eta}, tau = {tau}): jacobian = {jacobian}")]
    Orientation { eta: f64, tau: f64, jacobian: f64 },

    #[error("derivative {what} is not available for profile `{profile}`")]
    MissingDerivative {
        what: &'static str,
        profile: String,
    },

    #[error("coordinate kind mismatch: expected {expected}, found {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by the geometry degenerating (as opposed to bad input).
    pub fn is_numerical_degeneracy(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. }
                | Error::OutOfWindow { .. }
                | Error::DegenerateFoliation { .. }
                | Error::DegeneratePushforward { .. }
                | Error::Orientation { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
