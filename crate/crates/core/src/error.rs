use thiserror::Error;

/// Errors raised by the numerical operations of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The complex norm of a biquaternion is too small to invert.
    #[error("zero divisor: complex norm magnitude {magnitude:e} is below {epsilon:e}")]
    ZeroDivisor { magnitude: f64, epsilon: f64 },

    /// A point lies on (or inside the core radius of) the z-axis where the
    /// azimuthal angle is undefined.
    #[error("axis singularity: cylindrical radius {radius:e} <= core radius {core:e}")]
    AxisSingularity { radius: f64, core: f64 },

    /// The e2/e3 components of a spinor are too large for the non-relativistic
    /// reduction.
    #[error("small components not small: relative magnitude {magnitude:e} exceeds {threshold:e}")]
    SmallComponentsNotSmall { magnitude: f64, threshold: f64 },

    /// The large-component spinor is not unit normalized.
    #[error("spinor not normalized: |phi|^2 = {norm_sqr} (tolerance {tolerance:e})")]
    NotNormalized { norm_sqr: f64, tolerance: f64 },

    /// Not enough samples to produce a statistical estimate.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A curve generator or curve has invalid geometry.
    #[error("invalid geometry: {0}")]
    GeometryInvalid(String),

    /// A parameter violates its documented domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors that signal a numerical breakdown (singularity or
    /// non-invertibility) rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ZeroDivisor { .. }
                | Error::AxisSingularity { .. }
                | Error::SmallComponentsNotSmall { .. }
                | Error::NotNormalized { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
