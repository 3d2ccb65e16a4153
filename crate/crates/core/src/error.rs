use thiserror::Error;

/// Errors produced by the library.
///
/// The `Display` form always starts with the error name so that front ends
/// can relay it verbatim (e.g. on stderr) and map it to an exit code.
#[derive(Debug, Clone, Error)]
pub enum CwtError {
    /// Invalid argument or malformed input data.
    #[error("Validation: {0}")]
    Validation(String),

    /// No interval `[r, b*r]` with `b >= b_min` stays above the threshold on
    /// the requested side; the wavelet spectrum is (numerically) trivial there.
    #[error("TauberianFail: {0}")]
    TauberianFail(String),

    /// The Calderón-sum denominator is not strictly positive somewhere in the
    /// working band; the cover and the bump do not match.
    #[error("DegenerateDenominator: denominator not positive at omega = {omega} (value {value:e})")]
    DegenerateDenominator { omega: f64, value: f64 },

    /// The signal has spectral mass at frequencies the dilated dual family
    /// does not reproduce (most commonly at or near omega = 0).
    #[error("BandCoverage: {} grid frequencies with signal mass are not covered by the j-range (first at omega = {})",
            .uncovered.len(), .uncovered.first().copied().unwrap_or(f64::NAN))]
    BandCoverage { uncovered: Vec<f64> },

    /// Moment recovery requires a nonzero leading polynomial coefficient.
    #[error("DegenerateLeadingCoefficient: leading polynomial coefficient is zero")]
    DegenerateLeadingCoefficient,
}

pub type Result<T> = std::result::Result<T, CwtError>;

impl CwtError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CwtError::Validation(msg.into())
    }
}
