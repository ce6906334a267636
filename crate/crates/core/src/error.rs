use thiserror::Error;

/// Every failure the pricing library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PricingError {
    /// Input outside the mathematical domain of the operation (non-finite, S ≤ 0, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Inputs that sit on a limit the caller must branch on (τ = 0, σ = 0).
    #[error("degenerate input: {0}")]
    Degenerate(String),
    /// Contract kind or exercise style does not match the pricer.
    #[error("contract mismatch: {0}")]
    Contract(String),
    #[error("invalid model parameter: {0}")]
    Parameter(String),
    /// PDE evaluation requested at or beyond maturity.
    #[error("outside PDE domain: {0}")]
    Boundary(String),
    /// Binomial probability outside (0, 1).
    #[error("unstable lattice: {0}")]
    Stability(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("comparison inputs differ: {0}")]
    Comparison(String),
}

pub type Result<T> = std::result::Result<T, PricingError>;

pub(crate) fn ensure_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(PricingError::Domain(format!("{name} must be finite, got {x}")))
    }
}
