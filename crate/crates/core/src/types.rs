//! Contract and market descriptions shared by every pricer.
//!
//! Times are in years, rates and volatilities are annualized.

use serde::Serialize;

use crate::error::{ensure_finite, PricingError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OptionKind {
    Call,
    Put,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "style")]
pub enum ExerciseStyle {
    European,
    American,
    /// Exercisable at any time from `first_exercise` up to maturity.
    Bermudan {
        first_exercise: f64,
    },
}

/// Strike, maturity, payoff direction and exercise rights of an option.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptionContract {
    strike: f64,
    maturity: f64,
    kind: OptionKind,
    style: ExerciseStyle,
}

impl OptionContract {
    pub fn new(strike: f64, maturity: f64, kind: OptionKind, style: ExerciseStyle) -> Result<Self> {
        ensure_finite("strike", strike)?;
        ensure_finite("maturity", maturity)?;
        if strike <= 0.0 {
            return Err(PricingError::Domain(format!("strike must be positive, got {strike}")));
        }
        if maturity < 0.0 {
            return Err(PricingError::Domain(format!("maturity must be non-negative, got {maturity}")));
        }
        if let ExerciseStyle::Bermudan { first_exercise } = style {
            ensure_finite("first exercise date", first_exercise)?;
            if !(0.0..=maturity).contains(&first_exercise) {
                return Err(PricingError::Parameter(format!(
                    "first exercise date {first_exercise} outside [0, {maturity}]"
                )));
            }
        }
        Ok(Self { strike, maturity, kind, style })
    }

    pub fn european(kind: OptionKind, strike: f64, maturity: f64) -> Result<Self> {
        Self::new(strike, maturity, kind, ExerciseStyle::European)
    }

    pub fn american(kind: OptionKind, strike: f64, maturity: f64) -> Result<Self> {
        Self::new(strike, maturity, kind, ExerciseStyle::American)
    }

    pub fn bermudan(kind: OptionKind, strike: f64, maturity: f64, first_exercise: f64) -> Result<Self> {
        Self::new(strike, maturity, kind, ExerciseStyle::Bermudan { first_exercise })
    }

    pub fn strike(&self) -> f64 {
        self.strike
    }

    pub fn maturity(&self) -> f64 {
        self.maturity
    }

    pub fn kind(&self) -> OptionKind {
        self.kind
    }

    pub fn style(&self) -> ExerciseStyle {
        self.style
    }

    /// Same terms with a different exercise style.
    pub fn with_style(&self, style: ExerciseStyle) -> Result<Self> {
        Self::new(self.strike, self.maturity, self.kind, style)
    }
}

/// Spot, risk-free rate and valuation time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarketState {
    spot: f64,
    rate: f64,
    now: f64,
}

impl MarketState {
    pub fn new(spot: f64, rate: f64, now: f64) -> Result<Self> {
        ensure_finite("spot", spot)?;
        ensure_finite("rate", rate)?;
        ensure_finite("valuation time", now)?;
        if spot <= 0.0 {
            return Err(PricingError::Domain(format!("spot must be positive, got {spot}")));
        }
        if now < 0.0 {
            return Err(PricingError::Domain(format!("valuation time must be non-negative, got {now}")));
        }
        Ok(Self { spot, rate, now })
    }

    pub fn spot(&self) -> f64 {
        self.spot
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn with_spot(&self, spot: f64) -> Result<Self> {
        Self::new(spot, self.rate, self.now)
    }

    /// Time to maturity `T - t`; fails when valuation is past maturity.
    pub fn time_to_maturity(&self, contract: &OptionContract) -> Result<f64> {
        let tau = contract.maturity() - self.now;
        if tau < 0.0 {
            return Err(PricingError::Domain(format!(
                "valuation time {} is after maturity {}",
                self.now,
                contract.maturity()
            )));
        }
        Ok(tau)
    }
}

/// Annualized Black-Scholes volatility. Zero is accepted and selects the
/// deterministic limit in the pricers.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Volatility(f64);

impl Volatility {
    pub fn new(sigma: f64) -> Result<Self> {
        ensure_finite("volatility", sigma)?;
        if sigma < 0.0 {
            return Err(PricingError::Domain(format!("volatility must be non-negative, got {sigma}")));
        }
        Ok(Self(sigma))
    }

    pub fn sigma(&self) -> f64 {
        self.0
    }
}
