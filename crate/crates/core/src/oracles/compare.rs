use serde::Serialize;

use crate::closed_form::{Formula, PriceResult};
use crate::error::{PricingError, Result};
use crate::oracles::McEstimate;
use crate::types::{MarketState, OptionContract};

/// Contract and market a price was computed for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PricingInputs {
    pub contract: OptionContract,
    pub market: MarketState,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum OracleValue {
    Point { price: f64 },
    MonteCarlo(McEstimate),
}

impl OracleValue {
    pub fn central(&self) -> f64 {
        match self {
            OracleValue::Point { price } => *price,
            OracleValue::MonteCarlo(e) => e.mean,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "policy", content = "value")]
pub enum TolerancePolicy {
    /// `|closed − oracle| ≤ tol`.
    Absolute(f64),
    /// `|closed − oracle| ≤ k·SE` of a Monte Carlo oracle.
    StdErrors(f64),
    ReportOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    WithinTolerance,
    OutsideTolerance,
    ReportOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub formula: Formula,
    pub closed_form_price: f64,
    pub oracle: OracleValue,
    pub oracle_price: f64,
    pub abs_diff: f64,
    /// `abs_diff / |oracle|`; absent when the oracle price is zero.
    pub rel_diff: Option<f64>,
    pub policy: TolerancePolicy,
    /// Absolute threshold the verdict was judged against, if any.
    pub threshold: Option<f64>,
    pub verdict: Verdict,
}

/// Compare a closed-form price with a reference value computed on the same inputs.
///
/// Only plain Black-Scholes prices are judged. The American, Bermudan and
/// stochastic-volatility formulas are not expected to equal lattice or
/// simulation values, so for them the verdict is always `ReportOnly`.
pub fn compare(
    closed_form: &PriceResult,
    closed_inputs: &PricingInputs,
    oracle: &OracleValue,
    oracle_inputs: &PricingInputs,
    policy: TolerancePolicy,
) -> Result<ComparisonReport> {
    if closed_inputs != oracle_inputs {
        return Err(PricingError::Comparison(format!(
            "closed form priced {closed_inputs:?}, oracle priced {oracle_inputs:?}"
        )));
    }
    let oracle_price = oracle.central();
    let abs_diff = (closed_form.price - oracle_price).abs();
    let rel_diff = (oracle_price != 0.0).then(|| abs_diff / oracle_price.abs());
    let policy = if closed_form.formula == Formula::BlackScholes { policy } else { TolerancePolicy::ReportOnly };
    let threshold = match (policy, oracle) {
        (TolerancePolicy::ReportOnly, _) => None,
        (TolerancePolicy::Absolute(tol), _) => Some(tol),
        (TolerancePolicy::StdErrors(k), OracleValue::MonteCarlo(e)) => Some(k * e.std_error),
        (TolerancePolicy::StdErrors(_), OracleValue::Point { .. }) => {
            return Err(PricingError::Parameter("a standard-error tolerance needs a Monte Carlo oracle".into()))
        }
    };
    let verdict = match threshold {
        None => Verdict::ReportOnly,
        Some(t) if abs_diff <= t => Verdict::WithinTolerance,
        Some(_) => Verdict::OutsideTolerance,
    };
    Ok(ComparisonReport {
        formula: closed_form.formula,
        closed_form_price: closed_form.price,
        oracle: *oracle,
        oracle_price,
        abs_diff,
        rel_diff,
        policy,
        threshold,
        verdict,
    })
}
