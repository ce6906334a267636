//! Option pricing with closed-form American, Bermudan and stochastic-volatility
//! formulas, and the machinery to check them: a PDE residual checker,
//! binomial-tree and Monte Carlo reference pricers, and a simulator for the
//! square root of Brownian increments.

pub mod closed_form;
pub mod error;
pub mod numerics;
pub mod oracles;
pub mod pde_verify;
pub mod rng;
pub mod sqrtbm;
pub mod stats;
pub mod types;

#[cfg(test)]
#[path = "../tests/support/quadrature.rs"]
mod quadrature;

pub use closed_form::{
    american_call, american_put, bermudan_put, bs_call, bs_price, bs_put, stochvol_call, BermudanParams,
    ConsumptionParams, Formula, OmegaSpec, PriceResult, StochVolParams,
};
pub use error::{PricingError, Result};
pub use numerics::{d1_d2, norm_cdf, norm_pdf, payoff};
pub use types::{ExerciseStyle, MarketState, OptionContract, OptionKind, Volatility};
