//! Closed-form prices.
//!
//! Every price is reported as `premium_factor × base_price`, where the base is
//! the Black-Scholes value of the equivalent European option and the factor is
//! an exponential premium:
//!
//! * American call/put: `exp(Ψ(1−r)(T−t))`, from pricing with a consumption
//!   term `c = Ψ·C` that turns the Black-Scholes PDE into
//!   `C_t + rSC_S + ½σ²S²C_SS − αC = 0` with `α = r − Ψ(1−r)`.
//! * Bermudan put: `exp(δ(e^{r(T̂−t)} − 1)(1−r)T)` with `T̂` the first exercise
//!   date. The formula is taken literally: the base put uses horizon `T` and the
//!   tail of the exponent uses `T`, not `T − t`. The two readings coincide at
//!   `t = 0`.
//! * Stochastic-volatility call: Black-Scholes with the volatility component
//!   `β` in place of `σ`; the factor is 1.

use serde::Serialize;

use crate::error::{ensure_finite, PricingError, Result};
use crate::numerics::{cdf, d_terms, intrinsic, pdf};
use crate::types::{ExerciseStyle, MarketState, OptionContract, OptionKind, Volatility};

/// Consumption premium constant Ψ for American prices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConsumptionParams {
    pub psi: f64,
}

impl ConsumptionParams {
    pub fn new(psi: f64) -> Result<Self> {
        ensure_finite("psi", psi)?;
        Ok(Self { psi })
    }

    /// Effective discount rate `α = r − Ψ(1−r)`.
    pub fn alpha(&self, rate: f64) -> f64 {
        rate - self.psi * (1.0 - rate)
    }

    /// `exp(Ψ(1−r)τ)`.
    pub fn premium_factor(&self, rate: f64, tau: f64) -> f64 {
        (self.psi * (1.0 - rate) * tau).exp()
    }

    /// Consumption implied by an option value, `c = Ψ·C`.
    pub fn consumption(&self, price: f64) -> f64 {
        self.psi * price
    }
}

/// Bermudan premium constant δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BermudanParams {
    pub delta: f64,
}

impl BermudanParams {
    pub fn new(delta: f64) -> Result<Self> {
        ensure_finite("delta", delta)?;
        Ok(Self { delta })
    }

    /// `exp(δ(e^{r(T̂−t)} − 1)(1−r)T)`.
    pub fn premium_factor(&self, rate: f64, now: f64, first_exercise: f64, maturity: f64) -> f64 {
        (self.delta * ((rate * (first_exercise - now)).exp() - 1.0) * (1.0 - rate) * maturity).exp()
    }
}

/// Zero-mean distribution of the jump multiplier ω.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "dist")]
pub enum OmegaSpec {
    /// ±1 with equal probability.
    #[default]
    Rademacher,
    /// Uniform on `[-half_width, half_width]`.
    Uniform { half_width: f64 },
}

/// Parameters of the asset dynamics
/// `dS = S(μ du + β dW) + dS·λ·ω·√dB`.
///
/// Only `beta` enters the closed-form call; `mu`, `lambda` and `omega` drive
/// the path simulator in [`crate::oracles`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StochVolParams {
    beta: f64,
    mu: f64,
    lambda: f64,
    omega: OmegaSpec,
}

impl StochVolParams {
    pub fn new(beta: f64, mu: f64, lambda: f64, omega: OmegaSpec) -> Result<Self> {
        ensure_finite("beta", beta)?;
        ensure_finite("mu", mu)?;
        ensure_finite("lambda", lambda)?;
        if beta <= 0.0 {
            return Err(PricingError::Parameter(format!("beta must be positive, got {beta}")));
        }
        if let OmegaSpec::Uniform { half_width } = omega {
            if !(half_width.is_finite() && half_width > 0.0) {
                return Err(PricingError::Parameter(format!(
                    "uniform omega needs a positive half width, got {half_width}"
                )));
            }
        }
        Ok(Self { beta, mu, lambda, omega })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn omega(&self) -> OmegaSpec {
        self.omega
    }
}

/// Which closed form produced a price. Serialized with the identifiers the
/// CLI reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Formula {
    #[serde(rename = "bs")]
    BlackScholes,
    #[serde(rename = "eq3")]
    AmericanCall,
    #[serde(rename = "eq4")]
    AmericanPut,
    #[serde(rename = "eq5")]
    BermudanPut,
    #[serde(rename = "eq7")]
    StochVolCall,
}

impl Formula {
    pub fn id(&self) -> &'static str {
        match self {
            Formula::BlackScholes => "bs",
            Formula::AmericanCall => "eq3",
            Formula::AmericanPut => "eq4",
            Formula::BermudanPut => "eq5",
            Formula::StochVolCall => "eq7",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PriceResult {
    pub price: f64,
    pub premium_factor: f64,
    pub base_price: f64,
    pub formula: Formula,
}

impl PriceResult {
    fn new(formula: Formula, premium_factor: f64, base_price: f64) -> Self {
        Self { price: premium_factor * base_price, premium_factor, base_price, formula }
    }
}

/// Black-Scholes value with explicit limit branches: payoff at `τ = 0`,
/// discounted forward intrinsic at `σ = 0`.
pub(crate) fn european_value(kind: OptionKind, spot: f64, strike: f64, rate: f64, sigma: f64, tau: f64) -> f64 {
    if tau == 0.0 {
        return intrinsic(kind, spot, strike);
    }
    let df = (-rate * tau).exp();
    if sigma == 0.0 {
        return intrinsic(kind, spot, strike * df);
    }
    let (d1, d2) = d_terms(spot, strike, rate, sigma, tau);
    match kind {
        OptionKind::Call => spot * cdf(d1) - strike * df * cdf(d2),
        OptionKind::Put => strike * df * cdf(-d2) - spot * cdf(-d1),
    }
}

/// Black-Scholes sensitivities; `theta` is the derivative in calendar time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sensitivities {
    pub value: f64,
    pub delta: f64,
    pub gamma: f64,
    pub theta: f64,
}

pub fn european_sensitivities(
    kind: OptionKind,
    spot: f64,
    strike: f64,
    rate: f64,
    sigma: f64,
    tau: f64,
) -> Result<Sensitivities> {
    let (d1, d2) = crate::numerics::d1_d2(spot, strike, rate, sigma, tau)?;
    let df = (-rate * tau).exp();
    let sqrt_tau = tau.sqrt();
    let gamma = pdf(d1) / (spot * sigma * sqrt_tau);
    let decay = -spot * pdf(d1) * sigma / (2.0 * sqrt_tau);
    let (value, delta, theta) = match kind {
        OptionKind::Call => (spot * cdf(d1) - strike * df * cdf(d2), cdf(d1), decay - rate * strike * df * cdf(d2)),
        OptionKind::Put => {
            (strike * df * cdf(-d2) - spot * cdf(-d1), cdf(d1) - 1.0, decay + rate * strike * df * cdf(-d2))
        }
    };
    Ok(Sensitivities { value, delta, gamma, theta })
}

/// Sensitivities of `exp(Ψ(1−r)τ)·V_BS`.
pub fn american_sensitivities(
    kind: OptionKind,
    spot: f64,
    strike: f64,
    rate: f64,
    sigma: f64,
    tau: f64,
    params: &ConsumptionParams,
) -> Result<Sensitivities> {
    let base = european_sensitivities(kind, spot, strike, rate, sigma, tau)?;
    let factor = params.premium_factor(rate, tau);
    let growth = params.psi * (1.0 - rate);
    Ok(Sensitivities {
        value: factor * base.value,
        delta: factor * base.delta,
        gamma: factor * base.gamma,
        theta: factor * (base.theta - growth * base.value),
    })
}

fn require_kind(contract: &OptionContract, kind: OptionKind, pricer: &str) -> Result<()> {
    if contract.kind() != kind {
        return Err(PricingError::Contract(format!("{pricer} prices {kind:?} options, got a {:?}", contract.kind())));
    }
    Ok(())
}

fn base(market: &MarketState, contract: &OptionContract, sigma: f64, tau: f64) -> f64 {
    european_value(contract.kind(), market.spot(), contract.strike(), market.rate(), sigma, tau)
}

/// Black-Scholes price of a European call (style is ignored: the equivalent
/// European contract is priced).
pub fn bs_call(market: &MarketState, contract: &OptionContract, vol: Volatility) -> Result<PriceResult> {
    require_kind(contract, OptionKind::Call, "bs_call")?;
    let tau = market.time_to_maturity(contract)?;
    Ok(PriceResult::new(Formula::BlackScholes, 1.0, base(market, contract, vol.sigma(), tau)))
}

pub fn bs_put(market: &MarketState, contract: &OptionContract, vol: Volatility) -> Result<PriceResult> {
    require_kind(contract, OptionKind::Put, "bs_put")?;
    let tau = market.time_to_maturity(contract)?;
    Ok(PriceResult::new(Formula::BlackScholes, 1.0, base(market, contract, vol.sigma(), tau)))
}

/// Black-Scholes price for either kind.
pub fn bs_price(market: &MarketState, contract: &OptionContract, vol: Volatility) -> Result<PriceResult> {
    match contract.kind() {
        OptionKind::Call => bs_call(market, contract, vol),
        OptionKind::Put => bs_put(market, contract, vol),
    }
}

fn american(
    market: &MarketState,
    contract: &OptionContract,
    vol: Volatility,
    params: &ConsumptionParams,
    kind: OptionKind,
    formula: Formula,
) -> Result<PriceResult> {
    let name = if kind == OptionKind::Call { "american_call" } else { "american_put" };
    require_kind(contract, kind, name)?;
    if contract.style() != ExerciseStyle::American {
        return Err(PricingError::Contract(format!("{name} needs an American contract")));
    }
    let tau = market.time_to_maturity(contract)?;
    let factor = params.premium_factor(market.rate(), tau);
    Ok(PriceResult::new(formula, factor, base(market, contract, vol.sigma(), tau)))
}

/// American call: `exp(Ψ(1−r)(T−t))·C_BS`.
pub fn american_call(
    market: &MarketState,
    contract: &OptionContract,
    vol: Volatility,
    params: &ConsumptionParams,
) -> Result<PriceResult> {
    american(market, contract, vol, params, OptionKind::Call, Formula::AmericanCall)
}

/// American put: `exp(Ψ(1−r)(T−t))·P_BS`.
pub fn american_put(
    market: &MarketState,
    contract: &OptionContract,
    vol: Volatility,
    params: &ConsumptionParams,
) -> Result<PriceResult> {
    american(market, contract, vol, params, OptionKind::Put, Formula::AmericanPut)
}

/// Bermudan put: `exp(δ(e^{r(T̂−t)} − 1)(1−r)T)·P_BS(horizon T)`.
pub fn bermudan_put(
    market: &MarketState,
    contract: &OptionContract,
    vol: Volatility,
    params: &BermudanParams,
) -> Result<PriceResult> {
    require_kind(contract, OptionKind::Put, "bermudan_put")?;
    let ExerciseStyle::Bermudan { first_exercise } = contract.style() else {
        return Err(PricingError::Contract("bermudan_put needs a Bermudan contract".into()));
    };
    market.time_to_maturity(contract)?;
    let now = market.now();
    let maturity = contract.maturity();
    if first_exercise < now || first_exercise > maturity {
        return Err(PricingError::Parameter(format!(
            "first exercise date {first_exercise} outside [{now}, {maturity}]"
        )));
    }
    let factor = params.premium_factor(market.rate(), now, first_exercise, maturity);
    Ok(PriceResult::new(Formula::BermudanPut, factor, base(market, contract, vol.sigma(), maturity)))
}

/// Call price under the stochastic-volatility dynamics: Black-Scholes with
/// `β` as the volatility input.
pub fn stochvol_call(market: &MarketState, contract: &OptionContract, params: &StochVolParams) -> Result<PriceResult> {
    require_kind(contract, OptionKind::Call, "stochvol_call")?;
    let tau = market.time_to_maturity(contract)?;
    Ok(PriceResult::new(Formula::StochVolCall, 1.0, base(market, contract, params.beta(), tau)))
}
