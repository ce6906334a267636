use serde::Serialize;

use crate::error::{PricingError, Result};
use crate::numerics::intrinsic;
use crate::types::{ExerciseStyle, MarketState, OptionContract, Volatility};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TreeConfig {
    pub n_steps: usize,
}

impl TreeConfig {
    pub fn new(n_steps: usize) -> Result<Self> {
        if n_steps == 0 {
            return Err(PricingError::Config("tree needs at least one step".into()));
        }
        Ok(Self { n_steps })
    }
}

/// Cox-Ross-Rubinstein lattice price over the remaining life `T − t`.
///
/// American contracts may exercise at every node, Bermudan ones at nodes whose
/// time is at or after the first exercise date, European ones only at
/// maturity.
pub fn crr_price(market: &MarketState, contract: &OptionContract, vol: Volatility, tree: TreeConfig) -> Result<f64> {
    let n = TreeConfig::new(tree.n_steps)?.n_steps;
    let sigma = vol.sigma();
    if sigma <= 0.0 {
        return Err(PricingError::Degenerate("binomial tree needs sigma > 0".into()));
    }
    let tau = market.time_to_maturity(contract)?;
    if tau == 0.0 {
        return Ok(intrinsic(contract.kind(), market.spot(), contract.strike()));
    }
    let dt = tau / n as f64;
    let log_up = sigma * dt.sqrt();
    let up = log_up.exp();
    let down = 1.0 / up;
    let growth = (market.rate() * dt).exp();
    let p = (growth - down) / (up - down);
    if !(p > 0.0 && p < 1.0) {
        return Err(PricingError::Stability(format!("risk-neutral probability {p} outside (0, 1); use more steps")));
    }
    let disc = 1.0 / growth;
    let (pu, pd) = (disc * p, disc * (1.0 - p));

    let kind = contract.kind();
    let strike = contract.strike();
    let spot = market.spot();
    // node (i, j): j up-moves after i steps
    let spot_at = |i: usize, j: usize| spot * ((2.0 * j as f64 - i as f64) * log_up).exp();
    let exercisable = |i: usize| match contract.style() {
        ExerciseStyle::European => false,
        ExerciseStyle::American => true,
        ExerciseStyle::Bermudan { first_exercise } => market.now() + i as f64 * dt >= first_exercise - 1e-12 * tau,
    };

    let mut values: Vec<f64> = (0..=n).map(|j| intrinsic(kind, spot_at(n, j), strike)).collect();
    for i in (0..n).rev() {
        let early = exercisable(i);
        for j in 0..=i {
            let cont = pu * values[j + 1] + pd * values[j];
            values[j] = if early { cont.max(intrinsic(kind, spot_at(i, j), strike)) } else { cont };
        }
    }
    Ok(values[0])
}
