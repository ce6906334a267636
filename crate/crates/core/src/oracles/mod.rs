//! Reference pricers used to cross-check the closed forms.

mod compare;
mod monte_carlo;
mod tree;

pub use compare::{compare, ComparisonReport, OracleValue, PricingInputs, TolerancePolicy, Verdict};
pub use monte_carlo::{
    mc_gbm_euler_price, mc_gbm_price, mc_perturbed_price, simulate_gbm_euler_path, simulate_perturbed_path, Drift,
    McConfig, McEstimate, PerturbationStats, PerturbedEstimate, PerturbedPath, DENOMINATOR_GUARD,
    REJECTION_WARNING_RATE,
};
pub use tree::{crr_price, TreeConfig};
