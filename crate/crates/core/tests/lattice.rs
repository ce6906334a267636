use optprice_core::oracles::{crr_price, TreeConfig};
use optprice_core::{bs_call, bs_put, MarketState, OptionContract, OptionKind, Volatility};
use proptest::prelude::*;

fn setup() -> (MarketState, OptionContract, Volatility) {
    (
        MarketState::new(100.0, 0.05, 0.0).unwrap(),
        OptionContract::european(OptionKind::Call, 100.0, 1.0).unwrap(),
        Volatility::new(0.2).unwrap(),
    )
}

#[test]
fn crr_converges_to_black_scholes() {
    let (m, c, v) = setup();
    let bs = bs_call(&m, &c, v).unwrap().price;
    let err = |n| (crr_price(&m, &c, v, TreeConfig { n_steps: n }).unwrap() - bs).abs();
    assert!(err(10_000) <= 1e-3);
    let errs: Vec<f64> = [100, 200, 400, 800].iter().map(|&n| err(n)).collect();
    for w in errs.windows(2) {
        let ratio = w[1] / w[0];
        assert!((0.3..=0.7).contains(&ratio), "{errs:?}");
    }
}

#[test]
fn valuation_time_shortens_the_tree() {
    let (_, c, v) = setup();
    let later = MarketState::new(100.0, 0.05, 0.5).unwrap();
    let tree = crr_price(&later, &c, v, TreeConfig { n_steps: 5000 }).unwrap();
    let bs = bs_call(&later, &c, v).unwrap().price;
    assert!((tree - bs).abs() < 2e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn american_put_dominates_european(s in 50.0f64..150.0, k in 50.0f64..150.0, r in 0.0f64..0.1,
                                       sigma in 0.1f64..0.5, t in 0.1f64..2.0) {
        let m = MarketState::new(s, r, 0.0).unwrap();
        let v = Volatility::new(sigma).unwrap();
        let tree = TreeConfig { n_steps: 200 };
        let e = crr_price(&m, &OptionContract::european(OptionKind::Put, k, t).unwrap(), v, tree).unwrap();
        let a = crr_price(&m, &OptionContract::american(OptionKind::Put, k, t).unwrap(), v, tree).unwrap();
        prop_assert!(a >= e && e >= 0.0);
        let bs = bs_put(&m, &OptionContract::european(OptionKind::Put, k, t).unwrap(), v).unwrap().price;
        prop_assert!((e - bs).abs() < 0.1);
    }
}
