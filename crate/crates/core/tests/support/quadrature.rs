//! Test-only reference values by adaptive Gauss-Kronrod quadrature.
//!
//! Nothing here calls into the library under test, so these numbers stay an
//! independent check on the closed forms.
#![allow(dead_code, clippy::excessive_precision)]

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (k, err) = kronrod(f, a, b);
    if err <= tol || depth == 0 {
        return k;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth - 1) + adapt(f, m, b, 0.5 * tol, depth - 1)
}

/// ∫_a^b f with absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    adapt(&f, a, b, tol, 40)
}

pub fn std_normal_density(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Φ(x) as the integral of the density; the tails beyond ±40 are below f64 resolution.
pub fn normal_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        integrate(std_normal_density, -40.0, x, 1e-17)
    } else {
        1.0 - integrate(std_normal_density, -40.0, -x, 1e-17)
    }
}

/// Discounted risk-neutral expectation of the call payoff under a lognormal
/// terminal distribution.
pub fn call_price(spot: f64, strike: f64, rate: f64, sigma: f64, tau: f64) -> f64 {
    let vol = sigma * tau.sqrt();
    let drift = (rate - 0.5 * sigma * sigma) * tau;
    let z_star = ((strike / spot).ln() - drift) / vol;
    let integrand = |z: f64| (spot * (drift + vol * z).exp() - strike) * std_normal_density(z);
    (-rate * tau).exp() * integrate(integrand, z_star, z_star.max(0.0) + 40.0, 1e-13)
}

/// Discounted expectation of the put payoff.
pub fn put_price(spot: f64, strike: f64, rate: f64, sigma: f64, tau: f64) -> f64 {
    let vol = sigma * tau.sqrt();
    let drift = (rate - 0.5 * sigma * sigma) * tau;
    let z_star = ((strike / spot).ln() - drift) / vol;
    let integrand = |z: f64| (strike - spot * (drift + vol * z).exp()) * std_normal_density(z);
    (-rate * tau).exp() * integrate(integrand, z_star.min(0.0) - 40.0, z_star, 1e-13)
}
