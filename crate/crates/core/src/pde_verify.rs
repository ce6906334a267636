//! Residual checks for candidate pricing functions.
//!
//! Two forms of the pricing PDE are supported:
//!
//! * discount form: `C_t + rSC_S + ½σ²S²C_SS − αC`
//! * consumption form: `C_t + r(SC_S − C) + ½σ²S²C_SS + (1−r)c` with a
//!   consumption rule `c(C)`.
//!
//! With `c = Ψ·C` the two agree when `α = r − Ψ(1−r)`. Partial derivatives come
//! from the candidate when it provides them, otherwise from central
//! differences.

use rayon::prelude::*;
use serde::Serialize;

use crate::closed_form::{american_sensitivities, european_sensitivities, european_value, ConsumptionParams};
use crate::error::{ensure_finite, PricingError, Result};
use crate::numerics::intrinsic;
use crate::types::OptionKind;

/// Value and first/second partials at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Partials {
    pub value: f64,
    /// ∂C/∂t
    pub dt: f64,
    /// ∂C/∂S
    pub ds: f64,
    /// ∂²C/∂S²
    pub dss: f64,
}

/// A candidate price surface `C(t, S)`.
pub trait PriceSurface: Sync {
    /// Terminal time; residuals are only evaluated strictly before it.
    fn maturity(&self) -> f64;

    fn value(&self, t: f64, s: f64) -> f64;

    /// Analytic partials, if the surface has them.
    fn partials(&self, _t: f64, _s: f64) -> Option<Partials> {
        None
    }
}

/// Central-difference step sizes: `h_S = rel_s·S`, `h_t = abs_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdSteps {
    pub rel_s: f64,
    pub abs_t: f64,
}

impl Default for FdSteps {
    fn default() -> Self {
        Self { rel_s: 1e-4, abs_t: 1e-6 }
    }
}

impl FdSteps {
    pub fn scaled(&self, factor: f64) -> Self {
        Self { rel_s: self.rel_s * factor, abs_t: self.abs_t * factor }
    }
}

/// How to obtain partials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Differentiation {
    /// Use the surface's analytic partials, falling back to differences.
    PreferAnalytic(FdSteps),
    /// Always use central differences.
    FiniteDifference(FdSteps),
}

impl Default for Differentiation {
    fn default() -> Self {
        Differentiation::PreferAnalytic(FdSteps::default())
    }
}

/// Coefficients of the pricing PDE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PdeCoefficients {
    pub rate: f64,
    pub sigma: f64,
    pub alpha: f64,
    pub psi: Option<f64>,
}

impl PdeCoefficients {
    /// Discount form with an explicit α.
    pub fn with_alpha(rate: f64, sigma: f64, alpha: f64) -> Self {
        Self { rate, sigma, alpha, psi: None }
    }

    /// Consumption constant Ψ; α is derived as `r − Ψ(1−r)`.
    pub fn with_psi(rate: f64, sigma: f64, psi: f64) -> Self {
        Self { rate, sigma, alpha: ConsumptionParams { psi }.alpha(rate), psi: Some(psi) }
    }

    /// Plain Black-Scholes, `α = r`.
    pub fn black_scholes(rate: f64, sigma: f64) -> Self {
        Self { rate, sigma, alpha: rate, psi: Some(0.0) }
    }

    /// The default consumption rule `c = Ψ·C`; zero consumption when Ψ is unset.
    pub fn proportional_consumption(&self) -> impl Fn(f64) -> f64 {
        let psi = self.psi.unwrap_or(0.0);
        move |c| psi * c
    }
}

fn check_point(surface: &dyn PriceSurface, t: f64, s: f64) -> Result<()> {
    ensure_finite("t", t)?;
    ensure_finite("S", s)?;
    if s <= 0.0 {
        return Err(PricingError::Domain(format!("S must be positive, got {s}")));
    }
    if t >= surface.maturity() {
        return Err(PricingError::Boundary(format!(
            "residual requested at t = {t}, maturity is {}",
            surface.maturity()
        )));
    }
    Ok(())
}

/// Partials of `surface` at `(t, s)` according to `diff`.
pub fn partials_at(surface: &dyn PriceSurface, t: f64, s: f64, diff: Differentiation) -> Result<Partials> {
    check_point(surface, t, s)?;
    let steps = match diff {
        Differentiation::PreferAnalytic(steps) => {
            if let Some(p) = surface.partials(t, s) {
                return Ok(p);
            }
            steps
        }
        Differentiation::FiniteDifference(steps) => steps,
    };
    let hs = steps.rel_s * s;
    let ht = steps.abs_t;
    if t + ht >= surface.maturity() {
        return Err(PricingError::Boundary(format!("time step {ht} at t = {t} reaches maturity")));
    }
    let c = surface.value(t, s);
    let up = surface.value(t, s + hs);
    let dn = surface.value(t, s - hs);
    Ok(Partials {
        value: c,
        dt: (surface.value(t + ht, s) - surface.value(t - ht, s)) / (2.0 * ht),
        ds: (up - dn) / (2.0 * hs),
        dss: (up - 2.0 * c + dn) / (hs * hs),
    })
}

/// Discount-form residual `C_t + rSC_S + ½σ²S²C_SS − αC` at `(t, s)`.
pub fn pde_residual_discount(
    surface: &dyn PriceSurface,
    coeffs: &PdeCoefficients,
    t: f64,
    s: f64,
    diff: Differentiation,
) -> Result<f64> {
    let p = partials_at(surface, t, s, diff)?;
    Ok(discount_form(&p, coeffs, s))
}

fn discount_form(p: &Partials, k: &PdeCoefficients, s: f64) -> f64 {
    p.dt + k.rate * s * p.ds + 0.5 * k.sigma * k.sigma * s * s * p.dss - k.alpha * p.value
}

/// Consumption-form residual `C_t + r(SC_S − C) + ½σ²S²C_SS + (1−r)c(C)`.
pub fn pde_residual_consumption(
    surface: &dyn PriceSurface,
    coeffs: &PdeCoefficients,
    consumption: impl Fn(f64) -> f64,
    t: f64,
    s: f64,
    diff: Differentiation,
) -> Result<f64> {
    let p = partials_at(surface, t, s, diff)?;
    let r = coeffs.rate;
    Ok(p.dt
        + r * (s * p.ds - p.value)
        + 0.5 * coeffs.sigma * coeffs.sigma * s * s * p.dss
        + (1.0 - r) * consumption(p.value))
}

/// Uniform `(t, S)` grid; both endpoints included on each axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub s_min: f64,
    pub s_max: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub n_s: usize,
    pub n_t: usize,
}

impl GridSpec {
    pub fn new(s_min: f64, s_max: f64, t_min: f64, t_max: f64, n_s: usize, n_t: usize) -> Result<Self> {
        for (name, v) in [("s_min", s_min), ("s_max", s_max), ("t_min", t_min), ("t_max", t_max)] {
            ensure_finite(name, v)?;
        }
        if n_s < 2 || n_t < 2 {
            return Err(PricingError::Config(format!("grid needs at least 2 points per axis, got {n_s}×{n_t}")));
        }
        if s_min <= 0.0 {
            return Err(PricingError::Config(format!("s_min must be positive, got {s_min}")));
        }
        if s_max <= s_min || t_max <= t_min {
            return Err(PricingError::Config("grid bounds must be increasing".into()));
        }
        Ok(Self { s_min, s_max, t_min, t_max, n_s, n_t })
    }

    pub fn len(&self) -> usize {
        self.n_s * self.n_t
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node `i` in time-major order.
    pub fn node(&self, i: usize) -> (f64, f64) {
        let (it, is) = (i / self.n_s, i % self.n_s);
        let t = self.t_min + (self.t_max - self.t_min) * it as f64 / (self.n_t - 1) as f64;
        let s = self.s_min + (self.s_max - self.s_min) * is as f64 / (self.n_s - 1) as f64;
        (t, s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualNode {
    pub t: f64,
    pub s: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub nodes: Vec<ResidualNode>,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub argmax: ResidualNode,
}

/// Discount-form residual at every grid node.
///
/// Nodes are evaluated in parallel; the report is assembled in node order so
/// it is identical for any thread count.
pub fn residual_scan(
    surface: &dyn PriceSurface,
    coeffs: &PdeCoefficients,
    grid: &GridSpec,
    diff: Differentiation,
) -> Result<ResidualReport> {
    if grid.t_max >= surface.maturity() {
        return Err(PricingError::Boundary(format!(
            "grid reaches t = {}, maturity is {}",
            grid.t_max,
            surface.maturity()
        )));
    }
    let nodes = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let (t, s) = grid.node(i);
            pde_residual_discount(surface, coeffs, t, s, diff).map(|residual| ResidualNode { t, s, residual })
        })
        .collect::<Result<Vec<_>>>()?;
    let abs: Vec<f64> = nodes.iter().map(|n| n.residual.abs()).collect();
    let mut argmax = nodes[0];
    for n in &nodes {
        if n.residual.abs() > argmax.residual.abs() || n.residual.is_nan() {
            argmax = *n;
        }
    }
    Ok(ResidualReport {
        max_abs: argmax.residual.abs(),
        mean_abs: crate::stats::compensated_sum(&abs) / abs.len() as f64,
        argmax,
        nodes,
    })
}

/// Black-Scholes price surface, optionally scaled by the consumption premium
/// `exp(Ψ(1−r)(T−t))`. Supplies analytic partials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormSurface {
    pub kind: OptionKind,
    pub strike: f64,
    pub rate: f64,
    pub sigma: f64,
    pub maturity: f64,
    pub premium: ConsumptionParams,
}

impl ClosedFormSurface {
    pub fn black_scholes(kind: OptionKind, strike: f64, rate: f64, sigma: f64, maturity: f64) -> Self {
        Self { kind, strike, rate, sigma, maturity, premium: ConsumptionParams { psi: 0.0 } }
    }

    pub fn american(
        kind: OptionKind,
        strike: f64,
        rate: f64,
        sigma: f64,
        maturity: f64,
        premium: ConsumptionParams,
    ) -> Self {
        Self { kind, strike, rate, sigma, maturity, premium }
    }
}

impl PriceSurface for ClosedFormSurface {
    fn maturity(&self) -> f64 {
        self.maturity
    }

    fn value(&self, t: f64, s: f64) -> f64 {
        let tau = (self.maturity - t).max(0.0);
        self.premium.premium_factor(self.rate, tau)
            * european_value(self.kind, s, self.strike, self.rate, self.sigma, tau)
    }

    fn partials(&self, t: f64, s: f64) -> Option<Partials> {
        let tau = self.maturity - t;
        let g = if self.premium.psi == 0.0 {
            european_sensitivities(self.kind, s, self.strike, self.rate, self.sigma, tau)
        } else {
            american_sensitivities(self.kind, s, self.strike, self.rate, self.sigma, tau, &self.premium)
        }
        .ok()?;
        Some(Partials { value: g.value, dt: g.theta, ds: g.delta, dss: g.gamma })
    }
}

/// The exercise value held constant in time. Not a solution; used to check
/// that the residual check rejects non-solutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffSurface {
    pub kind: OptionKind,
    pub strike: f64,
    pub maturity: f64,
}

impl PriceSurface for PayoffSurface {
    fn maturity(&self) -> f64 {
        self.maturity
    }

    fn value(&self, _t: f64, s: f64) -> f64 {
        intrinsic(self.kind, s, self.strike)
    }
}

/// Surface from closures, for ad-hoc candidates.
pub struct FnSurface<V, P = fn(f64, f64) -> Partials> {
    maturity: f64,
    value: V,
    partials: Option<P>,
}

impl<V: Fn(f64, f64) -> f64 + Sync> FnSurface<V> {
    pub fn new(maturity: f64, value: V) -> Self {
        Self { maturity, value, partials: None }
    }
}

impl<V, P> FnSurface<V, P>
where
    V: Fn(f64, f64) -> f64 + Sync,
    P: Fn(f64, f64) -> Partials + Sync,
{
    pub fn with_partials(maturity: f64, value: V, partials: P) -> Self {
        Self { maturity, value, partials: Some(partials) }
    }
}

impl<V, P> PriceSurface for FnSurface<V, P>
where
    V: Fn(f64, f64) -> f64 + Sync,
    P: Fn(f64, f64) -> Partials + Sync,
{
    fn maturity(&self) -> f64 {
        self.maturity
    }

    fn value(&self, t: f64, s: f64) -> f64 {
        (self.value)(t, s)
    }

    fn partials(&self, t: f64, s: f64) -> Option<Partials> {
        self.partials.as_ref().map(|p| p(t, s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const FD: Differentiation = Differentiation::FiniteDifference(FdSteps { rel_s: 1e-4, abs_t: 1e-6 });
    const AN: Differentiation = Differentiation::PreferAnalytic(FdSteps { rel_s: 1e-4, abs_t: 1e-6 });

    fn american_call_surface() -> ClosedFormSurface {
        ClosedFormSurface::american(OptionKind::Call, 100.0, 0.05, 0.2, 1.0, ConsumptionParams { psi: 0.1 })
    }

    #[test]
    fn closed_form_solves_discount_form() {
        let k = PdeCoefficients::with_psi(0.05, 0.2, 0.1);
        let fd = pde_residual_discount(&american_call_surface(), &k, 0.5, 100.0, FD).unwrap();
        let an = pde_residual_discount(&american_call_surface(), &k, 0.5, 100.0, AN).unwrap();
        assert!(fd.abs() <= 1e-6, "fd residual {fd:e}");
        assert!(an.abs() <= 1e-10, "analytic residual {an:e}");
    }

    #[test]
    fn linear_surface_is_annihilated_when_alpha_is_rate() {
        let f = FnSurface::with_partials(1.0, |_, s| s, |_, s| Partials { value: s, dt: 0.0, ds: 1.0, dss: 0.0 });
        let k = PdeCoefficients::with_alpha(0.05, 0.2, 0.05);
        for s in [0.5, 1.0, 37.0, 1e3] {
            assert_eq!(pde_residual_discount(&f, &k, 0.3, s, AN).unwrap(), 0.0);
        }
    }

    #[test]
    fn quadratic_surface_residual() {
        let f = FnSurface::with_partials(
            1.0,
            |_, s| s * s,
            |_, s| Partials { value: s * s, dt: 0.0, ds: 2.0 * s, dss: 2.0 },
        );
        let k = PdeCoefficients::with_alpha(0.05, 0.2, 0.05);
        let r = pde_residual_discount(&f, &k, 0.0, 1.0, AN).unwrap();
        assert!((r - 0.09).abs() < 1e-15);
        let fd_only = FnSurface::new(1.0, |_, s: f64| s * s);
        let r = pde_residual_discount(&fd_only, &k, 0.0, 1.0, AN).unwrap();
        assert!((r - 0.09).abs() < 1e-7);
    }

    #[test]
    fn boundary_errors() {
        let k = PdeCoefficients::with_psi(0.05, 0.2, 0.1);
        assert!(matches!(
            pde_residual_discount(&american_call_surface(), &k, 1.0, 100.0, AN),
            Err(PricingError::Boundary(_))
        ));
        assert!(matches!(
            pde_residual_discount(&american_call_surface(), &k, 1.5, 100.0, FD),
            Err(PricingError::Boundary(_))
        ));
        assert!(pde_residual_discount(&american_call_surface(), &k, 0.5, 0.0, AN).is_err());
    }

    #[test]
    fn consumption_form_matches_discount_form() {
        let k = PdeCoefficients::with_psi(0.05, 0.2, 0.1);
        let f = american_call_surface();
        for &(t, s) in &[(0.0, 60.0), (0.3, 100.0), (0.8, 140.0)] {
            let a = pde_residual_consumption(&f, &k, k.proportional_consumption(), t, s, FD).unwrap();
            let b = pde_residual_discount(&f, &k, t, s, FD).unwrap();
            assert!((a - b).abs() <= 1e-12);
        }
        let bs_coeffs = PdeCoefficients::with_alpha(0.05, 0.2, 0.05);
        let a = pde_residual_consumption(&f, &k, |_| 0.0, 0.3, 90.0, AN).unwrap();
        let b = pde_residual_discount(&f, &bs_coeffs, 0.3, 90.0, AN).unwrap();
        assert!((a - b).abs() <= 1e-12);
        let sol = pde_residual_consumption(&f, &k, k.proportional_consumption(), 0.5, 100.0, AN).unwrap();
        assert!(sol.abs() < 1e-10);
    }

    #[test]
    fn scan_counts_and_rejects() {
        let k = PdeCoefficients::with_psi(0.05, 0.2, 0.1);
        let g = GridSpec::new(50.0, 150.0, 0.0, 0.9, 2, 2).unwrap();
        let r = residual_scan(&american_call_surface(), &k, &g, AN).unwrap();
        assert_eq!(r.nodes.len(), 4);
        assert!(r.max_abs >= r.mean_abs && r.mean_abs >= 0.0);

        let payoff = PayoffSurface { kind: OptionKind::Call, strike: 100.0, maturity: 1.0 };
        let g = GridSpec::new(50.0, 150.0, 0.0, 0.9, 11, 5).unwrap();
        assert!(residual_scan(&payoff, &k, &g, AN).unwrap().max_abs > 1e-3);

        assert!(GridSpec::new(50.0, 150.0, 0.0, 0.9, 1, 5).is_err());
        assert!(GridSpec::new(0.0, 150.0, 0.0, 0.9, 3, 5).is_err());
        let too_late = GridSpec::new(50.0, 150.0, 0.0, 1.0, 3, 3).unwrap();
        assert!(matches!(residual_scan(&american_call_surface(), &k, &too_late, AN), Err(PricingError::Boundary(_))));
    }

    #[test]
    fn scan_is_deterministic() {
        let k = PdeCoefficients::with_psi(0.05, 0.2, 0.1);
        let g = GridSpec::new(50.0, 150.0, 0.0, 0.9, 21, 10).unwrap();
        let a = residual_scan(&american_call_surface(), &k, &g, FD).unwrap();
        let b = residual_scan(&american_call_surface(), &k, &g, FD).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fd_error_shrinks_quadratically() {
        // Coarse steps so truncation, not rounding, dominates.
        let k = PdeCoefficients::with_psi(0.05, 0.2, 0.1);
        let f = american_call_surface();
        let coarse = FdSteps { rel_s: 2e-2, abs_t: 2e-2 };
        let e1 = pde_residual_discount(&f, &k, 0.5, 100.0, Differentiation::FiniteDifference(coarse)).unwrap().abs();
        let e2 = pde_residual_discount(&f, &k, 0.5, 100.0, Differentiation::FiniteDifference(coarse.scaled(0.1)))
            .unwrap()
            .abs();
        let ratio = e1 / e2;
        assert!((50.0..200.0).contains(&ratio), "ratio {ratio}, e1 {e1:e}, e2 {e2:e}");
    }

    proptest! {
        #[test]
        fn forms_agree_on_random_inputs(t in 0.0f64..0.9, s in 20.0f64..200.0, r in 0.0f64..0.15,
                                        sigma in 0.05f64..0.6, psi in -0.3f64..0.3) {
            let k = PdeCoefficients::with_psi(r, sigma, psi);
            let f = ClosedFormSurface::american(OptionKind::Put, 100.0, r, sigma, 1.0, ConsumptionParams { psi });
            let a = pde_residual_consumption(&f, &k, k.proportional_consumption(), t, s, AN).unwrap();
            let b = pde_residual_discount(&f, &k, t, s, AN).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
        }

        #[test]
        fn operator_is_linear(t in 0.0f64..0.9, s in 50.0f64..150.0, a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let k = PdeCoefficients::with_psi(0.05, 0.2, 0.1);
            let f = american_call_surface();
            let g = ClosedFormSurface::black_scholes(OptionKind::Put, 90.0, 0.05, 0.2, 1.0);
            let combo = FnSurface::with_partials(1.0, |t, s| a * f.value(t, s) + b * g.value(t, s), |t, s| {
                let (p, q) = (f.partials(t, s).unwrap(), g.partials(t, s).unwrap());
                Partials { value: a * p.value + b * q.value, dt: a * p.dt + b * q.dt, ds: a * p.ds + b * q.ds, dss: a * p.dss + b * q.dss }
            });
            let lhs = pde_residual_discount(&combo, &k, t, s, AN).unwrap();
            let rhs = a * pde_residual_discount(&f, &k, t, s, AN).unwrap() + b * pde_residual_discount(&g, &k, t, s, AN).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10);
        }
    }
}
