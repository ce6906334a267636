use std::fmt::Write as _;
use std::fs;

use clap::ValueEnum;
use optprice_core::closed_form::{
    american_call, american_put, bermudan_put, bs_price, stochvol_call, BermudanParams, ConsumptionParams, OmegaSpec,
    PriceResult, StochVolParams,
};
use optprice_core::oracles::{
    compare, crr_price, mc_gbm_price, mc_perturbed_price, simulate_perturbed_path, Drift, McConfig, OracleValue,
    PricingInputs, TolerancePolicy, TreeConfig, Verdict,
};
use optprice_core::pde_verify::{
    residual_scan, ClosedFormSurface, Differentiation, FdSteps, GridSpec, PayoffSurface, PdeCoefficients, PriceSurface,
};
use optprice_core::sqrtbm::{increment_stats, partial_sums, scaling_diagnostic, sqrtbm_increments, SqrtBmConfig};
use optprice_core::{ExerciseStyle, MarketState, OptionContract, OptionKind, Volatility};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::error::{usage, CliResult};

/// What a command produced.
pub struct CommandOutput {
    pub body: String,
    /// Secondary JSON document (CSV-mode diagnostics), written separately.
    pub side: Option<String>,
    /// Set when the run completed but a tolerance check failed.
    pub tolerance_failure: Option<String>,
}

impl CommandOutput {
    fn new(body: String) -> Self {
        Self { body, side: None, tolerance_failure: None }
    }
}

#[derive(Serialize)]
struct Envelope<'a, I: Serialize> {
    command: &'a str,
    inputs: &'a I,
    result: Value,
    diagnostics: Value,
}

fn envelope<I: Serialize>(command: &str, inputs: &I, result: Value, diagnostics: Value) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(&Envelope { command, inputs, result, diagnostics })?;
    s.push('\n');
    Ok(s)
}

fn plain(value: &Value) -> String {
    let mut out = String::new();
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let _ = writeln!(out, "{k}: {v}");
            }
        }
        other => {
            let _ = writeln!(out, "{other}");
        }
    }
    out
}

fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

// ── contract / model setup ──────────────────────────────────────────────

#[derive(Debug, Clone, Copy)]
enum Pricer {
    BlackScholes,
    American(ConsumptionParams),
    Bermudan(BermudanParams),
    StochVol(StochVolParams),
}

#[derive(Debug, Clone, Copy)]
struct Setup {
    market: MarketState,
    contract: OptionContract,
    vol: Option<Volatility>,
    pricer: Pricer,
}

impl Setup {
    fn inputs(&self) -> PricingInputs {
        PricingInputs { contract: self.contract, market: self.market }
    }

    fn vol(&self) -> CliResult<Volatility> {
        self.vol.ok_or_else(|| usage("--vol is required for this model/oracle"))
    }

    fn price(&self) -> CliResult<PriceResult> {
        let (m, c) = (&self.market, &self.contract);
        let r = match self.pricer {
            Pricer::BlackScholes => bs_price(m, c, self.vol()?)?,
            Pricer::American(p) => match c.kind() {
                OptionKind::Call => american_call(m, c, self.vol()?, &p)?,
                OptionKind::Put => american_put(m, c, self.vol()?, &p)?,
            },
            Pricer::Bermudan(p) => bermudan_put(m, c, self.vol()?, &p)?,
            Pricer::StochVol(p) => stochvol_call(m, c, &p)?,
        };
        Ok(r)
    }
}

fn require(name: &str, v: Option<f64>, model: &str) -> CliResult<f64> {
    v.ok_or_else(|| usage(format!("--{name} is required for --model {model}")))
}

fn build(market: &MarketArgs, model: &ModelArgs) -> CliResult<Setup> {
    let state = MarketState::new(market.spot, market.rate, market.now)?;
    let kind = |default: Kind| match model.kind.unwrap_or(default) {
        Kind::Call => OptionKind::Call,
        Kind::Put => OptionKind::Put,
    };
    let vol = model.vol.map(Volatility::new).transpose()?;
    let (kind, style, pricer) = match model.model {
        Model::Bs => {
            require("vol", model.vol, "bs")?;
            (kind(Kind::Call), ExerciseStyle::European, Pricer::BlackScholes)
        }
        Model::American => {
            require("vol", model.vol, "american")?;
            let psi = require("psi", model.psi, "american")?;
            (kind(Kind::Call), ExerciseStyle::American, Pricer::American(ConsumptionParams::new(psi)?))
        }
        Model::Bermudan => {
            require("vol", model.vol, "bermudan")?;
            let delta = require("delta", model.delta, "bermudan")?;
            let first_exercise = require("first-exercise", model.first_exercise, "bermudan")?;
            if model.kind == Some(Kind::Call) {
                return Err(usage("--model bermudan prices puts only"));
            }
            (OptionKind::Put, ExerciseStyle::Bermudan { first_exercise }, Pricer::Bermudan(BermudanParams::new(delta)?))
        }
        Model::Stochvol => {
            let beta = require("beta", model.beta, "stochvol")?;
            if model.kind == Some(Kind::Put) {
                return Err(usage("--model stochvol prices calls only"));
            }
            let omega = match model.omega {
                Omega::Rademacher => OmegaSpec::Rademacher,
                Omega::Uniform => OmegaSpec::Uniform { half_width: model.omega_half_width },
            };
            let params = StochVolParams::new(beta, model.mu, model.lambda, omega)?;
            (OptionKind::Call, ExerciseStyle::European, Pricer::StochVol(params))
        }
    };
    let contract = OptionContract::new(market.strike, market.maturity, kind, style)?;
    Ok(Setup { market: state, contract, vol, pricer })
}

// ── price ───────────────────────────────────────────────────────────────

pub fn cmd_price(args: &PriceArgs, format: OutputFormat) -> CliResult<CommandOutput> {
    let setup = build(&args.market, &args.model)?;
    let r = setup.price()?;
    let result = json!({
        "price": r.price,
        "premium_factor": r.premium_factor,
        "base_price": r.base_price,
        "formula": r.formula.id(),
    });
    let body = match format {
        OutputFormat::Json => {
            envelope("price", args, result, json!({ "contract": setup.contract, "market": setup.market }))?
        }
        OutputFormat::Plain => plain(&result),
        OutputFormat::Csv => csv(
            &["formula", "price", "premium_factor", "base_price"],
            [vec![
                r.formula.id().to_string(),
                r.price.to_string(),
                r.premium_factor.to_string(),
                r.base_price.to_string(),
            ]],
        ),
    };
    Ok(CommandOutput::new(body))
}

// ── verify-pde ──────────────────────────────────────────────────────────

pub fn cmd_verify_pde(args: &VerifyPdeArgs, format: OutputFormat) -> CliResult<CommandOutput> {
    let kind = match args.kind {
        Kind::Call => OptionKind::Call,
        Kind::Put => OptionKind::Put,
    };
    if !(args.strike > 0.0 && args.vol > 0.0 && args.maturity > 0.0) {
        return Err(usage("verify-pde needs positive --strike, --vol and --maturity"));
    }
    let grid = GridSpec::new(args.s_min, args.s_max, args.t_min, args.t_max, args.n_s, args.n_t)?;
    if args.t_max >= args.maturity {
        return Err(usage("--t-max must be below --maturity; the terminal row is excluded"));
    }
    let steps = FdSteps { rel_s: args.h_s_rel, abs_t: args.h_t };
    if !(steps.rel_s > 0.0 && steps.abs_t > 0.0) {
        return Err(usage("finite-difference steps must be positive"));
    }
    let diff = match args.partials {
        PartialsMode::Analytic => Differentiation::PreferAnalytic(steps),
        PartialsMode::Fd => Differentiation::FiniteDifference(steps),
    };
    let psi = ConsumptionParams::new(args.psi)?;
    let (surface, coeffs): (Box<dyn PriceSurface>, PdeCoefficients) = match args.candidate {
        Candidate::American => (
            Box::new(ClosedFormSurface::american(kind, args.strike, args.rate, args.vol, args.maturity, psi)),
            PdeCoefficients::with_psi(args.rate, args.vol, args.psi),
        ),
        Candidate::Bs => (
            Box::new(ClosedFormSurface::black_scholes(kind, args.strike, args.rate, args.vol, args.maturity)),
            PdeCoefficients::black_scholes(args.rate, args.vol),
        ),
        Candidate::Payoff => (
            Box::new(PayoffSurface { kind, strike: args.strike, maturity: args.maturity }),
            PdeCoefficients::with_psi(args.rate, args.vol, args.psi),
        ),
    };
    let report = residual_scan(surface.as_ref(), &coeffs, &grid, diff)?;
    let analytic = args.partials == PartialsMode::Analytic && surface.partials(grid.t_min, grid.s_min).is_some();
    let passed = report.max_abs <= args.tolerance;
    let result = json!({
        "max_abs": report.max_abs,
        "mean_abs": report.mean_abs,
        "argmax": report.argmax,
        "n_nodes": report.nodes.len(),
        "passed": passed,
    });
    let diagnostics = json!({
        "tolerance": args.tolerance,
        "partials": if analytic { "analytic" } else { "finite_difference" },
        "fd_steps": steps,
        "alpha": coeffs.alpha,
    });
    let body = match format {
        OutputFormat::Json => envelope("verify-pde", args, result, diagnostics)?,
        OutputFormat::Plain => plain(&result),
        OutputFormat::Csv => csv(
            &["t", "s", "residual"],
            report.nodes.iter().map(|n| vec![n.t.to_string(), n.s.to_string(), n.residual.to_string()]),
        ),
    };
    let mut out = CommandOutput::new(body);
    if !passed {
        out.tolerance_failure = Some(format!("max |residual| {} exceeds {}", report.max_abs, args.tolerance));
    }
    Ok(out)
}

// ── simulate-sqrtbm ─────────────────────────────────────────────────────

pub fn cmd_simulate_sqrtbm(args: &SqrtBmArgs, seed: u64, format: OutputFormat) -> CliResult<CommandOutput> {
    let config = SqrtBmConfig::new(args.dt, args.n_steps, seed)?;
    let sample = sqrtbm_increments(&config)?;
    let stats = increment_stats(&sample, config.dt);
    let scaling = if args.scaling_dt.is_empty() { Vec::new() } else { scaling_diagnostic(&config, &args.scaling_dt)? };
    let path = partial_sums(&sample.values);
    let rows = || {
        path.iter().enumerate().map(|(k, p)| {
            let inc = if k == 0 { 0.0 } else { sample.values[k - 1] };
            (k, k as f64 * config.dt, inc, *p)
        })
    };
    let diagnostics = json!({ "stats": stats, "scaling": scaling, "seed": seed });
    let inputs = json!({ "dt": args.dt, "n_steps": args.n_steps, "seed": seed, "scaling_dt": args.scaling_dt });
    let mut out = match format {
        OutputFormat::Csv => {
            let body = csv(
                &["step", "t", "increment", "partial_sum"],
                rows().map(|(k, t, x, p)| vec![k.to_string(), t.to_string(), x.to_string(), p.to_string()]),
            );
            let mut o = CommandOutput::new(body);
            o.side = Some(envelope("simulate-sqrtbm", &inputs, serde_json::to_value(stats)?, diagnostics)?);
            o
        }
        OutputFormat::Json => {
            let mut result = serde_json::to_value(stats)?;
            if args.include_path {
                let dump: Vec<Value> =
                    rows().map(|(k, t, x, p)| json!({ "step": k, "t": t, "increment": x, "partial_sum": p })).collect();
                result["path"] = Value::Array(dump);
            }
            CommandOutput::new(envelope("simulate-sqrtbm", &inputs, result, diagnostics)?)
        }
        OutputFormat::Plain => CommandOutput::new(plain(&serde_json::to_value(stats)?)),
    };
    if let (Some(path), Some(side)) = (&args.diagnostics_path, out.side.as_ref()) {
        fs::write(path, side)?;
        out.side = None;
    }
    Ok(out)
}

// ── oracle-compare ──────────────────────────────────────────────────────

pub fn cmd_oracle_compare(args: &CompareArgs, seed: u64, format: OutputFormat) -> CliResult<CommandOutput> {
    let setup = build(&args.market, &args.model)?;
    let supported = matches!(
        (args.model.model, args.oracle),
        (Model::Bs, OracleKind::Crr)
            | (Model::Bs, OracleKind::McGbm)
            | (Model::American, OracleKind::Crr)
            | (Model::Bermudan, OracleKind::Crr)
            | (Model::Stochvol, OracleKind::McPerturbed)
    );
    if !supported {
        return Err(usage(format!(
            "--model {} cannot be compared with --oracle {}; supported pairs: bs/crr, bs/mc-gbm, american/crr, bermudan/crr, stochvol/mc-perturbed",
            name(args.model.model),
            name(args.oracle)
        )));
    }
    if args.dump_paths.is_some() && args.oracle != OracleKind::McPerturbed {
        return Err(usage("--dump-paths is only available with --oracle mc-perturbed"));
    }
    let closed = setup.price()?;
    let mc = McConfig { n_paths: args.paths, n_steps: args.steps, seed, antithetic: args.antithetic };
    let (oracle, mut diagnostics) = match args.oracle {
        OracleKind::Crr => {
            let p = crr_price(&setup.market, &setup.contract, setup.vol()?, TreeConfig::new(args.tree_steps)?)?;
            (OracleValue::Point { price: p }, json!({ "tree_steps": args.tree_steps }))
        }
        OracleKind::McGbm => {
            let mc = McConfig { n_steps: 1, ..mc };
            let e = mc_gbm_price(&setup.market, &setup.contract, setup.vol()?, &mc)?;
            (OracleValue::MonteCarlo(e), json!({ "mc": mc }))
        }
        OracleKind::McPerturbed => {
            let Pricer::StochVol(params) = setup.pricer else { unreachable!("pair checked above") };
            let e = mc_perturbed_price(&setup.market, &setup.contract, &params, &mc)?;
            if let Some(path) = &args.dump_paths {
                fs::write(path, perturbed_dump(&setup, &params, &mc, args.dump_count)?)?;
            }
            let d = json!({
                "mc": mc,
                "rejected_steps": e.rejected_steps,
                "total_steps": e.total_steps,
                "rejection_rate": e.rejection_rate,
                "warning": e.warning,
                "perturbation": e.perturbation,
            });
            (OracleValue::MonteCarlo(e.estimate), d)
        }
    };
    let policy =
        match args.policy.unwrap_or(if args.oracle == OracleKind::Crr { PolicyKind::Abs } else { PolicyKind::Se }) {
            PolicyKind::Abs => TolerancePolicy::Absolute(args.tolerance),
            PolicyKind::Se => TolerancePolicy::StdErrors(args.se_multiple),
            PolicyKind::ReportOnly => TolerancePolicy::ReportOnly,
        };
    let inputs = setup.inputs();
    let report = compare(&closed, &inputs, &oracle, &inputs, policy)?;
    diagnostics["closed_form"] = serde_json::to_value(closed)?;
    let result = serde_json::to_value(&report)?;
    let body = match format {
        OutputFormat::Json => envelope("oracle-compare", args, result, diagnostics)?,
        OutputFormat::Plain => plain(&result),
        OutputFormat::Csv => csv(
            &["formula", "closed_form_price", "oracle_price", "abs_diff", "rel_diff", "verdict"],
            [vec![
                report.formula.id().to_string(),
                report.closed_form_price.to_string(),
                report.oracle_price.to_string(),
                report.abs_diff.to_string(),
                report.rel_diff.map(|r| r.to_string()).unwrap_or_default(),
                result["verdict"].as_str().unwrap_or_default().to_string(),
            ]],
        ),
    };
    let mut out = CommandOutput::new(body);
    if report.verdict == Verdict::OutsideTolerance {
        out.tolerance_failure = Some(format!("|closed form − oracle| = {} is outside tolerance", report.abs_diff));
    }
    Ok(out)
}

fn name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

fn perturbed_dump(setup: &Setup, params: &StochVolParams, mc: &McConfig, count: usize) -> CliResult<String> {
    let tau = setup.market.time_to_maturity(&setup.contract)?;
    let dt = tau / mc.n_steps as f64;
    let mut rows = Vec::new();
    for path in 0..count.min(mc.n_samples()) as u64 {
        let p =
            simulate_perturbed_path(&setup.market, tau, params, Drift::RiskNeutral, mc.n_steps, mc.seed, path, false)?;
        for (k, s) in p.values.iter().enumerate() {
            rows.push(vec![
                path.to_string(),
                k.to_string(),
                (setup.market.now() + k as f64 * dt).to_string(),
                s.to_string(),
            ]);
        }
    }
    Ok(csv(&["path", "step", "t", "spot"], rows))
}

// ── sweep ───────────────────────────────────────────────────────────────

pub fn cmd_sweep(args: &SweepArgs, format: OutputFormat) -> CliResult<CommandOutput> {
    if args.points == 0 {
        return Err(usage("--points must be at least 1"));
    }
    if !(args.from.is_finite() && args.to.is_finite()) {
        return Err(usage("--from and --to must be finite"));
    }
    let mut rows = Vec::with_capacity(args.points);
    for i in 0..args.points {
        let x = if args.points == 1 {
            args.from
        } else {
            args.from + (args.to - args.from) * i as f64 / (args.points - 1) as f64
        };
        let (mut market, mut model) = (args.market.clone(), args.model.clone());
        match args.param {
            SweepParam::Spot => market.spot = x,
            SweepParam::Strike => market.strike = x,
            SweepParam::Rate => market.rate = x,
            SweepParam::Maturity => market.maturity = x,
            SweepParam::Now => market.now = x,
            SweepParam::Vol => model.vol = Some(x),
            SweepParam::Psi => model.psi = Some(x),
            SweepParam::Delta => model.delta = Some(x),
            SweepParam::Beta => model.beta = Some(x),
        }
        let r = build(&market, &model)?.price()?;
        rows.push((x, r));
    }
    let name = serde_json::to_value(args.param)?.as_str().unwrap_or("x").to_string();
    let body = match format {
        OutputFormat::Csv => csv(
            &[name.as_str(), "price", "premium_factor", "base_price"],
            rows.iter().map(|(x, r)| {
                vec![x.to_string(), r.price.to_string(), r.premium_factor.to_string(), r.base_price.to_string()]
            }),
        ),
        OutputFormat::Json | OutputFormat::Plain => {
            let result: Vec<Value> = rows
                .iter()
                .map(|(x, r)| json!({ name.as_str(): x, "price": r.price, "premium_factor": r.premium_factor, "base_price": r.base_price }))
                .collect();
            if format == OutputFormat::Json {
                let formula = rows.first().map(|(_, r)| r.formula.id());
                envelope("sweep", args, Value::Array(result), json!({ "formula": formula, "points": args.points }))?
            } else {
                result.iter().map(|v| v.to_string() + "\n").collect()
            }
        }
    };
    Ok(CommandOutput::new(body))
}

pub fn run(cli: &Cli) -> CliResult<CommandOutput> {
    let default = match cli.command {
        Command::SimulateSqrtbm(_) | Command::Sweep(_) => OutputFormat::Csv,
        _ => OutputFormat::Json,
    };
    let format = cli.output.unwrap_or(default);
    match &cli.command {
        Command::Price(a) => cmd_price(a, format),
        Command::VerifyPde(a) => cmd_verify_pde(a, format),
        Command::SimulateSqrtbm(a) => cmd_simulate_sqrtbm(a, cli.seed, format),
        Command::OracleCompare(a) => cmd_oracle_compare(a, cli.seed, format),
        Command::Sweep(a) => cmd_sweep(a, format),
    }
}
