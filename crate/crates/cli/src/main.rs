//! `optprice`: closed-form option prices and the checks behind them.
//!
//! ```bash
//! optprice price --model american --kind put --psi 0.1 --spot 100 --strike 100 --rate 0.05 --vol 0.2 --maturity 1
//! optprice verify-pde --candidate american --tolerance 1e-8
//! optprice simulate-sqrtbm --dt 0.01 --n-steps 1000 --seed 7 > path.csv
//! optprice oracle-compare --model bs --oracle crr --spot 100 --strike 100 --rate 0.05 --vol 0.2 --maturity 1
//! optprice sweep --model bs --param spot --from 50 --to 150 --points 101 --strike 100 --rate 0.05 --vol 0.2 --maturity 1 --spot 100
//! ```
//!
//! Exit status: 0 success, 1 domain error, 2 usage error, 3 tolerance failure.

mod args;
mod commands;
mod config;
mod error;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crate::error::{CliError, CliResult};

fn write_output(cli: &args::Cli, out: &commands::CommandOutput) -> CliResult<()> {
    match &cli.output_path {
        Some(path) => std::fs::write(path, &out.body)?,
        None => std::io::stdout().lock().write_all(out.body.as_bytes())?,
    }
    if let Some(side) = &out.side {
        std::io::stderr().lock().write_all(side.as_bytes())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let argv = match config::expand(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = commands::run(&cli).and_then(|out| {
        write_output(&cli, &out)?;
        match out.tolerance_failure {
            Some(msg) => Err(CliError::Tolerance(msg)),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
