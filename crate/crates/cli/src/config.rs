//! `--config <path>`: a JSON object whose keys mirror the long flags.
//!
//! The object is expanded into flags inserted right after the subcommand, so
//! flags given on the command line still win. A `"command"` key supplies the
//! subcommand when none is given.

use std::fs;

use serde_json::Value;

use crate::error::{usage, CliResult};

const SUBCOMMANDS: [&str; 5] = ["price", "verify-pde", "simulate-sqrtbm", "oracle-compare", "sweep"];

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn scalar(key: &str, v: &Value) -> CliResult<Option<String>> {
    match v {
        Value::Number(n) => Ok(Some(n.to_string())),
        Value::String(s) => Ok(Some(s.clone())),
        _ => Err(usage(format!("config key {key:?} must be a number or string"))),
    }
}

/// Flags equivalent to a config object.
pub fn config_flags(config: &Value) -> CliResult<Vec<String>> {
    let Value::Object(map) = config else {
        return Err(usage("config file must hold a JSON object"));
    };
    let mut flags = Vec::new();
    for (key, value) in map {
        if key == "command" || key == "config" {
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => flags.push(flag),
            Value::Array(items) => {
                for item in items {
                    if let Some(s) = scalar(key, item)? {
                        flags.push(flag.clone());
                        flags.push(s);
                    }
                }
            }
            Value::Object(_) => return Err(usage(format!("config key {key:?} must not be an object"))),
            other => {
                if let Some(s) = scalar(key, other)? {
                    flags.push(flag);
                    flags.push(s);
                }
            }
        }
    }
    Ok(flags)
}

/// Splice the config file named by `--config` (if any) into `args`.
pub fn expand(args: Vec<String>) -> CliResult<Vec<String>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|e| usage(format!("cannot read config {path}: {e}")))?;
    let config: Value =
        serde_json::from_str(&text).map_err(|e| usage(format!("config {path} is not valid JSON: {e}")))?;
    let flags = config_flags(&config)?;

    let mut args = args;
    let pos = match args.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) {
        Some(p) => p,
        None => {
            let Some(Value::String(cmd)) = config.get("command") else {
                return Ok(args);
            };
            args.insert(1.min(args.len()), cmd.clone());
            1.min(args.len() - 1)
        }
    };
    args.splice(pos + 1..pos + 1, flags);
    Ok(args)
}
