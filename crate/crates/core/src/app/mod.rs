//! Command-line plumbing behind the `chradial` binary.
//!
//! ```text
//! chradial <subcommand> [--config <file>] [--key value ...] --out <dir>
//! ```
//!
//! Exit codes: 0 on success, 2 for configuration or usage errors, 3 when a
//! solver reports a failure. A `manifest.json` is written into the output
//! directory whenever the run itself started, including failed runs.

pub mod commands;
pub mod config;
pub mod csv;
pub mod manifest;
pub mod verify;

use std::path::PathBuf;
use std::time::Instant;

pub use config::{parse_config, parse_config_str, Command, RunConfig};
pub use manifest::RunManifest;

use crate::{Error, Result};

pub const USAGE: &str = "usage: chradial <evolve|stationary|limit|general|sweep|verify> [--config <file>] [--key value ...] --out <dir>";

/// Parsed command line.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub command: Command,
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub overrides: Vec<(String, String)>,
}

/// Split the arguments (without the program name). `--key value` and
/// `--key=value` are both accepted.
pub fn parse_args(args: &[String]) -> Result<Invocation> {
    let usage = |m: String| Error::ConfigValue(format!("{m}\n{USAGE}"));
    let mut it = args.iter();
    let command = it.next().ok_or_else(|| usage("missing subcommand".into()))?.parse::<Command>()?;
    let mut config = None;
    let mut out = None;
    let mut overrides = Vec::new();
    while let Some(arg) = it.next() {
        let Some(flag) = arg.strip_prefix("--") else {
            return Err(usage(format!("unexpected argument {arg:?}")));
        };
        let (key, value) = match flag.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let v = it.next().ok_or_else(|| usage(format!("--{flag} needs a value")))?;
                (flag.to_string(), v.clone())
            }
        };
        match key.as_str() {
            "config" => config = Some(PathBuf::from(value)),
            "out" => out = Some(PathBuf::from(value)),
            _ => overrides.push((key.replace('-', "_"), value)),
        }
    }
    let out = out.ok_or_else(|| usage("missing --out <dir>".into()))?;
    Ok(Invocation { command, config, out, overrides })
}

/// Run a parsed invocation and return the process exit code.
pub fn execute(inv: &Invocation) -> i32 {
    let cfg = match parse_config(inv.command, inv.config.as_deref(), &inv.overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("chradial: {e}");
            return e.exit_code();
        }
    };
    let mut out = match commands::Outputs::new(&inv.out, &cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("chradial: {e}");
            return e.exit_code();
        }
    };
    let start = Instant::now();
    let result = commands::dispatch(&cfg, &mut out);
    let m = &mut out.manifest;
    m.duration_seconds = start.elapsed().as_secs_f64();
    let code = match &result {
        Ok(()) => {
            m.status = "ok".into();
            0
        }
        Err(e) => {
            eprintln!("chradial: {e}");
            m.status = "error".into();
            m.error = Some(e.to_string());
            e.exit_code()
        }
    };
    m.exit_code = code;
    if let Err(e) = out.manifest.write(&out.dir) {
        eprintln!("chradial: cannot write manifest: {e}");
        return 3;
    }
    code
}

/// Entry point used by the binary.
pub fn main_with_args(args: &[String]) -> i32 {
    if args.is_empty() || args.iter().any(|a| a == "--help" || a == "-h") {
        println!("{USAGE}");
        return if args.is_empty() { 2 } else { 0 };
    }
    match parse_args(args) {
        Ok(inv) => execute(&inv),
        Err(e) => {
            eprintln!("chradial: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn flags_and_overrides() {
        let inv = parse_args(&args("limit --config a.cfg --gamma 4 --delta=0.01 --out o")).unwrap();
        assert_eq!(inv.command, Command::Limit);
        assert_eq!(inv.config, Some(PathBuf::from("a.cfg")));
        assert_eq!(inv.out, PathBuf::from("o"));
        assert_eq!(inv.overrides, vec![("gamma".into(), "4".into()), ("delta".into(), "0.01".into())]);
    }

    #[test]
    fn usage_errors_are_config_errors() {
        for bad in ["", "frobnicate --out o", "limit", "limit --out", "limit stray --out o"] {
            let e = parse_args(&args(bad)).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{bad}");
        }
    }
}
