use std::path::PathBuf;
use std::process::ExitCode;

use ldlab::harness::{run_sweep, verify_suite, SweepConfig};
use ldlab::Error;

const USAGE: &str = "usage:
  ldlab run --config <path> [--key value ...]
  ldlab verify [--config <path>] [--key value ...]

keys: mode, theta_grid, l_rule, grid_n, seed, out, samples, timing";

struct Args {
    command: String,
    config: Option<PathBuf>,
    overrides: Vec<(String, String)>,
}

fn parse_args(raw: &[String]) -> Result<Args, String> {
    let mut it = raw.iter();
    let command = it.next().ok_or("missing command")?.clone();
    let mut config = None;
    let mut overrides = Vec::new();
    while let Some(flag) = it.next() {
        let key = flag.strip_prefix("--").ok_or_else(|| format!("unexpected argument '{flag}'"))?;
        let value = it.next().ok_or_else(|| format!("missing value for --{key}"))?;
        if key == "config" {
            config = Some(PathBuf::from(value));
        } else {
            overrides.push((key.to_string(), value.clone()));
        }
    }
    Ok(Args { command, config, overrides })
}

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}\n{USAGE}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().skip(1).collect();
    if raw.iter().any(|a| a == "--help" || a == "-h") {
        println!("{USAGE}");
        return ExitCode::SUCCESS;
    }
    let args = match parse_args(&raw) {
        Ok(a) => a,
        Err(e) => return config_error(e),
    };
    if args.command == "run" && args.config.is_none() {
        return config_error("run needs --config <path>");
    }
    let cfg = match SweepConfig::load(args.config.as_deref(), &args.overrides) {
        Ok(c) => c,
        Err(e) => return config_error(e),
    };
    let passed = match args.command.as_str() {
        "run" => match run_sweep(&cfg) {
            Ok(o) => {
                for i in o.invariants.iter().filter(|i| !i.passed) {
                    eprintln!("invariant failed: {} ({})", i.name, i.detail);
                }
                o.passed()
            }
            Err(Error::Config(m)) => return config_error(m),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        "verify" => match verify_suite(&cfg) {
            Ok(r) => r.passed,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        other => return config_error(format!("unknown command '{other}'")),
    };
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
