#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::json;

use args::Cli;
use error::CliError;

const THREADS_ENV: &str = "CUBATURE_THREADS";

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| CliError::config(format!("{THREADS_ENV} must be a thread count, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config(format!("{THREADS_ENV}: {e}")))
}

fn real_main() -> Result<ExitCode, CliError> {
    init_threads()?;
    let argv = config::expand(std::env::args().collect())?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let cmd = cli.command;
    let common = cmd.common().clone();
    let config = serde_json::to_value(&cmd)?;
    let start = Instant::now();
    let mut report = commands::run(&cmd)?;
    if common.timing {
        report
            .results
            .insert("wall_time_s".into(), json!(start.elapsed().as_secs_f64()));
    }
    let format = common.format.unwrap_or(report.default_format);
    output::write(&report, &config, format, common.output.as_deref())?;
    if common.require_success && !report.success {
        eprintln!("{}: a membership test or condition failed", cmd.name());
        return Ok(ExitCode::from(4));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
