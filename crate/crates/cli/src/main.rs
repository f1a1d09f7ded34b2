//! `sicnum`: command-line checks for the sporadic SICs.
//!
//! Exit status is 0 when every check passes, 1 when a check fails or a
//! computation errors, and 2 for invalid usage.

mod commands;
mod options;
mod report;

use std::io::Write as _;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context as _, Result};
use clap::Parser;

use commands::{Ctx, Usage};
use options::{Cli, Command, Format, RunConfig};
use report::{Check, Section};

fn emit(text: &str, cli: &Cli) -> Result<()> {
    match &cli.opts.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn execute(cli: &Cli) -> Result<bool> {
    let ctx = Ctx::new(&cli.opts)?;
    if cli.command == Command::Dump && cli.opts.format == Format::Json {
        emit(&commands::dump_json(&ctx)?, cli)?;
        return Ok(true);
    }
    let section = match commands::run(cli.command, &ctx) {
        Ok(s) => s,
        Err(e) if e.is::<Usage>() => return Err(e),
        Err(e) => {
            let mut s = Section::default();
            s.check(Check::failed("error", format!("{e:#}")));
            s
        }
    };
    let timestamp = (!cli.opts.no_timestamp).then(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    let report = section.into_report(cli.command.name(), RunConfig::new(cli.command, &cli.opts), timestamp);
    emit(&report.render(cli.opts.format)?, cli)?;
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.is::<Usage>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
