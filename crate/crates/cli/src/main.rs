mod args;
mod commands;
mod config;
mod error;
mod grid;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime};

use clap::Parser;

use args::{Cli, COMMANDS};
use error::CliError;
use manifest::RunManifest;

fn execute(raw: Vec<String>) -> Result<PathBuf, CliError> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let argv = match config::find_config(&raw) {
        Some(path) => config::merge(raw.clone(), path.as_ref(), &COMMANDS)?,
        None => raw.clone(),
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => return Err(CliError::Usage(e.to_string())),
        Err(e) => {
            // --help and --version.
            print!("{e}");
            std::process::exit(0);
        }
    };
    let (out, default_name) = commands::out_spec(&cli.command);
    let out = commands::resolve_out(out, default_name);
    let output = commands::run(&cli.command)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    }
    std::fs::write(&out, &output.bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", out.display())))?;
    RunManifest {
        command_line: raw,
        config_digest: manifest::digest(&cli.command),
        seed: output.seed,
        version: env!("CARGO_PKG_VERSION"),
        started_unix_s: manifest::unix_seconds(started),
        wall_time_s: clock.elapsed().as_secs_f64(),
        output: out.clone(),
    }
    .write()?;
    Ok(out)
}

fn main() -> ExitCode {
    match execute(std::env::args().collect()) {
        Ok(out) => {
            eprintln!("wrote {}", out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.to_string().trim_end());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
