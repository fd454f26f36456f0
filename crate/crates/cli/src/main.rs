//! `ballsketch` command-line tool.

mod args;
mod commands;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use output::Manifest;

const EXIT_INPUT: u8 = 2;
const EXIT_CONFIG: u8 = 3;
const EXIT_USAGE: u8 = 64;

pub const THREADS_ENV: &str = "BALLSKETCH_THREADS";

fn exit_code(err: &ballsketch::Error) -> u8 {
    if err.is_input_error() {
        EXIT_INPUT
    } else {
        EXIT_CONFIG
    }
}

fn configure_threads(flag: Option<usize>) -> ballsketch::Result<usize> {
    let threads = match flag {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| ballsketch::Error::Config(format!("{THREADS_ENV}={v:?} is not a thread count")))?,
            ),
            Err(_) => None,
        },
    };
    if threads == Some(0) {
        return Err(ballsketch::Error::Config("thread count must be positive".into()));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    builder.build_global().map_err(|e| ballsketch::Error::Config(format!("thread pool: {e}")))?;
    Ok(rayon::current_num_threads())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let start = Instant::now();
    let threads = match configure_threads(cli.global.threads) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let mut manifest = Manifest::new(&cli, threads);
    let result = commands::run(&cli, &mut manifest);
    manifest.duration_secs = start.elapsed().as_secs_f64();
    match result {
        Ok(()) => {
            if let Err(e) = manifest.emit(cli.global.manifest.as_deref()) {
                eprintln!("error: writing manifest: {e}");
                return ExitCode::from(EXIT_INPUT);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
