use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use ballsketch::Result;
use serde::Serialize;

use crate::args::{Cli, Command};

/// Everything needed to reproduce a run.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub args: Vec<String>,
    pub graph: Option<PathBuf>,
    pub hash_seed: Option<u64>,
    pub rng_seed: Option<u64>,
    pub threads: usize,
    pub duration_secs: f64,
}

impl Manifest {
    pub fn new(cli: &Cli, threads: usize) -> Self {
        Self {
            tool: "ballsketch",
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand_name(&cli.command),
            args: std::env::args().skip(1).collect(),
            graph: None,
            hash_seed: None,
            rng_seed: None,
            threads,
            duration_secs: 0.0,
        }
    }

    pub fn emit(&self, path: Option<&Path>) -> io::Result<()> {
        match path {
            Some(p) => {
                let mut f = BufWriter::new(File::create(p)?);
                serde_json::to_writer_pretty(&mut f, self)?;
                writeln!(f)?;
                f.flush()
            }
            None => {
                let line = serde_json::to_string(self)?;
                writeln!(io::stderr(), "{line}")
            }
        }
    }
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Gen(_) => "gen",
        Command::Balls(_) => "balls",
        Command::Conductance(_) => "conductance",
        Command::Triangles(_) => "triangles",
        Command::Transitivity(_) => "transitivity",
        Command::Bounds(_) => "bounds",
        Command::Seeds(_) => "seeds",
        Command::Nibble(_) => "nibble",
        Command::Exact(_) => "exact",
        Command::Diptest(_) => "diptest",
        Command::SweepRegisters(_) => "sweep-registers",
    }
}

pub fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub struct Csv {
    inner: csv::Writer<Box<dyn Write>>,
}

impl Csv {
    pub fn new(out: Box<dyn Write>, header: &[&str]) -> Result<Self> {
        let mut csv = Self { inner: csv::Writer::from_writer(out) };
        csv.row(header.iter().map(|s| s.to_string()))?;
        Ok(csv)
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, fields: I) -> Result<()> {
        self.inner.write_record(fields.into_iter().collect::<Vec<_>>()).map_err(csv_err)
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush().map_err(ballsketch::Error::Io)
    }
}

fn csv_err(e: csv::Error) -> ballsketch::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => ballsketch::Error::Io(e),
        other => ballsketch::Error::Input(format!("{other:?}")),
    }
}

/// Shortest round-trip formatting; empty for missing values.
pub fn num(x: Option<f64>) -> String {
    match x {
        None => String::new(),
        Some(x) if x.is_nan() => "nan".into(),
        Some(x) if x.is_infinite() => if x > 0.0 { "inf" } else { "-inf" }.into(),
        Some(x) => format!("{x}"),
    }
}
