//! `sqry` command-line tool.
//!
//! Exit statuses: 0 success, 1 usage or I/O, 2 parse or decode, 3 capacity,
//! 4 failed session.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::codec::{decode_bytes, encode_program, CodecError};
use crate::frontend::{self, ParseError};
use crate::interchange::export_document;
use crate::packaging::{self, ErrorCorrection, PackagingError};
use crate::report::{compile_both, compression_report};
use crate::textcomp::{build_dictionary_with, DictionaryConfig};
use crate::vm::{Session, State};

#[derive(Debug, Parser)]
#[command(
    name = "sqry",
    version,
    about = "Compile, package and run executable QR code programs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile source text into a binary payload.
    Compile {
        source: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Dictionary string compression.
        #[arg(long, value_enum, default_value = "on")]
        compress: Switch,
        /// Print the occupancy report.
        #[arg(long, value_enum, default_value = "off", num_args = 0..=1, default_missing_value = "on")]
        stats: Switch,
        /// Keep only dictionary words whose estimated saving exceeds their cost.
        #[arg(long)]
        gain_filter: bool,
    },
    /// Print canonical source for a payload.
    Decompile { payload: PathBuf },
    /// Run a payload interactively; answers are read one per line.
    Run { payload: PathBuf },
    /// Write the portable JSON tree document for a payload.
    Export {
        payload: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Render a payload as a QR code PNG.
    Qr {
        payload: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Error-correction level: low, medium, quartile or high.
        #[arg(long, default_value_t = ErrorCorrection::Low)]
        ec: ErrorCorrection,
    },
    /// Read the payload back from a QR code image.
    Scan {
        image: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Print occupancy and dictionary statistics for source text.
    Stats {
        source: PathBuf,
        #[arg(long)]
        gain_filter: bool,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("decode error: {0}")]
    Decode(#[from] CodecError),
    #[error("{0}")]
    Packaging(#[from] PackagingError),
    #[error("session failed: {0}")]
    Session(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::Parse { .. } | CliError::Decode(_) => 2,
            CliError::Packaging(PackagingError::CapacityExceeded { .. }) => 3,
            CliError::Packaging(PackagingError::Image(_)) => 1,
            CliError::Packaging(_) => 2,
            CliError::Session(_) => 4,
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write_file(path: &Path, data: &[u8]) -> Result<(), CliError> {
    fs::write(path, data).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn read_source(path: &Path) -> Result<crate::ir::Program, CliError> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes).map_err(|_| CliError::Usage(format!("{}: not UTF-8 text", path.display())))?;
    frontend::parse(&text).map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })
}

fn out_err(e: io::Error) -> CliError {
    CliError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    }
}

fn dictionary_config(gain_filter: bool) -> DictionaryConfig {
    DictionaryConfig {
        gain_filter,
        ..Default::default()
    }
}

/// Executes one parsed command line.
pub fn execute(cli: Cli, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Compile {
            source,
            output,
            compress,
            stats,
            gain_filter,
        } => {
            let program = read_source(&source)?;
            let config = dictionary_config(gain_filter);
            let dict = (compress == Switch::On).then(|| build_dictionary_with(program.strings(), &config));
            let payload = encode_program(&program, dict.as_ref())?;
            let bytes = packaging::pack(&payload)?;
            write_file(&output, &bytes)?;
            if stats == Switch::On {
                let report = compile_both(&program, &config)?.report;
                write!(out, "{report}\n{}", report.key_values()).map_err(out_err)?;
            }
            Ok(())
        }
        Command::Decompile { payload } => {
            let program = decode_bytes(&read(&payload)?)?;
            out.write_all(frontend::format(&program).as_bytes()).map_err(out_err)
        }
        Command::Run { payload } => {
            let program = decode_bytes(&read(&payload)?)?;
            run_session(&program, input, out)
        }
        Command::Export { payload, output } => {
            let program = decode_bytes(&read(&payload)?)?;
            write_file(&output, export_document(&program).as_bytes())
        }
        Command::Qr { payload, output, ec } => {
            let bytes = read(&payload)?;
            packaging::emit_qr(&bytes, &output, ec)?;
            Ok(())
        }
        Command::Scan { image, output } => {
            if !image.exists() {
                return Err(CliError::Io {
                    path: image,
                    source: io::ErrorKind::NotFound.into(),
                });
            }
            let bytes = packaging::read_qr(&image)?;
            write_file(&output, &bytes)
        }
        Command::Stats { source, gain_filter } => {
            let program = read_source(&source)?;
            let c = compile_both(&program, &dictionary_config(gain_filter))?;
            write!(
                out,
                "{}\n{}\n{}",
                c.report,
                compression_report(&program, &c.dictionary),
                c.report.key_values()
            )
            .map_err(out_err)
        }
    }
}

/// Drives a session from line-based input, presenting numbered options.
pub fn run_session(program: &crate::ir::Program, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<(), CliError> {
    let mut session = Session::start(program);
    let mut shown = 0;
    loop {
        for line in &session.output_log()[shown..] {
            writeln!(out, "{line}").map_err(out_err)?;
        }
        shown = session.output_log().len();
        match session.state().clone() {
            State::Finished => return Ok(()),
            State::Failed(f) => return Err(CliError::Session(f.to_string())),
            State::AwaitingChoice { prompt, options } => {
                writeln!(out, "{prompt}").map_err(out_err)?;
                for (i, o) in options.iter().enumerate() {
                    writeln!(out, "  {}) {o}", i + 1).map_err(out_err)?;
                }
                let choice = loop {
                    let line = prompt_line(input, out)?;
                    let line = line.trim();
                    match line.parse::<usize>() {
                        Ok(n) if (1..=options.len()).contains(&n) => break options[n - 1].clone(),
                        _ if options.iter().any(|o| o == line) => break line.to_owned(),
                        _ => writeln!(out, "Please choose 1-{}.", options.len()).map_err(out_err)?,
                    }
                };
                session = session.answer_choice(&choice);
            }
            State::AwaitingNumber { prompt } => {
                writeln!(out, "{prompt}").map_err(out_err)?;
                let value = loop {
                    match prompt_line(input, out)?.trim().parse::<i64>() {
                        Ok(v) => break v,
                        Err(_) => writeln!(out, "Please enter an integer.").map_err(out_err)?,
                    }
                };
                session = session.answer_number(value);
            }
        }
    }
}

fn prompt_line(input: &mut dyn BufRead, out: &mut dyn Write) -> Result<String, CliError> {
    write!(out, "> ").map_err(out_err)?;
    out.flush().map_err(out_err)?;
    let mut line = String::new();
    let n = input.read_line(&mut line).map_err(|source| CliError::Io {
        path: PathBuf::from("<stdin>"),
        source,
    })?;
    if n == 0 {
        return Err(CliError::Session("input ended before the program finished".into()));
    }
    Ok(line)
}

/// Full entry point: parses `args`, runs the command and reports errors.
/// Returns the process exit status.
pub fn main_with<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    match execute(cli, input, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
