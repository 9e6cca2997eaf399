mod cli;
mod commands;
mod inputs;
mod output;

use std::process::ExitCode;

use clap::Parser;
use glab_core::trace::Header;
use glab_core::LabError;

use crate::cli::{Cli, Command, ForcingAction};

const EXIT_IO: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;
const EXIT_CAP: u8 = 4;
const EXIT_INVARIANT: u8 = 5;

fn exit_code(e: &anyhow::Error) -> u8 {
    if let Some(l) = e.downcast_ref::<LabError>() {
        return match l {
            LabError::Parse { .. } => EXIT_PARSE,
            LabError::Precondition { .. } => EXIT_PRECONDITION,
            LabError::ResourceCap { .. } => EXIT_CAP,
            LabError::Invariant { .. } => EXIT_INVARIANT,
        };
    }
    if e.downcast_ref::<serde_json::Error>().is_some() {
        return EXIT_PARSE;
    }
    EXIT_IO
}

/// The invocation minus `--out`, so the header does not depend on where the
/// trace lands.
fn recorded_args() -> Vec<String> {
    let mut out = Vec::new();
    let mut args = std::env::args().skip(1);
    while let Some(a) = args.next() {
        if a == "--out" {
            args.next();
        } else if !a.starts_with("--out=") {
            out.push(a);
        }
    }
    out
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Density(_) => "density",
        Command::Encode(_) => "encode",
        Command::Decode(_) => "decode",
        Command::MarkerRun(_) => "marker-run",
        Command::WiggleTree(_) => "wiggle-tree",
        Command::BadStrings(_) => "bad-strings",
        Command::Measure(_) => "measure",
        Command::Tower(_) => "tower",
        Command::Vote(_) => "vote",
        Command::Forcing(f) => match f.action {
            ForcingAction::Check { .. } => "forcing check",
            ForcingAction::BuildF { .. } => "forcing build-f",
            ForcingAction::Psi { .. } => "forcing psi",
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let header = Header {
        tool: "glab",
        version: env!("CARGO_PKG_VERSION"),
        command: command_name(&cli.command).to_string(),
        args: recorded_args(),
    };
    let out = cli.common.out.as_deref();
    let result = commands::Ctx::new(&cli.common)
        .and_then(|ctx| commands::run(&cli.command, &ctx))
        .and_then(|r| output::render(header.clone(), cli.common.format, &r));
    let err = match result.and_then(|bytes| output::emit(out, &bytes)) {
        Ok(()) => return ExitCode::SUCCESS,
        Err(e) => e,
    };
    if let Some(l @ LabError::ResourceCap { .. }) = err.downcast_ref::<LabError>() {
        if let Err(w) = output::render_truncated(header, cli.common.format, l).and_then(|b| output::emit(out, &b)) {
            eprintln!("glab: {w:#}");
        }
    }
    eprintln!("glab: {err:#}");
    ExitCode::from(exit_code(&err))
}
