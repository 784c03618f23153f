//! Command-line front end for `superhopf`: descriptor parsing, rendering, run
//! manifests and fixture reproduction.

pub mod args;
pub mod catalog;
pub mod commands;
pub mod manifest;
pub mod render;
pub mod repro;

use std::io::Write;

use clap::Parser;
use thiserror::Error;

use superhopf::dieudonne::DieudonneError;
use superhopf::steenrod::SteenrodError;

pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("guard `{name}` exceeded: {detail}")]
    Guard { name: String, detail: String },
    #[error("{0}")]
    Mismatch(String),
}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    CliError::Usage(msg.into()).into()
}

pub fn guard(name: &str, detail: impl Into<String>) -> anyhow::Error {
    CliError::Guard {
        name: name.into(),
        detail: detail.into(),
    }
    .into()
}

/// Exit code for a failed command.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<CliError>() {
            return match e {
                CliError::Usage(_) => EXIT_USAGE,
                CliError::Guard { .. } => EXIT_GUARD,
                CliError::Mismatch(_) => EXIT_MISMATCH,
            };
        }
        if cause.is::<catalog::SpecError>() {
            return EXIT_USAGE;
        }
        match cause.downcast_ref::<SteenrodError>() {
            Some(SteenrodError::GuardExceeded(_)) => return EXIT_GUARD,
            Some(SteenrodError::Parse { .. } | SteenrodError::UnknownGenerator(_) | SteenrodError::IndexParity { .. }) => {
                return EXIT_USAGE
            }
            _ => {}
        }
        if let Some(DieudonneError::GuardExceeded(_)) = cause.downcast_ref::<DieudonneError>() {
            return EXIT_GUARD;
        }
    }
    1
}

/// Parse `argv`, run the command and write its output. Returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let global = cli.global.clone();
    match commands::dispatch(cli) {
        Ok(out) => {
            let text = if global.json {
                manifest::canonical_json(&out.document())
            } else {
                out.table.clone()
            };
            let written = match &global.out {
                Some(path) => std::fs::write(path, &text).map_err(|e| e.to_string()),
                None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: cannot write output: {e}");
                return 1;
            }
            out.exit_code
        }
        Err(err) => {
            let code = exit_code(&err);
            let _ = writeln!(stderr, "error: {err:#}");
            if code == EXIT_USAGE {
                let _ = writeln!(stderr, "run `superhopf --help` for usage");
            }
            code
        }
    }
}
