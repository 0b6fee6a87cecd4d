//! Batch front end: every command writes a JSON-lines (or CSV) report and
//! exits 0 when all asserted claims hold, 1 when one fails, 2 on bad input.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

mod commands;
mod error;
mod input;
mod output;

use commands::Command;
use output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "rikit",
    version,
    about = "Rearrangement-invariant norm toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rikit::par::init_threads() {
        eprintln!("rikit: {e}");
        return ExitCode::from(2);
    }
    let result = cli.command.run().and_then(|outcome| {
        output::emit(
            &output::render(&outcome.lines, cli.format),
            cli.out.as_deref(),
        )?;
        Ok(outcome.ok)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("rikit: {e}");
            ExitCode::from(2)
        }
    }
}
