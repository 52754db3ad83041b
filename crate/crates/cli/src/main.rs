use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use glsm_lab_cli::{emit, run, Command, Format, Options};

/// Exact analysis of abelian gauged linear sigma models.
#[derive(Parser)]
#[command(name = "glsm-lab", version)]
struct Cli {
    command: Command,
    /// Model file, or a fixture name under $GLSM_LAB_FIXTURES.
    model: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[command(flatten)]
    options: Options,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command, &cli.model, &cli.options) {
        Ok(outcome) => {
            let text = emit(&outcome.report, cli.format);
            let _ = std::io::stdout().write_all(text.as_bytes());
            if outcome.exit_code != 0 {
                for w in &outcome.report.warnings {
                    eprintln!("glsm-lab: {w}");
                }
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("glsm-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
