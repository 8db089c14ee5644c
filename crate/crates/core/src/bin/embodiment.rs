use std::process::ExitCode;

use clap::Parser;
use embodiment::cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = execute(&cli, &mut std::io::stdout(), &mut std::io::stderr());
    ExitCode::from(code)
}
