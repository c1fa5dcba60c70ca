use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use qrecon_cli::{execute, Cli, ExperimentSpec};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match ExperimentSpec::resolve(&cli).and_then(|spec| execute(&spec)) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qrecon: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
