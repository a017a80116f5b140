use clap::error::ErrorKind;
use clap::Parser;
use pft_cli::error::CliError;
use pft_cli::{execute, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.exit()
        }
        Err(e) if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = e.print();
            std::process::exit(1);
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            let first = first.strip_prefix("error: ").unwrap_or(first);
            let err = CliError::validation("arguments", first);
            eprintln!("{}", err.line());
            std::process::exit(err.exit_code());
        }
    };
    if let Err(e) = execute(&cli.command) {
        eprintln!("{}", e.line());
        std::process::exit(e.exit_code());
    }
}
