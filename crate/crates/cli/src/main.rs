use std::io;
use std::process::ExitCode;

use clap::Parser;
use lazyhint_cli::args::Cli;
use lazyhint_cli::run::run;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = run(&cli, &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}
