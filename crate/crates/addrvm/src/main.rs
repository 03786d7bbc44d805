use std::io::{self, Write};
use std::process::ExitCode;

use addrvm::cli::{execute, exit, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = match execute(&cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            exit::INPUT
        }
    };
    let _ = out.flush();
    ExitCode::from(code)
}
