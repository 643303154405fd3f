mod args;
mod commands;
mod sweep;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use commands::{run, Failure};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(u8::from(usage));
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        // Downstream closed early (e.g. `| head`): not an error.
        Err(Failure::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(match f {
                Failure::Usage(_) => 1,
                Failure::Analysis(_) | Failure::Io(_) => 2,
            })
        }
    }
}
