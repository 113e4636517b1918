use std::process::ExitCode;

use clap::Parser;
use qframe_cli::{run, threads_from_env, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = threads_from_env().and_then(|n| {
        if let Some(n) = n {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
        run(cli)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qframe: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
