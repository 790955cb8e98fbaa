use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use ricci_lab::{exit_code, run, Cli, CliError};

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("RICCI_LAB_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("RICCI_LAB_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = init_threads().and_then(|()| {
        let outcome = run(&cli.command)?;
        let out = cli.command.output();
        match &out.out {
            Some(path) => std::fs::write(path, &outcome.text)?,
            None => std::io::stdout().lock().write_all(outcome.text.as_bytes())?,
        }
        Ok(exit_code(&outcome, out.strict))
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
