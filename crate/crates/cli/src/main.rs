mod args;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{CommandFactory, Parser};
use serde_json::Value;

use args::{Cli, Format, JobSpec};

const EXIT_FAILED_CHECK: u8 = 1;
const EXIT_ERROR: u8 = 2;

fn load_job(path: &std::path::Path) -> Result<JobSpec, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read job file {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("bad job file {}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut format = cli.format;
    let command = match (&cli.job, cli.command) {
        (Some(path), None) => {
            let job = match load_job(path) {
                Ok(j) => j,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return ExitCode::from(EXIT_ERROR);
                }
            };
            format = format.or(job.format);
            match Cli::try_parse_from(job.to_argv()) {
                Ok(Cli {
                    command: Some(c), ..
                }) => c,
                Ok(_) => unreachable!("job argv always names a command"),
                Err(e) => {
                    eprintln!("error in job file {}:\n{e}", path.display());
                    return ExitCode::from(EXIT_ERROR);
                }
            }
        }
        (None, Some(c)) => c,
        (Some(_), Some(_)) => {
            eprintln!("error: --job cannot be combined with a subcommand");
            return ExitCode::from(EXIT_ERROR);
        }
        (None, None) => {
            let _ = Cli::command().print_help();
            return ExitCode::from(EXIT_ERROR);
        }
    };

    let (records, code): (Vec<Value>, u8) = match commands::run(&command) {
        Ok(o) => {
            let code = if o.ok { 0 } else { EXIT_FAILED_CHECK };
            (o.records, code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            (vec![commands::error_record(&e)], EXIT_ERROR)
        }
    };

    let rendered = output::render(&records, format.unwrap_or(Format::Json));
    let written = match &cli.out {
        Some(path) => std::fs::write(path, rendered),
        None => std::io::stdout().lock().write_all(rendered.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(EXIT_ERROR);
    }
    ExitCode::from(code)
}
