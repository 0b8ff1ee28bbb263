mod commands;
mod config;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use farey_stairs::Error;

use commands::{Command, Emit};
use config::{Format, RunConfig};

/// Farey-Brocot staircases, their gap sets and spectra.
#[derive(Parser, Debug)]
#[command(name = "farey-stairs", version)]
struct Cli {
    #[command(flatten)]
    cfg: RunConfig,
    #[command(subcommand)]
    cmd: Command,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotConverged(_) | Error::MissingWidths(_) => 3,
        Error::Cache(_) => 4,
        Error::Io(_) => 1,
        _ => 2,
    }
}

fn render(table: &farey_stairs::table::Table, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    }
}

fn write_out(emits: &[Emit], cli: &Cli) -> farey_stairs::Result<()> {
    let fmt = cli.cfg.format;
    for e in emits {
        let text = render(&e.table, fmt);
        match (&e.stem, &cli.cmd) {
            (Some(stem), Command::Selfsim { out_dir, .. }) => {
                std::fs::create_dir_all(out_dir)?;
                std::fs::write(out_dir.join(format!("{stem}.{}", fmt.extension())), text)?;
            }
            _ => match &cli.cfg.output_path {
                Some(p) => write_file(p, &text)?,
                None => std::io::stdout().lock().write_all(text.as_bytes())?,
            },
        }
    }
    Ok(())
}

fn write_file(p: &Path, text: &str) -> farey_stairs::Result<()> {
    if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(p, text)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli
        .cfg
        .validate()
        .and_then(|()| commands::run(&cli.cmd, &cli.cfg))
        .and_then(|emits| write_out(&emits, &cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
