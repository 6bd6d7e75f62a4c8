use std::fs;
use std::process::ExitCode;

use clap::Parser;

use wnaforge::cli::{Cli, OutputFormat};
use wnaforge::commands::{run, Outcome};
use wnaforge::error::Failure;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli).and_then(|out| emit(&cli, out)) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{}", f);
            ExitCode::from(f.exit_code() as u8)
        }
    }
}

fn emit(cli: &Cli, out: Outcome) -> Result<u8, Failure> {
    let report = &out.report;
    let shown = match cli.format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Plain => {
            let mut s = out.text.clone().map(|t| format!("{}\n", t.trim_end())).unwrap_or_default();
            s.push_str(&report.to_plain());
            s
        }
        OutputFormat::Latex => match &out.latex {
            Some(t) => t.clone(),
            None => report.to_plain(),
        },
    };
    print!("{}", shown);
    if !shown.ends_with('\n') {
        println!();
    }
    if let Some(dir) = &cli.out {
        let io = |e: std::io::Error| Failure::usage(format!("{}: {}", dir.display(), e));
        fs::create_dir_all(dir).map_err(io)?;
        fs::write(dir.join("report.json"), report.to_json()).map_err(io)?;
        for (name, body) in &out.artifacts {
            fs::write(dir.join(name), body).map_err(io)?;
        }
    }
    Ok(if report.residual_zero { 0 } else { 2 })
}
