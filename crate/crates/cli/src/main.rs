use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use gks_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}", e.message());
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let json = report.to_json();
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &json) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    // a closed pipe is not an error worth reporting
    let mut out = std::io::stdout().lock();
    if cli.json {
        let _ = out.write_all(json.as_bytes());
    } else {
        let _ = out.write_all(report.to_table().as_bytes());
        if let Some(d) = &report.details {
            let _ = writeln!(out, "details: {}", serde_json::to_string_pretty(d).expect("details serialize"));
        }
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
