use std::io::Write;

use clap::Parser;
use symplectic_index::cli::{execute, Cli, RunConfig, EXIT_INPUT};

fn main() {
    let cfg = RunConfig::from(Cli::parse());
    let out = execute(&cfg);
    if out.code != 0 && out.text.starts_with("error:") {
        eprint!("{}", out.text);
        std::process::exit(out.code);
    }
    match &cfg.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &out.text) {
                eprintln!("error: {}: {e}", path.display());
                std::process::exit(EXIT_INPUT);
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.text.as_bytes());
        }
    }
    std::process::exit(out.code);
}
