use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;
use quarter_green::cli::{execute, usage_error, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            print!("{}", usage_error(&e.to_string()));
            std::process::exit(1);
        }
    };
    let (code, text) = execute(&cli);
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
    std::process::exit(code);
}
