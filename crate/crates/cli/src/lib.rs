//! Command-line front end: expression and divisor parsers, reports, and dispatch.

pub mod commands;
pub mod divisor;
pub mod expr;
pub mod report;
pub mod selftest;

use clap::Parser;

pub use commands::{execute, Cli};
pub use report::Report;

/// What a run prints and the process exit code.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { stdout: text, stderr: String::new(), code }
            } else {
                Outcome { stdout: String::new(), stderr: text, code }
            };
        }
    };
    let report = execute(&cli, argv.into_iter().skip(1).collect());
    let stdout = if cli.global.text {
        report.to_text()
    } else {
        let mut s = serde_json::to_string_pretty(&report.to_json()).expect("reports serialize");
        s.push('\n');
        s
    };
    Outcome { stdout, stderr: String::new(), code: report.exit_code() }
}
