use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let report = etkk_cli::run(std::env::args_os());
    if let Some(err) = report.details.get("error").and_then(|e| e.as_str()) {
        eprintln!("etkk: {err}");
    }
    let text = match (report.command.as_str(), report.details.get("text").and_then(|t| t.as_str())) {
        ("help", Some(t)) => t.trim_end().to_string(),
        _ => report.render(),
    };
    // A closed stdout (e.g. `| head`) is not an error worth reporting.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    ExitCode::from(report.exit_code as u8)
}
