use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = torb::cli::run_command(std::env::args(), &mut std::io::stdin());
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(outcome.status as u8)
}
