use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let (exit, stdout, stderr) = limitless_cli::run_args(std::env::args_os());
    print!("{stdout}");
    eprint!("{stderr}");
    let _ = std::io::stdout().flush();
    ExitCode::from(exit.code() as u8)
}
