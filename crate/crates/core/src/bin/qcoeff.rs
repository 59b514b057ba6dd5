use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let max_order = match qcoeff::cli::max_order_from_env() {
        Ok(v) => v,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = qcoeff::cli::run(std::env::args_os(), max_order, &mut out, &mut io::stderr());
    let _ = out.flush();
    ExitCode::from(code as u8)
}
