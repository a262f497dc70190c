use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

#[derive(Parser)]
#[command(name = "aperlab", about = "Almost-period and recurrence experiments")]
struct Args {
    /// One of eval, scan, recur, type1, group, normal, approx, conv, pde, witness.
    command: String,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: --config: {e}");
            return ExitCode::from(2);
        }
    };
    match aperlab_cli::run(&args.command, &text, &args.out, args.threads) {
        Ok(r) => {
            println!("{}: {}", r.command, if r.pass { "pass" } else { "fail" });
            ExitCode::from(if r.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
