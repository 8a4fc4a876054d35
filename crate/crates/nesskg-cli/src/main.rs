//! `nesskg` command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input (unknown command, parse error,
//! constraint violation), 3 non-convergence.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use nesskg::cli::{self, Command, JobConfig, RunOptions};

#[derive(Debug, Parser)]
#[command(name = "nesskg", version, about = "Glued-reservoir NESS computations", after_help = cli::usage())]
struct Args {
    /// Job to run (see the command list below).
    command: String,
    /// INI job file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; the table is written to `<out>/<command>.csv`.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads (falls back to NESSKG_THREADS, then to all cores).
    #[arg(long, env = "NESSKG_THREADS")]
    threads: Option<usize>,
    /// Seed for Monte-Carlo jobs; overrides the seed in the job file.
    #[arg(long)]
    seed: Option<u64>,
}

fn fail(err: nesskg::Error) -> ExitCode {
    eprintln!("nesskg: {err}");
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let command: Command = match args.command.parse() {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("nesskg: could not size the thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let config = match JobConfig::from_path(&args.config) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    match cli::run(command, &config, RunOptions { seed: args.seed }).and_then(|t| t.write(&args.out)) {
        Ok(path) => {
            println!("{}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}
