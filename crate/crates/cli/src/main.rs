//! cycfam: enumerate cyclic fields, check the counting identities, and emit CSV/JSON data.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::JobConfig;

#[derive(Parser, Debug)]
#[command(name = "cycfam", version, about = "Cyclic extensions of Q: censuses, zeta identities, class groups, sieves")]
struct Cli {
    /// JSON job file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the family with discriminant up to X.
    Enumerate(JobConfig),
    /// Count the family, optionally along a grid and with split primes.
    Census(JobConfig),
    /// Compare brute-force and Euler-side Dirichlet coefficients.
    ZetaCheck(JobConfig),
    /// Class groups of quadratic fields.
    Classgroup(JobConfig),
    /// l-torsion above |D|^theta per dyadic range.
    TorsionScan(JobConfig),
    /// Split-prime sieve statistics and the second-moment bound.
    Sieve(JobConfig),
    /// Mahler measures, small generators and eta.
    Heights(JobConfig),
    /// Exponent table for (m, n).
    Constants(JobConfig),
}

impl Command {
    fn parts(&self) -> (&'static str, &JobConfig) {
        match self {
            Command::Enumerate(c) => ("enumerate", c),
            Command::Census(c) => ("census", c),
            Command::ZetaCheck(c) => ("zeta-check", c),
            Command::Classgroup(c) => ("classgroup", c),
            Command::TorsionScan(c) => ("torsion-scan", c),
            Command::Sieve(c) => ("sieve", c),
            Command::Heights(c) => ("heights", c),
            Command::Constants(c) => ("constants", c),
        }
    }
}

fn main() -> ExitCode {
    // exit quietly when piped into head and friends
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (name, flags) = cli.command.parts();
    let cfg = match &cli.config {
        Some(path) => JobConfig::load(path).and_then(|file| file.overlay(flags)),
        None => Ok(flags.clone()),
    };
    let result = cfg.and_then(|cfg| {
        if let Some(w) = cfg.workers {
            rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global()?;
        }
        commands::run(name, &cfg)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let invariant = e
                .chain()
                .any(|c| matches!(c.downcast_ref::<cycfam::Error>(), Some(cycfam::Error::Invariant(_))));
            ExitCode::from(if invariant { 2 } else { 1 })
        }
    }
}
