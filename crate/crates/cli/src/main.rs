//! `bicon`: construct and certify biconservative surfaces from the command line.
//!
//! Every command writes a JSON report (with the resolved configuration and
//! the pass/fail of each check) into the output directory and exits with
//! 0 when all checks pass, 1 when a check fails and 2 on invalid input or
//! any other error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{ClosureArgs, CertifyArgs, ExamplesArgs, ProfileArgs, R3ProfileArgs, SweepArgs};

#[derive(Debug, Parser)]
#[command(name = "bicon", version, about = "Closed biconservative surfaces in the 3-sphere")]
struct Cli {
    /// Output directory for reports, meshes and CSV files.
    #[arg(long, env = "BICON_OUT_DIR", default_value = ".", global = true)]
    out: PathBuf,

    /// JSON file whose keys override the command's flags; a `cert` object
    /// overrides certification tolerances.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads for parallel sections (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve I(d) = 2πn/m, build the closed surface in S³ and certify it.
    Closure(ClosureArgs),
    /// Tabulate the progression angle I(d) and check monotonicity and bounds.
    Sweep(SweepArgs),
    /// Sample one period of the curvature κ(s).
    Profile(ProfileArgs),
    /// Certify a mesh previously exported as JSON.
    Certify(CertifyArgs),
    /// Closed-form biharmonicity of the canonical sphere examples.
    Examples(ExamplesArgs),
    /// Profile curve of the biconservative surface of revolution in R³.
    R3profile(R3ProfileArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let ctx = commands::Context::new(cli.out, cli.config);
    let result = ctx.and_then(|ctx| match cli.command {
        Command::Closure(a) => commands::closure(&ctx, a),
        Command::Sweep(a) => commands::sweep(&ctx, a),
        Command::Profile(a) => commands::profile(&ctx, a),
        Command::Certify(a) => commands::certify(&ctx, a),
        Command::Examples(a) => commands::examples(&ctx, a),
        Command::R3profile(a) => commands::r3profile(&ctx, a),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
