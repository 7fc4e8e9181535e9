use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use infostab::jobs::{run_file, RunOptions};

/// Runs a residual, certify, measure, sweep or blowup job from a JSON config.
#[derive(Debug, Parser)]
#[command(name = "infostab", version)]
struct Args {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Directory for report.json, summary.csv and defects.csv.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads; overrides the config's parallelism.
    #[arg(long)]
    jobs: Option<usize>,
    /// Keep per-point defects and write defects.csv.
    #[arg(long)]
    dump_defects: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = run_file(
        &args.config,
        &RunOptions {
            out_dir: Some(args.out.clone()),
            jobs: args.jobs,
            dump_defects: args.dump_defects,
        },
    );
    if let Some(d) = &outcome.diagnostic {
        eprintln!("infostab: {d}");
    }
    if let Some(r) = &outcome.report {
        eprintln!("infostab: {} job finished with status {}", r.job, r.status);
    }
    ExitCode::from(outcome.exit_code as u8)
}
