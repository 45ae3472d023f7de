use clap::Parser;
use rte_cli::{parse_stages, run, RunOptions};
use std::path::PathBuf;
use std::process::ExitCode;

/// Run radiative transfer scenario suites and check the a-priori estimates.
#[derive(Parser, Debug)]
#[command(name = "rte", version)]
struct Args {
    /// Scenario config file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Comma-separated stages: validate, solve, bounds, spectral, sharpness.
    #[arg(long, default_value = "validate,solve,bounds")]
    stages: String,
    /// Output directory for CSV tables.
    #[arg(long, env = "RTE_OUT_DIR", default_value = "out")]
    out: PathBuf,
    /// Refinement factor: grid spacing, ray sub-intervals and boundary
    /// quadrature cells all scale with it.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=16))]
    refine: u32,
    /// Scenarios solved concurrently (rayon threads).
    #[arg(long)]
    jobs: Option<usize>,
    /// Overrides every scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let stages = match parse_stages(&args.stages) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let opts = RunOptions {
        config: args.scenario,
        stages,
        out: args.out,
        refine: args.refine as usize,
        jobs: args.jobs,
        seed: args.seed,
    };
    ExitCode::from(run(&opts) as u8)
}
