use std::process::ExitCode;

use clap::{Parser, Subcommand};
use congame_cli::{analyze_region, run, RegionArgs, RunArgs, RunConfig, EXIT_OK};

#[derive(Parser)]
#[command(name = "congame", version, about = "Log-barrier learning in games with shared constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run barrier gradient ascent on a game
    Run(Box<RunArgs>),
    /// Rasterize a two-dimensional feasible region and check its slices
    AnalyzeRegion(RegionArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let code = match cli.command {
        Command::Run(args) => match RunConfig::resolve(&args).and_then(run) {
            Ok(outcome) => {
                println!(
                    "best gap {:e} at iteration {} ({}); outputs in {}",
                    outcome.best_gap,
                    outcome.result.best_iter,
                    outcome.result.termination,
                    outcome.output_dir.display()
                );
                outcome.exit_code
            }
            Err(e) => {
                eprintln!("error: {e}");
                e.code
            }
        },
        Command::AnalyzeRegion(args) => match analyze_region(&args) {
            Ok(outcome) => {
                println!(
                    "{} components, {} slice violations; outputs in {}",
                    outcome.region.component_count,
                    outcome.violations.len(),
                    args.output_dir.display()
                );
                EXIT_OK
            }
            Err(e) => {
                eprintln!("error: {e}");
                e.code
            }
        },
    };
    ExitCode::from(code as u8)
}
