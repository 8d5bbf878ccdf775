use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use fnls_lab::scenario::{run_scenario, RunOptions, RunReport, ScenarioConfig, EXIT_CONFIG};

#[derive(Parser)]
#[command(
    name = "fnls-lab",
    version,
    about = "Fractional NLS pseudospectral lab"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario described by a JSON config.
    Run {
        config: PathBuf,
        /// Output directory (overrides the config's `out`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for random initial data (overrides the config's `seed`).
        #[arg(long)]
        seed: Option<u64>,
        /// Only report errors.
        #[arg(long)]
        quiet: bool,
        /// Worker threads for sweep runs.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

fn print_report(report: &RunReport, indent: usize) {
    let pad = " ".repeat(indent);
    println!(
        "{pad}{} [{:?}] exit {}",
        report.name, report.kind, report.exit_code
    );
    if let Some(status) = &report.status {
        println!(
            "{pad}  status {}",
            serde_json::to_string(status).unwrap_or_default()
        );
    }
    for r in &report.diagnostics {
        let tag = if r.pass { "PASS" } else { "FAIL" };
        println!(
            "{pad}  {tag} {:<28} {:>12.4e}  (tol {:.1e})",
            r.name, r.value, r.tolerance
        );
    }
    for run in &report.runs {
        print_report(run, indent + 2);
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_CONFIG as u8),
            };
        }
    };
    let Command::Run {
        config,
        out,
        seed,
        quiet,
        jobs,
    } = cli.command;

    let result = ScenarioConfig::from_path(&config).and_then(|cfg| {
        let opts = RunOptions { out, seed, jobs };
        run_scenario(&cfg, &opts)
    });
    match result {
        Ok(report) => {
            if !quiet {
                print_report(&report, 0);
                println!("outputs in {}", report.out_dir.display());
            }
            ExitCode::from(report.exit_code as u8)
        }
        Err(e) => {
            eprintln!("fnls-lab: {e}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
    }
}
