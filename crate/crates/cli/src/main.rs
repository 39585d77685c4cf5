use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use lgcavity_cli::scenarios::{run_fig3_scenario, run_fig4_scenario, run_property_suite};
use lgcavity_cli::{load_config, RunArtifacts};

/// Physical-optics simulator for degenerate ring cavities carrying
/// Laguerre-Gaussian beams.
///
/// Exit status: 0 on success, 1 when a scenario check fails, 2 on
/// configuration errors.
#[derive(Parser)]
#[command(name = "sim", version, about)]
struct Cli {
    /// Scenario to run: "fig3" (piezo scans and dispersion tables),
    /// "fig4" (beam-profile gallery) or "properties" (invariant suite).
    scenario: String,

    /// Path to the scenario configuration (TOML with unit suffixes).
    #[arg(long)]
    config: PathBuf,

    /// Output directory; created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Override the grid side length (power of two, at least 32).
    #[arg(long)]
    grid: Option<usize>,

    /// Seed recorded in the manifest and used by any randomized sweep.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let mut config = match load_config(&cli.config) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("sim: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.grid {
        if !n.is_power_of_two() || n < 32 {
            eprintln!("sim: --grid {n} must be a power of two, at least 32");
            return ExitCode::from(2);
        }
        config.beam.grid_n = n;
    }

    let out_dir = cli.out.join(&cli.scenario);
    let result: anyhow::Result<RunArtifacts> = match cli.scenario.as_str() {
        "fig3" => run_fig3_scenario(&config, &out_dir, cli.seed),
        "fig4" => run_fig4_scenario(&config, &out_dir, cli.seed),
        "properties" => run_property_suite(&config, &out_dir, cli.seed),
        other => {
            eprintln!("sim: unknown scenario {other:?} (expected fig3, fig4 or properties)");
            return ExitCode::from(2);
        }
    };

    match result {
        Ok(artifacts) => {
            println!(
                "sim: {} wrote {} CSV file(s), {} image(s) to {}",
                cli.scenario,
                artifacts.csv_files.len(),
                artifacts.image_files.len(),
                artifacts.out_dir.display()
            );
            if artifacts.success() {
                ExitCode::SUCCESS
            } else {
                for failure in &artifacts.failures {
                    eprintln!("sim: check failed: {failure}");
                }
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("sim: scenario failed: {e:#}");
            ExitCode::from(1)
        }
    }
}
