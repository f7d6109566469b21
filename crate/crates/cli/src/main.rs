use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use pucci_lab_cli::commands::COMMANDS;
use pucci_lab_cli::{execute, THREADS_ENV};

/// Numerical experiments for Pucci extremal operators.
#[derive(Debug, Parser)]
#[command(name = "pucci-lab", version)]
struct Cli {
    /// One of: radial, overdetermined, eigen, serrin, sector, properties, report.
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(COMMANDS))]
    command: String,
    /// JSON config; defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set h=0.02` or `--set gamma_options.tol=1e-7`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("{THREADS_ENV} must be a positive integer, got `{v}`"))?;
        if n == 0 {
            anyhow::bail!("{THREADS_ENV} must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|_| execute(&cli.command, cli.config.as_deref(), &cli.set, &cli.out));
    match result {
        Ok(report) => {
            for c in &report.checks {
                let verdict = if c.pass { "PASS" } else { "FAIL" };
                println!("{verdict} {}: {} {} {}", c.name, c.value, c.relation, c.threshold);
            }
            println!("wrote {}", cli.out.join(format!("{}.report.json", report.command)).display());
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
