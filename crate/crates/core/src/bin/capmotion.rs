use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use capmotion::runner::{dimension_demo, load_scenario, run, Overrides};
use capmotion::scenario::ScenarioError;

/// Analytic capacity under holomorphic motions.
#[derive(Parser)]
#[command(name = "capmotion", disable_version_flag = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its artifacts.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Parse and validate a scenario without running it.
    Validate {
        config: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Write the non-harmonicity certificate and dimension sweep for `t`.
    DimensionDemo {
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 9)]
        samples: usize,
        #[arg(long, default_value = "dimension-demo")]
        output: PathBuf,
    },
    /// Print the version.
    Version,
}

#[derive(Args)]
struct OverrideArgs {
    /// Contour radius.
    #[arg(long)]
    radius: Option<f64>,
    /// Initial quadrature node count.
    #[arg(long)]
    quadrature_n: Option<usize>,
    #[arg(long)]
    quadrature_tol: Option<f64>,
    /// Grid spacing.
    #[arg(long)]
    grid_h: Option<f64>,
    #[arg(long)]
    grid_clip: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl From<OverrideArgs> for Overrides {
    fn from(a: OverrideArgs) -> Self {
        Overrides {
            radius: a.radius,
            quadrature_n: a.quadrature_n,
            quadrature_tol: a.quadrature_tol,
            grid_h: a.grid_h,
            grid_clip: a.grid_clip,
            seed: a.seed,
            output: a.output,
        }
    }
}

fn fail(e: ScenarioError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match cli.command {
        Command::Run { config, overrides } => {
            let scenario = match load_scenario(&config, &overrides.into()) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            match run(&scenario) {
                Ok(report) => {
                    print!("{}", report.render());
                    ExitCode::from(report.exit_code() as u8)
                }
                Err(e) => fail(e),
            }
        }
        Command::Validate { config, overrides } => {
            match load_scenario(&config, &overrides.into()) {
                Ok(s) => {
                    println!("{}: ok", config.display());
                    print!("{}", s.to_toml());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::DimensionDemo { t, samples, output } => {
            match dimension_demo(t, samples, &output) {
                Ok(report) => {
                    print!("{}", report.render());
                    ExitCode::from(report.exit_code() as u8)
                }
                Err(e) => fail(e),
            }
        }
        Command::Version => {
            println!("capmotion {}", env!("CARGO_PKG_VERSION"));
            ExitCode::SUCCESS
        }
    }
}
