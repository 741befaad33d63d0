use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wlab::validation::DEFAULT_TOL;
use wlab_cli::config::{load_config, load_curve_file, ExperimentConfig};
use wlab_cli::{describe, experiment};

#[derive(Parser)]
#[command(name = "wlab", version, about = "Weierstrass point and Bergman measure experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output directory (overrides `out` in the config)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads
    #[arg(long, global = true, env = "WLAB_WORKERS")]
    workers: Option<usize>,

    /// Area-quadrature tolerance (overrides the config)
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file
    Run { config: PathBuf },
    /// Run the acceptance suite
    Validate,
    /// Print a summary of a curve file
    Describe { curve: PathBuf },
}

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: worker pool: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    // a zero tolerance is allowed here: it is how quadrature failures are provoked
    if let Some(t) = cli.tol.filter(|t| t.is_nan() || *t < 0.0 || t.is_infinite()) {
        eprintln!("error: --tol must be a finite nonnegative number, got {t}");
        return ExitCode::from(EXIT_USAGE);
    }
    let mut cfg = match &cli.command {
        Command::Describe { curve } => {
            let text = load_curve_file(curve)
                .and_then(|spec| {
                    spec.build().map_err(|(field, message)| wlab_cli::config::ConfigError {
                        file: Some(curve.clone()),
                        line: None,
                        field: Some(field),
                        message,
                    })
                })
                .map_err(|e| e.to_string())
                .and_then(|model| describe(&model).map_err(|e| e.to_string()));
            return match text {
                Ok(t) => {
                    print!("{t}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_USAGE)
                }
            };
        }
        Command::Validate => ExperimentConfig::validation(DEFAULT_TOL),
        Command::Run { config } => match load_config(config) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
        },
    };
    if let Some(t) = cli.tol {
        cfg.tolerances.quadrature = t;
    }
    let out = cli.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("wlab-out"));
    match experiment::run(&cfg, &out) {
        Ok(report) => {
            for c in &report.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            println!("report written to {}", out.join("report.txt").display());
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAILED)
            }
        }
        Err(e) => {
            eprintln!("error: writing to {}: {e}", out.display());
            ExitCode::from(EXIT_USAGE)
        }
    }
}
