use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aarhus_core::bch::bch_trees;
use aarhus_core::checks::{print_coordinates, run_suite, CheckConfig, Format, Suite};
use aarhus_core::gaussian::{integrate, integrate_partial, CovarianceMatrix, Gaussian};
use aarhus_core::grammar::{parse_covariance, parse_series, print_covariance, print_series};
use aarhus_core::{reduce, Caps, DiagramSum, VarLabel};
use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "aarhus",
    version,
    about = "Exact diagram calculus: Gaussian integration, BCH gluing and property checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a series against a covariance over some of its variables.
    Integrate {
        #[arg(long)]
        covariance: PathBuf,
        #[arg(long)]
        series: PathBuf,
        /// Variables to integrate over; defaults to all of them.
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        #[arg(long, default_value_t = 24)]
        max_legs: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Grammar)]
        format: OutputFormat,
    },
    /// Run one of the seeded property-check suites.
    Check {
        #[arg(value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Number of random cases for the randomized suites.
        #[arg(long, default_value_t = 20)]
        cases: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Grammar)]
        format: OutputFormat,
    },
    /// Print the BCH tree series up to the given number of leaves.
    Bch {
        #[arg(long)]
        degree: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Grammar)]
        format: OutputFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Grammar,
    Coords,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Format {
        match f {
            OutputFormat::Grammar => Format::Grammar,
            OutputFormat::Coords => Format::Coords,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Kirby2,
    Cyclic,
    Fubini,
    Ibp,
    Parity,
    Ogl,
    Bch,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Kirby2 => Suite::Kirby2,
            SuiteArg::Cyclic => Suite::Cyclic,
            SuiteArg::Fubini => Suite::Fubini,
            SuiteArg::Ibp => Suite::Ibp,
            SuiteArg::Parity => Suite::Parity,
            SuiteArg::Ogl => Suite::Ogl,
            SuiteArg::Bch => Suite::Bch,
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn render(s: &DiagramSum, format: OutputFormat) -> Result<String> {
    Ok(match format {
        OutputFormat::Grammar => print_series(s),
        OutputFormat::Coords => print_coordinates(s)?,
    })
}

/// Runs the command; `Ok(false)` means a check failed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Integrate {
            covariance,
            series,
            vars,
            max_degree,
            max_legs,
            format,
        } => {
            let caps = Caps::new(2 * max_degree, max_legs);
            let (labels, m) =
                parse_covariance(&read(&covariance)?).with_context(|| format!("in {}", covariance.display()))?;
            let p = parse_series(&read(&series)?, caps).with_context(|| format!("in {}", series.display()))?;
            let g = Gaussian::new(CovarianceMatrix::new(labels.clone(), m)?, p)?;
            let vars: Vec<VarLabel> = if vars.is_empty() {
                labels.clone()
            } else {
                vars.iter().map(|v| aarhus_core::var(v)).collect()
            };
            for v in &vars {
                if !labels.contains(v) {
                    bail!("`{v}` is not a covariance variable");
                }
            }
            if vars.len() == labels.len() {
                print!("{}", render(&reduce(&integrate(&g)?), format)?);
            } else {
                let r = integrate_partial(&g, &vars)?;
                println!("# remaining covariance");
                print!("{}", print_covariance(r.cov.labels(), r.cov.matrix()));
                println!("# series");
                print!("{}", render(&reduce(&r.p), format)?);
            }
            Ok(true)
        }
        Command::Check {
            suite,
            max_degree,
            seed,
            cases,
            format,
        } => {
            let config = CheckConfig {
                max_degree,
                seed,
                cases,
            };
            let report = run_suite(suite.into(), config)?;
            print!("{}", report.render(format.into())?);
            Ok(report.passed())
        }
        Command::Bch { degree, format } => {
            if degree == 0 {
                bail!("degree must be at least 1");
            }
            let s = bch_trees(degree)?.relabeled("x", "y", "z");
            print!("{}", render(&s, format)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
