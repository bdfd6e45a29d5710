// `!(x >= 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use critex_core::shoot::ShootOptions;

use commands::{DichotomyArgs, Failure, PsibarOutput, ShootArgs};
use report::{Outcome, Report};

#[derive(Parser)]
#[command(name = "critex", version, about = "Existence and nonexistence checks for -Δu = K u^((n+2)/(n-2)) + μu on the unit ball")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ShootFlags {
    /// Relative tolerance of the integrator
    #[arg(long, default_value_t = ShootOptions::default().rtol)]
    rtol: f64,
    /// Fixed start radius; scaled with α when omitted
    #[arg(long)]
    eps: Option<f64>,
    /// Ratio between consecutive α in the sweep
    #[arg(long, default_value_t = ShootOptions::default().sweep_factor)]
    sweep_factor: f64,
    #[arg(long, default_value_t = ShootOptions::default().bisection_steps)]
    bisection_steps: usize,
}

impl ShootFlags {
    fn options(&self) -> ShootOptions {
        ShootOptions {
            rtol: self.rtol,
            eps: self.eps,
            sweep_factor: self.sweep_factor,
            bisection_steps: self.bisection_steps,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Dimension constants, closed form against quadrature
    Constants {
        #[arg(long)]
        n: u32,
        /// Emit the JSON report (the default output)
        #[arg(long)]
        json: bool,
    },
    /// Green's function constants at a point of the ball
    Geometry {
        #[arg(long)]
        n: u32,
        /// `0`, a distance along the first axis, or all n coordinates
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0")]
        y0: Vec<f64>,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        json: bool,
    },
    /// Sufficient existence conditions and the energy inequality on a λ grid
    Criterion {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
        lambdas: Vec<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Nonexistence certificate for a radial non-increasing K
    Certify {
        #[arg(long)]
        config: PathBuf,
        /// Also evaluate the two intermediate identities on a computed solution
        #[arg(long)]
        check_intermediate: bool,
        #[arg(long, default_value_t = 0.1)]
        alpha_min: f64,
        #[arg(long, default_value_t = 1e4)]
        alpha_max: f64,
        #[arg(long)]
        json: bool,
    },
    /// Radial ground state by shooting on u(0) = α
    Shoot {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        alpha_min: f64,
        #[arg(long, default_value_t = 1e4)]
        alpha_max: f64,
        /// Write the profile (or the sweep when nothing is found) as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        shoot: ShootFlags,
        #[arg(long)]
        json: bool,
    },
    /// The nonnegative multiplier and its certificates
    Psibar {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        mu: f64,
        /// Number of sample intervals on [0, 1]
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Write samples as CSV to stdout instead of the JSON report
        #[arg(long)]
        csv: bool,
    },
    /// The five-dimensional cubic example, checked both ways
    Example11 {
        /// Quadratic coefficient; defaults to the equality value
        #[arg(long, allow_negative_numbers = true)]
        a: Option<f64>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        f0: f64,
        #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
        lambdas: Vec<f64>,
    },
    /// Verdict table over a μ grid: criterion, certificate and shooting
    Dichotomy {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        mus: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
        lambdas: Vec<f64>,
        #[arg(long, default_value_t = 0.1)]
        alpha_min: f64,
        /// Large enough to reach the concentrated ground states near μ*
        #[arg(long, default_value_t = 1e7)]
        alpha_max: f64,
        #[command(flatten)]
        shoot: ShootFlags,
        /// Print a plain-text table instead of the JSON report
        #[arg(long)]
        table: bool,
        #[arg(long)]
        json: bool,
    },
}

enum Output {
    Report(&'static str, Outcome),
    Text(String),
}

fn dispatch(command: Command) -> Result<Output, Failure> {
    Ok(match command {
        Command::Constants { n, .. } => Output::Report("constants", commands::constants(n)?),
        Command::Geometry { n, y0, mu, .. } => {
            Output::Report("geometry", commands::geometry(n, &y0, mu)?)
        }
        Command::Criterion { config, lambdas, .. } => {
            Output::Report("criterion", commands::criterion(&config, &lambdas)?)
        }
        Command::Certify { config, check_intermediate, alpha_min, alpha_max, .. } => Output::Report(
            "certify",
            commands::certify(&config, check_intermediate, (alpha_min, alpha_max))?,
        ),
        Command::Shoot { config, alpha_min, alpha_max, csv, shoot, .. } => {
            let args = ShootArgs {
                config: &config,
                alpha_min,
                alpha_max,
                opts: shoot.options(),
                csv: csv.as_deref(),
            };
            Output::Report("shoot", commands::shoot(&args)?)
        }
        Command::Psibar { n, mu, points, csv } => match commands::psibar(n, mu, points, csv)? {
            PsibarOutput::Report(o) => Output::Report("psibar", o),
            PsibarOutput::Csv(s) => Output::Text(s),
        },
        Command::Example11 { a, b, mu, f0, lambdas } => {
            Output::Report("example11", commands::example11(a, b, mu, f0, &lambdas)?)
        }
        Command::Dichotomy { config, mus, lambdas, alpha_min, alpha_max, shoot, table, .. } => {
            let args = DichotomyArgs {
                config: &config,
                mus: &mus,
                lambdas: &lambdas,
                alpha_min,
                alpha_max,
                opts: shoot.options(),
            };
            let (outcome, rows) = commands::dichotomy(&args)?;
            if table {
                Output::Text(commands::dichotomy_table(&rows))
            } else {
                Output::Report("dichotomy", outcome)
            }
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let output = match dispatch(cli.command) {
        Ok(o) => o,
        Err(Failure::Config(e)) => {
            eprintln!("critex: {e}");
            return ExitCode::from(2);
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("critex: {msg}");
            return ExitCode::from(1);
        }
    };
    let text = match output {
        Output::Text(s) => s,
        Output::Report(command, outcome) => {
            let report = Report::new(command, outcome, start.elapsed());
            match serde_json::to_string_pretty(&report) {
                Ok(s) => s + "\n",
                Err(e) => {
                    eprintln!("critex: serialization failed: {e}");
                    return ExitCode::from(1);
                }
            }
        }
    };
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
