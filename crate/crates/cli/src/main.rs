//! `charvar`: batch verification reports for the character variety of 8_18.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use charvar_core::catalog::ComponentId;
use charvar_core::C64;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "charvar",
    version,
    about = "Verification reports for the SL(2,C) character variety of 8_18"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List every component's samples at one value of t.
    Catalog {
        /// Meridian trace, e.g. 3, 2+0.5i, -1.5-2i.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        t: C64,
        #[arg(long)]
        component: Option<ComponentId>,
        /// Bound on the normalized membership residual.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Sample, realize as matrices, and check the Wirtinger relators.
    Verify {
        /// Meridian trace; random admissible values are drawn when omitted.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        t: Option<C64>,
        #[arg(long)]
        component: Option<ComponentId>,
        /// Number of random t values when --t is omitted.
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relator bound; trace equations use tol/10, membership tol/1000.
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// The parabolic census at t = 2.
    Parabolic {
        #[command(flatten)]
        output: Output,
    },
    /// Universal trace and matrix identities on random quadruples.
    Identities {
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Perturb s12 before evaluating the trace identities.
        #[arg(long)]
        fault: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Random-start Newton search for solutions at one t, classified by component.
    Explore {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        t: C64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        attempts: u64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Parses `a+bi` with either part optional.
fn parse_complex(s: &str) -> Result<C64, String> {
    let z: C64 = s
        .trim()
        .parse()
        .map_err(|e| format!("'{s}' is not a complex number: {e}"))?;
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = commands::run(cli.command);
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
