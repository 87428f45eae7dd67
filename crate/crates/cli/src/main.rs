//! `radunc`: reproducible radial-uncertainty experiments.
//!
//! Exit status is 0 when every embedded check passes, 1 when a check fails,
//! and 2 on usage or computation errors.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;
mod tolerance;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{PotentialArg, SolveArgs};
use output::Format;
use tolerance::{parse_override, Tolerance, Tolerances};

#[derive(Parser, Debug)]
#[command(name = "radunc", version, about = "Radial coordinate and momentum uncertainties in central potentials")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for row-parallel commands [default: one per CPU].
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    workers: Option<u32>,
    /// Override a check tolerance, e.g. `--tol ibp=1e-4`. Repeatable.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE", value_parser = parse_override)]
    tolerances: Vec<(Tolerance, f64)>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact variances and products for every (n, l) with n <= N.
    Table {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=200))]
        n_max: u32,
    },
    /// Quadrature audit of one hydrogen state against the exact values.
    Verify {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        l: u32,
    },
    /// Scan of the Weyl integral over alpha.
    Weyl {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        l: u32,
        #[arg(long, default_value_t = 41, value_parser = clap::value_parser!(u32).range(3..))]
        alphas: u32,
    },
    /// Minimum-uncertainty states at the given mean/sigma ratios.
    Minstate {
        #[arg(long, value_delimiter = ',', default_value = "5,10,20")]
        ratios: Vec<f64>,
    },
    /// Solve for one bound state of a central potential.
    Solve {
        /// `coulomb`, `harmonic`, or a two-column potential table.
        #[arg(long)]
        potential: PotentialArg,
        #[arg(long, default_value_t = 0)]
        l: u32,
        #[arg(long, default_value_t = 0)]
        nodes: u32,
        /// Energy bracket `LO,HI`.
        #[arg(long, value_parser = parse_bracket, allow_hyphen_values = true)]
        bracket: (f64, f64),
        #[arg(long, default_value_t = 1.0)]
        charge: f64,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
    },
}

fn parse_bracket(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or_else(|| format!("expected LO,HI, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("invalid bound {v:?}: {e}"));
    let (lo, hi) = (parse(lo)?, parse(hi)?);
    if !(lo < hi) {
        return Err(format!("bracket needs LO < HI, got {lo},{hi}"));
    }
    Ok((lo, hi))
}

fn run(cli: &Cli) -> Result<bool, String> {
    let tol = Tolerances::new(&cli.tolerances);
    let report = match &cli.command {
        Command::Table { n_max } => commands::table(*n_max),
        Command::Verify { n, l } => commands::verify(*n, *l, &tol),
        Command::Weyl { n, l, alphas } => commands::weyl(*n, *l, *alphas as usize, &tol),
        Command::Minstate { ratios } => commands::minstate(ratios, &tol),
        Command::Solve { potential, l, nodes, bracket, charge, omega } => commands::solve(
            &SolveArgs {
                potential: potential.clone(),
                l: *l,
                nodes: *nodes,
                bracket: *bracket,
                charge: *charge,
                omega: *omega,
            },
            &tol,
        ),
    }
    .map_err(|e| e.to_string())?;
    let text = report.render(cli.format);
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(report.all_passed())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    // Zero lets rayon pick the thread count.
    let threads = cli.workers.map_or(0, |w| w as usize);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build();
    let outcome = match pool {
        Ok(pool) => pool.install(|| run(&cli)),
        Err(e) => Err(format!("cannot start worker pool: {e}")),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
