mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use gcms::shift_space::{MatrixKind, Symbol, TransitionMatrix};
use gcms::thermo::Potential;

use crate::output::Format;

#[derive(Parser, Debug)]
#[command(name = "gcms", version, about = "Generalized countable Markov shifts: counting, cylinders, pressure and conformal measures")]
pub struct Cli {
    /// Built-in transition matrix
    #[arg(long, global = true, value_enum, default_value = "renewal", conflicts_with = "matrix_file")]
    pub kind: Kind,
    /// JSON file with a matrix kind, e.g. {"kind":"full_shift","size":3}
    #[arg(long, global = true)]
    pub matrix_file: Option<PathBuf>,
    /// Largest prime with its own family for --kind prime_renewal
    #[arg(long, global = true, default_value_t = 7)]
    pub prime_bound: Symbol,
    /// Potential: one, log, or const=<c>
    #[arg(long, global = true, default_value = "one")]
    pub potential: String,
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// start:stop:step, inclusive
    #[arg(long, global = true)]
    pub beta_grid: Option<String>,
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 6)]
    pub symbol_bound: Symbol,
    #[arg(long, global = true, default_value_t = 400)]
    pub length_cap: usize,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Kind {
    Renewal,
    PairRenewal,
    PrimeRenewal,
    AlternatingRenewal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Cylinders,
    Conformality,
    Pressure,
    Partition,
    Superadditivity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum ModelChoice {
    Y,
    Convex,
    Sarig,
    PairCritical,
    Log,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Preimage counts of empty-stem configurations against closed forms
    Count {
        #[arg(long)]
        family: Option<u64>,
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
    /// Existence of conformal probabilities on Σ_A and on each Y family over a β grid
    Phase,
    /// Runs one invariant suite; exit code 1 on failure
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Word length for the cylinder and conformality suites
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Distance to the critical measure on a cylinder basis as β decreases to the critical value
    Converge {
        #[arg(long, default_value_t = 5)]
        depth: usize,
        /// Offsets above the critical β
        #[arg(long, value_delimiter = ',', default_values_t = vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5])]
        offsets: Vec<f64>,
        /// One row per basis set instead of one per β
        #[arg(long)]
        detail: bool,
    },
    /// Report for one measure: total mass, DU residual, coefficients
    Measure {
        #[arg(long, value_enum)]
        model: Option<ModelChoice>,
        #[arg(long, default_value_t = 1)]
        family: u64,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Normal form of an intersection such as "C[2.1] & !C[3;inv=2]"
    Decompose {
        #[arg(long)]
        expr: String,
        /// Also evaluate the Y-family measure of this family at --beta
        #[arg(long)]
        family: Option<u64>,
    },
    /// (1/n) log Z_n and the pressure estimate over a β grid
    Pressure {
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        base: Symbol,
    },
}

impl Cli {
    pub fn matrix(&self) -> Result<TransitionMatrix> {
        if let Some(p) = &self.matrix_file {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            return Ok(TransitionMatrix::from_json(&text)?);
        }
        Ok(TransitionMatrix::new(match self.kind {
            Kind::Renewal => MatrixKind::Renewal,
            Kind::PairRenewal => MatrixKind::PairRenewal,
            Kind::PrimeRenewal => MatrixKind::PrimeRenewal { prime_bound: self.prime_bound },
            Kind::AlternatingRenewal => MatrixKind::AlternatingRenewal,
        })?)
    }

    pub fn potential(&self) -> Result<Potential> {
        match self.potential.trim() {
            "one" => Ok(Potential::Constant(1.0)),
            "log" => Ok(Potential::LogRatio),
            other => match other.strip_prefix("const=") {
                Some(c) => Ok(Potential::Constant(c.parse().with_context(|| format!("bad constant {c:?}"))?)),
                None => bail!("unknown potential {other:?}; use one, log or const=<c>"),
            },
        }
    }

    pub fn betas(&self) -> Result<Vec<f64>> {
        if let Some(g) = &self.beta_grid {
            let parts: Vec<f64> = g.split(':').map(|p| p.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().with_context(|| format!("bad grid {g:?}"))?;
            let [start, stop, step] = parts[..] else { bail!("grid must be start:stop:step") };
            if !(step > 0.0) || stop < start {
                bail!("grid must have step > 0 and stop ≥ start");
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            // rounded so that 0.8 + 1·0.05 prints as 0.85
            return Ok((0..=n).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect());
        }
        match self.beta {
            Some(b) => Ok(vec![b]),
            None => bail!("this command needs --beta or --beta-grid"),
        }
    }

    pub fn beta(&self) -> Result<f64> {
        self.beta.context("this command needs --beta")
    }
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("GCMS_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("GCMS_THREADS={v:?} is not a number"))?;
        if n > 0 {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.tol <= 0.0 {
        eprintln!("error: --tol must be positive");
        return ExitCode::from(2);
    }
    match init_threads().and_then(|_| commands::run(&cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("gcms").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn grid_is_inclusive_and_rounded() {
        let cli = parse(&["phase", "--beta-grid", "0.8:1.0:0.05"]);
        assert_eq!(cli.betas().unwrap(), vec![0.8, 0.85, 0.9, 0.95, 1.0]);
        assert!(parse(&["phase", "--beta-grid", "1:2"]).betas().is_err());
        assert!(parse(&["phase", "--beta-grid", "1:2:0"]).betas().is_err());
    }

    #[test]
    fn potentials() {
        assert_eq!(parse(&["phase"]).potential().unwrap(), Potential::Constant(1.0));
        assert_eq!(parse(&["--potential", "const=-2.5", "phase"]).potential().unwrap(), Potential::Constant(-2.5));
        assert_eq!(parse(&["--potential", "log", "phase"]).potential().unwrap(), Potential::LogRatio);
        assert!(parse(&["--potential", "cubic", "phase"]).potential().is_err());
    }

    #[test]
    fn kinds_use_snake_case() {
        let cli = parse(&["count", "--kind", "pair_renewal"]);
        assert_eq!(cli.matrix().unwrap().name(), "pair_renewal");
        assert!(Cli::try_parse_from(["gcms", "--kind", "renewal", "--matrix-file", "x.json", "phase"]).is_err());
    }
}
