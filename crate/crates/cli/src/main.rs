use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use cauchy_well::analysis::emit::write_file;
use cauchy_well::analysis::{
    oracle_check, read_solution, report_to_csv, reproduce_tables, solution_residual, solution_to_json, Tolerances,
};
use cauchy_well::operator::{apply_closed_normalized, boundary_value};
use cauchy_well::series::eigenvalue_from_series;
use cauchy_well::solver::{solve_state, SolveOptions, DEFAULT_IMAG_TOL};
use cauchy_well::trial::{expand_trial, make_trial, sweep, trial_residual, DEFAULT_GAMMA_TERMS, THETA_DENOMINATOR};
use cauchy_well::{Error, Parity, PrecisionPolicy, PvSettings, TrialKind, Weighted64};

/// Number of Taylor coefficients shown for trial functions and used for
/// their series eigenvalue estimate.
const TRIAL_EXPANSION_TERMS: usize = 10;

#[derive(Debug, Parser)]
#[command(
    name = "cauchy-well",
    version,
    about = "Eigenpairs of the Cauchy operator on an interval"
)]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Mantissa bits for the eigen-solve; 0 keeps binary64.
    #[arg(long, global = true, env = "CAUCHY_WELL_PRECISION_BITS", default_value_t = 0)]
    precision_bits: u32,

    /// Raise precision automatically with the degree (binary64 up to 120).
    #[arg(long, global = true, conflicts_with = "precision_bits")]
    auto_precision: bool,

    /// Largest accepted imaginary part, relative to 1 + |Re E|.
    #[arg(long, global = true, default_value_t = DEFAULT_IMAG_TOL)]
    imag_tol: f64,

    /// Chebyshev points of residual grids.
    #[arg(long, global = true, default_value_t = 4001)]
    grid_points: usize,

    /// Truncation of the trial-function image series.
    #[arg(long, visible_alias = "terms", global = true, default_value_t = DEFAULT_GAMMA_TERMS)]
    gamma_terms: usize,

    /// TOML file with regression tolerances.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the truncated eigenproblem for one state.
    Solve {
        #[arg(long)]
        parity: ParityArg,
        /// Polynomial degree (even for even parity, odd for odd).
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        /// Write the solution document here instead of the output stream.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Also write the residual grid as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Closed-form image of a weighted polynomial.
    Apply {
        /// Comma-separated coefficients, or a file holding them.
        #[arg(long)]
        coeffs: String,
        #[arg(long)]
        parity: ParityArg,
    },
    /// Build a trial function and report its residual.
    Trial {
        #[arg(long)]
        kind: KindArg,
        /// Numerator of the angle in units of pi/4096.
        #[arg(long)]
        theta: u32,
        #[arg(long = "E")]
        e: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Residual supremum over a range of trial angles.
    Sweep {
        #[arg(long)]
        kind: KindArg,
        #[arg(long)]
        theta_from: u32,
        #[arg(long)]
        theta_to: u32,
        #[arg(long = "E")]
        e: f64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Residual of a stored solution.
    Residual {
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Reproduce the reference tables and report deviations.
    Tables {
        #[arg(long, default_value_t = 100)]
        max_degree: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Compare the closed-form operator against quadrature on random inputs.
    OracleCheck {
        /// Largest polynomial degree drawn.
        #[arg(long, default_value_t = 20)]
        degree: usize,
        #[arg(long, default_value_t = 25)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 1e-7)]
        tolerance: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ParityArg {
    Even,
    Odd,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Self {
        match p {
            ParityArg::Even => Parity::Even,
            ParityArg::Odd => Parity::Odd,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Ground,
    Excited,
}

impl From<KindArg> for TrialKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Ground => TrialKind::GroundCos,
            KindArg::Excited => TrialKind::ExcitedSinCos,
        }
    }
}

/// Why the process stops with a non-zero status.
enum Failure {
    Run(Error),
    /// A regression comparison ran to completion and did not pass.
    Regression(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Regression(msg)) => {
            eprintln!("cauchy-well: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Run(e)) => {
            eprintln!("cauchy-well: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Numerical { .. } | Error::RankUnavailable { .. } | Error::Quadrature { .. } => 2,
        _ => 1,
    }
}

impl Global {
    fn validate(&self) -> Result<(), Error> {
        if self.precision_bits != 0 && !(64..=4096).contains(&self.precision_bits) {
            return Err(Error::Usage(format!(
                "--precision-bits must be 0 or within 64..=4096, got {}",
                self.precision_bits
            )));
        }
        if self.grid_points < 2 {
            return Err(Error::Usage(format!(
                "--grid-points must be at least 2, got {}",
                self.grid_points
            )));
        }
        if self.imag_tol.is_nan() || self.imag_tol < 0.0 {
            return Err(Error::Usage(format!(
                "--imag-tol must be non-negative, got {}",
                self.imag_tol
            )));
        }
        if self.gamma_terms == 0 {
            return Err(Error::Usage("--gamma-terms must be at least 1".into()));
        }
        Ok(())
    }

    fn solve_options(&self) -> SolveOptions {
        let precision = if self.auto_precision {
            PrecisionPolicy::Auto
        } else if self.precision_bits == 0 {
            PrecisionPolicy::Machine
        } else {
            PrecisionPolicy::Bits(self.precision_bits)
        };
        SolveOptions {
            precision,
            imag_tol: self.imag_tol,
        }
    }

    fn tolerances(&self) -> Result<Tolerances, Error> {
        match &self.config {
            Some(path) => Tolerances::from_path(path),
            None => Ok(Tolerances::default()),
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let g = &cli.global;
    g.validate()?;
    match cli.command {
        Command::Solve {
            parity,
            degree,
            rank,
            json,
            csv,
        } => {
            let sol = solve_state(parity.into(), degree, rank, &g.solve_options())?;
            emit(json.as_deref(), &solution_to_json(&sol)?)?;
            if let Some(path) = csv {
                write_file(&path, &report_to_csv(&solution_residual(&sol, g.grid_points)?)?)?;
            }
            eprintln!(
                "E = {:.9}  C = {:.9}  ({} bits)",
                sol.e,
                sol.norm_c.unwrap_or(f64::NAN),
                sol.precision_bits
            );
        }
        Command::Apply { coeffs, parity } => {
            let alphas = parse_coeffs(&coeffs)?;
            let psi = Weighted64::new(parity.into(), alphas)?;
            let image = apply_closed_normalized(&psi)?;
            let doc = json!({
                "image": image.coeffs(),
                "boundary_value": boundary_value(&image),
            });
            println!("{}", pretty(&doc));
        }
        Command::Trial { kind, theta, e, csv } => {
            let trial = make_trial(kind.into(), theta, g.gamma_terms)?;
            let expansion = expand_trial(&trial, TRIAL_EXPANSION_TERMS);
            let series = eigenvalue_from_series(&expansion, trial.parity())?;
            let report = trial_residual(&trial, e, g.grid_points)?;
            let doc = json!({
                "kind": trial.kind,
                "theta_num": theta,
                "theta": trial.theta(),
                "gamma_terms": trial.gamma_terms,
                "C": trial.norm_c,
                "expansion": expansion,
                "series_E": series.value,
                "E": e,
                "boundary_limit": report.boundary_limit,
                "sup": report.sup,
                "sup_at": report.sup_at,
            });
            println!("{}", pretty(&doc));
            if let Some(path) = csv {
                write_file(&path, &report_to_csv(&report)?)?;
            }
        }
        Command::Sweep {
            kind,
            theta_from,
            theta_to,
            e,
            json,
        } => {
            let result = sweep(kind.into(), theta_from..=theta_to, e, g.gamma_terms, g.grid_points)?;
            emit(json.as_deref(), &pretty(&result))?;
            eprintln!(
                "argmin theta = {}/{THETA_DENOMINATOR} pi, sup = {:.6}",
                result.argmin.theta_num, result.argmin.sup
            );
        }
        Command::Residual { solution, csv } => {
            let sol = read_solution(&solution)?;
            let report = solution_residual(&sol, g.grid_points)?;
            let doc = json!({
                "E": report.e_used,
                "sup": report.sup,
                "sup_at": report.sup_at,
                "boundary_limit": report.boundary_limit,
            });
            println!("{}", pretty(&doc));
            if let Some(path) = csv {
                write_file(&path, &report_to_csv(&report)?)?;
            }
        }
        Command::Tables { max_degree, json } => {
            let report = reproduce_tables(max_degree, &g.solve_options(), &g.tolerances()?)?;
            for c in &report.comparisons {
                let worst = c
                    .fields
                    .iter()
                    .max_by(|a, b| (a.deviation / a.tolerance).total_cmp(&(b.deviation / b.tolerance)));
                let status = if c.pass { "ok" } else { "FAIL" };
                match worst {
                    Some(w) => println!(
                        "{:<10} {status:<4} E = {:.7}  worst {} deviation {:.2e} (tol {:.0e})",
                        c.row, c.fields[0].computed, w.field, w.deviation, w.tolerance
                    ),
                    None => println!("{:<10} {status}", c.row),
                }
            }
            for i in &report.interleaving {
                println!(
                    "n={:<8} {:<4} interleaving {:?}",
                    i.n,
                    if i.ordered { "ok" } else { "FAIL" },
                    i.values
                );
            }
            if let Some(path) = json {
                write_file(&path, &pretty(&report))?;
            }
            if !report.pass {
                let failed = report.comparisons.iter().filter(|c| !c.pass).count();
                return Err(Failure::Regression(format!(
                    "{failed} reference row(s) outside tolerance"
                )));
            }
        }
        Command::OracleCheck {
            degree,
            points,
            seed,
            count,
            tolerance,
        } => {
            let report = oracle_check(degree, points, count, seed, tolerance, &PvSettings::default())?;
            println!("{}", pretty(&report));
            if !report.pass {
                return Err(Failure::Regression(format!(
                    "largest deviation {:e} exceeds {tolerance:e}",
                    report.max_deviation
                )));
            }
        }
    }
    Ok(())
}

fn pretty(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

/// Writes to `path` or, without one, to the output stream.
fn emit(path: Option<&Path>, contents: &str) -> Result<(), Error> {
    match path {
        Some(p) => write_file(p, contents),
        None => {
            print!("{contents}");
            if !contents.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

/// Accepts `1,-0.4` inline or the path of a file with whitespace- or
/// comma-separated values.
fn parse_coeffs(spec: &str) -> Result<Vec<f64>, Error> {
    let path = Path::new(spec);
    let text = if path.is_file() {
        std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?
    } else {
        spec.to_string()
    };
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|e| Error::Parse(format!("coefficient `{t}`: {e}")))
        })
        .collect()
}
