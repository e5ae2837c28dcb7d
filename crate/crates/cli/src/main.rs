use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use orbitred_cli::commands;
use orbitred_cli::problem::Flags;
use orbitred_cli::{CliError, CliResult, ReportDoc};

/// Reduce symmetry-invariant polynomial potentials in orbit-space coordinates.
#[derive(Parser)]
#[command(name = "orbitred", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the matrix of gradient scalar products of the invariants.
    Pmatrix { problem: PathBuf },
    /// Print the default truncation degree of the basis.
    StabilityOrder { problem: PathBuf },
    /// Print the most general invariant potential and its coefficient count.
    GeneralPotential {
        problem: PathBuf,
        /// Highest weighted degree (defaults to the stability order).
        #[arg(long)]
        degree: Option<u32>,
    },
    /// Check whether one term of the potential can be eliminated.
    CheckTerm {
        problem: PathBuf,
        /// A single term such as `c2*J1^3`.
        #[arg(long)]
        term: String,
        #[arg(long)]
        mode: Option<String>,
    },
    /// Reduce the potential degree by degree.
    Reduce {
        problem: PathBuf,
        #[command(flatten)]
        opts: ReduceArgs,
        /// Write the JSON report to this path.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Print the JSON report instead of the text summary.
        #[arg(long)]
        json: bool,
    },
    /// Check a stored report against the problem and test it numerically.
    Verify {
        problem: PathBuf,
        #[arg(long)]
        report: PathBuf,
        /// Parameter value, `NAME=NUMBER`; repeatable.
        #[arg(long = "set", value_name = "NAME=NUMBER")]
        set: Vec<String>,
        /// Value for every parameter not given with --set.
        #[arg(long)]
        default_value: Option<f64>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Overrides the seed recorded in the report.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct ReduceArgs {
    /// `fixed` or `varying`.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    truncate: Option<u32>,
    /// `max_eliminate` or `keep_set`.
    #[arg(long)]
    strategy: Option<String>,
    /// Monomial to keep; repeatable, implies the keep_set strategy.
    #[arg(long)]
    keep: Vec<String>,
    /// `keep_earliest` or `keep_latest`.
    #[arg(long)]
    tie_break: Option<String>,
    #[arg(long)]
    max_sets: Option<usize>,
    /// Explicit monomial order for one stage: `DEGREE:T1,T2,...[;G1,G2,...]`.
    #[arg(long)]
    order: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
}

impl From<ReduceArgs> for Flags {
    fn from(a: ReduceArgs) -> Self {
        Flags {
            mode: a.mode,
            truncate: a.truncate,
            strategy: a.strategy,
            keep: a.keep,
            tie_break: a.tie_break,
            max_sets: a.max_sets,
            order: a.order,
            seed: a.seed,
        }
    }
}

/// Text for stdout and whether the command succeeded.
fn run(cmd: Command) -> CliResult<(String, bool)> {
    match cmd {
        Command::Pmatrix { problem } => {
            Ok((commands::pmatrix(&commands::load_problem(&problem)?)?, true))
        }
        Command::StabilityOrder { problem } => Ok((
            commands::stability_order(&commands::load_problem(&problem)?),
            true,
        )),
        Command::GeneralPotential { problem, degree } => Ok((
            commands::general_potential(&commands::load_problem(&problem)?, degree),
            true,
        )),
        Command::CheckTerm {
            problem,
            term,
            mode,
        } => Ok((
            commands::check_term(&commands::load_problem(&problem)?, &term, mode.as_deref())?,
            true,
        )),
        Command::Reduce {
            problem,
            opts,
            report,
            json,
        } => {
            let p = commands::load_problem(&problem)?;
            let settings = p.settings.with_flags(&opts.into())?;
            let (r, doc) = commands::run_reduction(&p, &settings)?;
            let text = doc.to_json();
            if let Some(path) = report {
                std::fs::write(&path, &text)
                    .map_err(|e| CliError::input("output", format!("{}: {e}", path.display())))?;
            }
            Ok((
                if json {
                    text
                } else {
                    commands::reduce_text(&p, &r)
                },
                true,
            ))
        }
        Command::Verify {
            problem,
            report,
            set,
            default_value,
            samples,
            seed,
        } => {
            let p = commands::load_problem(&problem)?;
            let doc = ReportDoc::from_json(&commands::read_file(&report, "report")?)?;
            let values = commands::assignments(&p, &set, default_value)?;
            let out = commands::verify(&p, &doc, values, samples, seed)?;
            Ok((out.text, out.pass))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("usage: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok((text, pass)) => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
