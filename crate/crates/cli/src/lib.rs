//! Command-line front end: argument parsing, dispatch and report output.
//!
//! Exit codes: 0 when the checked property holds or the solver converged,
//! 1 when it is violated, infeasible or not converged, 2 on input errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use softfix_core::descriptor::{parse_descriptor, Model, SpaceDescriptor};
use softfix_core::fixed_point::ContractionKind;
use softfix_core::topology::Region;

pub mod args;
mod commands;

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "softfix",
    version,
    about = "Soft metric spaces and certified fixed points"
)]
struct Cli {
    /// Also write the report as JSON to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json_out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Banach,
    Kannan,
    Chatterjea,
}

impl From<KindArg> for ContractionKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Banach => ContractionKind::Banach,
            KindArg::Kannan => ContractionKind::Kannan,
            KindArg::Chatterjea => ContractionKind::Chatterjea,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum QueryArg {
    Interior,
    Closure,
    Boundary,
}

impl From<QueryArg> for Region {
    fn from(q: QueryArg) -> Self {
        match q {
            QueryArg::Interior => Region::Interior,
            QueryArg::Closure => Region::Closure,
            QueryArg::Boundary => Region::Boundary,
        }
    }
}

#[derive(Debug, Clone, Copy, clap::Args)]
struct Sampling {
    /// Sample count for analytic spaces.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the soft metric axioms.
    Check {
        file: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Repair a finite distance table into a soft metric.
    Repair {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate a contraction coefficient for the descriptor's mapping.
    Contract {
        file: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Run the Picard iteration with an a priori stopping rule.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Starting soft point.
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 1_000)]
        max_iter: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Closure, interior or boundary membership of a soft point.
    Topology {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        set: String,
        #[arg(long, value_enum)]
        query: QueryArg,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Separate two disjoint closed soft sets by open sets.
    Separate {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        f1: String,
        #[arg(long, allow_hyphen_values = true)]
        f2: String,
    },
    /// Replay a built-in worked example (3.2, 4.12 or 4.14).
    Example { id: String },
}

/// A finished command: exit code, human-readable text and JSON report.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub text: String,
    pub report: Value,
}

impl Outcome {
    fn new(code: i32, lines: Vec<String>, report: Value) -> Self {
        let mut text = lines.join("\n");
        text.push('\n');
        Outcome { code, text, report }
    }
}

pub(crate) fn load(path: &Path) -> Result<(SpaceDescriptor, Model), String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let descriptor = parse_descriptor(&text).map_err(|d| format!("{}: {d}", path.display()))?;
    let model = descriptor
        .build()
        .map_err(|d| format!("{}: {d}", path.display()))?;
    Ok((descriptor, model))
}

fn dispatch(command: Command) -> Result<Outcome, String> {
    match command {
        Command::Check { file, sampling } => {
            commands::check(&file, sampling.samples, sampling.seed)
        }
        Command::Repair { file, out } => commands::repair(&file, &out),
        Command::Contract {
            file,
            kind,
            sampling,
        } => commands::contract(&file, kind.into(), sampling.samples, sampling.seed),
        Command::Solve {
            file,
            kind,
            x0,
            tol,
            max_iter,
            sampling,
        } => commands::solve(
            &file,
            kind.into(),
            &x0,
            tol,
            max_iter,
            sampling.samples,
            sampling.seed,
        ),
        Command::Topology {
            file,
            set,
            query,
            point,
        } => commands::topology(&file, &set, query.into(), &point),
        Command::Separate { file, f1, f2 } => commands::separate(&file, &f1, &f2),
        Command::Example { id } => commands::example(&id),
    }
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Check { .. } => "check",
        Command::Repair { .. } => "repair",
        Command::Contract { .. } => "contract",
        Command::Solve { .. } => "solve",
        Command::Topology { .. } => "topology",
        Command::Separate { .. } => "separate",
        Command::Example { .. } => "example",
    }
}

/// Parses `args` (program name first), runs the command, writes the human
/// report to `out` and diagnostics to `err`, and returns the exit code.
pub fn run_command<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_HOLDS
            };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let name = command_name(&cli.command);
    let (code, report) = match dispatch(cli.command) {
        Ok(outcome) => {
            let _ = out.write_all(outcome.text.as_bytes());
            (outcome.code, outcome.report)
        }
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            (EXIT_INPUT, json!({ "error": message }))
        }
    };
    if let Some(path) = cli.json_out {
        let document = json!({ "command": name, "exit_code": code, "report": report });
        let text = serde_json::to_string_pretty(&document).expect("reports serialize");
        if let Err(e) = std::fs::write(&path, text) {
            let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
            return EXIT_INPUT;
        }
    }
    code
}
