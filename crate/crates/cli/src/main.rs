//! `lien`: batch computations over finite spaces from JSON inputs.
//!
//! Exit codes: 0 success, 2 invalid input or failed verification, 3 search
//! budget exhausted, 4 internal invariant breach.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod input;
mod report;

use report::{Format, Report};

#[derive(Parser, Debug)]
#[command(name = "lien", version, about = "Sheaves, torsors, descent and gerbes over finite spaces")]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Limit on enumerated candidates and search nodes.
    #[arg(long, global = true, env = "LIEN_BUDGET", default_value_t = 10_000_000)]
    budget: u64,
    /// Limit on arrows of descent groupoids.
    #[arg(long, global = true, default_value_t = 100_000_000)]
    arrows: u64,
    /// Worker threads for enumerations; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Append wall-clock time to the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Prestack,
    Stack,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Ȟ¹ of a nerve with a constant group.
    H1 {
        #[arg(long)]
        nerve: Option<PathBuf>,
        /// A space; its cover comes from --cover or is the minimal one.
        #[arg(long, conflicts_with = "nerve")]
        space: Option<PathBuf>,
        #[arg(long, requires = "space")]
        cover: Option<PathBuf>,
        /// Built-in name (Z2, S3, Z2xZ2, ...) or a JSON group file.
        #[arg(long)]
        group: String,
    },
    /// Ȟ² of a band.
    H2 {
        #[arg(long)]
        nerve: Option<PathBuf>,
        #[arg(long)]
        band: PathBuf,
    },
    /// Isomorphism classes of torsors under a constant group, by
    /// enumerating torsors.
    ClassifyTorsors {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        group: String,
    },
    /// Prestack and stack checks for a presheaf of groupoids.
    #[command(alias = "descent")]
    DescentCheck {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        presheaf: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        check: CheckKind,
    },
    /// The associated stack of a prestack.
    Stackify {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        presheaf: PathBuf,
    },
    /// The obstruction ξ of gluing data and a correction when one exists.
    Obstruction {
        #[arg(long)]
        nerve: Option<PathBuf>,
        #[arg(long)]
        band: Option<PathBuf>,
        #[arg(long)]
        cocycle2: PathBuf,
    },
    /// Cocycle to gerbe and back.
    GerbeRoundtrip {
        #[arg(long)]
        nerve: Option<PathBuf>,
        #[arg(long)]
        band: Option<PathBuf>,
        #[arg(long)]
        cocycle2: PathBuf,
    },
    /// Band and class of a finite groupoid extension.
    ExtensionClass {
        #[arg(long)]
        extension: PathBuf,
    },
    /// Validate a band, a 1-cocycle or a 2-cocycle.
    Verify {
        #[arg(long)]
        nerve: Option<PathBuf>,
        #[arg(long)]
        band: Option<PathBuf>,
        #[arg(long, conflicts_with = "cocycle2")]
        cocycle1: Option<PathBuf>,
        #[arg(long)]
        cocycle2: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Lien(lien::Error),
    /// A completed report whose verdict is a validation failure.
    Failed(Box<Report>),
}

impl From<lien::Error> for CliError {
    fn from(e: lien::Error) -> Self {
        CliError::Lien(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let budget = lien::Budget::default().with_search(cli.budget).with_arrows(cli.arrows);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return ExitCode::from(4);
        }
    };
    let outcome = pool.install(|| commands::run(&cli.command, &budget));
    let finish = |mut r: Report| {
        r.budget = cli.budget;
        if cli.timing {
            r.timing_ms = Some(start.elapsed().as_millis());
        }
        print!("{}", r.render(cli.format));
    };
    match outcome {
        Ok(r) => {
            finish(r);
            ExitCode::SUCCESS
        }
        Err(CliError::Failed(r)) => {
            if let Some(d) = r.get("diagnostic").and_then(|d| d.as_str()) {
                eprintln!("invalid: {d}");
            }
            finish(*r);
            ExitCode::from(2)
        }
        Err(CliError::Invalid(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Lien(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_budget() {
                3
            } else if e.is_internal() {
                4
            } else {
                2
            })
        }
    }
}
