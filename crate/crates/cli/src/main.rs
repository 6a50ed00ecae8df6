//! `diagcat`: batch command line for rook-Brauer type diagram algebras.
//!
//! Exit codes: 0 all assertions hold, 1 an assertion failed (a witness is
//! printed), 2 usage or input error, 3 refused by the resource guard.

mod commands;
mod input;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use diagcat::homology::HomologyError;
use diagcat::idempotent::IdempotentError;
use diagcat::verify::{Lemma, Theorem, VerifyError};
use diagcat::{Constraint, DiagramError, Family, FamilyError, LinkStateError, RingError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Budget(String),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Idempotent(#[from] IdempotentError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    LinkState(#[from] LinkStateError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Budget(_)
            | CliError::Verify(VerifyError::OverBudget { .. })
            | CliError::Verify(VerifyError::Homology(HomologyError::TooLarge { .. }))
            | CliError::Homology(HomologyError::TooLarge { .. }) => 3,
            _ => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConstraintArg {
    Any,
    NoMissing,
    Planar,
    NoConnections,
}

impl ConstraintArg {
    fn name(self) -> &'static str {
        match self {
            ConstraintArg::Any => "any",
            ConstraintArg::NoMissing => "no-missing",
            ConstraintArg::Planar => "planar",
            ConstraintArg::NoConnections => "no-connections",
        }
    }
}

impl From<ConstraintArg> for Constraint {
    fn from(c: ConstraintArg) -> Self {
        match c {
            ConstraintArg::Any => Constraint::Any,
            ConstraintArg::NoMissing => Constraint::NoMissing,
            ConstraintArg::Planar => Constraint::PlanarNoMissing,
            ConstraintArg::NoConnections => Constraint::NoConnections,
        }
    }
}

/// Which idempotent to build for a link state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// Planar construction for tl, otherwise the Brauer construction.
    Auto,
    /// The δ-scaled mirror diagram; needs δ invertible.
    Mirror,
    /// Unscaled Brauer idempotent for link states with a defect.
    Easy,
    /// Unscaled planar idempotent for Temperley-Lieb link states.
    Hard,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Auto => "auto",
            Kind::Mirror => "mirror",
            Kind::Easy => "easy",
            Kind::Hard => "hard",
        }
    }
}

#[derive(Args, Debug)]
pub struct Options {
    /// rbr, rook, br, tl or rtl
    #[arg(long, global = true)]
    family: Option<Family>,
    /// Number of strands (for verify-lemma: largest size swept)
    #[arg(long, global = true)]
    n: Option<usize>,
    /// z, q, f<p>, zmod<m>, poly or laurent; homology accepts a comma list
    #[arg(long, global = true)]
    ring: Option<String>,
    /// Loop parameter; homology accepts a comma list
    #[arg(long, global = true)]
    delta: Option<String>,
    /// Contractible-component parameter; homology accepts a comma list
    #[arg(long, global = true)]
    eps: Option<String>,
    /// Quotient by diagrams with at most this many through strands
    #[arg(long, global = true)]
    floor: Option<usize>,
    #[arg(long = "max-degree", global = true)]
    max_degree: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for randomized checks
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the basis diagrams of an algebra
    Basis,
    /// Multiply diagrams (edge text or JSON) or elements (JSON term lists)
    Multiply {
        #[arg(required = true, num_args = 2..)]
        operands: Vec<String>,
    },
    /// Report the features of a diagram and the families containing it
    Classify { diagram: String },
    /// Extract, enumerate or compare link states
    Linkstate {
        /// Extract the left and right link states of this diagram
        #[arg(long)]
        diagram: Option<String>,
        /// Check reachability from this link state ...
        #[arg(long)]
        from: Option<String>,
        /// ... to this one
        #[arg(long)]
        to: Option<String>,
        /// Enumerate only link states with this many defects
        #[arg(long)]
        defects: Option<usize>,
        #[arg(long, value_enum, default_value_t = ConstraintArg::Any)]
        constraint: ConstraintArg,
    },
    /// Build the idempotent for a link state and verify it generates J_p
    Idempotent {
        /// Link state, e.g. `1-2,3` or JSON
        p: String,
        #[arg(long, value_enum, default_value_t = Kind::Auto)]
        kind: Kind,
    },
    /// Run a lemma suite: mirror-diagram, ls-control, easy-trundle,
    /// hard-trundle, single-trundle, spheres, rho-commute, my-first-ideal,
    /// direct-sum, retract
    VerifyLemma { name: Lemma },
    /// Tor of the trivial module over the chosen algebras
    Homology,
    /// Compute both sides of a homology isomorphism: rook-invertible,
    /// rook-brauer-invertible, brauer-recovery, tl-recovery, sroka,
    /// generalised-sroka, brauer-sroka, generalised-brauer-sroka
    VerifyTheorem { name: Theorem },
    /// Quick run of every lemma suite and a handful of theorems
    Selftest,
}

#[derive(Parser, Debug)]
#[command(name = "diagcat", version, about = "Exact computation with rook-Brauer type diagram algebras")]
struct Cli {
    #[command(flatten)]
    opts: Options,
    #[command(subcommand)]
    command: Command,
}

fn run(cli: &Cli, argv: &[String]) -> Result<report::Report, CliError> {
    let o = &cli.opts;
    match &cli.command {
        Command::Basis => commands::basis(argv, o),
        Command::Multiply { operands } => commands::multiply(argv, o, operands),
        Command::Classify { diagram } => commands::classify(argv, o, diagram),
        Command::Linkstate {
            diagram,
            from,
            to,
            defects,
            constraint,
        } => commands::linkstate(argv, o, diagram.as_deref(), from.as_deref(), to.as_deref(), *defects, *constraint),
        Command::Idempotent { p, kind } => commands::idempotent(argv, o, p, *kind),
        Command::VerifyLemma { name } => commands::verify_lemma(argv, o, *name),
        Command::Homology => commands::homology(argv, o),
        Command::VerifyTheorem { name } => commands::verify_theorem(argv, o, *name),
        Command::Selftest => commands::selftest(argv, o),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    if let Some(j) = cli.opts.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let outcome = run(&cli, &argv).and_then(|r| r.render(cli.opts.format).map(|s| (s, r.passed())));
    eprintln!("wall-time: {:.3}s", start.elapsed().as_secs_f64());
    match outcome {
        Ok((text, passed)) => {
            print!("{text}");
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
