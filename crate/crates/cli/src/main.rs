//! Command line front end: load one workspace file, run one command, print
//! one report. Exit code 0 means a clean report, 1 means the report carries
//! violations, 2 means the input could not be used at all (unreadable or
//! unparsable file, bad flags, or a validation failure that aborted the
//! requested command).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use descent_core::jobs::{self, Command as JobCommand, RunOptions};
use descent_core::report::Report;
use descent_core::workspace;

#[derive(Parser)]
#[command(name = "descent", version, about = "Exact checker for semicosimplicial descent data")]
struct Cli {
    /// Workspace file with the declarations to operate on.
    #[arg(long, global = true, default_value = "workspace.json")]
    workspace: PathBuf,

    /// Seed for every randomized battery.
    #[arg(long, global = true)]
    rng_seed: Option<u64>,

    /// Sample or instance count for randomized batteries.
    #[arg(long, global = true)]
    instances: Option<usize>,

    /// Arity cap for transferred-operation commands.
    #[arg(long, global = true)]
    max_arity: Option<usize>,

    /// Report rendering.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    /// Human-readable lines.
    Text,
    /// One tab-separated record per line, stable field order.
    Machine,
}

#[derive(Subcommand)]
enum Cmd {
    /// Structural validation of every declared object.
    Validate,
    /// Contraction identities and homotopy side conditions on every tower.
    SideConditions,
    /// Dump the nonzero transferred operations through the arity cap.
    TransferDump,
    /// Generalized Jacobi relations through the arity cap.
    LinftyCheck,
    /// Maurer-Cartan residual of every declared element.
    McCheck,
    /// Cocycle residual of every declared element.
    CocycleCheck,
    /// Order-by-order lift starting from a declared first-order element.
    SolveMc {
        /// Declared element used as the seed; all elements when omitted.
        #[arg(long)]
        seed_class: Option<String>,
    },
    /// Equivalence batteries declared as main-theorem jobs in the file.
    MainTheorem,
    /// Obstruction pushforward batteries declared in the file.
    ObstructionNaturality,
}

impl Cmd {
    fn split(self) -> (JobCommand, Option<String>) {
        match self {
            Cmd::Validate => (JobCommand::Validate, None),
            Cmd::SideConditions => (JobCommand::SideConditions, None),
            Cmd::TransferDump => (JobCommand::TransferDump, None),
            Cmd::LinftyCheck => (JobCommand::LinftyCheck, None),
            Cmd::McCheck => (JobCommand::McCheck, None),
            Cmd::CocycleCheck => (JobCommand::CocycleCheck, None),
            Cmd::SolveMc { seed_class } => (JobCommand::SolveMc, seed_class),
            Cmd::MainTheorem => (JobCommand::MainTheorem, None),
            Cmd::ObstructionNaturality => (JobCommand::ObstructionNaturality, None),
        }
    }
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Text => report.render_text(),
        Format::Machine => report.render_machine(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ws = match workspace::load(&cli.workspace) {
        Ok(ws) => ws,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let (command, seed_class) = cli.command.split();
    let opts = RunOptions {
        rng_seed: cli.rng_seed,
        instances: cli.instances,
        max_arity: cli.max_arity,
        seed_class,
    };
    match jobs::run(&ws, command, &opts) {
        Ok(outcome) => {
            print!("{}", render(&outcome.report, cli.format));
            if outcome.aborted {
                ExitCode::from(2)
            } else if outcome.report.is_clean() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
