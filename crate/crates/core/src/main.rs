use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use datalog_repair::engine::{faults, repair, SearchConfig};
use datalog_repair::entrenchment::{entrenchment_report, predicate_entrenchment, Rational};
use datalog_repair::graph::{build_graph, to_dot};
use datalog_repair::report::{self, NameMap};
use datalog_repair::theory::{PreferredStructure, Theory};
use datalog_repair::{parse_ps, parse_theory};

const EX_USAGE: u8 = 64;
const EX_DATAERR: u8 = 65;
const EX_SOFTWARE: u8 = 70;

#[derive(Parser)]
#[command(name = "datalog-repair", version, about = "Detect and repair faults in Datalog theories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Maximum number of operations per repair plan.
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    max_plan_length: u32,
    /// Maximum number of ranked repairs to report.
    #[arg(long, global = true, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    max_results: u32,
    /// Maximum candidate operations considered per fault.
    #[arg(long, global = true, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..))]
    max_candidates: u32,
    /// Report derived equalities between distinct constants as faults.
    #[arg(long, global = true)]
    una: bool,
    /// File of `fresh = preferred` lines used to rename symbols in output.
    #[arg(long, global = true)]
    names: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// List faults of a theory against a preferred structure.
    Check { theory: PathBuf, ps: PathBuf },
    /// Search for and rank repairs.
    Repair { theory: PathBuf, ps: PathBuf },
    /// Report predicate and argument entrenchment.
    Entrench { theory: PathBuf, ps: PathBuf },
    /// Export the theory graph as DOT, annotated when a preferred structure is given.
    Graph { theory: PathBuf, ps: Option<PathBuf> },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: String) -> Self {
        Failure { code: EX_USAGE, message }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_theory(path: &Path) -> Result<Theory, Failure> {
    parse_theory(&read(path)?).map_err(|e| Failure { code: EX_DATAERR, message: format!("{}:{e}", path.display()) })
}

fn load_ps(path: &Path) -> Result<PreferredStructure, Failure> {
    parse_ps(&read(path)?).map_err(|e| Failure { code: EX_DATAERR, message: format!("{}:{e}", path.display()) })
}

/// Report text and exit status.
fn run(cli: &Cli) -> Result<(String, u8), Failure> {
    let names = match &cli.names {
        Some(p) => NameMap::parse(&read(p)?).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?,
        None => NameMap::default(),
    };
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Check { theory, ps } => {
            let (t, ps) = (load_theory(theory)?, load_ps(ps)?);
            let fs = faults(&t, &ps, cli.una);
            let out = if json {
                report::to_json(&report::check_report(&fs, &names))
            } else {
                report::faults_text(&fs, &names)
            };
            Ok((out, u8::from(!fs.is_empty())))
        }
        Command::Repair { theory, ps } => {
            let (t, ps) = (load_theory(theory)?, load_ps(ps)?);
            let cfg = SearchConfig {
                max_plan_length: cli.max_plan_length as usize,
                max_candidates_per_fault: cli.max_candidates as usize,
                max_results: cli.max_results as usize,
                una: cli.una,
            };
            let fs = faults(&t, &ps, cli.una);
            let repairs = repair(&t, &ps, cfg);
            let out = if json {
                report::to_json(&report::repair_report(&fs, &repairs, &names))
            } else {
                report::repairs_text(&fs, &repairs, &names)
            };
            Ok((out, if repairs.is_empty() { 2 } else { 0 }))
        }
        Command::Entrench { theory, ps } => {
            let (t, ps) = (load_theory(theory)?, load_ps(ps)?);
            let rep = entrenchment_report::<Rational>(&t, &ps);
            let out = if json {
                report::to_json(&report::entrench_json(&rep, &names))
            } else {
                report::entrench_text(&rep, &names)
            };
            Ok((out, 0))
        }
        Command::Graph { theory, ps } => {
            let t = load_theory(theory)?;
            let notes = match ps {
                Some(p) => Some(report::graph_annotations(&predicate_entrenchment(&t, &load_ps(p)?))),
                None => None,
            };
            Ok((names.apply(&to_dot(&build_graph(&t), notes.as_ref())), 0))
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    let written = match &cli.output {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    written.map_err(|message| Failure { code: EX_SOFTWARE, message })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EX_USAGE } else { 0 });
        }
    };
    let outcome = std::panic::catch_unwind(|| run(&cli).and_then(|(text, code)| emit(&cli, &text).map(|_| code)));
    match outcome {
        Ok(Ok(code)) => ExitCode::from(code),
        Ok(Err(f)) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
        Err(_) => ExitCode::from(EX_SOFTWARE),
    }
}
