use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use purkit::dsl::{self, Equation, SystemFile};
use purkit::ore::Row;
use purkit::report::{self, Options};

const EXIT_MISMATCH: u8 = 1;
const EXIT_ENGINE: u8 = 2;
const EXIT_PARSE: u8 = 3;

#[derive(Parser)]
#[command(name = "purkit", version, about = "Involution, duality and purity analysis of linear PDE systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one system file.
    Analyze {
        file: PathBuf,
        /// Comma-separated subset of involution,adjoint,cc,torsion,purity,parametrize,resolution.
        #[arg(long)]
        tasks: Option<String>,
        #[arg(long)]
        json: bool,
        /// Seed for coordinate changes; falls back to PURKIT_SEED.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        max_order: Option<u32>,
        /// Include per-task timings (the report is then no longer reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Run a directory of system files against their golden reports.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
    /// Print the formal adjoint as a system file.
    Adjoint { file: PathBuf },
}

#[derive(Subcommand)]
enum CorpusAction {
    Run { dir: PathBuf },
}

fn load(path: &Path) -> Result<SystemFile, ExitCode> {
    let src = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        ExitCode::from(EXIT_PARSE)
    })?;
    dsl::parse(&src).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        ExitCode::from(EXIT_PARSE)
    })
}

fn env_seed() -> Result<Option<u64>, ExitCode> {
    match std::env::var("PURKIT_SEED") {
        Ok(s) => s.trim().parse().map(Some).map_err(|_| {
            eprintln!("PURKIT_SEED: not an unsigned integer: {s:?}");
            ExitCode::from(EXIT_PARSE)
        }),
        Err(_) => Ok(None),
    }
}

fn analyze(
    file: &Path,
    tasks: Option<&str>,
    json: bool,
    seed: Option<u64>,
    max_order: Option<u32>,
    timings: bool,
) -> Result<ExitCode, ExitCode> {
    let f = load(file)?;
    let tasks = tasks
        .map(report::parse_tasks)
        .transpose()
        .map_err(|e| {
            eprintln!("--tasks: {e}");
            ExitCode::from(EXIT_PARSE)
        })?;
    let seed = match seed {
        Some(s) => Some(s),
        None => env_seed()?,
    };
    let opts = Options { tasks, seed, max_order, timings };
    let r = report::run_analysis(&f, &opts).map_err(|e| {
        eprintln!("{}: {e}", file.display());
        ExitCode::from(EXIT_PARSE)
    })?;
    if json {
        println!("{}", r.to_json());
    } else {
        print!("{}", r.to_text());
    }
    Ok(if r.diagnostics.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_ENGINE) })
}

fn adjoint(file: &Path) -> Result<ExitCode, ExitCode> {
    let f = load(file)?;
    let a = f.matrix();
    let lam: Vec<String> =
        if a.nrows() == 1 { vec!["lambda".into()] } else { (1..=a.nrows()).map(|i| format!("lambda{i}")).collect() };
    let equations: Vec<Equation> =
        a.adjoint().rows().iter().map(|r| Equation { lhs: r.clone(), rhs: Row::zero() }).collect();
    let out = SystemFile {
        name: f.name.as_ref().map(|s| format!("{s}_adjoint")),
        field: f.field,
        vars: f.vars.clone(),
        unknowns: lam,
        sources: Vec::new(),
        lets: Vec::new(),
        order: None,
        coords: None,
        tasks: None,
        params: Default::default(),
        spans: vec![(0, 0); equations.len()],
        equations,
    };
    print!("{}", dsl::print(&out));
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = match &cli.command {
        Command::Analyze { file, tasks, json, seed, max_order, timings } => {
            analyze(file, tasks.as_deref(), *json, *seed, *max_order, *timings)
        }
        Command::Adjoint { file } => adjoint(file),
        Command::Corpus { action: CorpusAction::Run { dir } } => match report::corpus_run(dir) {
            Ok(s) => {
                print!("{}", s.render());
                Ok(if s.exit_code() == 0 { ExitCode::SUCCESS } else { ExitCode::from(EXIT_MISMATCH) })
            }
            Err(e) => {
                eprintln!("{}: {e}", dir.display());
                Err(ExitCode::from(EXIT_PARSE))
            }
        },
    };
    out.unwrap_or_else(|c| c)
}
