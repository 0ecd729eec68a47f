//! `atc`: check attack-tree properties against transition systems, export
//! Graphviz views, and reduce CNF instances to checker inputs.
//!
//! Exit codes: 0 property holds, 1 property fails, 2 usage or input error,
//! 3 search cap exceeded (AND arity or candidate budget).

use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use atc_core::check::{render_json, render_text};
use atc_core::dot::{system_dot, tree_dot};
use atc_core::oracle::oracle_report;
use atc_core::satgen::{parse_dimacs, reduce};
use atc_core::{
    load_model, load_system, AttackTree, CheckError, CheckReport, Checker, NodePath, PropertyKind,
    SearchConfig, TransitionSystem,
};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "atc",
    version,
    about = "Attack-tree correctness checker over finite transition systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a property of a tree against a system.
    Check(CheckArgs),
    /// Export the system, and optionally a tree, as Graphviz DOT.
    ExportDot(ExportDotArgs),
    /// Reduce a DIMACS CNF file to a system/tree pair whose root
    /// admissibility equals satisfiability.
    GenSat(GenSatArgs),
}

#[derive(clap::Args)]
struct CheckArgs {
    /// System JSON file.
    #[arg(long, value_name = "FILE")]
    system: PathBuf,
    /// Tree JSON file.
    #[arg(long, value_name = "FILE")]
    tree: PathBuf,
    /// Property to check.
    #[arg(long, value_parser = PropertyKind::from_str)]
    property: PropertyKind,
    /// One node or every applicable node.
    #[arg(long, value_enum, default_value_t = Scope::Global)]
    scope: Scope,
    /// Node selector: `root` or dot-separated child indices like `1.0`.
    /// Required with `--scope local`.
    #[arg(long, value_name = "SELECTOR")]
    node: Option<String>,
    /// Decision procedure.
    #[arg(long, value_enum, default_value_t = Engine::Exact)]
    engine: Engine,
    /// Oracle enumeration budget in state occurrences; defaults to the
    /// witness-shrinking bound. Ignored by the exact engine.
    #[arg(long, value_name = "STATES")]
    budget: Option<usize>,
    /// Cap on AND refinement arity; exceeding it exits 3.
    #[arg(long, value_name = "N", env = "ATC_MAX_AND_ARITY", default_value_t = 4)]
    max_and_arity: usize,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Also print witness paths for properties that hold.
    #[arg(long)]
    witness: bool,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ExportDotArgs {
    /// System JSON file.
    #[arg(long, value_name = "FILE")]
    system: PathBuf,
    /// Tree JSON file; adds a second digraph for the tree.
    #[arg(long, value_name = "FILE")]
    tree: Option<PathBuf>,
    /// Write the DOT text here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct GenSatArgs {
    /// DIMACS CNF input file.
    #[arg(long, value_name = "FILE")]
    cnf: PathBuf,
    /// Where to write the system JSON.
    #[arg(long, value_name = "FILE")]
    system_out: PathBuf,
    /// Where to write the tree JSON.
    #[arg(long, value_name = "FILE")]
    tree_out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scope {
    Local,
    Global,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Exact,
    Oracle,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// A terminating error: message for stderr plus the contract exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(err: E) -> Self {
        Failure::usage(err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Check(args) => cmd_check(args),
        Command::ExportDot(args) => cmd_export_dot(args),
        Command::GenSat(args) => cmd_gen_sat(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn read_file(path: &FsPath) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|err| Failure::usage(format!("cannot read {}: {err}", path.display())))
}

fn write_output(out: Option<&FsPath>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|err| Failure::usage(format!("cannot write {}: {err}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(system_path: &FsPath, tree_path: &FsPath) -> Result<(TransitionSystem, AttackTree), Failure> {
    let system_json = read_file(system_path)?;
    let tree_json = read_file(tree_path)?;
    let compiled = load_model(&system_json, &tree_json)?;
    for warning in &compiled.warnings {
        eprintln!("warning: {warning}");
    }
    let tree = compiled.tree.expect("tree document was supplied");
    Ok((compiled.system, tree))
}

fn check_failure(err: CheckError) -> Failure {
    let code = match &err {
        CheckError::AndArityExceeded { .. } | CheckError::CandidateBudgetExhausted(_) => 3,
        _ => 2,
    };
    Failure {
        code,
        message: err.to_string(),
    }
}

fn cmd_check(args: CheckArgs) -> Result<u8, Failure> {
    let (system, tree) = load(&args.system, &args.tree)?;
    let nodes: Vec<NodePath> = match (args.scope, &args.node) {
        (Scope::Local, Some(selector)) => {
            let node = NodePath::from_str(selector)?;
            if tree.node(&node).is_none() {
                return Err(Failure::usage(format!("no node at path {node}")));
            }
            vec![node]
        }
        (Scope::Local, None) => {
            return Err(Failure::usage("--node is required with --scope local"));
        }
        (Scope::Global, Some(_)) => {
            return Err(Failure::usage("--node only applies with --scope local"));
        }
        (Scope::Global, None) => {
            if args.property.needs_refinement() {
                tree.composed_nodes()
            } else {
                tree.all_nodes()
            }
        }
    };

    let reports: Vec<CheckReport> = match args.engine {
        Engine::Exact => {
            let config = SearchConfig {
                max_and_arity: args.max_and_arity,
                ..SearchConfig::default()
            };
            let checker = Checker::with_config(&system, &tree, config);
            nodes
                .iter()
                .map(|node| checker.check_node(node, args.property))
                .collect::<Result<_, _>>()
                .map_err(check_failure)?
        }
        Engine::Oracle => nodes
            .iter()
            .map(|node| oracle_report(&system, &tree, node, args.property, args.budget))
            .collect::<Result<_, _>>()
            .map_err(check_failure)?,
    };

    let rendered = match args.format {
        Format::Text => render_text(&system, &reports, args.witness),
        Format::Json => render_json(&system, &reports),
    };
    write_output(args.out.as_deref(), &rendered)?;
    let all_hold = reports.iter().all(|r| r.verdict.holds());
    Ok(if all_hold { 0 } else { 1 })
}

fn cmd_export_dot(args: ExportDotArgs) -> Result<u8, Failure> {
    let system_json = read_file(&args.system)?;
    let mut rendered = String::new();
    match &args.tree {
        None => {
            let compiled = load_model_system_only(&system_json)?;
            rendered.push_str(&system_dot(&compiled));
        }
        Some(tree_path) => {
            let tree_json = read_file(tree_path)?;
            let compiled = load_model(&system_json, &tree_json)?;
            for warning in &compiled.warnings {
                eprintln!("warning: {warning}");
            }
            rendered.push_str(&system_dot(&compiled.system));
            let tree = compiled.tree.expect("tree document was supplied");
            rendered.push_str(&tree_dot(&tree));
        }
    }
    write_output(args.out.as_deref(), &rendered)?;
    Ok(0)
}

fn load_model_system_only(system_json: &str) -> Result<TransitionSystem, Failure> {
    let (system, warnings) = load_system(system_json)?;
    for warning in &warnings {
        eprintln!("warning: {warning}");
    }
    Ok(system)
}

fn cmd_gen_sat(args: GenSatArgs) -> Result<u8, Failure> {
    let text = read_file(&args.cnf)?;
    let cnf = parse_dimacs(&text)?;
    let (system_doc, tree_doc) = reduce(&cnf);
    let mut system_json = serde_json::to_string_pretty(&system_doc).expect("plain data");
    system_json.push('\n');
    let mut tree_json = serde_json::to_string_pretty(&tree_doc).expect("plain data");
    tree_json.push('\n');
    write_output(Some(&args.system_out), &system_json)?;
    write_output(Some(&args.tree_out), &tree_json)?;
    Ok(0)
}
