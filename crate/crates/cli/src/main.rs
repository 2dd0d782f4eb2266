use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use tdmin_core::driver::{self, evaluate, write_outputs, Outcome};
use tdmin_core::emitter::write_file;
use tdmin_core::mark::resolve_specs;
use tdmin_core::oracle::{self, Status, DEFAULT_BUDGET};
use tdmin_core::semantics::build_lenient;
use tdmin_core::{load_project, Algorithm, DummyMode, EntrypointSpec, LifecycleConfig, Report, RunConfig};

#[derive(Parser)]
#[command(name = "tdmin", version, about = "Remove what a test does not need from a MiniJ project")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Minimize a project for the given entrypoints.
    Minimize(MinimizeArgs),
    /// Minimize keeping or dropping whole classes only.
    Baseline(MinimizeArgs),
    /// Run entrypoints in the interpreter and record coverage.
    Oracle(OracleArgs),
    /// Score a minimization report against coverage.
    Eval(EvalArgs),
}

#[derive(Args)]
struct ProjectArgs {
    /// Root directory of the `.mj` sources.
    #[arg(long)]
    source: PathBuf,
    /// Extra library stub file (repeatable).
    #[arg(long = "stub")]
    stubs: Vec<PathBuf>,
    /// `pkg.Class` or `pkg.Class#method` (repeatable).
    #[arg(long = "entrypoint", required = true)]
    entrypoints: Vec<EntrypointSpec>,
}

#[derive(Args)]
struct MinimizeArgs {
    #[command(flatten)]
    project: ProjectArgs,
    /// Directory receiving the minimized sources; replaced as a whole.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Path of the JSON report.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long = "dummy-mode", default_value = "assert")]
    dummy_mode: DummyMode,
    /// member, class or coverage-oracle.
    #[arg(long, default_value = "member")]
    algorithm: Algorithm,
    #[arg(long = "max-passes", default_value_t = driver::DEFAULT_MAX_PASSES)]
    max_passes: usize,
    /// File of lifecycle member patterns, one per line.
    #[arg(long)]
    lifecycle: Option<PathBuf>,
    /// Also score the result against the interpreter's coverage.
    #[arg(long = "compare-oracle")]
    compare_oracle: bool,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    project: ProjectArgs,
    /// Where to write the `HIT` lines.
    #[arg(long)]
    coverage: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct EvalArgs {
    /// Report of the minimization to score.
    #[arg(long)]
    tool: PathBuf,
    /// Coverage file, or a report of a coverage-oracle run.
    #[arg(long)]
    oracle: PathBuf,
    /// Sources the coverage refers to; defaults to the report's.
    #[arg(long)]
    source: Option<PathBuf>,
    #[arg(long = "stub")]
    stubs: Vec<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn config(a: MinimizeArgs, algorithm: Algorithm) -> Result<RunConfig> {
    let mut c = RunConfig::new(a.project.source, a.project.entrypoints);
    c.stub_files = a.project.stubs;
    c.dummy_mode = a.dummy_mode;
    c.max_passes = a.max_passes;
    c.algorithm = algorithm;
    c.output_dir = a.out;
    c.report_path = a.report;
    c.compare_oracle = a.compare_oracle;
    c.step_budget = a.budget;
    if let Some(p) = &a.lifecycle {
        c.lifecycle = LifecycleConfig::parse(&read(p)?);
    }
    Ok(c)
}

fn summary(o: &Outcome) {
    let r = &o.report;
    let count = |v: &str| r.declarations.iter().filter(|d| d.verdict == v).count();
    match r.convergence_pass {
        Some(p) => println!("converged at pass {p}"),
        None => println!("stopped after {} passes", r.passes.len()),
    }
    println!(
        "{} declarations: {} removed, {} dummied, {} kept",
        r.declarations.len(),
        count("REMOVE"),
        count("DUMMY"),
        count("NOOP")
    );
    if r.unresolved_after > 0 {
        println!("{} unresolved symbols remain", r.unresolved_after);
    }
    if let Some(m) = &r.metrics {
        print!("{}", m.table());
    }
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
}

fn minimize(a: MinimizeArgs, algorithm: Algorithm) -> Result<()> {
    let c = config(a, algorithm)?;
    let out = driver::minimize_until_convergence(&c)?;
    write_outputs(&out, &c)?;
    summary(&out);
    Ok(())
}

fn run_oracle(a: OracleArgs) -> Result<()> {
    let p = load_project(&a.project.source, &a.project.stubs)?;
    let t = build_lenient(&p);
    let methods: Vec<_> = resolve_specs(&p, &a.project.entrypoints)?.into_iter().map(|(_, m)| m).collect();
    let results = oracle::execute_all(&p, &t, &methods, a.budget)?;
    for (m, r) in &results {
        let status = match r.status {
            Status::Pass => "PASS",
            Status::AssertionFailure => "ASSERTION-FAILURE",
            Status::RuntimeError => "RUNTIME-ERROR",
        };
        match &r.message {
            Some(msg) => println!("{status} {}: {msg}", p.decl(*m).key),
            None => println!("{status} {}", p.decl(*m).key),
        }
    }
    let hits = oracle::coverage(results.iter().map(|(_, r)| r));
    let text = oracle::dump_coverage(&p, &hits);
    match &a.coverage {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn eval(a: EvalArgs) -> Result<()> {
    let tool = Report::from_json(&read(&a.tool)?).map_err(anyhow::Error::msg).context("parsing the tool report")?;
    let oracle_text = read(&a.oracle)?;
    let source = a.source.unwrap_or_else(|| tool.source.clone());
    let stubs = if a.stubs.is_empty() { tool.stubs.clone() } else { a.stubs };
    let cmp = if oracle_text.trim_start().starts_with('{') {
        let reference = Report::from_json(&oracle_text).map_err(anyhow::Error::msg).context("parsing the oracle report")?;
        oracle::compare(&reference.verdicts(), &tool.verdicts())?
    } else {
        let hits = oracle::parse_coverage(&oracle_text).map_err(anyhow::Error::msg)?;
        let p = load_project(&source, &stubs)?;
        evaluate(&p, &tool.verdicts(), &hits)?
    };
    print!("{}", cmp.table());
    if !cmp.missed.is_empty() {
        println!("missed: {}", cmp.missed.join(", "));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let r = match cli.cmd {
        Cmd::Minimize(a) => {
            let alg = a.algorithm;
            minimize(a, alg)
        }
        Cmd::Baseline(a) => minimize(a, Algorithm::ClassGranular),
        Cmd::Oracle(a) => run_oracle(a),
        Cmd::Eval(a) => eval(a),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
