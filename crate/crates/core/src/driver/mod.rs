//! Multi-pass orchestration and the run report.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::baseline::class_granular_minimize;
use crate::emitter::{self, DummyMode, Emitted};
use crate::error::{Error, OracleError, Result};
use crate::frontend::normalize::structurally_equal;
use crate::frontend::{load_project, DeclKind, Project};
use crate::mark::{collect_entrypoints, mark, resolve_specs, EntrypointSpec, LifecycleConfig, Reason};
use crate::oracle::{self, Comparison, DEFAULT_BUDGET};
use crate::semantics::{build_lenient, SymbolTable};
use crate::sweep::{build_reachability_graph, decide, Decisions, Justification, Verdict};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_MAX_PASSES: usize = 10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    #[default]
    MemberGranular,
    ClassGranular,
    CoverageOracle,
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "member" | "member-granular" => Ok(Algorithm::MemberGranular),
            "class" | "class-granular" => Ok(Algorithm::ClassGranular),
            "coverage" | "coverage-oracle" => Ok(Algorithm::CoverageOracle),
            _ => Err(format!("unknown algorithm `{s}` (expected member, class or coverage-oracle)")),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::MemberGranular => "member-granular",
            Algorithm::ClassGranular => "class-granular",
            Algorithm::CoverageOracle => "coverage-oracle",
        })
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub source_root: PathBuf,
    pub stub_files: Vec<PathBuf>,
    pub entrypoints: Vec<EntrypointSpec>,
    pub dummy_mode: DummyMode,
    pub max_passes: usize,
    pub algorithm: Algorithm,
    pub output_dir: Option<PathBuf>,
    pub report_path: Option<PathBuf>,
    pub lifecycle: LifecycleConfig,
    /// Also run the oracle on the input and score the result against it.
    pub compare_oracle: bool,
    pub step_budget: u64,
}

impl RunConfig {
    pub fn new(source_root: impl Into<PathBuf>, entrypoints: Vec<EntrypointSpec>) -> Self {
        RunConfig {
            source_root: source_root.into(),
            stub_files: Vec::new(),
            entrypoints,
            dummy_mode: DummyMode::Assert,
            max_passes: DEFAULT_MAX_PASSES,
            algorithm: Algorithm::MemberGranular,
            output_dir: None,
            report_path: None,
            lifecycle: LifecycleConfig::default(),
            compare_oracle: false,
            step_budget: DEFAULT_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_passes == 0 {
            return Err(Error::Config("max-passes must be at least 1".into()));
        }
        if self.entrypoints.is_empty() {
            return Err(Error::Config("at least one entrypoint is required".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub resolve_ms: f64,
    /// Marking, or executing the entrypoints for the coverage oracle.
    pub mark_ms: f64,
    pub sweep_ms: f64,
    /// Rewriting, printing and re-loading.
    pub emit_ms: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PassReport {
    pub pass: usize,
    pub declarations: usize,
    pub removed: usize,
    pub dummied: usize,
    pub retained: usize,
    pub unresolved: usize,
    pub timings: PhaseTimings,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeclReport {
    pub key: String,
    pub kind: DeclKind,
    /// `NOOP`, `DUMMY` or `REMOVE`.
    pub verdict: String,
    /// Pass that decided the final verdict.
    pub pass: usize,
    pub justification: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub algorithm: Algorithm,
    pub source: PathBuf,
    pub stubs: Vec<PathBuf>,
    pub entrypoints: Vec<String>,
    pub dummy_mode: DummyMode,
    pub max_passes: usize,
    pub load_ms: f64,
    pub total_ms: f64,
    pub passes: Vec<PassReport>,
    pub converged: bool,
    pub convergence_pass: Option<usize>,
    pub warnings: Vec<String>,
    pub unresolved_before: usize,
    pub unresolved_after: usize,
    pub declarations: Vec<DeclReport>,
    pub metrics: Option<Comparison>,
}

impl Report {
    pub fn verdicts(&self) -> BTreeMap<String, Verdict> {
        self.declarations
            .iter()
            .map(|d| (d.key.clone(), parse_verdict(&d.verdict).unwrap_or(Verdict::NoOp)))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> std::result::Result<Report, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    /// Same content as the emitter's manifest for the final verdicts.
    pub fn manifest(&self) -> String {
        self.declarations
            .iter()
            .filter(|d| d.verdict != "NOOP")
            .map(|d| format!("{} {}\n", d.verdict, d.key))
            .collect()
    }
}

fn parse_verdict(s: &str) -> Option<Verdict> {
    match s {
        "NOOP" => Some(Verdict::NoOp),
        "DUMMY" => Some(Verdict::Dummy),
        "REMOVE" => Some(Verdict::Remove),
        _ => None,
    }
}

fn reason_name(r: Reason) -> &'static str {
    match r {
        Reason::ReferencedBySymbol => "referenced-by-symbol",
        Reason::DynamicCallTarget => "dynamic-call-target",
        Reason::ConstructorDelegation => "constructor-delegation",
        Reason::ParentConstruct => "parent-construct",
    }
}

pub fn render_justification(project: &Project, j: &Justification) -> String {
    match j {
        Justification::Edge(e) => format!("{} from {}", reason_name(e.category), project.decl(e.from).key),
        Justification::Rule(r) => (*r).to_string(),
    }
}

/// Result of one mark, sweep and emit cycle.
#[derive(Debug)]
pub struct PassOutcome {
    pub emitted: Emitted,
    pub decisions: Decisions,
    pub removed: usize,
    pub report: PassReport,
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1000.0
}

/// Decisions of `algorithm` for `project`.
pub fn decisions_for(project: &Project, table: &SymbolTable, cfg: &RunConfig, timings: &mut PhaseTimings) -> Result<Decisions> {
    let t = Instant::now();
    let decisions = match cfg.algorithm {
        Algorithm::MemberGranular => {
            let entries = collect_entrypoints(project, table, &cfg.entrypoints, &cfg.lifecycle)?;
            let marks = mark(project, table, &entries);
            timings.mark_ms = ms(t);
            let t = Instant::now();
            let graph = build_reachability_graph(&marks);
            let s = decide(project, table, &marks, &graph);
            timings.sweep_ms = ms(t);
            s.decisions
        }
        Algorithm::ClassGranular => {
            let entries = collect_entrypoints(project, table, &cfg.entrypoints, &cfg.lifecycle)?;
            timings.mark_ms = ms(t);
            let t = Instant::now();
            let d = class_granular_minimize(project, table, &entries);
            timings.sweep_ms = ms(t);
            d
        }
        Algorithm::CoverageOracle => {
            let hits = run_coverage(project, table, &cfg.entrypoints, cfg.step_budget)?;
            timings.mark_ms = ms(t);
            let t = Instant::now();
            let d = oracle::coverage_minimize(project, table, &hits);
            timings.sweep_ms = ms(t);
            d
        }
    };
    Ok(decisions)
}

/// Union of the declarations used when running each named entrypoint.
pub fn run_coverage(
    project: &Project,
    table: &SymbolTable,
    specs: &[EntrypointSpec],
    budget: u64,
) -> Result<BTreeSet<crate::DeclId>> {
    let methods: Vec<_> = resolve_specs(project, specs)?.into_iter().map(|(_, m)| m).collect();
    let results = oracle::execute_all(project, table, &methods, budget)?;
    Ok(oracle::coverage(results.iter().map(|(_, r)| r)))
}

/// One mark, sweep and emit cycle over `project`.
pub fn run_pass(project: &Project, cfg: &RunConfig, pass: usize) -> Result<PassOutcome> {
    let mut timings = PhaseTimings::default();
    let t = Instant::now();
    let table = build_lenient(project);
    timings.resolve_ms = ms(t);
    let decisions = decisions_for(project, &table, cfg, &mut timings)?;
    let t = Instant::now();
    let emitted = emitter::apply(project, &table, &decisions, cfg.dummy_mode)?;
    timings.emit_ms = ms(t);
    let count = |v: Verdict| decisions.values().filter(|d| d.verdict == v).count();
    let removed = count(Verdict::Remove);
    let report = PassReport {
        pass,
        declarations: project.project_decls().count(),
        removed,
        dummied: count(Verdict::Dummy),
        retained: project.project_decls().count() - removed,
        unresolved: table.unresolved().len(),
        timings,
    };
    Ok(PassOutcome {
        emitted,
        decisions,
        removed,
        report,
    })
}

fn sorted_units(p: &Project) -> Vec<(&Path, &crate::frontend::ast::CompilationUnit)> {
    let mut v: Vec<_> = p.files.iter().filter(|f| !f.is_stub).map(|f| (f.path.as_path(), &f.unit)).collect();
    v.sort_by(|x, y| x.0.cmp(y.0));
    v
}

fn same_sources(a: &Project, b: &Project) -> bool {
    let files = sorted_units;
    let (fa, fb) = (files(a), files(b));
    fa.len() == fb.len() && fa.iter().zip(&fb).all(|(x, y)| x.0 == y.0 && structurally_equal(x.1, y.1))
}

/// Final state of a minimization.
#[derive(Debug)]
pub struct Outcome {
    pub project: Project,
    /// Emitted sources, relative to the project root.
    pub sources: Vec<(PathBuf, String)>,
    pub report: Report,
}

struct Final {
    kind: DeclKind,
    verdict: Verdict,
    pass: usize,
    justification: Vec<String>,
}

/// Repeats [`run_pass`] on its own output until a pass changes nothing.
pub fn minimize_project(project: Project, cfg: &RunConfig) -> Result<Outcome> {
    minimize_loaded(project, cfg, 0.0)
}

/// Loads the configured sources and minimizes them until convergence.
pub fn minimize_until_convergence(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let t = Instant::now();
    let project = load_project(&cfg.source_root, &cfg.stub_files)?;
    minimize_loaded(project, cfg, ms(t))
}

fn minimize_loaded(project: Project, cfg: &RunConfig, load_ms: f64) -> Result<Outcome> {
    cfg.validate()?;
    let start = Instant::now();
    let unresolved_before = build_lenient(&project).unresolved().len();
    let metrics = if cfg.compare_oracle && cfg.algorithm != Algorithm::CoverageOracle {
        Some(oracle_reference(&project, cfg)?)
    } else {
        None
    };
    let mut finals: BTreeMap<String, Final> = project
        .project_decls()
        .map(|e| {
            let f = Final {
                kind: e.kind,
                verdict: Verdict::NoOp,
                pass: 0,
                justification: Vec::new(),
            };
            (e.key.clone(), f)
        })
        .collect();
    let mut current = project;
    let mut sources: Vec<(PathBuf, String)> = current
        .files
        .iter()
        .filter(|f| !f.is_stub)
        .map(|f| (f.path.clone(), crate::frontend::print_unit(&f.unit)))
        .collect();
    let mut passes = Vec::new();
    let mut convergence_pass = None;
    for pass in 1..=cfg.max_passes {
        let out = run_pass(&current, cfg, pass)?;
        for d in out.decisions.values() {
            let key = &current.decl(d.decl).key;
            let Some(f) = finals.get_mut(key) else { continue };
            let stronger = match (f.verdict, d.verdict) {
                (Verdict::Remove, _) => false,
                (_, Verdict::Remove) => true,
                (Verdict::Dummy, _) => false,
                _ => true,
            };
            if stronger {
                f.verdict = d.verdict;
                f.pass = pass;
                f.justification = d.justification.iter().map(|j| render_justification(&current, j)).collect();
            }
        }
        let unchanged = out.removed == 0 && same_sources(&current, &out.emitted.project);
        passes.push(out.report);
        current = out.emitted.project;
        sources = out.emitted.sources;
        if unchanged {
            convergence_pass = Some(pass);
            break;
        }
    }
    let mut warnings = Vec::new();
    if convergence_pass.is_none() {
        warnings.push(format!(
            "MaxPassesExceeded: no fixpoint within {} passes; the output of the last pass is kept",
            cfg.max_passes
        ));
    }
    let declarations: Vec<DeclReport> = finals
        .into_iter()
        .map(|(key, f)| DeclReport {
            key,
            kind: f.kind,
            verdict: f.verdict.as_str().to_string(),
            pass: f.pass,
            justification: f.justification,
        })
        .collect();
    let unresolved_after = build_lenient(&current).unresolved().len();
    let mut report = Report {
        schema_version: REPORT_SCHEMA_VERSION,
        algorithm: cfg.algorithm,
        source: cfg.source_root.clone(),
        stubs: cfg.stub_files.clone(),
        entrypoints: cfg.entrypoints.iter().map(ToString::to_string).collect(),
        dummy_mode: cfg.dummy_mode,
        max_passes: cfg.max_passes,
        load_ms,
        total_ms: 0.0,
        passes,
        converged: convergence_pass.is_some(),
        convergence_pass,
        warnings,
        unresolved_before,
        unresolved_after,
        declarations,
        metrics: None,
    };
    if let Some(reference) = metrics {
        report.metrics = Some(oracle::compare(&reference, &report.verdicts())?);
    }
    report.total_ms = load_ms + ms(start);
    Ok(Outcome {
        project: current,
        sources,
        report,
    })
}

/// Coverage-based verdicts for the input project, keyed by declaration key.
pub fn oracle_reference(project: &Project, cfg: &RunConfig) -> Result<BTreeMap<String, Verdict>> {
    let table = build_lenient(project);
    let hits = run_coverage(project, &table, &cfg.entrypoints, cfg.step_budget)?;
    let d = oracle::coverage_minimize(project, &table, &hits);
    Ok(oracle::verdict_map(project, &d))
}

/// Scores tool verdicts against the coverage-minimized form of `project`
/// for the given `HIT` keys.
pub fn evaluate(
    project: &Project,
    tool: &BTreeMap<String, Verdict>,
    hit_keys: &BTreeSet<String>,
) -> Result<Comparison> {
    let table = build_lenient(project);
    let mut hits = BTreeSet::new();
    for k in hit_keys {
        let d = project
            .lookup(k)
            .ok_or_else(|| OracleError::IndexMismatch(format!("coverage names unknown declaration `{k}`")))?;
        hits.insert(d);
    }
    let reference = oracle::verdict_map(project, &oracle::coverage_minimize(project, &table, &hits));
    Ok(oracle::compare(&reference, tool)?)
}

/// Writes the minimized tree, its manifest and the report where configured.
/// The manifest goes next to the output directory as `<dir>.manifest`.
pub fn write_outputs(outcome: &Outcome, cfg: &RunConfig) -> Result<()> {
    if let Some(dir) = &cfg.output_dir {
        emitter::write_tree(dir, &outcome.sources)?;
        emitter::write_file(&manifest_path(dir), &outcome.report.manifest())?;
    }
    if let Some(path) = &cfg.report_path {
        emitter::write_file(path, &outcome.report.to_json())?;
    }
    Ok(())
}

pub fn manifest_path(out_dir: &Path) -> PathBuf {
    let name = out_dir.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    out_dir.with_file_name(format!("{name}.manifest"))
}
