//! Dynamic oracle: runs entrypoints, records which declarations were used,
//! derives the coverage-based minimization and compares decision maps.

mod interp;
mod value;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

pub use value::{Data, Obj, Value};

use crate::error::OracleError;
use crate::frontend::ast::DeclId;
use crate::frontend::{DeclKind, Project};
use crate::semantics::{RefKind, SymbolTable, VarId};
use crate::sweep::{Decisions, SweepDecision, Verdict};

pub const DEFAULT_BUDGET: u64 = 1_000_000;

const STACK_BYTES: usize = 512 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    AssertionFailure,
    RuntimeError,
}

#[derive(Clone, Debug)]
pub struct ExecutionResult {
    pub status: Status,
    /// Assertion message, or exception description for runtime errors.
    pub message: Option<String>,
    pub steps: u64,
    /// Project declarations used, with use counts.
    pub hits: BTreeMap<DeclId, u64>,
    /// Everything printed to `System.out`.
    pub output: String,
    /// Runtime classes seen in each tracked variable.
    pub observed: BTreeSet<(VarId, DeclId)>,
}

impl ExecutionResult {
    pub fn hit(&self, d: DeclId) -> bool {
        self.hits.contains_key(&d)
    }

    /// Same status, message and output.
    pub fn same_behavior(&self, other: &ExecutionResult) -> bool {
        self.status == other.status && self.message == other.message && self.output == other.output
    }
}

/// Runs one entrypoint method in a fresh runtime.
pub fn execute(project: &Project, table: &SymbolTable, entry: DeclId, budget: u64) -> Result<ExecutionResult, OracleError> {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(STACK_BYTES)
            .spawn_scoped(s, || {
                let mut it = interp::Interp::new(project, table, budget);
                let (status, message) = it.run_entry(entry)?;
                Ok(interp::finish(it, status, message))
            })
            .expect("spawn interpreter thread")
            .join()
            .expect("interpreter thread panicked")
    })
}

/// Runs every entrypoint; the results keep the input order.
pub fn execute_all(
    project: &Project,
    table: &SymbolTable,
    entries: &[DeclId],
    budget: u64,
) -> Result<Vec<(DeclId, ExecutionResult)>, OracleError> {
    entries
        .iter()
        .map(|&e| execute(project, table, e, budget).map(|r| (e, r)))
        .collect()
}

/// Union of the declarations used by any run.
pub fn coverage<'r>(results: impl IntoIterator<Item = &'r ExecutionResult>) -> BTreeSet<DeclId> {
    results.into_iter().flat_map(|r| r.hits.keys().copied()).collect()
}

/// `HIT key` lines, sorted by key.
pub fn dump_coverage(project: &Project, hits: &BTreeSet<DeclId>) -> String {
    let mut keys: Vec<&str> = hits.iter().map(|d| project.decl(*d).key.as_str()).collect();
    keys.sort_unstable();
    keys.iter().map(|k| format!("HIT {k}\n")).collect()
}

pub fn parse_coverage(text: &str) -> Result<BTreeSet<String>, String> {
    let mut out = BTreeSet::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        match line.strip_prefix("HIT ") {
            Some(k) => {
                out.insert(k.trim().to_string());
            }
            None => return Err(format!("line {}: expected `HIT <key>`", n + 1)),
        }
    }
    Ok(out)
}

/// The smallest program the observed coverage permits: used declarations
/// stay, the unused ones they still mention keep their signatures, the rest
/// is removed.
pub fn coverage_minimize(project: &Project, table: &SymbolTable, hits: &BTreeSet<DeclId>) -> Decisions {
    let mut verdicts: BTreeMap<DeclId, (Verdict, &'static str)> = BTreeMap::new();
    let mut work: Vec<DeclId> = Vec::new();
    for &h in hits {
        if !project.decl(h).is_stub {
            verdicts.insert(h, (Verdict::NoOp, "executed"));
            work.push(h);
        }
    }
    let unhit_verdict = |d: DeclId| -> Verdict {
        let e = project.decl(d);
        let bodied = match e.kind {
            DeclKind::Method => !e.is_abstract && project.method(d).body.is_some(),
            DeclKind::Constructor => true,
            _ => false,
        };
        if bodied {
            Verdict::Dummy
        } else {
            Verdict::NoOp
        }
    };
    loop {
        while let Some(d) = work.pop() {
            let (v, _) = verdicts[&d];
            let mut needs: Vec<DeclId> = Vec::new();
            if let Some(c) = project.decl(d).container {
                needs.push(c);
            }
            for r in table.refs_of(d) {
                let follow = match v {
                    Verdict::NoOp => true,
                    _ => {
                        r.kind == RefKind::Signature
                            || (r.kind == RefKind::Delegation && project.decl(d).kind == DeclKind::Constructor)
                    }
                };
                if follow {
                    needs.push(r.target);
                }
            }
            for n in needs {
                if project.decl(n).is_stub || verdicts.contains_key(&n) {
                    continue;
                }
                verdicts.insert(n, (unhit_verdict(n), "referenced"));
                work.push(n);
            }
        }
        let mut added = Vec::new();
        for (&c, _) in verdicts.iter() {
            let cd = project.decl(c);
            if !cd.kind.is_type() {
                continue;
            }
            if cd.kind != DeclKind::Interface && !cd.is_abstract {
                for (abs, imp) in table.abstract_obligations(project, c) {
                    if let Some(imp) = imp {
                        if verdicts.contains_key(&abs) && !project.decl(imp).is_stub && !verdicts.contains_key(&imp) {
                            added.push((imp, "implements"));
                        }
                    }
                }
            }
            if let Some(k) = needed_ctor(project, table, c, &verdicts) {
                added.push((k, "kept-for-compilation"));
            }
        }
        if added.is_empty() {
            break;
        }
        for (d, why) in added {
            if !verdicts.contains_key(&d) {
                verdicts.insert(d, (unhit_verdict(d), why));
                work.push(d);
            }
        }
    }
    project
        .project_decls()
        .map(|e| {
            let (v, why) = verdicts.get(&e.id).copied().unwrap_or((Verdict::Remove, "not-executed"));
            (e.id, SweepDecision::new(e.id, v, why))
        })
        .collect()
}

/// A constructor class `c` must keep so that it still compiles when its
/// superclass has no usable no-argument constructor.
fn needed_ctor(
    project: &Project,
    table: &SymbolTable,
    c: DeclId,
    kept: &BTreeMap<DeclId, (Verdict, &'static str)>,
) -> Option<DeclId> {
    let ctors = |t: DeclId| -> Vec<DeclId> {
        project
            .decl(t)
            .children
            .iter()
            .copied()
            .filter(|x| project.decl(*x).kind == DeclKind::Constructor)
            .collect()
    };
    let mine = ctors(c);
    if mine.is_empty() || mine.iter().any(|k| kept.contains_key(k)) {
        return None;
    }
    if project.decl(c).kind != DeclKind::Class {
        return mine.first().copied();
    }
    let sup = table.superclass_decl(c)?;
    let theirs = ctors(sup);
    let no_arg_ok = theirs.is_empty()
        || theirs.iter().any(|k| {
            table.sig(*k).is_some_and(|s| s.params.is_empty()) && (project.decl(*k).is_stub || kept.contains_key(k))
        });
    if no_arg_ok {
        return None;
    }
    mine.into_iter()
        .min_by_key(|k| (table.sig(*k).map(|s| s.params.len()).unwrap_or(0), project.decl(*k).key.clone()))
}

/// Decisions keyed by declaration key.
pub fn verdict_map(project: &Project, decisions: &Decisions) -> BTreeMap<String, Verdict> {
    project
        .project_decls()
        .map(|e| {
            let v = decisions.get(&e.id).map(|d| d.verdict).unwrap_or(Verdict::NoOp);
            (e.key.clone(), v)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
    pub fpr: f64,
    pub fnr: f64,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(n: usize, d: usize, empty: f64) -> f64 {
    if d == 0 {
        empty
    } else {
        n as f64 / d as f64
    }
}

impl Metrics {
    /// Positive means retained. Empty denominators give precision, recall
    /// and F1 of 1 and error rates of 0.
    pub fn from_counts(tp: usize, fp: usize, fn_: usize, tn: usize) -> Metrics {
        let precision = ratio(tp, tp + fp, 1.0);
        let recall = ratio(tp, tp + fn_, 1.0);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Metrics {
            tp,
            fp,
            fn_,
            tn,
            fpr: ratio(fp, fp + tn, 0.0),
            fnr: ratio(fn_, fn_ + tp, 0.0),
            accuracy: ratio(tp + tn, tp + fp + fn_ + tn, 1.0),
            precision,
            recall,
            f1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KeyKind {
    Type,
    Field,
    Method,
}

/// Kind of declaration a key names; constructors and initializers count
/// as methods.
pub fn key_kind(key: &str) -> KeyKind {
    match key.split_once('#') {
        None => KeyKind::Type,
        Some((_, m)) if m.contains('(') || m == "<clinit>" => KeyKind::Method,
        Some(_) => KeyKind::Field,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub all: Metrics,
    pub types: Metrics,
    pub methods: Metrics,
    /// Keys retained by the reference but removed by the candidate.
    pub missed: Vec<String>,
}

impl Comparison {
    /// One row per scope: classes, methods, all declarations.
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<8} {:>7} {:>7} {:>9} {:>10} {:>7} {:>7}\n",
            "scope", "FPR", "FNR", "Accuracy", "Precision", "Recall", "F1"
        );
        for (name, m) in [("classes", &self.types), ("methods", &self.methods), ("all", &self.all)] {
            out.push_str(&format!(
                "{:<8} {:>7.3} {:>7.3} {:>9.3} {:>10.3} {:>7.3} {:>7.3}\n",
                name, m.fpr, m.fnr, m.accuracy, m.precision, m.recall, m.f1
            ));
        }
        out
    }
}

/// Scores `candidate` against `reference`. Both maps must cover the same keys.
pub fn compare(
    reference: &BTreeMap<String, Verdict>,
    candidate: &BTreeMap<String, Verdict>,
) -> Result<Comparison, OracleError> {
    if let Some(k) = reference.keys().find(|k| !candidate.contains_key(*k)) {
        return Err(OracleError::IndexMismatch(format!("`{k}` only in the reference")));
    }
    if let Some(k) = candidate.keys().find(|k| !reference.contains_key(*k)) {
        return Err(OracleError::IndexMismatch(format!("`{k}` only in the candidate")));
    }
    let mut counts = [[0usize; 4]; 3];
    let mut missed = Vec::new();
    for (k, r) in reference {
        let c = candidate[k];
        let cell = match (r.retained(), c.retained()) {
            (true, true) => 0,
            (false, true) => 1,
            (true, false) => {
                missed.push(k.clone());
                2
            }
            (false, false) => 3,
        };
        counts[0][cell] += 1;
        match key_kind(k) {
            KeyKind::Type => counts[1][cell] += 1,
            KeyKind::Method => counts[2][cell] += 1,
            KeyKind::Field => {}
        }
    }
    let m = |c: [usize; 4]| Metrics::from_counts(c[0], c[1], c[2], c[3]);
    Ok(Comparison {
        all: m(counts[0]),
        types: m(counts[1]),
        methods: m(counts[2]),
        missed,
    })
}
