//! Sweep phase: necessity tracing over the reachability graph and the
//! per-declaration decisions.

mod graph;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

pub use graph::{build_reachability_graph, trace, ReachabilityGraph};

use crate::frontend::ast::DeclId;
use crate::frontend::{DeclKind, Project};
use crate::mark::{Marks, Reason, ReasonEdge};
use crate::semantics::{RefKind, SymbolTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Verdict {
    NoOp,
    Dummy,
    Remove,
}

impl Verdict {
    pub fn retained(self) -> bool {
        self != Verdict::Remove
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::NoOp => "NOOP",
            Verdict::Dummy => "DUMMY",
            Verdict::Remove => "REMOVE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    Edge(ReasonEdge),
    Rule(&'static str),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepDecision {
    pub decl: DeclId,
    pub verdict: Verdict,
    pub justification: Vec<Justification>,
}

impl SweepDecision {
    pub fn new(decl: DeclId, verdict: Verdict, rule: &'static str) -> Self {
        SweepDecision {
            decl,
            verdict,
            justification: vec![Justification::Rule(rule)],
        }
    }
}

pub type Decisions = BTreeMap<DeclId, SweepDecision>;

/// Verdicts plus the facts they were derived from.
#[derive(Debug, Default)]
pub struct Sweep {
    pub decisions: Decisions,
    pub needed: BTreeSet<DeclId>,
    /// Runtime classes of objects the retained code may create.
    pub created: BTreeSet<DeclId>,
    /// `created` plus their superclasses.
    pub instantiated: BTreeSet<DeclId>,
    pub rounds: usize,
}

impl Sweep {
    pub fn verdict(&self, d: DeclId) -> Verdict {
        self.decisions.get(&d).map(|x| x.verdict).unwrap_or(Verdict::Remove)
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.decisions.values().filter(|d| d.verdict == v).count()
    }
}

fn concrete_class(project: &Project, d: DeclId) -> bool {
    let e = project.decl(d);
    matches!(e.kind, DeclKind::Class | DeclKind::Enum) && !e.is_abstract
}

/// Classes whose objects the live declarations may create: targets of
/// object creations, enums with live constants, and classes of instance
/// entrypoints.
pub fn created_classes(
    project: &Project,
    table: &SymbolTable,
    live: &BTreeSet<DeclId>,
    entrypoints: &BTreeSet<DeclId>,
) -> BTreeSet<DeclId> {
    let mut out = BTreeSet::new();
    for &d in live {
        for r in table.refs_of(d) {
            if r.kind == RefKind::Instantiate && concrete_class(project, r.target) {
                out.insert(r.target);
            }
        }
        let e = project.decl(d);
        if e.kind == DeclKind::EnumConstant {
            out.insert(project.owner_type(d));
        }
    }
    for &e in entrypoints {
        let d = project.decl(e);
        if d.kind == DeclKind::Method && !d.is_static {
            out.insert(project.owner_type(e));
        }
    }
    out
}

/// `created` together with every superclass (object construction runs
/// through the superclass chain).
pub fn instantiated_classes(table: &SymbolTable, created: &BTreeSet<DeclId>) -> BTreeSet<DeclId> {
    let mut out = BTreeSet::new();
    for &c in created {
        let mut cur = Some(c);
        while let Some(x) = cur {
            if !out.insert(x) {
                break;
            }
            cur = table.superclass_decl(x);
        }
    }
    out
}

/// Whether any needed declaration creates `class` or an object of a
/// subclass of it.
pub fn is_class_instantiated(project: &Project, table: &SymbolTable, marks: &Marks, class: DeclId) -> bool {
    let sweep = decide(project, table, marks, &build_reachability_graph(marks));
    sweep.instantiated.contains(&class)
}

struct Decider<'a> {
    project: &'a Project,
    table: &'a SymbolTable,
    marks: &'a Marks,
    graph: &'a ReachabilityGraph,
    needed: BTreeSet<DeclId>,
    /// Needed and not removed in the previous round.
    live: BTreeSet<DeclId>,
    created: BTreeSet<DeclId>,
    instantiated: BTreeSet<DeclId>,
    out: Decisions,
}

impl<'a> Decider<'a> {
    fn live_in_edges(&self, d: DeclId) -> impl Iterator<Item = &ReasonEdge> + '_ {
        self.graph.in_edges(d).iter().filter(|e| self.live.contains(&e.from))
    }

    fn support(&self, d: DeclId) -> Vec<Justification> {
        self.live_in_edges(d).take(1).map(|e| Justification::Edge(*e)).collect()
    }

    fn set(&mut self, d: DeclId, v: Verdict, rule: &'static str) {
        let mut justification = vec![Justification::Rule(rule)];
        if v.retained() {
            justification.splice(0..0, self.support(d));
        }
        self.out.insert(
            d,
            SweepDecision {
                decl: d,
                verdict: v,
                justification,
            },
        );
    }

    fn container_removed(&self, d: DeclId) -> bool {
        match self.project.decl(d).container {
            Some(c) => self.out.get(&c).map(|x| x.verdict == Verdict::Remove).unwrap_or(false),
            None => false,
        }
    }

    fn referenced_by_symbol(&self, d: DeclId) -> bool {
        self.live_in_edges(d).any(|e| e.category == Reason::ReferencedBySymbol)
    }

    fn super_call_target(&self, d: DeclId) -> bool {
        self.live_in_edges(d).any(|e| {
            self.table
                .refs_of(e.from)
                .iter()
                .any(|r| r.kind == RefKind::SuperCall && r.target == d)
        })
    }

    fn dispatched(&self, m: DeclId) -> bool {
        self.created
            .iter()
            .any(|&t| self.table.dispatch(self.project, t, m) == Some(m))
    }

    /// Every declaration except constructors, containers before members.
    fn first_round(&mut self) {
        let ids: Vec<DeclId> = self.project.project_decls().map(|d| d.id).collect();
        for d in ids {
            let e = self.project.decl(d);
            if e.kind == DeclKind::Constructor {
                continue;
            }
            if !self.marks.is_marked(d) {
                self.set(d, Verdict::Remove, "unmarked");
                continue;
            }
            if self.container_removed(d) {
                self.set(d, Verdict::Remove, "container-removed");
                continue;
            }
            if !self.needed.contains(&d) {
                self.set(d, Verdict::Remove, "unsupported");
                continue;
            }
            match e.kind {
                DeclKind::Method if !e.is_static && !e.is_abstract => {
                    if self.marks.entrypoints.contains(&d) {
                        self.set(d, Verdict::NoOp, "entrypoint");
                    } else if self.dispatched(d) {
                        self.set(d, Verdict::NoOp, "dispatched");
                    } else if self.super_call_target(d) {
                        self.set(d, Verdict::NoOp, "super-call");
                    } else if self.referenced_by_symbol(d) {
                        self.set(d, Verdict::Dummy, "never-dispatched");
                    } else {
                        self.set(d, Verdict::Remove, "never-dispatched");
                    }
                }
                DeclKind::Field if self.project.field(d).is_some_and(|f| f.init.is_some()) => {
                    self.set(d, Verdict::NoOp, "field-initializer")
                }
                _ => self.set(d, Verdict::NoOp, "needed"),
            }
        }
    }

    /// Implementations of abstract methods that a retained concrete class
    /// needs in order to compile.
    fn obligations(&mut self) {
        let classes: Vec<DeclId> = self
            .out
            .values()
            .filter(|x| x.verdict.retained() && concrete_class(self.project, x.decl))
            .map(|x| x.decl)
            .collect();
        for c in classes {
            for (abs, imp) in self.table.abstract_obligations(self.project, c) {
                let abs_kept = self.project.decl(abs).is_stub || self.out.get(&abs).is_some_and(|x| x.verdict.retained());
                let Some(imp) = imp.filter(|i| abs_kept && !self.project.decl(*i).is_stub) else {
                    continue;
                };
                if self.out.get(&imp).is_some_and(|x| x.verdict == Verdict::Remove) && !self.container_removed(imp) {
                    let mut dec = SweepDecision::new(imp, Verdict::Dummy, "abstract-obligation");
                    dec.justification.push(Justification::Rule("implements"));
                    self.out.insert(imp, dec);
                }
            }
        }
    }

    fn ctor_used(&self, c: DeclId) -> Option<&'static str> {
        if self.marks.entrypoints.contains(&c) {
            return Some("entrypoint");
        }
        let owner = self.project.owner_type(c);
        if self.project.decl(owner).kind == DeclKind::Enum {
            return Some("enum-constant");
        }
        for e in self.live_in_edges(c) {
            let from = e.from;
            for r in self.table.refs_of(from) {
                if r.target != c {
                    continue;
                }
                match r.kind {
                    RefKind::Creation => return Some("creation"),
                    RefKind::Delegation => return Some("delegation"),
                    _ => {}
                }
            }
        }
        None
    }

    fn ctors_of(&self, class: DeclId) -> Vec<DeclId> {
        self.project
            .decl(class)
            .children
            .iter()
            .copied()
            .filter(|c| self.project.decl(*c).kind == DeclKind::Constructor)
            .collect()
    }

    /// Whether an implicit `super()` from a subclass of `class` compiles.
    fn no_arg_available(&self, class: DeclId) -> bool {
        let ctors = self.ctors_of(class);
        ctors.is_empty()
            || ctors.iter().any(|&c| {
                self.table.sig(c).is_some_and(|s| s.params.is_empty())
                    && (self.project.decl(c).is_stub || self.out.get(&c).is_some_and(|x| x.verdict.retained()))
            })
    }

    fn depth(&self, class: DeclId) -> usize {
        let mut n = 0;
        let mut cur = self.table.superclass_decl(class);
        while let Some(c) = cur {
            n += 1;
            cur = self.table.superclass_decl(c);
        }
        n
    }

    fn constructors(&mut self) {
        let mut classes: Vec<DeclId> = self
            .project
            .project_decls()
            .filter(|d| d.kind.is_type())
            .map(|d| d.id)
            .collect();
        classes.sort_by_key(|&c| (self.depth(c), c));
        for class in classes {
            let ctors = self.ctors_of(class);
            if ctors.is_empty() {
                continue;
            }
            let class_kept = self.out.get(&class).is_some_and(|x| x.verdict.retained());
            let mut any = false;
            for &c in &ctors {
                let v = if !class_kept {
                    (Verdict::Remove, "container-removed")
                } else if !self.needed.contains(&c) {
                    (Verdict::Remove, "unsupported")
                } else if let Some(rule) = self.ctor_used(c) {
                    any = true;
                    (Verdict::NoOp, rule)
                } else {
                    (Verdict::Remove, "unused-constructor")
                };
                self.set(c, v.0, v.1);
            }
            let sup_ok = self
                .table
                .superclass_decl(class)
                .map(|s| self.no_arg_available(s))
                .unwrap_or(true);
            if class_kept && !any && !sup_ok {
                let keep = ctors
                    .iter()
                    .copied()
                    .min_by_key(|&c| {
                        let e = self.project.decl(c);
                        (self.table.sig(c).map(|s| s.params.len()).unwrap_or(0), e.key.clone())
                    })
                    .expect("non-empty");
                self.set(keep, Verdict::Dummy, "kept-for-compilation");
            }
        }
    }

    fn round(&mut self) {
        self.out.clear();
        self.first_round();
        self.obligations();
        self.constructors();
    }
}

/// Decide every project declaration. Rounds repeat until the removed set
/// is stable: removed declarations stop supporting what they reference.
pub fn decide(project: &Project, table: &SymbolTable, marks: &Marks, graph: &ReachabilityGraph) -> Sweep {
    let mut d = Decider {
        project,
        table,
        marks,
        graph,
        needed: BTreeSet::new(),
        live: BTreeSet::new(),
        created: BTreeSet::new(),
        instantiated: BTreeSet::new(),
        out: Decisions::new(),
    };
    let mut removed: HashSet<DeclId> = HashSet::new();
    let cap = project.decls().len() + 2;
    let mut rounds = 0;
    loop {
        rounds += 1;
        d.needed = graph.needed(&removed);
        d.live = d.needed.iter().copied().filter(|x| !removed.contains(x)).collect();
        d.created = created_classes(project, table, &d.live, &marks.entrypoints);
        d.instantiated = instantiated_classes(table, &d.created);
        d.round();
        let next: HashSet<DeclId> = d
            .out
            .values()
            .filter(|x| x.verdict == Verdict::Remove)
            .map(|x| x.decl)
            .collect();
        if next == removed || rounds >= cap {
            break;
        }
        removed = next;
    }
    Sweep {
        decisions: d.out,
        needed: d.needed,
        created: d.created,
        instantiated: d.instantiated,
        rounds,
    }
}

#[cfg(test)]
mod tests;
