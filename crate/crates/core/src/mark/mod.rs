//! Mark phase: worklist discovery of reachable declarations.

mod assigned;
mod entry;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

pub use assigned::{AssignedSets, AssignedTypeSet};
pub use entry::{collect_entrypoints, resolve_specs, EntrypointSpec, LifecycleConfig};

use crate::frontend::ast::DeclId;
use crate::frontend::{DeclKind, Project};
use crate::semantics::{CallKind, RefKind, SymbolTable, TypeRef, ValueSource};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    ReferencedBySymbol,
    DynamicCallTarget,
    ConstructorDelegation,
    ParentConstruct,
}

/// `from` (the dependent) needs `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReasonEdge {
    pub category: Reason,
    pub from: DeclId,
    pub to: DeclId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Directness {
    Direct,
    Transitive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReachabilityMark {
    pub decl: DeclId,
    pub directness: Directness,
    /// Edges into this declaration.
    pub reasons: BTreeSet<ReasonEdge>,
    pub entrypoint: bool,
}

/// Receiver types a virtual call may see at runtime.
#[derive(Clone, Debug, PartialEq)]
pub struct Cone {
    /// Closed cones hold the assigned types; open cones every concrete
    /// project subtype of the receiver's static type.
    pub types: Vec<TypeRef>,
    pub open: bool,
}

#[derive(Debug, Default)]
pub struct Marks {
    pub marks: BTreeMap<DeclId, ReachabilityMark>,
    pub edges: BTreeSet<ReasonEdge>,
    pub entrypoints: BTreeSet<DeclId>,
    /// Keyed by call-site index.
    pub cones: BTreeMap<usize, Cone>,
}

impl Marks {
    pub fn is_marked(&self, d: DeclId) -> bool {
        self.marks.contains_key(&d)
    }

    pub fn get(&self, d: DeclId) -> Option<&ReachabilityMark> {
        self.marks.get(&d)
    }

    pub fn marked(&self) -> impl Iterator<Item = DeclId> + '_ {
        self.marks.keys().copied()
    }
}

/// Methods whose parameters are fed from outside the analyzed code.
pub fn open_parameter_owners(project: &Project, table: &SymbolTable, entrypoints: &BTreeSet<DeclId>) -> BTreeSet<DeclId> {
    let mut out = entrypoints.clone();
    for d in project.project_decls() {
        if d.kind == DeclKind::Method && table.overrides(d.id).iter().any(|o| project.decl(*o).is_stub) {
            out.insert(d.id);
        }
    }
    out
}

fn concrete(project: &Project, d: DeclId) -> bool {
    let e = project.decl(d);
    matches!(e.kind, DeclKind::Class | DeclKind::Enum) && !e.is_abstract
}

/// Receiver cone of call site `site`.
pub fn receiver_cone(project: &Project, table: &SymbolTable, sets: &AssignedSets, site: usize) -> Cone {
    let cs = &table.call_sites[site];
    let closed = match &cs.receiver {
        ValueSource::Exact(t) => Some(vec![t.clone()]),
        ValueSource::Nothing => Some(Vec::new()),
        ValueSource::Var(v, use_ty) => {
            let s = sets.at_use(table, v, use_ty);
            (!s.open).then_some(s.types)
        }
        ValueSource::Open => None,
    };
    match closed {
        Some(types) => Cone { types, open: false },
        None => {
            let ub = match &cs.receiver_type {
                TypeRef::Array(_) => table.object(),
                t => table.upper_bound(t),
            };
            let types = match ub.class_decl() {
                Some(d) => table
                    .all_subtypes(d)
                    .into_iter()
                    .filter(|s| !project.decl(*s).is_stub && concrete(project, *s))
                    .map(|s| TypeRef::class(s, vec![TypeRef::unbounded(); table.params_of(s).len()]))
                    .collect(),
                None => Vec::new(),
            };
            Cone { types, open: true }
        }
    }
}

/// Static target plus every implementation selected by a type in the cone.
pub fn dynamic_targets(project: &Project, table: &SymbolTable, site: usize, cone: &Cone) -> BTreeSet<DeclId> {
    let cs = &table.call_sites[site];
    let mut out = BTreeSet::from([cs.target]);
    if cs.kind != CallKind::Virtual || project.decl(cs.target).is_static {
        return out;
    }
    for t in &cone.types {
        if let Some(d) = t.class_decl() {
            if let Some(m) = table.dispatch(project, d, cs.target) {
                out.insert(m);
            }
        }
    }
    out
}

struct Marker<'a> {
    project: &'a Project,
    table: &'a SymbolTable,
    sets: AssignedSets,
    out: Marks,
    work: VecDeque<DeclId>,
}

impl<'a> Marker<'a> {
    fn mark(&mut self, to: DeclId, directness: Directness, edge: Option<(Reason, DeclId)>) {
        if self.project.decl(to).is_stub {
            return;
        }
        let e = edge.map(|(category, from)| ReasonEdge { category, from, to });
        if let Some(e) = e {
            self.out.edges.insert(e);
        }
        match self.out.marks.get_mut(&to) {
            Some(m) => {
                m.directness = m.directness.min(directness);
                if let Some(e) = e {
                    m.reasons.insert(e);
                }
            }
            None => {
                self.out.marks.insert(
                    to,
                    ReachabilityMark {
                        decl: to,
                        directness,
                        reasons: e.into_iter().collect(),
                        entrypoint: false,
                    },
                );
                self.work.push_back(to);
            }
        }
    }

    fn children_of_kind(&self, d: DeclId, kind: DeclKind) -> Vec<DeclId> {
        self.project
            .decl(d)
            .children
            .iter()
            .copied()
            .filter(|c| self.project.decl(*c).kind == kind)
            .collect()
    }

    fn process(&mut self, d: DeclId) {
        let (project, table) = (self.project, self.table);
        let entry = project.decl(d);
        if let Some(c) = entry.container {
            self.mark(c, Directness::Direct, Some((Reason::ParentConstruct, d)));
        }
        for r in table.refs_of(d) {
            match r.kind {
                RefKind::Delegation => {
                    self.mark(r.target, Directness::Transitive, Some((Reason::ConstructorDelegation, d)))
                }
                RefKind::VirtualCall(site) => {
                    self.mark(r.target, Directness::Direct, Some((Reason::ReferencedBySymbol, d)));
                    let cone = receiver_cone(project, table, &self.sets, site);
                    for t in dynamic_targets(project, table, site, &cone) {
                        if t != r.target {
                            self.mark(t, Directness::Transitive, Some((Reason::DynamicCallTarget, d)));
                        }
                    }
                    self.out.cones.insert(site, cone);
                }
                _ => self.mark(r.target, Directness::Direct, Some((Reason::ReferencedBySymbol, d))),
            }
        }
        if entry.kind.is_type() {
            for i in self.children_of_kind(d, DeclKind::Initializer) {
                self.mark(i, Directness::Direct, Some((Reason::ReferencedBySymbol, d)));
            }
            for c in self.children_of_kind(d, DeclKind::Constructor) {
                self.mark(c, Directness::Transitive, Some((Reason::ConstructorDelegation, d)));
            }
            if entry.kind == DeclKind::Enum {
                for c in self.children_of_kind(d, DeclKind::EnumConstant) {
                    self.mark(c, Directness::Direct, Some((Reason::ReferencedBySymbol, d)));
                }
            }
            for m in self.children_of_kind(d, DeclKind::Method) {
                if table.overrides(m).iter().any(|o| project.decl(*o).is_stub) {
                    self.mark(m, Directness::Transitive, Some((Reason::DynamicCallTarget, d)));
                }
            }
            if concrete(project, d) {
                for (abs, imp) in table.abstract_obligations(project, d) {
                    if let Some(imp) = imp.filter(|_| self.out.is_marked(abs)) {
                        self.mark(imp, Directness::Transitive, Some((Reason::DynamicCallTarget, d)));
                    }
                }
            }
        }
        if entry.kind == DeclKind::Method && entry.is_abstract {
            let owner = project.owner_type(d);
            for sub in table.all_subtypes(owner) {
                if self.out.is_marked(sub) && concrete(project, sub) {
                    if let Some(imp) = table.dispatch(project, sub, d) {
                        self.mark(imp, Directness::Transitive, Some((Reason::DynamicCallTarget, sub)));
                    }
                }
            }
        }
    }
}

/// Least fixpoint of the marking rules from `entrypoints`.
pub fn mark(project: &Project, table: &SymbolTable, entrypoints: &BTreeSet<DeclId>) -> Marks {
    let open = open_parameter_owners(project, table, entrypoints);
    let sets = AssignedSets::compute(table, &open);
    let mut m = Marker {
        project,
        table,
        sets,
        out: Marks {
            entrypoints: entrypoints.clone(),
            ..Default::default()
        },
        work: VecDeque::new(),
    };
    for &e in entrypoints {
        m.mark(e, Directness::Direct, None);
        if let Some(mk) = m.out.marks.get_mut(&e) {
            mk.entrypoint = true;
        }
    }
    while let Some(d) = m.work.pop_front() {
        m.process(d);
    }
    m.out
}

#[cfg(test)]
mod tests;
