//! Class-granular reachability: a class is kept whole or not at all.

use std::collections::{BTreeSet, VecDeque};

use crate::frontend::ast::DeclId;
use crate::frontend::{DeclKind, Project};
use crate::semantics::{RefKind, SymbolTable};
use crate::sweep::{Decisions, SweepDecision, Verdict};

/// Project types reachable from the classes of `entrypoints`.
///
/// A reachable type makes reachable its container, nested types,
/// supertypes, the owners of everything its members reference, and for
/// virtual calls every project type that can supply an implementation.
pub fn reachable_classes(project: &Project, table: &SymbolTable, entrypoints: &BTreeSet<DeclId>) -> BTreeSet<DeclId> {
    let mut seen = BTreeSet::new();
    let mut work = VecDeque::new();
    let owner = |d: DeclId| -> DeclId {
        if project.decl(d).kind.is_type() {
            d
        } else {
            project.owner_type(d)
        }
    };
    for &e in entrypoints {
        work.push_back(owner(e));
    }
    while let Some(t) = work.pop_front() {
        if project.decl(t).is_stub || !seen.insert(t) {
            continue;
        }
        let d = project.decl(t);
        let mut next: Vec<DeclId> = Vec::new();
        next.extend(d.container);
        next.extend(table.all_supertype_decls(t));
        let mut members = vec![t];
        members.extend(d.children.iter().copied());
        for m in members {
            if m != t && project.decl(m).kind.is_type() {
                next.push(m);
                continue;
            }
            for r in table.refs_of(m) {
                if project.decl(r.target).is_stub {
                    continue;
                }
                next.push(owner(r.target));
                if let RefKind::VirtualCall(_) = r.kind {
                    let recv = project.owner_type(r.target);
                    for s in table.all_subtypes(recv) {
                        if let Some(imp) = table.dispatch(project, s, r.target) {
                            next.push(project.owner_type(imp));
                        }
                    }
                }
            }
        }
        work.extend(next);
    }
    seen
}

/// Everything inside a reachable class is NoOp; the rest is removed.
pub fn class_granular_minimize(project: &Project, table: &SymbolTable, entrypoints: &BTreeSet<DeclId>) -> Decisions {
    let reachable = reachable_classes(project, table, entrypoints);
    project
        .project_decls()
        .map(|e| {
            let t = if e.kind.is_type() { e.id } else { project.owner_type(e.id) };
            let d = if reachable.contains(&t) {
                SweepDecision::new(e.id, Verdict::NoOp, "class-reachable")
            } else {
                SweepDecision::new(e.id, Verdict::Remove, "class-unreachable")
            };
            (e.id, d)
        })
        .collect()
}

/// Types retained by `decisions`.
pub fn retained_classes(project: &Project, decisions: &Decisions) -> BTreeSet<DeclId> {
    project
        .project_decls()
        .filter(|e| matches!(e.kind, DeclKind::Class | DeclKind::Interface | DeclKind::Enum))
        .filter(|e| decisions.get(&e.id).map(|d| d.verdict.retained()).unwrap_or(true))
        .map(|e| e.id)
        .collect()
}
