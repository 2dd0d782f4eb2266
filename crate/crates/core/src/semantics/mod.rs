//! Name resolution, class hierarchy, overload resolution and generics.

mod body;
pub mod overload;
mod resolve;
pub mod table;
pub mod types;

use std::collections::HashMap;

use crate::error::SemanticError;
use crate::frontend::ast::*;
use crate::frontend::{DeclKind, Project};

pub use table::{
    AssignFact, Binding, CallKind, CallSite, MethodSig, Problem, Ref, RefKind, SolveMode, SymbolTable, ValueSource, VarId,
};
pub use types::{render, substitute, wildcard, Substitution, TypeRef, WildKind};

use resolve::{Names, Output};

/// Builds the symbol table, failing on the first resolution problem.
/// Unresolved names are reported together.
pub fn build_symbol_table(project: &Project) -> Result<SymbolTable, SemanticError> {
    let mut table = build_lenient(project);
    let problems = std::mem::take(&mut table.problems);
    let diags: Vec<_> = problems.iter().filter_map(|p| p.diagnostic().cloned()).collect();
    if !diags.is_empty() {
        return Err(SemanticError::Unresolved(diags));
    }
    if let Some(p) = problems.into_iter().next() {
        return Err(p.error);
    }
    Ok(table)
}

/// Builds the symbol table, recording problems per declaration instead of
/// failing.
pub fn build_lenient(project: &Project) -> SymbolTable {
    let names = Names::new(project);
    let mut table = SymbolTable::default();
    let mut out = Output::recording();
    let wk = |k: &str| project.lookup(k);
    table.well_known.object = wk("java.lang.Object");
    table.well_known.string = wk("java.lang.String");
    table.well_known.enum_ = wk("java.lang.Enum");
    table.well_known.class = wk("java.lang.Class");

    for d in project.decls() {
        if d.kind.is_type() {
            let t = project.type_decl(d.id);
            table
                .type_params
                .insert(d.id, t.type_params.iter().map(|p| p.name.clone()).collect());
        }
    }
    headers(project, &names, &mut table, &mut out);
    compute_overrides(project, &mut table);

    let mut a = body::Analyzer {
        names: &names,
        project,
        table: &table,
        mode: SolveMode::Solved,
        out,
    };
    for d in project.decls() {
        a.analyze(d.id);
    }
    let out = a.out;
    table.refs = out.refs;
    table.call_sites = out.call_sites;
    table.facts = out.facts;
    table.expr_types = out.expr_types;
    table.bindings = out.bindings;
    table.problems = out.problems;
    table
}

/// Solves the type of every expression in `decl`'s body or initializer
/// under `mode`, without recording references.
pub fn solve_expr_types(project: &Project, table: &SymbolTable, decl: DeclId, mode: SolveMode) -> HashMap<ExprId, TypeRef> {
    let names = Names::new(project);
    let mut a = body::Analyzer {
        names: &names,
        project,
        table,
        mode,
        out: Output::default(),
    };
    a.analyze(decl);
    a.out.expr_types
}

fn headers(project: &Project, names: &Names, table: &mut SymbolTable, out: &mut Output) {
    for d in project.decls() {
        let scope = names.scope_for(d.id);
        match d.kind {
            DeclKind::Class | DeclKind::Interface | DeclKind::Enum => {
                let t = project.type_decl(d.id);
                for p in &t.type_params {
                    if let Some(b) = &p.bound {
                        let bt = names.type_expr(&scope, b, Some(d.id), RefKind::Signature, out);
                        table.tvar_bounds.insert((d.id, p.name.clone()), bt);
                    }
                }
                let mut supers = Vec::new();
                match d.kind {
                    DeclKind::Class => {
                        let sc = match &t.superclass {
                            Some(s) => Some(names.type_expr(&scope, s, Some(d.id), RefKind::Signature, out)),
                            None if Some(d.id) != table.well_known.object => Some(table.object()),
                            None => None,
                        };
                        if let Some(sc) = sc.filter(|s| s.class_decl().is_some()) {
                            table.superclass.insert(d.id, sc.clone());
                            supers.push(sc);
                        }
                    }
                    DeclKind::Enum => {
                        if let Some(e) = table.well_known.enum_ {
                            let sc = TypeRef::class(e, vec![TypeRef::class(d.id, vec![])]);
                            table.superclass.insert(d.id, sc.clone());
                            supers.push(sc);
                        }
                    }
                    _ => {}
                }
                for i in &t.interfaces {
                    let it = names.type_expr(&scope, i, Some(d.id), RefKind::Signature, out);
                    if it.class_decl().is_some() {
                        supers.push(it);
                    }
                }
                for s in &supers {
                    if let Some(sd) = s.class_decl() {
                        table.subtypes.entry(sd).or_default().push(d.id);
                    }
                }
                table.supers.insert(d.id, supers);
            }
            DeclKind::Field => {
                let fd = project.field(d.id).expect("field");
                let t = names.type_expr(&scope, &fd.ty, Some(d.id), RefKind::Signature, out);
                table.field_types.insert(d.id, t);
            }
            DeclKind::EnumConstant => {
                let owner = d.container.expect("enum constant container");
                table.field_types.insert(d.id, TypeRef::class(owner, vec![]));
            }
            DeclKind::Method => {
                let m = project.method(d.id);
                for p in &m.type_params {
                    if let Some(b) = &p.bound {
                        let bt = names.type_expr(&scope, b, Some(d.id), RefKind::Signature, out);
                        table.tvar_bounds.insert((d.id, p.name.clone()), bt);
                    }
                }
                let params = m
                    .params
                    .iter()
                    .map(|p| names.type_expr(&scope, &p.ty, Some(d.id), RefKind::Signature, out))
                    .collect();
                let ret = names.type_expr(&scope, &m.ret, Some(d.id), RefKind::Signature, out);
                table.sigs.insert(
                    d.id,
                    MethodSig {
                        type_params: m.type_params.iter().map(|p| p.name.clone()).collect(),
                        params,
                        ret,
                    },
                );
            }
            DeclKind::Constructor => {
                let c = project.ctor(d.id);
                let params = c
                    .params
                    .iter()
                    .map(|p| names.type_expr(&scope, &p.ty, Some(d.id), RefKind::Signature, out))
                    .collect();
                table.sigs.insert(
                    d.id,
                    MethodSig {
                        type_params: Vec::new(),
                        params,
                        ret: TypeRef::Prim(PrimKind::Void),
                    },
                );
            }
            DeclKind::Initializer => {}
        }
    }
}

fn compute_overrides(project: &Project, table: &mut SymbolTable) {
    let mut links = Vec::new();
    for d in project.decls() {
        if d.kind != DeclKind::Method || d.is_static {
            continue;
        }
        let c = project.owner_type(d.id);
        let Some(mine) = table.erased_params_from(project, c, d.id) else { continue };
        let mut sups = table.all_supertype_decls(c);
        if let Some(o) = table.well_known.object {
            if o != c && !sups.contains(&o) {
                sups.push(o);
            }
        }
        for s in sups {
            for &n in &project.decl(s).children {
                let nd = project.decl(n);
                if nd.kind == DeclKind::Method
                    && !nd.is_static
                    && nd.name == d.name
                    && table.erased_params_from(project, c, n).as_ref() == Some(&mine)
                {
                    links.push((d.id, n));
                }
            }
        }
    }
    for (m, n) in links {
        table.overrides.entry(m).or_default().push(n);
        table.overridden_by.entry(n).or_default().push(m);
    }
}

#[cfg(test)]
mod tests;
