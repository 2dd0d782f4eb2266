//! Applicable/most-specific method selection.

use super::table::SymbolTable;
use super::types::{substitute, Substitution, TypeRef, WildKind};
use crate::error::SemanticError;
use crate::frontend::ast::{DeclId, Span};
use crate::frontend::Project;

#[derive(Clone, Debug)]
pub struct Candidate {
    pub decl: DeclId,
    /// Substitution of the receiver's type variables.
    pub recv: Substitution,
}

#[derive(Clone, Debug)]
pub struct Selected {
    pub decl: DeclId,
    pub params: Vec<TypeRef>,
    pub ret: TypeRef,
}

/// Binds method type variables occurring in `param` against `arg`.
fn unify(table: &SymbolTable, param: &TypeRef, arg: &TypeRef, method: DeclId, out: &mut Substitution) {
    match param {
        TypeRef::Var { owner, name } if *owner == method => {
            if out.contains(method, name) {
                return;
            }
            match arg {
                TypeRef::Prim(_) | TypeRef::Null | TypeRef::Unknown => {}
                a => out.insert(method, name, a.clone()),
            }
        }
        TypeRef::Wildcard { bound: Some(b), .. } => match arg {
            TypeRef::Wildcard { bound: Some(ab), .. } => unify(table, b, ab, method, out),
            TypeRef::Wildcard { .. } => {}
            a => unify(table, b, a, method, out),
        },
        TypeRef::Array(pe) => {
            if let TypeRef::Array(ae) = arg {
                unify(table, pe, ae, method, out);
            }
        }
        TypeRef::Class { decl, args } if !args.is_empty() => {
            let ub = table.upper_bound(arg);
            if let Some(TypeRef::Class { args: aargs, .. }) = table.as_super(&ub, *decl) {
                for (p, a) in args.iter().zip(&aargs) {
                    unify(table, p, a, method, out);
                }
            }
        }
        _ => {}
    }
}

fn signature_text(project: &Project, table: &SymbolTable, c: &Candidate) -> String {
    let d = project.decl(c.decl);
    let params: Vec<String> = table
        .sig(c.decl)
        .map(|s| {
            s.params
                .iter()
                .map(|p| super::types::render(&substitute(p, &c.recv), project))
                .collect()
        })
        .unwrap_or_default();
    format!("{}({})", d.name, params.join(", "))
}

/// Selects among `candidates` for a call with `args`.
pub fn select(
    project: &Project,
    table: &SymbolTable,
    candidates: &[Candidate],
    args: &[TypeRef],
    type_args: &[TypeRef],
    name: &str,
    span: Span,
) -> Result<Selected, SemanticError> {
    let mut applicable: Vec<(usize, Selected)> = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        let Some(sig) = table.sig(c.decl) else { continue };
        if sig.params.len() != args.len() {
            continue;
        }
        let mut msubst = Substitution::new();
        if !sig.type_params.is_empty() {
            if type_args.len() == sig.type_params.len() {
                for (p, a) in sig.type_params.iter().zip(type_args) {
                    msubst.insert(c.decl, p, a.clone());
                }
            } else {
                for (p, a) in sig.params.iter().zip(args) {
                    unify(table, &substitute(p, &c.recv), a, c.decl, &mut msubst);
                }
            }
            for p in &sig.type_params {
                if !msubst.contains(c.decl, p) {
                    msubst.insert(c.decl, p, TypeRef::unbounded());
                }
            }
        }
        let params: Vec<TypeRef> = sig
            .params
            .iter()
            .map(|p| substitute(&substitute(p, &c.recv), &msubst))
            .collect();
        if params.iter().zip(args).all(|(p, a)| table.is_subtype(a, p)) {
            let ret = substitute(&substitute(&sig.ret, &c.recv), &msubst);
            applicable.push((i, Selected { decl: c.decl, params, ret }));
        }
    }
    if applicable.is_empty() {
        return Err(SemanticError::NoApplicableMethod {
            name: name.to_string(),
            span,
        });
    }
    let more_specific = |a: &Selected, b: &Selected| a.params.iter().zip(&b.params).all(|(x, y)| table.is_subtype(x, y));
    let best: Vec<usize> = (0..applicable.len())
        .filter(|&i| {
            (0..applicable.len()).all(|j| i == j || more_specific(&applicable[i].1, &applicable[j].1))
        })
        .collect();
    if best.len() == 1 {
        return Ok(applicable.swap_remove(best[0]).1);
    }
    let mut names: Vec<String> = applicable
        .iter()
        .map(|(i, _)| signature_text(project, table, &candidates[*i]))
        .collect();
    names.sort();
    Err(SemanticError::AmbiguousOverload {
        name: name.to_string(),
        candidates: names,
        span,
    })
}

/// True when `t` is a wildcard at top level.
pub fn is_wildcard(t: &TypeRef) -> bool {
    matches!(t, TypeRef::Wildcard { .. })
}

/// `? extends Object`, the naive view of a captured result.
pub fn naive_top(table: &SymbolTable) -> TypeRef {
    TypeRef::Wildcard {
        kind: WildKind::Extends,
        bound: Some(Box::new(table.object())),
    }
}
