//! Type-name resolution shared by header and body analysis.

use std::collections::HashMap;

use super::table::{AssignFact, Binding, CallSite, Problem, Ref, RefKind};
use super::types::{wildcard, TypeRef};
use crate::error::{Diagnostic, SemanticError};
use crate::frontend::ast::*;
use crate::frontend::{DeclKind, DeclLoc, Project};

/// Results of analysis that are appended to the symbol table.
#[derive(Default)]
pub(crate) struct Output {
    pub refs: HashMap<DeclId, Vec<Ref>>,
    pub call_sites: Vec<CallSite>,
    pub facts: Vec<AssignFact>,
    pub expr_types: HashMap<ExprId, TypeRef>,
    pub bindings: HashMap<ExprId, Binding>,
    pub problems: Vec<Problem>,
    pub record: bool,
}

impl Output {
    pub fn recording() -> Self {
        Output {
            record: true,
            ..Default::default()
        }
    }

    pub fn add_ref(&mut self, owner: DeclId, target: DeclId, kind: RefKind, span: Span) {
        if self.record {
            self.refs.entry(owner).or_default().push(Ref { target, kind, span });
        }
    }

    pub fn bind(&mut self, e: ExprId, b: Binding) {
        if self.record {
            self.bindings.insert(e, b);
        }
    }

    pub fn problem(&mut self, owner: Option<DeclId>, error: SemanticError) {
        if self.record {
            self.problems.push(Problem { owner, error });
        }
    }
}

/// Lexical context for resolving type names.
#[derive(Clone, Debug)]
pub(crate) struct TypeScope {
    pub file: usize,
    /// Enclosing types, outermost first.
    pub types: Vec<DeclId>,
    /// Type parameters of the enclosing generic method, if any.
    pub method: Option<(DeclId, Vec<String>)>,
}

pub(crate) enum Named {
    Type(DeclId),
    Var(DeclId, String),
}

pub(crate) struct Names<'a> {
    pub project: &'a Project,
    /// package -> simple name -> top-level type
    pub packages: HashMap<String, HashMap<String, DeclId>>,
}

impl<'a> Names<'a> {
    pub fn new(project: &'a Project) -> Self {
        let mut packages: HashMap<String, HashMap<String, DeclId>> = HashMap::new();
        for d in project.decls() {
            if d.kind.is_type() && d.container.is_none() {
                packages
                    .entry(project.package_of(d.id))
                    .or_default()
                    .insert(d.name.clone(), d.id);
            }
        }
        Names { project, packages }
    }

    pub fn is_package_prefix(&self, p: &str) -> bool {
        self.packages
            .keys()
            .any(|k| k == p || (k.starts_with(p) && k.as_bytes().get(p.len()) == Some(&b'.')))
    }

    pub fn path_of(&self, file: usize) -> std::path::PathBuf {
        self.project.files[file].path.clone()
    }

    pub fn unresolved(&self, file: usize, name: &str, span: Span) -> SemanticError {
        SemanticError::Unresolved(vec![Diagnostic {
            name: name.to_string(),
            message: format!("cannot find symbol `{name}`"),
            span,
            path: self.path_of(file),
        }])
    }

    /// Scope for resolving names inside declaration `decl`.
    pub fn scope_for(&self, decl: DeclId) -> TypeScope {
        let project = self.project;
        let d = project.decl(decl);
        let file = match &d.loc {
            DeclLoc::Type(tp) | DeclLoc::Member(tp, _) | DeclLoc::EnumConstant(tp, _) => tp.file,
        };
        let mut types = Vec::new();
        let mut cur = Some(project.owner_type(decl));
        while let Some(t) = cur {
            types.push(t);
            cur = project.decl(t).container;
        }
        types.reverse();
        let method = if d.kind == DeclKind::Method {
            let m = project.method(decl);
            Some((decl, m.type_params.iter().map(|p| p.name.clone()).collect()))
        } else {
            None
        };
        TypeScope { file, types, method }
    }

    fn nested(&self, ty: DeclId, name: &str) -> Option<DeclId> {
        self.project
            .decl(ty)
            .children
            .iter()
            .copied()
            .find(|c| {
                let d = self.project.decl(*c);
                d.kind.is_type() && d.name == name
            })
    }

    /// Resolves a simple type name. `Ok(None)` means not found.
    pub fn simple_type(&self, scope: &TypeScope, name: &str, span: Span) -> Result<Option<Named>, SemanticError> {
        if let Some((m, params)) = &scope.method {
            if params.iter().any(|p| p == name) {
                return Ok(Some(Named::Var(*m, name.to_string())));
            }
        }
        if let Some(&inner) = scope.types.last() {
            let t = self.project.type_decl(inner);
            if t.type_params.iter().any(|p| p.name == name) {
                return Ok(Some(Named::Var(inner, name.to_string())));
            }
        }
        for &t in scope.types.iter().rev() {
            if self.project.decl(t).name == name {
                return Ok(Some(Named::Type(t)));
            }
            if let Some(n) = self.nested(t, name) {
                return Ok(Some(Named::Type(n)));
            }
        }
        let unit = &self.project.files[scope.file].unit;
        let pkg = unit.package_name();
        if let Some(&t) = self.packages.get(&pkg).and_then(|m| m.get(name)) {
            if self.project.file_of(t).unit.file == unit.file {
                return Ok(Some(Named::Type(t)));
            }
        }
        for imp in unit.imports.iter().filter(|i| !i.on_demand) {
            if imp.path.last().map(String::as_str) == Some(name) {
                if let Some(t) = self.project.lookup(&imp.path.join(".")) {
                    if self.project.decl(t).kind.is_type() {
                        return Ok(Some(Named::Type(t)));
                    }
                }
            }
        }
        if let Some(&t) = self.packages.get(&pkg).and_then(|m| m.get(name)) {
            return Ok(Some(Named::Type(t)));
        }
        let mut found: Vec<DeclId> = Vec::new();
        let demand = unit
            .imports
            .iter()
            .filter(|i| i.on_demand)
            .map(|i| i.path.join("."))
            .chain(std::iter::once("java.lang".to_string()));
        for p in demand {
            let hit = self
                .packages
                .get(&p)
                .and_then(|m| m.get(name).copied())
                .or_else(|| self.project.lookup(&p).and_then(|t| self.nested(t, name)));
            if let Some(t) = hit {
                if !found.contains(&t) {
                    found.push(t);
                }
            }
        }
        match found.len() {
            0 => Ok(None),
            1 => Ok(Some(Named::Type(found[0]))),
            _ => Err(SemanticError::AmbiguousName {
                name: name.to_string(),
                span,
            }),
        }
    }

    /// Resolves a possibly qualified type name.
    pub fn type_name(&self, scope: &TypeScope, path: &[String], span: Span) -> Result<Named, SemanticError> {
        let missing = || self.unresolved(scope.file, &path.join("."), span);
        if path.len() == 1 {
            return self.simple_type(scope, &path[0], span)?.ok_or_else(missing);
        }
        if let Some(Named::Type(mut t)) = self.simple_type(scope, &path[0], span)? {
            for seg in &path[1..] {
                t = self.nested(t, seg).ok_or_else(missing)?;
            }
            return Ok(Named::Type(t));
        }
        for split in (1..=path.len()).rev() {
            if let Some(mut t) = self.project.lookup(&path[..split].join(".")) {
                if !self.project.decl(t).kind.is_type() {
                    continue;
                }
                for seg in &path[split..] {
                    t = self.nested(t, seg).ok_or_else(missing)?;
                }
                return Ok(Named::Type(t));
            }
        }
        Err(missing())
    }

    /// Resolves a type expression, recording a reference from `owner` to
    /// every named declaration. Errors are reported and yield `Unknown`.
    pub fn type_expr(
        &self,
        scope: &TypeScope,
        te: &TypeExpr,
        owner: Option<DeclId>,
        kind: RefKind,
        out: &mut Output,
    ) -> TypeRef {
        match te {
            TypeExpr::Prim(p, _) => TypeRef::Prim(*p),
            TypeExpr::Array(e, _) => TypeRef::Array(Box::new(self.type_expr(scope, e, owner, kind, out))),
            TypeExpr::Named { path, args, span } => match self.type_name(scope, path, *span) {
                Err(e) => {
                    out.problem(owner, e);
                    TypeRef::Unknown
                }
                Ok(Named::Var(o, n)) => {
                    if !args.is_empty() {
                        out.problem(
                            owner,
                            SemanticError::TypeSolve {
                                message: format!("type variable `{n}` cannot take type arguments"),
                                span: *span,
                            },
                        );
                    }
                    TypeRef::Var { owner: o, name: n }
                }
                Ok(Named::Type(d)) => {
                    if let Some(o) = owner {
                        out.add_ref(o, d, kind, *span);
                    }
                    let arity = self.project.type_decl(d).type_params.len();
                    let mut targs = Vec::new();
                    for a in args {
                        let t = match a {
                            TypeArgExpr::Type(t) => {
                                let r = self.type_expr(scope, t, owner, kind, out);
                                if matches!(r, TypeRef::Prim(_)) {
                                    out.problem(
                                        owner,
                                        SemanticError::TypeSolve {
                                            message: "primitive types cannot be type arguments".into(),
                                            span: t.span(),
                                        },
                                    );
                                    TypeRef::Unknown
                                } else {
                                    r
                                }
                            }
                            TypeArgExpr::Wildcard { bound: None, .. } => TypeRef::unbounded(),
                            TypeArgExpr::Wildcard {
                                bound: Some((k, b)), ..
                            } => wildcard((*k).into(), self.type_expr(scope, b, owner, kind, out)),
                        };
                        targs.push(t);
                    }
                    if targs.is_empty() {
                        targs = vec![TypeRef::unbounded(); arity];
                    } else if targs.len() != arity {
                        out.problem(
                            owner,
                            SemanticError::TypeSolve {
                                message: format!(
                                    "`{}` expects {arity} type argument(s), found {}",
                                    path.join("."),
                                    targs.len()
                                ),
                                span: *span,
                            },
                        );
                        targs = vec![TypeRef::unbounded(); arity];
                    }
                    TypeRef::class(d, targs)
                }
            },
        }
    }
}
