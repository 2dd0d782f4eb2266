//! Rewrites a project according to sweep decisions.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{EmitError, Error, Result};
use crate::frontend::ast::*;
use crate::frontend::{print_unit, tokenize, DeclKind, Project, TokenKind};
use crate::semantics::{substitute, RefKind, SymbolTable, TypeRef, WildKind};
use crate::sweep::{Decisions, Verdict};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DummyMode {
    /// Bodies throw an `AssertionError` naming the member.
    #[default]
    Assert,
    /// Bodies return the default value of the return type.
    Empty,
}

impl std::str::FromStr for DummyMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "assert" => Ok(DummyMode::Assert),
            "empty" => Ok(DummyMode::Empty),
            _ => Err(format!("unknown dummy mode `{s}` (expected assert or empty)")),
        }
    }
}

/// Output of [`apply`]: the rewritten sources (paths relative to the
/// project root) and the project loaded from them.
#[derive(Debug)]
pub struct Emitted {
    pub sources: Vec<(PathBuf, String)>,
    pub project: Project,
}

fn span0() -> Span {
    Span::default()
}

fn expr(kind: ExprKind) -> Expr {
    Expr {
        id: ExprId::default(),
        kind,
        span: span0(),
    }
}

fn lit(l: Literal) -> Expr {
    expr(ExprKind::Lit(l))
}

/// Source form of `t` using qualified names, so it resolves from any file.
pub fn type_ref_expr(t: &TypeRef, project: &Project) -> TypeExpr {
    match t {
        TypeRef::Class { decl, args } => TypeExpr::Named {
            path: project.decl(*decl).key.split('.').map(str::to_string).collect(),
            args: args
                .iter()
                .map(|a| match a {
                    TypeRef::Wildcard { kind, bound } => TypeArgExpr::Wildcard {
                        bound: bound.as_ref().map(|b| {
                            let k = if *kind == WildKind::Super { BoundKind::Super } else { BoundKind::Extends };
                            (k, Box::new(type_ref_expr(b, project)))
                        }),
                        span: span0(),
                    },
                    other => TypeArgExpr::Type(type_ref_expr(other, project)),
                })
                .collect(),
            span: span0(),
        },
        TypeRef::Var { name, .. } => TypeExpr::named(name),
        TypeRef::Wildcard {
            kind: WildKind::Extends,
            bound: Some(b),
        } => type_ref_expr(b, project),
        TypeRef::Array(e) => TypeExpr::Array(Box::new(type_ref_expr(e, project)), span0()),
        TypeRef::Prim(p) => TypeExpr::Prim(*p, span0()),
        _ => TypeExpr::named("java.lang.Object"),
    }
}

/// Default value of a type: zero, false, or a null cast to the type so
/// overload selection is unchanged.
pub fn default_value(t: &TypeRef, project: &Project) -> Expr {
    match t {
        TypeRef::Prim(PrimKind::Int) => lit(Literal::Int(0)),
        TypeRef::Prim(PrimKind::Double) => lit(Literal::Double(0.0)),
        TypeRef::Prim(PrimKind::Boolean) => lit(Literal::Bool(false)),
        TypeRef::Prim(PrimKind::Char) => lit(Literal::Char('\0')),
        _ => expr(ExprKind::Cast {
            ty: type_ref_expr(t, project),
            expr: Box::new(lit(Literal::Null)),
        }),
    }
}

fn default_of_type_expr(t: &TypeExpr) -> Expr {
    match t {
        TypeExpr::Prim(PrimKind::Int, _) => lit(Literal::Int(0)),
        TypeExpr::Prim(PrimKind::Double, _) => lit(Literal::Double(0.0)),
        TypeExpr::Prim(PrimKind::Boolean, _) => lit(Literal::Bool(false)),
        TypeExpr::Prim(PrimKind::Char, _) => lit(Literal::Char('\0')),
        _ => lit(Literal::Null),
    }
}

fn assertion(message: String) -> Stmt {
    let new = expr(ExprKind::New {
        ty: TypeExpr::named("java.lang.AssertionError"),
        args: vec![lit(Literal::Str(message))],
    });
    Stmt::Throw(new, span0())
}

/// Replacement body for a dummied method or constructor.
pub fn dummy_body(project: &Project, table: &SymbolTable, decl: DeclId, mode: DummyMode) -> Block {
    let entry = project.decl(decl);
    let mut stmts = Vec::new();
    match entry.kind {
        DeclKind::Constructor => {
            let c = project.ctor(decl);
            if let Some(Stmt::CtorCall { kind, .. }) = c.body.as_ref().and_then(|b| b.stmts.first()) {
                let args = delegation_target(table, decl)
                    .map(|t| delegation_args(project, table, decl, t))
                    .unwrap_or_default();
                stmts.push(Stmt::CtorCall {
                    id: ExprId::default(),
                    kind: *kind,
                    args,
                    span: span0(),
                });
            }
            if mode == DummyMode::Assert {
                stmts.push(assertion(entry.signature()));
            }
        }
        _ => {
            let m = project.method(decl);
            match mode {
                DummyMode::Assert => stmts.push(assertion(entry.signature())),
                DummyMode::Empty if m.ret.is_void() => {}
                DummyMode::Empty => {
                    let v = table
                        .sig(decl)
                        .map(|s| default_value(&s.ret, project))
                        .unwrap_or_else(|| default_of_type_expr(&m.ret));
                    stmts.push(Stmt::Return(Some(v), span0()));
                }
            }
        }
    }
    Block { stmts, span: span0() }
}

fn delegation_target(table: &SymbolTable, ctor: DeclId) -> Option<DeclId> {
    table
        .refs_of(ctor)
        .iter()
        .find(|r| r.kind == RefKind::Delegation)
        .map(|r| r.target)
}

/// Default arguments for a call from `ctor` to constructor `target`, with
/// parameter types seen from the delegating class.
fn delegation_args(project: &Project, table: &SymbolTable, ctor: DeclId, target: DeclId) -> Vec<Expr> {
    let Some(sig) = table.sig(target) else { return Vec::new() };
    let here = project.owner_type(ctor);
    let there = project.owner_type(target);
    let subst = match table.as_super(&table.self_type(here), there) {
        Some(TypeRef::Class { args, .. }) => table.plain_subst(there, &args),
        _ => Default::default(),
    };
    sig.params
        .iter()
        .map(|p| default_value(&substitute(p, &subst), project))
        .collect()
}

struct Rewriter<'a> {
    project: &'a Project,
    table: &'a SymbolTable,
    decisions: &'a Decisions,
    mode: DummyMode,
}

impl Rewriter<'_> {
    fn verdict(&self, d: DeclId) -> Verdict {
        self.decisions.get(&d).map(|x| x.verdict).unwrap_or(Verdict::NoOp)
    }

    fn type_decl(&self, t: &TypeDecl) -> Option<TypeDecl> {
        if self.verdict(t.id) == Verdict::Remove {
            return None;
        }
        let mut out = t.clone();
        out.enum_constants.retain(|c| self.verdict(c.id).retained());
        out.members = t
            .members
            .iter()
            .filter_map(|m| match m {
                Member::Type(n) => self.type_decl(n).map(Member::Type),
                Member::Field(f) => self.verdict(f.id).retained().then(|| m.clone()),
                Member::Initializer(i) => self.verdict(i.id).retained().then(|| m.clone()),
                Member::Method(md) => match self.verdict(md.id) {
                    Verdict::Remove => None,
                    Verdict::NoOp => Some(m.clone()),
                    Verdict::Dummy if md.body.is_none() => Some(m.clone()),
                    Verdict::Dummy => {
                        let mut md = md.clone();
                        md.body = Some(dummy_body(self.project, self.table, md.id, self.mode));
                        Some(Member::Method(md))
                    }
                },
                Member::Ctor(c) => match self.verdict(c.id) {
                    Verdict::Remove => None,
                    Verdict::NoOp => Some(m.clone()),
                    Verdict::Dummy => {
                        let mut c = c.clone();
                        c.body = Some(dummy_body(self.project, self.table, c.id, self.mode));
                        Some(Member::Ctor(c))
                    }
                },
            })
            .collect();
        Some(out)
    }
}

/// Packages that still declare at least one type after the rewrite.
fn live_packages(project: &Project, decisions: &Decisions) -> BTreeSet<String> {
    project
        .decls()
        .iter()
        .filter(|d| d.kind.is_type() && (d.is_stub || decisions.get(&d.id).is_none_or(|x| x.verdict.retained())))
        .map(|d| project.package_of(d.id))
        .collect()
}

/// Identifiers used in `unit` outside its import list.
fn identifiers(unit: &CompilationUnit) -> BTreeSet<String> {
    let mut bare = unit.clone();
    bare.imports.clear();
    bare.package.clear();
    let text = print_unit(&bare);
    tokenize(&text, 0)
        .map(|ts| {
            ts.into_iter()
                .filter_map(|t| match t.kind {
                    TokenKind::Ident(s) => Some(s),
                    _ => None,
                })
                .collect()
        })
        .unwrap_or_default()
}

fn prune_imports(unit: &mut CompilationUnit, project: &Project, decisions: &Decisions, packages: &BTreeSet<String>) {
    let used = identifiers(unit);
    unit.imports.retain(|imp| {
        let path = imp.path.join(".");
        if imp.on_demand {
            return packages.contains(&path) || project.lookup(&path).is_some_and(|d| decisions.get(&d).is_none_or(|x| x.verdict.retained()));
        }
        let simple = imp.path.last().map(String::as_str).unwrap_or("");
        let removed = project
            .lookup(&path)
            .is_some_and(|d| decisions.get(&d).is_some_and(|x| x.verdict == Verdict::Remove));
        !removed && used.contains(simple)
    });
}

/// References from the retained code that the decisions would leave dangling.
pub fn check_consistency(project: &Project, table: &SymbolTable, decisions: &Decisions) -> Result<(), EmitError> {
    let verdict = |d: DeclId| decisions.get(&d).map(|x| x.verdict).unwrap_or(Verdict::NoOp);
    let mut dangling = Vec::new();
    for d in project.project_decls().map(|e| e.id) {
        let v = verdict(d);
        if !v.retained() {
            continue;
        }
        for r in table.refs_of(d) {
            let keeps = v == Verdict::NoOp
                || r.kind == RefKind::Signature
                || (r.kind == RefKind::Delegation && project.decl(d).kind == DeclKind::Constructor);
            if keeps && !project.decl(r.target).is_stub && verdict(r.target) == Verdict::Remove {
                dangling.push(format!("{} -> {}", project.decl(d).key, project.decl(r.target).key));
            }
        }
        if let Some(c) = project.decl(d).container {
            if verdict(c) == Verdict::Remove {
                dangling.push(format!("{} inside removed {}", project.decl(d).key, project.decl(c).key));
            }
        }
    }
    if dangling.is_empty() {
        Ok(())
    } else {
        Err(EmitError::Consistency(dangling.join(", ")))
    }
}

/// Applies `decisions` (missing entries count as NoOp) and re-loads the result.
pub fn apply(project: &Project, table: &SymbolTable, decisions: &Decisions, mode: DummyMode) -> Result<Emitted> {
    check_consistency(project, table, decisions)?;
    let rw = Rewriter {
        project,
        table,
        decisions,
        mode,
    };
    let packages = live_packages(project, decisions);
    let mut sources = Vec::new();
    for f in project.files.iter().filter(|f| !f.is_stub) {
        let mut unit = f.unit.clone();
        unit.types = f.unit.types.iter().filter_map(|t| rw.type_decl(t)).collect();
        if unit.types.is_empty() {
            continue;
        }
        prune_imports(&mut unit, project, decisions, &packages);
        sources.push((f.path.clone(), print_unit(&unit)));
    }
    let reloaded = Project::from_sources(project.root.clone(), sources.clone(), project.stub_sources().to_vec())
        .map_err(|e| EmitError::Consistency(format!("emitted sources do not load: {e}")))?;
    Ok(Emitted {
        sources,
        project: reloaded,
    })
}

/// `REMOVE key` / `DUMMY key` lines, sorted by key.
pub fn manifest(project: &Project, decisions: &Decisions) -> String {
    let mut lines: Vec<(String, &str)> = decisions
        .values()
        .filter(|d| d.verdict != Verdict::NoOp)
        .map(|d| (project.decl(d.decl).key.clone(), d.verdict.as_str()))
        .collect();
    lines.sort();
    lines.iter().map(|(k, v)| format!("{v} {k}\n")).collect()
}

/// Parsed manifest: (verdict, key) pairs.
pub fn parse_manifest(text: &str) -> Result<Vec<(Verdict, String)>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (v, key) = line.split_once(' ').ok_or_else(|| format!("line {}: expected `VERDICT key`", i + 1))?;
        let v = match v {
            "REMOVE" => Verdict::Remove,
            "DUMMY" => Verdict::Dummy,
            _ => return Err(format!("line {}: unknown verdict `{v}`", i + 1)),
        };
        out.push((v, key.trim().to_string()));
    }
    Ok(out)
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `files` (relative paths) as the new contents of `dir`: everything
/// goes to a sibling temporary directory first, which then replaces `dir`.
pub fn write_tree(dir: &Path, files: &[(PathBuf, String)]) -> Result<()> {
    let parent = dir.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(parent).map_err(io(parent))?;
    let name = dir.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = parent.join(format!(".{name}.tmp-{}", std::process::id()));
    if tmp.exists() {
        fs::remove_dir_all(&tmp).map_err(io(&tmp))?;
    }
    for (rel, text) in files {
        let p = tmp.join(rel);
        if let Some(d) = p.parent() {
            fs::create_dir_all(d).map_err(io(d))?;
        }
        fs::write(&p, text).map_err(io(&p))?;
    }
    fs::create_dir_all(&tmp).map_err(io(&tmp))?;
    if dir.exists() {
        fs::remove_dir_all(dir).map_err(io(dir))?;
    }
    fs::rename(&tmp, dir).map_err(io(dir))?;
    Ok(())
}

/// Writes one file through a temporary sibling and a rename.
pub fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(d) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(d).map_err(io(d))?;
    }
    let tmp = path.with_extension(format!("tmp-{}", std::process::id()));
    fs::write(&tmp, text).map_err(io(&tmp))?;
    fs::rename(&tmp, path).map_err(io(path))?;
    Ok(())
}

#[cfg(test)]
mod tests;
