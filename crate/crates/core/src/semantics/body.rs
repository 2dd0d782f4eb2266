//! Expression typing and reference collection for bodies and initializers.

use super::overload::{self, Candidate};
use super::resolve::{Names, Output, TypeScope};
use super::table::{AssignFact, Binding, CallKind, CallSite, RefKind, SolveMode, SymbolTable, ValueSource, VarId};
use super::types::{substitute, TypeRef};
use crate::error::{Diagnostic, SemanticError};
use crate::frontend::ast::*;
use crate::frontend::{DeclKind, Project};

enum Res {
    Value(TypeRef, ValueSource),
    Type(DeclId),
    Package(String),
}

struct Frame {
    owner: DeclId,
    this_type: DeclId,
    scope: TypeScope,
    locals: Vec<Vec<(String, VarId, TypeRef)>>,
}

pub(crate) struct Analyzer<'a> {
    pub names: &'a Names<'a>,
    pub project: &'a Project,
    pub table: &'a SymbolTable,
    pub mode: SolveMode,
    pub out: Output,
}

impl<'a> Analyzer<'a> {
    pub fn analyze(&mut self, decl: DeclId) {
        let d = self.project.decl(decl);
        let mut f = Frame {
            owner: decl,
            this_type: self.project.owner_type(decl),
            scope: self.names.scope_for(decl),
            locals: vec![Vec::new()],
        };
        match d.kind {
            DeclKind::Method => {
                let m = self.project.method(decl);
                if let Some(body) = &m.body {
                    self.bind_params(&mut f, decl);
                    self.block(&mut f, body);
                }
            }
            DeclKind::Constructor => {
                let c = self.project.ctor(decl);
                if let Some(body) = &c.body {
                    self.bind_params(&mut f, decl);
                    if c.delegation() == Delegation::None {
                        self.implicit_super(decl, f.this_type, c.span);
                    }
                    self.block(&mut f, body);
                }
            }
            DeclKind::Initializer => {
                let body = &self.project.initializer(decl).body;
                self.block(&mut f, body);
            }
            DeclKind::Field => {
                if let Some(init) = self.project.field(decl).and_then(|x| x.init.as_ref()) {
                    let (_, src) = self.value(&mut f, init);
                    self.fact(VarId::Field(decl), src, decl);
                }
            }
            DeclKind::EnumConstant => {
                let t = TypeRef::class(f.this_type, vec![]);
                self.fact(VarId::Field(decl), ValueSource::Exact(t), decl);
            }
            DeclKind::Class => {
                let has_ctor = d
                    .children
                    .iter()
                    .any(|c| self.project.decl(*c).kind == DeclKind::Constructor);
                if !has_ctor && !d.is_stub {
                    self.implicit_super(decl, decl, d.span);
                }
            }
            DeclKind::Interface | DeclKind::Enum => {}
        }
    }

    fn bind_params(&mut self, f: &mut Frame, decl: DeclId) {
        let Some(sig) = self.table.sig(decl) else { return };
        let params = match self.project.member(decl) {
            Member::Method(m) => &m.params,
            Member::Ctor(c) => &c.params,
            _ => return,
        };
        for (i, (p, t)) in params.iter().zip(&sig.params).enumerate() {
            f.locals[0].push((p.name.clone(), VarId::Param(decl, i), t.clone()));
        }
    }

    fn fact(&mut self, target: VarId, source: ValueSource, owner: DeclId) {
        if self.out.record {
            self.out.facts.push(AssignFact { target, source, owner });
        }
    }

    fn problem(&mut self, owner: DeclId, e: SemanticError) {
        self.out.problem(Some(owner), e);
    }

    fn unresolved(&mut self, f: &Frame, name: &str, what: &str, span: Span) {
        let e = SemanticError::Unresolved(vec![Diagnostic {
            name: name.to_string(),
            message: format!("cannot find {what} `{name}`"),
            span,
            path: self.names.path_of(f.scope.file),
        }]);
        self.problem(f.owner, e);
    }

    fn ctor_candidates(&self, class: &TypeRef) -> Vec<Candidate> {
        let TypeRef::Class { decl, args } = class else {
            return Vec::new();
        };
        let recv = self.table.plain_subst(*decl, args);
        self.project
            .decl(*decl)
            .children
            .iter()
            .filter(|c| self.project.decl(**c).kind == DeclKind::Constructor)
            .map(|c| Candidate {
                decl: *c,
                recv: recv.clone(),
            })
            .collect()
    }

    /// Delegation to the superclass's no-argument constructor from `from`,
    /// a constructor or a class whose constructor is implicit.
    fn implicit_super(&mut self, from: DeclId, class: DeclId, span: Span) {
        if self.project.decl(class).kind != DeclKind::Class {
            return;
        }
        let Some(sup) = self.table.superclass.get(&class).cloned() else {
            return;
        };
        let cands = self.ctor_candidates(&sup);
        if cands.is_empty() {
            return;
        }
        match overload::select(self.project, self.table, &cands, &[], &[], "super", span) {
            Ok(s) => self.out.add_ref(from, s.decl, RefKind::Delegation, span),
            Err(e) => self.problem(from, e),
        }
    }

    fn lookup_local(&self, f: &Frame, name: &str) -> Option<(VarId, TypeRef)> {
        f.locals
            .iter()
            .rev()
            .flat_map(|s| s.iter().rev())
            .find(|(n, _, _)| n == name)
            .map(|(_, v, t)| (v.clone(), t.clone()))
    }

    /// Removes a top-level wildcard from a member's type.
    fn finish(&self, t: TypeRef) -> TypeRef {
        if !overload::is_wildcard(&t) {
            return t;
        }
        match self.mode {
            SolveMode::Solved => self.table.upper_bound(&t),
            SolveMode::Naive => overload::naive_top(self.table),
        }
    }

    /// Receiver class view used for member lookup.
    fn receiver_class(&self, t: &TypeRef) -> Option<(DeclId, Vec<TypeRef>)> {
        let ub = match t {
            TypeRef::Array(_) => self.table.object(),
            other => self.table.upper_bound(other),
        };
        match ub {
            TypeRef::Class { decl, args } => Some((decl, args)),
            _ => None,
        }
    }

    fn find_field(&self, decl: DeclId, args: &[TypeRef], name: &str) -> Option<(DeclId, TypeRef)> {
        for (d, s) in self.table.lookup_chain(decl, args, self.mode) {
            for &c in &self.project.decl(d).children {
                let cd = self.project.decl(c);
                if cd.kind.is_field() && cd.name == name {
                    let t = self.table.field_type(c).cloned().unwrap_or(TypeRef::Unknown);
                    return Some((c, self.finish(substitute(&t, &s))));
                }
            }
        }
        None
    }

    fn nested_type(&self, decl: DeclId, name: &str) -> Option<DeclId> {
        self.project.decl(decl).children.iter().copied().find(|c| {
            let d = self.project.decl(*c);
            d.kind.is_type() && d.name == name
        })
    }

    fn method_candidates(&self, decl: DeclId, args: &[TypeRef], name: &str) -> Vec<Candidate> {
        let mut out = Vec::new();
        let mut seen: Vec<Vec<String>> = Vec::new();
        for (d, s) in self.table.lookup_chain(decl, args, self.mode) {
            for &c in &self.project.decl(d).children {
                let cd = self.project.decl(c);
                if cd.kind != DeclKind::Method || cd.name != name {
                    continue;
                }
                let Some(sig) = self.table.sig(c) else { continue };
                let erased: Vec<String> = sig
                    .params
                    .iter()
                    .map(|p| self.table.erasure(&substitute(p, &s)))
                    .collect();
                if seen.contains(&erased) {
                    continue;
                }
                seen.push(erased);
                out.push(Candidate { decl: c, recv: s.clone() });
            }
        }
        out
    }

    fn value(&mut self, f: &mut Frame, e: &Expr) -> (TypeRef, ValueSource) {
        match self.expr(f, e) {
            Res::Value(t, s) => (t, s),
            Res::Type(d) => {
                let name = self.project.decl(d).name.clone();
                self.unresolved(f, &name, "variable", e.span);
                (TypeRef::Unknown, ValueSource::Open)
            }
            Res::Package(p) => {
                self.unresolved(f, &p, "variable", e.span);
                (TypeRef::Unknown, ValueSource::Open)
            }
        }
    }

    fn expr(&mut self, f: &mut Frame, e: &Expr) -> Res {
        let mut r = self.expr_inner(f, e);
        if matches!(e.kind, ExprKind::Name(_) | ExprKind::Field { .. }) {
            match &r {
                Res::Type(d) => self.out.bind(e.id, Binding::Type(*d)),
                Res::Value(_, ValueSource::Var(v, _)) => self.out.bind(e.id, Binding::Var(v.clone())),
                _ => {}
            }
        }
        if let Res::Value(t, src) = &mut r {
            self.out.expr_types.insert(e.id, t.clone());
            // primitive values never select an implementation
            if matches!(t, TypeRef::Prim(_)) {
                *src = ValueSource::Nothing;
            }
        }
        r
    }

    fn expr_inner(&mut self, f: &mut Frame, e: &Expr) -> Res {
        let open = |t: TypeRef| Res::Value(t, ValueSource::Open);
        match &e.kind {
            ExprKind::Lit(l) => match l {
                Literal::Int(_) => open(TypeRef::Prim(PrimKind::Int)),
                Literal::Double(_) => open(TypeRef::Prim(PrimKind::Double)),
                Literal::Char(_) => open(TypeRef::Prim(PrimKind::Char)),
                Literal::Bool(_) => open(TypeRef::Prim(PrimKind::Boolean)),
                Literal::Str(_) => {
                    let s = self.table.string();
                    Res::Value(s.clone(), ValueSource::Exact(s))
                }
                Literal::Null => Res::Value(TypeRef::Null, ValueSource::Nothing),
            },
            ExprKind::Name(n) => self.name(f, n, e.span),
            ExprKind::This => open(self.table.self_type(f.this_type)),
            ExprKind::Super => {
                let t = self.table.superclass.get(&f.this_type).cloned().unwrap_or_else(|| self.table.object());
                open(t)
            }
            ExprKind::Field { target, name } => self.field(f, target, name, e.span),
            ExprKind::Call {
                target,
                type_args,
                name,
                args,
            } => self.call(f, e, target.as_deref(), type_args, name, args),
            ExprKind::New { ty, args } => {
                let t = self.names.type_expr(&f.scope, ty, Some(f.owner), RefKind::Type, &mut self.out);
                let vals: Vec<(TypeRef, ValueSource)> = args.iter().map(|a| self.value(f, a)).collect();
                if let TypeRef::Class { decl, .. } = &t {
                    self.out.add_ref(f.owner, *decl, RefKind::Instantiate, e.span);
                    let cands = self.ctor_candidates(&t);
                    if cands.is_empty() {
                        if !vals.is_empty() {
                            let n = self.project.decl(*decl).name.clone();
                            self.problem(f.owner, SemanticError::NoApplicableMethod { name: n, span: e.span });
                        }
                    } else {
                        let arg_types: Vec<TypeRef> = vals.iter().map(|v| v.0.clone()).collect();
                        let n = self.project.decl(*decl).name.clone();
                        match overload::select(self.project, self.table, &cands, &arg_types, &[], &n, e.span) {
                            Ok(s) => {
                                self.out.add_ref(f.owner, s.decl, RefKind::Creation, e.span);
                                self.out.bind(e.id, Binding::Ctor(s.decl));
                                self.arg_facts(f, s.decl, vals);
                            }
                            Err(err) => self.problem(f.owner, err),
                        }
                    }
                }
                Res::Value(t.clone(), ValueSource::Exact(t))
            }
            ExprKind::NewArray { elem, len } => {
                let t = self.names.type_expr(&f.scope, elem, Some(f.owner), RefKind::Type, &mut self.out);
                self.value(f, len);
                open(TypeRef::Array(Box::new(t)))
            }
            ExprKind::Index { array, index } => {
                let (t, _) = self.value(f, array);
                self.value(f, index);
                match t {
                    TypeRef::Array(el) => open(*el),
                    _ => open(TypeRef::Unknown),
                }
            }
            ExprKind::Cast { ty, expr } => {
                let t = self.names.type_expr(&f.scope, ty, Some(f.owner), RefKind::Type, &mut self.out);
                let (_, s) = self.value(f, expr);
                Res::Value(t, s)
            }
            ExprKind::Unary { op, expr } => {
                let (t, _) = self.value(f, expr);
                match op {
                    UnaryOp::Not => open(TypeRef::Prim(PrimKind::Boolean)),
                    _ => open(t),
                }
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let (a, _) = self.value(f, lhs);
                let (b, _) = self.value(f, rhs);
                open(self.binary_type(*op, &a, &b))
            }
            ExprKind::Assign { op, target, value } => {
                let (t, ts) = self.value(f, target);
                let (_, vs) = self.value(f, value);
                let src = if *op == AssignOp::Assign { vs } else { ValueSource::Open };
                if let ValueSource::Var(v, _) = ts {
                    self.fact(v, src.clone(), f.owner);
                }
                Res::Value(t, src)
            }
            ExprKind::Paren(inner) => self.expr(f, inner),
            ExprKind::ClassLit(ty) => {
                let t = self.names.type_expr(&f.scope, ty, Some(f.owner), RefKind::Type, &mut self.out);
                let arg = if t.is_reference() { t } else { TypeRef::unbounded() };
                match self.table.well_known.class {
                    Some(c) => open(TypeRef::class(c, vec![arg])),
                    None => open(TypeRef::Unknown),
                }
            }
        }
    }

    fn binary_type(&self, op: BinaryOp, a: &TypeRef, b: &TypeRef) -> TypeRef {
        use BinaryOp::*;
        match op {
            Lt | Le | Gt | Ge | Eq | Ne | And | Or => TypeRef::Prim(PrimKind::Boolean),
            Add if self.is_string(a) || self.is_string(b) => self.table.string(),
            _ => {
                if a.is_prim(PrimKind::Double) || b.is_prim(PrimKind::Double) {
                    TypeRef::Prim(PrimKind::Double)
                } else if matches!(a, TypeRef::Unknown) || matches!(b, TypeRef::Unknown) {
                    TypeRef::Unknown
                } else {
                    TypeRef::Prim(PrimKind::Int)
                }
            }
        }
    }

    fn is_string(&self, t: &TypeRef) -> bool {
        t.class_decl().is_some() && t.class_decl() == self.table.well_known.string
    }

    fn name(&mut self, f: &mut Frame, n: &str, span: Span) -> Res {
        if let Some((v, t)) = self.lookup_local(f, n) {
            return Res::Value(t.clone(), ValueSource::Var(v, t));
        }
        for &ty in f.scope.types.iter().rev() {
            let args = match self.table.self_type(ty) {
                TypeRef::Class { args, .. } => args,
                _ => Vec::new(),
            };
            if let Some((fd, t)) = self.find_field(ty, &args, n) {
                self.out.add_ref(f.owner, fd, RefKind::FieldAccess, span);
                return Res::Value(t.clone(), ValueSource::Var(VarId::Field(fd), t));
            }
        }
        match self.names.simple_type(&f.scope, n, span) {
            Ok(Some(super::resolve::Named::Type(d))) => {
                self.out.add_ref(f.owner, d, RefKind::Type, span);
                return Res::Type(d);
            }
            Ok(_) => {}
            Err(e) => {
                self.problem(f.owner, e);
                return Res::Value(TypeRef::Unknown, ValueSource::Open);
            }
        }
        if self.names.is_package_prefix(n) {
            return Res::Package(n.to_string());
        }
        self.unresolved(f, n, "symbol", span);
        Res::Value(TypeRef::Unknown, ValueSource::Open)
    }

    fn field(&mut self, f: &mut Frame, target: &Expr, name: &str, span: Span) -> Res {
        match self.expr(f, target) {
            Res::Package(p) => {
                let q = format!("{p}.{name}");
                if let Some(d) = self.project.lookup(&q).filter(|d| self.project.decl(*d).kind.is_type()) {
                    self.out.add_ref(f.owner, d, RefKind::Type, span);
                    Res::Type(d)
                } else if self.names.is_package_prefix(&q) {
                    Res::Package(q)
                } else {
                    self.unresolved(f, &q, "symbol", span);
                    Res::Value(TypeRef::Unknown, ValueSource::Open)
                }
            }
            Res::Type(d) => {
                if let Some(n) = self.nested_type(d, name) {
                    self.out.add_ref(f.owner, n, RefKind::Type, span);
                    return Res::Type(n);
                }
                match self.find_field(d, &[], name) {
                    Some((fd, t)) => {
                        self.out.add_ref(f.owner, fd, RefKind::FieldAccess, span);
                        Res::Value(t.clone(), ValueSource::Var(VarId::Field(fd), t))
                    }
                    None => {
                        self.unresolved(f, name, "field", span);
                        Res::Value(TypeRef::Unknown, ValueSource::Open)
                    }
                }
            }
            Res::Value(t, _) => {
                if matches!(t, TypeRef::Unknown) {
                    return Res::Value(TypeRef::Unknown, ValueSource::Open);
                }
                if let TypeRef::Array(_) = t {
                    if name == "length" {
                        return Res::Value(TypeRef::Prim(PrimKind::Int), ValueSource::Open);
                    }
                }
                let found = self
                    .receiver_class(&t)
                    .and_then(|(d, args)| self.find_field(d, &args, name));
                match found {
                    Some((fd, ft)) => {
                        self.out.add_ref(f.owner, fd, RefKind::FieldAccess, span);
                        Res::Value(ft.clone(), ValueSource::Var(VarId::Field(fd), ft))
                    }
                    None => {
                        self.unresolved(f, name, "field", span);
                        Res::Value(TypeRef::Unknown, ValueSource::Open)
                    }
                }
            }
        }
    }

    fn arg_facts(&mut self, f: &Frame, callee: DeclId, vals: Vec<(TypeRef, ValueSource)>) {
        for (i, (_, s)) in vals.into_iter().enumerate() {
            self.fact(VarId::Param(callee, i), s, f.owner);
        }
    }

    fn call(
        &mut self,
        f: &mut Frame,
        e: &Expr,
        target: Option<&Expr>,
        type_args: &[TypeExpr],
        name: &str,
        args: &[Expr],
    ) -> Res {
        let unknown = Res::Value(TypeRef::Unknown, ValueSource::Open);
        // (candidates, kind, receiver type, receiver source)
        let resolved: Option<(Vec<Candidate>, CallKind, TypeRef, ValueSource)> = match target {
            None => {
                let mut found = None;
                for &ty in f.scope.types.iter().rev() {
                    let self_t = self.table.self_type(ty);
                    let args = match &self_t {
                        TypeRef::Class { args, .. } => args.clone(),
                        _ => Vec::new(),
                    };
                    let c = self.method_candidates(ty, &args, name);
                    if !c.is_empty() {
                        found = Some((c, CallKind::Virtual, self_t, ValueSource::Open));
                        break;
                    }
                }
                found.or_else(|| Some((Vec::new(), CallKind::Virtual, TypeRef::Unknown, ValueSource::Open)))
            }
            Some(t) if matches!(t.kind, ExprKind::Super) => {
                self.out.expr_types.insert(t.id, TypeRef::Unknown);
                match self.table.superclass.get(&f.this_type).cloned() {
                    Some(st @ TypeRef::Class { .. }) => {
                        let TypeRef::Class { decl, args: sargs } = &st else { unreachable!() };
                        let c = self.method_candidates(*decl, sargs, name);
                        Some((c, CallKind::Super, st.clone(), ValueSource::Open))
                    }
                    _ => {
                        let o = self.table.object();
                        match o.class_decl() {
                            Some(od) => Some((self.method_candidates(od, &[], name), CallKind::Super, o, ValueSource::Open)),
                            None => None,
                        }
                    }
                }
            }
            Some(t) => match self.expr(f, t) {
                Res::Package(p) => {
                    self.unresolved(f, &p, "symbol", t.span);
                    for a in args {
                        self.value(f, a);
                    }
                    return unknown;
                }
                Res::Type(d) => {
                    let c: Vec<Candidate> = self
                        .method_candidates(d, &[], name)
                        .into_iter()
                        .filter(|c| self.project.decl(c.decl).is_static)
                        .collect();
                    Some((c, CallKind::Static, TypeRef::class(d, vec![]), ValueSource::Open))
                }
                Res::Value(rt, src) => {
                    if matches!(rt, TypeRef::Unknown) {
                        for a in args {
                            self.value(f, a);
                        }
                        return unknown;
                    }
                    match self.receiver_class(&rt) {
                        Some((d, rargs)) => Some((self.method_candidates(d, &rargs, name), CallKind::Virtual, rt, src)),
                        None => {
                            self.problem(
                                f.owner,
                                SemanticError::TypeSolve {
                                    message: format!("cannot call `{name}` on a value of primitive type"),
                                    span: e.span,
                                },
                            );
                            None
                        }
                    }
                }
            },
        };
        let vals: Vec<(TypeRef, ValueSource)> = args.iter().map(|a| self.value(f, a)).collect();
        let targs: Vec<TypeRef> = type_args
            .iter()
            .map(|t| self.names.type_expr(&f.scope, t, Some(f.owner), RefKind::Type, &mut self.out))
            .collect();
        let Some((cands, mut kind, recv_type, recv_src)) = resolved else {
            return unknown;
        };
        if cands.is_empty() {
            self.unresolved(f, name, "method", e.span);
            return unknown;
        }
        let arg_types: Vec<TypeRef> = vals.iter().map(|v| v.0.clone()).collect();
        let sel = match overload::select(self.project, self.table, &cands, &arg_types, &targs, name, e.span) {
            Ok(s) => s,
            Err(err) => {
                self.problem(f.owner, err);
                return unknown;
            }
        };
        if self.project.decl(sel.decl).is_static {
            kind = CallKind::Static;
        }
        let ref_kind = match kind {
            CallKind::Static => RefKind::StaticCall,
            CallKind::Super => RefKind::SuperCall,
            CallKind::Virtual => {
                let idx = self.out.call_sites.len();
                if self.out.record {
                    self.out.call_sites.push(CallSite {
                        expr: e.id,
                        owner: f.owner,
                        target: sel.decl,
                        kind,
                        receiver_type: recv_type,
                        receiver: recv_src,
                        span: e.span,
                    });
                }
                RefKind::VirtualCall(idx)
            }
        };
        self.out.add_ref(f.owner, sel.decl, ref_kind, e.span);
        self.out.bind(e.id, Binding::Method(sel.decl, kind));
        self.arg_facts(f, sel.decl, vals);
        let ret = self.finish(sel.ret);
        Res::Value(ret, ValueSource::Open)
    }

    fn block(&mut self, f: &mut Frame, b: &Block) {
        f.locals.push(Vec::new());
        for s in &b.stmts {
            self.stmt(f, s);
        }
        f.locals.pop();
    }

    fn scoped_stmt(&mut self, f: &mut Frame, s: &Stmt) {
        f.locals.push(Vec::new());
        self.stmt(f, s);
        f.locals.pop();
    }

    fn stmt(&mut self, f: &mut Frame, s: &Stmt) {
        match s {
            Stmt::Block(b) => self.block(f, b),
            Stmt::Local { id, ty, name, init, .. } => {
                let t = self.names.type_expr(&f.scope, ty, Some(f.owner), RefKind::Type, &mut self.out);
                if let Some(init) = init {
                    let (_, src) = self.value(f, init);
                    self.fact(VarId::Local(*id), src, f.owner);
                }
                f.locals.last_mut().expect("scope").push((name.clone(), VarId::Local(*id), t));
            }
            Stmt::Expr(e, _) => {
                self.value(f, e);
            }
            Stmt::If {
                cond,
                then_branch,
                else_branch,
                ..
            } => {
                self.value(f, cond);
                self.scoped_stmt(f, then_branch);
                if let Some(e) = else_branch {
                    self.scoped_stmt(f, e);
                }
            }
            Stmt::While { cond, body, .. } => {
                self.value(f, cond);
                self.scoped_stmt(f, body);
            }
            Stmt::For {
                init,
                cond,
                update,
                body,
                ..
            } => {
                f.locals.push(Vec::new());
                if let Some(i) = init {
                    self.stmt(f, i);
                }
                if let Some(c) = cond {
                    self.value(f, c);
                }
                for u in update {
                    self.value(f, u);
                }
                self.scoped_stmt(f, body);
                f.locals.pop();
            }
            Stmt::Return(v, _) => {
                if let Some(v) = v {
                    self.value(f, v);
                }
            }
            Stmt::Throw(v, _) => {
                self.value(f, v);
            }
            Stmt::CtorCall { id, kind, args, span } => {
                let vals: Vec<(TypeRef, ValueSource)> = args.iter().map(|a| self.value(f, a)).collect();
                let class = match kind {
                    CtorCallKind::This => Some(self.table.self_type(f.this_type)),
                    CtorCallKind::Super => self.table.superclass.get(&f.this_type).cloned(),
                };
                let Some(class) = class else { return };
                let cands = self.ctor_candidates(&class);
                if cands.is_empty() {
                    if !vals.is_empty() {
                        self.problem(
                            f.owner,
                            SemanticError::NoApplicableMethod {
                                name: "super".into(),
                                span: *span,
                            },
                        );
                    }
                    return;
                }
                let arg_types: Vec<TypeRef> = vals.iter().map(|v| v.0.clone()).collect();
                let n = match kind {
                    CtorCallKind::This => "this",
                    CtorCallKind::Super => "super",
                };
                match overload::select(self.project, self.table, &cands, &arg_types, &[], n, *span) {
                    Ok(sel) => {
                        self.out.add_ref(f.owner, sel.decl, RefKind::Delegation, *span);
                        self.out.bind(*id, Binding::Ctor(sel.decl));
                        self.arg_facts(f, sel.decl, vals);
                    }
                    Err(err) => self.problem(f.owner, err),
                }
            }
            Stmt::Break(_) | Stmt::Continue(_) => {}
        }
    }
}
