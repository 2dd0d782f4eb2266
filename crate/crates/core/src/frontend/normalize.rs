//! Structural comparison: erase spans and ids so two trees compare equal
//! exactly when they have the same shape.

use super::ast::*;

pub fn erase_positions(unit: &mut CompilationUnit) {
    unit.span = Span::default();
    unit.file = 0;
    for imp in &mut unit.imports {
        imp.span = Span::default();
    }
    for t in &mut unit.types {
        type_decl(t);
    }
}

/// True when the two units differ only in spans and ids.
pub fn structurally_equal(a: &CompilationUnit, b: &CompilationUnit) -> bool {
    let (mut a, mut b) = (a.clone(), b.clone());
    erase_positions(&mut a);
    erase_positions(&mut b);
    a == b
}

fn type_decl(t: &mut TypeDecl) {
    t.id = DeclId::UNSET;
    t.span = Span::default();
    for p in &mut t.type_params {
        type_param(p);
    }
    if let Some(s) = &mut t.superclass {
        ty(s);
    }
    t.interfaces.iter_mut().for_each(ty);
    for c in &mut t.enum_constants {
        c.id = DeclId::UNSET;
        c.span = Span::default();
    }
    for m in &mut t.members {
        match m {
            Member::Field(f) => {
                f.id = DeclId::UNSET;
                f.span = Span::default();
                ty(&mut f.ty);
                if let Some(e) = &mut f.init {
                    expr(e);
                }
            }
            Member::Method(md) => {
                md.id = DeclId::UNSET;
                md.span = Span::default();
                md.type_params.iter_mut().for_each(type_param);
                ty(&mut md.ret);
                md.params.iter_mut().for_each(param);
                if let Some(b) = &mut md.body {
                    block(b);
                }
            }
            Member::Ctor(c) => {
                c.id = DeclId::UNSET;
                c.span = Span::default();
                c.params.iter_mut().for_each(param);
                if let Some(b) = &mut c.body {
                    block(b);
                }
            }
            Member::Type(inner) => type_decl(inner),
            Member::Initializer(i) => {
                i.id = DeclId::UNSET;
                i.span = Span::default();
                block(&mut i.body);
            }
        }
    }
}

fn type_param(p: &mut TypeParam) {
    p.span = Span::default();
    if let Some(b) = &mut p.bound {
        ty(b);
    }
}

fn param(p: &mut Param) {
    p.span = Span::default();
    ty(&mut p.ty);
}

fn ty(t: &mut TypeExpr) {
    match t {
        TypeExpr::Prim(_, s) => *s = Span::default(),
        TypeExpr::Named { args, span, .. } => {
            *span = Span::default();
            for a in args {
                match a {
                    TypeArgExpr::Type(t) => ty(t),
                    TypeArgExpr::Wildcard { bound, span } => {
                        *span = Span::default();
                        if let Some((_, b)) = bound {
                            ty(b);
                        }
                    }
                }
            }
        }
        TypeExpr::Array(e, s) => {
            *s = Span::default();
            ty(e);
        }
    }
}

fn block(b: &mut Block) {
    b.span = Span::default();
    b.stmts.iter_mut().for_each(stmt);
}

fn stmt(s: &mut Stmt) {
    match s {
        Stmt::Block(b) => block(b),
        Stmt::Local {
            id, ty: t, init, span, ..
        } => {
            *id = ExprId::default();
            *span = Span::default();
            ty(t);
            if let Some(e) = init {
                expr(e);
            }
        }
        Stmt::Expr(e, span) => {
            *span = Span::default();
            expr(e);
        }
        Stmt::If {
            cond,
            then_branch,
            else_branch,
            span,
        } => {
            *span = Span::default();
            expr(cond);
            stmt(then_branch);
            if let Some(e) = else_branch {
                stmt(e);
            }
        }
        Stmt::While { cond, body, span } => {
            *span = Span::default();
            expr(cond);
            stmt(body);
        }
        Stmt::For {
            init,
            cond,
            update,
            body,
            span,
        } => {
            *span = Span::default();
            if let Some(i) = init {
                stmt(i);
            }
            if let Some(c) = cond {
                expr(c);
            }
            update.iter_mut().for_each(expr);
            stmt(body);
        }
        Stmt::Return(v, span) => {
            *span = Span::default();
            if let Some(v) = v {
                expr(v);
            }
        }
        Stmt::Throw(v, span) => {
            *span = Span::default();
            expr(v);
        }
        Stmt::CtorCall { id, args, span, .. } => {
            *id = ExprId::default();
            *span = Span::default();
            args.iter_mut().for_each(expr);
        }
        Stmt::Break(span) | Stmt::Continue(span) => *span = Span::default(),
    }
}

fn expr(e: &mut Expr) {
    e.id = ExprId::default();
    e.span = Span::default();
    match &mut e.kind {
        ExprKind::Lit(_) | ExprKind::Name(_) | ExprKind::This | ExprKind::Super => {}
        ExprKind::Field { target, .. } => expr(target),
        ExprKind::Call {
            target,
            type_args,
            args,
            ..
        } => {
            if let Some(t) = target {
                expr(t);
            }
            type_args.iter_mut().for_each(ty);
            args.iter_mut().for_each(expr);
        }
        ExprKind::New { ty: t, args } => {
            ty(t);
            args.iter_mut().for_each(expr);
        }
        ExprKind::NewArray { elem, len } => {
            ty(elem);
            expr(len);
        }
        ExprKind::Index { array, index } => {
            expr(array);
            expr(index);
        }
        ExprKind::Cast { ty: t, expr: inner } => {
            ty(t);
            expr(inner);
        }
        ExprKind::Unary { expr: inner, .. } => expr(inner),
        ExprKind::Binary { lhs, rhs, .. } => {
            expr(lhs);
            expr(rhs);
        }
        ExprKind::Assign { target, value, .. } => {
            expr(target);
            expr(value);
        }
        ExprKind::Paren(inner) => expr(inner),
        ExprKind::ClassLit(t) => ty(t),
    }
}
