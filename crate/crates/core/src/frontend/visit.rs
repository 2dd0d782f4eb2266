//! Pre-order traversal of statements and expressions.

use super::ast::*;

pub fn walk_block<'a>(b: &'a Block, f: &mut impl FnMut(&'a Expr)) {
    for s in &b.stmts {
        walk_stmt(s, f);
    }
}

pub fn walk_stmt<'a>(s: &'a Stmt, f: &mut impl FnMut(&'a Expr)) {
    match s {
        Stmt::Block(b) => walk_block(b, f),
        Stmt::Local { init, .. } => {
            if let Some(e) = init {
                walk_expr(e, f);
            }
        }
        Stmt::Expr(e, _) | Stmt::Throw(e, _) => walk_expr(e, f),
        Stmt::If {
            cond,
            then_branch,
            else_branch,
            ..
        } => {
            walk_expr(cond, f);
            walk_stmt(then_branch, f);
            if let Some(e) = else_branch {
                walk_stmt(e, f);
            }
        }
        Stmt::While { cond, body, .. } => {
            walk_expr(cond, f);
            walk_stmt(body, f);
        }
        Stmt::For {
            init,
            cond,
            update,
            body,
            ..
        } => {
            if let Some(i) = init {
                walk_stmt(i, f);
            }
            if let Some(c) = cond {
                walk_expr(c, f);
            }
            for u in update {
                walk_expr(u, f);
            }
            walk_stmt(body, f);
        }
        Stmt::Return(v, _) => {
            if let Some(v) = v {
                walk_expr(v, f);
            }
        }
        Stmt::CtorCall { args, .. } => {
            for a in args {
                walk_expr(a, f);
            }
        }
        Stmt::Break(_) | Stmt::Continue(_) => {}
    }
}

pub fn walk_expr<'a>(e: &'a Expr, f: &mut impl FnMut(&'a Expr)) {
    f(e);
    match &e.kind {
        ExprKind::Lit(_) | ExprKind::Name(_) | ExprKind::This | ExprKind::Super | ExprKind::ClassLit(_) => {}
        ExprKind::Field { target, .. } => walk_expr(target, f),
        ExprKind::Call { target, args, .. } => {
            if let Some(t) = target {
                walk_expr(t, f);
            }
            for a in args {
                walk_expr(a, f);
            }
        }
        ExprKind::New { args, .. } => {
            for a in args {
                walk_expr(a, f);
            }
        }
        ExprKind::NewArray { len, .. } => walk_expr(len, f),
        ExprKind::Index { array, index } => {
            walk_expr(array, f);
            walk_expr(index, f);
        }
        ExprKind::Cast { expr, .. } | ExprKind::Unary { expr, .. } | ExprKind::Paren(expr) => walk_expr(expr, f),
        ExprKind::Binary { lhs, rhs, .. } => {
            walk_expr(lhs, f);
            walk_expr(rhs, f);
        }
        ExprKind::Assign { target, value, .. } => {
            walk_expr(target, f);
            walk_expr(value, f);
        }
    }
}

/// Every expression in the body or initializer of a member.
pub fn member_exprs(m: &Member) -> Vec<&Expr> {
    let mut out = Vec::new();
    let mut push = |e| out.push(e);
    match m {
        Member::Field(fd) => {
            if let Some(e) = &fd.init {
                walk_expr(e, &mut push);
            }
        }
        Member::Method(md) => {
            if let Some(b) = &md.body {
                walk_block(b, &mut push);
            }
        }
        Member::Ctor(c) => {
            if let Some(b) = &c.body {
                walk_block(b, &mut push);
            }
        }
        Member::Initializer(i) => walk_block(&i.body, &mut push),
        Member::Type(_) => {}
    }
    out
}
