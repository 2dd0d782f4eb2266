//! Deterministic pretty-printer. Parentheses are printed only where the tree
//! has a `Paren` node, so printing then parsing reproduces the same tree.

use std::fmt::Write;

use super::ast::*;

const INDENT: &str = "    ";

pub fn print_unit(unit: &CompilationUnit) -> String {
    let mut p = Printer::default();
    p.unit(unit);
    p.out
}

pub fn type_to_string(ty: &TypeExpr) -> String {
    let mut s = String::new();
    write_type(&mut s, ty);
    s
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut p = Printer::default();
    p.expr(e);
    p.out
}

/// `int, Set<String>` for a parameter list.
pub fn param_types(params: &[Param]) -> String {
    params
        .iter()
        .map(|p| type_to_string(&p.ty))
        .collect::<Vec<_>>()
        .join(", ")
}

fn write_type(s: &mut String, ty: &TypeExpr) {
    match ty {
        TypeExpr::Prim(p, _) => s.push_str(p.name()),
        TypeExpr::Named { path, args, .. } => {
            s.push_str(&path.join("."));
            if !args.is_empty() {
                s.push('<');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        s.push_str(", ");
                    }
                    match a {
                        TypeArgExpr::Type(t) => write_type(s, t),
                        TypeArgExpr::Wildcard { bound, .. } => {
                            s.push('?');
                            if let Some((kind, b)) = bound {
                                s.push_str(match kind {
                                    BoundKind::Extends => " extends ",
                                    BoundKind::Super => " super ",
                                });
                                write_type(s, b);
                            }
                        }
                    }
                }
                s.push('>');
            }
        }
        TypeExpr::Array(elem, _) => {
            write_type(s, elem);
            s.push_str("[]");
        }
    }
}

fn escape(c: char, quote: char) -> String {
    match c {
        '\n' => "\\n".into(),
        '\t' => "\\t".into(),
        '\r' => "\\r".into(),
        '\0' => "\\0".into(),
        '\\' => "\\\\".into(),
        c if c == quote => format!("\\{c}"),
        c => c.to_string(),
    }
}

pub(crate) fn literal_to_string(lit: &Literal) -> String {
    match lit {
        Literal::Int(v) => v.to_string(),
        Literal::Double(v) => {
            let mut s = format!("{v}");
            if !s.contains('.') {
                s.push_str(".0");
            }
            s
        }
        Literal::Char(c) => format!("'{}'", escape(*c, '\'')),
        Literal::Str(v) => {
            let body: String = v.chars().map(|c| escape(c, '"')).collect();
            format!("\"{body}\"")
        }
        Literal::Bool(b) => b.to_string(),
        Literal::Null => "null".into(),
    }
}

#[derive(Default)]
struct Printer {
    out: String,
    depth: usize,
}

impl Printer {
    fn line(&mut self, text: &str) {
        for _ in 0..self.depth {
            self.out.push_str(INDENT);
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn start_line(&mut self) {
        for _ in 0..self.depth {
            self.out.push_str(INDENT);
        }
    }

    fn unit(&mut self, unit: &CompilationUnit) {
        if !unit.package.is_empty() {
            self.line(&format!("package {};", unit.package_name()));
            self.out.push('\n');
        }
        for imp in &unit.imports {
            let star = if imp.on_demand { ".*" } else { "" };
            self.line(&format!("import {}{star};", imp.path.join(".")));
        }
        if !unit.imports.is_empty() {
            self.out.push('\n');
        }
        for (i, t) in unit.types.iter().enumerate() {
            if i > 0 {
                self.out.push('\n');
            }
            self.type_decl(t);
        }
    }

    fn modifiers(&self, m: &Modifiers, in_interface: bool) -> String {
        let mut s = String::new();
        let mut push = |on: bool, w: &str| {
            if on {
                s.push_str(w);
                s.push(' ');
            }
        };
        push(m.public, "public");
        push(m.protected, "protected");
        push(m.private, "private");
        push(m.is_abstract && !in_interface, "abstract");
        push(m.is_static, "static");
        push(m.is_final, "final");
        push(m.is_default, "default");
        s
    }

    fn type_params(s: &mut String, params: &[TypeParam]) {
        if params.is_empty() {
            return;
        }
        s.push('<');
        for (i, p) in params.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            s.push_str(&p.name);
            if let Some(b) = &p.bound {
                s.push_str(" extends ");
                write_type(s, b);
            }
        }
        s.push('>');
    }

    fn type_decl(&mut self, t: &TypeDecl) {
        if t.modifiers.test {
            self.line("@Test");
        }
        let mut head = self.modifiers(&t.modifiers, false);
        head.push_str(match t.kind {
            TypeKind::Class => "class ",
            TypeKind::Interface => "interface ",
            TypeKind::Enum => "enum ",
        });
        head.push_str(&t.name);
        Self::type_params(&mut head, &t.type_params);
        if let Some(sup) = &t.superclass {
            head.push_str(" extends ");
            write_type(&mut head, sup);
        }
        if !t.interfaces.is_empty() {
            head.push_str(if t.kind == TypeKind::Interface {
                " extends "
            } else {
                " implements "
            });
            let list: Vec<_> = t.interfaces.iter().map(type_to_string).collect();
            head.push_str(&list.join(", "));
        }
        head.push_str(" {");
        self.line(&head);
        self.depth += 1;
        if t.kind == TypeKind::Enum && !t.enum_constants.is_empty() {
            let names: Vec<_> = t.enum_constants.iter().map(|c| c.name.as_str()).collect();
            let tail = if t.members.is_empty() { "" } else { ";" };
            self.line(&format!("{}{tail}", names.join(", ")));
            if !t.members.is_empty() {
                self.out.push('\n');
            }
        } else if t.kind == TypeKind::Enum && !t.members.is_empty() {
            self.line(";");
        }
        let in_interface = t.kind == TypeKind::Interface;
        for (i, m) in t.members.iter().enumerate() {
            if i > 0 && !(matches!(m, Member::Field(_)) && matches!(t.members[i - 1], Member::Field(_))) {
                self.out.push('\n');
            }
            self.member(m, in_interface);
        }
        self.depth -= 1;
        self.line("}");
    }

    fn member(&mut self, m: &Member, in_interface: bool) {
        match m {
            Member::Field(f) => {
                let mut s = self.modifiers(&f.modifiers, in_interface);
                write_type(&mut s, &f.ty);
                let _ = write!(s, " {}", f.name);
                self.start_line();
                self.out.push_str(&s);
                if let Some(init) = &f.init {
                    self.out.push_str(" = ");
                    self.expr(init);
                }
                self.out.push_str(";\n");
            }
            Member::Method(md) => {
                if md.modifiers.test {
                    self.line("@Test");
                }
                let mut s = self.modifiers(&md.modifiers, in_interface);
                if !md.type_params.is_empty() {
                    Self::type_params(&mut s, &md.type_params);
                    s.push(' ');
                }
                write_type(&mut s, &md.ret);
                let _ = write!(s, " {}", md.name);
                self.params(&mut s, &md.params);
                self.body_or_semi(s, md.body.as_ref());
            }
            Member::Ctor(c) => {
                if c.modifiers.test {
                    self.line("@Test");
                }
                let mut s = self.modifiers(&c.modifiers, in_interface);
                s.push_str(&c.name);
                self.params(&mut s, &c.params);
                self.body_or_semi(s, c.body.as_ref());
            }
            Member::Type(t) => self.type_decl(t),
            Member::Initializer(init) => {
                self.block_after("static".into(), &init.body);
            }
        }
    }

    fn params(&self, s: &mut String, params: &[Param]) {
        s.push('(');
        for (i, p) in params.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            write_type(s, &p.ty);
            s.push(' ');
            s.push_str(&p.name);
        }
        s.push(')');
    }

    fn body_or_semi(&mut self, head: String, body: Option<&Block>) {
        match body {
            None => self.line(&format!("{head};")),
            Some(b) => self.block_after(head, b),
        }
    }

    /// Prints `head {` then the block contents, on the current line.
    fn block_after(&mut self, head: String, b: &Block) {
        let open = if head.is_empty() { "{".to_string() } else { format!("{head} {{") };
        if b.stmts.is_empty() {
            self.line(&format!("{open}}}"));
            return;
        }
        self.line(&open);
        self.depth += 1;
        for st in &b.stmts {
            self.stmt(st);
        }
        self.depth -= 1;
        self.line("}");
    }

    fn stmt(&mut self, st: &Stmt) {
        match st {
            Stmt::Block(b) => self.block_after(String::new(), b),
            Stmt::Local { .. } | Stmt::Expr(..) => {
                self.start_line();
                self.simple_stmt(st);
                self.out.push_str(";\n");
            }
            Stmt::If {
                cond,
                then_branch,
                else_branch,
                ..
            } => {
                self.start_line();
                self.out.push_str("if (");
                self.expr(cond);
                self.out.push(')');
                self.branch(then_branch);
                if let Some(e) = else_branch {
                    self.start_line();
                    self.out.push_str("else");
                    self.branch(e);
                }
            }
            Stmt::While { cond, body, .. } => {
                self.start_line();
                self.out.push_str("while (");
                self.expr(cond);
                self.out.push(')');
                self.branch(body);
            }
            Stmt::For {
                init,
                cond,
                update,
                body,
                ..
            } => {
                self.start_line();
                self.out.push_str("for (");
                if let Some(i) = init {
                    self.simple_stmt(i);
                }
                self.out.push(';');
                if let Some(c) = cond {
                    self.out.push(' ');
                    self.expr(c);
                }
                self.out.push(';');
                for (i, u) in update.iter().enumerate() {
                    self.out.push_str(if i == 0 { " " } else { ", " });
                    self.expr(u);
                }
                self.out.push(')');
                self.branch(body);
            }
            Stmt::Return(v, _) => {
                self.start_line();
                self.out.push_str("return");
                if let Some(v) = v {
                    self.out.push(' ');
                    self.expr(v);
                }
                self.out.push_str(";\n");
            }
            Stmt::Throw(v, _) => {
                self.start_line();
                self.out.push_str("throw ");
                self.expr(v);
                self.out.push_str(";\n");
            }
            Stmt::CtorCall { kind, args, .. } => {
                self.start_line();
                self.out.push_str(match kind {
                    CtorCallKind::This => "this",
                    CtorCallKind::Super => "super",
                });
                self.args(args);
                self.out.push_str(";\n");
            }
            Stmt::Break(_) => self.line("break;"),
            Stmt::Continue(_) => self.line("continue;"),
        }
    }

    /// Body of if/while/for: blocks stay on the header line, others are indented.
    fn branch(&mut self, st: &Stmt) {
        match st {
            Stmt::Block(b) if b.stmts.is_empty() => self.out.push_str(" {}\n"),
            Stmt::Block(b) => {
                self.out.push_str(" {\n");
                self.depth += 1;
                for s in &b.stmts {
                    self.stmt(s);
                }
                self.depth -= 1;
                self.line("}");
            }
            other => {
                self.out.push('\n');
                self.depth += 1;
                self.stmt(other);
                self.depth -= 1;
            }
        }
    }

    fn simple_stmt(&mut self, st: &Stmt) {
        match st {
            Stmt::Local { ty, name, init, .. } => {
                self.out.push_str(&type_to_string(ty));
                self.out.push(' ');
                self.out.push_str(name);
                if let Some(i) = init {
                    self.out.push_str(" = ");
                    self.expr(i);
                }
            }
            Stmt::Expr(e, _) => self.expr(e),
            other => unreachable!("not a simple statement: {other:?}"),
        }
    }

    fn args(&mut self, args: &[Expr]) {
        self.out.push('(');
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                self.out.push_str(", ");
            }
            self.expr(a);
        }
        self.out.push(')');
    }

    fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Lit(l) => self.out.push_str(&literal_to_string(l)),
            ExprKind::Name(n) => self.out.push_str(n),
            ExprKind::This => self.out.push_str("this"),
            ExprKind::Super => self.out.push_str("super"),
            ExprKind::Field { target, name } => {
                self.expr(target);
                self.out.push('.');
                self.out.push_str(name);
            }
            ExprKind::Call {
                target,
                type_args,
                name,
                args,
            } => {
                if let Some(t) = target {
                    self.expr(t);
                    self.out.push('.');
                    if !type_args.is_empty() {
                        let list: Vec<_> = type_args.iter().map(type_to_string).collect();
                        let _ = write!(self.out, "<{}>", list.join(", "));
                    }
                }
                self.out.push_str(name);
                self.args(args);
            }
            ExprKind::New { ty, args } => {
                self.out.push_str("new ");
                self.out.push_str(&type_to_string(ty));
                self.args(args);
            }
            ExprKind::NewArray { elem, len } => {
                self.out.push_str("new ");
                self.out.push_str(&type_to_string(elem));
                self.out.push('[');
                self.expr(len);
                self.out.push(']');
            }
            ExprKind::Index { array, index } => {
                self.expr(array);
                self.out.push('[');
                self.expr(index);
                self.out.push(']');
            }
            ExprKind::Cast { ty, expr } => {
                let _ = write!(self.out, "({}) ", type_to_string(ty));
                self.expr(expr);
            }
            ExprKind::Unary { op, expr } => {
                let (pre, post) = match op {
                    UnaryOp::Neg => ("-", ""),
                    UnaryOp::Not => ("!", ""),
                    UnaryOp::PreInc => ("++", ""),
                    UnaryOp::PreDec => ("--", ""),
                    UnaryOp::PostInc => ("", "++"),
                    UnaryOp::PostDec => ("", "--"),
                };
                self.out.push_str(pre);
                // `- -x` must not lex as `--x`
                if matches!(op, UnaryOp::Neg | UnaryOp::PreDec)
                    && matches!(&expr.kind, ExprKind::Unary { op: UnaryOp::Neg | UnaryOp::PreDec, .. })
                {
                    self.out.push(' ');
                }
                if matches!(op, UnaryOp::PreInc) && matches!(&expr.kind, ExprKind::Unary { op: UnaryOp::PreInc, .. }) {
                    self.out.push(' ');
                }
                self.expr(expr);
                self.out.push_str(post);
            }
            ExprKind::Binary { op, lhs, rhs } => {
                self.expr(lhs);
                let _ = write!(self.out, " {} ", op.symbol());
                self.expr(rhs);
            }
            ExprKind::Assign { op, target, value } => {
                self.expr(target);
                let _ = write!(self.out, " {} ", op.symbol());
                self.expr(value);
            }
            ExprKind::Paren(inner) => {
                self.out.push('(');
                self.expr(inner);
                self.out.push(')');
            }
            ExprKind::ClassLit(ty) => {
                self.out.push_str(&type_to_string(ty));
                self.out.push_str(".class");
            }
        }
    }
}
