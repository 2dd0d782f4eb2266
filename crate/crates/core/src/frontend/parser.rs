//! Recursive-descent parser for MiniJ.

use super::ast::*;
use super::lexer::{Keyword, Punct, Token, TokenKind};
use crate::error::FrontendError;

/// Parses one compilation unit, numbering expressions from zero.
pub fn parse_unit(tokens: &[Token]) -> Result<CompilationUnit, FrontendError> {
    Parser::new(tokens, 0).parse_unit().map(|(unit, _)| unit)
}

pub(crate) struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    next_id: u32,
    file: FileId,
}

type PResult<T> = Result<T, FrontendError>;

impl<'t> Parser<'t> {
    pub(crate) fn new(tokens: &'t [Token], id_base: u32) -> Self {
        let file = tokens.first().map(|t| t.span.file).unwrap_or(0);
        Parser {
            tokens,
            pos: 0,
            next_id: id_base,
            file,
        }
    }

    /// Returns the unit and the next unused expression id.
    pub(crate) fn parse_unit(mut self) -> PResult<(CompilationUnit, u32)> {
        let start = self.cur_span();
        let mut package = Vec::new();
        if self.eat_kw(Keyword::Package) {
            package = self.qualified_name()?;
            self.expect_punct(Punct::Semi)?;
        }
        let mut imports = Vec::new();
        while self.at_kw(Keyword::Import) {
            let s = self.cur_span();
            self.bump();
            let mut path = vec![self.ident()?];
            let mut on_demand = false;
            while self.eat_punct(Punct::Dot) {
                if self.eat_punct(Punct::Star) {
                    on_demand = true;
                    break;
                }
                path.push(self.ident()?);
            }
            let end = self.expect_punct(Punct::Semi)?;
            imports.push(Import {
                path,
                on_demand,
                span: s.to(end),
            });
        }
        let mut types = Vec::new();
        while !self.at_end() {
            let mods = self.modifiers()?;
            types.push(self.type_decl(mods)?);
        }
        let end = self.tokens.last().map(|t| t.span).unwrap_or(start);
        Ok((
            CompilationUnit {
                file: self.file,
                package,
                imports,
                types,
                span: start.to(end),
            },
            self.next_id,
        ))
    }

    // ---- token helpers ----

    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self, n: usize) -> Option<&'t TokenKind> {
        self.tokens.get(self.pos + n).map(|t| &t.kind)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn cur_span(&self) -> Span {
        match self.peek() {
            Some(t) => t.span,
            None => self
                .tokens
                .last()
                .map(|t| {
                    let mut s = t.span;
                    s.start_line = s.end_line;
                    s.start_col = s.end_col + 1;
                    s.end_col += 1;
                    s
                })
                .unwrap_or_else(|| Span::new(self.file, (1, 1), (1, 1))),
        }
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn error<T>(&self, expected: impl Into<String>) -> PResult<T> {
        let found = match self.peek() {
            Some(t) => format!("`{}`", t.text),
            None => "end of file".to_string(),
        };
        Err(FrontendError::Parse {
            span: self.cur_span(),
            expected: expected.into(),
            found,
        })
    }

    fn at_punct(&self, p: Punct) -> bool {
        matches!(self.peek_kind(0), Some(TokenKind::Punct(q)) if *q == p)
    }

    fn at_punct_n(&self, n: usize, p: Punct) -> bool {
        matches!(self.peek_kind(n), Some(TokenKind::Punct(q)) if *q == p)
    }

    fn at_kw(&self, k: Keyword) -> bool {
        matches!(self.peek_kind(0), Some(TokenKind::Keyword(q)) if *q == k)
    }

    fn eat_punct(&mut self, p: Punct) -> bool {
        if self.at_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: Keyword) -> bool {
        if self.at_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: Punct) -> PResult<Span> {
        if self.at_punct(p) {
            Ok(self.bump().unwrap().span)
        } else {
            self.error(punct_text(p))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek_kind(0) {
            Some(TokenKind::Ident(name)) => {
                self.bump();
                Ok(name.clone())
            }
            _ => self.error("identifier"),
        }
    }

    fn at_ident(&self) -> bool {
        matches!(self.peek_kind(0), Some(TokenKind::Ident(_)))
    }

    fn qualified_name(&mut self) -> PResult<Vec<String>> {
        let mut path = vec![self.ident()?];
        while self.at_punct(Punct::Dot) && matches!(self.peek_kind(1), Some(TokenKind::Ident(_))) {
            self.bump();
            path.push(self.ident()?);
        }
        Ok(path)
    }

    fn fresh_id(&mut self) -> ExprId {
        let id = ExprId(self.next_id);
        self.next_id += 1;
        id
    }

    fn mk(&mut self, kind: ExprKind, span: Span) -> Expr {
        Expr {
            id: self.fresh_id(),
            kind,
            span,
        }
    }

    // ---- declarations ----

    fn modifiers(&mut self) -> PResult<Modifiers> {
        let mut m = Modifiers::default();
        loop {
            match self.peek_kind(0) {
                Some(TokenKind::TestMarker) => m.test = true,
                Some(TokenKind::Keyword(Keyword::Public)) => m.public = true,
                Some(TokenKind::Keyword(Keyword::Private)) => m.private = true,
                Some(TokenKind::Keyword(Keyword::Protected)) => m.protected = true,
                Some(TokenKind::Keyword(Keyword::Static)) if !self.at_punct_n(1, Punct::LBrace) => {
                    m.is_static = true
                }
                Some(TokenKind::Keyword(Keyword::Abstract)) => m.is_abstract = true,
                Some(TokenKind::Keyword(Keyword::Final)) => m.is_final = true,
                Some(TokenKind::Keyword(Keyword::Default)) => m.is_default = true,
                _ => return Ok(m),
            }
            self.bump();
        }
    }

    fn type_decl(&mut self, modifiers: Modifiers) -> PResult<TypeDecl> {
        let start = self.cur_span();
        let kind = if self.eat_kw(Keyword::Class) {
            TypeKind::Class
        } else if self.eat_kw(Keyword::Interface) {
            TypeKind::Interface
        } else if self.eat_kw(Keyword::Enum) {
            TypeKind::Enum
        } else {
            return self.error("`class`, `interface`, or `enum`");
        };
        let name = self.ident()?;
        let type_params = if kind != TypeKind::Enum && self.at_punct(Punct::Lt) {
            self.type_params()?
        } else {
            Vec::new()
        };
        let mut superclass = None;
        let mut interfaces = Vec::new();
        if self.eat_kw(Keyword::Extends) {
            match kind {
                TypeKind::Class => superclass = Some(self.parse_type()?),
                TypeKind::Interface => interfaces = self.type_list()?,
                TypeKind::Enum => return self.error("`implements` or `{`"),
            }
        }
        if kind != TypeKind::Interface && self.eat_kw(Keyword::Implements) {
            interfaces = self.type_list()?;
        }
        self.expect_punct(Punct::LBrace)?;
        let mut enum_constants = Vec::new();
        if kind == TypeKind::Enum {
            while self.at_ident() {
                let span = self.cur_span();
                let cname = self.ident()?;
                enum_constants.push(EnumConstant {
                    id: DeclId::UNSET,
                    name: cname,
                    span,
                });
                if !self.eat_punct(Punct::Comma) {
                    break;
                }
            }
            if !self.at_punct(Punct::RBrace) {
                self.expect_punct(Punct::Semi)?;
            }
        }
        let mut members = Vec::new();
        while !self.at_punct(Punct::RBrace) {
            if self.at_end() {
                return self.error("`}`");
            }
            members.push(self.member(&name, kind)?);
        }
        let end = self.expect_punct(Punct::RBrace)?;
        Ok(TypeDecl {
            id: DeclId::UNSET,
            kind,
            name,
            modifiers,
            type_params,
            superclass,
            interfaces,
            enum_constants,
            members,
            is_stub: false,
            span: start.to(end),
        })
    }

    fn type_list(&mut self) -> PResult<Vec<TypeExpr>> {
        let mut list = vec![self.parse_type()?];
        while self.eat_punct(Punct::Comma) {
            list.push(self.parse_type()?);
        }
        Ok(list)
    }

    fn type_params(&mut self) -> PResult<Vec<TypeParam>> {
        self.expect_punct(Punct::Lt)?;
        let mut params = Vec::new();
        loop {
            let span = self.cur_span();
            let name = self.ident()?;
            let bound = if self.eat_kw(Keyword::Extends) {
                Some(self.parse_type()?)
            } else {
                None
            };
            params.push(TypeParam {
                name,
                bound,
                span: span.to(self.prev_span()),
            });
            if !self.eat_punct(Punct::Comma) {
                break;
            }
        }
        self.expect_punct(Punct::Gt)?;
        Ok(params)
    }

    fn member(&mut self, owner: &str, owner_kind: TypeKind) -> PResult<Member> {
        let start = self.cur_span();
        if self.at_kw(Keyword::Static) && self.at_punct_n(1, Punct::LBrace) {
            self.bump();
            let body = self.block(false)?;
            return Ok(Member::Initializer(InitializerDecl {
                id: DeclId::UNSET,
                span: start.to(body.span),
                body,
            }));
        }
        let mut modifiers = self.modifiers()?;
        if self.at_kw(Keyword::Class) || self.at_kw(Keyword::Interface) || self.at_kw(Keyword::Enum) {
            let mut decl = self.type_decl(modifiers)?;
            decl.span = start.to(decl.span);
            return Ok(Member::Type(decl));
        }
        let type_params = if self.at_punct(Punct::Lt) {
            self.type_params()?
        } else {
            Vec::new()
        };
        // constructor: `Name (`
        if let Some(TokenKind::Ident(n)) = self.peek_kind(0) {
            if n == owner && self.at_punct_n(1, Punct::LParen) {
                if !type_params.is_empty() {
                    return self.error("constructor without type parameters");
                }
                let name = self.ident()?;
                let params = self.params()?;
                let body = if self.eat_punct(Punct::Semi) {
                    None
                } else {
                    Some(self.block(true)?)
                };
                return Ok(Member::Ctor(CtorDecl {
                    id: DeclId::UNSET,
                    modifiers,
                    name,
                    params,
                    span: start.to(self.prev_span()),
                    body,
                }));
            }
        }
        let ty = self.parse_type()?;
        let name = self.ident()?;
        if self.at_punct(Punct::LParen) {
            let params = self.params()?;
            let body = if self.eat_punct(Punct::Semi) {
                None
            } else {
                Some(self.block(false)?)
            };
            if owner_kind == TypeKind::Interface && body.is_none() && !modifiers.is_static {
                modifiers.is_abstract = true;
            }
            return Ok(Member::Method(MethodDecl {
                id: DeclId::UNSET,
                modifiers,
                type_params,
                ret: ty,
                name,
                params,
                body,
                span: start.to(self.prev_span()),
            }));
        }
        if !type_params.is_empty() {
            return self.error("`(`");
        }
        let init = if self.eat_punct(Punct::Assign) {
            Some(self.expr()?)
        } else {
            None
        };
        let end = self.expect_punct(Punct::Semi)?;
        Ok(Member::Field(FieldDecl {
            id: DeclId::UNSET,
            modifiers,
            ty,
            name,
            init,
            span: start.to(end),
        }))
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        self.expect_punct(Punct::LParen)?;
        let mut params = Vec::new();
        if !self.at_punct(Punct::RParen) {
            loop {
                let span = self.cur_span();
                let ty = self.parse_type()?;
                let name = self.ident()?;
                params.push(Param {
                    name,
                    ty,
                    span: span.to(self.prev_span()),
                });
                if !self.eat_punct(Punct::Comma) {
                    break;
                }
            }
        }
        self.expect_punct(Punct::RParen)?;
        Ok(params)
    }

    // ---- types ----

    fn at_prim(&self) -> Option<PrimKind> {
        match self.peek_kind(0) {
            Some(TokenKind::Keyword(Keyword::Int)) => Some(PrimKind::Int),
            Some(TokenKind::Keyword(Keyword::Boolean)) => Some(PrimKind::Boolean),
            Some(TokenKind::Keyword(Keyword::Char)) => Some(PrimKind::Char),
            Some(TokenKind::Keyword(Keyword::Double)) => Some(PrimKind::Double),
            Some(TokenKind::Keyword(Keyword::Void)) => Some(PrimKind::Void),
            _ => None,
        }
    }

    pub(crate) fn parse_type(&mut self) -> PResult<TypeExpr> {
        let base = self.non_array_type()?;
        self.array_suffix(base)
    }

    fn array_suffix(&mut self, mut ty: TypeExpr) -> PResult<TypeExpr> {
        while self.at_punct(Punct::LBracket) && self.at_punct_n(1, Punct::RBracket) {
            self.bump();
            let end = self.bump().unwrap().span;
            let span = ty.span().to(end);
            ty = TypeExpr::Array(Box::new(ty), span);
        }
        Ok(ty)
    }

    fn non_array_type(&mut self) -> PResult<TypeExpr> {
        let start = self.cur_span();
        if let Some(p) = self.at_prim() {
            self.bump();
            return Ok(TypeExpr::Prim(p, start));
        }
        let path = self.qualified_name()?;
        let args = if self.at_punct(Punct::Lt) {
            self.type_args()?
        } else {
            Vec::new()
        };
        Ok(TypeExpr::Named {
            path,
            args,
            span: start.to(self.prev_span()),
        })
    }

    fn type_args(&mut self) -> PResult<Vec<TypeArgExpr>> {
        self.expect_punct(Punct::Lt)?;
        let mut args = Vec::new();
        loop {
            let span = self.cur_span();
            if self.eat_punct(Punct::Question) {
                let bound = if self.eat_kw(Keyword::Extends) {
                    Some((BoundKind::Extends, Box::new(self.parse_type()?)))
                } else if self.eat_kw(Keyword::Super) {
                    Some((BoundKind::Super, Box::new(self.parse_type()?)))
                } else {
                    None
                };
                args.push(TypeArgExpr::Wildcard {
                    bound,
                    span: span.to(self.prev_span()),
                });
            } else {
                args.push(TypeArgExpr::Type(self.parse_type()?));
            }
            if !self.eat_punct(Punct::Comma) {
                break;
            }
        }
        self.expect_punct(Punct::Gt)?;
        Ok(args)
    }

    /// Tries `f`, rewinding on failure.
    fn attempt<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> Option<T> {
        let (pos, id) = (self.pos, self.next_id);
        match f(self) {
            Ok(v) => Some(v),
            Err(_) => {
                self.pos = pos;
                self.next_id = id;
                None
            }
        }
    }

    // ---- statements ----

    fn block(&mut self, ctor_body: bool) -> PResult<Block> {
        let start = self.expect_punct(Punct::LBrace)?;
        let mut stmts = Vec::new();
        if ctor_body && (self.at_kw(Keyword::This) || self.at_kw(Keyword::Super)) && self.at_punct_n(1, Punct::LParen) {
            let span = self.cur_span();
            let kind = if self.eat_kw(Keyword::This) {
                CtorCallKind::This
            } else {
                self.bump();
                CtorCallKind::Super
            };
            let args = self.args()?;
            let end = self.expect_punct(Punct::Semi)?;
            let id = self.fresh_id();
            stmts.push(Stmt::CtorCall {
                id,
                kind,
                args,
                span: span.to(end),
            });
        }
        while !self.at_punct(Punct::RBrace) {
            if self.at_end() {
                return self.error("`}`");
            }
            stmts.push(self.stmt()?);
        }
        let end = self.expect_punct(Punct::RBrace)?;
        Ok(Block {
            stmts,
            span: start.to(end),
        })
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let start = self.cur_span();
        if self.at_punct(Punct::LBrace) {
            return Ok(Stmt::Block(self.block(false)?));
        }
        if self.eat_kw(Keyword::If) {
            self.expect_punct(Punct::LParen)?;
            let cond = self.expr()?;
            self.expect_punct(Punct::RParen)?;
            let then_branch = Box::new(self.stmt()?);
            let else_branch = if self.eat_kw(Keyword::Else) {
                Some(Box::new(self.stmt()?))
            } else {
                None
            };
            return Ok(Stmt::If {
                cond,
                then_branch,
                else_branch,
                span: start.to(self.prev_span()),
            });
        }
        if self.eat_kw(Keyword::While) {
            self.expect_punct(Punct::LParen)?;
            let cond = self.expr()?;
            self.expect_punct(Punct::RParen)?;
            let body = Box::new(self.stmt()?);
            return Ok(Stmt::While {
                cond,
                body,
                span: start.to(self.prev_span()),
            });
        }
        if self.eat_kw(Keyword::For) {
            self.expect_punct(Punct::LParen)?;
            let init = if self.at_punct(Punct::Semi) {
                None
            } else {
                Some(Box::new(self.simple_stmt()?))
            };
            self.expect_punct(Punct::Semi)?;
            let cond = if self.at_punct(Punct::Semi) {
                None
            } else {
                Some(self.expr()?)
            };
            self.expect_punct(Punct::Semi)?;
            let mut update = Vec::new();
            if !self.at_punct(Punct::RParen) {
                update.push(self.expr()?);
                while self.eat_punct(Punct::Comma) {
                    update.push(self.expr()?);
                }
            }
            self.expect_punct(Punct::RParen)?;
            let body = Box::new(self.stmt()?);
            return Ok(Stmt::For {
                init,
                cond,
                update,
                body,
                span: start.to(self.prev_span()),
            });
        }
        if self.eat_kw(Keyword::Return) {
            let value = if self.at_punct(Punct::Semi) {
                None
            } else {
                Some(self.expr()?)
            };
            let end = self.expect_punct(Punct::Semi)?;
            return Ok(Stmt::Return(value, start.to(end)));
        }
        if self.eat_kw(Keyword::Throw) {
            let value = self.expr()?;
            let end = self.expect_punct(Punct::Semi)?;
            return Ok(Stmt::Throw(value, start.to(end)));
        }
        if self.eat_kw(Keyword::Break) {
            let end = self.expect_punct(Punct::Semi)?;
            return Ok(Stmt::Break(start.to(end)));
        }
        if self.eat_kw(Keyword::Continue) {
            let end = self.expect_punct(Punct::Semi)?;
            return Ok(Stmt::Continue(start.to(end)));
        }
        if (self.at_kw(Keyword::This) || self.at_kw(Keyword::Super)) && self.at_punct_n(1, Punct::LParen) {
            return self.error("statement (explicit constructor invocation must be the first statement of a constructor)");
        }
        let stmt = self.simple_stmt()?;
        let end = self.expect_punct(Punct::Semi)?;
        Ok(match stmt {
            Stmt::Local { id, ty, name, init, span } => Stmt::Local {
                id,
                ty,
                name,
                init,
                span: span.to(end),
            },
            Stmt::Expr(e, span) => Stmt::Expr(e, span.to(end)),
            other => other,
        })
    }

    /// Local declaration or expression, without the trailing `;`.
    fn simple_stmt(&mut self) -> PResult<Stmt> {
        let start = self.cur_span();
        if self.at_prim().is_some() || self.at_ident() {
            let local = self.attempt(|p| {
                let ty = p.parse_type()?;
                let name = p.ident()?;
                if !(p.at_punct(Punct::Assign) || p.at_punct(Punct::Semi)) {
                    return p.error("`=` or `;`");
                }
                Ok((ty, name))
            });
            if let Some((ty, name)) = local {
                let init = if self.eat_punct(Punct::Assign) {
                    Some(self.expr()?)
                } else {
                    None
                };
                let id = self.fresh_id();
                return Ok(Stmt::Local {
                    id,
                    ty,
                    name,
                    init,
                    span: start.to(self.prev_span()),
                });
            }
        }
        let e = self.expr()?;
        let span = e.span;
        Ok(Stmt::Expr(e, span))
    }

    // ---- expressions ----

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        let lhs = self.binary(0)?;
        let op = match self.peek_kind(0) {
            Some(TokenKind::Punct(Punct::Assign)) => AssignOp::Assign,
            Some(TokenKind::Punct(Punct::PlusAssign)) => AssignOp::Add,
            Some(TokenKind::Punct(Punct::MinusAssign)) => AssignOp::Sub,
            Some(TokenKind::Punct(Punct::StarAssign)) => AssignOp::Mul,
            _ => return Ok(lhs),
        };
        self.bump();
        let value = self.expr()?;
        let span = lhs.span.to(value.span);
        Ok(self.mk(
            ExprKind::Assign {
                op,
                target: Box::new(lhs),
                value: Box::new(value),
            },
            span,
        ))
    }

    fn binary_op(&self, level: usize) -> Option<BinaryOp> {
        let p = match self.peek_kind(0) {
            Some(TokenKind::Punct(p)) => *p,
            _ => return None,
        };
        use BinaryOp::*;
        let op = match (level, p) {
            (0, Punct::OrOr) => Or,
            (1, Punct::AndAnd) => And,
            (2, Punct::EqEq) => Eq,
            (2, Punct::Ne) => Ne,
            (3, Punct::Lt) => Lt,
            (3, Punct::Le) => Le,
            (3, Punct::Gt) => Gt,
            (3, Punct::Ge) => Ge,
            (4, Punct::Plus) => Add,
            (4, Punct::Minus) => Sub,
            (5, Punct::Star) => Mul,
            (5, Punct::Slash) => Div,
            (5, Punct::Percent) => Rem,
            _ => return None,
        };
        Some(op)
    }

    fn binary(&mut self, level: usize) -> PResult<Expr> {
        if level > 5 {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1)?;
        while let Some(op) = self.binary_op(level) {
            self.bump();
            let rhs = self.binary(level + 1)?;
            let span = lhs.span.to(rhs.span);
            lhs = self.mk(
                ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                span,
            );
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let start = self.cur_span();
        let op = match self.peek_kind(0) {
            Some(TokenKind::Punct(Punct::Minus)) => Some(UnaryOp::Neg),
            Some(TokenKind::Punct(Punct::Bang)) => Some(UnaryOp::Not),
            Some(TokenKind::Punct(Punct::PlusPlus)) => Some(UnaryOp::PreInc),
            Some(TokenKind::Punct(Punct::MinusMinus)) => Some(UnaryOp::PreDec),
            _ => None,
        };
        if let Some(op) = op {
            self.bump();
            let operand = self.unary()?;
            let span = start.to(operand.span);
            return Ok(self.mk(
                ExprKind::Unary {
                    op,
                    expr: Box::new(operand),
                },
                span,
            ));
        }
        if self.at_punct(Punct::LParen) {
            if let Some(cast) = self.attempt(Self::cast) {
                return Ok(cast);
            }
        }
        self.postfix()
    }

    fn cast(&mut self) -> PResult<Expr> {
        let start = self.expect_punct(Punct::LParen)?;
        let is_prim = self.at_prim().is_some();
        let ty = self.parse_type()?;
        self.expect_punct(Punct::RParen)?;
        let castable = match self.peek_kind(0) {
            Some(TokenKind::Ident(_))
            | Some(TokenKind::Int(_))
            | Some(TokenKind::Double(_))
            | Some(TokenKind::Char(_))
            | Some(TokenKind::Str(_))
            | Some(TokenKind::Punct(Punct::LParen))
            | Some(TokenKind::Punct(Punct::Bang)) => true,
            Some(TokenKind::Keyword(k)) => matches!(
                k,
                Keyword::This | Keyword::Super | Keyword::New | Keyword::Null | Keyword::True | Keyword::False
            ),
            Some(TokenKind::Punct(Punct::Minus)) => is_prim,
            _ => false,
        };
        if !castable {
            return self.error("cast operand");
        }
        let operand = self.unary()?;
        let span = start.to(operand.span);
        Ok(self.mk(
            ExprKind::Cast {
                ty,
                expr: Box::new(operand),
            },
            span,
        ))
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect_punct(Punct::LParen)?;
        let mut args = Vec::new();
        if !self.at_punct(Punct::RParen) {
            loop {
                args.push(self.expr()?);
                if !self.eat_punct(Punct::Comma) {
                    break;
                }
            }
        }
        self.expect_punct(Punct::RParen)?;
        Ok(args)
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            if self.at_punct(Punct::Dot) {
                self.bump();
                if self.at_kw(Keyword::Class) {
                    let end = self.bump().unwrap().span;
                    let ty = match expr_to_type(&e) {
                        Some(t) => t,
                        None => return self.error("type name before `.class`"),
                    };
                    let span = e.span.to(end);
                    e = self.mk(ExprKind::ClassLit(ty), span);
                    continue;
                }
                let mut type_args = Vec::new();
                if self.at_punct(Punct::Lt) {
                    self.bump();
                    loop {
                        type_args.push(self.parse_type()?);
                        if !self.eat_punct(Punct::Comma) {
                            break;
                        }
                    }
                    self.expect_punct(Punct::Gt)?;
                }
                let name = self.ident()?;
                if self.at_punct(Punct::LParen) || !type_args.is_empty() {
                    let args = self.args()?;
                    let span = e.span.to(self.prev_span());
                    e = self.mk(
                        ExprKind::Call {
                            target: Some(Box::new(e)),
                            type_args,
                            name,
                            args,
                        },
                        span,
                    );
                } else {
                    let span = e.span.to(self.prev_span());
                    e = self.mk(
                        ExprKind::Field {
                            target: Box::new(e),
                            name,
                        },
                        span,
                    );
                }
            } else if self.at_punct(Punct::LBracket) {
                self.bump();
                let index = self.expr()?;
                let end = self.expect_punct(Punct::RBracket)?;
                let span = e.span.to(end);
                e = self.mk(
                    ExprKind::Index {
                        array: Box::new(e),
                        index: Box::new(index),
                    },
                    span,
                );
            } else if self.at_punct(Punct::PlusPlus) || self.at_punct(Punct::MinusMinus) {
                let op = if self.at_punct(Punct::PlusPlus) {
                    UnaryOp::PostInc
                } else {
                    UnaryOp::PostDec
                };
                let end = self.bump().unwrap().span;
                let span = e.span.to(end);
                e = self.mk(
                    ExprKind::Unary {
                        op,
                        expr: Box::new(e),
                    },
                    span,
                );
            } else {
                break;
            }
        }
        if matches!(e.kind, ExprKind::Super) {
            return self.error("`.` after `super`");
        }
        Ok(e)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let start = self.cur_span();
        let tok = match self.peek() {
            Some(t) => t,
            None => return self.error("expression"),
        };
        let lit = match &tok.kind {
            TokenKind::Int(v) => Some(Literal::Int(*v)),
            TokenKind::Double(v) => Some(Literal::Double(*v)),
            TokenKind::Char(c) => Some(Literal::Char(*c)),
            TokenKind::Str(s) => Some(Literal::Str(s.clone())),
            TokenKind::Keyword(Keyword::True) => Some(Literal::Bool(true)),
            TokenKind::Keyword(Keyword::False) => Some(Literal::Bool(false)),
            TokenKind::Keyword(Keyword::Null) => Some(Literal::Null),
            _ => None,
        };
        if let Some(lit) = lit {
            self.bump();
            return Ok(self.mk(ExprKind::Lit(lit), start));
        }
        match &tok.kind {
            TokenKind::Keyword(Keyword::This) => {
                self.bump();
                Ok(self.mk(ExprKind::This, start))
            }
            TokenKind::Keyword(Keyword::Super) => {
                self.bump();
                if !self.at_punct(Punct::Dot) {
                    return self.error("`.` after `super`");
                }
                Ok(self.mk(ExprKind::Super, start))
            }
            TokenKind::Ident(name) => {
                let name = name.clone();
                self.bump();
                if self.at_punct(Punct::LParen) {
                    let args = self.args()?;
                    let span = start.to(self.prev_span());
                    Ok(self.mk(
                        ExprKind::Call {
                            target: None,
                            type_args: Vec::new(),
                            name,
                            args,
                        },
                        span,
                    ))
                } else {
                    Ok(self.mk(ExprKind::Name(name), start))
                }
            }
            TokenKind::Keyword(Keyword::New) => {
                self.bump();
                let base = self.non_array_type()?;
                if self.at_punct(Punct::LBracket) {
                    self.bump();
                    let len = self.expr()?;
                    let end = self.expect_punct(Punct::RBracket)?;
                    return Ok(self.mk(
                        ExprKind::NewArray {
                            elem: base,
                            len: Box::new(len),
                        },
                        start.to(end),
                    ));
                }
                if matches!(base, TypeExpr::Prim(..)) {
                    return self.error("`[`");
                }
                let args = self.args()?;
                let span = start.to(self.prev_span());
                Ok(self.mk(ExprKind::New { ty: base, args }, span))
            }
            TokenKind::Punct(Punct::LParen) => {
                self.bump();
                let inner = self.expr()?;
                let end = self.expect_punct(Punct::RParen)?;
                Ok(self.mk(ExprKind::Paren(Box::new(inner)), start.to(end)))
            }
            _ => self.error("expression"),
        }
    }
}

/// Reinterprets `a.b.C` parsed as an expression as a type name.
fn expr_to_type(e: &Expr) -> Option<TypeExpr> {
    fn collect(e: &Expr, out: &mut Vec<String>) -> bool {
        match &e.kind {
            ExprKind::Name(n) => {
                out.push(n.clone());
                true
            }
            ExprKind::Field { target, name } => {
                if !collect(target, out) {
                    return false;
                }
                out.push(name.clone());
                true
            }
            _ => false,
        }
    }
    let mut path = Vec::new();
    collect(e, &mut path).then(|| TypeExpr::Named {
        path,
        args: Vec::new(),
        span: e.span,
    })
}

fn punct_text(p: Punct) -> &'static str {
    use Punct::*;
    match p {
        LBrace => "`{`",
        RBrace => "`}`",
        LParen => "`(`",
        RParen => "`)`",
        LBracket => "`[`",
        RBracket => "`]`",
        Semi => "`;`",
        Comma => "`,`",
        Dot => "`.`",
        Lt => "`<`",
        Gt => "`>`",
        Le => "`<=`",
        Ge => "`>=`",
        EqEq => "`==`",
        Ne => "`!=`",
        Assign => "`=`",
        PlusAssign => "`+=`",
        MinusAssign => "`-=`",
        StarAssign => "`*=`",
        Plus => "`+`",
        Minus => "`-`",
        Star => "`*`",
        Slash => "`/`",
        Percent => "`%`",
        Bang => "`!`",
        AndAnd => "`&&`",
        OrOr => "`||`",
        PlusPlus => "`++`",
        MinusMinus => "`--`",
        Question => "`?`",
        Amp => "`&`",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::lexer::tokenize;

    fn parse(src: &str) -> CompilationUnit {
        parse_unit(&tokenize(src, 0).unwrap()).unwrap()
    }

    #[test]
    fn explicit_super_delegation() {
        let unit = parse("class A { A() { super(); } }");
        let Member::Ctor(ctor) = &unit.types[0].members[0] else {
            panic!("expected ctor")
        };
        assert_eq!(ctor.delegation(), Delegation::Super);
    }

    #[test]
    fn generic_class_header() {
        let unit = parse("class Pair<F, S> { F first; S second; }");
        let names: Vec<_> = unit.types[0].type_params.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names, ["F", "S"]);
    }

    #[test]
    fn nested_type_arguments_close_one_at_a_time() {
        let unit = parse("class M { void f() { Pair<Set<Object>, Set<String>> p = new Pair<Set<Object>, Set<String>>(a, b); } }");
        let Member::Method(m) = &unit.types[0].members[0] else {
            panic!()
        };
        assert!(matches!(m.body.as_ref().unwrap().stmts[0], Stmt::Local { .. }));
    }

    #[test]
    fn expression_statements_are_not_locals() {
        let unit = parse("class M { void f() { x = 1; a.b.c = 2; g(x); i++; } }");
        let Member::Method(m) = &unit.types[0].members[0] else {
            panic!()
        };
        for s in &m.body.as_ref().unwrap().stmts {
            assert!(matches!(s, Stmt::Expr(..)), "{s:?}");
        }
    }

    #[test]
    fn cast_versus_parenthesized() {
        let unit = parse("class M { void f() { int a = (int) x; int b = (a) + 1; Object o = (Object) new M(); } }");
        let Member::Method(m) = &unit.types[0].members[0] else {
            panic!()
        };
        let inits: Vec<_> = m
            .body
            .as_ref()
            .unwrap()
            .stmts
            .iter()
            .map(|s| match s {
                Stmt::Local { init: Some(e), .. } => e.kind.clone(),
                _ => unreachable!(),
            })
            .collect();
        assert!(matches!(inits[0], ExprKind::Cast { .. }));
        assert!(matches!(inits[1], ExprKind::Binary { .. }));
        assert!(matches!(inits[2], ExprKind::Cast { .. }));
    }

    #[test]
    fn ctor_call_outside_first_statement_is_rejected() {
        let toks = tokenize("class A { A() { int x = 1; super(); } }", 0).unwrap();
        assert!(parse_unit(&toks).is_err());
    }

    #[test]
    fn parse_error_reports_expected_and_found() {
        let toks = tokenize("class A { int }", 0).unwrap();
        match parse_unit(&toks) {
            Err(FrontendError::Parse { expected, found, .. }) => {
                assert_eq!(expected, "identifier");
                assert_eq!(found, "`}`");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn class_literals_and_generic_calls() {
        let unit = parse("class A { void f() { Class<?> c = Color.class; x.<String>id(y); } }");
        let Member::Method(m) = &unit.types[0].members[0] else {
            panic!()
        };
        let stmts = &m.body.as_ref().unwrap().stmts;
        assert!(matches!(&stmts[0], Stmt::Local { init: Some(Expr { kind: ExprKind::ClassLit(_), .. }), .. }));
        assert!(matches!(&stmts[1], Stmt::Expr(Expr { kind: ExprKind::Call { type_args, .. }, .. }, _) if type_args.len() == 1));
    }

    #[test]
    fn enums_and_initializers() {
        let unit = parse("enum Color { RED, GREEN; int k() { return 1; } } class B { static { x = 1; } }");
        assert_eq!(unit.types[0].enum_constants.len(), 2);
        assert!(matches!(unit.types[1].members[0], Member::Initializer(_)));
    }

    #[test]
    fn interface_methods_without_body_are_abstract() {
        let unit = parse("interface I { int getInt(); default int two() { return 2; } }");
        let Member::Method(a) = &unit.types[0].members[0] else { panic!() };
        let Member::Method(b) = &unit.types[0].members[1] else { panic!() };
        assert!(a.modifiers.is_abstract);
        assert!(!b.modifiers.is_abstract && b.modifiers.is_default);
    }
}
