//! Syntax tree for MiniJ compilation units.
//!
//! Nodes carry a [`Span`] and, where later phases need to key side tables,
//! an id. Declaration ids are assigned by the project loader; expression ids
//! are assigned by the parser from a caller-provided base so they are unique
//! project-wide.

use std::fmt;

/// Index of a source file inside a project's file table.
pub type FileId = u32;

/// 1-based source range.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub file: FileId,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl Span {
    pub fn new(file: FileId, start: (u32, u32), end: (u32, u32)) -> Self {
        Span {
            file,
            start_line: start.0,
            start_col: start.1,
            end_line: end.0,
            end_col: end.1,
        }
    }

    /// Smallest span covering both `self` and `other`.
    pub fn to(self, other: Span) -> Span {
        let (start_line, start_col) =
            (self.start_line, self.start_col).min((other.start_line, other.start_col));
        let (end_line, end_col) = (self.end_line, self.end_col).max((other.end_line, other.end_col));
        Span {
            file: self.file,
            start_line,
            start_col,
            end_line,
            end_col,
        }
    }

    pub fn contains(&self, other: &Span) -> bool {
        (self.start_line, self.start_col) <= (other.start_line, other.start_col)
            && (other.end_line, other.end_col) <= (self.end_line, self.end_col)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start_line, self.start_col)
    }
}

/// Stable index of a declaration in a loaded project.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeclId(pub u32);

impl DeclId {
    pub const UNSET: DeclId = DeclId(u32::MAX);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl Default for DeclId {
    fn default() -> Self {
        DeclId::UNSET
    }
}

/// Project-unique id of an expression or local-declaring statement.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExprId(pub u32);

#[derive(Clone, Debug, PartialEq)]
pub struct CompilationUnit {
    pub file: FileId,
    pub package: Vec<String>,
    pub imports: Vec<Import>,
    pub types: Vec<TypeDecl>,
    pub span: Span,
}

impl CompilationUnit {
    pub fn package_name(&self) -> String {
        self.package.join(".")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Import {
    pub path: Vec<String>,
    /// `import a.b.*;`
    pub on_demand: bool,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Modifiers {
    pub public: bool,
    pub protected: bool,
    pub private: bool,
    pub is_static: bool,
    pub is_abstract: bool,
    pub is_final: bool,
    pub is_default: bool,
    /// The `@Test` marker.
    pub test: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TypeKind {
    Class,
    Interface,
    Enum,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TypeParam {
    pub name: String,
    pub bound: Option<TypeExpr>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TypeDecl {
    pub id: DeclId,
    pub kind: TypeKind,
    pub name: String,
    pub modifiers: Modifiers,
    pub type_params: Vec<TypeParam>,
    /// `extends` of a class. Interfaces put their `extends` list in `interfaces`.
    pub superclass: Option<TypeExpr>,
    pub interfaces: Vec<TypeExpr>,
    pub enum_constants: Vec<EnumConstant>,
    pub members: Vec<Member>,
    pub is_stub: bool,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnumConstant {
    pub id: DeclId,
    pub name: String,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Member {
    Field(FieldDecl),
    Method(MethodDecl),
    Ctor(CtorDecl),
    Type(TypeDecl),
    Initializer(InitializerDecl),
}

impl Member {
    pub fn span(&self) -> Span {
        match self {
            Member::Field(f) => f.span,
            Member::Method(m) => m.span,
            Member::Ctor(c) => c.span,
            Member::Type(t) => t.span,
            Member::Initializer(i) => i.span,
        }
    }

    pub fn id(&self) -> DeclId {
        match self {
            Member::Field(f) => f.id,
            Member::Method(m) => m.id,
            Member::Ctor(c) => c.id,
            Member::Type(t) => t.id,
            Member::Initializer(i) => i.id,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldDecl {
    pub id: DeclId,
    pub modifiers: Modifiers,
    pub ty: TypeExpr,
    pub name: String,
    pub init: Option<Expr>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub name: String,
    pub ty: TypeExpr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MethodDecl {
    pub id: DeclId,
    pub modifiers: Modifiers,
    pub type_params: Vec<TypeParam>,
    pub ret: TypeExpr,
    pub name: String,
    pub params: Vec<Param>,
    pub body: Option<Block>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CtorDecl {
    pub id: DeclId,
    pub modifiers: Modifiers,
    pub name: String,
    pub params: Vec<Param>,
    /// `None` only in stub files.
    pub body: Option<Block>,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Delegation {
    This,
    Super,
    None,
}

impl CtorDecl {
    /// The explicit-constructor-invocation marker of this constructor.
    pub fn delegation(&self) -> Delegation {
        match self.body.as_ref().and_then(|b| b.stmts.first()) {
            Some(Stmt::CtorCall { kind: CtorCallKind::This, .. }) => Delegation::This,
            Some(Stmt::CtorCall { kind: CtorCallKind::Super, .. }) => Delegation::Super,
            _ => Delegation::None,
        }
    }
}

/// `static { ... }`
#[derive(Clone, Debug, PartialEq)]
pub struct InitializerDecl {
    pub id: DeclId,
    pub body: Block,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrimKind {
    Int,
    Boolean,
    Char,
    Double,
    Void,
}

impl PrimKind {
    pub fn name(self) -> &'static str {
        match self {
            PrimKind::Int => "int",
            PrimKind::Boolean => "boolean",
            PrimKind::Char => "char",
            PrimKind::Double => "double",
            PrimKind::Void => "void",
        }
    }
}

/// A type as written in source.
#[derive(Clone, Debug, PartialEq)]
pub enum TypeExpr {
    Prim(PrimKind, Span),
    Named {
        /// Dotted name segments, e.g. `java.util.Set` or `Outer.Inner`.
        path: Vec<String>,
        args: Vec<TypeArgExpr>,
        span: Span,
    },
    Array(Box<TypeExpr>, Span),
}

impl TypeExpr {
    pub fn span(&self) -> Span {
        match self {
            TypeExpr::Prim(_, s) | TypeExpr::Named { span: s, .. } | TypeExpr::Array(_, s) => *s,
        }
    }

    pub fn named(name: &str) -> TypeExpr {
        TypeExpr::Named {
            path: name.split('.').map(str::to_string).collect(),
            args: Vec::new(),
            span: Span::default(),
        }
    }

    pub fn is_void(&self) -> bool {
        matches!(self, TypeExpr::Prim(PrimKind::Void, _))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundKind {
    Extends,
    Super,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TypeArgExpr {
    Type(TypeExpr),
    Wildcard {
        bound: Option<(BoundKind, Box<TypeExpr>)>,
        span: Span,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CtorCallKind {
    This,
    Super,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Stmt {
    Block(Block),
    Local {
        id: ExprId,
        ty: TypeExpr,
        name: String,
        init: Option<Expr>,
        span: Span,
    },
    Expr(Expr, Span),
    If {
        cond: Expr,
        then_branch: Box<Stmt>,
        else_branch: Option<Box<Stmt>>,
        span: Span,
    },
    While {
        cond: Expr,
        body: Box<Stmt>,
        span: Span,
    },
    For {
        init: Option<Box<Stmt>>,
        cond: Option<Expr>,
        update: Vec<Expr>,
        body: Box<Stmt>,
        span: Span,
    },
    Return(Option<Expr>, Span),
    Throw(Expr, Span),
    CtorCall {
        id: ExprId,
        kind: CtorCallKind,
        args: Vec<Expr>,
        span: Span,
    },
    Break(Span),
    Continue(Span),
}

impl Stmt {
    pub fn span(&self) -> Span {
        match self {
            Stmt::Block(b) => b.span,
            Stmt::Local { span, .. }
            | Stmt::Expr(_, span)
            | Stmt::If { span, .. }
            | Stmt::While { span, .. }
            | Stmt::For { span, .. }
            | Stmt::Return(_, span)
            | Stmt::Throw(_, span)
            | Stmt::CtorCall { span, .. }
            | Stmt::Break(span)
            | Stmt::Continue(span) => *span,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Literal {
    Int(i32),
    Double(f64),
    Char(char),
    Str(String),
    Bool(bool),
    Null,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Not,
    PreInc,
    PreDec,
    PostInc,
    PostDec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Rem => "%",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AssignOp {
    Assign,
    Add,
    Sub,
    Mul,
}

impl AssignOp {
    pub fn symbol(self) -> &'static str {
        match self {
            AssignOp::Assign => "=",
            AssignOp::Add => "+=",
            AssignOp::Sub => "-=",
            AssignOp::Mul => "*=",
        }
    }

    pub fn binary(self) -> Option<BinaryOp> {
        match self {
            AssignOp::Assign => None,
            AssignOp::Add => Some(BinaryOp::Add),
            AssignOp::Sub => Some(BinaryOp::Sub),
            AssignOp::Mul => Some(BinaryOp::Mul),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub id: ExprId,
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Lit(Literal),
    /// A bare identifier: local, field, or type name.
    Name(String),
    This,
    /// Only valid as the receiver of a method call.
    Super,
    Field {
        target: Box<Expr>,
        name: String,
    },
    Call {
        target: Option<Box<Expr>>,
        type_args: Vec<TypeExpr>,
        name: String,
        args: Vec<Expr>,
    },
    New {
        ty: TypeExpr,
        args: Vec<Expr>,
    },
    NewArray {
        elem: TypeExpr,
        len: Box<Expr>,
    },
    Index {
        array: Box<Expr>,
        index: Box<Expr>,
    },
    Cast {
        ty: TypeExpr,
        expr: Box<Expr>,
    },
    Unary {
        op: UnaryOp,
        expr: Box<Expr>,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Assign {
        op: AssignOp,
        target: Box<Expr>,
        value: Box<Expr>,
    },
    Paren(Box<Expr>),
    ClassLit(TypeExpr),
}
