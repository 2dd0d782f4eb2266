use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

use crate::frontend::ast::Span;

#[derive(Debug, Error)]
pub enum FrontendError {
    #[error("{span}: lex error: {message}")]
    Lex { span: Span, message: String },
    #[error("{span}: parse error: expected {expected}, found {found}")]
    Parse {
        span: Span,
        expected: String,
        found: String,
    },
    #[error("{}: {message}", path.display())]
    Invalid { path: PathBuf, message: String },
    #[error("duplicate type `{name}` declared in {} and {}", first.display(), second.display())]
    DuplicateType {
        name: String,
        first: PathBuf,
        second: PathBuf,
    },
    #[error("duplicate member `{key}`")]
    DuplicateMember { key: String },
    #[error("{}: stub declaration `{name}` has a body", path.display())]
    StubWithBody { path: PathBuf, name: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<FrontendError>,
    },
}

/// One unresolved name together with where it was used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub name: String,
    pub message: String,
    pub span: Span,
    pub path: PathBuf,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.path.display(), self.span, self.message)
    }
}

fn join_diagnostics(list: &[Diagnostic]) -> String {
    list.iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Error)]
pub enum SemanticError {
    #[error("unresolved symbols: {}", join_diagnostics(.0))]
    Unresolved(Vec<Diagnostic>),
    #[error("{span}: ambiguous name `{name}`")]
    AmbiguousName { name: String, span: Span },
    #[error("{span}: no applicable method `{name}`")]
    NoApplicableMethod { name: String, span: Span },
    #[error("{span}: ambiguous call to `{name}`: candidates {}", candidates.join(", "))]
    AmbiguousOverload {
        name: String,
        candidates: Vec<String>,
        span: Span,
    },
    #[error("{span}: cannot solve type: {message}")]
    TypeSolve { message: String, span: Span },
}

#[derive(Debug, Error)]
pub enum MarkError {
    #[error("entrypoint `{0}` does not name a project declaration")]
    EntrypointNotFound(String),
    #[error("malformed entrypoint `{0}`: expected `pkg.Class` or `pkg.Class#method`")]
    MalformedEntrypoint(String),
    #[error("no entrypoints given")]
    NoEntrypoints,
}

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("emitted project is inconsistent: {0}")]
    Consistency(String),
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("step budget of {0} exceeded")]
    BudgetExceeded(u64),
    #[error("no builtin behavior for library call `{0}`")]
    UnsupportedStubCall(String),
    #[error("decision maps cover different declarations: {0}")]
    IndexMismatch(String),
    #[error("entrypoint `{0}` cannot be executed: {1}")]
    NotExecutable(String, String),
}

/// Top-level error of the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Semantic(#[from] SemanticError),
    #[error(transparent)]
    Mark(#[from] MarkError),
    #[error(transparent)]
    Emit(#[from] EmitError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
