//! Lexing, parsing, printing, and loading of MiniJ sources.

pub mod ast;
pub mod lexer;
pub mod normalize;
pub mod parser;
pub mod printer;
pub mod project;
pub mod visit;

pub use lexer::{tokenize, Token, TokenKind};
pub use parser::parse_unit;
pub use printer::{expr_to_string, print_unit, type_to_string};
pub use project::{load_project, DeclEntry, DeclKind, DeclLoc, Project, SourceFile};
