//! Test dependency minimization for MiniJ projects.

pub mod baseline;
pub mod corpus;
pub mod driver;
pub mod emitter;
pub mod error;
pub mod frontend;
pub mod mark;
pub mod oracle;
pub mod semantics;
pub mod sweep;

pub use error::{Error, Result};
pub use frontend::ast::{DeclId, Span};
pub use frontend::{load_project, DeclKind, Project};
pub use driver::{minimize_until_convergence, Algorithm, Report, RunConfig};
pub use emitter::DummyMode;
pub use mark::{EntrypointSpec, LifecycleConfig};
pub use sweep::Verdict;
