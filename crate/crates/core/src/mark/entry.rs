//! Entrypoint specifications and lifecycle members.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::MarkError;
use crate::frontend::ast::{DeclId, Member};
use crate::frontend::{DeclKind, Project};
use crate::semantics::SymbolTable;

/// `pkg.Class` (the whole test class) or `pkg.Class#method`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct EntrypointSpec {
    pub class: String,
    pub method: Option<String>,
}

impl FromStr for EntrypointSpec {
    type Err = MarkError;

    fn from_str(s: &str) -> Result<Self, MarkError> {
        let bad = || MarkError::MalformedEntrypoint(s.to_string());
        let s = s.trim();
        let (class, method) = match s.split_once('#') {
            Some((c, m)) => (c, Some(m)),
            None => (s, None),
        };
        let ident_ok = |p: &str| {
            !p.is_empty()
                && p.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
                && p.chars().all(|c| c.is_alphanumeric() || c == '_')
        };
        if !class.split('.').all(ident_ok) {
            return Err(bad());
        }
        if let Some(m) = method {
            let name = m.split('(').next().unwrap_or("");
            if !ident_ok(name) || (m.contains('(') && !m.ends_with(')')) {
                return Err(bad());
            }
        }
        Ok(EntrypointSpec {
            class: class.to_string(),
            method: method.map(str::to_string),
        })
    }
}

impl fmt::Display for EntrypointSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.method {
            Some(m) => write!(f, "{}#{}", self.class, m),
            None => f.write_str(&self.class),
        }
    }
}

/// Members implicitly run by the test harness around a test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LifecycleConfig {
    /// A method name, a full member signature such as `init(int)`,
    /// `<init>()` for the no-argument constructor, or `<clinit>`.
    pub patterns: Vec<String>,
}

impl Default for LifecycleConfig {
    fn default() -> Self {
        LifecycleConfig {
            patterns: ["setUp", "tearDown", "<init>()", "<clinit>"].map(String::from).to_vec(),
        }
    }
}

impl LifecycleConfig {
    /// One pattern per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Self {
        let patterns = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect();
        LifecycleConfig { patterns }
    }

    fn matches(&self, member_key_suffix: &str, name: &str) -> bool {
        self.patterns.iter().any(|p| {
            if p.contains('(') {
                p == member_key_suffix
            } else if p == "<clinit>" {
                member_key_suffix == "<clinit>"
            } else {
                p == name && !name.starts_with('<')
            }
        })
    }
}

/// Text after `#` in a member key.
fn member_suffix(key: &str) -> &str {
    key.split_once('#').map(|(_, m)| m).unwrap_or("")
}

/// The methods each spec names, in spec order, without lifecycle members.
pub fn resolve_specs(project: &Project, specs: &[EntrypointSpec]) -> Result<Vec<(DeclId, DeclId)>, MarkError> {
    if specs.is_empty() {
        return Err(MarkError::NoEntrypoints);
    }
    let mut out = Vec::new();
    for spec in specs {
        let missing = || MarkError::EntrypointNotFound(spec.to_string());
        let class = project
            .lookup(&spec.class)
            .filter(|c| {
                let d = project.decl(*c);
                d.kind.is_type() && !d.is_stub
            })
            .ok_or_else(missing)?;
        let methods = |pred: &dyn Fn(DeclId) -> bool| -> Vec<DeclId> {
            project
                .decl(class)
                .children
                .iter()
                .copied()
                .filter(|c| project.decl(*c).kind == DeclKind::Method && pred(*c))
                .collect()
        };
        let named = match &spec.method {
            Some(m) if m.contains('(') => methods(&|c| member_suffix(&project.decl(c).key) == m),
            Some(m) => methods(&|c| project.decl(c).name == *m),
            None => {
                let tests = methods(&|c| matches!(project.member(c), Member::Method(md) if md.modifiers.test));
                if tests.is_empty() {
                    methods(&|_| true)
                } else {
                    tests
                }
            }
        };
        if named.is_empty() {
            return Err(missing());
        }
        out.extend(named.into_iter().map(|m| (class, m)));
    }
    Ok(out)
}

/// Resolves specs to entrypoint declarations, adding lifecycle members of
/// each test class and its project superclasses.
pub fn collect_entrypoints(
    project: &Project,
    table: &SymbolTable,
    specs: &[EntrypointSpec],
    lifecycle: &LifecycleConfig,
) -> Result<BTreeSet<DeclId>, MarkError> {
    let mut out = BTreeSet::new();
    let mut classes = BTreeSet::new();
    for (class, m) in resolve_specs(project, specs)? {
        out.insert(m);
        classes.insert(class);
    }
    for class in classes {
        let mut cur = Some(class);
        while let Some(c) = cur {
            let d = project.decl(c);
            if d.is_stub {
                break;
            }
            for &m in &d.children {
                let md = project.decl(m);
                let lifecycle_kind = matches!(
                    md.kind,
                    DeclKind::Method | DeclKind::Constructor | DeclKind::Initializer
                );
                if lifecycle_kind && lifecycle.matches(member_suffix(&md.key), &md.name) {
                    out.insert(m);
                }
            }
            cur = table.superclass_decl(c);
        }
    }
    Ok(out)
}
