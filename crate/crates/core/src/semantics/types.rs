//! Structural type references and substitution.

use std::collections::HashMap;

use crate::frontend::ast::{BoundKind, DeclId, PrimKind};
use crate::frontend::Project;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WildKind {
    Unbounded,
    Extends,
    Super,
}

impl From<BoundKind> for WildKind {
    fn from(k: BoundKind) -> Self {
        match k {
            BoundKind::Extends => WildKind::Extends,
            BoundKind::Super => WildKind::Super,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeRef {
    Class { decl: DeclId, args: Vec<TypeRef> },
    Var { owner: DeclId, name: String },
    /// `bound` is `None` exactly when `kind` is `Unbounded`.
    Wildcard { kind: WildKind, bound: Option<Box<TypeRef>> },
    Array(Box<TypeRef>),
    Prim(PrimKind),
    /// Type of the `null` literal.
    Null,
    /// Placeholder after a resolution error; compatible with everything.
    Unknown,
}

impl TypeRef {
    pub fn class(decl: DeclId, args: Vec<TypeRef>) -> TypeRef {
        TypeRef::Class { decl, args }
    }

    pub fn unbounded() -> TypeRef {
        TypeRef::Wildcard {
            kind: WildKind::Unbounded,
            bound: None,
        }
    }

    pub fn extends(bound: TypeRef) -> TypeRef {
        wildcard(WildKind::Extends, bound)
    }

    pub fn is_reference(&self) -> bool {
        !matches!(self, TypeRef::Prim(_))
    }

    pub fn is_prim(&self, p: PrimKind) -> bool {
        matches!(self, TypeRef::Prim(q) if *q == p)
    }

    pub fn class_decl(&self) -> Option<DeclId> {
        match self {
            TypeRef::Class { decl, .. } => Some(*decl),
            _ => None,
        }
    }

    pub fn contains_var(&self) -> bool {
        match self {
            TypeRef::Var { .. } => true,
            TypeRef::Class { args, .. } => args.iter().any(TypeRef::contains_var),
            TypeRef::Wildcard { bound, .. } => bound.as_ref().is_some_and(|b| b.contains_var()),
            TypeRef::Array(e) => e.contains_var(),
            _ => false,
        }
    }
}

/// Builds a wildcard, collapsing a wildcard bound so bounds never nest a
/// wildcard directly.
pub fn wildcard(kind: WildKind, bound: TypeRef) -> TypeRef {
    match (kind, bound) {
        (WildKind::Unbounded, _) => TypeRef::unbounded(),
        (_, TypeRef::Wildcard { kind: WildKind::Unbounded, .. }) => TypeRef::unbounded(),
        (WildKind::Extends, TypeRef::Wildcard { kind: WildKind::Extends, bound }) => TypeRef::Wildcard {
            kind: WildKind::Extends,
            bound,
        },
        (WildKind::Super, TypeRef::Wildcard { kind: WildKind::Super, bound }) => TypeRef::Wildcard {
            kind: WildKind::Super,
            bound,
        },
        (_, TypeRef::Wildcard { .. }) => TypeRef::unbounded(),
        (kind, bound) => TypeRef::Wildcard {
            kind,
            bound: Some(Box::new(bound)),
        },
    }
}

/// Map from type variables to their replacements.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Substitution {
    map: HashMap<(DeclId, String), TypeRef>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, owner: DeclId, name: &str, to: TypeRef) {
        self.map.insert((owner, name.to_string()), to);
    }

    pub fn get(&self, owner: DeclId, name: &str) -> Option<&TypeRef> {
        self.map.get(&(owner, name.to_string()))
    }

    pub fn contains(&self, owner: DeclId, name: &str) -> bool {
        self.map.contains_key(&(owner, name.to_string()))
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn extend(&mut self, other: &Substitution) {
        for (k, v) in &other.map {
            self.map.insert(k.clone(), v.clone());
        }
    }
}

/// Replaces every variable in the substitution's domain. Variables outside
/// the domain are left as they are.
pub fn substitute(t: &TypeRef, s: &Substitution) -> TypeRef {
    if s.is_empty() {
        return t.clone();
    }
    match t {
        TypeRef::Var { owner, name } => match s.get(*owner, name) {
            Some(r) => r.clone(),
            None => t.clone(),
        },
        TypeRef::Class { decl, args } => TypeRef::Class {
            decl: *decl,
            args: args.iter().map(|a| substitute(a, s)).collect(),
        },
        TypeRef::Wildcard { kind, bound } => match bound {
            None => t.clone(),
            Some(b) => wildcard(*kind, substitute(b, s)),
        },
        TypeRef::Array(e) => TypeRef::Array(Box::new(substitute(e, s))),
        TypeRef::Prim(_) | TypeRef::Null | TypeRef::Unknown => t.clone(),
    }
}

/// Renders with simple type names, e.g. `Set<? extends Enum<?>>`.
pub fn render(t: &TypeRef, project: &Project) -> String {
    match t {
        TypeRef::Class { decl, args } => {
            let mut s = project.decl(*decl).name.clone();
            if !args.is_empty() {
                let parts: Vec<_> = args.iter().map(|a| render(a, project)).collect();
                s.push('<');
                s.push_str(&parts.join(", "));
                s.push('>');
            }
            s
        }
        TypeRef::Var { name, .. } => name.clone(),
        TypeRef::Wildcard { kind, bound } => match (kind, bound) {
            (WildKind::Extends, Some(b)) => format!("? extends {}", render(b, project)),
            (WildKind::Super, Some(b)) => format!("? super {}", render(b, project)),
            _ => "?".to_string(),
        },
        TypeRef::Array(e) => format!("{}[]", render(e, project)),
        TypeRef::Prim(p) => p.name().to_string(),
        TypeRef::Null => "null".to_string(),
        TypeRef::Unknown => "<unknown>".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const OWNER: DeclId = DeclId(7);

    fn var(n: &str) -> TypeRef {
        TypeRef::Var {
            owner: OWNER,
            name: n.into(),
        }
    }

    #[test]
    fn variable_in_domain_is_replaced() {
        let set_object = TypeRef::class(DeclId(1), vec![TypeRef::class(DeclId(2), vec![])]);
        let mut s = Substitution::new();
        s.insert(OWNER, "F", set_object.clone());
        assert_eq!(substitute(&var("F"), &s), set_object);
    }

    #[test]
    fn substitution_into_a_generic_class() {
        let enum_q = TypeRef::class(DeclId(3), vec![TypeRef::unbounded()]);
        let mut s = Substitution::new();
        s.insert(OWNER, "E", TypeRef::extends(enum_q.clone()));
        let iterator = TypeRef::class(DeclId(4), vec![var("E")]);
        assert_eq!(
            substitute(&iterator, &s),
            TypeRef::class(DeclId(4), vec![TypeRef::extends(enum_q)])
        );
    }

    #[test]
    fn idempotent_once_domain_is_gone() {
        let mut s = Substitution::new();
        s.insert(OWNER, "T", TypeRef::class(DeclId(1), vec![]));
        let t = TypeRef::class(DeclId(5), vec![var("T"), var("U")]);
        let once = substitute(&t, &s);
        assert_eq!(substitute(&once, &s), once);
    }

    #[test]
    fn nested_wildcards_collapse() {
        let x = TypeRef::class(DeclId(1), vec![]);
        let mut s = Substitution::new();
        s.insert(OWNER, "T", TypeRef::extends(x.clone()));
        let w = wildcard(WildKind::Extends, var("T"));
        assert_eq!(substitute(&w, &s), TypeRef::extends(x));
    }
}
