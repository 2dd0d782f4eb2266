use std::collections::{HashMap, HashSet, VecDeque};

use super::types::{substitute, wildcard, Substitution, TypeRef, WildKind};
use crate::error::{Diagnostic, SemanticError};
use crate::frontend::ast::{DeclId, ExprId, PrimKind, Span};
use crate::frontend::{DeclKind, Project};

/// How expression types are solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMode {
    /// Wildcard receivers are captured with their declared bounds.
    Solved,
    /// Wildcards lose their bounds; a top-level wildcard stays a wildcard.
    Naive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RefKind {
    /// A type named in a declaration header.
    Signature,
    /// A type named inside a body or initializer.
    Type,
    FieldAccess,
    StaticCall,
    /// Index into [`SymbolTable::call_sites`].
    VirtualCall(usize),
    SuperCall,
    /// `new C(..)` resolved to an explicit constructor.
    Creation,
    /// `new C(..)` on class `C`, whether or not its constructor is explicit.
    Instantiate,
    /// `this(..)`/`super(..)`, explicit or implicit.
    Delegation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ref {
    pub target: DeclId,
    pub kind: RefKind,
    pub span: Span,
}

/// A variable whose assigned values are tracked.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarId {
    /// Keyed by the id of the declaring statement.
    Local(ExprId),
    Param(DeclId, usize),
    Field(DeclId),
}

/// What an expression contributes to the variable it is assigned to.
#[derive(Clone, Debug, PartialEq)]
pub enum ValueSource {
    /// An object creation (or string literal) of this exact type.
    Exact(TypeRef),
    /// The value of another variable, seen at the given static type.
    Var(VarId, TypeRef),
    /// `null`: contributes no type.
    Nothing,
    /// Anything else: a call result, `this`, an array element, ...
    Open,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssignFact {
    pub target: VarId,
    pub source: ValueSource,
    /// Declaration whose body contains the assignment.
    pub owner: DeclId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CallKind {
    Static,
    Virtual,
    Super,
}

#[derive(Clone, Debug)]
pub struct CallSite {
    pub expr: ExprId,
    pub owner: DeclId,
    pub target: DeclId,
    pub kind: CallKind,
    /// Static type of the receiver; the enclosing class for implicit `this`.
    pub receiver_type: TypeRef,
    pub receiver: ValueSource,
    pub span: Span,
}

/// What a name, field access, call, creation, or constructor invocation
/// denotes at runtime.
#[derive(Clone, Debug, PartialEq)]
pub enum Binding {
    Var(VarId),
    Type(DeclId),
    Method(DeclId, CallKind),
    /// An explicit constructor.
    Ctor(DeclId),
}

#[derive(Clone, Debug)]
pub struct MethodSig {
    pub type_params: Vec<String>,
    pub params: Vec<TypeRef>,
    pub ret: TypeRef,
}

/// A resolution problem, attached to the declaration it occurs in.
#[derive(Debug)]
pub struct Problem {
    pub owner: Option<DeclId>,
    pub error: SemanticError,
}

impl Problem {
    pub fn diagnostic(&self) -> Option<&Diagnostic> {
        match &self.error {
            SemanticError::Unresolved(d) => d.first(),
            _ => None,
        }
    }
}

#[derive(Debug, Default)]
pub struct SymbolTable {
    pub(crate) supers: HashMap<DeclId, Vec<TypeRef>>,
    pub(crate) superclass: HashMap<DeclId, TypeRef>,
    pub(crate) subtypes: HashMap<DeclId, Vec<DeclId>>,
    pub(crate) tvar_bounds: HashMap<(DeclId, String), TypeRef>,
    pub(crate) type_params: HashMap<DeclId, Vec<String>>,
    pub(crate) field_types: HashMap<DeclId, TypeRef>,
    pub(crate) sigs: HashMap<DeclId, MethodSig>,
    pub(crate) overrides: HashMap<DeclId, Vec<DeclId>>,
    pub(crate) overridden_by: HashMap<DeclId, Vec<DeclId>>,
    pub refs: HashMap<DeclId, Vec<Ref>>,
    pub call_sites: Vec<CallSite>,
    pub facts: Vec<AssignFact>,
    pub expr_types: HashMap<ExprId, TypeRef>,
    pub bindings: HashMap<ExprId, Binding>,
    pub problems: Vec<Problem>,
    pub(crate) well_known: WellKnown,
}

#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct WellKnown {
    pub object: Option<DeclId>,
    pub string: Option<DeclId>,
    pub enum_: Option<DeclId>,
    pub class: Option<DeclId>,
}

impl SymbolTable {
    pub fn object(&self) -> TypeRef {
        match self.well_known.object {
            Some(o) => TypeRef::class(o, vec![]),
            None => TypeRef::Unknown,
        }
    }

    pub fn string(&self) -> TypeRef {
        match self.well_known.string {
            Some(s) => TypeRef::class(s, vec![]),
            None => TypeRef::Unknown,
        }
    }

    pub fn object_decl(&self) -> Option<DeclId> {
        self.well_known.object
    }

    pub fn binding(&self, e: ExprId) -> Option<&Binding> {
        self.bindings.get(&e)
    }

    pub fn refs_of(&self, decl: DeclId) -> &[Ref] {
        self.refs.get(&decl).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn sig(&self, m: DeclId) -> Option<&MethodSig> {
        self.sigs.get(&m)
    }

    pub fn field_type(&self, f: DeclId) -> Option<&TypeRef> {
        self.field_types.get(&f)
    }

    pub fn expr_type(&self, e: ExprId) -> Option<&TypeRef> {
        self.expr_types.get(&e)
    }

    /// Diagnostics for unresolved names, across all declarations.
    pub fn unresolved(&self) -> Vec<&Diagnostic> {
        self.problems.iter().filter_map(Problem::diagnostic).collect()
    }

    pub fn has_problems(&self) -> bool {
        !self.problems.is_empty()
    }

    /// Direct supertypes, superclass first, in terms of the type's own variables.
    pub fn direct_supertypes(&self, decl: DeclId) -> &[TypeRef] {
        self.supers.get(&decl).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn superclass_decl(&self, decl: DeclId) -> Option<DeclId> {
        self.superclass.get(&decl).and_then(TypeRef::class_decl)
    }

    pub fn direct_subtypes(&self, decl: DeclId) -> &[DeclId] {
        self.subtypes.get(&decl).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `decl` and every type below it.
    pub fn all_subtypes(&self, decl: DeclId) -> Vec<DeclId> {
        let mut seen = vec![decl];
        let mut set: HashSet<DeclId> = seen.iter().copied().collect();
        let mut i = 0;
        while i < seen.len() {
            for &s in self.direct_subtypes(seen[i]) {
                if set.insert(s) {
                    seen.push(s);
                }
            }
            i += 1;
        }
        seen
    }

    /// Every proper supertype of `decl`, breadth first.
    pub fn all_supertype_decls(&self, decl: DeclId) -> Vec<DeclId> {
        let mut out = Vec::new();
        let mut seen = HashSet::from([decl]);
        let mut queue = VecDeque::from([decl]);
        while let Some(d) = queue.pop_front() {
            for s in self.direct_supertypes(d) {
                if let Some(sd) = s.class_decl() {
                    if seen.insert(sd) {
                        out.push(sd);
                        queue.push_back(sd);
                    }
                }
            }
        }
        out
    }

    pub fn is_subtype_decl(&self, a: DeclId, b: DeclId) -> bool {
        a == b || Some(b) == self.well_known.object || self.all_supertype_decls(a).contains(&b)
    }

    pub fn overrides(&self, m: DeclId) -> &[DeclId] {
        self.overrides.get(&m).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn overridden_by(&self, m: DeclId) -> &[DeclId] {
        self.overridden_by.get(&m).map(Vec::as_slice).unwrap_or(&[])
    }

    /// A type with its own type variables as arguments.
    pub fn self_type(&self, decl: DeclId) -> TypeRef {
        let args = self
            .type_params
            .get(&decl)
            .map(|ps| {
                ps.iter()
                    .map(|n| TypeRef::Var {
                        owner: decl,
                        name: n.clone(),
                    })
                    .collect()
            })
            .unwrap_or_default();
        TypeRef::class(decl, args)
    }

    pub fn params_of(&self, decl: DeclId) -> &[String] {
        self.type_params.get(&decl).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn tvar_bound(&self, owner: DeclId, name: &str) -> TypeRef {
        self.tvar_bounds
            .get(&(owner, name.to_string()))
            .cloned()
            .unwrap_or_else(|| self.object())
    }

    /// Plain substitution of a class's type parameters by `args`.
    pub fn plain_subst(&self, decl: DeclId, args: &[TypeRef]) -> Substitution {
        let mut s = Substitution::new();
        for (p, a) in self.params_of(decl).iter().zip(args) {
            s.insert(decl, p, a.clone());
        }
        s
    }

    /// Substitution for looking up members on a receiver of type `decl<args>`.
    ///
    /// In solved mode an unbounded wildcard argument is captured as
    /// `? extends B`, where `B` is the parameter's declared bound with the
    /// class's own parameters replaced by `?`.
    pub fn member_subst(&self, decl: DeclId, args: &[TypeRef], mode: SolveMode) -> Substitution {
        let params = self.params_of(decl);
        let mut s = Substitution::new();
        let mut erase = Substitution::new();
        for p in params {
            erase.insert(decl, p, TypeRef::unbounded());
        }
        for (i, p) in params.iter().enumerate() {
            let arg = args.get(i).cloned().unwrap_or_else(TypeRef::unbounded);
            let value = match (&arg, mode) {
                (TypeRef::Wildcard { .. }, SolveMode::Naive) => TypeRef::unbounded(),
                (TypeRef::Wildcard { kind: WildKind::Unbounded, .. }, SolveMode::Solved) => {
                    match self.tvar_bounds.get(&(decl, p.clone())) {
                        Some(b) if Some(b) != self.well_known.object.map(|o| TypeRef::class(o, vec![])).as_ref() => {
                            wildcard(WildKind::Extends, substitute(b, &erase))
                        }
                        _ => TypeRef::unbounded(),
                    }
                }
                _ => arg,
            };
            s.insert(decl, p, value);
        }
        s
    }

    /// The upper bound used for member lookup and subtyping of a non-class type.
    pub fn upper_bound(&self, t: &TypeRef) -> TypeRef {
        match t {
            TypeRef::Var { owner, name } => {
                let b = self.tvar_bound(*owner, name);
                if b.contains_var() && matches!(b, TypeRef::Var { .. }) {
                    self.upper_bound(&b)
                } else {
                    b
                }
            }
            TypeRef::Wildcard {
                kind: WildKind::Extends,
                bound: Some(b),
            } => self.upper_bound(b),
            TypeRef::Wildcard { .. } => self.object(),
            other => other.clone(),
        }
    }

    /// Views `t` (a class type) as its supertype `target`, if it is one.
    pub fn as_super(&self, t: &TypeRef, target: DeclId) -> Option<TypeRef> {
        let TypeRef::Class { decl, args } = t else {
            return None;
        };
        if *decl == target {
            return Some(t.clone());
        }
        let mut seen = HashSet::from([*decl]);
        let mut queue = VecDeque::from([(*decl, args.clone())]);
        while let Some((d, a)) = queue.pop_front() {
            let s = self.plain_subst(d, &a);
            for st in self.direct_supertypes(d) {
                let st = substitute(st, &s);
                if let TypeRef::Class { decl: sd, args: sa } = &st {
                    if *sd == target {
                        return Some(st);
                    }
                    if seen.insert(*sd) {
                        queue.push_back((*sd, sa.clone()));
                    }
                }
            }
        }
        if Some(target) == self.well_known.object {
            return Some(self.object());
        }
        None
    }

    /// Every supertype of `decl<args>` (including itself) with the member
    /// substitution to use for its declarations, breadth first.
    pub fn lookup_chain(&self, decl: DeclId, args: &[TypeRef], mode: SolveMode) -> Vec<(DeclId, Substitution)> {
        let mut out = Vec::new();
        let mut seen = HashSet::from([decl]);
        let first = self.member_subst(decl, args, mode);
        let mut queue = VecDeque::from([(decl, first)]);
        while let Some((d, s)) = queue.pop_front() {
            for st in self.direct_supertypes(d) {
                if let TypeRef::Class { decl: sd, args: sa } = substitute(st, &s) {
                    if seen.insert(sd) {
                        let sub = self.member_subst(sd, &sa, mode);
                        queue.push_back((sd, sub));
                    }
                }
            }
            out.push((d, s));
        }
        if let Some(o) = self.well_known.object {
            if seen.insert(o) {
                out.push((o, Substitution::new()));
            }
        }
        out
    }

    pub fn same_type(&self, a: &TypeRef, b: &TypeRef) -> bool {
        match (a, b) {
            (TypeRef::Unknown, _) | (_, TypeRef::Unknown) => true,
            (TypeRef::Class { decl: d1, args: a1 }, TypeRef::Class { decl: d2, args: a2 }) => {
                d1 == d2 && a1.len() == a2.len() && a1.iter().zip(a2).all(|(x, y)| self.same_type(x, y))
            }
            (TypeRef::Wildcard { kind: k1, bound: b1 }, TypeRef::Wildcard { kind: k2, bound: b2 }) => {
                k1 == k2
                    && match (b1, b2) {
                        (Some(x), Some(y)) => self.same_type(x, y),
                        (None, None) => true,
                        _ => false,
                    }
            }
            (TypeRef::Array(x), TypeRef::Array(y)) => self.same_type(x, y),
            _ => a == b,
        }
    }

    /// `a <: b` with primitive widening, wildcard containment for type
    /// arguments, and leniency for `Unknown`.
    pub fn is_subtype(&self, a: &TypeRef, b: &TypeRef) -> bool {
        use TypeRef::*;
        match (a, b) {
            (Unknown, _) | (_, Unknown) => true,
            (Prim(x), Prim(y)) => {
                x == y
                    || matches!(
                        (x, y),
                        (PrimKind::Char, PrimKind::Int) | (PrimKind::Char, PrimKind::Double) | (PrimKind::Int, PrimKind::Double)
                    )
            }
            (Prim(_), _) | (_, Prim(_)) => false,
            (Null, _) => true,
            (_, Null) => false,
            (Wildcard { .. }, _) => self.is_subtype(&self.upper_bound(a), b),
            (_, Wildcard { kind, bound }) => match (kind, bound) {
                (WildKind::Super, Some(l)) => self.is_subtype(a, l),
                _ => self.is_subtype(a, &self.upper_bound(b)),
            },
            (_, Class { decl, .. }) if Some(*decl) == self.well_known.object => true,
            (Var { owner, name }, Var { owner: o2, name: n2 }) if owner == o2 && name == n2 => true,
            (Var { .. }, _) => {
                let ub = self.upper_bound(a);
                !matches!(ub, Var { .. }) && self.is_subtype(&ub, b)
            }
            (_, Var { .. }) => false,
            (Array(x), Array(y)) => {
                if x.is_reference() && y.is_reference() {
                    self.is_subtype(x, y)
                } else {
                    x == y
                }
            }
            (Array(_), _) => false,
            (Class { .. }, Array(_)) => false,
            (Class { .. }, Class { decl: bd, args: bargs }) => {
                let Some(TypeRef::Class { args: aargs, .. }) = self.as_super(a, *bd) else {
                    return false;
                };
                if bargs.is_empty() || aargs.is_empty() {
                    return true;
                }
                bargs.len() == aargs.len() && bargs.iter().zip(&aargs).all(|(bx, ax)| self.contains(bx, ax))
            }
        }
    }

    /// Type-argument containment: does argument `outer` admit argument `inner`?
    pub fn contains(&self, outer: &TypeRef, inner: &TypeRef) -> bool {
        use TypeRef::*;
        match (outer, inner) {
            (Unknown, _) | (_, Unknown) => true,
            (Wildcard { kind: WildKind::Unbounded, .. }, _) => true,
            (Wildcard { kind: WildKind::Extends, bound: Some(u) }, _) => match inner {
                Wildcard { kind: WildKind::Extends, bound: Some(v) } => self.is_subtype(v, u),
                Wildcard { .. } => self.is_subtype(&self.object(), u),
                t => self.is_subtype(t, u),
            },
            (Wildcard { kind: WildKind::Super, bound: Some(l) }, _) => match inner {
                Wildcard { kind: WildKind::Super, bound: Some(v) } => self.is_subtype(l, v),
                Wildcard { .. } => false,
                t => self.is_subtype(l, t),
            },
            (_, Wildcard { .. }) => false,
            _ => self.same_type(outer, inner),
        }
    }

    /// Erasure key of a type seen under `s`.
    pub fn erasure(&self, t: &TypeRef) -> String {
        match t {
            TypeRef::Class { decl, .. } => format!("#{}", decl.0),
            TypeRef::Var { .. } | TypeRef::Wildcard { .. } => {
                let ub = self.upper_bound(t);
                match ub {
                    TypeRef::Var { .. } | TypeRef::Wildcard { .. } => "#object".into(),
                    other => self.erasure(&other),
                }
            }
            TypeRef::Array(e) => format!("{}[]", self.erasure(e)),
            TypeRef::Prim(p) => p.name().to_string(),
            TypeRef::Null | TypeRef::Unknown => "?".into(),
        }
    }

    /// Erased parameter list of method `m` viewed from type `from`.
    pub(crate) fn erased_params_from(&self, project: &Project, from: DeclId, m: DeclId) -> Option<Vec<String>> {
        let owner = project.owner_type(m);
        let sig = self.sigs.get(&m)?;
        let view = self.as_super(&self.self_type(from), owner)?;
        let TypeRef::Class { args, .. } = &view else {
            return None;
        };
        let s = self.plain_subst(owner, args);
        Some(sig.params.iter().map(|p| self.erasure(&substitute(p, &s))).collect())
    }

    fn methods_named<'p>(&self, project: &'p Project, ty: DeclId, name: &'p str) -> impl Iterator<Item = DeclId> + 'p {
        project
            .decl(ty)
            .children
            .iter()
            .copied()
            .filter(move |c| {
                let d = project.decl(*c);
                d.kind == DeclKind::Method && d.name == name
            })
            .collect::<Vec<_>>()
            .into_iter()
    }

    /// The implementation of method `m` used by objects whose runtime class
    /// is `ty`, or `None` when it is abstract there.
    pub fn dispatch(&self, project: &Project, ty: DeclId, m: DeclId) -> Option<DeclId> {
        let md = project.decl(m);
        if md.is_static {
            return Some(m);
        }
        let erased = self.erased_params_from(project, ty, m)?;
        let matches = |c: DeclId| {
            let d = project.decl(c);
            !d.is_static
                && !d.is_abstract
                && self.erased_params_from(project, ty, c).as_ref() == Some(&erased)
        };
        let mut cur = Some(ty);
        while let Some(c) = cur {
            if let Some(found) = self.methods_named(project, c, &md.name).find(|x| matches(*x)) {
                return Some(found);
            }
            cur = self.superclass_decl(c);
        }
        let mut defaults: Vec<DeclId> = Vec::new();
        for sup in self.all_supertype_decls(ty) {
            if project.decl(sup).kind == DeclKind::Interface {
                defaults.extend(self.methods_named(project, sup, &md.name).filter(|x| matches(*x)));
            }
        }
        defaults
            .iter()
            .copied()
            .find(|&d| {
                let dt = project.owner_type(d);
                defaults.iter().all(|&o| self.is_subtype_decl(dt, project.owner_type(o)))
            })
            .or_else(|| defaults.first().copied())
    }

    /// Abstract methods a concrete class must implement, paired with the
    /// method that implements each (if any).
    pub fn abstract_obligations(&self, project: &Project, class: DeclId) -> Vec<(DeclId, Option<DeclId>)> {
        let mut out = Vec::new();
        let mut seen_sigs = HashSet::new();
        let mut types = vec![class];
        types.extend(self.all_supertype_decls(class));
        for t in types {
            for &c in &project.decl(t).children {
                let d = project.decl(c);
                if d.kind != DeclKind::Method || !d.is_abstract {
                    continue;
                }
                let Some(erased) = self.erased_params_from(project, class, c) else {
                    continue;
                };
                if !seen_sigs.insert((d.name.clone(), erased)) {
                    continue;
                }
                out.push((c, self.dispatch(project, class, c)));
            }
        }
        out
    }
}
