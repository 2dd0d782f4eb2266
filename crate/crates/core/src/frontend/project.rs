//! Loading source trees and stub files into a [`Project`] with a frozen
//! declaration index.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ast::*;
use super::lexer::tokenize;
use super::parser::Parser;
use super::printer::param_types;
use crate::error::FrontendError;

const BUILTIN_STUBS: &[(&str, &str)] = &[
    ("<runtime>/java_lang.mjstub", include_str!("rt/java_lang.mjstub")),
    ("<runtime>/java_util.mjstub", include_str!("rt/java_util.mjstub")),
    ("<runtime>/org_junit.mjstub", include_str!("rt/org_junit.mjstub")),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeclKind {
    Class,
    Interface,
    Enum,
    Field,
    EnumConstant,
    Method,
    Constructor,
    Initializer,
}

impl DeclKind {
    pub fn is_type(self) -> bool {
        matches!(self, DeclKind::Class | DeclKind::Interface | DeclKind::Enum)
    }

    pub fn is_field(self) -> bool {
        matches!(self, DeclKind::Field | DeclKind::EnumConstant)
    }

    pub fn is_bodied(self) -> bool {
        matches!(self, DeclKind::Method | DeclKind::Constructor | DeclKind::Initializer)
    }
}

/// Position of a type declaration: index into `unit.types`, then indices into
/// `members` of each enclosing type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypePath {
    pub file: usize,
    pub chain: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeclLoc {
    Type(TypePath),
    Member(TypePath, usize),
    EnumConstant(TypePath, usize),
}

#[derive(Clone, Debug)]
pub struct DeclEntry {
    pub id: DeclId,
    pub kind: DeclKind,
    pub name: String,
    /// `pkg.Cls`, `pkg.Cls#field`, `pkg.Cls#m(int)`, `pkg.Cls#<init>()`, `pkg.Cls#<clinit>`.
    pub key: String,
    pub container: Option<DeclId>,
    pub is_stub: bool,
    pub is_static: bool,
    pub is_abstract: bool,
    pub loc: DeclLoc,
    pub span: Span,
    /// Direct children in declaration order.
    pub children: Vec<DeclId>,
}

impl DeclEntry {
    /// `pkg.Cls.m(int)`, used in dummy diagnostics.
    pub fn signature(&self) -> String {
        match self.key.split_once('#') {
            Some((ty, member)) => format!("{ty}.{member}"),
            None => self.key.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SourceFile {
    /// Relative to the source root for project files.
    pub path: PathBuf,
    pub unit: CompilationUnit,
    pub is_stub: bool,
}

#[derive(Clone, Debug)]
pub struct Project {
    pub root: PathBuf,
    pub files: Vec<SourceFile>,
    decls: Vec<DeclEntry>,
    by_key: HashMap<String, DeclId>,
    stub_sources: Vec<(PathBuf, String)>,
}

/// Reads every `.mj` file under `root` plus the given stub files.
pub fn load_project(root: &Path, stub_files: &[PathBuf]) -> Result<Project, FrontendError> {
    let mut paths = Vec::new();
    collect_sources(root, &mut paths)?;
    paths.sort();
    let mut sources = Vec::new();
    for p in paths {
        let text = read(&p)?;
        let rel = p.strip_prefix(root).unwrap_or(&p).to_path_buf();
        sources.push((rel, text));
    }
    let mut stubs = Vec::new();
    for p in stub_files {
        stubs.push((p.clone(), read(p)?));
    }
    Project::from_sources(root, sources, stubs)
}

fn read(p: &Path) -> Result<String, FrontendError> {
    fs::read_to_string(p).map_err(|source| FrontendError::Io {
        path: p.to_path_buf(),
        source,
    })
}

fn collect_sources(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), FrontendError> {
    let io = |source| FrontendError::Io {
        path: dir.to_path_buf(),
        source,
    };
    for entry in fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.is_dir() {
            collect_sources(&path, out)?;
        } else if path.extension().is_some_and(|e| e == "mj") {
            out.push(path);
        }
    }
    Ok(())
}

fn parse_file(path: &Path, text: &str, file: FileId, id_base: u32) -> Result<(CompilationUnit, u32), FrontendError> {
    let wrap = |e| FrontendError::InFile {
        path: path.to_path_buf(),
        source: Box::new(e),
    };
    let tokens = tokenize(text, file).map_err(wrap)?;
    let mut parsed = Parser::new(&tokens, id_base).parse_unit().map_err(wrap)?;
    parsed.0.file = file;
    Ok(parsed)
}

impl Project {
    /// Builds a project from in-memory texts. Paths of `sources` are relative to `root`.
    pub fn from_sources(
        root: impl Into<PathBuf>,
        sources: Vec<(PathBuf, String)>,
        stubs: Vec<(PathBuf, String)>,
    ) -> Result<Project, FrontendError> {
        let mut files = Vec::new();
        let mut next_expr = 0u32;

        let mut user_stub_types = HashSet::new();
        let mut stub_units = Vec::new();
        let n_builtin = BUILTIN_STUBS.len();
        for (j, (path, text)) in stubs.iter().enumerate() {
            let (unit, next) = parse_file(path, text, (n_builtin + j) as FileId, next_expr)?;
            next_expr = next;
            let pkg = unit.package_name();
            for t in &unit.types {
                user_stub_types.insert(qualify(&pkg, &t.name));
            }
            stub_units.push((path.clone(), unit));
        }
        for (i, (path, text)) in BUILTIN_STUBS.iter().enumerate() {
            let path = PathBuf::from(path);
            let (mut unit, next) = parse_file(&path, text, i as FileId, next_expr)?;
            next_expr = next;
            let pkg = unit.package_name();
            // a user stub replaces the runtime's declaration of the same type
            unit.types.retain(|t| !user_stub_types.contains(&qualify(&pkg, &t.name)));
            files.push(SourceFile {
                path,
                unit,
                is_stub: true,
            });
        }
        for (path, unit) in stub_units {
            files.push(SourceFile {
                path,
                unit,
                is_stub: true,
            });
        }
        for (k, (path, text)) in sources.iter().enumerate() {
            let file = (n_builtin + stubs.len() + k) as FileId;
            let (unit, next) = parse_file(path, text, file, next_expr)?;
            next_expr = next;
            files.push(SourceFile {
                path: path.clone(),
                unit,
                is_stub: false,
            });
        }
        for f in files.iter_mut() {
            validate(f)?;
            if f.is_stub {
                for t in &mut f.unit.types {
                    mark_stub(t);
                }
            }
        }

        let mut project = Project {
            root: root.into(),
            files,
            decls: Vec::new(),
            by_key: HashMap::new(),
            stub_sources: stubs,
        };
        project.index()?;
        Ok(project)
    }

    fn index(&mut self) -> Result<(), FrontendError> {
        let mut decls = Vec::new();
        let mut by_key: HashMap<String, DeclId> = HashMap::new();
        let mut type_files: HashMap<String, PathBuf> = HashMap::new();
        for fi in 0..self.files.len() {
            let pkg = self.files[fi].unit.package_name();
            let is_stub = self.files[fi].is_stub;
            let path = self.files[fi].path.clone();
            let n = self.files[fi].unit.types.len();
            for ti in 0..n {
                let tpath = TypePath {
                    file: fi,
                    chain: vec![ti],
                };
                let prefix = if pkg.is_empty() { String::new() } else { format!("{pkg}.") };
                let t = &self.files[fi].unit.types[ti];
                let key = format!("{prefix}{}", t.name);
                if let Some(first) = type_files.get(&key) {
                    return Err(FrontendError::DuplicateType {
                        name: key,
                        first: first.clone(),
                        second: path,
                    });
                }
                index_type(t, key, None, tpath, is_stub, &mut decls, &mut by_key, &mut type_files, &path)?;
            }
        }
        // write ids back into the tree
        for d in &decls {
            let id = d.id;
            match &d.loc {
                DeclLoc::Type(tp) => type_at_mut(&mut self.files, tp).id = id,
                DeclLoc::Member(tp, mi) => match &mut type_at_mut(&mut self.files, tp).members[*mi] {
                    Member::Field(f) => f.id = id,
                    Member::Method(m) => m.id = id,
                    Member::Ctor(c) => c.id = id,
                    Member::Initializer(i) => i.id = id,
                    Member::Type(_) => unreachable!("nested types are indexed as types"),
                },
                DeclLoc::EnumConstant(tp, ci) => type_at_mut(&mut self.files, tp).enum_constants[*ci].id = id,
            }
        }
        self.decls = decls;
        self.by_key = by_key;
        Ok(())
    }

    pub fn decls(&self) -> &[DeclEntry] {
        &self.decls
    }

    pub fn decl(&self, id: DeclId) -> &DeclEntry {
        &self.decls[id.index()]
    }

    pub fn lookup(&self, key: &str) -> Option<DeclId> {
        self.by_key.get(key).copied()
    }

    /// Declarations from project sources, excluding stubs.
    pub fn project_decls(&self) -> impl Iterator<Item = &DeclEntry> {
        self.decls.iter().filter(|d| !d.is_stub)
    }

    pub fn stub_sources(&self) -> &[(PathBuf, String)] {
        &self.stub_sources
    }

    pub fn type_decl(&self, id: DeclId) -> &TypeDecl {
        match &self.decl(id).loc {
            DeclLoc::Type(tp) => type_at(&self.files, tp),
            _ => panic!("{} is not a type", self.decl(id).key),
        }
    }

    pub fn member(&self, id: DeclId) -> &Member {
        match &self.decl(id).loc {
            DeclLoc::Member(tp, mi) => &type_at(&self.files, tp).members[*mi],
            _ => panic!("{} is not a member", self.decl(id).key),
        }
    }

    pub fn method(&self, id: DeclId) -> &MethodDecl {
        match self.member(id) {
            Member::Method(m) => m,
            _ => panic!("{} is not a method", self.decl(id).key),
        }
    }

    pub fn ctor(&self, id: DeclId) -> &CtorDecl {
        match self.member(id) {
            Member::Ctor(c) => c,
            _ => panic!("{} is not a constructor", self.decl(id).key),
        }
    }

    pub fn field(&self, id: DeclId) -> Option<&FieldDecl> {
        match &self.decl(id).loc {
            DeclLoc::Member(tp, mi) => match &type_at(&self.files, tp).members[*mi] {
                Member::Field(f) => Some(f),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn initializer(&self, id: DeclId) -> &InitializerDecl {
        match self.member(id) {
            Member::Initializer(i) => i,
            _ => panic!("{} is not an initializer", self.decl(id).key),
        }
    }

    pub fn file_of(&self, id: DeclId) -> &SourceFile {
        let tp = match &self.decl(id).loc {
            DeclLoc::Type(tp) | DeclLoc::Member(tp, _) | DeclLoc::EnumConstant(tp, _) => tp,
        };
        &self.files[tp.file]
    }

    /// The type declaring `id`, or `id` itself when it is a type.
    pub fn owner_type(&self, id: DeclId) -> DeclId {
        let d = self.decl(id);
        if d.kind.is_type() {
            id
        } else {
            d.container.expect("members have a container")
        }
    }

    /// Outermost type containing `id`.
    pub fn top_level_type(&self, mut id: DeclId) -> DeclId {
        while let Some(c) = self.decl(id).container {
            id = c;
        }
        id
    }

    pub fn package_of(&self, id: DeclId) -> String {
        self.file_of(id).unit.package_name()
    }
}

fn qualify(pkg: &str, name: &str) -> String {
    if pkg.is_empty() {
        name.to_string()
    } else {
        format!("{pkg}.{name}")
    }
}

fn type_at<'a>(files: &'a [SourceFile], tp: &TypePath) -> &'a TypeDecl {
    let mut t = &files[tp.file].unit.types[tp.chain[0]];
    for &i in &tp.chain[1..] {
        t = match &t.members[i] {
            Member::Type(inner) => inner,
            _ => unreachable!(),
        };
    }
    t
}

fn type_at_mut<'a>(files: &'a mut [SourceFile], tp: &TypePath) -> &'a mut TypeDecl {
    let mut t = &mut files[tp.file].unit.types[tp.chain[0]];
    for &i in &tp.chain[1..] {
        t = match &mut t.members[i] {
            Member::Type(inner) => inner,
            _ => unreachable!(),
        };
    }
    t
}

#[allow(clippy::too_many_arguments)]
fn index_type(
    t: &TypeDecl,
    key: String,
    container: Option<DeclId>,
    tpath: TypePath,
    is_stub: bool,
    decls: &mut Vec<DeclEntry>,
    by_key: &mut HashMap<String, DeclId>,
    type_files: &mut HashMap<String, PathBuf>,
    path: &Path,
) -> Result<DeclId, FrontendError> {
    let id = DeclId(decls.len() as u32);
    type_files.insert(key.clone(), path.to_path_buf());
    by_key.insert(key.clone(), id);
    let kind = match t.kind {
        TypeKind::Class => DeclKind::Class,
        TypeKind::Interface => DeclKind::Interface,
        TypeKind::Enum => DeclKind::Enum,
    };
    decls.push(DeclEntry {
        id,
        kind,
        name: t.name.clone(),
        key: key.clone(),
        container,
        is_stub,
        is_static: t.modifiers.is_static || container.is_none(),
        is_abstract: t.modifiers.is_abstract || t.kind == TypeKind::Interface,
        loc: DeclLoc::Type(tpath.clone()),
        span: t.span,
        children: Vec::new(),
    });
    let mut children = Vec::new();
    let add = |decls: &mut Vec<DeclEntry>, by_key: &mut HashMap<String, DeclId>, children: &mut Vec<DeclId>, mut e: DeclEntry| {
        if by_key.contains_key(&e.key) {
            return Err(FrontendError::DuplicateMember { key: e.key });
        }
        e.id = DeclId(decls.len() as u32);
        by_key.insert(e.key.clone(), e.id);
        children.push(e.id);
        decls.push(e);
        Ok(())
    };
    let entry = |kind, name: &str, key: String, loc, span, is_static, is_abstract| DeclEntry {
        id: DeclId::UNSET,
        kind,
        name: name.to_string(),
        key,
        container: Some(id),
        is_stub,
        is_static,
        is_abstract,
        loc,
        span,
        children: Vec::new(),
    };
    for (ci, c) in t.enum_constants.iter().enumerate() {
        add(
            decls,
            by_key,
            &mut children,
            entry(
                DeclKind::EnumConstant,
                &c.name,
                format!("{key}#{}", c.name),
                DeclLoc::EnumConstant(tpath.clone(), ci),
                c.span,
                true,
                false,
            ),
        )?;
    }
    for (mi, m) in t.members.iter().enumerate() {
        let loc = DeclLoc::Member(tpath.clone(), mi);
        match m {
            Member::Field(f) => add(
                decls,
                by_key,
                &mut children,
                entry(
                    DeclKind::Field,
                    &f.name,
                    format!("{key}#{}", f.name),
                    loc,
                    f.span,
                    f.modifiers.is_static,
                    false,
                ),
            )?,
            Member::Method(md) => add(
                decls,
                by_key,
                &mut children,
                entry(
                    DeclKind::Method,
                    &md.name,
                    format!("{key}#{}({})", md.name, param_types(&md.params)),
                    loc,
                    md.span,
                    md.modifiers.is_static,
                    md.modifiers.is_abstract,
                ),
            )?,
            Member::Ctor(c) => add(
                decls,
                by_key,
                &mut children,
                entry(
                    DeclKind::Constructor,
                    "<init>",
                    format!("{key}#<init>({})", param_types(&c.params)),
                    loc,
                    c.span,
                    false,
                    false,
                ),
            )?,
            Member::Initializer(i) => add(
                decls,
                by_key,
                &mut children,
                entry(
                    DeclKind::Initializer,
                    "<clinit>",
                    format!("{key}#<clinit>"),
                    loc,
                    i.span,
                    true,
                    false,
                ),
            )?,
            Member::Type(inner) => {
                let mut chain = tpath.chain.clone();
                chain.push(mi);
                let inner_key = format!("{key}.{}", inner.name);
                if by_key.contains_key(&inner_key) {
                    return Err(FrontendError::DuplicateMember { key: inner_key });
                }
                let inner_id = index_type(
                    inner,
                    inner_key,
                    Some(id),
                    TypePath {
                        file: tpath.file,
                        chain,
                    },
                    is_stub,
                    decls,
                    by_key,
                    type_files,
                    path,
                )?;
                children.push(inner_id);
            }
        }
    }
    decls[id.index()].children = children;
    Ok(id)
}

fn mark_stub(t: &mut TypeDecl) {
    t.is_stub = true;
    for m in &mut t.members {
        if let Member::Type(inner) = m {
            mark_stub(inner);
        }
    }
}

fn invalid(f: &SourceFile, message: String) -> FrontendError {
    FrontendError::Invalid {
        path: f.path.clone(),
        message,
    }
}

fn validate(f: &SourceFile) -> Result<(), FrontendError> {
    if !f.is_stub {
        let public: Vec<_> = f.unit.types.iter().filter(|t| t.modifiers.public).collect();
        if public.len() > 1 {
            return Err(invalid(f, "more than one public top-level type".into()));
        }
        if let Some(t) = public.first() {
            let stem = f.path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
            if stem != t.name {
                return Err(invalid(
                    f,
                    format!("public type `{}` must be declared in `{}.mj`", t.name, t.name),
                ));
            }
        }
    }
    for t in &f.unit.types {
        validate_type(f, t, true)?;
    }
    Ok(())
}

fn validate_type(f: &SourceFile, t: &TypeDecl, top: bool) -> Result<(), FrontendError> {
    let stub_body = |name: &str| FrontendError::StubWithBody {
        path: f.path.clone(),
        name: format!("{}.{name}", t.name),
    };
    if !top && !t.modifiers.is_static && t.kind == TypeKind::Class {
        return Err(invalid(f, format!("nested class `{}` must be static", t.name)));
    }
    let mut initializers = 0;
    for m in &t.members {
        match m {
            Member::Method(md) => {
                if f.is_stub {
                    if md.body.is_some() {
                        return Err(stub_body(&md.name));
                    }
                } else if md.body.is_none() && !md.modifiers.is_abstract {
                    return Err(invalid(f, format!("method `{}.{}` needs a body", t.name, md.name)));
                } else if md.body.is_some() && md.modifiers.is_abstract {
                    return Err(invalid(f, format!("abstract method `{}.{}` has a body", t.name, md.name)));
                }
                if md.modifiers.is_abstract && t.kind == TypeKind::Class && !t.modifiers.is_abstract && !f.is_stub {
                    return Err(invalid(
                        f,
                        format!("class `{}` declares abstract `{}` but is not abstract", t.name, md.name),
                    ));
                }
            }
            Member::Ctor(c) => {
                if t.kind != TypeKind::Class {
                    return Err(invalid(f, format!("`{}` cannot declare a constructor", t.name)));
                }
                if f.is_stub {
                    if c.body.is_some() {
                        return Err(stub_body("<init>"));
                    }
                } else if c.body.is_none() {
                    return Err(invalid(f, format!("constructor of `{}` needs a body", t.name)));
                }
            }
            Member::Field(fd) => {
                if f.is_stub && fd.init.is_some() {
                    return Err(stub_body(&fd.name));
                }
            }
            Member::Initializer(_) => {
                if f.is_stub {
                    return Err(stub_body("<clinit>"));
                }
                initializers += 1;
            }
            Member::Type(inner) => validate_type(f, inner, false)?,
        }
    }
    if initializers > 1 {
        return Err(invalid(f, format!("`{}` has more than one static initializer", t.name)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn src(files: &[(&str, &str)]) -> Vec<(PathBuf, String)> {
        files.iter().map(|(p, t)| (PathBuf::from(p), t.to_string())).collect()
    }

    #[test]
    fn two_units_four_types() {
        let p = Project::from_sources(
            "mem",
            src(&[
                ("I.mj", "interface I { default int getInt() { return 0; } } class A implements I { public int getInt() { return 1; } } class B implements I { public int getInt() { return 2; } }"),
                ("Main.mj", "public class Main { public static void main() {} }"),
            ]),
            vec![],
        )
        .unwrap();
        let units = p.files.iter().filter(|f| !f.is_stub).count();
        let types = p.project_decls().filter(|d| d.kind.is_type()).count();
        assert_eq!((units, types), (2, 4));
    }

    #[test]
    fn stub_types_are_body_less() {
        let stub = "package java.util; public interface Set<E> { Iterator<E> iterator(); }";
        let p = Project::from_sources("mem", vec![], src(&[("set.mjstub", stub)])).unwrap();
        let set = p.lookup("java.util.Set").unwrap();
        assert!(p.decl(set).is_stub);
        let it = p.lookup("java.util.Set#iterator()").unwrap();
        assert!(p.method(it).body.is_none());
    }

    #[test]
    fn duplicate_types_are_rejected() {
        let r = Project::from_sources(
            "mem",
            src(&[("a/A.mj", "package p; class A {}"), ("b/A.mj", "package p; class A {}")]),
            vec![],
        );
        assert!(matches!(r, Err(FrontendError::DuplicateType { name, .. }) if name == "p.A"));
    }

    #[test]
    fn stub_with_body_is_rejected() {
        let r = Project::from_sources("mem", vec![], src(&[("x.mjstub", "class X { int f() { return 1; } }")]));
        assert!(matches!(r, Err(FrontendError::StubWithBody { .. })));
    }

    #[test]
    fn public_type_must_match_file_name() {
        let r = Project::from_sources("mem", src(&[("B.mj", "public class A {}")]), vec![]);
        assert!(matches!(r, Err(FrontendError::Invalid { .. })));
    }

    #[test]
    fn member_keys() {
        let p = Project::from_sources(
            "mem",
            src(&[(
                "p/C.mj",
                "package p; public class C { int x; static { x = 1; } C(int a) {} void m(int a, String b) {} static class N {} }",
            )]),
            vec![],
        )
        .unwrap();
        for key in ["p.C", "p.C#x", "p.C#<clinit>", "p.C#<init>(int)", "p.C#m(int, String)", "p.C.N"] {
            assert!(p.lookup(key).is_some(), "{key}");
        }
        let m = p.lookup("p.C#m(int, String)").unwrap();
        assert_eq!(p.decl(m).signature(), "p.C.m(int, String)");
        assert_eq!(p.method(m).id, m);
    }
}
