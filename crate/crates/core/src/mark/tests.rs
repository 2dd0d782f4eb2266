use std::path::{Path, PathBuf};

use super::*;
use crate::error::MarkError;
use crate::frontend::load_project;
use crate::semantics::{build_symbol_table, render, VarId};

fn mem(files: &[(&str, &str)]) -> Project {
    let sources = files.iter().map(|(p, t)| (PathBuf::from(p), t.to_string())).collect();
    Project::from_sources("mem", sources, vec![]).unwrap()
}

fn corpus(name: &str) -> Project {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name).join("src");
    load_project(&root, &[]).unwrap()
}

fn id(p: &Project, key: &str) -> DeclId {
    p.lookup(key).unwrap_or_else(|| panic!("no declaration {key}"))
}

fn entry(p: &Project, t: &SymbolTable, spec: &str) -> BTreeSet<DeclId> {
    collect_entrypoints(p, t, &[spec.parse().unwrap()], &LifecycleConfig::default()).unwrap()
}

fn keys(p: &Project, ids: impl IntoIterator<Item = DeclId>) -> BTreeSet<String> {
    ids.into_iter().map(|d| p.decl(d).key.clone()).collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

#[test]
fn spec_parsing() {
    let s: EntrypointSpec = "p.q.T#test1".parse().unwrap();
    assert_eq!((s.class.as_str(), s.method.as_deref()), ("p.q.T", Some("test1")));
    let s: EntrypointSpec = "Main".parse().unwrap();
    assert_eq!(s.method, None);
    assert!("p..T".parse::<EntrypointSpec>().is_err());
    assert!("T#".parse::<EntrypointSpec>().is_err());
    assert!("1T#x".parse::<EntrypointSpec>().is_err());
}

#[test]
fn lifecycle_file_format() {
    let c = LifecycleConfig::parse("# harness\nbefore\n\n<init>()  # ctor\n");
    assert_eq!(c.patterns, ["before", "<init>()"]);
}

#[test]
fn named_method_entrypoint() {
    let p = corpus("listing2");
    let t = build_symbol_table(&p).unwrap();
    assert_eq!(keys(&p, entry(&p, &t, "Main#f")), set(&["Main#f(I)"]));
}

#[test]
fn lifecycle_members_of_test_class_and_superclass() {
    let p = mem(&[
        ("Base.mj", "public class Base { Base() {} Base(int x) {} void setUp() {} void helper() {} }"),
        (
            "T.mj",
            "public class T extends Base { T() {} void setUp() {} void tearDown(int x) {} @Test void test1() {} @Test void test2() {} }",
        ),
    ]);
    let t = build_symbol_table(&p).unwrap();
    // lifecycle patterns {setUp, tearDown, <init>(), <clinit>} over {T, Base}:
    // T has setUp, tearDown(int), T(); Base has setUp, Base(); no initializers.
    let expected = set(&[
        "T#test1()",
        "T#setUp()",
        "T#tearDown(int)",
        "T#<init>()",
        "Base#setUp()",
        "Base#<init>()",
    ]);
    assert_eq!(keys(&p, entry(&p, &t, "T#test1")), expected);
}

#[test]
fn whole_class_spec_takes_test_methods() {
    let p = mem(&[("T.mj", "public class T { @Test void a() {} @Test void b() {} void c() {} }")]);
    let t = build_symbol_table(&p).unwrap();
    assert_eq!(keys(&p, entry(&p, &t, "T")), set(&["T#a()", "T#b()"]));
}

#[test]
fn unknown_entrypoint() {
    let p = corpus("listing2");
    let t = build_symbol_table(&p).unwrap();
    let r = collect_entrypoints(&p, &t, &["Nope#x".parse().unwrap()], &LifecycleConfig::default());
    assert!(matches!(r, Err(MarkError::EntrypointNotFound(s)) if s == "Nope#x"));
    let r = collect_entrypoints(&p, &t, &["Main#nope".parse().unwrap()], &LifecycleConfig::default());
    assert!(matches!(r, Err(MarkError::EntrypointNotFound(_))));
    let r = collect_entrypoints(&p, &t, &[], &LifecycleConfig::default());
    assert!(matches!(r, Err(MarkError::NoEntrypoints)));
}

fn site_in(t: &SymbolTable, owner: DeclId) -> usize {
    t.call_sites.iter().position(|c| c.owner == owner).unwrap()
}

#[test]
fn listing2_open_parameter_cone() {
    let p = corpus("listing2");
    let t = build_symbol_table(&p).unwrap();
    let e = entry(&p, &t, "Main#f");
    let m = mark(&p, &t, &e);
    let site = site_in(&t, id(&p, "Main#f(I)"));
    let cone = &m.cones[&site];
    assert!(cone.open);
    let targets = dynamic_targets(&p, &t, site, cone);
    assert_eq!(keys(&p, targets), set(&["I#getInt()", "A#getInt()", "B#getInt()"]));
}

#[test]
fn listing2_from_main() {
    let p = corpus("listing2");
    let t = build_symbol_table(&p).unwrap();
    let m = mark(&p, &t, &entry(&p, &t, "Main#main"));
    let site = site_in(&t, id(&p, "Main#f(I)"));
    assert_eq!(m.cones[&site].types, [TypeRef::class(id(&p, "A"), vec![])]);
    assert!(!m.cones[&site].open);
    let direct = |k: &str| m.get(id(&p, k)).map(|x| x.directness);
    assert_eq!(direct("I#getInt()"), Some(Directness::Direct));
    assert_eq!(direct("A#getInt()"), Some(Directness::Transitive));
    assert_eq!(direct("Main#f(I)"), Some(Directness::Direct));
    assert_eq!(direct("B#getInt()"), None);
    assert_eq!(direct("B"), None);
    let reasons = &m.get(id(&p, "A#getInt()")).unwrap().reasons;
    assert!(reasons.contains(&ReasonEdge {
        category: Reason::DynamicCallTarget,
        from: id(&p, "Main#f(I)"),
        to: id(&p, "A#getInt()"),
    }));
}

#[test]
fn lone_entrypoint_marks_its_class_and_constructors() {
    let p = mem(&[("C.mj", "public class C { C() {} C(int x) {} void t() {} void other() {} }")]);
    let t = build_symbol_table(&p).unwrap();
    let m = mark(&p, &t, &entry(&p, &t, "C#t"));
    assert_eq!(keys(&p, m.marked()), set(&["C", "C#t()", "C#<init>()", "C#<init>(int)"]));
}

#[test]
fn explicit_super_call_delegates_to_matching_constructor_only() {
    let p = mem(&[
        ("A.mj", "public class A { A() {} A(int x) {} }"),
        ("B.mj", "public class B extends A { B() { super(1); } static void t() { new B(); } }"),
    ]);
    let t = build_symbol_table(&p).unwrap();
    let none = LifecycleConfig { patterns: vec![] };
    let e = collect_entrypoints(&p, &t, &["B#t".parse().unwrap()], &none).unwrap();
    let m = mark(&p, &t, &e);
    let deleg_from_ctor = |k: &str| {
        m.get(id(&p, k))
            .unwrap()
            .reasons
            .iter()
            .any(|e| e.category == Reason::ConstructorDelegation && e.from == id(&p, "B#<init>()"))
    };
    assert!(deleg_from_ctor("A#<init>(int)"));
    assert!(!deleg_from_ctor("A#<init>()"));
    let a0 = m.get(id(&p, "A#<init>()")).unwrap();
    assert_eq!(a0.directness, Directness::Transitive);
    assert!(a0.reasons.iter().all(|e| e.from == id(&p, "A")));
}

#[test]
fn generic_field_cone_is_filtered_at_use_site() {
    let p = corpus("listing3");
    let t = build_symbol_table(&p).unwrap();
    let m = mark(&p, &t, &entry(&p, &t, "Main#main"));
    let first = id(&p, "Pair#first");
    let sets = AssignedSets::compute(&t, &BTreeSet::new());
    let all: BTreeSet<String> = sets.get(&VarId::Field(first)).types.iter().map(|x| render(x, &p)).collect();
    assert_eq!(all, set(&["HashSet<Object>", "HashSet<String>"]));
    let site = t
        .call_sites
        .iter()
        .position(|c| matches!(&c.receiver, ValueSource::Var(VarId::Field(f), _) if *f == first))
        .unwrap();
    let cone = &m.cones[&site];
    assert!(!cone.open);
    let rendered: Vec<String> = cone.types.iter().map(|x| render(x, &p)).collect();
    assert_eq!(rendered, ["HashSet<Object>"]);
}

#[test]
fn primitive_local_has_empty_closed_set() {
    let p = mem(&[("C.mj", "public class C { static void t() { int x = 1; x = 2; } }")]);
    let t = build_symbol_table(&p).unwrap();
    let fact = t.facts.iter().find(|f| matches!(f.target, VarId::Local(_))).unwrap();
    let sets = AssignedSets::compute(&t, &BTreeSet::new());
    assert_eq!(sets.get(&fact.target), AssignedTypeSet::default());
}

#[test]
fn parameter_from_library_return_is_open() {
    let p = mem(&[(
        "C.mj",
        "import java.util.*; public class C { static void f(Object o) {} static void g(List<Object> l) { f(l.get(0)); } static void h() { f(new C()); } }",
    )]);
    let t = build_symbol_table(&p).unwrap();
    let sets = AssignedSets::compute(&t, &BTreeSet::new());
    let s = sets.get(&VarId::Param(id(&p, "C#f(Object)"), 0));
    assert!(s.open);
    assert_eq!(s.types, [TypeRef::class(id(&p, "C"), vec![])]);
}

#[test]
fn listing5_first_pass_cone() {
    let p = corpus("listing5");
    let t = build_symbol_table(&p).unwrap();
    let m = mark(&p, &t, &entry(&p, &t, "Main#main"));
    let site = site_in(&t, id(&p, "Main#call(Abstract)"));
    let cone = &m.cones[&site];
    assert!(cone.open);
    let targets = dynamic_targets(&p, &t, site, cone);
    assert_eq!(
        keys(&p, targets),
        set(&["Abstract#f()", "AbstractImpl1#f()", "AbstractImpl2#f()"])
    );
    for k in ["A", "B", "A#g()", "B#g()", "AbstractImpl2"] {
        assert!(m.is_marked(id(&p, k)), "{k}");
    }
}

#[test]
fn library_overrides_in_marked_classes() {
    let p = mem(&[(
        "C.mj",
        "public class C { public String toString() { return \"c\"; } public int hashCode() { return 1; } void unused() {} static void t() { new C(); } }",
    )]);
    let t = build_symbol_table(&p).unwrap();
    let m = mark(&p, &t, &entry(&p, &t, "C#t"));
    assert!(m.is_marked(id(&p, "C#toString()")));
    assert!(m.is_marked(id(&p, "C#hashCode()")));
    assert!(!m.is_marked(id(&p, "C#unused()")));
}

#[test]
fn edges_start_at_marked_declarations() {
    for name in ["listing2", "listing3", "listing4", "listing5"] {
        let p = corpus(name);
        let t = build_symbol_table(&p).unwrap();
        let m = mark(&p, &t, &entry(&p, &t, "Main#main"));
        for e in &m.edges {
            assert!(m.is_marked(e.from) && m.is_marked(e.to), "{name}: {e:?}");
        }
        for mk in m.marks.values() {
            assert!(mk.entrypoint || !mk.reasons.is_empty());
        }
    }
}
