use std::path::{Path, PathBuf};

use super::*;
use crate::frontend::load_project;
use crate::frontend::normalize::structurally_equal;
use crate::mark::{collect_entrypoints, mark, LifecycleConfig};
use crate::semantics::{build_lenient, build_symbol_table};
use crate::sweep::{build_reachability_graph, decide, SweepDecision};

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

fn minimize(p: &Project, spec: &str) -> (SymbolTable, Decisions) {
    let t = build_lenient(p);
    let e = collect_entrypoints(p, &t, &[spec.parse().unwrap()], &LifecycleConfig::default()).unwrap();
    let m = mark(p, &t, &e);
    let s = decide(p, &t, &m, &build_reachability_graph(&m));
    (t, s.decisions)
}

fn source<'a>(e: &'a Emitted, file: &str) -> Option<&'a str> {
    e.sources
        .iter()
        .find(|(p, _)| p.to_str() == Some(file))
        .map(|(_, s)| s.as_str())
}

fn only(p: &Project, key: &str, v: Verdict) -> Decisions {
    let d = id(p, key);
    Decisions::from([(d, SweepDecision::new(d, v, "test"))])
}

#[test]
fn listing2_output() {
    let p = corpus("listing2");
    let (t, d) = minimize(&p, "Main#main");
    let out = apply(&p, &t, &d, DummyMode::Assert).unwrap();
    assert!(source(&out, "B.mj").is_none());
    let i = source(&out, "I.mj").unwrap();
    assert!(i.contains("throw new java.lang.AssertionError(\"I.getInt()\");"), "{i}");
    build_symbol_table(&out.project).unwrap();
    assert!(manifest(&p, &d).lines().any(|l| l == "DUMMY I#getInt()"));
}

#[test]
fn no_decisions_reproduce_the_input() {
    for name in ["listing2", "listing3", "listing4", "listing5"] {
        let p = corpus(name);
        let t = build_symbol_table(&p).unwrap();
        let out = apply(&p, &t, &Decisions::new(), DummyMode::Assert).unwrap();
        let before: Vec<_> = p.files.iter().filter(|f| !f.is_stub).collect();
        let after: Vec<_> = out.project.files.iter().filter(|f| !f.is_stub).collect();
        assert_eq!(before.len(), after.len());
        for (a, b) in before.iter().zip(&after) {
            assert!(structurally_equal(&a.unit, &b.unit), "{name}: {}", a.path.display());
        }
    }
}

#[test]
fn error_in_removed_method_disappears() {
    let p = mem(&[
        ("M.mj", "public class M { static void t() { ok(); } static void ok() {} static void bad() { Missing.go(); } }"),
    ]);
    assert!(build_symbol_table(&p).is_err());
    let (t, d) = minimize(&p, "M#t");
    let out = apply(&p, &t, &d, DummyMode::Assert).unwrap();
    build_symbol_table(&out.project).unwrap();
}

#[test]
fn dummy_bodies() {
    let p = mem(&[
        ("I.mj", "public interface I { default int getInt() { return 1; } }"),
        ("R.mj", "public class R { void reset() { reset(); } String name() { return \"r\"; } }"),
        ("A.mj", "public class A { A(int x) {} A(String s) {} }"),
        ("B.mj", "public class B extends A { B() { super(5); } }"),
    ]);
    let t = build_symbol_table(&p).unwrap();
    let show = |b: Block| {
        let mut unit = p.files.iter().find(|f| f.path.to_str() == Some("R.mj")).unwrap().unit.clone();
        if let Member::Method(m) = &mut unit.types[0].members[0] {
            m.body = Some(b);
        }
        let s = print_unit(&unit);
        s[s.find("reset()").unwrap()..s.find("String name").unwrap()].split_whitespace().collect::<Vec<_>>().join(" ")
    };
    let b = dummy_body(&p, &t, id(&p, "I#getInt()"), DummyMode::Assert);
    assert_eq!(show(b), "reset() { throw new java.lang.AssertionError(\"I.getInt()\"); }");
    let b = dummy_body(&p, &t, id(&p, "R#reset()"), DummyMode::Empty);
    assert!(b.stmts.is_empty());
    let b = dummy_body(&p, &t, id(&p, "R#name()"), DummyMode::Empty);
    assert_eq!(show(b), "reset() { return (java.lang.String) null; }");
    let b = dummy_body(&p, &t, id(&p, "B#<init>()"), DummyMode::Assert);
    assert_eq!(show(b), "reset() { super(0); throw new java.lang.AssertionError(\"B.<init>()\"); }");
}

#[test]
fn dummied_constructor_resolves() {
    let p = mem(&[
        ("A.mj", "public class A { A(int x) {} A(String s) {} }"),
        ("B.mj", "public class B extends A { B(String s) { super(s); } static void t() {} }"),
    ]);
    let t = build_symbol_table(&p).unwrap();
    let out = apply(&p, &t, &only(&p, "B#<init>(String)", Verdict::Dummy), DummyMode::Assert).unwrap();
    assert!(source(&out, "B.mj").unwrap().contains("super((java.lang.String) null);"));
    build_symbol_table(&out.project).unwrap();
}

#[test]
fn dangling_reference_is_rejected() {
    let p = mem(&[("C.mj", "public class C { static void a() { b(); } static void b() {} }")]);
    let t = build_symbol_table(&p).unwrap();
    let r = apply(&p, &t, &only(&p, "C#b()", Verdict::Remove), DummyMode::Assert);
    assert!(matches!(r, Err(Error::Emit(EmitError::Consistency(_)))));
}

#[test]
fn unused_imports_are_pruned() {
    let p = mem(&[(
        "C.mj",
        "import java.util.List;\nimport java.util.Set;\npublic class C { static void a(List<String> l) {} static void b(Set<String> s) {} }",
    )]);
    let t = build_symbol_table(&p).unwrap();
    let out = apply(&p, &t, &only(&p, "C#b(Set<String>)", Verdict::Remove), DummyMode::Assert).unwrap();
    let s = source(&out, "C.mj").unwrap();
    assert!(s.contains("import java.util.List;"));
    assert!(!s.contains("import java.util.Set;"));
}

#[test]
fn emission_is_idempotent() {
    for name in ["listing2", "listing5"] {
        let p = corpus(name);
        let (t, d) = minimize(&p, "Main#main");
        let once = apply(&p, &t, &d, DummyMode::Assert).unwrap();
        let t2 = build_symbol_table(&once.project).unwrap();
        let twice = apply(&once.project, &t2, &Decisions::new(), DummyMode::Assert).unwrap();
        assert_eq!(once.sources, twice.sources);
    }
}

#[test]
fn dummy_keeps_signature() {
    let p = corpus("listing5");
    let (t, d) = minimize(&p, "Main#main");
    let out = apply(&p, &t, &d, DummyMode::Assert).unwrap();
    let key = "AbstractImpl2#f()";
    let (a, b) = (p.method(id(&p, key)), out.project.method(id(&out.project, key)));
    assert_eq!((&a.name, &a.params, &a.ret, a.modifiers), (&b.name, &b.params, &b.ret, b.modifiers));
}

#[test]
fn manifest_round_trip() {
    let p = corpus("listing5");
    let (_, d) = minimize(&p, "Main#main");
    let text = manifest(&p, &d);
    let parsed = parse_manifest(&text).unwrap();
    assert!(parsed.contains(&(Verdict::Dummy, "AbstractImpl2#f()".into())));
    assert_eq!(parsed.len(), text.lines().count());
    assert!(parse_manifest("KEEP x").is_err());
}

#[test]
fn tree_is_replaced_whole() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("min");
    write_tree(&out, &[(PathBuf::from("a/A.mj"), "x".into())]).unwrap();
    write_tree(&out, &[(PathBuf::from("B.mj"), "y".into())]).unwrap();
    assert!(!out.join("a/A.mj").exists());
    assert_eq!(fs::read_to_string(out.join("B.mj")).unwrap(), "y");
    let leftovers: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(leftovers.len(), 1);
}
