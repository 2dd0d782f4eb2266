use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use super::*;
use crate::frontend::load_project;
use crate::mark::{collect_entrypoints, mark, LifecycleConfig};
use crate::semantics::build_symbol_table;

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

fn run(p: &Project, spec: &str) -> (Marks, Sweep) {
    let t = build_symbol_table(p).unwrap();
    let e = collect_entrypoints(p, &t, &[spec.parse().unwrap()], &LifecycleConfig::default()).unwrap();
    let m = mark(p, &t, &e);
    let s = decide(p, &t, &m, &build_reachability_graph(&m));
    (m, s)
}

fn d(n: u32) -> DeclId {
    DeclId(n)
}

fn edge(from: u32, to: u32) -> ReasonEdge {
    ReasonEdge {
        category: Reason::ReferencedBySymbol,
        from: d(from),
        to: d(to),
    }
}

#[test]
fn single_entrypoint_graph() {
    let g = ReachabilityGraph::new(BTreeSet::from([d(0)]), BTreeSet::from([d(0)]), []);
    assert_eq!(g.nodes.len(), 1);
    assert_eq!(g.edge_count(), 0);
    assert!(trace(&g, d(0)));
}

#[test]
fn unsupported_cycle_is_not_needed() {
    let nodes = BTreeSet::from([d(0), d(1), d(2)]);
    let g = ReachabilityGraph::new(nodes, BTreeSet::from([d(0)]), [edge(1, 2), edge(2, 1)]);
    assert!(!trace(&g, d(1)));
    assert!(!trace(&g, d(2)));
    assert!(g.in_edges(d(1)).iter().all(|e| e.from == d(2)));
}

#[test]
fn chain_and_supported_cycle() {
    let nodes = BTreeSet::from([d(0), d(1), d(2), d(3)]);
    let g = ReachabilityGraph::new(nodes, BTreeSet::from([d(0)]), [edge(0, 1), edge(1, 2), edge(2, 3), edge(3, 1)]);
    assert_eq!(g.needed(&HashSet::new()).len(), 4);
    let cut: HashSet<DeclId> = [d(1)].into();
    assert_eq!(g.needed(&cut), BTreeSet::from([d(0), d(1)]));
}

#[test]
fn listing2_dynamic_edges_from_call_owner() {
    let p = corpus("listing2");
    let t = build_symbol_table(&p).unwrap();
    let e = collect_entrypoints(&p, &t, &["Main#f".parse().unwrap()], &LifecycleConfig::default()).unwrap();
    let g = build_reachability_graph(&mark(&p, &t, &e));
    for k in ["A#getInt()", "B#getInt()"] {
        assert!(g
            .in_edges(id(&p, k))
            .iter()
            .any(|e| e.category == Reason::DynamicCallTarget && e.from == id(&p, "Main#f(I)")));
    }
}

#[test]
fn listing2_default_method_is_dummied() {
    let p = corpus("listing2");
    let (_, s) = run(&p, "Main#main");
    let v = |k: &str| s.verdict(id(&p, k));
    assert_eq!(v("I#getInt()"), Verdict::Dummy);
    assert_eq!(v("A#getInt()"), Verdict::NoOp);
    assert_eq!(v("Main#f(I)"), Verdict::NoOp);
    assert_eq!(v("I"), Verdict::NoOp);
    assert_eq!(v("B"), Verdict::Remove);
    assert_eq!(v("B#getInt()"), Verdict::Remove);
}

#[test]
fn listing5_first_pass() {
    let p = corpus("listing5");
    let (_, s) = run(&p, "Main#main");
    let v = |k: &str| s.verdict(id(&p, k));
    assert_eq!(v("AbstractImpl2#f()"), Verdict::Dummy);
    assert_eq!(v("AbstractImpl1#f()"), Verdict::NoOp);
    assert_eq!(v("Abstract#f()"), Verdict::NoOp);
    assert_eq!(v("B"), Verdict::NoOp);
    assert_eq!(v("B#g()"), Verdict::NoOp);
    assert!(s.instantiated.contains(&id(&p, "AbstractImpl1")));
    assert!(!s.instantiated.contains(&id(&p, "AbstractImpl2")));
    // the abstract base is constructed through its subclass
    assert!(s.instantiated.contains(&id(&p, "Abstract")));
}

#[test]
fn unreferenced_class_is_removed_whole() {
    let p = mem(&[
        ("M.mj", "public class M { static void t() {} }"),
        ("C.mj", "public class C { int x; C() {} void m() {} }"),
    ]);
    let (_, s) = run(&p, "M#t");
    for k in ["C", "C#x", "C#<init>()", "C#m()"] {
        assert_eq!(s.verdict(id(&p, k)), Verdict::Remove, "{k}");
    }
}

#[test]
fn creation_only_in_uncalled_code_does_not_instantiate() {
    let p = mem(&[(
        "C.mj",
        "public class C { C() {} void m() {} static void t() { } static void u() { new C().m(); } }",
    )]);
    let (_, s) = run(&p, "C#t");
    assert!(!s.instantiated.contains(&id(&p, "C")));
    // still a lifecycle entrypoint of the test class
    assert_eq!(s.verdict(id(&p, "C#<init>()")), Verdict::NoOp);
}

#[test]
fn one_constructor_kept_when_super_has_no_default() {
    let p = mem(&[
        ("A.mj", "public class A { A(int x) {} }"),
        (
            "B.mj",
            "public class B extends A { B(int x) { super(x); } B() { super(0); } static void s() {} }",
        ),
        ("M.mj", "public class M { static void t() { B.s(); } }"),
    ]);
    let (_, s) = run(&p, "M#t");
    assert_eq!(s.verdict(id(&p, "B#<init>()")), Verdict::Dummy);
    assert_eq!(s.verdict(id(&p, "B#<init>(int)")), Verdict::Remove);
    assert_eq!(s.verdict(id(&p, "A#<init>(int)")), Verdict::NoOp);
}

#[test]
fn constructors_dropped_when_implicit_super_works() {
    let p = mem(&[
        ("B.mj", "public class B { B(int x) { } static void s() {} }"),
        ("M.mj", "public class M { static void t() { B.s(); } }"),
    ]);
    let (_, s) = run(&p, "M#t");
    assert_eq!(s.verdict(id(&p, "B#<init>(int)")), Verdict::Remove);
}

#[test]
fn abstract_obligation_keeps_unused_implementation() {
    let p = mem(&[
        ("X.mj", "public abstract class X { abstract int f(); }"),
        ("Y.mj", "public class Y extends X { int f() { return 1; } static int g() { return 2; } }"),
        ("M.mj", "public class M { static void t(X x) { x.f(); Y.g(); } }"),
    ]);
    let (_, s) = run(&p, "M#t");
    assert_eq!(s.verdict(id(&p, "X#f()")), Verdict::NoOp);
    assert_eq!(s.verdict(id(&p, "Y#f()")), Verdict::Dummy);
}

#[test]
fn every_declaration_has_one_verdict() {
    for name in ["listing2", "listing3", "listing4", "listing5"] {
        let p = corpus(name);
        let (_, s) = run(&p, "Main#main");
        let all: BTreeSet<DeclId> = p.project_decls().map(|d| d.id).collect();
        let decided: BTreeSet<DeclId> = s.decisions.keys().copied().collect();
        assert_eq!(all, decided, "{name}");
    }
}

#[test]
fn removed_symbols_are_not_referenced_by_retained_code() {
    for name in ["listing2", "listing3", "listing4", "listing5"] {
        let p = corpus(name);
        let t = build_symbol_table(&p).unwrap();
        let (_, s) = run(&p, "Main#main");
        for (d, dec) in &s.decisions {
            if dec.verdict != Verdict::NoOp {
                continue;
            }
            for r in t.refs_of(*d) {
                if !p.decl(r.target).is_stub {
                    assert!(s.verdict(r.target).retained(), "{name}: {} -> {}", p.decl(*d).key, p.decl(r.target).key);
                }
            }
        }
    }
}
