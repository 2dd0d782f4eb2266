use std::path::{Path, PathBuf};

use super::*;
use crate::frontend::visit::member_exprs;
use crate::frontend::{expr_to_string, load_project};

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

/// Rendered type of each expression in `decl`, keyed by its source text.
fn types_by_text(p: &Project, t: &SymbolTable, decl: DeclId, mode: SolveMode) -> HashMap<String, String> {
    let types = solve_expr_types(p, t, decl, mode);
    member_exprs(p.member(decl))
        .into_iter()
        .filter_map(|e| types.get(&e.id).map(|ty| (expr_to_string(e), render(ty, p))))
        .collect()
}

#[test]
fn listing2_static_target_and_override_links() {
    let p = corpus("listing2");
    let t = build_symbol_table(&p).unwrap();
    let f = id(&p, "Main#f(I)");
    let i_get = id(&p, "I#getInt()");
    let site = t.call_sites.iter().find(|c| c.owner == f).unwrap();
    assert_eq!(site.target, i_get);
    assert_eq!(site.kind, CallKind::Virtual);
    for impl_key in ["A#getInt()", "B#getInt()"] {
        let m = id(&p, impl_key);
        assert_eq!(t.overrides(m), &[i_get]);
        assert!(t.overridden_by(i_get).contains(&m));
    }
}

#[test]
fn empty_project_has_nothing_to_resolve() {
    let p = mem(&[]);
    let t = build_symbol_table(&p).unwrap();
    assert!(t.call_sites.is_empty());
    assert!(t.facts.is_empty());
    assert!(p.project_decls().all(|d| t.refs_of(d.id).is_empty()));
}

#[test]
fn undeclared_type_is_reported_by_name() {
    let p = mem(&[("A.mj", "class A { void m() { Foo x = null; } }")]);
    match build_symbol_table(&p) {
        Err(SemanticError::Unresolved(d)) => {
            assert_eq!(d.len(), 1);
            assert_eq!(d[0].name, "Foo");
            assert_eq!(d[0].path, PathBuf::from("A.mj"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn all_unresolved_names_are_collected() {
    let p = mem(&[("A.mj", "class A { void m() { Foo.bar(); } int n() { return missing; } }")]);
    let Err(SemanticError::Unresolved(d)) = build_symbol_table(&p) else { panic!() };
    let names: Vec<_> = d.iter().map(|x| x.name.as_str()).collect();
    assert_eq!(names, ["Foo", "missing"]);
}

#[test]
fn lenient_build_attaches_problems_to_owners() {
    let p = mem(&[("A.mj", "class A { void ok() {} void bad() { undefinedCall(); } }")]);
    let t = build_lenient(&p);
    let owners: Vec<_> = t.problems.iter().map(|x| x.owner).collect();
    assert_eq!(owners, [Some(id(&p, "A#bad()"))]);
}

#[test]
fn int_argument_selects_int_overload() {
    let p = mem(&[(
        "C.mj",
        "class C { static void f(int x) {} static void f(double x) {} static void f(String s) {} void g() { f(1); } }",
    )]);
    let t = build_symbol_table(&p).unwrap();
    let g = id(&p, "C#g()");
    let calls: Vec<_> = t.refs_of(g).iter().filter(|r| r.kind == RefKind::StaticCall).collect();
    assert_eq!(calls.len(), 1);
    assert_eq!(calls[0].target, id(&p, "C#f(int)"));
}

#[test]
fn only_overload_is_selected() {
    let p = mem(&[("C.mj", "class C { static void f(int x) {} void g() { f(1); } }")]);
    let t = build_symbol_table(&p).unwrap();
    let g = id(&p, "C#g()");
    assert_eq!(t.refs_of(g)[0].target, id(&p, "C#f(int)"));
}

#[test]
fn incomparable_overloads_are_ambiguous() {
    // C implements both A and B; neither A <: B nor B <: A, so f(A) and
    // f(B) both apply and neither is more specific.
    let p = mem(&[(
        "T.mj",
        "interface A {} interface B {} class C implements A, B {} \
         class T { static void f(A a) {} static void f(B b) {} static void g() { f(new C()); } }",
    )]);
    match build_symbol_table(&p) {
        Err(SemanticError::AmbiguousOverload { name, candidates, .. }) => {
            assert_eq!(name, "f");
            assert_eq!(candidates, ["f(A)", "f(B)"]);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn subtype_overload_breaks_the_tie() {
    let p = mem(&[(
        "T.mj",
        "interface A {} interface B extends A {} class C implements B {} \
         class T { static void f(A a) {} static void f(B b) {} static void g() { f(new C()); } }",
    )]);
    let t = build_symbol_table(&p).unwrap();
    let g = id(&p, "T#g()");
    let call = t.refs_of(g).iter().find(|r| r.kind == RefKind::StaticCall).unwrap();
    assert_eq!(call.target, id(&p, "T#f(B)"));
}

#[test]
fn wrong_arity_has_no_applicable_method() {
    let p = mem(&[("C.mj", "class C { static void f(int x) {} void g() { f(1, 2); } }")]);
    assert!(matches!(
        build_symbol_table(&p),
        Err(SemanticError::NoApplicableMethod { name, .. }) if name == "f"
    ));
}

#[test]
fn no_autoboxing() {
    let p = mem(&[("C.mj", "class C { static void f(Object x) {} void g() { f(1); } }")]);
    assert!(matches!(build_symbol_table(&p), Err(SemanticError::NoApplicableMethod { .. })));
}

#[test]
fn chained_generics_solved_column() {
    let p = corpus("listing4");
    let t = build_symbol_table(&p).unwrap();
    let m = id(&p, "EnumTypes#firstKeyType(EnumMap<?, ?>)");
    let types = types_by_text(&p, &t, m, SolveMode::Solved);
    assert_eq!(types["m"], "EnumMap<?, ?>");
    assert_eq!(types["m.keySet()"], "Set<? extends Enum<?>>");
    assert_eq!(types["m.keySet().iterator()"], "Iterator<? extends Enum<?>>");
    assert_eq!(types["m.keySet().iterator().next()"], "Enum<?>");
}

#[test]
fn chained_generics_naive_column() {
    let p = corpus("listing4");
    let t = build_symbol_table(&p).unwrap();
    let m = id(&p, "EnumTypes#firstKeyType(EnumMap<?, ?>)");
    let types = types_by_text(&p, &t, m, SolveMode::Naive);
    assert_eq!(types["m"], "EnumMap<?, ?>");
    assert_eq!(types["m.keySet()"], "Set<?>");
    assert_eq!(types["m.keySet().iterator()"], "Iterator<?>");
    assert_eq!(types["m.keySet().iterator().next()"], "? extends Object");
}

#[test]
fn solved_argument_selects_enum_overload() {
    let p = corpus("listing4");
    let t = build_symbol_table(&p).unwrap();
    let m = id(&p, "EnumTypes#firstKeyType(EnumMap<?, ?>)");
    let call = t.refs_of(m).iter().find(|r| r.kind == RefKind::StaticCall).unwrap();
    assert_eq!(p.decl(call.target).key, "EnumTypes#findEnumType(Enum<?>)");
}

#[test]
fn generic_field_use_site_type() {
    let p = corpus("listing3");
    let t = build_symbol_table(&p).unwrap();
    let main = id(&p, "Main#main()");
    let types = types_by_text(&p, &t, main, SolveMode::Solved);
    assert_eq!(types["pair1.first"], "Set<Object>");
    assert_eq!(types["pair2.second"], "Set<Object>");
    assert_eq!(types["pair1"], "Pair<Set<Object>, Set<String>>");
}

#[test]
fn primitive_type_argument_is_rejected() {
    let p = mem(&[("A.mj", "import java.util.*; class A { Map<int, String> m; }")]);
    assert!(matches!(build_symbol_table(&p), Err(SemanticError::TypeSolve { .. })));
}

#[test]
fn literal_types() {
    let p = mem(&[("A.mj", "class A { void m() { int a = 1; boolean b = true; String s = \"x\"; double d = 1.5; } }")]);
    let t = build_symbol_table(&p).unwrap();
    let types = types_by_text(&p, &t, id(&p, "A#m()"), SolveMode::Solved);
    assert_eq!(types["1"], "int");
    assert_eq!(types["true"], "boolean");
    assert_eq!(types["\"x\""], "String");
    assert_eq!(types["1.5"], "double");
}

#[test]
fn ambiguous_on_demand_import() {
    let p = mem(&[
        ("p/X.mj", "package p; public class X {}"),
        ("q/X.mj", "package q; public class X {}"),
        ("r/U.mj", "package r; import p.*; import q.*; class U { X x; }"),
    ]);
    assert!(matches!(build_symbol_table(&p), Err(SemanticError::AmbiguousName { name, .. }) if name == "X"));
}

#[test]
fn single_import_beats_on_demand() {
    let p = mem(&[
        ("p/X.mj", "package p; public class X {}"),
        ("q/X.mj", "package q; public class X {}"),
        ("r/U.mj", "package r; import p.*; import q.X; class U { X x; }"),
    ]);
    let t = build_symbol_table(&p).unwrap();
    let x = id(&p, "r.U#x");
    assert_eq!(t.field_type(x).and_then(TypeRef::class_decl), Some(id(&p, "q.X")));
}

#[test]
fn implicit_and_explicit_super_delegation() {
    let p = mem(&[(
        "A.mj",
        "class A { A() {} A(int x) {} } class B extends A { B() { super(1); } } class C extends A { C() {} } class D extends A {}",
    )]);
    let t = build_symbol_table(&p).unwrap();
    let deleg = |k: &str| -> Vec<DeclId> {
        t.refs_of(id(&p, k))
            .iter()
            .filter(|r| r.kind == RefKind::Delegation)
            .map(|r| r.target)
            .collect()
    };
    assert_eq!(deleg("B#<init>()"), [id(&p, "A#<init>(int)")]);
    assert_eq!(deleg("C#<init>()"), [id(&p, "A#<init>()")]);
    assert_eq!(deleg("D"), [id(&p, "A#<init>()")]);
}

#[test]
fn missing_no_arg_super_constructor() {
    let p = mem(&[("A.mj", "class A { A(int x) {} } class B extends A { B() {} }")]);
    assert!(matches!(build_symbol_table(&p), Err(SemanticError::NoApplicableMethod { .. })));
}

#[test]
fn generic_method_unifies_with_argument() {
    let p = mem(&[(
        "A.mj",
        "import java.util.*; class A { static <T> T first(List<T> xs) { return xs.get(0); } \
         static int m(List<String> s) { return first(s).length(); } }",
    )]);
    let t = build_symbol_table(&p).unwrap();
    let m = id(&p, "A#m(List<String>)");
    let types = types_by_text(&p, &t, m, SolveMode::Solved);
    assert_eq!(types["first(s)"], "String");
}

#[test]
fn explicit_type_argument_is_honored() {
    let p = mem(&[(
        "A.mj",
        "import java.util.*; class A { static <T> List<T> empty() { return new ArrayList<T>(); } \
         static int m() { return A.<String>empty().size(); } }",
    )]);
    let t = build_symbol_table(&p).unwrap();
    let types = types_by_text(&p, &t, id(&p, "A#m()"), SolveMode::Solved);
    assert_eq!(types["A.<String>empty()"], "List<String>");
}

fn corpus_subjects() -> Vec<Project> {
    ["listing2", "listing3", "listing4", "listing5"].into_iter().map(corpus).collect()
}

#[test]
fn override_links_are_symmetric() {
    for p in corpus_subjects() {
        let t = build_symbol_table(&p).unwrap();
        for d in p.decls() {
            for &n in t.overrides(d.id) {
                assert!(t.overridden_by(n).contains(&d.id));
            }
            for &m in t.overridden_by(d.id) {
                assert!(t.overrides(m).contains(&d.id));
            }
        }
    }
}

#[test]
fn solved_types_are_never_less_specific_than_naive() {
    for p in corpus_subjects() {
        let t = build_symbol_table(&p).unwrap();
        for d in p.project_decls().filter(|d| d.kind.is_bodied() || d.kind.is_field()) {
            let solved = solve_expr_types(&p, &t, d.id, SolveMode::Solved);
            let naive = solve_expr_types(&p, &t, d.id, SolveMode::Naive);
            for (e, s) in &solved {
                if let Some(n) = naive.get(e) {
                    assert!(t.is_subtype(s, n), "{} vs {}", render(s, &p), render(n, &p));
                }
            }
        }
    }
}

#[test]
fn resolution_is_deterministic() {
    let p = corpus("listing4");
    let a = build_symbol_table(&p).unwrap();
    let b = build_symbol_table(&p).unwrap();
    let targets = |t: &SymbolTable| {
        let mut v: Vec<_> = t.refs.iter().flat_map(|(k, rs)| rs.iter().map(move |r| (*k, r.target))).collect();
        v.sort();
        v
    };
    assert_eq!(targets(&a), targets(&b));
}
