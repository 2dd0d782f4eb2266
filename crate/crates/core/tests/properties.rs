//! Invariants checked on generated projects.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use tdmin_core::baseline::{class_granular_minimize, retained_classes};
use tdmin_core::corpus::{self, Subject};
use tdmin_core::driver::minimize_project;
use tdmin_core::emitter::{apply, parse_manifest};
use tdmin_core::frontend::normalize::structurally_equal;
use tdmin_core::frontend::{parse_unit, print_unit, tokenize, type_to_string};
use tdmin_core::mark::{collect_entrypoints, mark, open_parameter_owners, resolve_specs, AssignedSets, Marks};
use tdmin_core::oracle::{compare, execute, DEFAULT_BUDGET};
use tdmin_core::semantics::{build_lenient, build_symbol_table, SymbolTable};
use tdmin_core::sweep::{build_reachability_graph, decide, Decisions, SweepDecision};
use tdmin_core::{DeclId, DummyMode, LifecycleConfig, Project, RunConfig, Verdict};

fn subject(seed: u64, small: bool) -> Subject {
    if small {
        corpus::small(seed)
    } else {
        corpus::seeded(seed)
    }
}

fn analyzed(s: &Subject) -> (Project, SymbolTable, BTreeSet<DeclId>, Marks) {
    let p = s.project().unwrap();
    let t = build_lenient(&p);
    let e = collect_entrypoints(&p, &t, &s.entrypoints[..1], &LifecycleConfig::default()).unwrap();
    let m = mark(&p, &t, &e);
    (p, t, e, m)
}

fn member_granular(p: &Project, t: &SymbolTable, m: &Marks) -> Decisions {
    decide(p, t, m, &build_reachability_graph(m)).decisions
}

fn config(s: &Subject) -> RunConfig {
    RunConfig::new(&s.name, s.entrypoints[..1].to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn printed_sources_reparse_equal(seed in 0u64..10_000, small in any::<bool>()) {
        let s = subject(seed, small);
        for (path, text) in &s.sources {
            let a = parse_unit(&tokenize(text, 0).unwrap()).unwrap();
            let b = parse_unit(&tokenize(&print_unit(&a), 0).unwrap()).unwrap();
            prop_assert!(structurally_equal(&a, &b), "{}", path.display());
        }
    }

    #[test]
    fn every_declaration_gets_one_verdict(seed in 0u64..10_000, small in any::<bool>()) {
        let s = subject(seed, small);
        let (p, t, _, m) = analyzed(&s);
        let d = member_granular(&p, &t, &m);
        let ids: BTreeSet<DeclId> = p.project_decls().map(|e| e.id).collect();
        prop_assert_eq!(d.keys().copied().collect::<BTreeSet<_>>(), ids);
        for (k, v) in &d {
            prop_assert_eq!(*k, v.decl);
        }
    }

    #[test]
    fn marking_edges_start_at_marked(seed in 0u64..10_000, small in any::<bool>()) {
        let s = subject(seed, small);
        let (p, t, e, m) = analyzed(&s);
        for edge in &m.edges {
            prop_assert!(m.is_marked(edge.from) && m.is_marked(edge.to));
        }
        for x in &e {
            prop_assert!(m.is_marked(*x));
        }
        let again = mark(&p, &t, &e);
        prop_assert_eq!(again.marks, m.marks);
    }

    #[test]
    fn emitted_output_reloads_and_is_stable(seed in 0u64..10_000) {
        let s = corpus::seeded(seed);
        let (p, t, _, m) = analyzed(&s);
        let d = member_granular(&p, &t, &m);
        let out = apply(&p, &t, &d, DummyMode::Assert).unwrap();
        let reloaded = Project::from_sources("out", out.sources.clone(), vec![]).unwrap();
        let t2 = build_symbol_table(&reloaded).unwrap();
        let keep: Decisions = reloaded
            .project_decls()
            .map(|e| (e.id, SweepDecision::new(e.id, Verdict::NoOp, "keep")))
            .collect();
        let twice = apply(&reloaded, &t2, &keep, DummyMode::Assert).unwrap();
        prop_assert_eq!(&twice.sources, &out.sources);

        for (id, dec) in &d {
            let e = p.decl(*id);
            if dec.verdict != Verdict::Dummy || !matches!(e.kind, tdmin_core::DeclKind::Method) {
                continue;
            }
            let n = reloaded.lookup(&e.key).unwrap();
            let (a, b) = (p.method(*id), reloaded.method(n));
            prop_assert_eq!(&a.modifiers, &b.modifiers);
            prop_assert_eq!(type_to_string(&a.ret), type_to_string(&b.ret));
            let params = |m: &tdmin_core::frontend::ast::MethodDecl| m.params.iter().map(|x| type_to_string(&x.ty)).collect::<Vec<_>>();
            prop_assert_eq!(params(a), params(b));
        }
    }

    #[test]
    fn closed_sets_contain_observed_types(seed in 0u64..10_000, small in any::<bool>()) {
        let s = subject(seed, small);
        let (p, t, e, _) = analyzed(&s);
        let sets = AssignedSets::compute(&t, &open_parameter_owners(&p, &t, &e));
        let (_, entry) = resolve_specs(&p, &s.entrypoints[..1]).unwrap()[0];
        let r = execute(&p, &t, entry, DEFAULT_BUDGET).unwrap();
        for (var, class) in &r.observed {
            let set = sets.get(var);
            if !set.open {
                let decls: Vec<_> = set.types.iter().filter_map(|x| x.class_decl()).collect();
                prop_assert!(decls.contains(class), "{:?} saw {}", var, p.decl(*class).key);
            }
        }
        let again = execute(&p, &t, entry, DEFAULT_BUDGET).unwrap();
        prop_assert!(r.same_behavior(&again));
        prop_assert_eq!(r.hits, again.hits);
        prop_assert_eq!(r.steps, again.steps);
    }

    #[test]
    fn baseline_contains_member_granular(seed in 0u64..10_000, small in any::<bool>()) {
        let s = subject(seed, small);
        let (p, t, e, m) = analyzed(&s);
        let member = member_granular(&p, &t, &m);
        let base = class_granular_minimize(&p, &t, &e);
        prop_assert!(retained_classes(&p, &base).is_superset(&retained_classes(&p, &member)));
    }

    #[test]
    fn pass_count_and_manifest(seed in 0u64..10_000, small in any::<bool>()) {
        let s = subject(seed, small);
        let p = s.project().unwrap();
        let n = p.project_decls().count();
        let o = minimize_project(p, &config(&s)).unwrap();
        prop_assert!(o.report.passes.len() <= n);
        prop_assert!(o.report.passes.len() <= 3, "{} passes", o.report.passes.len());
        let listed: BTreeMap<String, Verdict> = parse_manifest(&o.report.manifest()).unwrap().into_iter().map(|(v, k)| (k, v)).collect();
        let want: BTreeMap<String, Verdict> = o.report.verdicts().into_iter().filter(|(_, v)| *v != Verdict::NoOp).collect();
        prop_assert_eq!(listed, want);
    }

    #[test]
    fn compare_is_symmetric_under_relabeling(cells in proptest::collection::vec(0usize..4, 0..200)) {
        let keep = |b: bool| if b { Verdict::NoOp } else { Verdict::Remove };
        let (mut r, mut c, mut rf, mut cf) = (BTreeMap::new(), BTreeMap::new(), BTreeMap::new(), BTreeMap::new());
        for (i, cell) in cells.iter().enumerate() {
            let key = format!("p.K{i}#m()");
            let (a, b) = (cell % 2 == 0, *cell < 2);
            r.insert(key.clone(), keep(a));
            c.insert(key.clone(), keep(b));
            rf.insert(key.clone(), keep(!a));
            cf.insert(key, keep(!b));
        }
        let (x, y) = (compare(&r, &c).unwrap().all, compare(&rf, &cf).unwrap().all);
        prop_assert_eq!((x.tp, x.fp, x.fn_, x.tn), (y.tn, y.fn_, y.fp, y.tp));
        prop_assert_eq!(x.accuracy, y.accuracy);
        prop_assert_eq!(x.fpr, y.fnr);
    }
}
