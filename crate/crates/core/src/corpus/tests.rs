use super::*;
use crate::mark::resolve_specs;
use crate::oracle::{execute, Status, DEFAULT_BUDGET};
use crate::semantics::build_lenient;

#[test]
fn seeded_subjects_load_and_run() {
    for seed in 0..40 {
        let s = seeded(seed);
        let p = s.project().unwrap_or_else(|e| panic!("{}: {e}\n{:#?}", s.name, s.sources));
        let t = build_lenient(&p);
        assert!((1..=3).contains(&s.seeded), "{}", s.name);
        assert!(t.unresolved().len() >= s.seeded, "{}: {:?}", s.name, t.unresolved());
        let (_, m) = resolve_specs(&p, &s.entrypoints).unwrap()[0];
        let r = execute(&p, &t, m, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.status, Status::Pass, "{}: {:?}", s.name, r.message);
        let want = format!("total {}", s.expected_total.unwrap());
        assert!(r.output.lines().any(|l| l == want), "{}: {:?}", s.name, r.output);
    }
}

#[test]
fn seeded_is_deterministic() {
    assert_eq!(seeded(7).sources, seeded(7).sources);
    assert_ne!(seeded(7).sources, seeded(8).sources);
}

#[test]
fn small_projects_resolve_and_fit() {
    for seed in 0..200 {
        let s = small(seed);
        let p = s.project().unwrap_or_else(|e| panic!("{}: {e}", s.name));
        let n = p.project_decls().count();
        assert!(n <= SMALL_MAX_DECLS, "{}: {n}", s.name);
        let t = build_lenient(&p);
        assert!(!t.has_problems(), "{}: {:?}\n{:#?}", s.name, t.unresolved(), s.sources);
        for (a, b) in &s.cycles {
            assert!(p.lookup(a).is_some() && p.lookup(b).is_some(), "{a} {b}");
        }
        let (_, m) = resolve_specs(&p, &s.entrypoints[..1]).unwrap()[0];
        let r = execute(&p, &t, m, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.status, Status::Pass, "{}: {:?}", s.name, r.message);
    }
}

#[test]
fn small_generates_cycles_sometimes() {
    assert!((0..50).any(|s| !small(s).cycles.is_empty()));
    assert!((0..50).any(|s| small(s).sources.iter().any(|(_, t)| t.contains("implements J"))));
}
