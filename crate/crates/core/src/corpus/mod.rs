//! Generated MiniJ projects for corpus and property tests.
//!
//! Two families: [`seeded`] subjects carry compile errors in code the
//! entrypoint never reaches, and [`small`] projects are random call graphs
//! of at most [`SMALL_MAX_DECLS`] declarations with unused two-method cycles.

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::error::FrontendError;
use crate::frontend::Project;
use crate::mark::EntrypointSpec;

pub const SMALL_MAX_DECLS: usize = 30;

#[derive(Clone, Debug)]
pub struct Subject {
    pub name: String,
    /// Paths relative to the source root.
    pub sources: Vec<(PathBuf, String)>,
    pub entrypoints: Vec<EntrypointSpec>,
    /// Number of unresolvable symbols planted.
    pub seeded: usize,
    /// Of which inside an otherwise reachable class.
    pub seeded_in_reachable_class: usize,
    /// Method pairs calling only each other; no entrypoint reaches them.
    pub cycles: Vec<(String, String)>,
    /// Value printed as `total N` by the entrypoint, when known.
    pub expected_total: Option<i64>,
}

impl Subject {
    pub fn project(&self) -> Result<Project, FrontendError> {
        Project::from_sources(&self.name, self.sources.clone(), vec![])
    }

    /// Writes the sources below `root`.
    pub fn write(&self, root: &std::path::Path) -> std::io::Result<()> {
        for (p, text) in &self.sources {
            let path = root.join(p);
            if let Some(dir) = path.parent() {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(path, text)?;
        }
        Ok(())
    }

    pub fn decl_count(&self) -> usize {
        self.project().map(|p| p.project_decls().count()).unwrap_or(0)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Slot {
    None,
    /// Unreachable member of a reachable class.
    Member,
    /// Member of an unreachable class.
    Class,
}

struct Method {
    sig: String,
    body: Vec<String>,
    tail: Option<String>,
    slot: Slot,
}

enum Mem {
    Field(String),
    Method(Method),
}

struct Cls {
    name: String,
    head: String,
    imports: Vec<&'static str>,
    members: Vec<Mem>,
    /// Whether a field may be planted here.
    field_slot: bool,
}

impl Cls {
    fn new(name: &str, head: String) -> Cls {
        Cls {
            name: name.to_string(),
            head,
            imports: Vec::new(),
            members: Vec::new(),
            field_slot: false,
        }
    }

    fn field(&mut self, text: impl Into<String>) {
        self.members.push(Mem::Field(text.into()));
    }

    fn method(&mut self, sig: impl Into<String>, body: Vec<String>, tail: Option<String>, slot: Slot) {
        self.members.push(Mem::Method(Method {
            sig: sig.into(),
            body,
            tail,
            slot,
        }));
    }

    fn render(&self, pkg: &str) -> String {
        let mut s = format!("package {pkg};\n\n");
        for i in &self.imports {
            let _ = writeln!(s, "import {i};");
        }
        if !self.imports.is_empty() {
            s.push('\n');
        }
        let _ = writeln!(s, "{} {{", self.head);
        let mut first = true;
        let mut prev_field = false;
        for m in &self.members {
            match m {
                Mem::Field(f) => {
                    if !first && !prev_field {
                        s.push('\n');
                    }
                    let _ = writeln!(s, "    {f}");
                    prev_field = true;
                }
                Mem::Method(m) => {
                    if !first {
                        s.push('\n');
                    }
                    if m.body.is_empty() && m.tail.is_none() && m.sig.ends_with(';') {
                        let _ = writeln!(s, "    {}", m.sig);
                    } else {
                        let _ = writeln!(s, "    {} {{", m.sig);
                        for line in m.body.iter().chain(&m.tail) {
                            let _ = writeln!(s, "        {line}");
                        }
                        s.push_str("    }\n");
                    }
                    prev_field = false;
                }
            }
            first = false;
        }
        s.push_str("}\n");
        s
    }
}

fn error_stmt(kind: usize, n: usize) -> String {
    match kind % 4 {
        0 => format!("Missing{n}.call();"),
        1 => format!("Gone{n} g{n} = null;"),
        2 => format!("int v{n} = undefined{n};"),
        _ => format!("Util.nope{n}();"),
    }
}

fn files(pkg: &str, classes: &[Cls]) -> Vec<(PathBuf, String)> {
    classes
        .iter()
        .map(|c| (PathBuf::from(pkg).join(format!("{}.mj", c.name)), c.render(pkg)))
        .collect()
}

/// A subject whose entrypoint compiles and runs, with 1 to 3 unresolvable
/// symbols planted in declarations it never reaches.
pub fn seeded(seed: u64) -> Subject {
    let mut rng = StdRng::seed_from_u64(seed);
    let pkg = "s";
    let open = rng.gen_bool(0.35);
    let test_style = rng.gen_bool(0.5);
    let mut classes = Vec::new();
    let mut stmts: Vec<String> = Vec::new();
    let base: i64 = if test_style { rng.gen_range(0..3) } else { 0 };
    let mut total = base;

    let mut shape = Cls::new("Shape", "public interface Shape".into());
    shape.method("int area();", vec![], None, Slot::None);
    let labelled = rng.gen_bool(0.5);
    if labelled {
        shape.method("default String label()", vec![], Some("return \"shape\";".into()), Slot::None);
    }
    classes.push(shape);

    let n_shapes = rng.gen_range(2..=4);
    let used_shapes = rng.gen_range(1..=n_shapes);
    let mut shape_news = Vec::new();
    for i in 0..n_shapes {
        let name = format!("S{i}");
        let mul = i as i64 + 2;
        let mut c = Cls::new(&name, format!("public class {name} implements Shape"));
        c.field("int k;");
        c.method(format!("{name}(int k)"), vec!["this.k = k;".into()], None, Slot::None);
        let slot = if i < used_shapes { Slot::None } else { Slot::Class };
        c.method("public int area()", vec![], Some(format!("return k * {mul};")), slot);
        if labelled && rng.gen_bool(0.5) {
            c.method("public String label()", vec![], Some(format!("return \"{name}\";")), slot);
        }
        if i < used_shapes {
            let k = rng.gen_range(1..10);
            total += k * mul;
            shape_news.push(format!("new {name}({k})"));
        }
        classes.push(c);
    }
    if open {
        stmts.push("List<Shape> shapes = new ArrayList<Shape>();".into());
        for n in &shape_news {
            stmts.push(format!("shapes.add({n});"));
        }
        stmts.push("for (int i = 0; i < shapes.size(); i = i + 1) {".into());
        stmts.push("    total = total + shapes.get(i).area();".into());
        stmts.push("}".into());
    } else {
        for (j, n) in shape_news.iter().enumerate() {
            stmts.push(format!("Shape a{j} = {n};"));
            stmts.push(format!("total = total + measure(a{j});"));
        }
    }
    if labelled {
        stmts.push(format!("System.out.println({}.label());", shape_news[0]));
    }

    let mut op = Cls::new("Op", "public abstract class Op".into());
    op.method("abstract int apply(int x);", vec![], None, Slot::None);
    classes.push(op);
    let ops: [(&str, fn(i64, i64) -> i64, &str); 3] = [
        ("Inc", |x, c| x + c, "x + {c}"),
        ("Dbl", |x, _| x * 2, "x * 2"),
        ("Sub", |x, c| x - c, "x - {c}"),
    ];
    let n_ops = rng.gen_range(1..=3);
    let used_ops = rng.gen_range(1..=n_ops);
    for (i, (name, f, expr)) in ops.iter().take(n_ops).enumerate() {
        let c = rng.gen_range(1..5);
        let mut cls = Cls::new(name, format!("public class {name} extends Op"));
        let slot = if i < used_ops { Slot::None } else { Slot::Class };
        cls.method("int apply(int x)", vec![], Some(format!("return {};", expr.replace("{c}", &c.to_string()))), slot);
        classes.push(cls);
        if i < used_ops {
            total = f(total, c);
            stmts.push(format!("Op o{i} = new {name}();"));
            stmts.push(format!("total = o{i}.apply(total);"));
        }
    }

    let mut util = Cls::new("Util", "public class Util".into());
    util.field_slot = true;
    let n_helpers = rng.gen_range(2..=5);
    let mut used: Vec<usize> = (0..n_helpers).filter(|_| rng.gen_bool(0.5)).collect();
    if used.is_empty() {
        used.push(0);
    }
    for j in 0..n_helpers {
        let slot = if used.contains(&j) { Slot::None } else { Slot::Member };
        util.method(format!("static int h{j}(int x)"), vec![], Some(format!("return x + {j};")), slot);
    }
    for &j in &used {
        total += j as i64;
        stmts.push(format!("total = Util.h{j}(total);"));
    }
    classes.push(util);

    if rng.gen_bool(0.6) {
        let mut c = Cls::new("Counter", "public class Counter".into());
        c.field_slot = true;
        c.field("int count;");
        c.method("void bump()", vec!["count = count + 1;".into()], None, Slot::None);
        c.method("int get()", vec![], Some("return count;".into()), Slot::None);
        c.method("void reset()", vec!["count = 0;".into()], None, Slot::Member);
        classes.push(c);
        let bumps = rng.gen_range(1..4);
        stmts.push("Counter c = new Counter();".into());
        for _ in 0..bumps {
            stmts.push("c.bump();".into());
        }
        stmts.push("total = total + c.get();".into());
        total += bumps;
    }

    let n_dead = rng.gen_range(1..=3);
    for i in 0..n_dead {
        let name = format!("Dead{i}");
        let mut c = Cls::new(&name, format!("public class {name}"));
        let body = if i + 1 < n_dead && rng.gen_bool(0.5) {
            format!("return Dead{}.run() + {i};", i + 1)
        } else {
            format!("return {i};")
        };
        c.method("static int run()", vec![], Some(body), Slot::Class);
        classes.push(c);
    }

    stmts.push("System.out.println(\"total \" + total);".into());
    let entry_name = if test_style { "T" } else { "Main" };
    let mut entry = Cls::new(entry_name, format!("public class {entry_name}"));
    if open {
        entry.imports.push("java.util.*");
    }
    if test_style {
        entry.imports.push("org.junit.*");
        entry.field("int base;");
        entry.method("void setUp()", vec![format!("base = {base};")], None, Slot::None);
        let mut body = vec!["int total = base;".to_string()];
        body.extend(stmts);
        body.push(format!("Assert.assertEquals({total}, total);"));
        entry.method("@Test\n    void test1()", body, None, Slot::None);
    } else {
        let mut body = vec!["int total = 0;".to_string()];
        body.extend(stmts);
        entry.method("public static void main()", body, None, Slot::None);
    }
    if !open {
        entry.method("static int measure(Shape s)", vec![], Some("return s.area();".into()), Slot::None);
    }
    classes.push(entry);

    // plant errors
    let mut slots: Vec<(usize, Option<usize>, Slot)> = Vec::new();
    for (ci, c) in classes.iter().enumerate() {
        if c.field_slot {
            slots.push((ci, None, Slot::Member));
        }
        for (mi, m) in c.members.iter().enumerate() {
            if let Mem::Method(m) = m {
                if m.slot != Slot::None {
                    slots.push((ci, Some(mi), m.slot));
                }
            }
        }
    }
    slots.shuffle(&mut rng);
    let n_err = rng.gen_range(1..=3).min(slots.len());
    let mut in_reachable = 0;
    for (n, &(ci, mi, slot)) in slots.iter().take(n_err).enumerate() {
        if slot == Slot::Member {
            in_reachable += 1;
        }
        let kind = rng.gen_range(0..4);
        match mi {
            None => classes[ci].field(format!("Missing{n} cache{n};")),
            Some(mi) => {
                if let Mem::Method(m) = &mut classes[ci].members[mi] {
                    m.body.insert(0, error_stmt(kind, n));
                }
            }
        }
    }

    Subject {
        name: format!("seeded{seed}"),
        sources: files(pkg, &classes),
        entrypoints: vec![format!("{pkg}.{entry_name}#{}", if test_style { "test1" } else { "main" }).parse().unwrap()],
        seeded: n_err,
        seeded_in_reachable_class: in_reachable,
        cycles: Vec::new(),
        expected_total: Some(total),
    }
}

/// A random compilable project of at most [`SMALL_MAX_DECLS`] declarations.
///
/// Methods only call methods declared after them, so nothing recurses
/// except the planted cycles, which no entrypoint reaches. Entrypoints are
/// `q.Main#main` followed by a few more methods, so prefixes of the list
/// form a growing chain of entrypoint sets.
pub fn small(seed: u64) -> Subject {
    let mut rng = StdRng::seed_from_u64(seed);
    let pkg = "q";
    let n_classes = rng.gen_range(2..=4);
    let mut decls = 2; // Main and main()
    let with_iface = rng.gen_bool(0.5);
    let mut methods: Vec<(usize, String, bool)> = Vec::new(); // class, name, static
    let mut plan: Vec<Vec<(String, bool)>> = Vec::new();
    decls += n_classes;
    if with_iface {
        decls += 2;
    }
    for c in 0..n_classes {
        let n = rng.gen_range(1..=4);
        let mut ms = Vec::new();
        for m in 0..n {
            let st = rng.gen_bool(0.5);
            ms.push((format!("m{m}"), st));
            methods.push((c, format!("m{m}"), st));
            decls += 1;
        }
        plan.push(ms);
    }
    let impls: Vec<usize> = if with_iface {
        (0..n_classes).filter(|_| rng.gen_bool(0.5)).collect()
    } else {
        Vec::new()
    };
    decls += impls.len();
    let n_cycles = rng.gen_range(0..=2).min((SMALL_MAX_DECLS.saturating_sub(decls + 1)) / 2);
    decls += 2 * n_cycles;

    let call = |(c, m, st): &(usize, String, bool)| {
        if *st {
            format!("C{c}.{m}();")
        } else {
            format!("new C{c}().{m}();")
        }
    };
    let mut classes = Vec::new();
    if with_iface {
        let mut j = Cls::new("J", "public interface J".into());
        j.method("int v();", vec![], None, Slot::None);
        classes.push(j);
    }
    let mut cycles = Vec::new();
    let mut cycle_members: Vec<Vec<(String, String)>> = vec![Vec::new(); n_classes];
    for i in 0..n_cycles {
        let a = rng.gen_range(0..n_classes);
        let b = rng.gen_range(0..n_classes);
        let (x, y) = (format!("cyc{i}a"), format!("cyc{i}b"));
        cycle_members[a].push((x.clone(), format!("C{b}.{y}();")));
        cycle_members[b].push((y.clone(), format!("C{a}.{x}();")));
        cycles.push((format!("{pkg}.C{a}#{x}()"), format!("{pkg}.C{b}#{y}()")));
    }
    let mut idx = 0;
    for c in 0..n_classes {
        let name = format!("C{c}");
        let head = if impls.contains(&c) {
            format!("public class {name} implements J")
        } else {
            format!("public class {name}")
        };
        let mut cls = Cls::new(&name, head);
        for (m, st) in &plan[c] {
            idx += 1;
            let mut body = vec![format!("System.out.println(\"{name}.{m}\");")];
            let later = &methods[idx..];
            if !later.is_empty() {
                for _ in 0..rng.gen_range(0..=2) {
                    body.push(call(later.choose(&mut rng).unwrap()));
                }
            }
            if !impls.is_empty() && rng.gen_bool(0.3) {
                let k = impls.choose(&mut rng).unwrap();
                if *k > c {
                    body.push(format!("J j = new C{k}();"));
                    body.push("System.out.println(j.v());".into());
                }
            }
            let sig = if *st { format!("static void {m}()") } else { format!("void {m}()") };
            cls.method(sig, body, None, Slot::None);
        }
        if impls.contains(&c) {
            cls.method("public int v()", vec![], Some(format!("return {c};")), Slot::None);
        }
        for (m, body) in &cycle_members[c] {
            cls.method(format!("static void {m}()"), vec![body.clone()], None, Slot::None);
        }
        classes.push(cls);
    }
    let mut main = Cls::new("Main", "public class Main".into());
    let mut body = Vec::new();
    for m in &methods {
        if rng.gen_bool(0.4) {
            body.push(call(m));
        }
    }
    main.method("public static void main()", body, None, Slot::None);
    classes.push(main);

    let mut entrypoints: Vec<EntrypointSpec> = vec![format!("{pkg}.Main#main").parse().unwrap()];
    let mut extra = methods.clone();
    extra.shuffle(&mut rng);
    for (c, m, _) in extra.into_iter().take(2) {
        entrypoints.push(format!("{pkg}.C{c}#{m}").parse().unwrap());
    }
    debug_assert!(decls <= SMALL_MAX_DECLS);
    Subject {
        name: format!("small{seed}"),
        sources: files(pkg, &classes),
        entrypoints,
        seeded: 0,
        seeded_in_reachable_class: 0,
        cycles,
        expected_total: None,
    }
}

#[cfg(test)]
mod tests;
