use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tdmin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdmin")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn project(dir: &Path) {
    let src = dir.join("src/p");
    fs::create_dir_all(&src).unwrap();
    fs::write(
        src.join("Main.mj"),
        "package p;\n\npublic class Main {\n    public static void main() {\n        System.out.println(new A().get());\n    }\n}\n",
    )
    .unwrap();
    fs::write(
        src.join("A.mj"),
        "package p;\n\npublic class A {\n    int get() {\n        return 1;\n    }\n\n    void unused() {\n        Missing.call();\n    }\n}\n",
    )
    .unwrap();
    fs::write(src.join("Z.mj"), "package p;\n\npublic class Z {\n}\n").unwrap();
    let t = dir.join("src/p/T.mj");
    fs::write(
        t,
        "package p;\n\nimport org.junit.*;\n\npublic class T {\n    @Test\n    void test1() {\n        Assert.assertEquals(1, new A().get());\n    }\n}\n",
    )
    .unwrap();
}

#[test]
fn minimize_writes_tree_and_report() {
    let d = tempfile::tempdir().unwrap();
    project(d.path());
    let p = |s: &str| d.path().join(s).to_str().unwrap().to_string();
    let o = tdmin(&["minimize", "--source", &p("src"), "--entrypoint", "p.Main#main", "--out", &p("min"), "--report", &p("r.json")]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(d.path().join("min/p/Main.mj").exists());
    assert!(d.path().join("min/p/A.mj").exists());
    assert!(!d.path().join("min/p/Z.mj").exists());
    let a = fs::read_to_string(d.path().join("min/p/A.mj")).unwrap();
    assert!(!a.contains("Missing"));
    let report = fs::read_to_string(d.path().join("r.json")).unwrap();
    assert!(report.contains("\"schema_version\": 1"));
    let manifest = fs::read_to_string(d.path().join("min.manifest")).unwrap();
    assert!(manifest.contains("REMOVE p.Z\n"));
    assert!(stdout(&o).contains("converged at pass"));
}

#[test]
fn missing_entrypoint_is_a_usage_error() {
    let o = tdmin(&["minimize", "--source", "src"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn analysis_errors_exit_1() {
    let d = tempfile::tempdir().unwrap();
    project(d.path());
    let src = d.path().join("src");
    let o = tdmin(&["minimize", "--source", src.to_str().unwrap(), "--entrypoint", "p.Nope#main"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    let o = tdmin(&["minimize", "--source", "/no/such/dir", "--entrypoint", "p.Main#main"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn baseline_keeps_the_broken_method() {
    let d = tempfile::tempdir().unwrap();
    project(d.path());
    let p = |s: &str| d.path().join(s).to_str().unwrap().to_string();
    let o = tdmin(&["baseline", "--source", &p("src"), "--entrypoint", "p.Main#main", "--out", &p("min")]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("unresolved symbols remain"));
    let a = fs::read_to_string(d.path().join("min/p/A.mj")).unwrap();
    assert!(a.contains("Missing"));
}

#[test]
fn oracle_then_eval() {
    let d = tempfile::tempdir().unwrap();
    project(d.path());
    let p = |s: &str| d.path().join(s).to_str().unwrap().to_string();
    let o = tdmin(&["oracle", "--source", &p("src"), "--entrypoint", "p.T#test1", "--coverage", &p("c.txt")]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "PASS p.T#test1()\n");
    let cov = fs::read_to_string(d.path().join("c.txt")).unwrap();
    assert!(cov.contains("HIT p.A#get()\n"));
    let o = tdmin(&["minimize", "--source", &p("src"), "--entrypoint", "p.T#test1", "--report", &p("r.json")]);
    assert!(o.status.success());
    let o = tdmin(&["eval", "--tool", &p("r.json"), "--oracle", &p("c.txt")]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = stdout(&o);
    assert!(table.starts_with("scope"));
    assert!(table.contains("Precision"));
    let all = table.lines().find(|l| l.starts_with("all")).unwrap();
    // recall column
    let cols: Vec<&str> = all.split_whitespace().collect();
    assert_eq!(cols[5], "1.000");
}

#[test]
fn bad_flag_values() {
    let o = tdmin(&["minimize", "--source", "s", "--entrypoint", "p.Main#main", "--dummy-mode", "loud"]);
    assert_eq!(o.status.code(), Some(2));
    let o = tdmin(&["minimize", "--source", "s", "--entrypoint", "1bad"]);
    assert_eq!(o.status.code(), Some(2));
    let o = tdmin(&["minimize", "--source", "s", "--entrypoint", "p.Main#main", "--max-passes", "0"]);
    assert_eq!(o.status.code(), Some(1));
}
