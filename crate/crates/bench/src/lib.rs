//! Inputs shared by the benchmarks.

use std::path::{Path, PathBuf};

use tdmin_core::corpus;
use tdmin_core::{load_project, Project, RunConfig};

fn corpus_dir(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/corpus").join(name).join("src")
}

/// Named projects with a ready configuration: two checked-in subjects and
/// two generated ones.
pub fn subjects() -> Vec<(String, Project, RunConfig)> {
    let mut v = Vec::new();
    for (name, entry) in [("listing5", "Main#main"), ("codec", "codec.CodecTest")] {
        let root = corpus_dir(name);
        let p = load_project(&root, &[]).expect("corpus project loads");
        v.push((name.to_string(), p, RunConfig::new(root, vec![entry.parse().unwrap()])));
    }
    for s in [corpus::seeded(3), corpus::small(11)] {
        let p = s.project().expect("generated project loads");
        v.push((s.name.clone(), p, RunConfig::new(&s.name, s.entrypoints[..1].to_vec())));
    }
    v
}
