//! The reachability graph and necessity tracing.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::frontend::ast::DeclId;
use crate::mark::{Marks, ReasonEdge};

#[derive(Clone, Debug, Default)]
pub struct ReachabilityGraph {
    pub nodes: BTreeSet<DeclId>,
    pub roots: BTreeSet<DeclId>,
    out: BTreeMap<DeclId, Vec<ReasonEdge>>,
    inc: BTreeMap<DeclId, Vec<ReasonEdge>>,
}

impl ReachabilityGraph {
    pub fn new(nodes: BTreeSet<DeclId>, roots: BTreeSet<DeclId>, edges: impl IntoIterator<Item = ReasonEdge>) -> Self {
        let mut g = ReachabilityGraph {
            nodes,
            roots,
            ..Default::default()
        };
        g.nodes.extend(g.roots.iter().copied());
        for e in edges {
            if g.nodes.contains(&e.from) && g.nodes.contains(&e.to) {
                g.out.entry(e.from).or_default().push(e);
                g.inc.entry(e.to).or_default().push(e);
            }
        }
        g
    }

    pub fn out_edges(&self, d: DeclId) -> &[ReasonEdge] {
        self.out.get(&d).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn in_edges(&self, d: DeclId) -> &[ReasonEdge] {
        self.inc.get(&d).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn edge_count(&self) -> usize {
        self.out.values().map(Vec::len).sum()
    }

    /// Nodes with support from a root. Edges leaving `cut` nodes are not
    /// followed; an edge back onto the current search path is skipped, so
    /// a cycle is needed only when something outside it supports it.
    pub fn needed(&self, cut: &HashSet<DeclId>) -> BTreeSet<DeclId> {
        let mut seen = BTreeSet::new();
        let mut on_path = HashSet::new();
        for &r in &self.roots {
            if !seen.contains(&r) {
                self.dfs(r, cut, &mut seen, &mut on_path);
            }
        }
        seen
    }

    fn dfs(&self, start: DeclId, cut: &HashSet<DeclId>, seen: &mut BTreeSet<DeclId>, on_path: &mut HashSet<DeclId>) {
        // explicit stack of (node, next edge index)
        let mut stack = vec![(start, 0usize)];
        seen.insert(start);
        on_path.insert(start);
        while let Some(&mut (n, ref mut i)) = stack.last_mut() {
            let edges = if cut.contains(&n) { &[][..] } else { self.out_edges(n) };
            if *i < edges.len() {
                let to = edges[*i].to;
                *i += 1;
                if on_path.contains(&to) || seen.contains(&to) {
                    continue;
                }
                seen.insert(to);
                on_path.insert(to);
                stack.push((to, 0));
            } else {
                on_path.remove(&n);
                stack.pop();
            }
        }
    }
}

/// Graph over the marked declarations and their recorded reasons.
pub fn build_reachability_graph(marks: &Marks) -> ReachabilityGraph {
    ReachabilityGraph::new(
        marks.marked().collect(),
        marks.entrypoints.clone(),
        marks.edges.iter().copied(),
    )
}

/// Whether `node` is supported from a root.
pub fn trace(graph: &ReachabilityGraph, node: DeclId) -> bool {
    graph.needed(&HashSet::new()).contains(&node)
}
