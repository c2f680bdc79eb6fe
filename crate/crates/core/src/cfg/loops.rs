use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use super::{Cfg, NodeId};
use crate::lang::ast::StmtPath;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LoopInfo {
    pub header: NodeId,
    pub body: BTreeSet<NodeId>,
    /// Index of the innermost enclosing loop in the returned list.
    pub parent: Option<usize>,
    /// 1 for outermost loops.
    pub depth: u32,
    /// Source location of the header statement, when it has one.
    pub path: Option<StmtPath>,
}

/// DFS back-edge loop discovery. Each back edge `u → h` (with `h` on the DFS
/// stack) contributes the nodes on `h → … → u` paths that avoid `h` inside; bodies of
/// back edges sharing a header are merged. Nesting follows body containment.
/// Irreducible regions are reported under whichever header the DFS meets first.
pub fn find_loops(g: &Cfg) -> Vec<LoopInfo> {
    let n = g.len();
    let mut on_stack = vec![false; n];
    let mut seen = vec![false; n];
    let mut back: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    let mut stack: Vec<(NodeId, usize)> = vec![(g.entry, 0)];
    seen[g.entry] = true;
    on_stack[g.entry] = true;
    while let Some(&mut (v, ref mut k)) = stack.last_mut() {
        let succ = g.succ(v);
        if *k < succ.len() {
            let w = succ[*k];
            *k += 1;
            if on_stack[w] {
                back.entry(w).or_default().push(v);
            } else if !seen[w] {
                seen[w] = true;
                on_stack[w] = true;
                stack.push((w, 0));
            }
        } else {
            on_stack[v] = false;
            stack.pop();
        }
    }
    let mut loops: Vec<LoopInfo> = back
        .into_iter()
        .map(|(h, tails)| {
            let forward = g.reach(h, true);
            let mut body = BTreeSet::new();
            body.insert(h);
            let mut work = tails;
            while let Some(x) = work.pop() {
                if forward.contains(&x) && body.insert(x) {
                    work.extend(g.pred(x).iter().copied());
                }
            }
            LoopInfo { header: h, body, parent: None, depth: 1, path: g.node(h).path.clone() }
        })
        .collect();
    // Outer loops first so parents precede children.
    loops.sort_by(|a, b| b.body.len().cmp(&a.body.len()).then(a.header.cmp(&b.header)));
    for i in 0..loops.len() {
        let parent = (0..i)
            .filter(|&j| loops[j].body.contains(&loops[i].header) && loops[i].body.is_subset(&loops[j].body))
            .min_by_key(|&j| loops[j].body.len());
        loops[i].parent = parent;
        loops[i].depth = parent.map_or(1, |p| loops[p].depth + 1);
    }
    loops
}
