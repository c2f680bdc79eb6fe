//! Per-method control-flow graphs with post-dominance, control dependence
//! and loop discovery.

mod build;
pub mod dot;
mod loops;
mod postdom;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::lang::ast::{Cond, Span, Stmt, StmtPath};

pub use build::{build_cfg, cfg_of_block, cfg_of_stmt};
pub use loops::{find_loops, LoopInfo};
pub use postdom::{control_dependents, post_dominators, transitive_controllers, PostDom};

pub type NodeId = usize;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum NodeKind {
    Entry,
    Exit,
    /// A simple statement: assignment, call, return or `bottom`.
    Stmt(Stmt),
    /// The condition of an `if` or `while`. Successor 0 is taken when it holds.
    Branch { cond: Cond, is_loop: bool },
    /// Opaque node standing in for a collapsed region (used by tests and
    /// summary-assisted loop checks).
    Opaque,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CfgNode {
    pub id: NodeId,
    pub kind: NodeKind,
    /// Location of the originating statement inside the method body.
    pub path: Option<StmtPath>,
    pub span: Span,
}

#[derive(Clone, Debug, Default)]
pub struct Cfg {
    pub nodes: Vec<CfgNode>,
    succ: Vec<Vec<NodeId>>,
    pred: Vec<Vec<NodeId>>,
    pub entry: NodeId,
    pub exit: NodeId,
}

impl Cfg {
    /// A graph with `n` opaque nodes and the given edges. Branch-ness is
    /// irrelevant to the graph algorithms, so everything but entry and exit
    /// is opaque.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)], entry: NodeId, exit: NodeId) -> Cfg {
        let mut g = Cfg::default();
        for id in 0..n {
            let kind = if id == entry {
                NodeKind::Entry
            } else if id == exit {
                NodeKind::Exit
            } else {
                NodeKind::Opaque
            };
            g.add(kind, None, Span::default());
        }
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g.entry = entry;
        g.exit = exit;
        g
    }

    pub(crate) fn add(&mut self, kind: NodeKind, path: Option<StmtPath>, span: Span) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(CfgNode { id, kind, path, span });
        self.succ.push(Vec::new());
        self.pred.push(Vec::new());
        id
    }

    pub(crate) fn add_edge(&mut self, a: NodeId, b: NodeId) {
        self.succ[a].push(b);
        self.pred[b].push(a);
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Successors in order; a branch lists its true target first. A branch
    /// whose arms join immediately lists the same node twice.
    pub fn succ(&self, n: NodeId) -> &[NodeId] {
        &self.succ[n]
    }

    pub fn pred(&self, n: NodeId) -> &[NodeId] {
        &self.pred[n]
    }

    pub fn edges(&self) -> BTreeSet<(NodeId, NodeId)> {
        self.succ.iter().enumerate().flat_map(|(a, s)| s.iter().map(move |&b| (a, b))).collect()
    }

    pub fn node(&self, n: NodeId) -> &CfgNode {
        &self.nodes[n]
    }

    pub fn is_branch(&self, n: NodeId) -> bool {
        matches!(self.nodes[n].kind, NodeKind::Branch { .. })
    }

    /// Node whose statement lives at `path`.
    pub fn node_at(&self, path: &StmtPath) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.path.as_ref() == Some(path))
    }

    pub(crate) fn reach(&self, from: NodeId, forward: bool) -> BTreeSet<NodeId> {
        let mut seen = BTreeSet::new();
        let mut stack = alloc::vec![from];
        while let Some(n) = stack.pop() {
            if seen.insert(n) {
                let next = if forward { &self.succ[n] } else { &self.pred[n] };
                stack.extend(next.iter().copied());
            }
        }
        seen
    }

    pub fn reachable_from_entry(&self) -> BTreeSet<NodeId> {
        self.reach(self.entry, true)
    }

    pub fn reaching_exit(&self) -> BTreeSet<NodeId> {
        self.reach(self.exit, false)
    }

    /// Structural invariants: entry has no predecessors, exit no successors,
    /// statement nodes at most one successor, branches exactly two, and
    /// every node lies on an entry-to-exit path.
    pub fn check_invariants(&self) -> Result<(), &'static str> {
        if !self.pred[self.entry].is_empty() {
            return Err("entry has predecessors");
        }
        if !self.succ[self.exit].is_empty() {
            return Err("exit has successors");
        }
        for n in &self.nodes {
            let k = self.succ[n.id].len();
            match n.kind {
                NodeKind::Branch { .. } if k != 2 => return Err("branch without two successors"),
                NodeKind::Stmt(_) | NodeKind::Entry if k > 1 => return Err("statement with several successors"),
                _ => {}
            }
        }
        let fwd = self.reachable_from_entry();
        let bwd = self.reaching_exit();
        if fwd.len() != self.len() {
            return Err("node unreachable from entry");
        }
        if bwd.len() != self.len() {
            return Err("exit unreachable from some node");
        }
        Ok(())
    }
}

/// Errors from graph algorithms that need the exit to be reachable.
#[derive(Clone, Copy, PartialEq, Eq, Debug, thiserror::Error)]
pub enum CfgError {
    #[error("exit node unreachable from node {0}")]
    UnreachableExit(NodeId),
}

/// Map from a branch node to the nodes directly control-dependent on it.
pub type ControlDeps = BTreeMap<NodeId, BTreeSet<NodeId>>;

#[cfg(test)]
mod tests;
