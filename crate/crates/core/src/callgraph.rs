//! Class-hierarchy call graph and recursion detection.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::alias::Context;
use crate::lang::ast::{walk_stmts, Program, StmtKind};
use crate::repr::MethodId;

/// Strongly connected components (Tarjan, iterative). Components come out in
/// reverse topological order: a component precedes every component that
/// reaches it.
pub fn tarjan_scc(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut next = 0;
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut k)) = call.last_mut() {
            if *k < adj[v].len() {
                let w = adj[v][*k];
                *k += 1;
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    out.push(comp);
                }
            }
        }
    }
    out
}

/// CG(P) over the methods with bodies. Extern methods are API sinks and get
/// no node.
#[derive(Clone, Debug, Default)]
pub struct CallGraph {
    pub nodes: Vec<MethodId>,
    pub index: BTreeMap<MethodId, usize>,
    pub callees: Vec<Vec<usize>>,
    pub callers: Vec<Vec<usize>>,
}

impl CallGraph {
    pub fn build(p: &Program, cx: &Context) -> CallGraph {
        let mut g = CallGraph::default();
        for m in p.methods.iter().filter(|m| !m.is_extern()) {
            g.index.insert(m.id(), g.nodes.len());
            g.nodes.push(m.id());
        }
        let mut callees: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); g.nodes.len()];
        for m in p.methods.iter().filter(|m| !m.is_extern()) {
            let me = g.index[&m.id()];
            let id = m.id();
            walk_stmts(m.body_stmts(), &mut |s| {
                if let StmtKind::Call(c) = &s.kind {
                    for t in &cx.resolve(&id, c).targets {
                        if let Some(&ti) = g.index.get(t) {
                            callees[me].insert(ti);
                        }
                    }
                }
            });
        }
        let mut callers: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); g.nodes.len()];
        for (a, cs) in callees.iter().enumerate() {
            for &b in cs {
                callers[b].insert(a);
            }
        }
        g.callees = callees.into_iter().map(|s| s.into_iter().collect()).collect();
        g.callers = callers.into_iter().map(|s| s.into_iter().collect()).collect();
        g
    }

    pub fn edges(&self) -> BTreeSet<(MethodId, MethodId)> {
        let mut out = BTreeSet::new();
        for (a, cs) in self.callees.iter().enumerate() {
            for &b in cs {
                out.insert((self.nodes[a].clone(), self.nodes[b].clone()));
            }
        }
        out
    }

    pub fn callers_of(&self, m: &MethodId) -> impl Iterator<Item = &MethodId> {
        let idx = self.index.get(m).copied();
        idx.into_iter().flat_map(move |i| self.callers[i].iter().map(move |&c| &self.nodes[c]))
    }

    pub fn sccs(&self) -> Vec<Vec<usize>> {
        tarjan_scc(&self.callees)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph callgraph {\n");
        for (i, m) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "    n{i} [label=\"{m}\"];");
        }
        for (a, cs) in self.callees.iter().enumerate() {
            for b in cs {
                let _ = writeln!(out, "    n{a} -> n{b};");
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Hook for discharging recursive methods proven to terminate.
pub trait RecursionOracle {
    fn discharges(&self, m: &MethodId) -> bool;
}

/// The conservative default: every recursive method is deemed divergent.
#[derive(Clone, Copy, Debug, Default)]
pub struct DischargeNone;

impl RecursionOracle for DischargeNone {
    fn discharges(&self, _: &MethodId) -> bool {
        false
    }
}

/// R: methods on a call-graph cycle (self loops included) that the oracle
/// does not discharge.
pub fn recursion_set(g: &CallGraph, oracle: &dyn RecursionOracle) -> BTreeSet<MethodId> {
    let mut out = BTreeSet::new();
    for comp in g.sccs() {
        let cyclic = comp.len() > 1 || g.callees[comp[0]].contains(&comp[0]);
        if !cyclic {
            continue;
        }
        for i in comp {
            let m = &g.nodes[i];
            if !oracle.discharges(m) {
                out.insert(m.clone());
            }
        }
    }
    out
}
