use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use super::{Cfg, CfgError, ControlDeps, NodeId};

/// Post-dominator tree: `ipdom[n]` is the immediate post-dominator of `n`;
/// the exit maps to itself.
#[derive(Clone, Debug)]
pub struct PostDom {
    pub ipdom: Vec<NodeId>,
    exit: NodeId,
}

impl PostDom {
    /// Whether `a` post-dominates `b` (reflexive).
    pub fn post_dominates(&self, a: NodeId, b: NodeId) -> bool {
        let mut cur = b;
        loop {
            if cur == a {
                return true;
            }
            if cur == self.exit {
                return false;
            }
            cur = self.ipdom[cur];
        }
    }
}

/// Iterative dominance on the reversed graph, rooted at the exit.
pub fn post_dominators(g: &Cfg) -> Result<PostDom, CfgError> {
    let n = g.len();
    // Postorder of the reverse graph from exit.
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut stack: Vec<(NodeId, usize)> = vec![(g.exit, 0)];
    seen[g.exit] = true;
    while let Some(&mut (v, ref mut k)) = stack.last_mut() {
        let preds = g.pred(v);
        if *k < preds.len() {
            let w = preds[*k];
            *k += 1;
            if !seen[w] {
                seen[w] = true;
                stack.push((w, 0));
            }
        } else {
            order.push(v);
            stack.pop();
        }
    }
    if let Some(bad) = (0..n).find(|&v| !seen[v]) {
        return Err(CfgError::UnreachableExit(bad));
    }
    let mut rank = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }
    const UNDEF: usize = usize::MAX;
    let mut ipdom = vec![UNDEF; n];
    ipdom[g.exit] = g.exit;
    let mut changed = true;
    while changed {
        changed = false;
        for &v in order.iter().rev() {
            if v == g.exit {
                continue;
            }
            let mut new = UNDEF;
            for &s in g.succ(v) {
                if ipdom[s] == UNDEF {
                    continue;
                }
                new = if new == UNDEF { s } else { intersect(&ipdom, &rank, s, new) };
            }
            if new != ipdom[v] {
                ipdom[v] = new;
                changed = true;
            }
        }
    }
    Ok(PostDom { ipdom, exit: g.exit })
}

fn intersect(ipdom: &[NodeId], rank: &[usize], mut a: NodeId, mut b: NodeId) -> NodeId {
    while a != b {
        while rank[a] < rank[b] {
            a = ipdom[a];
        }
        while rank[b] < rank[a] {
            b = ipdom[b];
        }
    }
    a
}

/// Direct control dependence (Ferrante et al.): for every edge `a → b` where
/// `b` does not strictly post-dominate `a`, the nodes on the post-dominator tree path
/// from `b` up to, but excluding, `ipdom(a)` depend on `a`.
pub fn control_dependents(g: &Cfg) -> Result<ControlDeps, CfgError> {
    let pd = post_dominators(g)?;
    let mut out: ControlDeps = BTreeMap::new();
    for a in 0..g.len() {
        let succ = g.succ(a);
        if succ.len() < 2 {
            continue;
        }
        for &b in succ {
            // A self edge makes `a` depend on itself.
            if b != a && pd.post_dominates(b, a) {
                continue;
            }
            let stop = pd.ipdom[a];
            let mut cur = b;
            while cur != stop {
                out.entry(a).or_default().insert(cur);
                if cur == g.exit {
                    break;
                }
                cur = pd.ipdom[cur];
            }
        }
    }
    Ok(out)
}

/// For each node, the branches it is transitively control-dependent on.
pub fn transitive_controllers(g: &Cfg, deps: &ControlDeps) -> Vec<BTreeSet<NodeId>> {
    let mut direct: Vec<BTreeSet<NodeId>> = vec![BTreeSet::new(); g.len()];
    for (&b, ns) in deps {
        for &n in ns {
            direct[n].insert(b);
        }
    }
    let mut out = Vec::with_capacity(g.len());
    for n in 0..g.len() {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<NodeId> = direct[n].iter().copied().collect();
        while let Some(b) = stack.pop() {
            if seen.insert(b) {
                stack.extend(direct[b].iter().copied());
            }
        }
        out.push(seen);
    }
    out
}
