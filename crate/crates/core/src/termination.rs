//! The termination oracle: single-iteration cycles of a loop and the
//! bounded-counter test.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::cfg::{cfg_of_stmt, find_loops, Cfg, LoopInfo, NodeId, NodeKind};
use crate::lang::ast::{walk_stmts, RelOp, Stmt, StmtKind, StmtPath};
use crate::repr::Representative;
use crate::summary::{classify_terms, df_check_with, summarize, DfVerdict, LoopSummary, TermTypes};
use crate::summary::term::{Lin, Pred};
use crate::summary::transition::{Effect, PathFormula, Update};
use crate::summary::term::Term;
use crate::symbol::Symbol;

pub const DEFAULT_CYCLE_CAP: usize = 64;

/// One header-to-header path.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Cycle {
    /// Visited nodes, starting at the header.
    pub nodes: Vec<NodeId>,
    /// Statements on the path, in order.
    pub stmts: Vec<Stmt>,
    /// Guard and net updates over the pre-state.
    pub formula: PathFormula,
}

impl Cycle {
    pub fn guard(&self) -> &[Pred] {
        &self.formula.guard
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CycleSet {
    pub header: NodeId,
    pub path: Option<StmtPath>,
    pub cycles: Vec<Cycle>,
    /// Scalars assigned anywhere in the loop.
    pub written: BTreeSet<Symbol>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CycleError {
    NestedLoop { header: NodeId },
    PathExplosion { cap: usize },
}

impl fmt::Display for CycleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CycleError::NestedLoop { header } => write!(f, "loop at node {header} is nested"),
            CycleError::PathExplosion { cap } => write!(f, "more than {cap} cycles"),
        }
    }
}

/// An inner loop collapsed to one opaque step.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Collapsed {
    pub written: BTreeSet<Symbol>,
}

pub fn extract_cycles(l: &LoopInfo, g: &Cfg) -> Result<CycleSet, CycleError> {
    extract_cycles_with(l, g, DEFAULT_CYCLE_CAP, &|_| None)
}

/// Enumerates the acyclic paths from the header back to itself. Paths that
/// leave the loop elsewhere are not cycles. `collapse` may turn an inner
/// loop header into a single step continuing on its exit edge.
pub fn extract_cycles_with(
    l: &LoopInfo,
    g: &Cfg,
    cap: usize,
    collapse: &dyn Fn(NodeId) -> Option<Collapsed>,
) -> Result<CycleSet, CycleError> {
    let header = l.header;
    let mut written = BTreeSet::new();
    for &n in &l.body {
        if let NodeKind::Stmt(s) = &g.node(n).kind {
            written.extend(stmt_writes(s));
        }
    }
    let mut cycles = Vec::new();
    // (node to visit, path so far)
    let mut work: Vec<(NodeId, Cycle)> = Vec::new();
    let start = Cycle { nodes: vec![header], stmts: Vec::new(), formula: PathFormula::identity() };
    push_successors(g, l, header, &start, &mut work);
    while let Some((n, mut c)) = work.pop() {
        if n == header {
            cycles.push(c);
            if cycles.len() > cap {
                return Err(CycleError::PathExplosion { cap });
            }
            continue;
        }
        if !l.body.contains(&n) || c.nodes.contains(&n) {
            continue;
        }
        c.nodes.push(n);
        match &g.node(n).kind {
            NodeKind::Branch { is_loop: true, .. } => {
                let Some(inner) = collapse(n) else {
                    return Err(CycleError::NestedLoop { header: n });
                };
                let mut step = PathFormula::identity();
                for v in &inner.written {
                    step.updates.insert(v.clone(), Update { term: Term::opaque([]), origin: Some(n) });
                }
                step.effects.push((Effect::Loop, Some(n)));
                c.formula = c.formula.then(&step);
                let exit = *g.succ(n).get(1).unwrap_or(&g.exit);
                work.push((exit, c));
            }
            NodeKind::Branch { .. } => push_successors(g, l, n, &c, &mut work),
            NodeKind::Stmt(s) => {
                c.formula = c.formula.then(&PathFormula::of_stmt(s, Some(n)));
                c.stmts.push(s.clone());
                for &m in g.succ(n) {
                    work.push((m, c.clone()));
                }
            }
            NodeKind::Entry | NodeKind::Exit | NodeKind::Opaque => {}
        }
    }
    Ok(CycleSet { header, path: l.path.clone(), cycles, written })
}

/// Branch successors in edge order; outcome true first.
fn push_successors(g: &Cfg, l: &LoopInfo, n: NodeId, c: &Cycle, work: &mut Vec<(NodeId, Cycle)>) {
    let succ = g.succ(n);
    let cond = match &g.node(n).kind {
        NodeKind::Branch { cond, .. } => Some(cond),
        _ => None,
    };
    for (k, &m) in succ.iter().enumerate().rev() {
        if m != l.header && !l.body.contains(&m) {
            continue;
        }
        let mut next = c.clone();
        if let Some(cond) = cond {
            next.formula = next.formula.then(&PathFormula::assume(cond, k == 0));
        }
        work.push((m, next));
    }
}

/// Scalars a statement assigns.
pub fn stmt_writes(s: &Stmt) -> BTreeSet<Symbol> {
    let mut out = BTreeSet::new();
    match &s.kind {
        StmtKind::Assign(a) => out.extend(a.scalar_dst().cloned()),
        StmtKind::Call(c) => {
            out.insert(c.target.clone());
        }
        StmtKind::Bottom(b) => {
            for t in &b.targets {
                if let Representative::Scalar(v) = t {
                    out.insert(v.name.clone());
                }
            }
        }
        _ => {}
    }
    out
}

/// Scalars assigned anywhere inside a block.
pub fn block_writes(block: &[Stmt]) -> BTreeSet<Symbol> {
    let mut out = BTreeSet::new();
    walk_stmts(block, &mut |s| out.extend(stmt_writes(s)));
    out
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Witness {
    pub counter: Symbol,
    /// Net change per cycle.
    pub strides: Vec<i64>,
    /// The invariant the counter is compared with, from the first cycle.
    pub bound: Lin,
    /// The bounding guard atom of each cycle.
    pub guards: Vec<Pred>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TerminationVerdict {
    Terminates(Witness),
    Unknown,
}

impl TerminationVerdict {
    pub fn terminates(&self) -> bool {
        matches!(self, TerminationVerdict::Terminates(_))
    }
}

impl fmt::Display for TerminationVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TerminationVerdict::Unknown => f.write_str("unknown"),
            TerminationVerdict::Terminates(w) => {
                let dir = if w.strides[0] > 0 { "<" } else { ">" };
                write!(f, "terminates: {} {dir} {} with stride ", w.counter, w.bound)?;
                let mut s: Vec<String> = w.strides.iter().map(|d| alloc::format!("{d}")).collect();
                s.dedup();
                f.write_str(&s.join("|"))
            }
        }
    }
}

/// Searches for a counter that moves by a non-zero constant in every cycle
/// and is compared against a loop invariant in every cycle guard, so that the
/// guard must eventually fail. Decreasing counters need `bidirectional`.
pub fn check_termination(cs: &CycleSet, bidirectional: bool) -> TerminationVerdict {
    let Some(first) = cs.cycles.first() else { return TerminationVerdict::Unknown };
    'cand: for (j, _) in first.formula.effective_updates() {
        let mut strides = Vec::new();
        let mut guards = Vec::new();
        let mut bound = None;
        for c in &cs.cycles {
            let Some(d) = stride(&c.formula, j) else { continue 'cand };
            let dir = d.signum();
            if dir == 0 || (dir < 0 && !bidirectional) || strides.first().is_some_and(|s: &i64| s.signum() != dir) {
                continue 'cand;
            }
            let found = c.guard().iter().find_map(|p| bounding(p, j, dir, &cs.written).map(|b| (p.clone(), b)));
            let Some((p, b)) = found else { continue 'cand };
            strides.push(d);
            guards.push(p);
            bound.get_or_insert(b);
        }
        return TerminationVerdict::Terminates(Witness {
            counter: j.clone(),
            strides,
            bound: bound.unwrap_or_default(),
            guards,
        });
    }
    TerminationVerdict::Unknown
}

/// `d` when the cycle implies `j' = j + d` for a constant `d`.
fn stride(f: &PathFormula, j: &Symbol) -> Option<i64> {
    let l = f.value(j).as_lin()?.clone();
    (l.coeff(j) == 1 && l.terms.len() == 1).then_some(l.c0)
}

/// For a guard `a·j + r < 0` (or `≤`) with `r` invariant and `a` moving
/// with the counter, the bound `b` in `j < b` or `j > b` form.
fn bounding(p: &Pred, j: &Symbol, dir: i64, written: &BTreeSet<Symbol>) -> Option<Lin> {
    let (d, op) = p.difference()?;
    let d = match op {
        RelOp::Lt | RelOp::Le => d,
        RelOp::Gt | RelOp::Ge => d.scale(-1),
        RelOp::Eq | RelOp::Ne => return None,
    };
    let a = d.coeff(j);
    if a.signum() != dir {
        return None;
    }
    let rest = d.without(j);
    if rest.terms.keys().any(|v| written.contains(v)) {
        return None;
    }
    // j < -rest / a, or -j + rest < 0 i.e. j > rest
    Some(if a > 0 { rest.scale(-1) } else { rest })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum NestedPolicy {
    /// Loops containing loops are unknown.
    #[default]
    Basic,
    /// A dependency-free, terminating inner loop collapses into one step.
    SummaryAssisted,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct OracleConfig {
    pub nested: NestedPolicy,
    pub bidirectional: bool,
    pub cycle_cap: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { nested: NestedPolicy::Basic, bidirectional: true, cycle_cap: DEFAULT_CYCLE_CAP }
    }
}

/// Everything learned about one `while` statement.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LoopJudgement {
    pub path: StmtPath,
    pub verdict: TerminationVerdict,
    pub cycles: Result<CycleSet, CycleError>,
    pub terms: Option<TermTypes>,
    pub df: Option<DfVerdict>,
    pub summary: Option<LoopSummary>,
}

impl LoopJudgement {
    pub fn is_dependency_free(&self) -> bool {
        self.df == Some(DfVerdict::DependencyFree)
    }
}

/// Judges the `while` statement `s` found at `path`. `may_alias` tells
/// whether two array variables may share storage.
pub fn judge_loop(
    s: &Stmt,
    path: &StmtPath,
    cfg: &OracleConfig,
    may_alias: &dyn Fn(&Symbol, &Symbol) -> bool,
) -> LoopJudgement {
    let g = cfg_of_stmt(s, path);
    let loops = find_loops(&g);
    let outer = loops
        .iter()
        .find(|l| l.path.as_ref() == Some(path))
        .cloned()
        .expect("a while statement forms a loop");
    let collapse = |n: NodeId| -> Option<Collapsed> {
        if cfg.nested != NestedPolicy::SummaryAssisted {
            return None;
        }
        let inner_path = g.node(n).path.clone()?;
        let inner = stmt_at_below(s, path, &inner_path)?;
        let j = judge_loop(inner, &inner_path, cfg, may_alias);
        if !(j.verdict.terminates() && j.is_dependency_free()) {
            return None;
        }
        let StmtKind::While { body, .. } = &inner.kind else { return None };
        Some(Collapsed { written: block_writes(body) })
    };
    let cycles = extract_cycles_with(&outer, &g, cfg.cycle_cap, &collapse);
    let Ok(cs) = &cycles else {
        return LoopJudgement { path: path.clone(), verdict: TerminationVerdict::Unknown, cycles, terms: None, df: None, summary: None };
    };
    let verdict = check_termination(cs, cfg.bidirectional);
    let terms = classify_terms(cs).ok();
    let df = terms.as_ref().map(|tt| df_check_with(cs, tt, may_alias));
    let summary = match (&terms, &df) {
        (Some(tt), Some(DfVerdict::DependencyFree)) => summarize(cs, tt).ok(),
        _ => None,
    };
    LoopJudgement { path: path.clone(), verdict, cycles, terms, df, summary }
}

/// The statement at `target`, a path that extends `at`, the path of `s`.
fn stmt_at_below<'a>(s: &'a Stmt, at: &StmtPath, target: &StmtPath) -> Option<&'a Stmt> {
    let rest = target.0.strip_prefix(at.0.as_slice())?;
    let mut cur = s;
    let mut steps = rest;
    while let [sel, idx, tail @ ..] = steps {
        let inner = match (&cur.kind, sel) {
            (StmtKind::If { then_branch, .. }, 0) => then_branch,
            (StmtKind::If { else_branch, .. }, 1) => else_branch,
            (StmtKind::While { body, .. }, 0) => body,
            _ => return None,
        };
        cur = inner.get(*idx as usize)?;
        steps = tail;
    }
    steps.is_empty().then_some(cur)
}
