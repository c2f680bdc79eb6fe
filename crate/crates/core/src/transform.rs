//! φ: rewrites divergent loops and calls into parallel `⊥` assignments.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::alias::Context;
use crate::lang::ast::{BottomAssign, Block, Call, Program, Stmt, StmtKind, StmtPath};
use crate::repr::{DivergenceCause, MethodId, Representative};
use crate::symbol::Symbol;
use crate::termination::{judge_loop, LoopJudgement, OracleConfig};

#[derive(Clone, Debug, Default)]
pub struct TransformConfig {
    /// A: methods assumed divergent (externs and configured names, minus
    /// the safe list).
    pub api: BTreeSet<MethodId>,
    /// R: recursive methods not discharged.
    pub recursion: BTreeSet<MethodId>,
    pub oracle: OracleConfig,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Introduced {
    pub method: MethodId,
    pub path: StmtPath,
    pub cause: DivergenceCause,
}

#[derive(Clone, Debug)]
pub struct TransformOutput {
    pub program: Program,
    /// Every loop judged, innermost first within a method.
    pub loops: Vec<(MethodId, LoopJudgement)>,
    pub introduced: Vec<Introduced>,
}

pub fn phi(p: &Program, cx: &Context, cfg: &TransformConfig) -> TransformOutput {
    let mut out = TransformOutput { program: p.clone(), loops: Vec::new(), introduced: Vec::new() };
    for m in &mut out.program.methods {
        let id = m.id();
        if let Some(body) = m.body.take() {
            let mut t = Phi { cx, cfg, method: &id, loops: &mut out.loops, introduced: &mut out.introduced };
            m.body = Some(t.block(body, &StmtPath::default()));
        }
    }
    out
}

struct Phi<'a> {
    cx: &'a Context,
    cfg: &'a TransformConfig,
    method: &'a MethodId,
    loops: &'a mut Vec<(MethodId, LoopJudgement)>,
    introduced: &'a mut Vec<Introduced>,
}

impl Phi<'_> {
    fn block(&mut self, b: Block, prefix: &StmtPath) -> Block {
        b.into_iter().enumerate().map(|(k, s)| self.stmt(s, prefix.child(k as u32))).collect()
    }

    fn stmt(&mut self, s: Stmt, path: StmtPath) -> Stmt {
        let span = s.span;
        match s.kind {
            StmtKind::If { cond, then_branch, else_branch } => {
                let then_branch = self.block(then_branch, &path.child(0));
                let else_branch = self.block(else_branch, &path.child(1));
                Stmt::at(StmtKind::If { cond, then_branch, else_branch }, span)
            }
            StmtKind::While { cond, body } => {
                let body = self.block(body, &path.child(0));
                let w = Stmt::at(StmtKind::While { cond, body }, span);
                let cx = self.cx;
                let m = self.method;
                let may_alias = |a: &Symbol, b: &Symbol| match (cx.part_of(m, a), cx.part_of(m, b)) {
                    (Some(x), Some(y)) => x == y,
                    _ => a == b,
                };
                let j = judge_loop(&w, &path, &self.cfg.oracle, &may_alias);
                let keep = j.verdict.terminates();
                self.loops.push((m.clone(), j));
                if keep {
                    return w;
                }
                let targets = cx.written_reps(m, &w);
                self.bottom(targets, DivergenceCause::Loop, path, span)
            }
            StmtKind::Call(c) => match self.divergent(&c) {
                Some((targets, cause)) => self.bottom(targets, cause, path, span),
                None => Stmt::at(StmtKind::Call(c), span),
            },
            kind => Stmt::at(kind, span),
        }
    }

    fn divergent(&self, c: &Call) -> Option<(BTreeSet<Representative>, DivergenceCause)> {
        divergent_call(self.cx, self.method, c, &self.cfg.api, &self.cfg.recursion)
    }

    fn bottom(
        &mut self,
        targets: BTreeSet<Representative>,
        cause: DivergenceCause,
        path: StmtPath,
        span: crate::lang::ast::Span,
    ) -> Stmt {
        self.introduced.push(Introduced { method: self.method.clone(), path, cause });
        let b = BottomAssign { targets: targets.into_iter().collect(), cause };
        Stmt::at(StmtKind::Bottom(b), span)
    }
}

/// The cause and `⊥` targets of a call some callee of which is an API
/// method or recursive.
pub fn divergent_call(
    cx: &Context,
    m: &MethodId,
    c: &Call,
    api: &BTreeSet<MethodId>,
    recursion: &BTreeSet<MethodId>,
) -> Option<(BTreeSet<Representative>, DivergenceCause)> {
    let targets = &cx.resolve(m, c).targets;
    if targets.iter().any(|t| api.contains(t)) {
        let mut w = cx.api_written(m, c);
        if targets.iter().any(|t| !api.contains(t)) {
            w.extend(cx.call_written_substituted(m, c));
        }
        Some((w, DivergenceCause::Api))
    } else if targets.iter().any(|t| recursion.contains(t)) {
        Some((cx.call_written_substituted(m, c), DivergenceCause::Recursion))
    } else {
        None
    }
}

/// w̃ of `s` after φ: divergent calls contribute their `⊥` targets. Loops
/// contribute their body either way, since a replaced loop's targets are
/// the write set of its transformed body.
pub fn phi_written(
    cx: &Context,
    m: &MethodId,
    s: &Stmt,
    api: &BTreeSet<MethodId>,
    recursion: &BTreeSet<MethodId>,
) -> BTreeSet<Representative> {
    let mut out = BTreeSet::new();
    let mut stack = alloc::vec![s];
    while let Some(s) = stack.pop() {
        match &s.kind {
            StmtKind::Call(c) => match divergent_call(cx, m, c, api, recursion) {
                Some((w, _)) => out.extend(w),
                None => out.extend(cx.call_written(m, c)),
            },
            StmtKind::If { then_branch, else_branch, .. } => stack.extend(then_branch.iter().chain(else_branch)),
            StmtKind::While { body, .. } => stack.extend(body.iter()),
            _ => out.extend(cx.written_reps(m, s)),
        }
    }
    out
}
