//! Dependence facts and the per-statement gen/kill functions.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::alias::Context;
use crate::hierarchy::Dispatch;
use crate::lang::ast::{Assign, Atom, Call, Stmt, StmtKind, RET};
use crate::repr::{DivergenceCause, MethodId, Representative, VarId};

/// `(dep, src)`: `dep` may depend on the entry value of `src`. With
/// `src = ⊥` the fact records possible divergence and carries its cause.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Fact {
    pub dep: Representative,
    pub src: Representative,
    pub cause: Option<DivergenceCause>,
}

impl Fact {
    pub fn new(dep: Representative, src: Representative) -> Fact {
        Fact { dep, src, cause: None }
    }

    pub fn bottom(dep: Representative, cause: DivergenceCause) -> Fact {
        Fact { dep, src: Representative::Bottom, cause: Some(cause) }
    }

    pub fn is_divergent(&self) -> bool {
        self.src == Representative::Bottom
    }

    pub fn display_in<'a>(&'a self, ctx: Option<&'a MethodId>) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Fact, Option<&'a MethodId>);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "({}, {}", self.0.dep.display_in(self.1), self.0.src.display_in(self.1))?;
                if let Some(c) = self.0.cause {
                    write!(f, " [{}]", c.keyword())?;
                }
                f.write_str(")")
            }
        }
        D(self, ctx)
    }
}

pub type FactSet = BTreeSet<Fact>;

/// Caller-visible facts of a method: nothing about its locals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MethodSummary {
    pub method: MethodId,
    pub facts: FactSet,
}

pub type Summaries = BTreeMap<MethodId, MethodSummary>;

/// Local effect of a statement: `gen` pairs to compose with the incoming
/// facts, and the dependents whose facts are killed.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Transfer {
    pub gen: Vec<Fact>,
    pub kill: Vec<Representative>,
}

/// Extensions of the plain gen/kill table.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TransferOptions {
    /// Field and array accesses also depend on their base and index, and
    /// virtual calls on their receiver, so that a divergent address or
    /// dispatch is tracked.
    pub address_deps: bool,
}

impl Default for TransferOptions {
    fn default() -> Self {
        TransferOptions { address_deps: true }
    }
}

/// The gen/kill table with the default options.
pub fn transfer(cx: &Context, m: &MethodId, s: &Stmt, summaries: &Summaries) -> Transfer {
    transfer_with(cx, m, s, summaries, TransferOptions::default())
}

pub fn transfer_with(cx: &Context, m: &MethodId, s: &Stmt, summaries: &Summaries, opts: TransferOptions) -> Transfer {
    let var = |x: &str| cx.var_rep(m, x);
    let addr = opts.address_deps;
    let mut t = Transfer::default();
    let mut gen = |dep: &Representative, src: Representative| t.gen.push(Fact::new(dep.clone(), src));
    match &s.kind {
        StmtKind::Assign(a) => {
            match a {
                Assign::Const { .. } => {}
                Assign::Copy { dst, src } | Assign::Unary { dst, src, .. } => gen(&var(dst), var(src)),
                Assign::Binary { dst, lhs, rhs, .. } => {
                    for x in [lhs, rhs] {
                        if let Atom::Var(x) = x {
                            gen(&var(dst), var(x));
                        }
                    }
                }
                Assign::FieldRead { dst, obj, field } => {
                    let d = var(dst);
                    if let Some(r) = cx.field_rep(m, obj, field) {
                        gen(&d, r);
                    }
                    if addr {
                        gen(&d, var(obj));
                    }
                }
                Assign::ArrayRead { dst, array, index } => {
                    let d = var(dst);
                    if let Some(r) = cx.elem_rep(m, array) {
                        gen(&d, r);
                    }
                    if addr {
                        gen(&d, var(array));
                        gen(&d, var(index));
                    }
                }
                Assign::FieldWrite { obj, field, src } => {
                    if let Some(r) = cx.field_rep(m, obj, field) {
                        if let Atom::Var(x) = src {
                            gen(&r, var(x));
                        }
                        if addr {
                            gen(&r, var(obj));
                        }
                    }
                }
                Assign::ArrayWrite { array, index, src } => {
                    if let Some(r) = cx.elem_rep(m, array) {
                        if let Atom::Var(x) = src {
                            gen(&r, var(x));
                        }
                        if addr {
                            gen(&r, var(array));
                            gen(&r, var(index));
                        }
                    }
                }
            }
            if let Some(d) = a.scalar_dst() {
                t.kill.push(var(d));
            }
        }
        StmtKind::Return(a) => {
            if let Atom::Var(x) = a {
                gen(&var(RET), var(x));
            }
        }
        StmtKind::Call(c) => {
            t.gen = call_gen(cx, m, c, summaries, addr);
            t.kill.push(var(&c.target));
        }
        StmtKind::Bottom(b) => {
            for r in &b.targets {
                t.gen.push(Fact::bottom(r.clone(), b.cause));
            }
            t.kill.extend(b.targets.iter().filter(|r| matches!(r, Representative::Scalar(_))).cloned());
        }
        StmtKind::If { .. } | StmtKind::While { .. } => {}
    }
    t
}

/// `summary(m)[Y/X, r/ret]` for every possible callee; externs left in the
/// program (safe-listed) relate every output to every input.
fn call_gen(cx: &Context, m: &MethodId, c: &Call, summaries: &Summaries, dispatch_deps: bool) -> Vec<Fact> {
    let mut out = BTreeSet::new();
    let r = cx.var_rep(m, &c.target);
    let resolved = cx.resolve(m, c);
    for t in &resolved.targets {
        let Some(info) = cx.method(t) else { continue };
        if info.is_extern {
            let mut outs = BTreeSet::new();
            let mut ins = BTreeSet::new();
            outs.insert(r.clone());
            for a in &c.args {
                let reach = cx.rlv(m, a);
                ins.insert(cx.var_rep(m, a));
                ins.extend(reach.iter().cloned());
                outs.extend(reach);
            }
            for o in &outs {
                for i in &ins {
                    out.insert(Fact::new(o.clone(), i.clone()));
                }
            }
            continue;
        }
        let Some(sum) = summaries.get(t) else { continue };
        let map = |rep: &Representative, as_dep: bool| -> Option<Representative> {
            match rep {
                Representative::Scalar(v) if &v.method == t => {
                    if v.is_ret() {
                        return Some(r.clone());
                    }
                    if as_dep {
                        return None;
                    }
                    let k = info.formals.iter().position(|(f, _)| *f == v.name)?;
                    Some(cx.var_rep(m, &c.args[k]))
                }
                other => Some(other.clone()),
            }
        };
        for f in &sum.facts {
            if let (Some(dep), Some(src)) = (map(&f.dep, true), map(&f.src, false)) {
                out.insert(Fact { dep, src, cause: f.cause });
            }
        }
    }
    if dispatch_deps && resolved.dispatch == Dispatch::Virtual {
        if let Some(recv) = c.args.first() {
            let recv = cx.var_rep(m, recv);
            for w in cx.call_written(m, c) {
                out.insert(Fact::new(w, recv.clone()));
            }
        }
    }
    out.into_iter().collect()
}

/// `(gen(s), kill(s, d))` with gen as composed facts.
pub fn gen_kill(cx: &Context, m: &MethodId, s: &Stmt, d: &FactSet, summaries: &Summaries) -> (FactSet, FactSet) {
    let t = transfer(cx, m, s, summaries);
    let gen = t.gen.into_iter().collect();
    let kill = d.iter().filter(|f| t.kill.contains(&f.dep)).cloned().collect();
    (gen, kill)
}

/// `{(x, y) | (x, z) ∈ gen ∧ (z, y) ∈ d} ∪ (d − kill)`, reading `(⊥, ⊥)`
/// as present in every `d`.
pub fn compose(t: &Transfer, d: &FactSet) -> FactSet {
    let mut out: FactSet = d.iter().filter(|f| !t.kill.contains(&f.dep)).cloned().collect();
    for g in &t.gen {
        if g.src == Representative::Bottom {
            out.insert(g.clone());
            continue;
        }
        for f in d.iter().filter(|f| f.dep == g.src) {
            out.insert(Fact { dep: g.dep.clone(), src: f.src.clone(), cause: f.cause });
        }
    }
    out
}

pub fn data_dep(cx: &Context, m: &MethodId, d: &FactSet, s: &Stmt, summaries: &Summaries) -> FactSet {
    compose(&transfer(cx, m, s, summaries), d)
}

/// Scalar representatives of a method's formals and declared locals.
pub fn locals(cx: &Context, m: &MethodId) -> BTreeSet<Representative> {
    cx.method(m)
        .map(|info| {
            info.vars
                .keys()
                .filter(|v| v.as_str() != RET)
                .map(|v| Representative::Scalar(VarId::new(m, v)))
                .collect()
        })
        .unwrap_or_default()
}

/// Drops facts about the method's locals, and facts reading a non-formal
/// local, which no caller can name.
pub fn strip_locals(cx: &Context, m: &MethodId, facts: &FactSet) -> FactSet {
    let locals = locals(cx, m);
    let formals: BTreeSet<Representative> = cx
        .method(m)
        .map(|info| info.formals.iter().map(|(f, _)| Representative::Scalar(VarId::new(m, f))).collect())
        .unwrap_or_default();
    facts
        .iter()
        .filter(|f| !locals.contains(&f.dep) && (!locals.contains(&f.src) || formals.contains(&f.src)))
        .cloned()
        .collect()
}
