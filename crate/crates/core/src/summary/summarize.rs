//! Closed summaries of dependency-free loops.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::lang::ast::RelOp;
use crate::summary::classify::{Induction, TermTypes};
use crate::summary::term::{Lin, Pred, Term};
use crate::termination::CycleSet;
use crate::symbol::Symbol;

/// `m' = m + Σ d · num(π, i, i' - 1)` over the cycles that move `m`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CounterFormula {
    pub var: Symbol,
    pub terms: Vec<(Lin, Vec<Pred>)>,
}

/// `∀x ∈ [i..i'-1]. π[x/i] ⟹ a'[x] = e` for each writing cycle.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ArrayFormula {
    pub array: Symbol,
    pub cases: Vec<(Vec<Pred>, Term)>,
}

/// How the exit value of the induction variable is known.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ExitBound {
    /// `i' = max(i, b)` for `i < b`, `max(i, b + 1)` for `i <= b`.
    Closed { op: RelOp, bound: Lin },
    Symbolic,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LoopSummary {
    pub induction: Induction,
    /// Guard of every cycle, in cycle order.
    pub guards: Vec<Vec<Pred>>,
    pub counters: Vec<CounterFormula>,
    pub arrays: Vec<ArrayFormula>,
    pub exit: ExitBound,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SummaryError {
    NotDependencyFree,
}

impl fmt::Display for SummaryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("loop is not dependency-free")
    }
}

/// Applies the counter and write-array rules. The caller is expected to
/// have established dependency-freedom; a stale classification is refused.
pub fn summarize(cs: &CycleSet, tt: &TermTypes) -> Result<LoopSummary, SummaryError> {
    if crate::summary::df_check_with(cs, tt, &|_, _| false) != crate::summary::DfVerdict::DependencyFree {
        return Err(SummaryError::NotDependencyFree);
    }
    let guards: Vec<Vec<Pred>> = cs.cycles.iter().map(|c| c.guard().to_vec()).collect();
    let mut counters = Vec::new();
    for (v, steps) in &tt.counters {
        if matches!(&tt.induction, Induction::Var(i) if i == v) {
            continue;
        }
        let terms = steps
            .iter()
            .zip(&guards)
            .filter(|(d, _)| **d != Lin::constant(0))
            .map(|(d, g)| (d.clone(), g.clone()))
            .collect();
        counters.push(CounterFormula { var: v.clone(), terms });
    }
    let mut arrays = Vec::new();
    for a in &tt.write_arrays {
        let mut cases = Vec::new();
        for (c, g) in cs.cycles.iter().zip(&guards) {
            if let Some(w) = c.formula.arrays.iter().rev().find(|w| &w.array == a) {
                cases.push((g.clone(), w.value.clone()));
            }
        }
        arrays.push(ArrayFormula { array: a.clone(), cases });
    }
    let exit = closed_exit(&tt.induction, &guards, &cs.written);
    Ok(LoopSummary { induction: tt.induction.clone(), guards, counters, arrays, exit })
}

/// Closes `i'` when every cycle is entered through the same `i < b` or
/// `i <= b` header test with `b` invariant and `i` steps by one.
fn closed_exit(ind: &Induction, guards: &[Vec<Pred>], written: &BTreeSet<Symbol>) -> ExitBound {
    let Induction::Var(i) = ind else { return ExitBound::Symbolic };
    let Some(header) = guards.first().and_then(|g| g.first()) else { return ExitBound::Symbolic };
    if !guards.iter().all(|g| g.first() == Some(header)) {
        return ExitBound::Symbolic;
    }
    let Some((d, op)) = header.difference() else { return ExitBound::Symbolic };
    let (d, op) = match op {
        RelOp::Lt | RelOp::Le => (d, op),
        RelOp::Gt => (d.scale(-1), RelOp::Lt),
        RelOp::Ge => (d.scale(-1), RelOp::Le),
        _ => return ExitBound::Symbolic,
    };
    let rest = d.without(i);
    if d.coeff(i) != 1 || rest.terms.keys().any(|v| written.contains(v)) {
        return ExitBound::Symbolic;
    }
    ExitBound::Closed { op, bound: rest.scale(-1) }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EvalError {
    Unbound(Symbol),
    /// More than one cycle guard held at this iteration.
    NotExclusive { iteration: u64 },
    Diverges { limit: u64 },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Unbound(v) => write!(f, "no value for {v}"),
            EvalError::NotExclusive { iteration } => write!(f, "cycle guards overlap at iteration {iteration}"),
            EvalError::Diverges { limit } => write!(f, "no exit within {limit} iterations"),
        }
    }
}

/// The post-state a summary predicts.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SummaryValue {
    pub iterations: u64,
    /// Exit value of the induction base variable.
    pub exit: i64,
    pub counters: BTreeMap<Symbol, i64>,
    /// Written elements by index.
    pub arrays: BTreeMap<Symbol, BTreeMap<i64, i64>>,
}

impl ExitBound {
    pub fn eval(&self, i0: i64, env: &dyn Fn(&Symbol) -> Option<i64>) -> Option<i64> {
        match self {
            ExitBound::Closed { op, bound } => {
                let b = bound.eval(env)?;
                let b = if *op == RelOp::Le { b.checked_add(1)? } else { b };
                Some(i0.max(b))
            }
            ExitBound::Symbolic => None,
        }
    }
}

impl LoopSummary {
    /// Scalars the formulas read in the pre-state.
    pub fn inputs(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        out.insert(self.induction.base().clone());
        for g in self.guards.iter().flatten() {
            out.extend(g.vars());
        }
        for c in &self.counters {
            out.insert(c.var.clone());
            for (d, _) in &c.terms {
                out.extend(d.vars());
            }
        }
        for a in &self.arrays {
            for (_, e) in &a.cases {
                out.extend(e.vars());
            }
        }
        out
    }

    /// Evaluates the formulas at a concrete entry state. `num` is computed by
    /// counting the iterations whose guard holds; the exit is the first
    /// iteration at which no cycle guard holds.
    pub fn evaluate(&self, env: &dyn Fn(&Symbol) -> Option<i64>, limit: u64) -> Result<SummaryValue, EvalError> {
        let base = self.induction.base().clone();
        let stride = self.induction.stride();
        let b0 = env(&base).ok_or_else(|| EvalError::Unbound(base.clone()))?;
        for v in self.inputs() {
            if env(&v).is_none() {
                return Err(EvalError::Unbound(v));
            }
        }
        let at = |x: u64| b0.wrapping_add(stride.wrapping_mul(x as i64));
        let holds = |g: &[Pred], x: u64| -> bool {
            let cur = at(x);
            let e = |v: &Symbol| if *v == base { Some(cur) } else { env(v) };
            g.iter().all(|p| p.eval(&e).unwrap_or(false))
        };
        let mut n = 0u64;
        loop {
            let live = self.guards.iter().filter(|g| holds(g, n)).count();
            if live == 0 {
                break;
            }
            if live > 1 {
                return Err(EvalError::NotExclusive { iteration: n });
            }
            n += 1;
            if n > limit {
                return Err(EvalError::Diverges { limit });
            }
        }
        let num = |g: &[Pred]| (0..n).filter(|&x| holds(g, x)).count() as i64;
        let mut out = SummaryValue { iterations: n, exit: at(n), ..Default::default() };
        for c in &self.counters {
            let mut v = env(&c.var).unwrap_or(0);
            for (d, g) in &c.terms {
                let d = d.eval(env).unwrap_or(0);
                v = v.wrapping_add(d.wrapping_mul(num(g)));
            }
            out.counters.insert(c.var.clone(), v);
        }
        if let Induction::Var(i) = &self.induction {
            out.counters.insert(i.clone(), at(n));
        }
        for a in &self.arrays {
            let mut cells = BTreeMap::new();
            for x in 0..n {
                for (g, e) in &a.cases {
                    if holds(g, x) {
                        let cur = at(x);
                        let val = e.eval(&|v: &Symbol| if *v == base { Some(cur) } else { env(v) });
                        cells.insert(cur, val.unwrap_or(0));
                    }
                }
            }
            out.arrays.insert(a.array.clone(), cells);
        }
        Ok(out)
    }
}

/// A bound-variable name that does not clash with the formula's inputs.
fn bound_name(taken: &BTreeSet<Symbol>, pref: &str) -> Symbol {
    let mut k = 0;
    let mut name = String::from(pref);
    while taken.contains(name.as_str()) {
        name = alloc::format!("{pref}{k}");
        k += 1;
    }
    Symbol::from(name)
}

impl fmt::Display for LoopSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let taken = self.inputs();
        let x = bound_name(&taken, "x");
        let base = self.induction.base().clone();
        // bound variable and the range it runs over
        let (at, lo, hi) = match &self.induction {
            Induction::Var(i) => (Lin::var(&x), alloc::format!("{i}"), alloc::format!("{i}' - 1")),
            Induction::Fresh { base, stride } => {
                let k = bound_name(&taken, "k");
                writeln!(f, "iteration {k}: {base} = {base} + {stride}*{k}")?;
                (Lin::var(base).add(&Lin::var(&x).scale(*stride)), String::from("0"), alloc::format!("{k}' - 1"))
            }
        };
        let inst = |g: &[Pred]| -> String {
            if g.is_empty() {
                return String::from("true");
            }
            let parts: Vec<String> = g
                .iter()
                .map(|p| alloc::format!("{}", p.subst(&|v| if *v == base { Term::Lin(at.clone()) } else { Term::var(v) })))
                .collect();
            parts.join(" && ")
        };
        match &self.exit {
            ExitBound::Closed { op, bound } => {
                let b = if *op == RelOp::Le { bound.add(&Lin::constant(1)) } else { bound.clone() };
                writeln!(f, "{base}' = max({base}, {b})")?;
            }
            ExitBound::Symbolic => writeln!(f, "{base}' = first exit value")?,
        }
        for c in &self.counters {
            write!(f, "{}' = {}", c.var, c.var)?;
            for (d, g) in &c.terms {
                let d = if d.is_const() { alloc::format!("{}", d.c0) } else { alloc::format!("({d})") };
                write!(f, " + {d}*num({}, {lo}, {hi})", inst(g))?;
            }
            writeln!(f)?;
        }
        for a in &self.arrays {
            for (g, e) in &a.cases {
                let e = e.subst(&|v| if *v == base { Term::Lin(at.clone()) } else { Term::var(v) });
                writeln!(f, "forall {x} in [{lo}..{hi}]. {} => {}'[{at}] = {e}", inst(g), a.array)?;
            }
        }
        Ok(())
    }
}
