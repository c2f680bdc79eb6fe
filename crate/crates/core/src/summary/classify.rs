//! Term types of a loop and the dependency-free test.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::cfg::NodeId;
use crate::summary::term::{Lin, Pred, Term};
use crate::termination::CycleSet;
use crate::symbol::Symbol;

/// The loop's iteration variable.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Induction {
    /// A counter incremented by one in every cycle.
    Var(Symbol),
    /// A fresh iteration count `k` with `base = base₀ + stride·k`, for a
    /// counter whose common stride is not one.
    Fresh { base: Symbol, stride: i64 },
}

impl Induction {
    /// The program variable that moves with the iteration.
    pub fn base(&self) -> &Symbol {
        match self {
            Induction::Var(v) | Induction::Fresh { base: v, .. } => v,
        }
    }

    pub fn stride(&self) -> i64 {
        match self {
            Induction::Var(_) => 1,
            Induction::Fresh { stride, .. } => *stride,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TermTypes {
    /// Counters with their net change in each cycle, in cycle order.
    pub counters: BTreeMap<Symbol, Vec<Lin>>,
    pub induction: Induction,
    pub write_arrays: BTreeSet<Symbol>,
    /// Induction guards, deduplicated in first-seen order.
    pub guards: Vec<Pred>,
}

impl TermTypes {
    pub fn is_counter(&self, v: &str) -> bool {
        self.counters.contains_key(v)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ClassifyError {
    NoInductionVariable,
}

impl fmt::Display for ClassifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("no counter moves by the same constant in every cycle")
    }
}

/// Net change of `v` over a cycle when it is `v + d` with `d` invariant.
fn counter_step(value: &Term, v: &Symbol, written: &BTreeSet<Symbol>) -> Option<Lin> {
    let l = value.as_lin()?;
    if l.coeff(v) != 1 {
        return None;
    }
    let d = l.without(v);
    d.terms.keys().all(|u| !written.contains(u)).then_some(d)
}

pub fn classify_terms(cs: &CycleSet) -> Result<TermTypes, ClassifyError> {
    let mut candidates = BTreeSet::new();
    for c in &cs.cycles {
        candidates.extend(c.formula.effective_updates().map(|(v, _)| v.clone()));
    }
    let mut counters = BTreeMap::new();
    for v in candidates {
        let steps: Option<Vec<Lin>> =
            cs.cycles.iter().map(|c| counter_step(&c.formula.value(&v), &v, &cs.written)).collect();
        if let Some(steps) = steps {
            counters.insert(v, steps);
        }
    }
    let constant_stride = |steps: &Vec<Lin>| -> Option<i64> {
        let first = steps.first()?;
        (first.is_const() && first.c0 != 0 && steps.iter().all(|d| d == first)).then_some(first.c0)
    };
    // Prefer a counter the loop test mentions, then unit stride, then name.
    let header: BTreeSet<Symbol> =
        cs.cycles.first().and_then(|c| c.guard().first()).map(|p| p.vars()).unwrap_or_default();
    let chosen = counters
        .iter()
        .filter_map(|(v, steps)| constant_stride(steps).map(|c| (v, c)))
        .min_by_key(|(v, c)| (!header.contains(*v), *c != 1, (*v).clone()));
    let induction = match chosen {
        Some((v, 1)) => Induction::Var(v.clone()),
        Some((v, stride)) => Induction::Fresh { base: v.clone(), stride },
        None => return Err(ClassifyError::NoInductionVariable),
    };
    let base = induction.base().clone();
    let index = Term::var(&base);
    let mut write_arrays = BTreeSet::new();
    let arrays: BTreeSet<Symbol> =
        cs.cycles.iter().flat_map(|c| c.formula.arrays.iter().map(|w| w.array.clone())).collect();
    let blocked = |vars: BTreeSet<Symbol>, arrays: &BTreeSet<Symbol>| {
        vars.iter().any(|u| (counters.contains_key(u) && *u != base) || arrays.contains(u) || (cs.written.contains(u) && *u != base))
    };
    for a in &arrays {
        if cs.written.contains(a) {
            continue;
        }
        let ok = cs.cycles.iter().all(|c| {
            c.formula
                .arrays
                .iter()
                .filter(|w| &w.array == a)
                .all(|w| w.index == index && !blocked(w.value.vars(), &arrays))
        });
        if ok {
            write_arrays.insert(a.clone());
        }
    }
    let mut guards: Vec<Pred> = Vec::new();
    for c in &cs.cycles {
        for p in c.guard() {
            if !blocked(p.vars(), &write_arrays) && matches!(p.difference(), Some(_)) && !guards.contains(p) {
                guards.push(p.clone());
            }
        }
    }
    Ok(TermTypes { counters, induction, write_arrays, guards })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DfVerdict {
    DependencyFree,
    /// The failed constraint (1 updates, 2 array writes, 3 guards) and the
    /// offending node and atom.
    Violation { constraint: u8, node: Option<NodeId>, witness: String },
}

impl fmt::Display for DfVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DfVerdict::DependencyFree => f.write_str("dependency-free"),
            DfVerdict::Violation { constraint, witness, .. } => {
                write!(f, "violates constraint {constraint}: {witness}")
            }
        }
    }
}

/// Conservative: distinct write arrays are assumed to alias.
pub fn df_check(cs: &CycleSet, tt: &TermTypes) -> DfVerdict {
    df_check_with(cs, tt, &|a, b| a != b)
}

pub fn df_check_with(cs: &CycleSet, tt: &TermTypes, may_alias: &dyn Fn(&Symbol, &Symbol) -> bool) -> DfVerdict {
    let violation = |constraint, node, witness: String| DfVerdict::Violation { constraint, node, witness };
    for c in &cs.cycles {
        for (v, u) in c.formula.effective_updates() {
            if !tt.is_counter(v) {
                return violation(1, u.origin, alloc::format!("{v}' = {}", u.term));
            }
        }
        if let Some((e, n)) = c.formula.effects.first() {
            return violation(1, *n, alloc::format!("{e:?}"));
        }
    }
    for c in &cs.cycles {
        for w in &c.formula.arrays {
            if !tt.write_arrays.contains(&w.array) {
                return violation(2, w.origin, alloc::format!("{}'[{}] = {}", w.array, w.index, w.value));
            }
        }
    }
    let wa: Vec<&Symbol> = tt.write_arrays.iter().collect();
    for (k, a) in wa.iter().enumerate() {
        for b in &wa[k + 1..] {
            if may_alias(a, b) {
                return violation(2, None, alloc::format!("{a} may alias {b}"));
            }
        }
    }
    for c in &cs.cycles {
        for p in c.guard() {
            if !tt.guards.contains(p) {
                return violation(3, None, alloc::format!("{p}"));
            }
        }
    }
    DfVerdict::DependencyFree
}
