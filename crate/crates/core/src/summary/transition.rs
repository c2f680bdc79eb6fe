//! Transition constraints and their composition.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::cfg::NodeId;
use crate::lang::ast::{Assign, Atom, BinOp, Call, Cond, Const, Stmt, StmtKind, UnOp};
use crate::repr::Representative;
use crate::summary::term::{Lin, Pred, Term};
use crate::symbol::Symbol;

/// `a'[index] = value`, evaluated in the pre-state.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ArrayWrite {
    pub array: Symbol,
    pub index: Term,
    pub value: Term,
    pub origin: Option<NodeId>,
}

/// Effects outside the scalar and array-element vocabulary.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Effect {
    FieldWrite { obj: Symbol, field: Symbol },
    Call { callee: Symbol },
    Bottom,
    Return,
    /// An inner loop collapsed to a single step.
    Loop,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Update {
    pub term: Term,
    pub origin: Option<NodeId>,
}

/// A conjunction of a guard with functional updates over pre-state values.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct PathFormula {
    pub guard: Vec<Pred>,
    pub updates: BTreeMap<Symbol, Update>,
    pub arrays: Vec<ArrayWrite>,
    pub effects: Vec<(Effect, Option<NodeId>)>,
    /// Arrays read anywhere on the path.
    pub reads: Vec<(Symbol, Option<NodeId>)>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ComposeError {
    PcMismatch { post: NodeId, pre: NodeId },
}

impl fmt::Display for ComposeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComposeError::PcMismatch { post, pre } => {
                write!(f, "cannot compose: post-location {post} differs from pre-location {pre}")
            }
        }
    }
}

impl PathFormula {
    pub fn identity() -> PathFormula {
        PathFormula::default()
    }

    /// The post-state value of `v` in terms of the pre-state.
    pub fn value(&self, v: &Symbol) -> Term {
        match self.updates.get(v) {
            Some(u) => u.term.clone(),
            None => Term::var(v),
        }
    }

    /// Updates other than `x' = x`.
    pub fn effective_updates(&self) -> impl Iterator<Item = (&Symbol, &Update)> {
        self.updates.iter().filter(|(v, u)| u.term != Term::var(v))
    }

    /// The atoms `a(φ)`: guard predicates followed by update equalities.
    pub fn atoms(&self) -> Vec<String> {
        let mut out: Vec<String> = self.guard.iter().map(|p| alloc::format!("{p}")).collect();
        for (v, u) in self.effective_updates() {
            out.push(alloc::format!("{v}' = {}", u.term));
        }
        for w in &self.arrays {
            out.push(alloc::format!("{}'[{}] = {}", w.array, w.index, w.value));
        }
        out
    }

    /// Sequential composition `∃Y. self[Y/X'] ∧ next[Y/X]`.
    pub fn then(&self, next: &PathFormula) -> PathFormula {
        let sub = |v: &Symbol| self.value(v);
        let mut out = self.clone();
        out.guard.extend(next.guard.iter().map(|p| p.subst(&sub)));
        for (v, u) in &next.updates {
            out.updates.insert(v.clone(), Update { term: u.term.subst(&sub), origin: u.origin });
        }
        out.updates.retain(|v, u| u.term != Term::var(v));
        for w in &next.arrays {
            out.arrays.push(ArrayWrite {
                array: w.array.clone(),
                index: w.index.subst(&sub),
                value: w.value.subst(&sub),
                origin: w.origin,
            });
        }
        out.effects.extend(next.effects.iter().cloned());
        out.reads.extend(next.reads.iter().cloned());
        out
    }

    pub fn assume(cond: &Cond, outcome: bool) -> PathFormula {
        let p = Pred::new(Term::Lin(Lin::of_atom(&cond.lhs)), cond.op, Term::Lin(Lin::of_atom(&cond.rhs)));
        PathFormula { guard: alloc::vec![if outcome { p } else { p.negate() }], ..Default::default() }
    }

    /// The primitive transition of one statement; compound statements are
    /// handled by the graph walk.
    pub fn of_stmt(s: &Stmt, origin: Option<NodeId>) -> PathFormula {
        let mut f = PathFormula::identity();
        let set = |f: &mut PathFormula, v: &Symbol, t: Term| {
            f.updates.insert(v.clone(), Update { term: t, origin });
        };
        match &s.kind {
            StmtKind::Assign(a) => match a {
                Assign::Const { dst, value } => {
                    let t = match value {
                        Const::Int(n) => Term::constant(*n),
                        Const::Null => Term::constant(0),
                        Const::New(_) | Const::NewArray(..) => Term::opaque([]),
                    };
                    set(&mut f, dst, t);
                }
                Assign::Copy { dst, src } => set(&mut f, dst, Term::var(src)),
                Assign::Unary { dst, op, src } => {
                    let t = match op {
                        UnOp::Neg => Term::Lin(Lin::var(src).scale(-1)),
                        UnOp::Not => Term::opaque([src.clone()]),
                    };
                    set(&mut f, dst, t);
                }
                Assign::Binary { dst, op, lhs, rhs } => set(&mut f, dst, binary(*op, lhs, rhs)),
                Assign::FieldRead { dst, obj, .. } => set(&mut f, dst, Term::opaque([obj.clone()])),
                Assign::FieldWrite { obj, field, .. } => {
                    f.effects.push((Effect::FieldWrite { obj: obj.clone(), field: field.clone() }, origin));
                }
                Assign::ArrayRead { dst, array, index } => {
                    f.reads.push((array.clone(), origin));
                    set(&mut f, dst, Term::opaque([array.clone(), index.clone()]));
                }
                Assign::ArrayWrite { array, index, src } => {
                    f.arrays.push(ArrayWrite {
                        array: array.clone(),
                        index: Term::var(index),
                        value: Term::Lin(Lin::of_atom(src)),
                        origin,
                    });
                }
            },
            StmtKind::Call(Call { target, callee, args }) => {
                f.effects.push((Effect::Call { callee: callee.clone() }, origin));
                set(&mut f, target, Term::opaque(args.iter().cloned()));
            }
            StmtKind::Bottom(b) => {
                f.effects.push((Effect::Bottom, origin));
                for t in &b.targets {
                    if let Representative::Scalar(var) = t {
                        set(&mut f, &var.name, Term::opaque([]));
                    }
                }
            }
            StmtKind::Return(_) => f.effects.push((Effect::Return, origin)),
            StmtKind::If { .. } | StmtKind::While { .. } => {}
        }
        f
    }
}

fn binary(op: BinOp, lhs: &Atom, rhs: &Atom) -> Term {
    let (l, r) = (Lin::of_atom(lhs), Lin::of_atom(rhs));
    match op {
        BinOp::Add => Term::Lin(l.add(&r)),
        BinOp::Sub => Term::Lin(l.sub(&r)),
        BinOp::Mul if l.is_const() => Term::Lin(r.scale(l.c0)),
        BinOp::Mul if r.is_const() => Term::Lin(l.scale(r.c0)),
        _ => {
            if l.is_const() && r.is_const() {
                if let Some(v) = op.eval(l.c0, r.c0) {
                    return Term::constant(v);
                }
            }
            let mut deps = l.vars();
            deps.extend(r.vars());
            Term::opaque(deps)
        }
    }
}

impl fmt::Display for PathFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atoms = self.atoms();
        if atoms.is_empty() {
            return f.write_str("true");
        }
        f.write_str(&atoms.join(" && "))
    }
}

/// `pc = pre ∧ π ∧ u ∧ pc' = post`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Transition {
    pub pre: Option<NodeId>,
    pub formula: PathFormula,
    pub post: Option<NodeId>,
}

impl Transition {
    pub fn new(pre: Option<NodeId>, formula: PathFormula, post: Option<NodeId>) -> Transition {
        Transition { pre, formula, post }
    }

    pub fn guard(&self) -> &[Pred] {
        &self.formula.guard
    }

    pub fn updates(&self) -> &BTreeMap<Symbol, Update> {
        &self.formula.updates
    }
}

impl From<PathFormula> for Transition {
    fn from(formula: PathFormula) -> Transition {
        Transition { pre: None, formula, post: None }
    }
}

/// Composes two transitions, checking that their locations meet.
pub fn compose(t1: &Transition, t2: &Transition) -> Result<Transition, ComposeError> {
    if let (Some(post), Some(pre)) = (t1.post, t2.pre) {
        if post != pre {
            return Err(ComposeError::PcMismatch { post, pre });
        }
    }
    Ok(Transition { pre: t1.pre, formula: t1.formula.then(&t2.formula), post: t2.post })
}

/// Composes a path of transitions left to right.
pub fn compose_path(ts: &[Transition]) -> Result<Transition, ComposeError> {
    let mut acc = Transition::new(ts.first().and_then(|t| t.pre), PathFormula::identity(), ts.first().and_then(|t| t.pre));
    for t in ts {
        acc = compose(&acc, t)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::ast::RelOp;
    use alloc::string::ToString;
    use alloc::vec;

    fn v(s: &str) -> Symbol {
        Symbol::new(s)
    }

    fn assign(dst: &str, op: BinOp, l: Atom, r: Atom) -> PathFormula {
        PathFormula::of_stmt(
            &Stmt::new(StmtKind::Assign(Assign::Binary { dst: v(dst), op, lhs: l, rhs: r })),
            None,
        )
    }

    #[test]
    fn substitution_example() {
        let t1 = assign("x", BinOp::Add, Atom::Var(v("x")), Atom::Int(1));
        let t2 = PathFormula::of_stmt(&Stmt::new(StmtKind::Assign(Assign::Copy { dst: v("y"), src: v("x") })), None);
        let c = t1.then(&t2);
        assert!(c.guard.is_empty());
        assert_eq!(c.to_string(), "x' = x + 1 && y' = x + 1");
    }

    #[test]
    fn identity_is_neutral() {
        let t = assign("x", BinOp::Mul, Atom::Var(v("x")), Atom::Int(2));
        assert_eq!(PathFormula::identity().then(&t), t);
        assert_eq!(t.then(&PathFormula::identity()), t);
    }

    #[test]
    fn counter_loop_cycle() {
        let cond = Cond { lhs: Atom::Var(v("i")), op: RelOp::Lt, rhs: Atom::Var(v("n")) };
        let ts = vec![
            Transition::new(Some(3), PathFormula::assume(&cond, true), Some(4)),
            Transition::new(Some(4), assign("i", BinOp::Add, Atom::Var(v("i")), Atom::Int(1)), Some(5)),
            Transition::new(Some(5), assign("j", BinOp::Add, Atom::Var(v("j")), Atom::Int(3)), Some(3)),
        ];
        let c = compose_path(&ts).unwrap();
        assert_eq!((c.pre, c.post), (Some(3), Some(3)));
        assert_eq!(c.formula.to_string(), "i < n && i' = i + 1 && j' = j + 3");
        let bad = compose(&ts[0], &ts[2]);
        assert_eq!(bad, Err(ComposeError::PcMismatch { post: 4, pre: 5 }));
    }

    #[test]
    fn guards_see_earlier_updates() {
        let inc = assign("i", BinOp::Add, Atom::Var(v("i")), Atom::Int(2));
        let cond = Cond { lhs: Atom::Var(v("i")), op: RelOp::Le, rhs: Atom::Int(7) };
        let c = inc.then(&PathFormula::assume(&cond, false));
        assert_eq!(c.guard[0].to_string(), "i + 2 > 7");
    }
}
