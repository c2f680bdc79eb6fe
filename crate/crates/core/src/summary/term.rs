//! Symbolic terms over pre-state scalars.

use alloc::collections::{BTreeMap, BTreeSet};
use core::fmt;

use crate::lang::ast::{Atom, RelOp};
use crate::symbol::Symbol;

/// `c0 + Σ k·v` with 64-bit wraparound. References are coded as integers
/// (`null` is 0), so equality guards on references are linear too.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Lin {
    pub c0: i64,
    pub terms: BTreeMap<Symbol, i64>,
}

impl Lin {
    pub fn constant(c: i64) -> Lin {
        Lin { c0: c, terms: BTreeMap::new() }
    }

    pub fn var(v: &Symbol) -> Lin {
        let mut terms = BTreeMap::new();
        terms.insert(v.clone(), 1);
        Lin { c0: 0, terms }
    }

    pub fn of_atom(a: &Atom) -> Lin {
        match a {
            Atom::Var(v) => Lin::var(v),
            Atom::Int(n) => Lin::constant(*n),
            Atom::Null => Lin::constant(0),
        }
    }

    pub fn coeff(&self, v: &str) -> i64 {
        self.terms.get(v).copied().unwrap_or(0)
    }

    pub fn is_const(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn vars(&self) -> BTreeSet<Symbol> {
        self.terms.keys().cloned().collect()
    }

    pub fn add(&self, o: &Lin) -> Lin {
        let mut out = self.clone();
        out.c0 = out.c0.wrapping_add(o.c0);
        for (v, k) in &o.terms {
            let e = out.terms.entry(v.clone()).or_insert(0);
            *e = e.wrapping_add(*k);
            if *e == 0 {
                out.terms.remove(v);
            }
        }
        out
    }

    pub fn scale(&self, k: i64) -> Lin {
        if k == 0 {
            return Lin::constant(0);
        }
        Lin {
            c0: self.c0.wrapping_mul(k),
            terms: self
                .terms
                .iter()
                .map(|(v, c)| (v.clone(), c.wrapping_mul(k)))
                .filter(|(_, c)| *c != 0)
                .collect(),
        }
    }

    pub fn sub(&self, o: &Lin) -> Lin {
        self.add(&o.scale(-1))
    }

    /// `self` without its `v` term.
    pub fn without(&self, v: &str) -> Lin {
        let mut out = self.clone();
        out.terms.remove(v);
        out
    }

    pub fn eval(&self, env: &dyn Fn(&Symbol) -> Option<i64>) -> Option<i64> {
        let mut acc = self.c0;
        for (v, k) in &self.terms {
            acc = acc.wrapping_add(k.wrapping_mul(env(v)?));
        }
        Some(acc)
    }

    /// Replaces every variable by a term.
    pub fn subst(&self, f: &dyn Fn(&Symbol) -> Term) -> Term {
        let mut out = Lin::constant(self.c0);
        let mut deps = BTreeSet::new();
        let mut opaque = false;
        for (v, k) in &self.terms {
            match f(v) {
                Term::Lin(l) => out = out.add(&l.scale(*k)),
                Term::Opaque(o) => {
                    opaque = true;
                    deps.extend(o.deps);
                }
            }
        }
        if opaque {
            deps.extend(out.vars());
            Term::Opaque(Opaque { deps })
        } else {
            Term::Lin(out)
        }
    }
}

impl fmt::Display for Lin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, k) in &self.terms {
            let (neg, mag) = if *k < 0 { (true, k.unsigned_abs()) } else { (false, *k as u64) };
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if mag != 1 {
                write!(f, "{mag}*")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        if first {
            write!(f, "{}", self.c0)
        } else if self.c0 > 0 {
            write!(f, " + {}", self.c0)
        } else if self.c0 < 0 {
            write!(f, " - {}", self.c0.unsigned_abs())
        } else {
            Ok(())
        }
    }
}

/// A value the symbolic layer cannot express, with the pre-state scalars it
/// may depend on.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Opaque {
    pub deps: BTreeSet<Symbol>,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Term {
    Lin(Lin),
    Opaque(Opaque),
}

impl Term {
    pub fn var(v: &Symbol) -> Term {
        Term::Lin(Lin::var(v))
    }

    pub fn constant(c: i64) -> Term {
        Term::Lin(Lin::constant(c))
    }

    pub fn opaque(deps: impl IntoIterator<Item = Symbol>) -> Term {
        Term::Opaque(Opaque { deps: deps.into_iter().collect() })
    }

    pub fn as_lin(&self) -> Option<&Lin> {
        match self {
            Term::Lin(l) => Some(l),
            Term::Opaque(_) => None,
        }
    }

    pub fn vars(&self) -> BTreeSet<Symbol> {
        match self {
            Term::Lin(l) => l.vars(),
            Term::Opaque(o) => o.deps.clone(),
        }
    }

    pub fn subst(&self, f: &dyn Fn(&Symbol) -> Term) -> Term {
        match self {
            Term::Lin(l) => l.subst(f),
            Term::Opaque(o) => {
                let mut deps = BTreeSet::new();
                for v in &o.deps {
                    deps.extend(f(v).vars());
                }
                Term::Opaque(Opaque { deps })
            }
        }
    }

    pub fn eval(&self, env: &dyn Fn(&Symbol) -> Option<i64>) -> Option<i64> {
        self.as_lin()?.eval(env)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Lin(l) => write!(f, "{l}"),
            Term::Opaque(o) => {
                f.write_str("?(")?;
                for (k, v) in o.deps.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// An atomic predicate `lhs op rhs` over pre-state values.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Pred {
    pub lhs: Term,
    pub op: RelOp,
    pub rhs: Term,
}

impl Pred {
    pub fn new(lhs: Term, op: RelOp, rhs: Term) -> Pred {
        Pred { lhs, op, rhs }
    }

    pub fn negate(&self) -> Pred {
        Pred { lhs: self.lhs.clone(), op: self.op.negate(), rhs: self.rhs.clone() }
    }

    pub fn vars(&self) -> BTreeSet<Symbol> {
        let mut v = self.lhs.vars();
        v.extend(self.rhs.vars());
        v
    }

    /// `lhs - rhs op 0`, when both sides are linear.
    pub fn difference(&self) -> Option<(Lin, RelOp)> {
        Some((self.lhs.as_lin()?.sub(self.rhs.as_lin()?), self.op))
    }

    pub fn subst(&self, f: &dyn Fn(&Symbol) -> Term) -> Pred {
        Pred { lhs: self.lhs.subst(f), op: self.op, rhs: self.rhs.subst(f) }
    }

    /// Evaluates without wraparound in the comparison itself.
    pub fn eval(&self, env: &dyn Fn(&Symbol) -> Option<i64>) -> Option<bool> {
        Some(self.op.holds(self.lhs.eval(env)?, self.rhs.eval(env)?))
    }
}

impl fmt::Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.op.symbol(), self.rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn v(s: &str) -> Symbol {
        Symbol::new(s)
    }

    #[test]
    fn lin_arithmetic_and_display() {
        let i = Lin::var(&v("i"));
        let n = Lin::var(&v("n"));
        let e = i.add(&Lin::constant(1)).add(&n.scale(-2));
        assert_eq!(e.to_string(), "i - 2*n + 1");
        assert_eq!(e.sub(&e).to_string(), "0");
        assert_eq!(Lin::constant(-4).to_string(), "-4");
        assert_eq!(i.scale(-1).add(&Lin::constant(-3)).to_string(), "-i - 3");
        let env = |s: &Symbol| match s.as_str() {
            "i" => Some(3),
            "n" => Some(5),
            _ => None,
        };
        assert_eq!(e.eval(&env), Some(3 + 1 - 10));
    }

    #[test]
    fn substitution_through_opaque_collects_deps() {
        let t = Lin::var(&v("x")).add(&Lin::var(&v("y")));
        let r = t.subst(&|s| if s.as_str() == "x" { Term::opaque([v("a")]) } else { Term::var(s) });
        assert_eq!(r, Term::opaque([v("a"), v("y")]));
    }
}
