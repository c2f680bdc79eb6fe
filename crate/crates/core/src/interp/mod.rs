//! Fuel-bounded reference interpreter: concrete execution, and execution
//! with divergence reified as `⊥`.

mod machine;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::alias::Context;
use crate::lang::ast::{Elem, Program, Span, StmtPath, Type};
use crate::repr::{DivergenceCause, MethodId, Representative};
use crate::symbol::Symbol;
use crate::transform::TransformOutput;

pub const DEFAULT_FUEL: u64 = 1_000_000;
pub const DEFAULT_MAX_DEPTH: usize = 128;

/// A runtime value. References are heap addresses starting at 1, so that
/// conditions can compare them as integers with `null` as 0.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Value {
    Int(i64),
    Null,
    Ref(u32),
    Bottom,
}

impl Value {
    pub fn default_of(ty: &Type) -> Value {
        match ty {
            Type::Int => Value::Int(0),
            _ => Value::Null,
        }
    }

    /// Integer coding; `None` for `⊥`.
    pub fn code(self) -> Option<i64> {
        match self {
            Value::Int(v) => Some(v),
            Value::Null => Some(0),
            Value::Ref(a) => Some(a as i64),
            Value::Bottom => None,
        }
    }

    pub fn is_bottom(self) -> bool {
        self == Value::Bottom
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Null => f.write_str("null"),
            Value::Ref(a) => write!(f, "@{a}"),
            Value::Bottom => f.write_str("⊥"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Cell {
    Object { class: Symbol, fields: BTreeMap<Symbol, Value> },
    Array { elem: Elem, items: Vec<Value> },
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Heap {
    cells: Vec<Cell>,
}

impl Heap {
    pub fn alloc(&mut self, c: Cell) -> Value {
        self.cells.push(c);
        Value::Ref(self.cells.len() as u32)
    }

    pub fn alloc_array(&mut self, elem: Elem, items: Vec<Value>) -> Value {
        self.alloc(Cell::Array { elem, items })
    }

    pub fn get(&self, v: Value) -> Option<&Cell> {
        match v {
            Value::Ref(a) => self.cells.get(a as usize - 1),
            _ => None,
        }
    }

    pub fn get_mut(&mut self, v: Value) -> Option<&mut Cell> {
        match v {
            Value::Ref(a) => self.cells.get_mut(a as usize - 1),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum FaultKind {
    #[error("null dereference")]
    NullDeref,
    #[error("index {index} out of bounds for length {len}")]
    OutOfBounds { index: i64, len: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("no method `{0}` for the receiver's class")]
    NoDispatch(Symbol),
    #[error("unknown method `{0}`")]
    UnknownMethod(MethodId),
    #[error("expected {expected} arguments, got {got}")]
    ArgumentCount { expected: usize, got: usize },
    #[error("`bottom` reached in concrete execution")]
    BottomStatement,
    #[error("call depth limit {0} reached")]
    DepthLimit(usize),
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
#[error("{method} at {span}: {kind}")]
pub struct Fault {
    pub kind: FaultKind,
    pub method: MethodId,
    pub span: Span,
}

/// One store mutation, named by the representative of the assigned
/// l-value in the method performing it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Write {
    pub method: MethodId,
    pub rep: Representative,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Finished {
    pub ret: Value,
    /// Final values of the entry method's variables, `ret` included.
    pub vars: BTreeMap<Symbol, Value>,
    pub heap: Heap,
    /// Heap representatives holding `⊥`.
    pub tainted: BTreeSet<Representative>,
    /// Causes of every `⊥` introduced during the run, including ones later
    /// overwritten.
    pub introduced: BTreeSet<DivergenceCause>,
    pub writes: Vec<Write>,
    pub calls: Vec<(MethodId, MethodId)>,
    pub steps: u64,
}

impl Finished {
    /// Representatives of the entry method `m` mapped to `⊥`.
    pub fn bottoms(&self, m: &MethodId) -> BTreeSet<Representative> {
        let mut out = self.tainted.clone();
        for (x, v) in &self.vars {
            if v.is_bottom() {
                out.insert(Representative::scalar(m, x));
            }
        }
        out
    }

    pub fn is_divergence_free(&self) -> bool {
        self.tainted.is_empty() && self.vars.values().all(|v| !v.is_bottom())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RunOutcome {
    Finished(Finished),
    FuelExhausted { steps: u64 },
    Fault(Fault),
}

impl RunOutcome {
    pub fn finished(&self) -> Option<&Finished> {
        match self {
            RunOutcome::Finished(f) => Some(f),
            _ => None,
        }
    }

    pub fn is_fuel_exhausted(&self) -> bool {
        matches!(self, RunOutcome::FuelExhausted { .. })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct RunConfig {
    /// Statement executions and loop tests allowed.
    pub fuel: u64,
    pub max_depth: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { fuel: DEFAULT_FUEL, max_depth: DEFAULT_MAX_DEPTH }
    }
}

/// Behaviour of methods without a body.
pub trait Externs {
    fn call(&mut self, m: &MethodId, ret: &Type, args: &[Value], heap: &mut Heap) -> Value;
}

/// Every extern returns the default value of its type and touches nothing.
pub struct DefaultExterns;

impl Externs for DefaultExterns {
    fn call(&mut self, _: &MethodId, ret: &Type, _: &[Value], _: &mut Heap) -> Value {
        Value::default_of(ret)
    }
}

/// The decisions φ is based on: loop verdicts by location, and the API
/// and recursion sets.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ReifyOracle {
    pub terminating: BTreeMap<(MethodId, StmtPath), bool>,
    pub api: BTreeSet<MethodId>,
    pub recursion: BTreeSet<MethodId>,
}

impl ReifyOracle {
    pub fn from_transform(t: &TransformOutput, api: BTreeSet<MethodId>, recursion: BTreeSet<MethodId>) -> ReifyOracle {
        let terminating = t.loops.iter().map(|(m, j)| ((m.clone(), j.path.clone()), j.verdict.terminates())).collect();
        ReifyOracle { terminating, api, recursion }
    }

    fn terminates(&self, m: &MethodId, path: &StmtPath) -> bool {
        self.terminating.get(&(m.clone(), path.clone())).copied().unwrap_or(false)
    }
}

/// Runs `entry` with standard semantics. `bottom` statements fault.
pub fn run_concrete(
    p: &Program,
    cx: &Context,
    entry: &MethodId,
    args: &[Value],
    heap: Heap,
    cfg: &RunConfig,
    externs: &mut dyn Externs,
) -> RunOutcome {
    machine::Machine::new(p, cx, cfg, heap, externs, None).run(entry, args)
}

/// Runs `entry` on an untransformed program with divergence reified:
/// loops the oracle cannot prove terminating, calls into A ∪ R, and
/// `bottom` statements assign `⊥` to their write sets; `⊥` propagates
/// through assignments, and a branch on `⊥` assigns `⊥` to everything it
/// may write. A `⊥` base, index or receiver taints whatever the access
/// may write.
pub fn run_reified(
    p: &Program,
    cx: &Context,
    entry: &MethodId,
    args: &[Value],
    heap: Heap,
    cfg: &RunConfig,
    oracle: &ReifyOracle,
    externs: &mut dyn Externs,
) -> RunOutcome {
    machine::Machine::new(p, cx, cfg, heap, externs, Some(oracle)).run(entry, args)
}
