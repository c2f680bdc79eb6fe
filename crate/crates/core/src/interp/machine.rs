use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::*;
use crate::hierarchy::{Dispatch, Hierarchy};
use crate::lang::ast::{Assign, Atom, Call, Cond, Const, Method, Stmt, StmtKind, RET};
use crate::transform::{divergent_call, phi_written};

enum Stop {
    Fuel,
    Fault(Fault),
}

enum Flow {
    Normal,
    Return,
}

type Exec<T> = Result<T, Stop>;

struct Frame<'p> {
    method: &'p Method,
    id: MethodId,
    vars: BTreeMap<Symbol, Value>,
    /// Location of the statement being executed.
    path: Vec<u32>,
}

impl Frame<'_> {
    fn get(&self, x: &str) -> Value {
        self.vars.get(x).copied().unwrap_or(Value::Bottom)
    }
}

pub(super) struct Machine<'a> {
    methods: BTreeMap<MethodId, &'a Method>,
    cx: &'a Context,
    cfg: &'a RunConfig,
    heap: Heap,
    externs: &'a mut dyn Externs,
    oracle: Option<&'a ReifyOracle>,
    steps: u64,
    depth: usize,
    tainted: BTreeSet<Representative>,
    introduced: BTreeSet<DivergenceCause>,
    writes: Vec<Write>,
    calls: Vec<(MethodId, MethodId)>,
}

impl<'a> Machine<'a> {
    pub(super) fn new(
        p: &'a Program,
        cx: &'a Context,
        cfg: &'a RunConfig,
        heap: Heap,
        externs: &'a mut dyn Externs,
        oracle: Option<&'a ReifyOracle>,
    ) -> Machine<'a> {
        Machine {
            methods: p.methods.iter().map(|m| (m.id(), m)).collect(),
            cx,
            cfg,
            heap,
            externs,
            oracle,
            steps: 0,
            depth: 0,
            tainted: BTreeSet::new(),
            introduced: BTreeSet::new(),
            writes: Vec::new(),
            calls: Vec::new(),
        }
    }

    pub(super) fn run(mut self, entry: &MethodId, args: &[Value]) -> RunOutcome {
        let Some(&m) = self.methods.get(entry) else {
            return RunOutcome::Fault(Fault { kind: FaultKind::UnknownMethod(entry.clone()), method: entry.clone(), span: Span::default() });
        };
        let mut frame = match self.frame(m, args) {
            Ok(f) => f,
            Err(kind) => return RunOutcome::Fault(Fault { kind, method: entry.clone(), span: m.span }),
        };
        match self.body(&mut frame) {
            Ok(()) => RunOutcome::Finished(Finished {
                ret: frame.get(RET),
                vars: frame.vars,
                heap: self.heap,
                tainted: self.tainted,
                introduced: self.introduced,
                writes: self.writes,
                calls: self.calls,
                steps: self.steps,
            }),
            Err(Stop::Fuel) => RunOutcome::FuelExhausted { steps: self.steps },
            Err(Stop::Fault(f)) => RunOutcome::Fault(f),
        }
    }

    fn frame(&self, m: &'a Method, args: &[Value]) -> Result<Frame<'a>, FaultKind> {
        if args.len() != m.formals.len() {
            return Err(FaultKind::ArgumentCount { expected: m.formals.len(), got: args.len() });
        }
        let mut vars = BTreeMap::new();
        for (p, &v) in m.formals.iter().zip(args) {
            vars.insert(p.name.clone(), v);
        }
        for p in &m.locals {
            vars.insert(p.name.clone(), Value::default_of(&p.ty));
        }
        vars.insert(Symbol::new(RET), Value::default_of(&m.ret_ty));
        Ok(Frame { method: m, id: m.id(), vars, path: Vec::new() })
    }

    fn body(&mut self, f: &mut Frame<'a>) -> Exec<()> {
        let m = f.method;
        self.block(f, m.body_stmts()).map(|_| ())
    }

    fn tick(&mut self) -> Exec<()> {
        if self.steps >= self.cfg.fuel {
            return Err(Stop::Fuel);
        }
        self.steps += 1;
        Ok(())
    }

    fn fault(f: &Frame<'_>, s: &Stmt, kind: FaultKind) -> Stop {
        Stop::Fault(Fault { kind, method: f.id.clone(), span: s.span })
    }

    fn block(&mut self, f: &mut Frame<'a>, b: &'a [Stmt]) -> Exec<Flow> {
        for (k, s) in b.iter().enumerate() {
            f.path.push(k as u32);
            let flow = self.stmt(f, s);
            f.path.pop();
            if let Flow::Return = flow? {
                return Ok(Flow::Return);
            }
        }
        Ok(Flow::Normal)
    }

    fn set(&mut self, f: &mut Frame<'_>, x: &Symbol, v: Value) {
        f.vars.insert(x.clone(), v);
        self.writes.push(Write { method: f.id.clone(), rep: self.cx.var_rep(&f.id, x) });
    }

    /// Assigns `⊥` to every representative in `w`.
    fn taint(&mut self, f: &mut Frame<'_>, w: impl IntoIterator<Item = Representative>) {
        for r in w {
            match &r {
                Representative::Scalar(v) if v.method == f.id => {
                    f.vars.insert(v.name.clone(), Value::Bottom);
                }
                Representative::Scalar(_) | Representative::Bottom => continue,
                _ => {
                    self.tainted.insert(r.clone());
                }
            }
            self.writes.push(Write { method: f.id.clone(), rep: r });
        }
    }

    fn atom(f: &Frame<'_>, a: &Atom) -> Value {
        match a {
            Atom::Var(x) => f.get(x),
            Atom::Int(v) => Value::Int(*v),
            Atom::Null => Value::Null,
        }
    }

    fn cond(f: &Frame<'_>, c: &Cond) -> Option<bool> {
        let a = Self::atom(f, &c.lhs).code()?;
        let b = Self::atom(f, &c.rhs).code()?;
        Some(c.op.holds(a, b))
    }

    fn here(f: &Frame<'_>) -> StmtPath {
        StmtPath(f.path.clone())
    }

    fn stmt(&mut self, f: &mut Frame<'a>, s: &'a Stmt) -> Exec<Flow> {
        self.tick()?;
        match &s.kind {
            StmtKind::Assign(a) => self.assign(f, s, a)?,
            StmtKind::Return(a) => {
                let v = Self::atom(f, a);
                self.set(f, &Symbol::new(RET), v);
                return Ok(Flow::Return);
            }
            StmtKind::Call(c) => self.call(f, s, c)?,
            StmtKind::Bottom(b) => {
                if self.oracle.is_none() {
                    return Err(Self::fault(f, s, FaultKind::BottomStatement));
                }
                self.introduced.insert(b.cause);
                self.taint(f, b.targets.iter().cloned());
            }
            StmtKind::If { cond, then_branch, else_branch } => match Self::cond(f, cond) {
                Some(true) => {
                    f.path.push(0);
                    let flow = self.block(f, then_branch);
                    f.path.pop();
                    return flow;
                }
                Some(false) => {
                    f.path.push(1);
                    let flow = self.block(f, else_branch);
                    f.path.pop();
                    return flow;
                }
                None => {
                    let w = self.phi_written(f, s);
                    self.taint(f, w);
                }
            },
            StmtKind::While { cond, body } => {
                if let Some(o) = self.oracle {
                    if !o.terminates(&f.id, &Self::here(f)) {
                        self.introduced.insert(DivergenceCause::Loop);
                        let w = self.phi_written(f, s);
                        self.taint(f, w);
                        return Ok(Flow::Normal);
                    }
                }
                loop {
                    match Self::cond(f, cond) {
                        Some(true) => {}
                        Some(false) => break,
                        None => {
                            let w = self.phi_written(f, s);
                            self.taint(f, w);
                            break;
                        }
                    }
                    f.path.push(0);
                    let flow = self.block(f, body);
                    f.path.pop();
                    if let Flow::Return = flow? {
                        return Ok(Flow::Return);
                    }
                    self.tick()?;
                }
            }
        }
        Ok(Flow::Normal)
    }

    fn phi_written(&self, f: &Frame<'_>, s: &Stmt) -> BTreeSet<Representative> {
        match self.oracle {
            Some(o) => phi_written(self.cx, &f.id, s, &o.api, &o.recursion),
            None => self.cx.written_reps(&f.id, s),
        }
    }

    fn assign(&mut self, f: &mut Frame<'a>, s: &Stmt, a: &Assign) -> Exec<()> {
        let strict = |vs: &[Value], v: &dyn Fn() -> Value| if vs.iter().any(|x| x.is_bottom()) { Value::Bottom } else { v() };
        match a {
            Assign::Const { dst, value } => {
                let v = match value {
                    Const::Int(v) => Value::Int(*v),
                    Const::Null => Value::Null,
                    Const::New(class) => {
                        let fields = self
                            .cx
                            .hier
                            .all_fields(class)
                            .into_iter()
                            .map(|(_, name, ty)| (name, Value::default_of(&ty)))
                            .collect();
                        self.heap.alloc(Cell::Object { class: class.clone(), fields })
                    }
                    Const::NewArray(elem, n) => {
                        let v = Value::default_of(&Hierarchy::elem_type(elem));
                        self.heap.alloc_array(elem.clone(), alloc::vec![v; *n as usize])
                    }
                };
                self.set(f, dst, v);
            }
            Assign::Copy { dst, src } => {
                let v = f.get(src);
                self.set(f, dst, v);
            }
            Assign::Unary { dst, op, src } => {
                let x = f.get(src);
                let v = strict(&[x], &|| Value::Int(op.eval(x.code().unwrap_or(0))));
                self.set(f, dst, v);
            }
            Assign::Binary { dst, op, lhs, rhs } => {
                let (x, y) = (Self::atom(f, lhs), Self::atom(f, rhs));
                let v = match (x.code(), y.code()) {
                    (Some(x), Some(y)) => {
                        Value::Int(op.eval(x, y).ok_or_else(|| Self::fault(f, s, FaultKind::DivisionByZero))?)
                    }
                    _ => Value::Bottom,
                };
                self.set(f, dst, v);
            }
            Assign::FieldRead { dst, obj, field } => {
                let o = f.get(obj);
                let rep = self.cx.field_rep(&f.id, obj, field);
                let v = if o.is_bottom() || rep.as_ref().is_some_and(|r| self.tainted.contains(r)) {
                    Value::Bottom
                } else {
                    match self.heap.get(o) {
                        Some(Cell::Object { fields, .. }) => fields.get(field).copied().unwrap_or(Value::Bottom),
                        _ => return Err(Self::fault(f, s, FaultKind::NullDeref)),
                    }
                };
                self.set(f, dst, v);
            }
            Assign::FieldWrite { obj, field, src } => {
                let o = f.get(obj);
                let v = Self::atom(f, src);
                let rep = self.cx.field_rep(&f.id, obj, field);
                if o.is_bottom() || v.is_bottom() {
                    self.taint(f, rep);
                    return Ok(());
                }
                match self.heap.get_mut(o) {
                    Some(Cell::Object { fields, .. }) => {
                        fields.insert(field.clone(), v);
                    }
                    _ => return Err(Self::fault(f, s, FaultKind::NullDeref)),
                }
                self.writes.extend(rep.map(|rep| Write { method: f.id.clone(), rep }));
            }
            Assign::ArrayRead { dst, array, index } => {
                let (arr, i) = (f.get(array), f.get(index));
                let rep = self.cx.elem_rep(&f.id, array);
                let v = if arr.is_bottom() || i.is_bottom() {
                    Value::Bottom
                } else {
                    let item = self.element(f, s, arr, i)?;
                    if rep.as_ref().is_some_and(|r| self.tainted.contains(r)) {
                        Value::Bottom
                    } else {
                        item
                    }
                };
                self.set(f, dst, v);
            }
            Assign::ArrayWrite { array, index, src } => {
                let (arr, i) = (f.get(array), f.get(index));
                let v = Self::atom(f, src);
                let rep = self.cx.elem_rep(&f.id, array);
                if arr.is_bottom() || i.is_bottom() || v.is_bottom() {
                    self.taint(f, rep);
                    return Ok(());
                }
                self.element(f, s, arr, i)?;
                if let Some(Cell::Array { items, .. }) = self.heap.get_mut(arr) {
                    items[i.code().unwrap_or(0) as usize] = v;
                }
                self.writes.extend(rep.map(|rep| Write { method: f.id.clone(), rep }));
            }
        }
        Ok(())
    }

    /// Bounds- and null-checked element read.
    fn element(&self, f: &Frame<'_>, s: &Stmt, arr: Value, i: Value) -> Exec<Value> {
        let index = i.code().unwrap_or(0);
        match self.heap.get(arr) {
            Some(Cell::Array { items, .. }) => {
                if index < 0 || index as usize >= items.len() {
                    return Err(Self::fault(f, s, FaultKind::OutOfBounds { index, len: items.len() }));
                }
                Ok(items[index as usize])
            }
            _ => Err(Self::fault(f, s, FaultKind::NullDeref)),
        }
    }

    fn call(&mut self, f: &mut Frame<'a>, s: &Stmt, c: &Call) -> Exec<()> {
        if let Some(o) = self.oracle {
            if let Some((w, cause)) = divergent_call(self.cx, &f.id, c, &o.api, &o.recursion) {
                self.introduced.insert(cause);
                self.taint(f, w);
                return Ok(());
            }
        }
        let resolved = self.cx.resolve(&f.id, c);
        let args: Vec<Value> = c.args.iter().map(|a| f.get(a)).collect();
        let callee = match resolved.dispatch {
            Dispatch::Virtual => {
                let recv = args.first().copied().unwrap_or(Value::Null);
                if recv.is_bottom() {
                    let w = self.cx.call_written(&f.id, c);
                    self.taint(f, w);
                    return Ok(());
                }
                let class = match self.heap.get(recv) {
                    Some(Cell::Object { class, .. }) => class.clone(),
                    _ => return Err(Self::fault(f, s, FaultKind::NullDeref)),
                };
                match self.cx.hier.dispatch(&class, &c.callee) {
                    Some(m) => m.clone(),
                    None => return Err(Self::fault(f, s, FaultKind::NoDispatch(c.callee.clone()))),
                }
            }
            Dispatch::Static => match resolved.targets.first() {
                Some(m) => m.clone(),
                None => return Err(Self::fault(f, s, FaultKind::NoDispatch(c.callee.clone()))),
            },
        };
        let Some(&m) = self.methods.get(&callee) else {
            return Err(Self::fault(f, s, FaultKind::UnknownMethod(callee)));
        };
        self.calls.push((f.id.clone(), callee.clone()));
        if m.is_extern() {
            return self.extern_call(f, c, m, &args);
        }
        if self.depth >= self.cfg.max_depth {
            return Err(Self::fault(f, s, FaultKind::DepthLimit(self.cfg.max_depth)));
        }
        let mut inner = self.frame(m, &args).map_err(|k| Self::fault(f, s, k))?;
        self.depth += 1;
        let r = self.body(&mut inner);
        self.depth -= 1;
        r?;
        let v = inner.get(RET);
        self.set(f, &c.target, v);
        Ok(())
    }

    /// A safe extern: its result and everything reachable from its actuals
    /// are `⊥` when any input is; otherwise the model decides.
    fn extern_call(&mut self, f: &mut Frame<'_>, c: &Call, m: &Method, args: &[Value]) -> Exec<()> {
        if self.oracle.is_some() {
            let reach: BTreeSet<Representative> = c.args.iter().flat_map(|a| self.cx.rlv(&f.id, a)).collect();
            if args.iter().any(|v| v.is_bottom()) || reach.iter().any(|r| self.tainted.contains(r)) {
                let mut w = reach;
                w.insert(self.cx.var_rep(&f.id, &c.target));
                self.taint(f, w);
                return Ok(());
            }
        }
        let v = self.externs.call(&m.id(), &m.ret_ty, args, &mut self.heap);
        self.set(f, &c.target, v);
        Ok(())
    }
}
