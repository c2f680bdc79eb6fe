//! Seeded random Carib programs for fuzzing and scale runs.

use std::collections::{BTreeMap, BTreeSet};

use cook_core::interp::{Cell, Heap, Value};
use cook_core::lang::ast::*;
use cook_core::{MethodId, Symbol};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Size and density knobs. Densities are per-statement probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub seed: u64,
    pub methods: usize,
    pub classes: usize,
    /// Maximum nesting of `if` and `while`.
    pub max_depth: u32,
    /// Statements per block are drawn from `1..=block_len`.
    pub block_len: usize,
    /// Probability that a statement slot holds a loop.
    pub loop_density: f64,
    /// Share of loops the termination oracle cannot prove.
    pub opaque_loops: f64,
    /// Probability that a call targets a method at or before the caller.
    pub recursion: f64,
    /// Probability that a statement slot holds an extern call.
    pub extern_density: f64,
    /// Probability that a statement slot holds a call to a generated method.
    pub call_density: f64,
    /// Number of extern methods `api0`, `api1`, ...; their parameter is an
    /// int, an array or an object in turn.
    pub externs: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            methods: 10,
            classes: 4,
            max_depth: 2,
            block_len: 5,
            loop_density: 0.12,
            opaque_loops: 0.3,
            recursion: 0.05,
            extern_density: 0.05,
            call_density: 0.12,
            externs: 3,
        }
    }
}

impl GenConfig {
    /// No loops, calls into externs or recursion: every method is an island.
    pub fn taint_free(mut self) -> Self {
        self.loop_density = 0.0;
        self.extern_density = 0.0;
        self.recursion = 0.0;
        self
    }
}

pub const ARRAY_LEN: u32 = 8;

fn sym(s: &str) -> Symbol {
    Symbol::new(s)
}

fn stmt(kind: StmtKind) -> Stmt {
    Stmt::new(kind)
}

fn assign(a: Assign) -> Stmt {
    stmt(StmtKind::Assign(a))
}

fn var(s: &Symbol) -> Atom {
    Atom::Var(s.clone())
}

struct ClassShape {
    name: Symbol,
    parent: Option<usize>,
    int_field: Symbol,
    arr_field: Symbol,
    ref_field: Symbol,
    root: usize,
}

struct Sig {
    id: MethodId,
    /// Class of the object formal, if any.
    obj: Option<usize>,
    arr: bool,
}

struct Gen<'a> {
    rng: ChaCha8Rng,
    cfg: &'a GenConfig,
    classes: Vec<ClassShape>,
    sigs: Vec<Sig>,
}

/// Per-method generation state: which scratch variables were used.
struct Body {
    index: usize,
    obj_formal: Option<(Symbol, usize)>,
    arr_formal: Option<Symbol>,
    used_objs: BTreeSet<usize>,
    counters: u32,
    extra_ints: BTreeSet<Symbol>,
}

const INTS: [&str; 5] = ["t0", "t1", "t2", "s", "z"];

impl Body {
    fn obj_var(c: usize) -> Symbol {
        sym(&format!("v{c}"))
    }
}

impl Gen<'_> {
    fn is_subclass(&self, mut sub: usize, sup: usize) -> bool {
        loop {
            if sub == sup {
                return true;
            }
            match self.classes[sub].parent {
                Some(p) => sub = p,
                None => return false,
            }
        }
    }

    fn int_src(&mut self) -> Atom {
        if self.rng.random_bool(0.2) {
            return Atom::Int(self.rng.random_range(-5..=9));
        }
        let all = ["t0", "t1", "t2", "s", "z", "x", "y"];
        Atom::Var(sym(all.choose(&mut self.rng).unwrap()))
    }

    fn int_var(&mut self) -> Symbol {
        let all = ["t0", "t1", "t2", "s", "z", "x", "y"];
        sym(all.choose(&mut self.rng).unwrap())
    }

    fn int_dst(&mut self) -> Symbol {
        sym(INTS.choose(&mut self.rng).unwrap())
    }

    /// A non-null object variable, possibly a formal.
    fn object(&mut self, b: &mut Body) -> (Symbol, usize) {
        if let Some((o, c)) = &b.obj_formal {
            if self.rng.random_bool(0.5) {
                return (o.clone(), *c);
            }
        }
        let c = self.rng.random_range(0..self.classes.len());
        b.used_objs.insert(c);
        (Body::obj_var(c), c)
    }

    fn object_of(&mut self, b: &mut Body, class: usize) -> Symbol {
        if let Some((o, c)) = &b.obj_formal {
            if self.is_subclass(*c, class) && self.rng.random_bool(0.5) {
                return o.clone();
            }
        }
        let subs: Vec<usize> = (0..self.classes.len()).filter(|&k| self.is_subclass(k, class)).collect();
        let c = *subs.choose(&mut self.rng).unwrap();
        b.used_objs.insert(c);
        Body::obj_var(c)
    }

    fn array(&mut self, b: &Body) -> Symbol {
        match &b.arr_formal {
            Some(a) if self.rng.random_bool(0.5) => a.clone(),
            _ => sym("b"),
        }
    }

    /// `c` and its ancestors.
    fn lineage(&self, c: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut k = Some(c);
        while let Some(i) = k {
            out.push(i);
            k = self.classes[i].parent;
        }
        out
    }

    fn int_field_in(&mut self, c: usize) -> Symbol {
        let k = self.pick_in_lineage(c);
        self.classes[k].int_field.clone()
    }

    fn pick_in_lineage(&mut self, c: usize) -> usize {
        let l = self.lineage(c);
        *l.choose(&mut self.rng).unwrap()
    }

    fn cond(&mut self) -> Cond {
        let ops = [RelOp::Lt, RelOp::Le, RelOp::Gt, RelOp::Ge, RelOp::Eq, RelOp::Ne];
        let lhs = Atom::Var(self.int_var());
        Cond { lhs, op: *ops.choose(&mut self.rng).unwrap(), rhs: self.int_src() }
    }

    fn simple(&mut self, b: &mut Body, out: &mut Vec<Stmt>) {
        match self.rng.random_range(0..12) {
            0 => {
                let v = self.rng.random_range(-10..=10);
                out.push(assign(Assign::Const { dst: self.int_dst(), value: Const::Int(v) }));
            }
            1 => out.push(assign(Assign::Copy { dst: self.int_dst(), src: self.int_var() })),
            2 => {
                let op = if self.rng.random_bool(0.5) { UnOp::Neg } else { UnOp::Not };
                out.push(assign(Assign::Unary { dst: self.int_dst(), op, src: self.int_var() }));
            }
            3..=5 => {
                let ops = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::And, BinOp::Xor, BinOp::Rel(RelOp::Lt)];
                let op = *ops.choose(&mut self.rng).unwrap();
                out.push(assign(Assign::Binary { dst: self.int_dst(), op, lhs: Atom::Var(self.int_var()), rhs: self.int_src() }));
            }
            6 => {
                let d = self.rng.random_range(1..=4);
                let op = if self.rng.random_bool(0.5) { BinOp::Div } else { BinOp::Rem };
                out.push(assign(Assign::Binary { dst: self.int_dst(), op, lhs: Atom::Var(self.int_var()), rhs: Atom::Int(d) }));
            }
            7 => {
                let (o, c) = self.object(b);
                let f = self.int_field_in(c);
                out.push(assign(Assign::FieldRead { dst: self.int_dst(), obj: o, field: f }));
            }
            8 => {
                let (o, c) = self.object(b);
                let f = self.int_field_in(c);
                out.push(assign(Assign::FieldWrite { obj: o, field: f, src: self.int_src() }));
            }
            9 | 10 => {
                let a = self.array(b);
                let k = sym("k");
                out.push(assign(Assign::Binary { dst: k.clone(), op: BinOp::And, lhs: Atom::Var(self.int_var()), rhs: Atom::Int(ARRAY_LEN as i64 - 1) }));
                if self.rng.random_bool(0.5) {
                    out.push(assign(Assign::ArrayRead { dst: self.int_dst(), array: a, index: k }));
                } else {
                    out.push(assign(Assign::ArrayWrite { array: a, index: k, src: self.int_src() }));
                }
            }
            _ => {
                let (o, c) = self.object(b);
                let target = self.pick_in_lineage(c);
                if self.rng.random_bool(0.5) {
                    let (f, root) = (self.classes[target].ref_field.clone(), self.classes[target].root);
                    let src = self.object_of(b, root);
                    out.push(assign(Assign::FieldWrite { obj: o, field: f, src: var(&src) }));
                } else {
                    let f = self.classes[target].arr_field.clone();
                    let a = self.array(b);
                    out.push(assign(Assign::FieldWrite { obj: o, field: f, src: var(&a) }));
                }
            }
        }
    }

    fn call(&mut self, b: &mut Body, out: &mut Vec<Stmt>) {
        let me = b.index;
        let n = self.sigs.len();
        let backwards = self.rng.random_bool(self.cfg.recursion);
        let k = if backwards || me + 1 >= n {
            if self.cfg.recursion == 0.0 {
                return self.virtual_call(b, out);
            }
            self.rng.random_range(0..=me)
        } else {
            self.rng.random_range(me + 1..n)
        };
        if self.rng.random_bool(0.25) {
            return self.virtual_call(b, out);
        }
        let mut args = vec![self.int_var(), self.int_var()];
        if let Some(c) = self.sigs[k].obj {
            args.push(self.object_of(b, c));
        }
        if self.sigs[k].arr {
            args.push(self.array(b));
        }
        let callee = self.sigs[k].id.name.clone();
        out.push(stmt(StmtKind::Call(Call { target: self.int_dst(), callee, args })));
    }

    fn virtual_call(&mut self, b: &mut Body, out: &mut Vec<Stmt>) {
        let (o, _) = self.object(b);
        let x = self.int_var();
        out.push(stmt(StmtKind::Call(Call { target: self.int_dst(), callee: sym("v"), args: vec![o, x] })));
    }

    fn extern_call(&mut self, b: &mut Body, out: &mut Vec<Stmt>) {
        if self.cfg.externs == 0 {
            return self.simple(b, out);
        }
        let k = self.rng.random_range(0..self.cfg.externs);
        let arg = match k % 3 {
            0 => self.int_var(),
            1 => self.array(b),
            _ => self.object_of(b, 0),
        };
        let c = Call { target: self.int_dst(), callee: extern_name(k), args: vec![arg] };
        out.push(stmt(StmtKind::Call(c)));
    }

    fn looped(&mut self, b: &mut Body, depth: u32, out: &mut Vec<Stmt>) {
        let l = b.counters;
        b.counters += 1;
        let c = sym(&format!("c{l}"));
        let n = sym(&format!("n{l}"));
        b.extra_ints.insert(c.clone());
        b.extra_ints.insert(n.clone());
        let mut body = self.block(b, depth + 1);
        let src = self.int_var();
        if self.rng.random_bool(self.cfg.opaque_loops) {
            // Halving: terminates, but not by a constant stride.
            out.push(assign(Assign::Binary { dst: c.clone(), op: BinOp::And, lhs: var(&src), rhs: Atom::Int(63) }));
            body.push(assign(Assign::Binary { dst: c.clone(), op: BinOp::Div, lhs: var(&c), rhs: Atom::Int(2) }));
            out.push(stmt(StmtKind::While { cond: Cond { lhs: var(&c), op: RelOp::Gt, rhs: Atom::Int(0) }, body }));
            return;
        }
        out.push(assign(Assign::Binary { dst: n.clone(), op: BinOp::And, lhs: var(&src), rhs: Atom::Int(15) }));
        let stride = if self.rng.random_bool(0.8) { 1 } else { 2 };
        if self.rng.random_bool(0.7) {
            out.push(assign(Assign::Const { dst: c.clone(), value: Const::Int(0) }));
            body.push(assign(Assign::Binary { dst: c.clone(), op: BinOp::Add, lhs: var(&c), rhs: Atom::Int(stride) }));
            let op = if self.rng.random_bool(0.5) { RelOp::Lt } else { RelOp::Le };
            out.push(stmt(StmtKind::While { cond: Cond { lhs: var(&c), op, rhs: var(&n) }, body }));
        } else {
            out.push(assign(Assign::Copy { dst: c.clone(), src: n.clone() }));
            body.push(assign(Assign::Binary { dst: c.clone(), op: BinOp::Sub, lhs: var(&c), rhs: Atom::Int(stride) }));
            out.push(stmt(StmtKind::While { cond: Cond { lhs: var(&c), op: RelOp::Gt, rhs: Atom::Int(0) }, body }));
        }
    }

    fn block(&mut self, b: &mut Body, depth: u32) -> Block {
        let len = self.rng.random_range(1..=self.cfg.block_len);
        let mut out = Vec::new();
        for _ in 0..len {
            let r: f64 = self.rng.random();
            let nested = depth < self.cfg.max_depth;
            let (ld, ed, cd) = (self.cfg.loop_density, self.cfg.extern_density, self.cfg.call_density);
            if r < ld {
                if nested {
                    self.looped(b, depth, &mut out);
                } else {
                    self.simple(b, &mut out);
                }
            } else if r < ld + ed {
                self.extern_call(b, &mut out);
            } else if r < ld + ed + cd {
                self.call(b, &mut out);
            } else if nested && r < ld + ed + cd + 0.12 {
                let cond = self.cond();
                let then_branch = self.block(b, depth + 1);
                let else_branch = if self.rng.random_bool(0.5) { self.block(b, depth + 1) } else { Vec::new() };
                out.push(stmt(StmtKind::If { cond, then_branch, else_branch }));
            } else {
                self.simple(b, &mut out);
            }
        }
        out
    }

    fn method(&mut self, index: usize) -> Method {
        let sig = &self.sigs[index];
        let obj_formal = sig.obj.map(|c| (sym("o"), c));
        let arr_formal = sig.arr.then(|| sym("a"));
        let id = sig.id.clone();
        let mut b = Body { index, obj_formal, arr_formal, used_objs: BTreeSet::new(), counters: 0, extra_ints: BTreeSet::new() };
        let mut main = self.block(&mut b, 0);
        main.push(stmt(StmtKind::Return(Atom::Var(sym("s")))));
        let mut formals = vec![param("x", Type::Int), param("y", Type::Int)];
        if let Some((o, c)) = &b.obj_formal {
            formals.push(Param { name: o.clone(), ty: Type::Ref(self.classes[*c].name.clone()), span: Span::default() });
        }
        if b.arr_formal.is_some() {
            formals.push(param("a", Type::Array(Elem::Int)));
        }
        let mut locals: Vec<Param> = INTS.iter().chain(["k"].iter()).map(|n| param(n, Type::Int)).collect();
        locals.extend(b.extra_ints.iter().map(|n| param(n, Type::Int)));
        locals.push(param("b", Type::Array(Elem::Int)));
        let mut body = vec![assign(Assign::Const { dst: sym("b"), value: Const::NewArray(Elem::Int, ARRAY_LEN) })];
        for &c in &b.used_objs {
            let v = Body::obj_var(c);
            locals.push(Param { name: v.clone(), ty: Type::Ref(self.classes[c].name.clone()), span: Span::default() });
            body.push(assign(Assign::Const { dst: v, value: Const::New(self.classes[c].name.clone()) }));
        }
        body.extend(main);
        Method { owner: id.owner, name: id.name, formals, locals, ret_ty: Type::Int, body: Some(body), span: Span::default() }
    }

    /// `C.v(self, x)`: reads the receiver's int field.
    fn virtual_method(&mut self, c: usize) -> Method {
        let f = self.int_field_in(c);
        let class = self.classes[c].name.clone();
        let (t, s, x) = (sym("t"), sym("self"), sym("x"));
        let body = vec![
            assign(Assign::FieldRead { dst: t.clone(), obj: s.clone(), field: f }),
            assign(Assign::Binary { dst: t.clone(), op: BinOp::Add, lhs: var(&t), rhs: var(&x) }),
            stmt(StmtKind::Return(var(&t))),
        ];
        Method {
            owner: Some(class.clone()),
            name: sym("v"),
            formals: vec![Param { name: s, ty: Type::Ref(class), span: Span::default() }, param("x", Type::Int)],
            locals: vec![param("t", Type::Int)],
            ret_ty: Type::Int,
            body: Some(body),
            span: Span::default(),
        }
    }
}

fn param(n: &str, ty: Type) -> Param {
    Param { name: sym(n), ty, span: Span::default() }
}

pub fn extern_name(k: usize) -> Symbol {
    sym(&format!("api{k}"))
}

fn extern_method(k: usize) -> Method {
    let formal = match k % 3 {
        0 => param("x", Type::Int),
        1 => param("a", Type::Array(Elem::Int)),
        _ => param("o", Type::Ref(sym("C0"))),
    };
    Method { owner: None, name: extern_name(k), formals: vec![formal], locals: vec![], ret_ty: Type::Int, body: None, span: Span::default() }
}

/// A well-formed program determined by `cfg` (seed included).
pub fn generate_program(cfg: &GenConfig) -> Program {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let nclasses = cfg.classes.max(1);
    let mut classes: Vec<ClassShape> = Vec::with_capacity(nclasses);
    for i in 0..nclasses {
        let parent = if i > 0 && rng.random_bool(0.4) { Some(rng.random_range(0..i)) } else { None };
        let root = parent.map_or(i, |p| classes[p].root);
        classes.push(ClassShape {
            name: sym(&format!("C{i}")),
            parent,
            int_field: sym(&format!("f{i}")),
            arr_field: sym(&format!("g{i}")),
            ref_field: sym(&format!("r{i}")),
            root,
        });
    }
    let sigs = (0..cfg.methods)
        .map(|k| Sig {
            id: MethodId::free(&format!("m{k}")),
            obj: rng.random_bool(0.5).then(|| rng.random_range(0..nclasses)),
            arr: rng.random_bool(0.4),
        })
        .collect();
    let mut g = Gen { rng, cfg, classes, sigs };
    let mut p = Program::default();
    for c in &g.classes {
        let mut fields = vec![
            Field { name: c.int_field.clone(), ty: Type::Int, span: Span::default() },
            Field { name: c.arr_field.clone(), ty: Type::Array(Elem::Int), span: Span::default() },
        ];
        if c.parent.is_none() {
            fields.push(Field { name: c.ref_field.clone(), ty: Type::Ref(c.name.clone()), span: Span::default() });
        }
        p.classes.push(ClassDecl {
            name: c.name.clone(),
            superclass: c.parent.map(|k| g.classes[k].name.clone()),
            interfaces: vec![],
            fields,
            span: Span::default(),
        });
    }
    // Every root defines `v`, so every class dispatches it.
    for c in 0..g.classes.len() {
        if g.classes[c].parent.is_none() || g.rng.random_bool(0.5) {
            let m = g.virtual_method(c);
            p.methods.push(m);
        }
    }
    // Ref fields are declared on roots only; keep writes type-correct.
    for c in 0..g.classes.len() {
        let root = g.classes[c].root;
        g.classes[c].ref_field = g.classes[root].ref_field.clone();
    }
    for k in 0..cfg.externs {
        p.methods.push(extern_method(k));
    }
    for k in 0..cfg.methods {
        let m = g.method(k);
        p.methods.push(m);
    }
    p
}

/// Arguments for `m` drawn from `rng`: small integers, fresh objects and
/// arrays of [`ARRAY_LEN`] cells.
pub fn entry_args(p: &Program, m: &Method, rng: &mut impl Rng, heap: &mut Heap) -> Vec<Value> {
    let hier = cook_core::hierarchy::Hierarchy::new(p);
    m.formals
        .iter()
        .map(|f| match &f.ty {
            Type::Int => Value::Int(rng.random_range(-20..=20)),
            Type::Array(e) => {
                let items = (0..ARRAY_LEN)
                    .map(|_| match e {
                        Elem::Int => Value::Int(rng.random_range(-20..=20)),
                        Elem::Ref(_) => Value::Null,
                    })
                    .collect();
                heap.alloc_array(e.clone(), items)
            }
            Type::Ref(c) => {
                let class = hier.runtime_types(c).into_iter().filter(|k| hier.is_class(k)).next().unwrap_or_else(|| c.clone());
                let fields: BTreeMap<Symbol, Value> = hier
                    .all_fields(&class)
                    .into_iter()
                    .map(|(_, n, t)| {
                        let v = if t == Type::Int { Value::Int(rng.random_range(-20..=20)) } else { Value::Null };
                        (n, v)
                    })
                    .collect();
                heap.alloc(Cell::Object { class, fields })
            }
        })
        .collect()
}

/// Shape of a loop built by [`generate_df_loop`].
#[derive(Clone, Debug)]
pub struct DfLoop {
    pub program: Program,
    pub method: MethodId,
    /// Location of the loop in the method body.
    pub path: StmtPath,
    /// Integer formals and the arrays' length.
    pub ints: Vec<Symbol>,
    pub arrays: Vec<Symbol>,
    pub array_len: usize,
}

/// A method whose single loop is dependency-free: an induction variable
/// bounded by a formal, counters moved by invariant amounts under
/// induction guards, and arrays written at the induction index.
pub fn generate_df_loop(seed: u64, max_bound: i64) -> DfLoop {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (i, n) = (sym("i"), sym("n"));
    let invariants = [sym("p"), sym("q"), sym("w")];
    let ncount = rng.random_range(1..=3);
    let counters: Vec<Symbol> = (0..ncount).map(|k| sym(&format!("j{k}"))).collect();
    let narr = rng.random_range(0..=2);
    let arrays: Vec<Symbol> = (0..narr).map(|k| sym(&format!("a{k}"))).collect();
    let stride = if rng.random_bool(0.8) { 1 } else { rng.random_range(2..=3) };
    let inv_atom = |rng: &mut ChaCha8Rng| -> Atom {
        if rng.random_bool(0.5) {
            Atom::Int(rng.random_range(-4..=6))
        } else {
            Atom::Var(invariants.choose(rng).unwrap().clone())
        }
    };
    // Effects of one iteration, possibly split by an induction guard.
    let effect = |rng: &mut ChaCha8Rng, out: &mut Vec<Stmt>| {
        if !arrays.is_empty() && rng.random_bool(0.4) {
            let a = arrays.choose(rng).unwrap().clone();
            out.push(assign(Assign::ArrayWrite { array: a, index: i.clone(), src: inv_atom(rng) }));
        } else {
            let j = counters.choose(rng).unwrap().clone();
            let op = if rng.random_bool(0.7) { BinOp::Add } else { BinOp::Sub };
            out.push(assign(Assign::Binary { dst: j.clone(), op, lhs: var(&j), rhs: inv_atom(rng) }));
        }
    };
    let mut body = Vec::new();
    for _ in 0..rng.random_range(1..=3) {
        if rng.random_bool(0.5) {
            let op = *[RelOp::Lt, RelOp::Le, RelOp::Gt, RelOp::Ge].choose(&mut rng).unwrap();
            let rhs = if rng.random_bool(0.5) { Atom::Var(sym("k")) } else { Atom::Int(rng.random_range(0..=max_bound)) };
            let mut then_branch = Vec::new();
            let mut else_branch = Vec::new();
            effect(&mut rng, &mut then_branch);
            if rng.random_bool(0.6) {
                effect(&mut rng, &mut else_branch);
            }
            body.push(stmt(StmtKind::If { cond: Cond { lhs: var(&i), op, rhs }, then_branch, else_branch }));
        } else {
            effect(&mut rng, &mut body);
        }
    }
    body.push(assign(Assign::Binary { dst: i.clone(), op: BinOp::Add, lhs: var(&i), rhs: Atom::Int(stride) }));
    let op = if rng.random_bool(0.5) { RelOp::Lt } else { RelOp::Le };
    let mut ints = vec![i.clone(), n.clone(), sym("k")];
    ints.extend(invariants.iter().cloned());
    ints.extend(counters.iter().cloned());
    let mut formals: Vec<Param> = ints.iter().map(|s| param(s, Type::Int)).collect();
    formals.extend(arrays.iter().map(|a| param(a, Type::Array(Elem::Int))));
    let looped = stmt(StmtKind::While { cond: Cond { lhs: var(&i), op, rhs: var(&n) }, body });
    let m = Method {
        owner: None,
        name: sym("m"),
        formals,
        locals: vec![],
        ret_ty: Type::Int,
        body: Some(vec![looped, stmt(StmtKind::Return(Atom::Int(0)))]),
        span: Span::default(),
    };
    let program = Program { interfaces: vec![], classes: vec![], methods: vec![m] };
    DfLoop {
        program,
        method: MethodId::free("m"),
        path: StmtPath(vec![0]),
        ints,
        arrays,
        array_len: (2 * max_bound + 8) as usize,
    }
}
