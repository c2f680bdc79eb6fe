//! Representatives ℛ, array alias partitions, write sets w̃ and reachable
//! l-values RLV.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::callgraph::tarjan_scc;
use crate::hierarchy::{CallTargets, Dispatch, Hierarchy};
use crate::lang::ast::*;
use crate::repr::{MethodId, PartId, Representative, VarId};
use crate::symbol::Symbol;

/// Something `a[i]`-indexable whose partition we track.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum ArrayKey {
    Var(VarId),
    /// Array-typed field, keyed by its declaring class.
    Field(Symbol, Symbol),
}

/// An l-value as written in source.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LValue {
    Var(Symbol),
    Field(Symbol, Symbol),
    Elem(Symbol, Symbol),
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum AliasError {
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
    #[error("unknown variable `{0}`")]
    UnknownVar(String),
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("`{0}` has no fields or elements")]
    NotAReference(String),
}

#[derive(Clone, Debug)]
pub struct MethodInfo {
    pub id: MethodId,
    pub formals: Vec<(Symbol, Type)>,
    /// Formals, locals and `ret`.
    pub vars: BTreeMap<Symbol, Type>,
    pub is_extern: bool,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct CallKey {
    owner: Option<Symbol>,
    callee: Symbol,
    recv: Option<Type>,
}

/// Program-wide facts every analysis stage reads: types, call resolution,
/// array partitions, write sets and RLV. Built once from the source program
/// and reused for its transformed version.
#[derive(Clone, Debug)]
pub struct Context {
    pub hier: Hierarchy,
    methods: BTreeMap<MethodId, MethodInfo>,
    parts: BTreeMap<ArrayKey, PartId>,
    part_count: u32,
    calls: BTreeMap<CallKey, CallTargets>,
    rlv_ty: BTreeMap<Symbol, BTreeSet<Representative>>,
    heap_writes: BTreeMap<MethodId, BTreeSet<Representative>>,
    formal_writes: BTreeMap<MethodId, BTreeSet<usize>>,
}

static NO_TARGETS: CallTargets = CallTargets { dispatch: Dispatch::Static, targets: Vec::new() };

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

impl Context {
    /// `extra_api` names non-extern methods that are treated as API methods;
    /// their write sets include everything reachable from their formals.
    pub fn new(p: &Program, extra_api: &BTreeSet<MethodId>) -> Context {
        let hier = Hierarchy::new(p);
        let mut methods = BTreeMap::new();
        for m in &p.methods {
            let mut vars: BTreeMap<Symbol, Type> =
                m.formals.iter().chain(&m.locals).map(|v| (v.name.clone(), v.ty.clone())).collect();
            vars.insert(Symbol::new(RET), m.ret_ty.clone());
            methods.insert(
                m.id(),
                MethodInfo {
                    id: m.id(),
                    formals: m.formals.iter().map(|f| (f.name.clone(), f.ty.clone())).collect(),
                    vars,
                    is_extern: m.is_extern(),
                },
            );
        }
        let mut cx = Context {
            hier,
            methods,
            parts: BTreeMap::new(),
            part_count: 0,
            calls: BTreeMap::new(),
            rlv_ty: BTreeMap::new(),
            heap_writes: BTreeMap::new(),
            formal_writes: BTreeMap::new(),
        };
        cx.resolve_calls(p);
        cx.partition_arrays(p);
        cx.compute_rlv_types();
        cx.compute_write_sets(p, extra_api);
        cx
    }

    fn call_key(&self, m: &MethodId, c: &Call) -> CallKey {
        let recv = c.args.first().and_then(|a| self.var_type(m, a)).filter(|t| matches!(t, Type::Ref(_))).cloned();
        CallKey { owner: m.owner.clone(), callee: c.callee.clone(), recv }
    }

    fn resolve_calls(&mut self, p: &Program) {
        for m in &p.methods {
            let id = m.id();
            walk_stmts(m.body_stmts(), &mut |s| {
                if let StmtKind::Call(c) = &s.kind {
                    let key = self.call_key(&id, c);
                    if !self.calls.contains_key(&key) {
                        let t = self
                            .hier
                            .resolve_call(key.owner.as_ref(), &key.callee, key.recv.as_ref())
                            .unwrap_or_else(|| NO_TARGETS.clone());
                        self.calls.insert(key, t);
                    }
                }
            });
        }
    }

    /// Possible callees of a call site inside `m`.
    pub fn resolve(&self, m: &MethodId, c: &Call) -> &CallTargets {
        self.calls.get(&self.call_key(m, c)).unwrap_or(&NO_TARGETS)
    }

    pub fn method(&self, m: &MethodId) -> Option<&MethodInfo> {
        self.methods.get(m)
    }

    pub fn methods(&self) -> impl Iterator<Item = &MethodInfo> {
        self.methods.values()
    }

    pub fn var_type(&self, m: &MethodId, x: &str) -> Option<&Type> {
        self.methods.get(m)?.vars.get(x)
    }

    /// Classes whose fields are reachable from a value of type `ty`.
    fn reachable_classes(&self, ty: &Type) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<Symbol> = Vec::new();
        let push_ty = |t: &Type, stack: &mut Vec<Symbol>| match t {
            Type::Ref(n) | Type::Array(Elem::Ref(n)) => stack.push(n.clone()),
            _ => {}
        };
        push_ty(ty, &mut stack);
        let mut seen_types = BTreeSet::new();
        while let Some(t) = stack.pop() {
            if !seen_types.insert(t.clone()) {
                continue;
            }
            for c in self.hier.runtime_types(&t) {
                if out.insert(c.clone()) {
                    for (_, _, fty) in self.hier.all_fields(&c) {
                        push_ty(&fty, &mut stack);
                    }
                }
            }
        }
        out
    }

    fn partition_arrays(&mut self, p: &Program) {
        let mut keys: Vec<ArrayKey> = Vec::new();
        for info in self.methods.values() {
            for (v, t) in &info.vars {
                if t.is_array() {
                    keys.push(ArrayKey::Var(VarId { method: info.id.clone(), name: v.clone() }));
                }
            }
        }
        for (c, ci) in &self.hier.classes {
            for (f, t) in &ci.fields {
                if t.is_array() {
                    keys.push(ArrayKey::Field(c.clone(), f.clone()));
                }
            }
        }
        keys.sort();
        keys.dedup();
        let index: BTreeMap<ArrayKey, usize> = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let mut uf = UnionFind { parent: (0..keys.len()).collect() };
        let mut join = |a: &ArrayKey, b: &ArrayKey| {
            if let (Some(&x), Some(&y)) = (index.get(a), index.get(b)) {
                uf.union(x, y);
            }
        };
        let var = |m: &MethodId, x: &str| ArrayKey::Var(VarId::new(m, x));
        for m in &p.methods {
            let id = m.id();
            if m.is_extern() {
                // An unknown method may store any array it can see anywhere it can see.
                let mut ks = Vec::new();
                for (name, ty) in self.methods[&id].vars.iter() {
                    if ty.is_array() {
                        ks.push(var(&id, name));
                    }
                    for c in self.reachable_classes(ty) {
                        for (decl, f, fty) in self.hier.all_fields(&c) {
                            if fty.is_array() {
                                ks.push(ArrayKey::Field(decl, f));
                            }
                        }
                    }
                }
                for k in ks.iter().skip(1) {
                    join(&ks[0], k);
                }
                continue;
            }
            walk_stmts(m.body_stmts(), &mut |s| match &s.kind {
                StmtKind::Assign(Assign::Copy { dst, src }) => join(&var(&id, dst), &var(&id, src)),
                StmtKind::Assign(Assign::FieldRead { dst, obj, field }) => {
                    if let Some(Representative::TypeField { class, field }) = self.field_rep(&id, obj, field) {
                        join(&var(&id, dst), &ArrayKey::Field(class, field));
                    }
                }
                StmtKind::Assign(Assign::FieldWrite { obj, field, src: Atom::Var(src) }) => {
                    if let Some(Representative::TypeField { class, field }) = self.field_rep(&id, obj, field) {
                        join(&var(&id, src), &ArrayKey::Field(class, field));
                    }
                }
                StmtKind::Return(Atom::Var(v)) => join(&var(&id, RET), &var(&id, v)),
                StmtKind::Call(c) => {
                    for t in &self.resolve(&id, c).targets {
                        let Some(callee) = self.methods.get(t) else { continue };
                        for ((f, _), a) in callee.formals.iter().zip(&c.args) {
                            join(&var(&id, a), &var(t, f));
                        }
                        join(&var(&id, &c.target), &var(t, RET));
                    }
                }
                _ => {}
            });
        }
        let mut ids: BTreeMap<usize, PartId> = BTreeMap::new();
        for (i, k) in keys.iter().enumerate() {
            let root = uf.find(i);
            let next = PartId(ids.len() as u32);
            let id = *ids.entry(root).or_insert(next);
            self.parts.insert(k.clone(), id);
        }
        self.part_count = ids.len() as u32;
    }

    fn compute_rlv_types(&mut self) {
        let names: Vec<Symbol> = self.hier.classes.keys().chain(self.hier.interfaces.keys()).cloned().collect();
        for n in names {
            let mut out = BTreeSet::new();
            for c in self.reachable_classes(&Type::Ref(n.clone())) {
                for (decl, f, fty) in self.hier.all_fields(&c) {
                    if fty.is_array() {
                        if let Some(&p) = self.parts.get(&ArrayKey::Field(decl.clone(), f.clone())) {
                            out.insert(Representative::ArrayPart(p));
                        }
                    }
                    out.insert(Representative::TypeField { class: decl, field: f });
                }
            }
            self.rlv_ty.insert(n, out);
        }
    }

    fn compute_write_sets(&mut self, p: &Program, extra_api: &BTreeSet<MethodId>) {
        let ids: Vec<MethodId> = p.methods.iter().map(|m| m.id()).collect();
        let index: BTreeMap<MethodId, usize> = ids.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut direct: Vec<BTreeSet<Representative>> = vec![BTreeSet::new(); ids.len()];
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); ids.len()];
        for (i, m) in p.methods.iter().enumerate() {
            let id = &ids[i];
            if m.is_extern() || extra_api.contains(id) {
                for (f, _) in &self.methods[id].formals {
                    direct[i].extend(self.rlv(id, f));
                }
            }
            let mut fw = BTreeSet::new();
            let formal_index = |x: &str| m.formals.iter().position(|f| &*f.name == x);
            walk_stmts(m.body_stmts(), &mut |s| {
                let scalar = match &s.kind {
                    StmtKind::Assign(Assign::FieldWrite { obj, field, .. }) => {
                        direct[i].extend(self.field_rep(id, obj, field));
                        None
                    }
                    StmtKind::Assign(Assign::ArrayWrite { array, .. }) => {
                        direct[i].extend(self.elem_rep(id, array));
                        None
                    }
                    StmtKind::Assign(a) => a.scalar_dst().cloned(),
                    StmtKind::Call(c) => {
                        for t in &self.resolve(id, c).targets {
                            if let Some(&j) = index.get(t) {
                                adj[i].push(j);
                            }
                        }
                        Some(c.target.clone())
                    }
                    StmtKind::Bottom(b) => {
                        for t in &b.targets {
                            match t {
                                Representative::Scalar(v) if v.method == *id => {
                                    if let Some(k) = formal_index(&v.name) {
                                        fw.insert(k);
                                    }
                                }
                                r if r.is_heap() => {
                                    direct[i].insert(r.clone());
                                }
                                _ => {}
                            }
                        }
                        None
                    }
                    _ => None,
                };
                if let Some(x) = scalar {
                    if let Some(k) = formal_index(&x) {
                        fw.insert(k);
                    }
                }
            });
            self.formal_writes.insert(id.clone(), fw);
        }
        // Callees come before callers in Tarjan's output.
        let mut total: Vec<BTreeSet<Representative>> = vec![BTreeSet::new(); ids.len()];
        for comp in tarjan_scc(&adj) {
            let mut acc = BTreeSet::new();
            for &i in &comp {
                acc.extend(direct[i].iter().cloned());
                for &j in &adj[i] {
                    if !comp.contains(&j) {
                        acc.extend(total[j].iter().cloned());
                    }
                }
            }
            for &i in &comp {
                total[i] = acc.clone();
            }
        }
        for (i, id) in ids.into_iter().enumerate() {
            self.heap_writes.insert(id, core::mem::take(&mut total[i]));
        }
    }

    /// Number of array partitions.
    pub fn partition_count(&self) -> u32 {
        self.part_count
    }

    pub fn partition(&self, key: &ArrayKey) -> Option<PartId> {
        self.parts.get(key).copied()
    }

    /// Partition of an array-typed variable.
    pub fn part_of(&self, m: &MethodId, x: &str) -> Option<PartId> {
        self.partition(&ArrayKey::Var(VarId::new(m, x)))
    }

    pub fn var_rep(&self, m: &MethodId, x: &str) -> Representative {
        Representative::scalar(m, x)
    }

    /// ℛ(o.f): the field qualified by its declaring class.
    pub fn field_rep(&self, m: &MethodId, obj: &str, field: &str) -> Option<Representative> {
        let Type::Ref(c) = self.var_type(m, obj)? else { return None };
        let (decl, _) = self.hier.field(c, field)?;
        Some(Representative::TypeField { class: decl.clone(), field: Symbol::new(field) })
    }

    /// ℛ(a[i]).
    pub fn elem_rep(&self, m: &MethodId, array: &str) -> Option<Representative> {
        self.part_of(m, array).map(Representative::ArrayPart)
    }

    pub fn representative(&self, m: &MethodId, lv: &LValue) -> Result<Representative, AliasError> {
        let info = self.methods.get(m).ok_or_else(|| AliasError::UnknownMethod(m.to_string()))?;
        let ty = |x: &Symbol| info.vars.get(x).ok_or_else(|| AliasError::UnknownVar(x.to_string()));
        match lv {
            LValue::Var(x) => {
                ty(x)?;
                Ok(self.var_rep(m, x))
            }
            LValue::Field(o, f) => {
                let Type::Ref(c) = ty(o)? else { return Err(AliasError::NotAReference(o.to_string())) };
                let (decl, _) =
                    self.hier.field(c, f).ok_or_else(|| AliasError::UnknownField(alloc::format!("{c}.{f}")))?;
                Ok(Representative::TypeField { class: decl.clone(), field: f.clone() })
            }
            LValue::Elem(a, _) => {
                ty(a)?;
                self.elem_rep(m, a).ok_or_else(|| AliasError::NotAReference(a.to_string()))
            }
        }
    }

    /// RLV(x): representatives reachable from `x` through fields and array
    /// elements, excluding `x` itself.
    pub fn rlv(&self, m: &MethodId, x: &str) -> BTreeSet<Representative> {
        let mut out = BTreeSet::new();
        match self.var_type(m, x) {
            Some(Type::Ref(n)) => out.extend(self.rlv_ty.get(n).into_iter().flatten().cloned()),
            Some(Type::Array(e)) => {
                out.extend(self.elem_rep(m, x));
                if let Elem::Ref(n) = e {
                    out.extend(self.rlv_ty.get(n).into_iter().flatten().cloned());
                }
            }
            _ => {}
        }
        out
    }

    /// Heap representatives a call to `m` may write, transitively.
    pub fn heap_writes(&self, m: &MethodId) -> &BTreeSet<Representative> {
        static EMPTY: BTreeSet<Representative> = BTreeSet::new();
        self.heap_writes.get(m).unwrap_or(&EMPTY)
    }

    /// Indices of `m`'s formals that its body assigns.
    pub fn formal_writes(&self, m: &MethodId) -> &BTreeSet<usize> {
        static EMPTY: BTreeSet<usize> = BTreeSet::new();
        self.formal_writes.get(m).unwrap_or(&EMPTY)
    }

    /// w̃ of a call site: its target and whatever heap any callee may write.
    pub fn call_written(&self, m: &MethodId, c: &Call) -> BTreeSet<Representative> {
        let mut out = BTreeSet::new();
        out.insert(self.var_rep(m, &c.target));
        for t in &self.resolve(m, c).targets {
            out.extend(self.heap_writes(t).iter().cloned());
        }
        out
    }

    /// w̃(body(callee)[X/F]) ∪ {r}: like [`Context::call_written`], plus the
    /// actuals whose formals the callee assigns.
    pub fn call_written_substituted(&self, m: &MethodId, c: &Call) -> BTreeSet<Representative> {
        let mut out = self.call_written(m, c);
        for t in &self.resolve(m, c).targets {
            for &k in self.formal_writes(t) {
                if let Some(a) = c.args.get(k) {
                    out.insert(self.var_rep(m, a));
                }
            }
        }
        out
    }

    /// ⋃ RLV(actual) ∪ {r}: what an API call may write.
    pub fn api_written(&self, m: &MethodId, c: &Call) -> BTreeSet<Representative> {
        let mut out = BTreeSet::new();
        for a in &c.args {
            out.extend(self.rlv(m, a));
        }
        out.insert(self.var_rep(m, &c.target));
        out
    }

    /// w̃(s): representatives of every syntactic assignment target in `s`,
    /// callee effects included.
    pub fn written_reps(&self, m: &MethodId, s: &Stmt) -> BTreeSet<Representative> {
        let mut out = BTreeSet::new();
        self.collect_written(m, s, &mut out);
        out
    }

    pub fn written_reps_block(&self, m: &MethodId, b: &[Stmt]) -> BTreeSet<Representative> {
        let mut out = BTreeSet::new();
        for s in b {
            self.collect_written(m, s, &mut out);
        }
        out
    }

    fn collect_written(&self, m: &MethodId, s: &Stmt, out: &mut BTreeSet<Representative>) {
        match &s.kind {
            StmtKind::Assign(Assign::FieldWrite { obj, field, .. }) => out.extend(self.field_rep(m, obj, field)),
            StmtKind::Assign(Assign::ArrayWrite { array, .. }) => out.extend(self.elem_rep(m, array)),
            StmtKind::Assign(a) => {
                if let Some(d) = a.scalar_dst() {
                    out.insert(self.var_rep(m, d));
                }
            }
            StmtKind::Call(c) => out.extend(self.call_written(m, c)),
            StmtKind::Return(_) => {
                out.insert(self.var_rep(m, RET));
            }
            StmtKind::Bottom(b) => out.extend(b.targets.iter().cloned()),
            StmtKind::If { then_branch, else_branch, .. } => {
                for s in then_branch.iter().chain(else_branch) {
                    self.collect_written(m, s, out);
                }
            }
            StmtKind::While { body, .. } => {
                for s in body {
                    self.collect_written(m, s, out);
                }
            }
        }
    }

    /// Representatives read by an assignment's right-hand side (fv mapped
    /// through ℛ), not counting base or index variables of a write.
    pub fn rhs_reps(&self, m: &MethodId, a: &Assign) -> BTreeSet<Representative> {
        let mut out = BTreeSet::new();
        let atom = |x: &Atom, out: &mut BTreeSet<Representative>| {
            if let Atom::Var(v) = x {
                out.insert(self.var_rep(m, v));
            }
        };
        match a {
            Assign::Const { .. } => {}
            Assign::Copy { src, .. } | Assign::Unary { src, .. } => {
                out.insert(self.var_rep(m, src));
            }
            Assign::Binary { lhs, rhs, .. } => {
                atom(lhs, &mut out);
                atom(rhs, &mut out);
            }
            Assign::FieldRead { obj, field, .. } => out.extend(self.field_rep(m, obj, field)),
            Assign::ArrayRead { array, .. } => out.extend(self.elem_rep(m, array)),
            Assign::FieldWrite { src, .. } | Assign::ArrayWrite { src, .. } => atom(src, &mut out),
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    fn cx(src: &str) -> (Program, Context) {
        let p = parse(src).unwrap();
        let c = Context::new(&p, &BTreeSet::new());
        (p, c)
    }

    fn set(xs: &[Representative]) -> BTreeSet<Representative> {
        xs.iter().cloned().collect()
    }

    #[test]
    fn scalar_representative_is_itself() {
        let (_, c) = cx("method m() { var x: int; x := 1; return x; }");
        let m = MethodId::free("m");
        assert_eq!(c.representative(&m, &LValue::Var("x".into())).unwrap(), Representative::scalar(&m, "x"));
        assert!(c.representative(&m, &LValue::Var("nope".into())).is_err());
    }

    #[test]
    fn inherited_field_resolves_to_highest_class() {
        let (_, c) = cx("class A { f: int; } class B extends A {} method m(o: B) { var x: int; x := o.f; return x; }");
        let m = MethodId::free("m");
        assert_eq!(
            c.representative(&m, &LValue::Field("o".into(), "f".into())).unwrap(),
            Representative::type_field("A", "f")
        );
        assert!(matches!(
            c.representative(&m, &LValue::Field("o".into(), "g".into())),
            Err(AliasError::UnknownField(_))
        ));
    }

    #[test]
    fn copied_arrays_share_a_partition() {
        let (_, c) = cx("method m(n: int) { var a: int[], b: int[], d: int[], i: int, j: int;
            b := new int[4]; a := b; d := new int[2]; i := 0; j := 1; a[i] := 1; n := b[j]; return n; }");
        let m = MethodId::free("m");
        let ra = c.representative(&m, &LValue::Elem("a".into(), "i".into())).unwrap();
        let rb = c.representative(&m, &LValue::Elem("b".into(), "j".into())).unwrap();
        let rd = c.representative(&m, &LValue::Elem("d".into(), "i".into())).unwrap();
        assert_eq!(ra, rb);
        assert_ne!(ra, rd);
    }

    #[test]
    fn partitions_join_through_calls_fields_and_returns() {
        let (_, c) = cx("class H { arr: int[]; }
            method id(x: int[]): int[] { return x; }
            method m(h: H) { var a: int[], b: int[], c: int[]; a := new int[1]; b := id(a); h.arr := b; c := h.arr; return 0; }
            method other() { var z: int[]; z := new int[1]; return 0; }");
        let m = MethodId::free("m");
        let p = c.part_of(&m, "a").unwrap();
        assert_eq!(c.part_of(&m, "b"), Some(p));
        assert_eq!(c.part_of(&m, "c"), Some(p));
        assert_eq!(c.partition(&ArrayKey::Field("H".into(), "arr".into())), Some(p));
        assert_ne!(c.part_of(&MethodId::free("other"), "z"), Some(p));
    }

    #[test]
    fn rlv_scalar_is_empty() {
        let (_, c) = cx("method m(x: int) { return x; }");
        assert!(c.rlv(&MethodId::free("m"), "x").is_empty());
    }

    #[test]
    fn rlv_of_nested_fields() {
        let (_, c) = cx("class A { b: B; } class B { x: int; } method m(a: A) { return 0; }");
        assert_eq!(
            c.rlv(&MethodId::free("m"), "a"),
            set(&[Representative::type_field("A", "b"), Representative::type_field("B", "x")])
        );
    }

    #[test]
    fn rlv_self_referential_class_terminates() {
        let (_, c) = cx("class N { next: N; v: int; } method m(n: N) { return 0; }");
        assert_eq!(
            c.rlv(&MethodId::free("m"), "n"),
            set(&[Representative::type_field("N", "next"), Representative::type_field("N", "v")])
        );
    }

    #[test]
    fn rlv_of_arrays_includes_elements_and_element_fields() {
        let (_, c) = cx("class A { f: int; } method m(xs: A[], ys: int[]) { return 0; }");
        let m = MethodId::free("m");
        let px = Representative::ArrayPart(c.part_of(&m, "xs").unwrap());
        let py = Representative::ArrayPart(c.part_of(&m, "ys").unwrap());
        assert_eq!(c.rlv(&m, "xs"), set(&[px, Representative::type_field("A", "f")]));
        assert_eq!(c.rlv(&m, "ys"), set(&[py]));
    }

    #[test]
    fn written_reps_examples() {
        let (p, c) = cx("method m() { var x: int, y: int; x := 1; y := x; return y; }");
        let m = MethodId::free("m");
        let body = p.methods[0].body_stmts();
        assert_eq!(
            c.written_reps_block(&m, &body[..2]),
            set(&[Representative::scalar(&m, "x"), Representative::scalar(&m, "y")])
        );
        let (p, c) = cx("method bar() { var y: int, c: int; y := 0; c := 0; while c == 0 do { y := y + 1; } return y; }");
        let m = MethodId::free("bar");
        assert_eq!(c.written_reps(&m, &p.methods[0].body_stmts()[2]), set(&[Representative::scalar(&m, "y")]));
    }

    #[test]
    fn nested_loop_heap_writes() {
        let (p, c) = cx("class O { f: int; } method m(a: int[], o: O, n: int) { var i: int, j: int;
            i := 0; while i < n do { j := 0; while j < n do { a[j] := i; o.f := j; j := j + 1; } i := i + 1; } return 0; }");
        let m = MethodId::free("m");
        let w = c.written_reps(&m, &p.methods[0].body_stmts()[1]);
        assert!(w.contains(&Representative::ArrayPart(c.part_of(&m, "a").unwrap())));
        assert!(w.contains(&Representative::type_field("O", "f")));
        assert!(w.contains(&Representative::scalar(&m, "i")));
        assert!(w.contains(&Representative::scalar(&m, "j")));
    }

    #[test]
    fn call_writes_are_transitive_and_survive_recursion() {
        let (_, c) = cx("class O { f: int; g: int; }
            method a(o: O) { var x: int; o.f := 1; x := b(o); return x; }
            method b(o: O) { var x: int; o.g := 1; x := a(o); return x; }
            method top(o: O) { var r: int; r := a(o); return r; }");
        let expect = set(&[Representative::type_field("O", "f"), Representative::type_field("O", "g")]);
        assert_eq!(c.heap_writes(&MethodId::free("a")), &expect);
        assert_eq!(c.heap_writes(&MethodId::free("b")), &expect);
        assert_eq!(c.heap_writes(&MethodId::free("top")), &expect);
    }

    #[test]
    fn extern_writes_everything_reachable_from_formals() {
        let (_, c) = cx("class O { f: int; } extern method api(o: O); method m(o: O) { var r: int; r := api(o); return r; }");
        assert_eq!(c.heap_writes(&MethodId::free("api")), &set(&[Representative::type_field("O", "f")]));
        assert_eq!(c.heap_writes(&MethodId::free("m")), &set(&[Representative::type_field("O", "f")]));
    }

    #[test]
    fn substituted_call_writes_include_assigned_formals() {
        let (p, c) = cx("method f(x: int, y: int) { x := 1; return y; }
            method g(a: int, b: int) { var r: int; r := f(a, b); return r; }");
        let g = MethodId::free("g");
        let StmtKind::Call(call) = &p.methods[1].body_stmts()[0].kind else { panic!() };
        assert_eq!(c.call_written(&g, call), set(&[Representative::scalar(&g, "r")]));
        assert_eq!(
            c.call_written_substituted(&g, call),
            set(&[Representative::scalar(&g, "r"), Representative::scalar(&g, "a")])
        );
    }
}
