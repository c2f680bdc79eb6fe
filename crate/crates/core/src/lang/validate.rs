//! Static well-formedness: names, types, inheritance and return discipline.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};

use super::ast::*;
use super::error::LangError;
use crate::hierarchy::{Dispatch, Hierarchy};
use crate::symbol::Symbol;

/// Checks `p`. `allow_bottom` admits `bottom` statements (transformed programs).
pub fn validate(p: &Program, allow_bottom: bool) -> Result<(), LangError> {
    check_declarations(p)?;
    let h = Hierarchy::new(p);
    check_members(p, &h)?;
    let methods: BTreeMap<crate::repr::MethodId, &Method> = p.methods.iter().map(|m| (m.id(), m)).collect();
    for m in &p.methods {
        check_method(p, &methods, &h, m, allow_bottom)?;
    }
    Ok(())
}

fn dup(span: Span, name: impl ToString) -> LangError {
    LangError::Duplicate { span, name: name.to_string() }
}

fn check_type(p: &Program, ty: &Type, span: Span) -> Result<(), LangError> {
    let name = match ty {
        Type::Int | Type::Array(Elem::Int) => return Ok(()),
        Type::Ref(n) | Type::Array(Elem::Ref(n)) => n,
    };
    if p.class(name).is_some() || p.interface(name).is_some() {
        Ok(())
    } else {
        Err(LangError::UnknownType { span, name: name.to_string() })
    }
}

fn check_declarations(p: &Program) -> Result<(), LangError> {
    let mut types: BTreeSet<&str> = BTreeSet::new();
    for i in &p.interfaces {
        if !types.insert(&i.name) {
            return Err(dup(i.span, &i.name));
        }
    }
    for c in &p.classes {
        if !types.insert(&c.name) {
            return Err(dup(c.span, &c.name));
        }
    }
    for i in &p.interfaces {
        for e in &i.extends {
            if p.interface(e).is_none() {
                return Err(LangError::UnknownType { span: i.span, name: e.to_string() });
            }
        }
    }
    for c in &p.classes {
        if let Some(s) = &c.superclass {
            if p.class(s).is_none() {
                return Err(LangError::UnknownType { span: c.span, name: s.to_string() });
            }
        }
        for i in &c.interfaces {
            if p.interface(i).is_none() {
                return Err(LangError::UnknownType { span: c.span, name: i.to_string() });
            }
        }
    }
    // Class chains: walk at most |classes| steps.
    for c in &p.classes {
        let mut cur = c.superclass.clone();
        let mut steps = 0;
        while let Some(s) = cur {
            if s == c.name || steps > p.classes.len() {
                return Err(LangError::InheritanceCycle { span: c.span, name: c.name.to_string() });
            }
            steps += 1;
            cur = p.class(&s).and_then(|d| d.superclass.clone());
        }
    }
    // Interface graph: DFS colouring.
    let mut state: BTreeMap<&str, u8> = BTreeMap::new();
    fn visit<'a>(p: &'a Program, name: &'a str, state: &mut BTreeMap<&'a str, u8>) -> Result<(), LangError> {
        match state.get(name) {
            Some(2) => return Ok(()),
            Some(1) => {
                let span = p.interface(name).map(|i| i.span).unwrap_or_default();
                return Err(LangError::InheritanceCycle { span, name: name.to_string() });
            }
            _ => {}
        }
        state.insert(name, 1);
        if let Some(i) = p.interface(name) {
            for e in &i.extends {
                visit(p, e, state)?;
            }
        }
        state.insert(name, 2);
        Ok(())
    }
    for i in &p.interfaces {
        visit(p, &i.name, &mut state)?;
    }
    Ok(())
}

fn check_members(p: &Program, h: &Hierarchy) -> Result<(), LangError> {
    for c in &p.classes {
        let mut own = BTreeSet::new();
        for f in &c.fields {
            check_type(p, &f.ty, f.span)?;
            if !own.insert(&f.name) {
                return Err(dup(f.span, format!("{}.{}", c.name, f.name)));
            }
            if let Some(sup) = &c.superclass {
                if h.field(sup, &f.name).is_some() {
                    return Err(dup(f.span, format!("{}.{}", c.name, f.name)));
                }
            }
        }
    }
    let mut seen = BTreeSet::new();
    for m in &p.methods {
        if !seen.insert(m.id()) {
            return Err(dup(m.span, m.id()));
        }
        if let Some(o) = &m.owner {
            if p.class(o).is_none() {
                return Err(LangError::UnknownType { span: m.span, name: o.to_string() });
            }
        }
        check_type(p, &m.ret_ty, m.span)?;
        let mut names = BTreeSet::new();
        for v in m.formals.iter().chain(&m.locals) {
            check_type(p, &v.ty, v.span)?;
            if &*v.name == RET || !names.insert(&v.name) {
                return Err(dup(v.span, &v.name));
            }
        }
    }
    Ok(())
}

struct MethodCx<'a> {
    p: &'a Program,
    methods: &'a BTreeMap<crate::repr::MethodId, &'a Method>,
    h: &'a Hierarchy,
    m: &'a Method,
    allow_bottom: bool,
}

fn type_err(span: Span, msg: String) -> LangError {
    LangError::Type { span, msg }
}

fn check_method<'a>(
    p: &'a Program,
    methods: &'a BTreeMap<crate::repr::MethodId, &'a Method>,
    h: &'a Hierarchy,
    m: &'a Method,
    allow_bottom: bool,
) -> Result<(), LangError> {
    let Some(body) = &m.body else { return Ok(()) };
    let cx = MethodCx { p, methods, h, m, allow_bottom };
    cx.block(body)?;
    if !always_returns(body) {
        return Err(LangError::MissingReturn { span: m.span, method: m.id().to_string() });
    }
    Ok(())
}

impl MethodCx<'_> {
    fn var(&self, name: &Symbol, span: Span) -> Result<&Type, LangError> {
        if &**name == RET {
            return Err(LangError::UnresolvedName { span, name: name.to_string() });
        }
        self.m.var_type(name).ok_or_else(|| LangError::UnresolvedName { span, name: name.to_string() })
    }

    /// `None` stands for `null`, which fits every reference type.
    fn atom(&self, a: &Atom, span: Span) -> Result<Option<Type>, LangError> {
        Ok(match a {
            Atom::Var(v) => Some(self.var(v, span)?.clone()),
            Atom::Int(_) => Some(Type::Int),
            Atom::Null => None,
        })
    }

    fn assignable(&self, src: &Option<Type>, dst: &Type) -> bool {
        match src {
            None => dst.is_reference(),
            Some(t) => self.h.is_subtype(t, dst),
        }
    }

    fn expect_assignable(&self, src: &Option<Type>, dst: &Type, span: Span) -> Result<(), LangError> {
        if self.assignable(src, dst) {
            Ok(())
        } else {
            let s = match src {
                Some(t) => t.to_string(),
                None => "null".into(),
            };
            Err(type_err(span, format!("cannot assign `{s}` to `{dst}`")))
        }
    }

    fn expect_int(&self, t: &Option<Type>, span: Span) -> Result<(), LangError> {
        if *t == Some(Type::Int) {
            Ok(())
        } else {
            Err(type_err(span, "expected an `int` operand".into()))
        }
    }

    fn comparable(&self, op: RelOp, l: &Option<Type>, r: &Option<Type>, span: Span) -> Result<(), LangError> {
        let ok = match op {
            RelOp::Eq | RelOp::Ne => match (l, r) {
                (Some(Type::Int), Some(Type::Int)) => true,
                (Some(a), Some(b)) => a.is_reference() && b.is_reference(),
                (Some(t), None) | (None, Some(t)) => t.is_reference(),
                (None, None) => true,
            },
            _ => *l == Some(Type::Int) && *r == Some(Type::Int),
        };
        if ok {
            Ok(())
        } else {
            Err(type_err(span, format!("operands of `{}` have incompatible types", op.symbol())))
        }
    }

    fn object_field(&self, obj: &Symbol, field: &Symbol, span: Span) -> Result<Type, LangError> {
        let t = self.var(obj, span)?;
        let Type::Ref(c) = t else {
            return Err(type_err(span, format!("`{obj}` is not an object")));
        };
        if !self.h.is_class(c) {
            return Err(type_err(span, format!("interface `{c}` has no fields")));
        }
        self.h
            .field(c, field)
            .map(|(_, t)| t.clone())
            .ok_or_else(|| LangError::UnresolvedName { span, name: format!("{c}.{field}") })
    }

    fn array_elem(&self, array: &Symbol, index: &Symbol, span: Span) -> Result<Type, LangError> {
        let t = self.var(array, span)?;
        let Type::Array(e) = t else {
            return Err(type_err(span, format!("`{array}` is not an array")));
        };
        let e = Hierarchy::elem_type(e);
        let it = Some(self.var(index, span)?.clone());
        self.expect_int(&it, span)?;
        Ok(e)
    }

    fn block(&self, b: &[Stmt]) -> Result<(), LangError> {
        for (k, s) in b.iter().enumerate() {
            self.stmt(s)?;
            if k + 1 < b.len() && always_returns(&b[..=k]) {
                return Err(LangError::Unreachable { span: b[k + 1].span });
            }
        }
        Ok(())
    }

    fn stmt(&self, s: &Stmt) -> Result<(), LangError> {
        let span = s.span;
        match &s.kind {
            StmtKind::Assign(a) => self.assign(a, span),
            StmtKind::If { cond, then_branch, else_branch } => {
                self.cond(cond, span)?;
                self.block(then_branch)?;
                self.block(else_branch)
            }
            StmtKind::While { cond, body } => {
                self.cond(cond, span)?;
                let mut ret = None;
                walk_stmts(body, &mut |s| {
                    if ret.is_none() && matches!(s.kind, StmtKind::Return(_)) {
                        ret = Some(s.span);
                    }
                });
                if let Some(span) = ret {
                    return Err(LangError::ReturnInLoop { span });
                }
                self.block(body)
            }
            StmtKind::Return(a) => {
                let t = self.atom(a, span)?;
                self.expect_assignable(&t, &self.m.ret_ty, span)
            }
            StmtKind::Call(c) => self.call(c, span),
            StmtKind::Bottom(_) => {
                if self.allow_bottom {
                    Ok(())
                } else {
                    Err(LangError::BottomInSource { span })
                }
            }
        }
    }

    fn cond(&self, c: &Cond, span: Span) -> Result<(), LangError> {
        let l = self.atom(&c.lhs, span)?;
        let r = self.atom(&c.rhs, span)?;
        self.comparable(c.op, &l, &r, span)
    }

    fn assign(&self, a: &Assign, span: Span) -> Result<(), LangError> {
        match a {
            Assign::Const { dst, value } => {
                let dt = self.var(dst, span)?.clone();
                let src = match value {
                    Const::Int(_) => Some(Type::Int),
                    Const::Null => None,
                    Const::New(c) => {
                        if !self.h.is_class(c) {
                            return Err(type_err(span, format!("`new` needs a class, found `{c}`")));
                        }
                        Some(Type::Ref(c.clone()))
                    }
                    Const::NewArray(e, _) => {
                        if let Elem::Ref(n) = e {
                            check_type(self.p, &Type::Ref(n.clone()), span)?;
                        }
                        Some(Type::Array(e.clone()))
                    }
                };
                self.expect_assignable(&src, &dt, span)
            }
            Assign::Copy { dst, src } => {
                let dt = self.var(dst, span)?.clone();
                let st = Some(self.var(src, span)?.clone());
                self.expect_assignable(&st, &dt, span)
            }
            Assign::Unary { dst, src, .. } => {
                self.expect_int(&Some(self.var(dst, span)?.clone()), span)?;
                self.expect_int(&Some(self.var(src, span)?.clone()), span)
            }
            Assign::Binary { dst, op, lhs, rhs } => {
                self.expect_int(&Some(self.var(dst, span)?.clone()), span)?;
                let l = self.atom(lhs, span)?;
                let r = self.atom(rhs, span)?;
                match op {
                    BinOp::Rel(rel) => self.comparable(*rel, &l, &r, span),
                    _ => {
                        self.expect_int(&l, span)?;
                        self.expect_int(&r, span)
                    }
                }
            }
            Assign::FieldRead { dst, obj, field } => {
                let ft = self.object_field(obj, field, span)?;
                let dt = self.var(dst, span)?.clone();
                self.expect_assignable(&Some(ft), &dt, span)
            }
            Assign::FieldWrite { obj, field, src } => {
                let ft = self.object_field(obj, field, span)?;
                let st = self.atom(src, span)?;
                self.expect_assignable(&st, &ft, span)
            }
            Assign::ArrayRead { dst, array, index } => {
                let et = self.array_elem(array, index, span)?;
                let dt = self.var(dst, span)?.clone();
                self.expect_assignable(&Some(et), &dt, span)
            }
            Assign::ArrayWrite { array, index, src } => {
                let et = self.array_elem(array, index, span)?;
                let st = self.atom(src, span)?;
                self.expect_assignable(&st, &et, span)
            }
        }
    }

    fn call(&self, c: &Call, span: Span) -> Result<(), LangError> {
        let dt = self.var(&c.target, span)?.clone();
        let mut arg_types = alloc::vec::Vec::new();
        for a in &c.args {
            arg_types.push(self.var(a, span)?.clone());
        }
        let resolved = self
            .h
            .resolve_call(self.m.owner.as_ref(), &c.callee, arg_types.first())
            .ok_or_else(|| LangError::UnresolvedName { span, name: c.callee.to_string() })?;
        for target in &resolved.targets {
            let callee = self.methods[target];
            if callee.formals.len() != arg_types.len() {
                return Err(type_err(
                    span,
                    format!("`{target}` expects {} arguments, got {}", callee.formals.len(), arg_types.len()),
                ));
            }
            for (k, (f, at)) in callee.formals.iter().zip(&arg_types).enumerate() {
                if k == 0 && resolved.dispatch == Dispatch::Virtual {
                    continue;
                }
                self.expect_assignable(&Some(at.clone()), &f.ty, span)?;
            }
            self.expect_assignable(&Some(callee.ret_ty.clone()), &dt, span)?;
        }
        if resolved.dispatch == Dispatch::Virtual {
            // Every runtime receiver class must fit the first formal of the
            // method it dispatches to.
            let Some(Type::Ref(t)) = arg_types.first() else { unreachable!() };
            for class in self.h.runtime_types(t) {
                if let Some(target) = self.h.dispatch(&class, &c.callee) {
                    let callee = self.methods[target];
                    let f = &callee.formals[0].ty;
                    if !self.h.is_subtype(&Type::Ref(class.clone()), f) {
                        return Err(type_err(span, format!("receiver of class `{class}` does not fit `{target}`")));
                    }
                }
            }
        }
        Ok(())
    }
}
