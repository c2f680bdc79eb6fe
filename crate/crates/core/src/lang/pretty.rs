use alloc::string::String;
use core::fmt::Write;

use super::ast::*;
use crate::repr::{MethodId, Representative};

/// Canonical concrete syntax. Bottom assignments print as `bottom(cause)`.
pub fn pretty(p: &Program) -> String {
    let mut out = String::new();
    let mut first = true;
    let mut sep = |out: &mut String| {
        if !first {
            out.push('\n');
        }
        first = false;
    };
    for i in &p.interfaces {
        sep(&mut out);
        out.push_str("interface ");
        out.push_str(&i.name);
        if !i.extends.is_empty() {
            out.push_str(" extends ");
            join(&mut out, i.extends.iter().map(|s| s.as_str()));
        }
        out.push_str(" {}\n");
    }
    for c in &p.classes {
        sep(&mut out);
        let _ = write!(out, "class {}", c.name);
        if let Some(s) = &c.superclass {
            let _ = write!(out, " extends {s}");
        }
        if !c.interfaces.is_empty() {
            out.push_str(" implements ");
            join(&mut out, c.interfaces.iter().map(|s| s.as_str()));
        }
        if c.fields.is_empty() {
            out.push_str(" {}\n");
        } else {
            out.push_str(" {\n");
            for f in &c.fields {
                let _ = writeln!(out, "    {}: {};", f.name, f.ty);
            }
            out.push_str("}\n");
        }
    }
    for m in &p.methods {
        sep(&mut out);
        method(&mut out, m);
    }
    out
}

fn join<'a>(out: &mut String, items: impl Iterator<Item = &'a str>) {
    for (k, s) in items.enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        out.push_str(s);
    }
}

fn params(out: &mut String, ps: &[Param]) {
    for (k, p) in ps.iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{}: {}", p.name, p.ty);
    }
}

fn method(out: &mut String, m: &Method) {
    if m.is_extern() {
        out.push_str("extern ");
    }
    let _ = write!(out, "method {}(", m.id());
    params(out, &m.formals);
    out.push(')');
    if m.ret_ty != Type::Int {
        let _ = write!(out, ": {}", m.ret_ty);
    }
    let Some(body) = &m.body else {
        out.push_str(";\n");
        return;
    };
    out.push_str(" {\n");
    if !m.locals.is_empty() {
        out.push_str("    var ");
        params(out, &m.locals);
        out.push_str(";\n");
    }
    let id = m.id();
    block_body(out, body, 1, &id);
    out.push_str("}\n");
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("    ");
    }
}

fn block_body(out: &mut String, b: &[Stmt], depth: usize, ctx: &MethodId) {
    for s in b {
        stmt(out, s, depth, ctx);
    }
}

fn braced(out: &mut String, b: &[Stmt], depth: usize, ctx: &MethodId) {
    if b.is_empty() {
        out.push_str("{}");
        return;
    }
    out.push_str("{\n");
    block_body(out, b, depth + 1, ctx);
    indent(out, depth);
    out.push('}');
}

pub fn atom_str(a: &Atom) -> String {
    let mut s = String::new();
    let _ = write_atom(&mut s, a);
    s
}

fn write_atom(out: &mut String, a: &Atom) -> core::fmt::Result {
    match a {
        Atom::Var(v) => write!(out, "{v}"),
        Atom::Int(n) => write!(out, "{n}"),
        Atom::Null => write!(out, "null"),
    }
}

pub fn cond_str(c: &Cond) -> String {
    let mut s = String::new();
    let _ = write_atom(&mut s, &c.lhs);
    let _ = write!(s, " {} ", c.op.symbol());
    let _ = write_atom(&mut s, &c.rhs);
    s
}

/// One-line rendering of a simple statement or of a compound statement's head.
pub fn stmt_head(s: &Stmt, ctx: &MethodId) -> String {
    let mut out = String::new();
    match &s.kind {
        StmtKind::Assign(a) => assign(&mut out, a),
        StmtKind::If { cond, .. } => {
            let _ = write!(out, "if {}", cond_str(cond));
        }
        StmtKind::While { cond, .. } => {
            let _ = write!(out, "while {}", cond_str(cond));
        }
        StmtKind::Call(c) => call(&mut out, c),
        StmtKind::Return(a) => {
            out.push_str("return ");
            let _ = write_atom(&mut out, a);
        }
        StmtKind::Bottom(b) => bottom(&mut out, b, ctx),
    }
    out
}

fn stmt(out: &mut String, s: &Stmt, depth: usize, ctx: &MethodId) {
    indent(out, depth);
    match &s.kind {
        StmtKind::If { cond, then_branch, else_branch } => {
            let _ = write!(out, "if {} then ", cond_str(cond));
            braced(out, then_branch, depth, ctx);
            if !else_branch.is_empty() {
                out.push_str(" else ");
                braced(out, else_branch, depth, ctx);
            }
            out.push('\n');
        }
        StmtKind::While { cond, body } => {
            let _ = write!(out, "while {} do ", cond_str(cond));
            braced(out, body, depth, ctx);
            out.push('\n');
        }
        _ => {
            out.push_str(&stmt_head(s, ctx));
            out.push_str(";\n");
        }
    }
}

fn assign(out: &mut String, a: &Assign) {
    let _ = match a {
        Assign::Const { dst, value } => match value {
            Const::Int(n) => write!(out, "{dst} := {n}"),
            Const::Null => write!(out, "{dst} := null"),
            Const::New(c) => write!(out, "{dst} := new {c}"),
            Const::NewArray(Elem::Int, n) => write!(out, "{dst} := new int[{n}]"),
            Const::NewArray(Elem::Ref(c), n) => write!(out, "{dst} := new {c}[{n}]"),
        },
        Assign::Copy { dst, src } => write!(out, "{dst} := {src}"),
        Assign::Unary { dst, op, src } => write!(out, "{dst} := {}{src}", op.symbol()),
        Assign::Binary { dst, op, lhs, rhs } => {
            let _ = write!(out, "{dst} := ");
            let _ = write_atom(out, lhs);
            let _ = write!(out, " {} ", op.symbol());
            write_atom(out, rhs)
        }
        Assign::FieldRead { dst, obj, field } => write!(out, "{dst} := {obj}.{field}"),
        Assign::FieldWrite { obj, field, src } => {
            let _ = write!(out, "{obj}.{field} := ");
            write_atom(out, src)
        }
        Assign::ArrayRead { dst, array, index } => write!(out, "{dst} := {array}[{index}]"),
        Assign::ArrayWrite { array, index, src } => {
            let _ = write!(out, "{array}[{index}] := ");
            write_atom(out, src)
        }
    };
}

fn call(out: &mut String, c: &Call) {
    let _ = write!(out, "{} := {}(", c.target, c.callee);
    join(out, c.args.iter().map(|s| s.as_str()));
    out.push(')');
}

/// A representative as written in a `bottom` target list inside `ctx`.
pub fn target_str(r: &Representative, ctx: &MethodId) -> String {
    let mut s = String::new();
    let _ = write!(s, "{}", r.display_in(Some(ctx)));
    s
}

fn bottom(out: &mut String, b: &BottomAssign, ctx: &MethodId) {
    for (k, t) in b.targets.iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        out.push_str(&target_str(t, ctx));
    }
    if !b.targets.is_empty() {
        out.push(' ');
    }
    let _ = write!(out, ":= bottom({})", b.cause.keyword());
}
