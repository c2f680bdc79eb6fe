use alloc::format;
use alloc::string::String;
use core::fmt::Write;

use super::{Cfg, NodeKind};
use crate::lang::pretty::{cond_str, stmt_head};
use crate::repr::MethodId;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering; branch edges are labelled `T`/`F`.
pub fn to_dot(g: &Cfg, method: &MethodId) -> String {
    let mut out = format!("digraph \"{}\" {{\n", escape(&format!("{method}")));
    for n in &g.nodes {
        let (label, shape) = match &n.kind {
            NodeKind::Entry => (String::from("entry"), "oval"),
            NodeKind::Exit => (String::from("exit"), "oval"),
            NodeKind::Stmt(s) => (stmt_head(s, method), "box"),
            NodeKind::Branch { cond, is_loop } => {
                (format!("{} {}", if *is_loop { "while" } else { "if" }, cond_str(cond)), "diamond")
            }
            NodeKind::Opaque => (String::from("..."), "box"),
        };
        let _ = writeln!(out, "    n{} [label=\"{}\", shape={}];", n.id, escape(&label), shape);
    }
    for n in &g.nodes {
        let succ = g.succ(n.id);
        for (k, s) in succ.iter().enumerate() {
            if g.is_branch(n.id) {
                let _ = writeln!(out, "    n{} -> n{} [label=\"{}\"];", n.id, s, if k == 0 { "T" } else { "F" });
            } else {
                let _ = writeln!(out, "    n{} -> n{};", n.id, s);
            }
        }
    }
    out.push_str("}\n");
    out
}
