

use super::{Cfg, NodeId, NodeKind};
use crate::lang::ast::{Method, Span, Stmt, StmtKind, StmtPath};

/// Structured translation of a method body: sequences chain, `if` forms a
/// diamond, `while` a back edge; every `return` jumps to the single exit.
pub fn build_cfg(m: &Method) -> Cfg {
    cfg_of_block(m.body_stmts(), &StmtPath::default())
}

/// CFG of a statement list whose paths are rooted at `prefix`. Falling off
/// the end of the block reaches the exit.
pub fn cfg_of_block(block: &[Stmt], prefix: &StmtPath) -> Cfg {
    let mut g = Cfg::default();
    let entry = g.add(NodeKind::Entry, None, Span::default());
    let exit = g.add(NodeKind::Exit, None, Span::default());
    g.entry = entry;
    g.exit = exit;
    let first = lower_block(&mut g, block, prefix, exit);
    g.add_edge(entry, first);
    g
}

/// CFG of a single statement that sits at `path` in its method.
pub fn cfg_of_stmt(s: &Stmt, path: &StmtPath) -> Cfg {
    let mut g = Cfg::default();
    let entry = g.add(NodeKind::Entry, None, Span::default());
    let exit = g.add(NodeKind::Exit, None, Span::default());
    g.entry = entry;
    g.exit = exit;
    let first = lower_stmt(&mut g, s, path.clone(), exit);
    g.add_edge(entry, first);
    g
}

/// Lowers `block` so that it continues at `next`; returns its first node.
fn lower_block(g: &mut Cfg, block: &[Stmt], prefix: &StmtPath, next: NodeId) -> NodeId {
    let mut cont = next;
    for (k, s) in block.iter().enumerate().rev() {
        cont = lower_stmt(g, s, prefix.child(k as u32), cont);
    }
    cont
}

fn lower_stmt(g: &mut Cfg, s: &Stmt, path: StmtPath, next: NodeId) -> NodeId {
    match &s.kind {
        StmtKind::If { cond, then_branch, else_branch } => {
            let b = g.add(NodeKind::Branch { cond: cond.clone(), is_loop: false }, Some(path.clone()), s.span);
            let t = lower_block(g, then_branch, &path.child(0), next);
            let e = lower_block(g, else_branch, &path.child(1), next);
            g.add_edge(b, t);
            g.add_edge(b, e);
            b
        }
        StmtKind::While { cond, body } => {
            let b = g.add(NodeKind::Branch { cond: cond.clone(), is_loop: true }, Some(path.clone()), s.span);
            let first = lower_block(g, body, &path.child(0), b);
            g.add_edge(b, first);
            g.add_edge(b, next);
            b
        }
        StmtKind::Return(_) => {
            let n = g.add(NodeKind::Stmt(s.clone()), Some(path), s.span);
            let exit = g.exit;
            g.add_edge(n, exit);
            n
        }
        _ => {
            let n = g.add(NodeKind::Stmt(s.clone()), Some(path), s.span);
            g.add_edge(n, next);
            n
        }
    }
}

