use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use proptest::prelude::*;

use super::*;
use crate::lang::ast::{Assign, StmtKind};
use crate::lang::parse;

fn method_cfg(src: &str) -> Cfg {
    let p = parse(src).unwrap();
    build_cfg(&p.methods[0])
}

fn node_where(g: &Cfg, f: impl Fn(&NodeKind) -> bool) -> NodeId {
    g.nodes.iter().find(|n| f(&n.kind)).map(|n| n.id).unwrap()
}

#[test]
fn straight_line_is_a_chain() {
    let g = method_cfg("method m() { var x: int; x := 1; return x; }");
    assert_eq!(g.len(), 4);
    assert_eq!(g.edges().len(), 3);
    g.check_invariants().unwrap();
    let mut cur = g.entry;
    let mut seen = 1;
    while cur != g.exit {
        assert_eq!(g.succ(cur).len(), 1);
        cur = g.succ(cur)[0];
        seen += 1;
    }
    assert_eq!(seen, 4);
    assert!(control_dependents(&g).unwrap().is_empty());
    assert!(find_loops(&g).is_empty());
}

const BRANCH: &str = "method m(x: int, z: int) { var y: int; y := 0; if x > 0 then { y := z; } return y; }";

#[test]
fn branch_diamond_and_dependence() {
    let g = method_cfg(BRANCH);
    g.check_invariants().unwrap();
    let branches: Vec<_> = g.nodes.iter().filter(|n| g.is_branch(n.id)).collect();
    assert_eq!(branches.len(), 1);
    let b = branches[0].id;
    let succ = g.succ(b);
    assert_eq!(succ.len(), 2);
    let ret = node_where(&g, |k| matches!(k, NodeKind::Stmt(s) if matches!(s.kind, StmtKind::Return(_))));
    // Both arms converge on the return before the exit.
    assert_eq!(succ[1], ret);
    assert_eq!(g.succ(succ[0]), &[ret]);
    let assign_z = node_where(&g, |k| {
        matches!(k, NodeKind::Stmt(s) if matches!(&s.kind, StmtKind::Assign(Assign::Copy { src, .. }) if &**src == "z"))
    });
    let cd = control_dependents(&g).unwrap();
    assert_eq!(cd[&b], BTreeSet::from([assign_z]));
    assert_eq!(cd.len(), 1);
}

#[test]
fn nested_loops_have_parent_and_depth() {
    let g = method_cfg(
        "method m(n: int) { var i: int, j: int; i := 0; while i < n do { j := 0; while j < n do { j := j + 1; } i := i + 1; } return i; }",
    );
    g.check_invariants().unwrap();
    let loops = find_loops(&g);
    assert_eq!(loops.len(), 2);
    let outer = loops.iter().position(|l| l.depth == 1).unwrap();
    let inner = loops.iter().position(|l| l.depth == 2).unwrap();
    assert_eq!(loops[inner].parent, Some(outer));
    assert!(loops[inner].body.is_subset(&loops[outer].body));
    assert!(loops[outer].body.contains(&loops[outer].header));
    assert_eq!(loops[outer].path.as_ref().unwrap().0, vec![1]);
    assert_eq!(loops[inner].path.as_ref().unwrap().0, vec![1, 0, 1]);
}

#[test]
fn counter_loop_header_is_the_condition() {
    let g = method_cfg("method m(n: int) { var i: int, j: int; i := 0; j := 0; while i < n do { i := i + 1; j := j + 3; } return j; }");
    let loops = find_loops(&g);
    assert_eq!(loops.len(), 1);
    assert!(matches!(g.node(loops[0].header).kind, NodeKind::Branch { is_loop: true, .. }));
    // header + two assignments
    assert_eq!(loops[0].body.len(), 3);
}

#[test]
fn nested_branches_are_transitively_controlling() {
    let g = method_cfg(
        "method m(a: int, b: int) { var y: int; y := 0; if a > 0 then { if b > 0 then { y := 1; } } return y; }",
    );
    let cd = control_dependents(&g).unwrap();
    let tc = transitive_controllers(&g, &cd);
    let y1 = node_where(&g, |k| {
        matches!(k, NodeKind::Stmt(s) if matches!(&s.kind, StmtKind::Assign(Assign::Const { value: crate::lang::ast::Const::Int(1), .. })))
    });
    assert_eq!(tc[y1].len(), 2);
    for (b, deps) in &cd {
        for &n in deps {
            assert!(tc[n].contains(b));
        }
    }
}

#[test]
fn loop_header_controls_its_body_and_itself() {
    let g = method_cfg("method m(n: int) { var i: int; i := 0; while i < n do { i := i + 1; } return i; }");
    let cd = control_dependents(&g).unwrap();
    let h = find_loops(&g)[0].header;
    assert!(cd[&h].contains(&h));
    assert_eq!(cd[&h].len(), 2);
}

#[test]
fn unreachable_exit_is_an_error() {
    let g = Cfg::from_edges(4, &[(0, 1), (1, 2), (2, 1)], 0, 3);
    assert!(matches!(post_dominators(&g), Err(CfgError::UnreachableExit(_))));
    assert!(control_dependents(&g).is_err());
}

fn simple_paths(g: &Cfg, from: NodeId, to: NodeId) -> Vec<Vec<NodeId>> {
    fn go(g: &Cfg, cur: NodeId, to: NodeId, path: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
        if cur == to {
            out.push(path.clone());
            return;
        }
        for &s in g.succ(cur) {
            if !path.contains(&s) {
                path.push(s);
                go(g, s, to, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(g, from, to, &mut vec![from], &mut out);
    out
}

/// `a` post-dominates `b` iff every path from `b` to the exit visits `a`.
fn brute_pdom(g: &Cfg, a: NodeId, b: NodeId) -> bool {
    simple_paths(g, b, g.exit).iter().all(|p| p.contains(&a))
}

/// Ferrante: `y` depends on `x` iff some path `x → s → … → y` has every node
/// after `x` post-dominated by `y`, and `y` does not strictly post-dominate `x`.
fn brute_cd(g: &Cfg, x: NodeId, y: NodeId) -> bool {
    if y != x && brute_pdom(g, y, x) {
        return false;
    }
    for &s in g.succ(x) {
        if s == y {
            return true;
        }
        for p in simple_paths(g, s, y) {
            if p.iter().all(|&n| brute_pdom(g, y, n)) {
                return true;
            }
        }
    }
    false
}

fn arb_graph() -> impl Strategy<Value = Cfg> {
    (3usize..=12).prop_flat_map(|n| {
        let choices = proptest::collection::vec((1..n, 1..n, any::<bool>()), n - 1);
        choices.prop_map(move |succs| {
            let exit = n - 1;
            let mut edges = Vec::new();
            for (v, &(a, b, two)) in succs.iter().enumerate().take(n - 1) {
                if v == 0 {
                    edges.push((0, a));
                    continue;
                }
                edges.push((v, a));
                if two && b != a {
                    edges.push((v, b));
                }
            }
            let _ = exit;
            Cfg::from_edges(n, &edges, 0, n - 1)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn postdom_and_control_dependence_match_brute_force(g in arb_graph()) {
        prop_assume!(g.reaching_exit().len() == g.len());
        let pd = post_dominators(&g).unwrap();
        for a in 0..g.len() {
            for b in 0..g.len() {
                prop_assert_eq!(pd.post_dominates(a, b), brute_pdom(&g, a, b), "pdom({}, {})", a, b);
            }
            if a != g.exit {
                prop_assert!(pd.post_dominates(pd.ipdom[a], a));
            }
        }
        let cd = control_dependents(&g).unwrap();
        for x in 0..g.len() {
            for y in 0..g.len() {
                let fast = cd.get(&x).is_some_and(|s| s.contains(&y));
                prop_assert_eq!(fast, brute_cd(&g, x, y), "cd({}, {})", x, y);
            }
        }
        let tc = transitive_controllers(&g, &cd);
        for (b, ns) in &cd {
            for n in ns {
                prop_assert!(tc[*n].contains(b));
            }
        }
    }

    #[test]
    fn every_back_edge_is_inside_some_loop(g in arb_graph()) {
        let loops = find_loops(&g);
        let reach = g.reachable_from_entry();
        // Brute force: an edge u → h closes a cycle when h reaches u.
        for (u, h) in g.edges() {
            if !reach.contains(&u) {
                continue;
            }
            let closes = g.reach(h, true).contains(&u);
            if closes {
                let covered = loops.iter().any(|l| l.body.contains(&u) && l.body.contains(&h));
                prop_assert!(covered, "cycle edge {} -> {} not in any loop", u, h);
            }
        }
        for (i, l) in loops.iter().enumerate() {
            prop_assert!(l.body.contains(&l.header));
            if let Some(p) = l.parent {
                prop_assert!(p < i);
                prop_assert!(l.body.is_subset(&loops[p].body));
            }
        }
    }
}
