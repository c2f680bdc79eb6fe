use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::*;
use crate::alias::Context;
use crate::callgraph::{recursion_set, CallGraph, DischargeNone};
use crate::cfg::NodeKind;
use crate::lang::{parse, Program, Stmt, StmtPath};
use crate::repr::{DivergenceCause, MethodId, Representative};
use crate::termination::OracleConfig;
use crate::transform::{phi, TransformConfig};

use DivergenceCause::{Api, Loop, Recursion};

const PURE_CALL: &str = "method foo() { var x: int; x := 5; x := bar(); return x; } \
                     method bar() { var y: int; y := 1; return y; }";
const LOOP_CALL: &str = "method foo() { var x: int; x := 5; x := bar(); return x; } \
                     method bar() { var y: int; y := 0; while y >= 0 do { y := y + 1; } return y; }";
const UNUSED_LOCAL: &str = "extern method api(): int; \
                     method foo() { var x: int, unused: int; x := 5; unused := bar(); return x; } \
                     method bar() { var y: int, r: int; y := 0; r := api(); if r > 0 then { y := y + 1; } return y; }";

struct Run {
    cx: Context,
    program: Program,
    cg: CallGraph,
}

fn prepare(src: &str, safe: &[&str]) -> Run {
    let p = parse(src).unwrap();
    let cx = Context::new(&p, &BTreeSet::new());
    let g = CallGraph::build(&p, &cx);
    let safe: BTreeSet<MethodId> = safe.iter().map(|s| MethodId::parse(s)).collect();
    let cfg = TransformConfig {
        api: p.methods.iter().filter(|m| m.is_extern()).map(|m| m.id()).filter(|m| !safe.contains(m)).collect(),
        recursion: recursion_set(&g, &DischargeNone),
        oracle: OracleConfig::default(),
    };
    let program = phi(&p, &cx, &cfg).program;
    let cg = CallGraph::build(&program, &cx);
    Run { cx, program, cg }
}

fn analyze_with(src: &str, safe: &[&str], cfg: &ExploreConfig) -> AnalysisResult {
    let r = prepare(src, safe);
    explore(&r.program, &r.cx, &r.cg, cfg).unwrap()
}

fn analyze(src: &str) -> AnalysisResult {
    analyze_with(src, &[], &ExploreConfig::default())
}

fn id(s: &str) -> MethodId {
    MethodId::parse(s)
}

fn var(m: &str, x: &str) -> Representative {
    Representative::scalar(&id(m), x)
}

fn st(r: &AnalysisResult) -> Vec<&str> {
    r.st.iter().map(|m| &*m.name).collect()
}

/// Statement `k` of method `m`'s body.
fn stmt(p: &Program, m: &str, k: usize) -> Stmt {
    p.method(&id(m)).unwrap().body_stmts()[k].clone()
}

fn pairs(facts: &FactSet) -> BTreeSet<(Representative, Representative)> {
    facts.iter().map(|f| (f.dep.clone(), f.src.clone())).collect()
}

#[test]
fn gen_of_binary_assignment() {
    let p = parse("method m(y: int, z: int) { var x: int; x := y + z; return x; }").unwrap();
    let cx = Context::new(&p, &BTreeSet::new());
    let t = transfer(&cx, &id("m"), &stmt(&p, "m", 0), &Summaries::new());
    let gen: BTreeSet<Fact> = t.gen.into_iter().collect();
    let want: BTreeSet<Fact> =
        [Fact::new(var("m", "x"), var("m", "y")), Fact::new(var("m", "x"), var("m", "z"))].into_iter().collect();
    assert_eq!(gen, want);
    assert_eq!(t.kill, [var("m", "x")]);
}

#[test]
fn copy_replaces_previous_dependences() {
    let p = parse("method m(y: int, t: int, p: int) { var x: int; x := y; return x; }").unwrap();
    let cx = Context::new(&p, &BTreeSet::new());
    let d: FactSet = [Fact::new(var("m", "x"), var("m", "t")), Fact::new(var("m", "y"), var("m", "p"))].into_iter().collect();
    let out = data_dep(&cx, &id("m"), &d, &stmt(&p, "m", 0), &Summaries::new());
    let want: FactSet = [Fact::new(var("m", "x"), var("m", "p")), Fact::new(var("m", "y"), var("m", "p"))].into_iter().collect();
    assert_eq!(out, want);
}

#[test]
fn array_write_is_a_weak_update() {
    let p = parse("method m(a: int[], i: int, v: int) { a[i] := v; return 0; }").unwrap();
    let cx = Context::new(&p, &BTreeSet::new());
    let m = id("m");
    let s = stmt(&p, "m", 0);
    let part = cx.elem_rep(&m, "a").unwrap();
    let t = transfer(&cx, &m, &s, &Summaries::new());
    assert!(t.gen.contains(&Fact::new(part.clone(), var("m", "v"))));
    assert!(t.gen.iter().all(|f| f.dep == part));
    assert!(t.kill.is_empty());
    let d: FactSet = [Fact::new(part.clone(), part.clone())].into_iter().collect();
    let (_, kill) = gen_kill(&cx, &m, &s, &d, &Summaries::new());
    assert!(kill.is_empty());
}

#[test]
fn field_write_keeps_old_facts() {
    let p = parse("class A { f: int; } method m(o: A, v: int) { o.f := v; return 0; }").unwrap();
    let cx = Context::new(&p, &BTreeSet::new());
    let m = id("m");
    let f = Representative::type_field("A", "f");
    let d: FactSet = [Fact::new(f.clone(), f.clone()), Fact::new(var("m", "v"), var("m", "v"))].into_iter().collect();
    let out = data_dep(&cx, &m, &d, &stmt(&p, "m", 0), &Summaries::new());
    assert!(out.contains(&Fact::new(f.clone(), f.clone())));
    assert!(out.contains(&Fact::new(f, var("m", "v"))));
}

#[test]
fn bottom_assignment_generates_divergence_and_kills() {
    let r = prepare("method m(n: int) { var y: int; y := n; while y >= 0 do { y := y + 1; } return y; }", &[]);
    let cx = &r.cx;
    let m = id("m");
    let s = stmt(&r.program, "m", 1);
    let d: FactSet = [Fact::new(var("m", "y"), var("m", "n"))].into_iter().collect();
    let (gen, kill) = gen_kill(cx, &m, &s, &d, &Summaries::new());
    assert_eq!(gen, [Fact::bottom(var("m", "y"), Loop)].into_iter().collect());
    assert_eq!(kill, d);
}

#[test]
fn return_feeds_ret() {
    let r = analyze("method m(y: int) { var x: int; x := y; return x; }");
    let facts = &r.facts[&id("m")];
    assert!(facts.contains(&Fact::new(var("m", "ret"), var("m", "y"))));
    assert!(facts.iter().all(|f| !f.is_divergent()));
}

#[test]
fn constant_return_has_no_divergence() {
    let r = analyze("method m() { var x: int; x := 5; return x; }");
    assert!(r.facts[&id("m")].iter().all(|f| !f.is_divergent()));
    assert_eq!(st(&r), ["m"]);
}

#[test]
fn implicit_dependence_through_branch() {
    let r = analyze("method m(x: int, z: int) { var y: int; y := 0; if x > 0 then { y := z; } return y; }");
    let facts = pairs(&r.facts[&id("m")]);
    assert!(facts.contains(&(var("m", "y"), var("m", "x"))));
    assert!(facts.contains(&(var("m", "y"), var("m", "z"))));
    assert!(facts.contains(&(var("m", "ret"), var("m", "x"))));
}

#[test]
fn control_dependence_facts_per_node() {
    let p = parse("method m(x: int, z: int) { var y: int; y := 0; if x > 0 then { y := z; } return y; }").unwrap();
    let cx = Context::new(&p, &BTreeSet::new());
    let plan = MethodPlan::new(&cx, p.method(&id("m")).unwrap()).unwrap();
    let res = landfall(&cx, &plan, &Summaries::new(), &LandfallConfig::default());
    let node = |path: &[u32]| plan.cfg.node_at(&StmtPath(path.to_vec())).unwrap();
    assert!(matches!(plan.cfg.node(node(&[1, 0, 0])).kind, NodeKind::Stmt(_)));
    let inner = control_dep_facts(&plan, node(&[1, 0, 0]), &res.inputs());
    assert_eq!(pairs(&inner), [(var("m", "y"), var("m", "x"))].into_iter().collect());
    assert!(control_dep_facts(&plan, node(&[0]), &res.inputs()).is_empty());
}

#[test]
fn divergent_branch_condition_taints_controlled_writes() {
    let r = analyze(
        "extern method api(): int; \
         method m(z: int) { var x: int, y: int; x := api(); y := 0; if x > 0 then { y := z; } return y; }",
    );
    let facts = &r.facts[&id("m")];
    assert!(facts.contains(&Fact::bottom(var("m", "y"), Api)));
    assert!(facts.contains(&Fact::bottom(var("m", "ret"), Api)));
}

#[test]
fn nested_branches_both_contribute() {
    let r = analyze(
        "method m(x: int, w: int, z: int) { var y: int; y := 0; \
         if x > 0 then { if w > 0 then { y := z; } } return y; }",
    );
    let facts = pairs(&r.facts[&id("m")]);
    assert!(facts.contains(&(var("m", "y"), var("m", "x"))));
    assert!(facts.contains(&(var("m", "y"), var("m", "w"))));
}

#[test]
fn divergence_propagates_along_chains() {
    let r = analyze(
        "method m(n: int) { var a: int, b: int, c: int; a := n; while a >= 0 do { a := a + 1; } \
         b := a; c := b + 1; return c; }",
    );
    let facts = &r.facts[&id("m")];
    for x in ["a", "b", "c", "ret"] {
        assert!(facts.contains(&Fact::bottom(var("m", x), Loop)), "{x}");
    }
}

#[test]
fn pure_call_both_islands() {
    let r = analyze(PURE_CALL);
    assert_eq!(st(&r), ["bar", "foo"]);
    assert!(r.swamp.is_empty());
}

#[test]
fn loop_call_both_swamp() {
    let r = analyze(LOOP_CALL);
    assert!(r.st.is_empty());
    assert_eq!(r.swamp[&id("bar")], [Loop].into_iter().collect());
    assert_eq!(r.swamp[&id("foo")], [Loop].into_iter().collect());
    assert!(r.summaries[&id("foo")].facts.contains(&Fact::bottom(var("foo", "ret"), Loop)));
}

#[test]
fn unused_local_pre_strip() {
    let r = analyze(UNUSED_LOCAL);
    assert!(r.st.is_empty());
    assert_eq!(r.swamp[&id("bar")], [Api].into_iter().collect());
    let foo = &r.facts[&id("foo")];
    let divergent: BTreeSet<_> = foo.iter().filter(|f| f.is_divergent()).cloned().collect();
    assert_eq!(divergent, [Fact::bottom(var("foo", "unused"), Api)].into_iter().collect());
    assert!(!foo.contains(&Fact::bottom(var("foo", "ret"), Api)));
}

#[test]
fn unused_local_post_strip() {
    let cfg = ExploreConfig { swamp_test: SwampTest::PostStrip, ..Default::default() };
    let r = analyze_with(UNUSED_LOCAL, &[], &cfg);
    assert_eq!(st(&r), ["foo"]);
    assert_eq!(r.swamp[&id("bar")], [Api].into_iter().collect());
    assert!(r.summaries[&id("foo")].facts.iter().all(|f| !f.is_divergent()));
}

#[test]
fn summaries_substitute_actuals_and_drop_locals() {
    let r = analyze(
        "method id(a: int) { var t: int; t := a; return t; } \
         method foo(x: int) { var y: int; y := id(x); return y; }",
    );
    let s = &r.summaries[&id("id")].facts;
    assert_eq!(pairs(s), [(var("id", "ret"), var("id", "a"))].into_iter().collect());
    assert!(r.facts[&id("foo")].contains(&Fact::new(var("foo", "ret"), var("foo", "x"))));
}

#[test]
fn heap_effects_flow_through_summaries() {
    let r = analyze(
        "class A { f: int; } extern method api(): int; \
         method set(o: A) { var v: int; v := api(); o.f := v; return 0; } \
         method get(o: A) { var z: int, u: int; u := set(o); z := o.f; return z; }",
    );
    let f = Representative::type_field("A", "f");
    assert!(r.summaries[&id("set")].facts.contains(&Fact::bottom(f, Api)));
    assert!(r.facts[&id("get")].contains(&Fact::bottom(var("get", "ret"), Api)));
}

const RECURSIVE_KILLED: &str = "method m() { var r: int; r := m(); r := 0; return r; }";

#[test]
fn sticky_marker_survives_kills() {
    let r = analyze(RECURSIVE_KILLED);
    assert_eq!(r.swamp[&id("m")], [Recursion].into_iter().collect());
    assert!(r.summaries[&id("m")].facts.contains(&Fact::bottom(Representative::Bottom, Recursion)));
}

#[test]
fn without_sticky_marker_kills_erase_divergence() {
    let mut cfg = ExploreConfig::default();
    cfg.landfall.sticky = false;
    let r = analyze_with(RECURSIVE_KILLED, &[], &cfg);
    assert_eq!(st(&r), ["m"]);
}

#[test]
fn api_divergence_is_not_sticky() {
    let r = analyze("extern method api(): int; method m() { var r: int; r := api(); r := 0; return r; }");
    assert_eq!(st(&r), ["m"]);
}

const MIXED: &str = "class A { f: int; } extern method api(x: int): int; \
    method a(n: int) { var r: int; r := b(n); return r; } \
    method b(n: int) { var r: int, k: int; if n > 0 then { k := n - 1; r := a(k); } else { r := 0; } return r; } \
    method c(o: A, n: int) { var v: int; v := api(n); o.f := v; return 0; } \
    method d(o: A) { var t: int, u: int, one: int; one := 1; u := c(o, one); t := o.f; return t; } \
    method e(n: int) { var i: int, s: int; i := 0; s := 0; while i < n do { s := s + i; i := i + 1; } return s; } \
    method f(n: int) { var x: int; x := e(n); x := x + 1; return x; } \
    method g(n: int) { var y: int; y := n; while y != 0 do { y := y - 2; } return y; } \
    method h(n: int) { var z: int; z := g(n); return z; }";

#[test]
fn fixpoint_independent_of_order() {
    let run = prepare(MIXED, &[]);
    let base = explore(&run.program, &run.cx, &run.cg, &ExploreConfig::default()).unwrap();
    assert_eq!(st(&base), ["e", "f"]);
    let lifo = ExploreConfig::default().with_order(WorklistOrder::Lifo);
    let mut reversed = ExploreConfig::default();
    reversed.initial = Some(run.cg.nodes.iter().rev().cloned().collect());
    for cfg in [lifo, reversed.clone(), reversed.with_order(WorklistOrder::Lifo)] {
        let other = explore(&run.program, &run.cx, &run.cg, &cfg).unwrap();
        assert!(base.same_outcome(&other), "{cfg:?}");
    }
    let batched = explore_batched(&run.program, &run.cx, &run.cg, &ExploreConfig::default(), &Sequential).unwrap();
    assert!(base.same_outcome(&batched));
}

#[test]
fn causes_accumulate_across_calls() {
    let r = analyze(MIXED);
    assert_eq!(r.swamp[&id("a")], [Recursion].into_iter().collect());
    assert_eq!(r.swamp[&id("d")], [Api].into_iter().collect());
    assert_eq!(r.swamp[&id("h")], [Loop].into_iter().collect());
    let all: BTreeSet<MethodId> = r.st.iter().chain(r.swamp.keys()).cloned().collect();
    assert_eq!(all.len(), r.st.len() + r.swamp.len());
    assert_eq!(all.len(), 8);
}

#[test]
fn safe_list_only_shrinks_the_swamp() {
    let without = analyze_with(MIXED, &[], &ExploreConfig::default());
    let with = analyze_with(MIXED, &["api"], &ExploreConfig::default());
    assert!(without.st.is_subset(&with.st));
    assert!(with.is_st(&id("c")));
    assert!(with.is_st(&id("d")));
}

#[test]
fn safe_listed_extern_relates_outputs_to_inputs() {
    let r = analyze_with(
        "extern method api(x: int): int; method m(n: int) { var v: int; v := api(n); return v; }",
        &["api"],
        &ExploreConfig::default(),
    );
    assert!(r.facts[&id("m")].contains(&Fact::new(var("m", "ret"), var("m", "n"))));
}

#[test]
fn summaries_are_stable() {
    let run = prepare(MIXED, &[]);
    let r = explore(&run.program, &run.cx, &run.cg, &ExploreConfig::default()).unwrap();
    for m in &run.cg.nodes {
        let plan = MethodPlan::new(&run.cx, run.program.method(m).unwrap()).unwrap();
        let out = landfall(&run.cx, &plan, &r.summaries, &LandfallConfig::default());
        assert_eq!(&out.at_exit(), &r.facts[m]);
        assert_eq!(strip_locals(&run.cx, m, &out.at_exit()), r.summaries[m].facts);
    }
}

#[test]
fn summaries_never_mention_locals() {
    let run = prepare(MIXED, &[]);
    let r = explore(&run.program, &run.cx, &run.cg, &ExploreConfig::default()).unwrap();
    for (m, s) in &r.summaries {
        let locals = crate::cook::facts::locals(&run.cx, m);
        assert!(s.facts.iter().all(|f| !locals.contains(&f.dep)), "{m}");
    }
}

#[test]
fn virtual_receiver_taints_dispatch() {
    let r = analyze(
        "interface I {} class A implements I {} class B implements I {} \
         method A.get(self: A) { return 1; } method B.get(self: B) { return 2; } \
         method m(o: I) { var v: int; v := get(o); return v; }",
    );
    assert!(r.facts[&id("m")].contains(&Fact::new(var("m", "ret"), var("m", "o"))));
}
