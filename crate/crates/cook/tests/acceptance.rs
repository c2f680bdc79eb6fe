//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use cook::gen::{entry_args, extern_name, generate_df_loop, generate_program, GenConfig};
use cook::{analyze_program, load_program, ReportConfig};
use cook_core::alias::Context;
use cook_core::cook::{
    compose, explore, transfer_with, AnalysisResult, ExploreConfig, Fact, FactSet, Summaries, SwampTest, TransferOptions,
    WorklistOrder,
};
use cook_core::interp::{run_concrete, run_reified, Cell, DefaultExterns, Heap, RunConfig, RunOutcome, Value};
use cook_core::lang::{parse_transformed, stmt_at, Method, Program, StmtKind, RET};
use cook_core::transform::{phi, TransformConfig};
use cook_core::{parse, prepare, pretty, AnalysisConfig, MethodId, Representative, Symbol};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn id(s: &str) -> MethodId {
    MethodId::parse(s)
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    check(t < limit, || format!("{what} took {t:?}, limit {limit:?}"))
}

fn classify(file: &str, swamp_test: SwampTest) -> Result<(cook_core::AnalysisOutput, cook::Report), String> {
    let p = load_program(&[fixture(file)]).map_err(|e| e.to_string())?;
    let cfg = ReportConfig { swamp_test, ..Default::default() };
    analyze_program(&p, &cfg, 1).map_err(|e| e.to_string())
}

fn golden_programs() -> Outcome {
    let start = Instant::now();
    let (foo, bar) = (id("foo"), id("bar"));
    let (a, _) = classify("pure_call.carib", SwampTest::PreStrip)?;
    check(a.result.st == [foo.clone(), bar.clone()].into_iter().collect(), || format!("pure call: ST = {:?}", a.result.st))?;

    let (b, _) = classify("loop_call.carib", SwampTest::PreStrip)?;
    check(b.result.st.is_empty(), || format!("loop call: ST = {:?}", b.result.st))?;
    let ret_bottom = Fact::bottom(Representative::scalar(&foo, RET), cook_core::DivergenceCause::Loop);
    check(b.result.facts[&foo].contains(&ret_bottom), || "loop call: no (foo::ret, ⊥) fact".into())?;

    let (c, _) = classify("unused_local.carib", SwampTest::PreStrip)?;
    let api: BTreeSet<_> = [cook_core::DivergenceCause::Api].into_iter().collect();
    check(c.result.swamp.get(&bar) == Some(&api), || format!("unused local: bar causes {:?}", c.result.swamp.get(&bar)))?;
    check(!c.result.is_st(&foo), || "unused local pre-strip: foo should be swamp".into())?;

    let (cp, _) = classify("unused_local.carib", SwampTest::PostStrip)?;
    check(cp.result.is_st(&foo) && !cp.result.is_st(&bar), || format!("unused local post-strip ST = {:?}", cp.result.st))?;
    within(start, Duration::from_secs(1), "golden programs")?;
    Ok(format!("pure call, loop call, unused local pre and post in {:?}", start.elapsed()))
}

fn gen_kill_table() -> Outcome {
    let src = "method callee(u: int) { var w: int; w := u; return w; } \
               method m(a: int[], i: int, y: int, z: int, t: int, p: int) { var x: int; \
               x := 5; x := y; x := -y; x := y + z; x := a[i]; a[i] := y; x := callee(y); x := bottom(loop); return y; }";
    let prog = parse_transformed(src).map_err(|e| e.to_string())?;
    let cx = Context::new(&prog, &BTreeSet::new());
    let m = id("m");
    let v = |x: &str| Representative::scalar(&m, x);
    let part = cx.elem_rep(&m, "a").ok_or("no array partition")?;
    let summaries: Summaries = cook_core::analyze(&prog, &AnalysisConfig::default()).map_err(|e| e.to_string())?.result.summaries;
    let opts = TransferOptions { address_deps: false };
    let body = prog.method(&m).unwrap().body_stmts();
    let f = |d: Representative, s: Representative| Fact::new(d, s);
    let loop_bottom = Fact::bottom(v("x"), cook_core::DivergenceCause::Loop);
    let x = || vec![v("x")];
    type Row = (&'static str, Vec<Fact>, Vec<Representative>);
    let rows: Vec<Row> = vec![
        ("id := c", vec![], x()),
        ("id1 := id2", vec![f(v("x"), v("y"))], x()),
        ("id1 := op id2", vec![f(v("x"), v("y"))], x()),
        ("id1 := id2 op id3", vec![f(v("x"), v("y")), f(v("x"), v("z"))], x()),
        ("id1 := id2[id3]", vec![f(v("x"), part.clone())], x()),
        ("id1[id2] := id3", vec![f(part.clone(), v("y"))], vec![]),
        ("r := m(Y)", vec![f(v("x"), v("y"))], x()),
        ("id := bottom", vec![loop_bottom], x()),
        ("return id", vec![f(v(RET), v("y"))], vec![]),
    ];
    for (k, (name, gen, kill)) in rows.iter().enumerate() {
        let t = transfer_with(&cx, &m, &body[k], &summaries, opts);
        let got: BTreeSet<&Fact> = t.gen.iter().collect();
        check(got == gen.iter().collect(), || format!("{name}: gen {:?}, want {gen:?}", t.gen))?;
        let got: BTreeSet<&Representative> = t.kill.iter().collect();
        check(got == kill.iter().collect(), || format!("{name}: kill {:?}, want {kill:?}", t.kill))?;
    }
    let d: FactSet = [f(v("x"), v("t")), f(v("y"), v("p"))].into_iter().collect();
    let t = transfer_with(&cx, &m, &body[1], &summaries, opts);
    let want: FactSet = [f(v("x"), v("p")), f(v("y"), v("p"))].into_iter().collect();
    let got = compose(&t, &d);
    check(got == want, || format!("data_dep worked example: {got:?}"))?;
    Ok("9 rows and the worked example".into())
}

fn summary_exactness() -> Outcome {
    let start = Instant::now();
    let (loops, trials) = (240u64, 6);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut compared = 0;
    for seed in 0..loops {
        let l = generate_df_loop(seed, 50);
        let pre = prepare(&l.program, &AnalysisConfig::default());
        let (_, j) = &pre.transform.loops[0];
        let Some(summary) = j.summary.as_ref().filter(|_| j.is_dependency_free()) else {
            return Err(format!("seed {seed}: loop not summarised ({:?})\n{}", j.df, pretty(&l.program)));
        };
        let m = l.program.method(&l.method).unwrap();
        for _ in 0..trials {
            let mut env: BTreeMap<Symbol, i64> = BTreeMap::new();
            for v in &l.ints {
                let x = match &**v {
                    "i" => rng.random_range(0..=10),
                    "n" | "k" => rng.random_range(0..=50),
                    "p" | "q" | "w" => rng.random_range(-5..=5),
                    _ => rng.random_range(-20..=20),
                };
                env.insert(v.clone(), x);
            }
            let mut heap = Heap::default();
            let mut arrays: BTreeMap<Symbol, Vec<i64>> = BTreeMap::new();
            let mut args = Vec::new();
            for f in &m.formals {
                if let Some(x) = env.get(&f.name) {
                    args.push(Value::Int(*x));
                } else {
                    let items: Vec<i64> = (0..l.array_len).map(|_| rng.random_range(-9..=9)).collect();
                    args.push(heap.alloc_array(cook_core::lang::Elem::Int, items.iter().map(|&x| Value::Int(x)).collect()));
                    arrays.insert(f.name.clone(), items);
                }
            }
            let cx = &pre.cx;
            let out = run_concrete(&l.program, cx, &l.method, &args, heap, &RunConfig::default(), &mut DefaultExterns);
            let RunOutcome::Finished(fin) = out else { return Err(format!("seed {seed}: run ended with {out:?}")) };
            let lookup = |s: &Symbol| env.get(s).copied();
            let value = summary.evaluate(&lookup, 10_000).map_err(|e| format!("seed {seed}: {e}"))?;
            let int = |s: &Symbol| fin.vars.get(s).and_then(|v| v.code());
            for (c, want) in &value.counters {
                check(int(c) == Some(*want), || format!("seed {seed}: {c} = {:?}, summary {want}; env {env:?}", int(c)))?;
            }
            check(int(&Symbol::new("i")) == Some(value.exit), || format!("seed {seed}: exit mismatch, env {env:?}"))?;
            for v in &l.ints {
                if !value.counters.contains_key(v) && &**v != "i" {
                    check(int(v) == Some(env[v]), || format!("seed {seed}: {v} changed unexpectedly"))?;
                }
            }
            for (k, (a, init)) in arrays.iter().enumerate() {
                let mut want = init.clone();
                for (&ix, &x) in value.arrays.get(a).into_iter().flatten() {
                    want[ix as usize] = x;
                }
                let Some(Cell::Array { items, .. }) = fin.heap.cells().get(k) else { return Err("heap layout".into()) };
                let got: Vec<i64> = items.iter().map(|v| v.code().unwrap()).collect();
                check(got == want, || format!("seed {seed}: array {a} differs; env {env:?}"))?;
            }
            compared += 1;
        }
    }
    within(start, Duration::from_secs(30), "summary suite")?;
    Ok(format!("{loops} loops, {compared} entry states, {:?}", start.elapsed()))
}

/// The `while` statements of `m` with the paths φ judged them at.
fn loops_of(m: &Method) -> Vec<cook_core::lang::StmtPath> {
    let mut out = Vec::new();
    fn go(block: &[cook_core::lang::Stmt], at: &cook_core::lang::StmtPath, out: &mut Vec<cook_core::lang::StmtPath>) {
        for (k, s) in block.iter().enumerate() {
            let here = at.child(k as u32);
            match &s.kind {
                StmtKind::While { body, .. } => {
                    out.push(here.clone());
                    go(body, &here.child(0), out);
                }
                StmtKind::If { then_branch, else_branch, .. } => {
                    go(then_branch, &here.child(0), out);
                    go(else_branch, &here.child(1), out);
                }
                _ => {}
            }
        }
    }
    go(m.body_stmts(), &cook_core::lang::StmtPath(Vec::new()), &mut out);
    out
}

fn oracle_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut judged, mut runs, mut faults, mut exhausted) = (0, 0, 0, 0);
    let mut seed = 0;
    while judged < 500 {
        let cfg = GenConfig {
            seed,
            methods: 30,
            max_depth: 3,
            loop_density: 0.35,
            call_density: 0.0,
            extern_density: 0.0,
            recursion: 0.0,
            ..Default::default()
        };
        seed += 1;
        let p = generate_program(&cfg);
        let pre = prepare(&p, &AnalysisConfig::default());
        let verdicts: BTreeMap<_, _> = pre.transform.loops.iter().map(|(m, j)| ((m.clone(), j.path.clone()), j.verdict.terminates())).collect();
        for m in p.methods.iter().filter(|m| !m.is_extern()) {
            for path in loops_of(m) {
                let Some(&terminates) = verdicts.get(&(m.id(), path.clone())) else {
                    return Err(format!("no verdict for {} at {path}", m.id()));
                };
                if !terminates {
                    continue;
                }
                judged += 1;
                // The loop alone, entered from arbitrary stores.
                let s = stmt_at(m.body_stmts(), &path).unwrap().clone();
                let probe = Method {
                    owner: None,
                    name: Symbol::new("probe"),
                    formals: m.formals.iter().chain(&m.locals).cloned().collect(),
                    locals: vec![],
                    ret_ty: cook_core::lang::Type::Int,
                    body: Some(vec![s, cook_core::lang::Stmt::new(StmtKind::Return(cook_core::lang::Atom::Int(0)))]),
                    span: Default::default(),
                };
                let mut q = Program { interfaces: vec![], classes: p.classes.clone(), methods: vec![probe.clone()] };
                q.methods.extend(p.methods.iter().filter(|m| &*m.name == "v").cloned());
                let cx = Context::new(&q, &BTreeSet::new());
                for _ in 0..100 {
                    let mut heap = Heap::default();
                    let args = entry_args(&q, &probe, &mut rng, &mut heap);
                    let args: Vec<Value> = args.into_iter().map(|v| if let Value::Int(_) = v { Value::Int(rng.random_range(-100..=100)) } else { v }).collect();
                    match run_concrete(&q, &cx, &probe.id(), &args, heap, &RunConfig::default(), &mut DefaultExterns) {
                        RunOutcome::FuelExhausted { .. } => exhausted += 1,
                        RunOutcome::Fault(_) => faults += 1,
                        RunOutcome::Finished(_) => {}
                    }
                    runs += 1;
                }
            }
        }
    }
    check(exhausted == 0, || format!("{exhausted} of {runs} runs exhausted fuel"))?;
    Ok(format!("{judged} terminating loops, {runs} runs, 0 fuel exhaustions ({faults} runtime faults)"))
}

fn over_approximation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut methods, mut runs, mut tainted_runs, mut skipped) = (0, 0, 0, 0);
    let mut seed = 0;
    while methods < 500 {
        let cfg = GenConfig {
            seed: 1000 + seed,
            methods: 25,
            loop_density: 0.0,
            recursion: 0.15,
            extern_density: 0.1,
            call_density: 0.2,
            ..Default::default()
        };
        seed += 1;
        let p = generate_program(&cfg);
        let out = cook_core::analyze(&p, &AnalysisConfig::default()).map_err(|e| e.to_string())?;
        let oracle = out.prepared.reify_oracle();
        for m in p.methods.iter().filter(|m| !m.is_extern()) {
            let id = m.id();
            methods += 1;
            let allowed: BTreeSet<&Representative> = out.result.facts[&id].iter().filter(|f| f.is_divergent()).map(|f| &f.dep).collect();
            for _ in 0..20 {
                let mut heap = Heap::default();
                let args = entry_args(&p, m, &mut rng, &mut heap);
                let r = run_reified(&p, &out.prepared.cx, &id, &args, heap, &RunConfig::default(), &oracle, &mut DefaultExterns);
                runs += 1;
                let RunOutcome::Finished(fin) = r else {
                    skipped += 1;
                    continue;
                };
                let taints = fin.bottoms(&id);
                if !taints.is_empty() {
                    tainted_runs += 1;
                }
                if let Some(r) = taints.iter().find(|r| !allowed.contains(r)) {
                    return Err(format!("{id} (program seed {}): {r} is ⊥ at run time but has no (·, ⊥) fact", 1000 + seed - 1));
                }
            }
        }
    }
    Ok(format!("{methods} methods, {runs} reified runs ({tainted_runs} with taints, {skipped} faulted), 0 violations"))
}

fn fixpoint_determinism() -> Outcome {
    let p = generate_program(&GenConfig { seed: 6, methods: 200, recursion: 0.1, ..Default::default() });
    let base = cook_core::analyze(&p, &AnalysisConfig::default()).map_err(|e| e.to_string())?;
    let mut ids: Vec<MethodId> = base.prepared.transformed_callgraph.nodes.clone();
    let mut runs: Vec<(String, AnalysisResult)> = Vec::new();
    let lifo = AnalysisConfig { explore: ExploreConfig::default().with_order(WorklistOrder::Lifo), ..Default::default() };
    runs.push(("lifo".into(), cook_core::analyze(&p, &lifo).map_err(|e| e.to_string())?.result));
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for k in 0..5 {
        ids.shuffle(&mut rng);
        let order = if rng.random_bool(0.5) { WorklistOrder::Fifo } else { WorklistOrder::Lifo };
        let ecfg = ExploreConfig { initial: Some(ids.clone()), ..ExploreConfig::default().with_order(order) };
        let cfg = AnalysisConfig { explore: ecfg, ..Default::default() };
        let pre = prepare(&p, &cfg);
        let r = explore(&pre.transform.program, &pre.cx, &pre.transformed_callgraph, &pre.explore).map_err(|e| e.to_string())?;
        runs.push((format!("random {k}"), r));
    }
    runs.push(("4 threads".into(), base.prepared.explore(&cook::Threads(4)).map_err(|e| e.to_string())?));
    for (name, r) in &runs {
        check(r.same_outcome(&base.result), || format!("{name} differs from fifo"))?;
    }
    Ok(format!("fifo, lifo, 5 random orders and a 4-thread run agree on {} methods", base.result.st.len() + base.result.swamp.len()))
}

fn safe_list_monotonicity() -> Outcome {
    let cfg = GenConfig { seed: 7, methods: 300, externs: 6, extern_density: 0.15, ..Default::default() };
    let p = generate_program(&cfg);
    let mut prev: Option<BTreeSet<MethodId>> = None;
    let mut sizes = Vec::new();
    for n in 0..5 {
        let safe_list = (0..n).map(|k| MethodId::free(&extern_name(k))).collect();
        let out = cook_core::analyze(&p, &AnalysisConfig { safe_list, ..Default::default() }).map_err(|e| e.to_string())?;
        if let Some(prev) = &prev {
            check(prev.is_subset(&out.result.st), || format!("ST shrank when adding {}", extern_name(n - 1)))?;
        }
        sizes.push(out.result.st.len());
        prev = Some(out.result.st);
    }
    Ok(format!("ST sizes {sizes:?} over 5 nested safe lists"))
}

fn scale() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let file = dir.path().join("big.carib");
    let bin = env!("CARGO_BIN_EXE_cook");
    let start = Instant::now();
    let gen = Command::new(bin).args(["gen", "--seed", "8", "--methods", "40000", "-o"]).arg(&file).status().map_err(|e| e.to_string())?;
    check(gen.success(), || "gen failed".into())?;
    let out = Command::new(bin).arg("analyze").arg(&file).output().map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let n = report["aggregates"]["methods"].as_u64().unwrap_or(0);
    check(n >= 40_000, || format!("report covers {n} methods"))?;
    within(start, Duration::from_secs(240), "gen + analyze")?;
    let target = if elapsed < Duration::from_secs(60) { "within" } else { "over" };
    Ok(format!("{n} methods in {elapsed:.1?} ({target} the 60 s target)"))
}

fn round_trip_and_idempotence() -> Outcome {
    for seed in 0..1000 {
        let cfg = GenConfig { seed: 20_000 + seed, methods: 6, recursion: 0.2, extern_density: 0.1, loop_density: 0.2, ..Default::default() };
        let p = generate_program(&cfg);
        let back = parse(&pretty(&p)).map_err(|e| format!("seed {seed}: {e}"))?;
        check(back.without_spans() == p.without_spans(), || format!("seed {seed}: parse∘pretty differs"))?;
        let pre = prepare(&p, &AnalysisConfig::default());
        let once = &pre.transform.program;
        let text = pretty(once);
        let back = parse_transformed(&text).map_err(|e| format!("seed {seed}: {e}\n{text}"))?;
        check(back.without_spans() == once.without_spans(), || format!("seed {seed}: transformed round trip differs"))?;
        let tcfg = TransformConfig { api: pre.api.clone(), recursion: pre.recursion.clone(), oracle: Default::default() };
        let twice = phi(once, &pre.cx, &tcfg);
        check(&twice.program == once && twice.introduced.is_empty(), || format!("seed {seed}: φ∘φ ≠ φ"))?;
        let fresh = prepare(once, &AnalysisConfig::default());
        check(&fresh.transform.program == once, || format!("seed {seed}: φ of the rewritten program changed it"))?;
    }
    Ok("1000 programs".into())
}

/// Writes past the test harness's output capture so verdicts always show.
fn verdict(line: &str) {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").and_then(|_| out.flush()).expect("stdout");
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("golden programs", golden_programs),
        ("gen/kill table conformance", gen_kill_table),
        ("counter and write-array summaries are exact", summary_exactness),
        ("termination oracle soundness", oracle_soundness),
        ("reified taints within landfall facts", over_approximation),
        ("fixpoint determinism", fixpoint_determinism),
        ("safe-list monotonicity", safe_list_monotonicity),
        ("scale: 40k methods", scale),
        ("round trip and φ idempotence", round_trip_and_idempotence),
    ];
    let mut failed = Vec::new();
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => verdict(&format!("PASS {}. {name}: {detail}", k + 1)),
            Err(why) => {
                verdict(&format!("FAIL {}. {name}: {why}", k + 1));
                failed.push(k + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
