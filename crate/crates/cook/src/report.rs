//! Per-method verdicts and aggregate statistics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use cook_core::cook::{AnalysisResult, SwampTest};
use cook_core::lang::ast::*;
use cook_core::termination::TerminationVerdict;
use cook_core::{AnalysisOutput, DivergenceCause, MethodId};
use serde::Serialize;

/// Options that shape the analysis and the statistics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportConfig {
    /// API methods assumed not to diverge.
    pub safe_list: BTreeSet<String>,
    /// Methods with fewer statements are trivial.
    pub min_instructions: usize,
    /// Getters and setters are trivial.
    pub exclude_accessors: bool,
    #[serde(serialize_with = "swamp_keyword")]
    pub swamp_test: SwampTest,
}

fn swamp_keyword<S: serde::Serializer>(t: &SwampTest, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(t.keyword())
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            safe_list: BTreeSet::new(),
            min_instructions: 30,
            exclude_accessors: true,
            swamp_test: SwampTest::default(),
        }
    }
}

/// Verification-condition sites: array accesses and field dereferences.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VcCount {
    pub array_accesses: usize,
    pub field_derefs: usize,
}

impl VcCount {
    pub fn total(&self) -> usize {
        self.array_accesses + self.field_derefs
    }

    fn add(&mut self, o: VcCount) {
        self.array_accesses += o.array_accesses;
        self.field_derefs += o.field_derefs;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LoopReport {
    pub path: String,
    pub terminates: bool,
    /// Counter, bound and strides when proven terminating.
    pub witness: Option<String>,
    pub dependency_free: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MethodReport {
    pub name: String,
    /// `st` or `swamp`.
    pub verdict: &'static str,
    pub causes: Vec<&'static str>,
    pub instructions: usize,
    pub accessor: bool,
    pub trivial: bool,
    pub vc: VcCount,
    pub loops: Vec<LoopReport>,
}

/// Percentages of swamp-causing facts by cause.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CauseBreakdown {
    pub api: f64,
    #[serde(rename = "loop")]
    pub loop_: f64,
    pub recursion: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregates {
    pub methods: usize,
    pub st: usize,
    pub swamp: usize,
    /// `None` when there are no methods.
    pub st_percent: Option<f64>,
    pub nontrivial_methods: usize,
    pub nontrivial_st: usize,
    pub st_percent_nontrivial: Option<f64>,
    /// Swamp-causing facts of swamp methods, by cause keyword.
    pub cause_facts: BTreeMap<&'static str, usize>,
    /// `None` when no fact causes divergence.
    pub cause_percent: Option<CauseBreakdown>,
    pub vc_total: usize,
    pub vc_on_islands: usize,
    pub loops_total: usize,
    pub loops_terminating: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub methods: Vec<MethodReport>,
    pub aggregates: Aggregates,
    pub config: ReportConfig,
    /// Wall-clock time of the interprocedural fixpoint.
    pub timing_ms: f64,
}

/// Statements in `m`, counting each `if` and `while` head once.
pub fn instruction_count(m: &Method) -> usize {
    let mut n = 0;
    walk_stmts(m.body_stmts(), &mut |_| n += 1);
    n
}

/// A getter `t := o.f; return t` or a setter `o.f := v; return a`.
pub fn is_accessor(m: &Method) -> bool {
    match m.body_stmts() {
        [Stmt { kind: StmtKind::Assign(Assign::FieldRead { dst, .. }), .. }, Stmt { kind: StmtKind::Return(Atom::Var(r)), .. }] => {
            dst == r
        }
        [Stmt { kind: StmtKind::Assign(Assign::FieldWrite { .. }), .. }, Stmt { kind: StmtKind::Return(_), .. }] => true,
        _ => false,
    }
}

/// Array-access and field-dereference sites in `m`.
pub fn vc_sites(m: &Method) -> VcCount {
    let mut c = VcCount::default();
    walk_stmts(m.body_stmts(), &mut |s| match &s.kind {
        StmtKind::Assign(Assign::ArrayRead { .. } | Assign::ArrayWrite { .. }) => c.array_accesses += 1,
        StmtKind::Assign(Assign::FieldRead { .. } | Assign::FieldWrite { .. }) => c.field_derefs += 1,
        _ => {}
    });
    c
}

/// `(total, on_islands)` over the methods `result` classifies.
pub fn vc_census(p: &Program, result: &AnalysisResult) -> (usize, usize) {
    let (mut total, mut islands) = (0, 0);
    for m in &p.methods {
        let id = m.id();
        if !result.st.contains(&id) && !result.swamp.contains_key(&id) {
            continue;
        }
        let n = vc_sites(m).total();
        total += n;
        if result.is_st(&id) {
            islands += n;
        }
    }
    (total, islands)
}

fn percent(part: usize, whole: usize) -> Option<f64> {
    (whole > 0).then(|| 100.0 * part as f64 / whole as f64)
}

fn loop_report(j: &cook_core::termination::LoopJudgement) -> LoopReport {
    LoopReport {
        path: j.path.to_string(),
        terminates: j.verdict.terminates(),
        witness: match &j.verdict {
            TerminationVerdict::Terminates(_) => Some(j.verdict.to_string()),
            TerminationVerdict::Unknown => None,
        },
        dependency_free: j.is_dependency_free(),
    }
}

/// Assembles the report for the source program `p` analysed as `out`.
pub fn build_report(p: &Program, out: &AnalysisOutput, cfg: &ReportConfig, timing_ms: f64) -> Report {
    let r = &out.result;
    let mut loops: BTreeMap<&MethodId, Vec<LoopReport>> = BTreeMap::new();
    for (m, j) in &out.prepared.transform.loops {
        loops.entry(m).or_default().push(loop_report(j));
    }
    let mut methods = Vec::new();
    let mut cause_facts: BTreeMap<&'static str, usize> = BTreeMap::new();
    let (mut vc_total, mut vc_islands) = (VcCount::default(), VcCount::default());
    for m in &p.methods {
        let id = m.id();
        let st = r.st.contains(&id);
        let causes = match r.swamp.get(&id) {
            Some(c) => c.iter().map(|c| c.keyword()).collect(),
            None if st => Vec::new(),
            None => continue,
        };
        if !st {
            for f in tested_facts(out, &id) {
                if let Some(c) = f.cause {
                    *cause_facts.entry(c.keyword()).or_default() += 1;
                }
            }
        }
        let instructions = instruction_count(m);
        let accessor = is_accessor(m);
        let trivial = instructions < cfg.min_instructions || (cfg.exclude_accessors && accessor);
        let vc = vc_sites(m);
        vc_total.add(vc);
        if st {
            vc_islands.add(vc);
        }
        methods.push(MethodReport {
            name: id.to_string(),
            verdict: if st { "st" } else { "swamp" },
            causes,
            instructions,
            accessor,
            trivial,
            vc,
            loops: loops.remove(&id).unwrap_or_default(),
        });
    }
    let n = methods.len();
    let st = methods.iter().filter(|m| m.verdict == "st").count();
    let nontrivial = methods.iter().filter(|m| !m.trivial).count();
    let nontrivial_st = methods.iter().filter(|m| !m.trivial && m.verdict == "st").count();
    let facts: usize = cause_facts.values().sum();
    let share = |k: &str| percent(cause_facts.get(k).copied().unwrap_or(0), facts).unwrap_or(0.0);
    let cause_percent = (facts > 0).then(|| CauseBreakdown {
        api: share(DivergenceCause::Api.keyword()),
        loop_: share(DivergenceCause::Loop.keyword()),
        recursion: share(DivergenceCause::Recursion.keyword()),
    });
    let all_loops = &out.prepared.transform.loops;
    let aggregates = Aggregates {
        methods: n,
        st,
        swamp: n - st,
        st_percent: percent(st, n),
        nontrivial_methods: nontrivial,
        nontrivial_st,
        st_percent_nontrivial: percent(nontrivial_st, nontrivial),
        cause_facts,
        cause_percent,
        vc_total: vc_total.total(),
        vc_on_islands: vc_islands.total(),
        loops_total: all_loops.len(),
        loops_terminating: all_loops.iter().filter(|(_, j)| j.verdict.terminates()).count(),
    };
    Report { methods, aggregates, config: cfg.clone(), timing_ms }
}

/// The facts the swamp test looked at for `id`.
fn tested_facts<'a>(out: &'a AnalysisOutput, id: &MethodId) -> Box<dyn Iterator<Item = &'a cook_core::cook::Fact> + 'a> {
    let r = &out.result;
    match out.prepared.explore.swamp_test {
        SwampTest::PreStrip => Box::new(r.facts.get(id).into_iter().flatten()),
        SwampTest::PostStrip => Box::new(r.summaries.get(id).into_iter().flat_map(|s| s.facts.iter())),
    }
}

fn opt_percent(p: Option<f64>) -> String {
    p.map_or_else(|| "n/a".to_string(), |v| format!("{v:.1}%"))
}

/// Human-readable rendering.
pub fn render_text(r: &Report) -> String {
    let mut s = String::new();
    for m in &r.methods {
        let _ = write!(s, "{:<8} {}", m.verdict, m.name);
        if !m.causes.is_empty() {
            let _ = write!(s, " [{}]", m.causes.join(", "));
        }
        let _ = write!(s, "  instructions={} vc={}", m.instructions, m.vc.total());
        if m.trivial {
            s.push_str(if m.accessor { " (accessor)" } else { " (trivial)" });
        }
        s.push('\n');
        for l in &m.loops {
            let _ = writeln!(s, "    loop at {}: {}", l.path, l.witness.as_deref().unwrap_or("unknown"));
        }
    }
    let a = &r.aggregates;
    let _ = writeln!(s, "methods: {} (st {}, swamp {})", a.methods, a.st, a.swamp);
    let _ = writeln!(s, "ST: {} of all, {} of {} non-trivial", opt_percent(a.st_percent), opt_percent(a.st_percent_nontrivial), a.nontrivial_methods);
    if let Some(c) = &a.cause_percent {
        let _ = writeln!(s, "causes: api {:.1}%, loop {:.1}%, recursion {:.1}%", c.api, c.loop_, c.recursion);
    }
    let _ = writeln!(s, "VC sites: {} total, {} on islands", a.vc_total, a.vc_on_islands);
    let _ = writeln!(s, "loops: {} total, {} proven terminating", a.loops_total, a.loops_terminating);
    let _ = writeln!(s, "explore: {:.1} ms", r.timing_ms);
    s
}
