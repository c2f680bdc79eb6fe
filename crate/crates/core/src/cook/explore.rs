//! Explore: the interprocedural summary fixpoint.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::alias::Context;
use crate::callgraph::CallGraph;
use crate::cfg::CfgError;
use crate::cook::facts::{strip_locals, FactSet, MethodSummary, Summaries};
use crate::cook::landfall::{landfall, LandfallConfig, LandfallResult, MethodPlan, Worklist, WorklistOrder};
use crate::lang::{Method, Program};
use crate::repr::{DivergenceCause, MethodId};

/// Whether a method is tested for `(x, ⊥)` before or after its locals are
/// removed from its facts.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum SwampTest {
    #[default]
    PreStrip,
    PostStrip,
}

impl SwampTest {
    pub fn keyword(self) -> &'static str {
        match self {
            SwampTest::PreStrip => "pre",
            SwampTest::PostStrip => "post",
        }
    }

    pub fn from_keyword(s: &str) -> Option<SwampTest> {
        match s {
            "pre" | "pre-strip" => Some(SwampTest::PreStrip),
            "post" | "post-strip" => Some(SwampTest::PostStrip),
            _ => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ExploreConfig {
    pub swamp_test: SwampTest,
    pub landfall: LandfallConfig,
    /// Initial worklist order; call-graph order when `None`. Methods missing
    /// from the list are appended.
    pub initial: Option<Vec<MethodId>>,
}

impl ExploreConfig {
    pub fn with_order(mut self, order: WorklistOrder) -> Self {
        self.landfall.order = order;
        self
    }
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum ExploreError {
    #[error("method {method}: {error}")]
    Cfg { method: MethodId, error: CfgError },
}

/// Outcome of Explore over every method with a body.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct AnalysisResult {
    pub st: BTreeSet<MethodId>,
    /// Swamp methods with the causes of their `(·, ⊥)` facts.
    pub swamp: BTreeMap<MethodId, BTreeSet<DivergenceCause>>,
    /// Facts at each method's exit, locals included.
    pub facts: BTreeMap<MethodId, FactSet>,
    pub summaries: Summaries,
    /// Landfall runs until the fixpoint.
    pub landfall_runs: usize,
}

impl AnalysisResult {
    pub fn is_st(&self, m: &MethodId) -> bool {
        self.st.contains(m)
    }

    /// Same classification, facts and summaries; run counts aside.
    pub fn same_outcome(&self, other: &AnalysisResult) -> bool {
        self.st == other.st && self.swamp == other.swamp && self.facts == other.facts && self.summaries == other.summaries
    }
}

/// Runs a batch of independent Landfall jobs, possibly concurrently, and
/// returns their results in job order.
pub trait BatchRunner {
    fn run(&self, jobs: usize, job: &(dyn Fn(usize) -> LandfallResult + Sync)) -> Vec<LandfallResult>;
}

/// Runs every job on the calling thread.
pub struct Sequential;

impl BatchRunner for Sequential {
    fn run(&self, jobs: usize, job: &(dyn Fn(usize) -> LandfallResult + Sync)) -> Vec<LandfallResult> {
        (0..jobs).map(job).collect()
    }
}

struct State<'a> {
    cx: &'a Context,
    cg: &'a CallGraph,
    cfg: &'a ExploreConfig,
    plans: Vec<MethodPlan>,
    result: AnalysisResult,
}

impl<'a> State<'a> {
    fn new(p: &Program, cx: &'a Context, cg: &'a CallGraph, cfg: &'a ExploreConfig) -> Result<State<'a>, ExploreError> {
        let mut plans = Vec::with_capacity(cg.nodes.len());
        let methods: BTreeMap<MethodId, &Method> = p.methods.iter().map(|m| (m.id(), m)).collect();
        for id in &cg.nodes {
            let m = methods[id];
            let plan = MethodPlan::new(cx, m).map_err(|error| ExploreError::Cfg { method: id.clone(), error })?;
            plans.push(plan);
        }
        Ok(State { cx, cg, cfg, plans, result: AnalysisResult::default() })
    }

    fn initial(&self, work: &mut Worklist) {
        if let Some(order) = &self.cfg.initial {
            for m in order {
                if let Some(&k) = self.cg.index.get(m) {
                    work.push(k);
                }
            }
        }
        for k in 0..self.plans.len() {
            work.push(k);
        }
    }

    /// Records one Landfall result; true when the summary changed.
    fn absorb(&mut self, k: usize, out: LandfallResult) -> bool {
        let id = &self.plans[k].id;
        let facts = out.at_exit();
        let summary = strip_locals(self.cx, id, &facts);
        let tested = match self.cfg.swamp_test {
            SwampTest::PreStrip => &facts,
            SwampTest::PostStrip => &summary,
        };
        let causes: BTreeSet<DivergenceCause> = tested.iter().filter_map(|f| f.cause).collect();
        if !causes.is_empty() {
            self.result.swamp.entry(id.clone()).or_default().extend(causes);
        }
        self.result.facts.insert(id.clone(), facts);
        self.result.landfall_runs += 1;
        let new = MethodSummary { method: id.clone(), facts: summary };
        let changed = self.result.summaries.get(id) != Some(&new);
        if changed {
            self.result.summaries.insert(id.clone(), new);
        }
        changed
    }

    fn push_callers(&self, k: usize, work: &mut Worklist) {
        for &c in &self.cg.callers[k] {
            work.push(c);
        }
    }

    fn finish(mut self) -> AnalysisResult {
        for p in &self.plans {
            if !self.result.swamp.contains_key(&p.id) {
                self.result.st.insert(p.id.clone());
            }
        }
        self.result
    }
}

/// Island search on a φ-transformed program: every method starts on the worklist,
/// each pop runs Landfall against the current summaries, and callers are
/// revisited whenever a summary changes.
pub fn explore(p: &Program, cx: &Context, cg: &CallGraph, cfg: &ExploreConfig) -> Result<AnalysisResult, ExploreError> {
    let mut st = State::new(p, cx, cg, cfg)?;
    let mut work = Worklist::new(st.plans.len(), cfg.landfall.order);
    st.initial(&mut work);
    while let Some(k) = work.pop() {
        let out = landfall(cx, &st.plans[k], &st.result.summaries, &cfg.landfall);
        if st.absorb(k, out) {
            st.push_callers(k, &mut work);
        }
    }
    Ok(st.finish())
}

/// Explore in rounds: all pending methods run against the same summary
/// snapshot, then their results are merged in call-graph order. Reaches
/// the same fixpoint as [`explore`].
pub fn explore_batched(
    p: &Program,
    cx: &Context,
    cg: &CallGraph,
    cfg: &ExploreConfig,
    runner: &dyn BatchRunner,
) -> Result<AnalysisResult, ExploreError> {
    let mut st = State::new(p, cx, cg, cfg)?;
    let mut work = Worklist::new(st.plans.len(), cfg.landfall.order);
    st.initial(&mut work);
    loop {
        let mut batch = work.drain();
        if batch.is_empty() {
            break;
        }
        batch.sort_unstable();
        let results = {
            let plans = &st.plans;
            let summaries = &st.result.summaries;
            let lf = &cfg.landfall;
            let job = |i: usize| landfall(cx, &plans[batch[i]], summaries, lf);
            runner.run(batch.len(), &job)
        };
        for (&k, out) in batch.iter().zip(results) {
            if st.absorb(k, out) {
                st.push_callers(k, &mut work);
            }
        }
    }
    Ok(st.finish())
}
