//! The full analysis: context, call graph, R and A, φ, then Explore.

use alloc::collections::BTreeSet;

use crate::alias::Context;
use crate::callgraph::{recursion_set, CallGraph, DischargeNone};
use crate::cook::{explore_batched, AnalysisResult, BatchRunner, ExploreConfig, ExploreError};
use crate::interp::ReifyOracle;
use crate::lang::Program;
use crate::repr::MethodId;
use crate::termination::OracleConfig;
use crate::transform::{phi, TransformConfig, TransformOutput};

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct AnalysisConfig {
    /// API methods assumed not to diverge.
    pub safe_list: BTreeSet<MethodId>,
    /// Methods with bodies that are nevertheless treated as API methods.
    pub extra_api: BTreeSet<MethodId>,
    pub oracle: OracleConfig,
    pub explore: ExploreConfig,
}

/// Everything computed before Explore.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub cx: Context,
    /// Call graph of the source program.
    pub callgraph: CallGraph,
    pub recursion: BTreeSet<MethodId>,
    pub api: BTreeSet<MethodId>,
    pub transform: TransformOutput,
    /// Call graph of the transformed program, which Explore walks.
    pub transformed_callgraph: CallGraph,
    pub explore: ExploreConfig,
}

#[derive(Clone, Debug)]
pub struct AnalysisOutput {
    pub prepared: Prepared,
    pub result: AnalysisResult,
}

pub fn prepare(p: &Program, cfg: &AnalysisConfig) -> Prepared {
    let cx = Context::new(p, &cfg.extra_api);
    let callgraph = CallGraph::build(p, &cx);
    let recursion = recursion_set(&callgraph, &DischargeNone);
    let api: BTreeSet<MethodId> = p
        .methods
        .iter()
        .filter(|m| m.is_extern())
        .map(|m| m.id())
        .chain(cfg.extra_api.iter().cloned())
        .filter(|m| !cfg.safe_list.contains(m))
        .collect();
    let tcfg = TransformConfig { api: api.clone(), recursion: recursion.clone(), oracle: cfg.oracle };
    let transform = phi(p, &cx, &tcfg);
    let transformed_callgraph = CallGraph::build(&transform.program, &cx);
    Prepared { cx, callgraph, recursion, api, transform, transformed_callgraph, explore: cfg.explore.clone() }
}

impl Prepared {
    pub fn explore(&self, runner: &dyn BatchRunner) -> Result<AnalysisResult, ExploreError> {
        explore_batched(&self.transform.program, &self.cx, &self.transformed_callgraph, &self.explore, runner)
    }

    /// Oracle decisions for reified runs of the source program.
    pub fn reify_oracle(&self) -> ReifyOracle {
        ReifyOracle::from_transform(&self.transform, self.api.clone(), self.recursion.clone())
    }
}

pub fn analyze(p: &Program, cfg: &AnalysisConfig) -> Result<AnalysisOutput, ExploreError> {
    let prepared = prepare(p, cfg);
    let result = crate::cook::explore(
        &prepared.transform.program,
        &prepared.cx,
        &prepared.transformed_callgraph,
        &prepared.explore,
    )?;
    Ok(AnalysisOutput { prepared, result })
}
