//! The Cook analysis.

pub mod explore;
pub mod facts;
pub mod landfall;

pub use explore::{explore, explore_batched, AnalysisResult, BatchRunner, ExploreConfig, ExploreError, Sequential, SwampTest};
pub use facts::{
    compose, data_dep, gen_kill, strip_locals, transfer, transfer_with, Fact, FactSet, MethodSummary, Summaries, Transfer,
    TransferOptions,
};
pub use landfall::{control_dep_facts, landfall, LandfallConfig, LandfallResult, MethodPlan, WorklistOrder};

#[cfg(test)]
mod tests;
