//! Sub-Turing island identification for Carib, a small Jimple-like language.
//!
//! The crate is `no_std` (it needs `alloc`). It contains the whole analysis:
//!
//! * [`lang`]: AST, parser, pretty-printer and validation for `.carib` sources.
//! * [`cfg`]: control-flow graphs, post-dominance, control dependence and loops.
//! * [`alias`]: l-value representatives, array partitions, write sets, RLV.
//! * [`callgraph`]: class-hierarchy call graph and recursion detection.
//! * [`termination`]: the counter/bound loop termination oracle.
//! * [`summary`]: transition constraints, term types and loop summaries.
//! * [`transform`]: the rewrite of divergent constructs into `⊥` assignments.
//! * [`cook`]: the intraprocedural (Landfall) and interprocedural (Explore) fixpoints.
//! * [`interp`]: a fuel-bounded reference interpreter (concrete and `⊥`-reified).
//! * [`pipeline`]: glue running everything on a parsed program.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod alias;
pub mod callgraph;
pub mod cfg;
pub mod cook;
pub mod hierarchy;
pub mod interp;
pub mod lang;
pub mod pipeline;
pub mod repr;
pub mod summary;
pub mod symbol;
pub mod termination;
pub mod transform;

pub use lang::{parse, pretty, Program};
pub use pipeline::{analyze, prepare, AnalysisConfig, AnalysisOutput, Prepared};

pub use repr::{DivergenceCause, MethodId, PartId, Representative, VarId};
pub use symbol::Symbol;
