//! Transition constraints, term types and summaries of dependency-free loops.

pub mod classify;
pub mod summarize;
pub mod term;
pub mod transition;

pub use classify::{classify_terms, df_check, df_check_with, ClassifyError, DfVerdict, Induction, TermTypes};
pub use summarize::{summarize, ArrayFormula, CounterFormula, EvalError, ExitBound, LoopSummary, SummaryError, SummaryValue};
pub use term::{Lin, Opaque, Pred, Term};
pub use transition::{compose, compose_path, ArrayWrite, ComposeError, Effect, PathFormula, Transition, Update};
