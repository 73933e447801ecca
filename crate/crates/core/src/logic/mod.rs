//! Hybrid logic with context-indexed and converse modalities.

mod bounded;
mod cdcl;
mod formula;
mod model;
mod nnf;
mod tableau;

pub use bounded::{sat_bounded, sat_bounded_with, OracleBudget, MAX_BOUND};
pub use formula::{ContextSet, Formula, Nominal, Prop, Vocabulary};
pub use model::{evaluate, modal_theory, validates, KripkeModel, World};
pub use tableau::{
    entailment_counterexample, entails, run_tableau, sat_tableau, TableauBudget, TableauOutcome,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LogicError {
    #[error("world w{0} is not in the model")]
    UnknownWorld(usize),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("budget exceeded: more than {limit} {what}")]
    BudgetExceeded { what: &'static str, limit: usize },
    #[error("world bound {0} is outside 1..={1}")]
    InvalidBound(usize, usize),
    #[error("internal error: {0}")]
    Internal(String),
}
