//! Substitutions, behavioural inclusion, derivations of `Q ⊢σ P` and the
//! component-selection search.

mod derivation;
mod inclusion;
mod library;
mod search;
mod shape;
mod substitution;

pub use derivation::{
    apply_rule, check_derivation, Derivation, DerivationReport, Judgement, NodeReport, Rule,
};
pub use inclusion::{
    check_inclusion, check_observability, observability, Mode, Observability,
    TableauBudgetSpec, Verdict,
};
pub use library::{Component, Library};
pub use search::{minimality_oracle, synthesize, SearchBudget, Synthesis};
pub use shape::{DepKey, Shape};
pub use substitution::{apply_substitution, Substitution};

use crate::logic::LogicError;
use crate::semantics::SemanticsError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynthesisError {
    #[error("invalid substitution: {0}")]
    InvalidSubstitution(String),
    #[error("substitutions disagree on `{variable}`: {left} vs {right}")]
    SubstitutionClash {
        variable: String,
        left: String,
        right: String,
    },
    #[error("component `{0}` is not in the library")]
    NotInLibrary(String),
    #[error("({rule}) side condition failed: {detail}")]
    SideConditionFailed { rule: String, detail: String },
    #[error("malformed derivation: {0}")]
    BadDerivation(String),
    #[error("library: {0}")]
    Library(String),
    #[error("no cover of the goal: {0}")]
    NoCover(String),
    #[error("the selected assembly is not observable")]
    ObservabilityFailed,
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}
