use serde::{Deserialize, Serialize};

use crate::logic::{
    entailment_counterexample, run_tableau, sat_bounded_with, Formula, KripkeModel, OracleBudget,
    TableauBudget,
};
use crate::semantics::interpret;
use crate::syntax::Program;

use super::SynthesisError;

/// Which decision procedure answers semantic questions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Tableau(TableauBudgetSpec),
    /// Model search up to the given number of worlds.
    Oracle { bound: usize, max_conflicts: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableauBudgetSpec {
    pub max_nodes: usize,
    pub max_branches: usize,
}

impl Default for TableauBudgetSpec {
    fn default() -> Self {
        let b = TableauBudget::default();
        TableauBudgetSpec {
            max_nodes: b.max_nodes,
            max_branches: b.max_branches,
        }
    }
}

impl From<TableauBudgetSpec> for TableauBudget {
    fn from(s: TableauBudgetSpec) -> Self {
        TableauBudget {
            max_nodes: s.max_nodes,
            max_branches: s.max_branches,
        }
    }
}

impl Mode {
    pub fn tableau() -> Self {
        Mode::Tableau(TableauBudgetSpec::default())
    }

    pub fn oracle(bound: usize) -> Self {
        Mode::Oracle {
            bound,
            max_conflicts: OracleBudget::default().max_conflicts,
        }
    }
}

impl Default for Mode {
    fn default() -> Self {
        Mode::tableau()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Included,
    /// A model validating the larger program but not the smaller one.
    NotIncluded(KripkeModel),
    /// The bounded search found no counterexample.
    Inconclusive,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Included => "INCLUDED",
            Verdict::NotIncluded(_) => "NOT INCLUDED",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Observability {
    Observable(KripkeModel),
    Unobservable,
    /// No model with at most this many worlds.
    NoModelUpTo(usize),
}

impl Observability {
    pub fn is_observable(&self) -> bool {
        matches!(self, Observability::Observable(_))
    }
}

fn body(f: Formula) -> Formula {
    match f {
        Formula::AlwaysA(b) => *b,
        other => other,
    }
}

/// `p ⊑ q`: every model validating `q` validates `p`.
pub fn check_inclusion(p: &Program, q: &Program, mode: Mode) -> Result<Verdict, SynthesisError> {
    let fp = interpret(p)?;
    let fq = interpret(q)?;
    match mode {
        Mode::Tableau(budget) => Ok(match entailment_counterexample(&fq, &fp, budget.into())? {
            None => Verdict::Included,
            Some(m) => Verdict::NotIncluded(m),
        }),
        Mode::Oracle {
            bound,
            max_conflicts,
        } => {
            let query = fq.and(Formula::exists(body(fp).negate()));
            Ok(match sat_bounded_with(&query, bound, OracleBudget { max_conflicts })? {
                Some(m) => Verdict::NotIncluded(m),
                None => Verdict::Inconclusive,
            })
        }
    }
}

/// Whether some model validates `⟦p⟧`.
pub fn observability(p: &Program, mode: Mode) -> Result<Observability, SynthesisError> {
    let f = interpret(p)?;
    match mode {
        Mode::Tableau(budget) => {
            let out = run_tableau(&f, budget.into())?;
            Ok(match out.model {
                Some(m) if out.satisfiable => Observability::Observable(m),
                _ => Observability::Unobservable,
            })
        }
        Mode::Oracle {
            bound,
            max_conflicts,
        } => Ok(match sat_bounded_with(&f, bound, OracleBudget { max_conflicts })? {
            Some(m) => Observability::Observable(m),
            None => Observability::NoModelUpTo(bound),
        }),
    }
}

pub fn check_observability(p: &Program) -> Result<bool, SynthesisError> {
    Ok(observability(p, Mode::tableau())?.is_observable())
}
