//! Symbolic traces, chronological divisions, histories and consistency of
//! a history with respect to a program.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::logic::{modal_theory, ContextSet, Formula, KripkeModel, Nominal, Prop};
use crate::semantics::{dependence_formula_set, state_formula, states_formula};
use crate::syntax::{parse_states, render_state, AgentState, Behaviour, Ident, Program};

mod svg;

pub use svg::render_timeline;

/// Longest trace accepted by [`consistent_histories`].
pub const MAX_TRACE_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TraceError {
    #[error("invalid division {dates:?}: {reason}")]
    InvalidDivision { dates: Vec<usize>, reason: String },
    #[error("trace has {0} steps, more than the limit of {1}")]
    TooLong(usize, usize),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("observation label `{0}` is not declared by the program")]
    UnknownLabel(String),
}

/// A finite sequence of sets of positive agent states. Step indices start at
/// `start` (1 by default).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub start: usize,
    pub steps: Vec<BTreeSet<AgentState>>,
    pub contexts: Vec<BTreeSet<Ident>>,
}

impl Trace {
    pub fn new(steps: Vec<BTreeSet<AgentState>>) -> Self {
        let contexts = vec![BTreeSet::new(); steps.len()];
        Trace {
            start: 1,
            steps,
            contexts,
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The extra closing date: one past the last step index.
    pub fn end(&self) -> usize {
        self.start + self.steps.len()
    }

    pub fn shifted(&self, start: usize) -> Trace {
        Trace {
            start,
            ..self.clone()
        }
    }

    /// Parses the line-oriented trace format:
    ///
    /// ```text
    /// // comment
    /// @1: G(Low)
    /// @2: G(Low), B | contexts: Light
    /// @3:
    /// ```
    ///
    /// Indices must be consecutive. States are positive.
    pub fn parse(text: &str) -> Result<Trace, TraceError> {
        let mut start = None;
        let mut steps = Vec::new();
        let mut contexts = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let err = |message: String| TraceError::Format {
                line: line_no,
                message,
            };
            let line = raw.split("//").next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let rest = line
                .strip_prefix('@')
                .ok_or_else(|| err("a step starts with `@index:`".into()))?;
            let (index, body) = rest
                .split_once(':')
                .ok_or_else(|| err("missing `:` after the step index".into()))?;
            let index: usize = index
                .trim()
                .parse()
                .map_err(|_| err(format!("bad step index `{}`", index.trim())))?;
            match start {
                None => start = Some(index),
                Some(s) if s + steps.len() != index => {
                    return Err(err(format!(
                        "expected step {}, found {index}",
                        s + steps.len()
                    )))
                }
                _ => {}
            }
            let (states_part, ctx_part) = match body.split_once('|') {
                Some((a, b)) => (a, Some(b)),
                None => (body, None),
            };
            let mut step = BTreeSet::new();
            for item in states_part.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let c = parse_states(item).map_err(|e| err(format!("`{item}`: {e}")))?;
                for s in c.into_states() {
                    if !s.is_positive() {
                        return Err(err(format!("negative state `{}` in a trace", render_state(&s))));
                    }
                    step.insert(s);
                }
            }
            let mut ctx = BTreeSet::new();
            if let Some(c) = ctx_part {
                let names = c
                    .trim()
                    .strip_prefix("contexts")
                    .and_then(|r| r.trim_start().strip_prefix(':'))
                    .ok_or_else(|| err("expected `contexts:` after `|`".into()))?;
                for name in names.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    ctx.insert(Ident::new(name).map_err(|e| err(e.to_string()))?);
                }
            }
            steps.push(step);
            contexts.push(ctx);
        }
        if steps.is_empty() {
            return Err(TraceError::Format {
                line: 0,
                message: "a trace needs at least one step".into(),
            });
        }
        Ok(Trace {
            start: start.unwrap_or(1),
            steps,
            contexts,
        })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, (step, ctx)) in self.steps.iter().zip(&self.contexts).enumerate() {
            let states: Vec<String> = step.iter().map(render_state).collect();
            let _ = write!(out, "@{}: {}", self.start + i, states.join(", "));
            if !ctx.is_empty() {
                let names: Vec<&str> = ctx.iter().map(Ident::as_str).collect();
                let _ = write!(out, " | contexts: {}", names.join(", "));
            }
            out.push('\n');
        }
        out
    }
}

/// Starting dates of each period plus the closing date.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ChronologicalDivision(pub Vec<usize>);

impl ChronologicalDivision {
    pub fn new(dates: Vec<usize>) -> Self {
        ChronologicalDivision(dates)
    }

    pub fn dates(&self) -> &[usize] {
        &self.0
    }

    pub fn validate(&self, t: &Trace) -> Result<(), TraceError> {
        let bad = |reason: &str| {
            Err(TraceError::InvalidDivision {
                dates: self.0.clone(),
                reason: reason.into(),
            })
        };
        if self.0.len() < 2 {
            return bad("needs at least a start and a closing date");
        }
        if self.0[0] != t.start {
            return bad("must start at the first step");
        }
        if *self.0.last().unwrap() != t.end() {
            return bad("must close one past the last step");
        }
        if self.0.windows(2).any(|w| w[0] >= w[1]) {
            return bad("dates must strictly increase");
        }
        Ok(())
    }

    /// All divisions of `t`, in lexicographic order of their dates.
    pub fn all(t: &Trace) -> Vec<ChronologicalDivision> {
        let inner: Vec<usize> = (t.start + 1..t.end()).collect();
        let mut out: Vec<ChronologicalDivision> = (0u64..1 << inner.len())
            .map(|mask| {
                let mut d = vec![t.start];
                d.extend(
                    inner
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &x)| x),
                );
                d.push(t.end());
                ChronologicalDivision(d)
            })
            .collect();
        out.sort();
        out
    }
}

impl std::fmt::Display for ChronologicalDivision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let d: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "({})", d.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct History {
    pub periods: Vec<BTreeSet<AgentState>>,
    pub contexts: Vec<BTreeSet<Ident>>,
}

impl History {
    pub fn render(&self) -> String {
        let parts: Vec<String> = self
            .periods
            .iter()
            .map(|p| {
                let s: Vec<String> = p.iter().map(render_state).collect();
                format!("{{{}}}", s.join(", "))
            })
            .collect();
        format!("({})", parts.join(", "))
    }
}

pub fn extract_history(t: &Trace, d: &ChronologicalDivision) -> Result<History, TraceError> {
    d.validate(t)?;
    let mut periods = Vec::new();
    let mut contexts = Vec::new();
    for w in d.0.windows(2) {
        let (lo, hi) = (w[0] - t.start, w[1] - t.start);
        periods.push(t.steps[lo..hi].iter().flatten().cloned().collect());
        contexts.push(t.contexts[lo..hi].iter().flatten().cloned().collect());
    }
    Ok(History { periods, contexts })
}

fn state_prop(s: &AgentState) -> Prop {
    match state_formula(s) {
        Formula::Prop(p) => p,
        _ => unreachable!("trace states are positive"),
    }
}

/// The history as a chain of worlds, one per period, with a closed valuation.
/// The edge into period `i + 1` lies in the base relation and in the
/// relation of that period's contexts.
pub fn history_to_model(h: &History, labels: &BTreeMap<String, usize>) -> KripkeModel {
    let n = h.periods.len().max(1);
    let mut m = KripkeModel::new(n).expect("at least one world");
    for (w, period) in h.periods.iter().enumerate() {
        for s in period {
            m.set_prop(state_prop(s), w).expect("world in range");
        }
    }
    for i in 0..n.saturating_sub(1) {
        m.add_edge(ContextSet::empty(), i, i + 1).expect("world in range");
        let ctx = &h.contexts[i + 1];
        if !ctx.is_empty() {
            let k = ContextSet::of(ctx.iter().map(|c| c.as_str().to_string()));
            m.add_edge(k, i, i + 1).expect("world in range");
        }
    }
    for (label, &w) in labels {
        m.assign_nominal(Nominal::new(label.as_str()), &[w.min(n - 1)])
            .expect("single world");
    }
    m
}

/// One candidate history together with its theory over the dependence
/// formula set (as indices into that set).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedHistory {
    pub division: ChronologicalDivision,
    pub history: History,
    pub theory: BTreeSet<usize>,
}

/// Every division whose history ends with a period satisfying the
/// observation `end_label`, with its theory. Sorted by division.
pub fn rank_histories(
    t: &Trace,
    p: &Program,
    end_label: &str,
) -> Result<(Vec<Formula>, Vec<RankedHistory>), TraceError> {
    if t.len() > MAX_TRACE_LEN {
        return Err(TraceError::TooLong(t.len(), MAX_TRACE_LEN));
    }
    let observed = observation(p, end_label)
        .ok_or_else(|| TraceError::UnknownLabel(end_label.to_string()))?;
    let fs = dependence_formula_set(p);
    let ranked: Vec<RankedHistory> = ChronologicalDivision::all(t)
        .into_par_iter()
        .filter_map(|d| {
            let h = extract_history(t, &d).expect("generated divisions are valid");
            let last = h.periods.len() - 1;
            let labels = BTreeMap::from([(end_label.to_string(), last)]);
            let m = history_to_model(&h, &labels);
            if !m.evaluate(last, &observed).unwrap_or(false) {
                return None;
            }
            let th = modal_theory(&m, &fs);
            let theory = fs
                .iter()
                .enumerate()
                .filter(|(_, f)| th.contains(f))
                .map(|(i, _)| i)
                .collect();
            Some(RankedHistory {
                division: d,
                history: h,
                theory,
            })
        })
        .collect();
    Ok((fs, ranked))
}

/// Histories whose theory is not strictly included in another candidate's.
/// Ties are all kept.
pub fn consistent_histories(
    t: &Trace,
    p: &Program,
    end_label: &str,
) -> Result<Vec<RankedHistory>, TraceError> {
    let (_, ranked) = rank_histories(t, p, end_label)?;
    let theories: BTreeSet<&BTreeSet<usize>> = ranked.iter().map(|r| &r.theory).collect();
    let maximal: Vec<&BTreeSet<usize>> = theories
        .iter()
        .filter(|th| !theories.iter().any(|o| o != *th && th.is_subset(o)))
        .copied()
        .collect();
    let keep: BTreeSet<BTreeSet<usize>> = maximal.into_iter().cloned().collect();
    Ok(ranked.into_iter().filter(|r| keep.contains(&r.theory)).collect())
}

fn observation(p: &Program, label: &str) -> Option<Formula> {
    fn find(bs: &[Behaviour], label: &str, path: &mut Vec<Ident>) -> Option<Formula> {
        for b in bs {
            match b {
                Behaviour::Observation { label: l, states } if l.as_str() == label => {
                    let abs = crate::syntax::StateCollection::new(
                        states.states().iter().map(|s| s.clone().in_compartment(path)).collect(),
                    )?;
                    return Some(states_formula(&abs));
                }
                Behaviour::Compartment { name, body } => {
                    path.push(name.clone());
                    let r = find(body, label, path);
                    path.pop();
                    if r.is_some() {
                        return r;
                    }
                }
                Behaviour::Context { body, .. } => {
                    if let Some(r) = find(body, label, path) {
                        return Some(r);
                    }
                }
                _ => {}
            }
        }
        None
    }
    find(&p.behaviours, label, &mut Vec::new())
}
