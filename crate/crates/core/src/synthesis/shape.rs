//! Order- and repetition-insensitive views of programs.

use std::collections::{BTreeMap, BTreeSet};

use crate::semantics::{normalize, AgentKey, NormalizedDependence};
use crate::syntax::{
    render_states, AgentState, AttrRel, DependenceKind, Ident, Program, StateCollection,
};

/// A dependence with its collections read as sets.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DepKey {
    pub contexts: BTreeSet<Ident>,
    pub kind: DependenceKind,
    pub cause: BTreeSet<AgentState>,
    pub effect: BTreeSet<AgentState>,
}

fn set(c: &StateCollection) -> BTreeSet<AgentState> {
    c.states().iter().cloned().collect()
}

fn collection(s: &BTreeSet<AgentState>) -> StateCollection {
    StateCollection::new(s.iter().cloned().collect()).expect("non-empty")
}

impl DepKey {
    pub fn of(d: &NormalizedDependence) -> DepKey {
        DepKey {
            contexts: d.contexts.clone(),
            kind: d.kind,
            cause: set(&d.cause),
            effect: set(&d.effect),
        }
    }

    pub fn cause_collection(&self) -> StateCollection {
        collection(&self.cause)
    }

    pub fn effect_collection(&self) -> StateCollection {
        collection(&self.effect)
    }

    pub fn render(&self) -> String {
        let dep = format!(
            "{} {} {}",
            render_states(&self.cause_collection()),
            self.kind.arrow(),
            render_states(&self.effect_collection())
        );
        if self.contexts.is_empty() {
            dep
        } else {
            let ks: Vec<&str> = self.contexts.iter().map(Ident::as_str).collect();
            format!("[{}]{{{dep}}}", ks.join(", "))
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Shape {
    pub deps: BTreeSet<DepKey>,
    pub attributes: BTreeMap<AgentKey, BTreeSet<AttrRel>>,
    pub observations: BTreeSet<(Ident, BTreeSet<AgentState>)>,
}

impl Shape {
    pub fn of(p: &Program) -> Shape {
        let nf = normalize(p);
        Shape {
            deps: nf.dependences.iter().map(DepKey::of).collect(),
            attributes: nf.attributes,
            observations: nf
                .observations
                .iter()
                .map(|o| (o.label.clone(), set(&o.states)))
                .collect(),
        }
    }

    pub fn union(&self, other: &Shape) -> Shape {
        let mut out = self.clone();
        out.deps.extend(other.deps.iter().cloned());
        for (k, rels) in &other.attributes {
            out.attributes.entry(k.clone()).or_default().extend(rels.iter().cloned());
        }
        out.observations.extend(other.observations.iter().cloned());
        out
    }

    /// Everything in `self` also appears in `other`; attribute relations are
    /// compared per agent.
    pub fn contained_in(&self, other: &Shape) -> Result<(), String> {
        for d in &self.deps {
            if !other.deps.contains(d) {
                return Err(format!("dependence `{}` not found", d.render()));
            }
        }
        for (key, rels) in &self.attributes {
            let theirs = other.attributes.get(key);
            for r in rels {
                if !theirs.is_some_and(|t| t.contains(r)) {
                    return Err(format!(
                        "attribute relation `{}` of `{}` not declared",
                        crate::syntax::render_attr_rel(r),
                        key.1
                    ));
                }
            }
        }
        for (label, states) in &self.observations {
            if !other.observations.contains(&(label.clone(), states.clone())) {
                return Err(format!("observation `{label}` not found"));
            }
        }
        Ok(())
    }
}
