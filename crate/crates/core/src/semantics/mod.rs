//! Translation of programs into hybrid-logic formulas, the per-dependence
//! formula set, and the flattened normal form used by synthesis.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::logic::{ContextSet, Formula, Nominal, Prop};
use crate::syntax::{
    render_attr_rel, render_states, AgentState, AttrRel, Behaviour, Dependence, DependenceKind,
    Ident, Polarity, Program, StateCollection,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("observation label `{0}` is used more than once")]
    DuplicateLabel(Ident),
}

/// An agent qualified by the compartments it lives in.
pub type AgentKey = (Vec<Ident>, Ident);

/// One dependence with its compartment path and context set resolved.
/// Cause and effect states carry absolute compartment paths.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NormalizedDependence {
    pub path: Vec<Ident>,
    pub contexts: BTreeSet<Ident>,
    pub kind: DependenceKind,
    pub cause: StateCollection,
    pub effect: StateCollection,
    /// Attribute relations declared for the agents this dependence mentions.
    pub attributes: BTreeMap<AgentKey, BTreeSet<AttrRel>>,
}

impl NormalizedDependence {
    pub fn context_set(&self) -> ContextSet {
        ContextSet::of(self.contexts.iter().map(|c| c.as_str().to_string()))
    }

    pub fn agents(&self) -> BTreeSet<AgentKey> {
        self.cause
            .states()
            .iter()
            .chain(self.effect.states())
            .map(agent_key)
            .collect()
    }

    pub fn formula(&self) -> Formula {
        dependence_formula(self.kind, &self.context_set(), &self.cause, &self.effect)
    }

    /// `[K] { cause arrow effect }` with absolute state paths.
    pub fn render(&self) -> String {
        let dep = format!(
            "{} {} {}",
            render_states(&self.cause),
            self.kind.arrow(),
            render_states(&self.effect)
        );
        if self.contexts.is_empty() {
            dep
        } else {
            let ks: Vec<&str> = self.contexts.iter().map(Ident::as_str).collect();
            format!("[{}] {{ {dep} }}", ks.join(", "))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NormalObservation {
    pub label: Ident,
    pub states: StateCollection,
}

/// Flattened view of a program.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalForm {
    pub dependences: Vec<NormalizedDependence>,
    pub attributes: BTreeMap<AgentKey, BTreeSet<AttrRel>>,
    pub observations: Vec<NormalObservation>,
    /// Contradictory attribute declarations (`a < b` together with `a >< b`).
    pub warnings: Vec<String>,
}

impl NormalForm {
    /// A program with the same meaning, built from the flat parts.
    pub fn to_program(&self) -> Program {
        let mut behaviours = Vec::new();
        for ((path, agent), rels) in &self.attributes {
            let decl = Behaviour::AttrDecl {
                agents: vec![agent.clone()],
                relations: rels.iter().cloned().collect(),
            };
            behaviours.push(wrap_compartments(path, decl));
        }
        for d in &self.dependences {
            let dep = Behaviour::Dependence(Dependence {
                kind: d.kind,
                cause: d.cause.clone(),
                effect: d.effect.clone(),
            });
            if d.contexts.is_empty() {
                behaviours.push(dep);
            } else {
                behaviours.push(Behaviour::Context {
                    contexts: d.contexts.iter().cloned().collect(),
                    body: vec![dep],
                });
            }
        }
        for o in &self.observations {
            behaviours.push(Behaviour::Observation {
                label: o.label.clone(),
                states: o.states.clone(),
            });
        }
        Program::new(behaviours)
    }

    /// Stable text listing for debugging and golden files.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for ((path, agent), rels) in &self.attributes {
            let rels: Vec<String> = rels.iter().map(render_attr_rel).collect();
            let _ = writeln!(out, "attr {}: {{{}}}", qualified(path, agent), rels.join(", "));
        }
        for d in &self.dependences {
            let _ = writeln!(out, "dep {}", d.render());
        }
        for o in &self.observations {
            let _ = writeln!(out, "obs {} :: {}", o.label, render_states(&o.states));
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

fn wrap_compartments(path: &[Ident], b: Behaviour) -> Behaviour {
    path.iter().rev().fold(b, |inner, c| Behaviour::Compartment {
        name: c.clone(),
        body: vec![inner],
    })
}

fn qualified(path: &[Ident], agent: &Ident) -> String {
    let mut s = String::new();
    for c in path {
        s.push_str(c.as_str());
        s.push('.');
    }
    s.push_str(agent.as_str());
    s
}

pub fn agent_key(s: &AgentState) -> AgentKey {
    (s.path.clone(), s.agent.clone())
}

fn strings(path: &[Ident]) -> Vec<String> {
    path.iter().map(|i| i.as_str().to_string()).collect()
}

/// `⟦s⟧_B(C)` for a state whose path is already absolute.
pub fn state_formula(s: &AgentState) -> Formula {
    let mut p = Prop::new(s.agent.as_str()).in_path(strings(&s.path));
    if let Some(a) = &s.attribute {
        p = p.with_attribute(a.as_str());
    }
    match s.polarity {
        Polarity::Positive => Formula::Prop(p),
        Polarity::Negative => Formula::Prop(p).negate(),
    }
}

pub fn states_formula(c: &StateCollection) -> Formula {
    Formula::conjunction(c.states().iter().map(state_formula))
}

/// Translation of one dependence under context set `k`.
pub fn dependence_formula(
    kind: DependenceKind,
    k: &ContextSet,
    cause: &StateCollection,
    effect: &StateCollection,
) -> Formula {
    let s1 = states_formula(cause);
    let s2 = states_formula(effect);
    let past_cause = Formula::past(k.clone(), s1.clone());
    match kind {
        DependenceKind::Normal => s2.implies(past_cause),
        DependenceKind::Persistent => s2.implies(s1.and(past_cause)),
        DependenceKind::Remanent => {
            let repeat = Formula::past(ContextSet::empty(), s2.clone());
            s2.implies(repeat.or(past_cause))
        }
    }
}

/// `⟦r⟧_R(g)` for the agent `key`.
pub fn attr_rel_formula(r: &AttrRel, key: &AgentKey) -> Formula {
    let at = |a: &Ident| {
        Formula::Prop(
            Prop::new(key.1.as_str())
                .in_path(strings(&key.0))
                .with_attribute(a.as_str()),
        )
    };
    match r {
        AttrRel::Prec(a1, a2) => at(a2).implies(at(a1)),
        AttrRel::Napprox(a1, a2) => at(a1)
            .implies(at(a2).negate())
            .and(at(a2).implies(at(a1).negate())),
        AttrRel::Bare(_) => Formula::Top,
    }
}

fn absolute(path: &[Ident], c: &StateCollection) -> StateCollection {
    StateCollection::new(c.states().iter().map(|s| s.clone().in_compartment(path)).collect())
        .expect("collections are never empty")
}

fn translate(bs: &[Behaviour], path: &[Ident], k: &BTreeSet<Ident>) -> Formula {
    Formula::conjunction(bs.iter().map(|b| match b {
        Behaviour::Dependence(d) => dependence_formula(
            d.kind,
            &ContextSet::of(k.iter().map(|c| c.as_str().to_string())),
            &absolute(path, &d.cause),
            &absolute(path, &d.effect),
        ),
        Behaviour::Compartment { name, body } => {
            let mut inner = path.to_vec();
            inner.push(name.clone());
            translate(body, &inner, k)
        }
        Behaviour::Context { contexts, body } => {
            let mut inner = k.clone();
            inner.extend(contexts.iter().cloned());
            translate(body, path, &inner)
        }
        Behaviour::Observation { label, states } => Formula::At(
            Nominal::new(label.as_str()),
            Box::new(states_formula(&absolute(path, states))),
        ),
        Behaviour::AttrDecl { agents, relations } => {
            Formula::conjunction(agents.iter().flat_map(|g| {
                let key = (path.to_vec(), g.clone());
                relations.iter().map(move |r| attr_rel_formula(r, &key))
            }))
        }
    }))
}

/// `⟦P⟧`: the whole program wrapped in the global modality.
pub fn interpret(p: &Program) -> Result<Formula, SemanticsError> {
    if let Some(l) = p.duplicate_label() {
        return Err(SemanticsError::DuplicateLabel(l));
    }
    Ok(Formula::always(translate(&p.behaviours, &[], &BTreeSet::new())))
}

/// Flattens compartments and contexts and attaches attribute relations.
pub fn normalize(p: &Program) -> NormalForm {
    let mut nf = NormalForm::default();
    let mut raw: Vec<NormalizedDependence> = Vec::new();
    fn walk(
        bs: &[Behaviour],
        path: &[Ident],
        k: &BTreeSet<Ident>,
        nf: &mut NormalForm,
        raw: &mut Vec<NormalizedDependence>,
    ) {
        for b in bs {
            match b {
                Behaviour::Dependence(d) => raw.push(NormalizedDependence {
                    path: path.to_vec(),
                    contexts: k.clone(),
                    kind: d.kind,
                    cause: absolute(path, &d.cause),
                    effect: absolute(path, &d.effect),
                    attributes: BTreeMap::new(),
                }),
                Behaviour::Compartment { name, body } => {
                    let mut inner = path.to_vec();
                    inner.push(name.clone());
                    walk(body, &inner, k, nf, raw);
                }
                Behaviour::Context { contexts, body } => {
                    let mut inner = k.clone();
                    inner.extend(contexts.iter().cloned());
                    walk(body, path, &inner, nf, raw);
                }
                Behaviour::Observation { label, states } => nf.observations.push(NormalObservation {
                    label: label.clone(),
                    states: absolute(path, states),
                }),
                Behaviour::AttrDecl { agents, relations } => {
                    for g in agents {
                        let entry = nf.attributes.entry((path.to_vec(), g.clone())).or_default();
                        entry.extend(relations.iter().map(AttrRel::canonical));
                    }
                }
            }
        }
    }
    walk(&p.behaviours, &[], &BTreeSet::new(), &mut nf, &mut raw);
    for d in &mut raw {
        for key in d.agents() {
            if let Some(rels) = nf.attributes.get(&key) {
                d.attributes.insert(key, rels.clone());
            }
        }
    }
    nf.dependences = raw;
    for ((path, agent), rels) in &nf.attributes {
        for r in rels {
            if let AttrRel::Prec(a, b) = r {
                let clash = AttrRel::Napprox(a.clone(), b.clone()).canonical();
                if rels.contains(&clash) {
                    nf.warnings.push(format!(
                        "{}: `{a} < {b}` contradicts `{a} >< {b}`",
                        qualified(path, agent)
                    ));
                }
            }
        }
    }
    nf
}

/// The dependence formula set: one globally quantified formula per
/// dependence, conjoined with the attribute relations of its agents.
pub fn dependence_formula_set(p: &Program) -> Vec<Formula> {
    normalize(p)
        .dependences
        .iter()
        .map(|d| {
            let mut parts = vec![d.formula()];
            for (key, rels) in &d.attributes {
                parts.extend(rels.iter().map(|r| attr_rel_formula(r, key)));
            }
            Formula::always(Formula::conjunction(parts))
        })
        .collect()
}
