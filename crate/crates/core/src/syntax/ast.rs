//! Abstract syntax of GUBS programs.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Whether a name denotes a fixed object or something open to substitution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IdentKind {
    Constant,
    Variable,
}

/// A name. Its kind is fixed by the case of its first character: uppercase
/// names are constants, lowercase names are variables.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Ident(String);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid identifier {0:?}")]
pub struct InvalidIdent(pub String);

impl Ident {
    pub fn new(text: impl Into<String>) -> Result<Self, InvalidIdent> {
        let text = text.into();
        if Self::is_valid(&text) {
            Ok(Ident(text))
        } else {
            Err(InvalidIdent(text))
        }
    }

    /// Panics on an invalid name; meant for literals in code and tests.
    pub fn from_static(text: &str) -> Self {
        Self::new(text).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn is_valid(text: &str) -> bool {
        let mut chars = text.chars();
        match chars.next() {
            Some(c) if c.is_alphabetic() && (c.is_uppercase() || c.is_lowercase()) => {}
            _ => return false,
        }
        chars.all(is_ident_continue)
    }

    pub fn kind(&self) -> IdentKind {
        if self.0.chars().next().is_some_and(char::is_uppercase) {
            IdentKind::Constant
        } else {
            IdentKind::Variable
        }
    }

    pub fn is_variable(&self) -> bool {
        self.kind() == IdentKind::Variable
    }

    pub fn is_constant(&self) -> bool {
        self.kind() == IdentKind::Constant
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

pub(crate) fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

impl TryFrom<String> for Ident {
    type Error = InvalidIdent;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        Ident::new(value)
    }
}

impl From<Ident> for String {
    fn from(value: Ident) -> Self {
        value.0
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Self {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

/// An agent, optionally at an attribute, possibly negated, possibly inside
/// nested compartments: `C.g(A)`, `g(~A)`, `~g`.
///
/// A negative state with an attribute reads "not at that attribute"; without
/// one it reads "the agent is absent".
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AgentState {
    pub path: Vec<Ident>,
    pub agent: Ident,
    pub attribute: Option<Ident>,
    pub polarity: Polarity,
}

impl AgentState {
    pub fn new(agent: Ident) -> Self {
        AgentState {
            path: Vec::new(),
            agent,
            attribute: None,
            polarity: Polarity::Positive,
        }
    }

    pub fn with_attribute(mut self, attribute: Ident) -> Self {
        self.attribute = Some(attribute);
        self
    }

    pub fn negated(mut self) -> Self {
        self.polarity = self.polarity.flip();
        self
    }

    pub fn in_compartment(mut self, prefix: &[Ident]) -> Self {
        let mut path = prefix.to_vec();
        path.append(&mut self.path);
        self.path = path;
        self
    }

    pub fn is_positive(&self) -> bool {
        self.polarity == Polarity::Positive
    }

    pub fn idents(&self) -> impl Iterator<Item = &Ident> {
        self.path
            .iter()
            .chain(std::iter::once(&self.agent))
            .chain(self.attribute.iter())
    }

    pub(crate) fn idents_mut(&mut self) -> impl Iterator<Item = &mut Ident> {
        self.path
            .iter_mut()
            .chain(std::iter::once(&mut self.agent))
            .chain(self.attribute.iter_mut())
    }
}

/// `s1 + ... + sn`: states observed together. Never empty.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StateCollection(Vec<AgentState>);

impl StateCollection {
    /// Returns `None` for an empty list.
    pub fn new(states: Vec<AgentState>) -> Option<Self> {
        if states.is_empty() {
            None
        } else {
            Some(StateCollection(states))
        }
    }

    pub fn single(state: AgentState) -> Self {
        StateCollection(vec![state])
    }

    pub fn states(&self) -> &[AgentState] {
        &self.0
    }

    pub(crate) fn states_mut(&mut self) -> &mut [AgentState] {
        &mut self.0
    }

    pub fn into_states(self) -> Vec<AgentState> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Componentwise negation, used by the activation/inhibition sugar.
    pub fn negated(&self) -> Self {
        StateCollection(self.0.iter().cloned().map(AgentState::negated).collect())
    }

    pub fn as_set(&self) -> BTreeSet<&AgentState> {
        self.0.iter().collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DependenceKind {
    /// `->`: the cause holds in the closest past of the effect.
    Normal,
    /// `=>`: the cause also holds while the effect does.
    Persistent,
    /// `~>`: the effect may sustain itself once produced.
    Remanent,
}

impl DependenceKind {
    pub fn arrow(self) -> &'static str {
        match self {
            DependenceKind::Normal => "->",
            DependenceKind::Persistent => "=>",
            DependenceKind::Remanent => "~>",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Dependence {
    pub kind: DependenceKind,
    pub cause: StateCollection,
    pub effect: StateCollection,
}

/// A relation between two attributes of the same agent.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AttrRel {
    /// `a < b`: `b` has at least the capacities of `a`.
    Prec(Ident, Ident),
    /// `a >< b`: the two capacities exclude each other.
    Napprox(Ident, Ident),
    /// A bare attribute name with no relation attached.
    Bare(Ident),
}

impl AttrRel {
    pub fn idents(&self) -> Vec<&Ident> {
        match self {
            AttrRel::Prec(a, b) | AttrRel::Napprox(a, b) => vec![a, b],
            AttrRel::Bare(a) => vec![a],
        }
    }

    pub(crate) fn idents_mut(&mut self) -> Vec<&mut Ident> {
        match self {
            AttrRel::Prec(a, b) | AttrRel::Napprox(a, b) => vec![a, b],
            AttrRel::Bare(a) => vec![a],
        }
    }

    /// `><` is symmetric; this picks the ordered representative.
    pub fn canonical(&self) -> AttrRel {
        match self {
            AttrRel::Napprox(a, b) if b < a => AttrRel::Napprox(b.clone(), a.clone()),
            other => other.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Behaviour {
    Dependence(Dependence),
    Compartment {
        name: Ident,
        body: Vec<Behaviour>,
    },
    /// `[k1, ..., kn] { body }`; same meaning as nested single contexts.
    Context {
        contexts: Vec<Ident>,
        body: Vec<Behaviour>,
    },
    Observation {
        label: Ident,
        states: StateCollection,
    },
    AttrDecl {
        agents: Vec<Ident>,
        relations: Vec<AttrRel>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Program {
    pub behaviours: Vec<Behaviour>,
}

impl Program {
    pub fn new(behaviours: Vec<Behaviour>) -> Self {
        Program { behaviours }
    }

    pub fn empty() -> Self {
        Program::default()
    }

    pub fn is_empty(&self) -> bool {
        self.behaviours.is_empty()
    }

    /// Program formed by putting `self` and `other` side by side.
    pub fn assemble(&self, other: &Program) -> Program {
        let mut behaviours = self.behaviours.clone();
        behaviours.extend(other.behaviours.iter().cloned());
        Program { behaviours }
    }

    /// Observation labels in program order, duplicates included.
    pub fn observation_labels(&self) -> Vec<&Ident> {
        fn walk<'a>(bs: &'a [Behaviour], out: &mut Vec<&'a Ident>) {
            for b in bs {
                match b {
                    Behaviour::Observation { label, .. } => out.push(label),
                    Behaviour::Compartment { body, .. } | Behaviour::Context { body, .. } => {
                        walk(body, out)
                    }
                    _ => {}
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.behaviours, &mut out);
        out
    }

    /// First label used by more than one observation spot.
    pub fn duplicate_label(&self) -> Option<Ident> {
        let mut seen = BTreeSet::new();
        self.observation_labels()
            .into_iter()
            .find(|l| !seen.insert(*l))
            .cloned()
    }

    /// Names of agents, attributes, compartments and contexts. Observation
    /// labels name worlds and are left out.
    pub fn for_each_ident(&self, f: &mut impl FnMut(&Ident)) {
        fn walk(bs: &[Behaviour], f: &mut impl FnMut(&Ident)) {
            for b in bs {
                match b {
                    Behaviour::Dependence(d) => {
                        for s in d.cause.states().iter().chain(d.effect.states()) {
                            s.idents().for_each(&mut *f);
                        }
                    }
                    Behaviour::Compartment { name, body } => {
                        f(name);
                        walk(body, f);
                    }
                    Behaviour::Context { contexts, body } => {
                        contexts.iter().for_each(&mut *f);
                        walk(body, f);
                    }
                    Behaviour::Observation { states, .. } => {
                        for s in states.states() {
                            s.idents().for_each(&mut *f);
                        }
                    }
                    Behaviour::AttrDecl { agents, relations } => {
                        agents.iter().for_each(&mut *f);
                        for r in relations {
                            r.idents().into_iter().for_each(&mut *f);
                        }
                    }
                }
            }
        }
        walk(&self.behaviours, f)
    }

    pub(crate) fn map_idents(&mut self, f: &mut impl FnMut(&mut Ident)) {
        fn walk(bs: &mut [Behaviour], f: &mut impl FnMut(&mut Ident)) {
            for b in bs {
                match b {
                    Behaviour::Dependence(d) => {
                        for s in d.cause.states_mut().iter_mut().chain(d.effect.states_mut()) {
                            s.idents_mut().for_each(&mut *f);
                        }
                    }
                    Behaviour::Compartment { name, body } => {
                        f(name);
                        walk(body, f);
                    }
                    Behaviour::Context { contexts, body } => {
                        contexts.iter_mut().for_each(&mut *f);
                        walk(body, f);
                    }
                    Behaviour::Observation { states, .. } => {
                        for s in states.states_mut() {
                            s.idents_mut().for_each(&mut *f);
                        }
                    }
                    Behaviour::AttrDecl { agents, relations } => {
                        agents.iter_mut().for_each(&mut *f);
                        for r in relations {
                            r.idents_mut().into_iter().for_each(&mut *f);
                        }
                    }
                }
            }
        }
        walk(&mut self.behaviours, f)
    }

    /// Every variable name outside observation labels.
    pub fn free_variables(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        self.for_each_ident(&mut |i| {
            if i.is_variable() {
                out.insert(i.clone());
            }
        });
        out
    }

    pub fn is_ground(&self) -> bool {
        self.free_variables().is_empty()
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::render::render_program(self))
    }
}
