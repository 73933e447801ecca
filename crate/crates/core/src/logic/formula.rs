//! Hybrid-logic formulas with context-indexed modalities.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A propositional symbol `C1.C2.g` or `C1.g_a`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Prop {
    pub path: Vec<String>,
    pub agent: String,
    pub attribute: Option<String>,
}

impl Prop {
    pub fn new(agent: impl Into<String>) -> Self {
        Prop {
            path: Vec::new(),
            agent: agent.into(),
            attribute: None,
        }
    }

    pub fn with_attribute(mut self, attribute: impl Into<String>) -> Self {
        self.attribute = Some(attribute.into());
        self
    }

    pub fn in_path(mut self, path: Vec<String>) -> Self {
        self.path = path;
        self
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.path {
            write!(f, "{c}.")?;
        }
        f.write_str(&self.agent)?;
        if let Some(a) = &self.attribute {
            write!(f, "_{a}")?;
        }
        Ok(())
    }
}

/// A name for at most one world.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Nominal(pub String);

impl Nominal {
    pub fn new(label: impl Into<String>) -> Self {
        Nominal(label.into())
    }
}

impl fmt::Display for Nominal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Index of an accessibility relation. The empty set is the base relation.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ContextSet(pub BTreeSet<String>);

impl ContextSet {
    pub fn empty() -> Self {
        ContextSet::default()
    }

    pub fn of<I, S>(contexts: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ContextSet(contexts.into_iter().map(Into::into).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn union(&self, other: &ContextSet) -> ContextSet {
        ContextSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = &String> {
        self.0.iter()
    }
}

impl fmt::Display for ContextSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.0.iter().map(String::as_str).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Formula {
    Top,
    Prop(Prop),
    Nom(Nominal),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    At(Nominal, Box<Formula>),
    /// Some `R_K`-successor satisfies the body.
    Diamond(ContextSet, Box<Formula>),
    /// Some `R_K`-predecessor satisfies the body.
    DiamondConv(ContextSet, Box<Formula>),
    Box(ContextSet, Box<Formula>),
    BoxConv(ContextSet, Box<Formula>),
    /// Every world satisfies the body.
    AlwaysA(Box<Formula>),
    ExistsE(Box<Formula>),
}

impl Formula {
    pub fn bottom() -> Formula {
        Formula::Top.negate()
    }

    pub fn prop(p: Prop) -> Formula {
        Formula::Prop(p)
    }

    pub fn atom(agent: &str) -> Formula {
        Formula::Prop(Prop::new(agent))
    }

    pub fn nom(label: &str) -> Formula {
        Formula::Nom(Nominal::new(label))
    }

    pub fn negate(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    pub fn at(label: &str, body: Formula) -> Formula {
        Formula::At(Nominal::new(label), Box::new(body))
    }

    pub fn diamond(k: ContextSet, body: Formula) -> Formula {
        Formula::Diamond(k, Box::new(body))
    }

    pub fn past(k: ContextSet, body: Formula) -> Formula {
        Formula::DiamondConv(k, Box::new(body))
    }

    pub fn always(body: Formula) -> Formula {
        Formula::AlwaysA(Box::new(body))
    }

    pub fn exists(body: Formula) -> Formula {
        Formula::ExistsE(Box::new(body))
    }

    /// Right-nested conjunction; `Top` members are dropped and an empty
    /// list yields `Top`.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let parts: Vec<Formula> = parts.into_iter().filter(|f| *f != Formula::Top).collect();
        let mut iter = parts.into_iter().rev();
        match iter.next() {
            None => Formula::Top,
            Some(last) => iter.fold(last, |acc, f| f.and(acc)),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Top | Formula::Prop(_) | Formula::Nom(_) => 1,
            Formula::Not(f)
            | Formula::At(_, f)
            | Formula::Diamond(_, f)
            | Formula::DiamondConv(_, f)
            | Formula::Box(_, f)
            | Formula::BoxConv(_, f)
            | Formula::AlwaysA(f)
            | Formula::ExistsE(f) => 1 + f.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Prop(_) | Formula::Nom(_) => 0,
            Formula::Not(f) | Formula::At(_, f) | Formula::AlwaysA(f) | Formula::ExistsE(f) => {
                f.modal_depth()
            }
            Formula::Diamond(_, f)
            | Formula::DiamondConv(_, f)
            | Formula::Box(_, f)
            | Formula::BoxConv(_, f) => 1 + f.modal_depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.modal_depth().max(b.modal_depth())
            }
        }
    }

    /// Symbols occurring in the formula.
    pub fn vocabulary(&self) -> Vocabulary {
        let mut v = Vocabulary::default();
        self.collect_vocabulary(&mut v);
        v
    }

    fn collect_vocabulary(&self, v: &mut Vocabulary) {
        match self {
            Formula::Top => {}
            Formula::Prop(p) => {
                v.props.insert(p.clone());
            }
            Formula::Nom(n) => {
                v.nominals.insert(n.clone());
            }
            Formula::Not(f) | Formula::AlwaysA(f) | Formula::ExistsE(f) => {
                f.collect_vocabulary(v)
            }
            Formula::At(n, f) => {
                v.nominals.insert(n.clone());
                f.collect_vocabulary(v);
            }
            Formula::Diamond(k, f)
            | Formula::DiamondConv(k, f)
            | Formula::Box(k, f)
            | Formula::BoxConv(k, f) => {
                v.keys.insert(k.clone());
                f.collect_vocabulary(v);
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_vocabulary(v);
                b.collect_vocabulary(v);
            }
        }
    }

    /// Stable text form: prefix operators, conjunctions and disjunctions
    /// flattened with their members sorted.
    pub fn canonical(&self) -> String {
        match self {
            Formula::And(..) | Formula::Or(..) | Formula::Implies(..) => {
                format!("({})", self.canonical_inner())
            }
            _ => self.canonical_inner(),
        }
    }

    fn canonical_inner(&self) -> String {
        match self {
            Formula::Top => "T".into(),
            Formula::Prop(p) => p.to_string(),
            Formula::Nom(n) => format!("#{n}"),
            Formula::Not(f) => format!("!{}", f.canonical()),
            Formula::And(..) => {
                let mut parts = Vec::new();
                self.flatten_and(&mut parts);
                let mut texts: Vec<String> = parts.iter().map(|f| f.canonical()).collect();
                texts.sort();
                texts.join(" & ")
            }
            Formula::Or(..) => {
                let mut parts = Vec::new();
                self.flatten_or(&mut parts);
                let mut texts: Vec<String> = parts.iter().map(|f| f.canonical()).collect();
                texts.sort();
                texts.join(" | ")
            }
            Formula::Implies(a, b) => format!("{} -> {}", a.canonical(), b.canonical()),
            Formula::At(n, f) => format!("@{n}({})", f.canonical_inner()),
            Formula::Diamond(k, f) => format!("<{k}>{}", f.canonical()),
            Formula::DiamondConv(k, f) => format!("<{k}>-{}", f.canonical()),
            Formula::Box(k, f) => format!("[{k}]{}", f.canonical()),
            Formula::BoxConv(k, f) => format!("[{k}]-{}", f.canonical()),
            Formula::AlwaysA(f) => format!("A({})", f.canonical_inner()),
            Formula::ExistsE(f) => format!("E({})", f.canonical_inner()),
        }
    }

    fn flatten_and<'a>(&'a self, out: &mut Vec<&'a Formula>) {
        match self {
            Formula::And(a, b) => {
                a.flatten_and(out);
                b.flatten_and(out);
            }
            other => out.push(other),
        }
    }

    fn flatten_or<'a>(&'a self, out: &mut Vec<&'a Formula>) {
        match self {
            Formula::Or(a, b) => {
                a.flatten_or(out);
                b.flatten_or(out);
            }
            other => out.push(other),
        }
    }

    /// Top-level conjuncts, in order.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        self.flatten_and(&mut out);
        out
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// Propositions, nominals and relation keys mentioned by a formula.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub props: BTreeSet<Prop>,
    pub nominals: BTreeSet<Nominal>,
    pub keys: BTreeSet<ContextSet>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_sorts_conjuncts() {
        let a = Formula::atom("b").and(Formula::atom("a").and(Formula::atom("c")));
        let b = Formula::atom("c").and(Formula::atom("b")).and(Formula::atom("a"));
        assert_eq!(a.canonical(), "(a & b & c)");
        assert_eq!(a.canonical(), b.canonical());
    }

    #[test]
    fn canonical_operators() {
        let f = Formula::always(
            Formula::atom("g2").implies(
                Formula::past(ContextSet::empty(), Formula::atom("g1")).and(Formula::atom("g1")),
            ),
        );
        assert_eq!(f.canonical(), "A(g2 -> (<>-g1 & g1))");
        assert_eq!(Formula::always(Formula::Top).canonical(), "A(T)");
        let g = Formula::at("o", Formula::atom("g").and(Formula::atom("h").negate()));
        assert_eq!(g.canonical(), "@o(!h & g)");
        let k = ContextSet::of(["Light", "Dark"]);
        assert_eq!(Formula::diamond(k, Formula::nom("x")).canonical(), "<Dark,Light>#x");
    }

    #[test]
    fn conjunction_drops_top() {
        assert_eq!(Formula::conjunction(vec![]), Formula::Top);
        assert_eq!(
            Formula::conjunction(vec![Formula::Top, Formula::atom("p")]),
            Formula::atom("p")
        );
    }

    #[test]
    fn prop_display() {
        let p = Prop::new("g").with_attribute("Low").in_path(vec!["C".into(), "D".into()]);
        assert_eq!(p.to_string(), "C.D.g_Low");
    }
}
