//! Finite Kripke models and satisfaction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::formula::{ContextSet, Formula, Nominal, Prop};
use super::LogicError;

pub type World = usize;

/// Worlds are `0..world_count`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KripkeModel {
    world_count: usize,
    relations: BTreeMap<ContextSet, BTreeSet<(World, World)>>,
    props: BTreeMap<Prop, BTreeSet<World>>,
    nominals: BTreeMap<Nominal, World>,
}

impl KripkeModel {
    pub fn new(world_count: usize) -> Result<Self, LogicError> {
        if world_count == 0 {
            return Err(LogicError::InvalidModel("a model needs at least one world".into()));
        }
        Ok(KripkeModel {
            world_count,
            relations: BTreeMap::new(),
            props: BTreeMap::new(),
            nominals: BTreeMap::new(),
        })
    }

    pub fn world_count(&self) -> usize {
        self.world_count
    }

    pub fn worlds(&self) -> std::ops::Range<World> {
        0..self.world_count
    }

    fn check(&self, w: World) -> Result<(), LogicError> {
        if w < self.world_count {
            Ok(())
        } else {
            Err(LogicError::UnknownWorld(w))
        }
    }

    pub fn add_edge(&mut self, key: ContextSet, from: World, to: World) -> Result<(), LogicError> {
        self.check(from)?;
        self.check(to)?;
        self.relations.entry(key).or_default().insert((from, to));
        Ok(())
    }

    pub fn set_prop(&mut self, p: Prop, w: World) -> Result<(), LogicError> {
        self.check(w)?;
        self.props.entry(p).or_default().insert(w);
        Ok(())
    }

    /// Gives `label` the valuation `worlds`; more than one world is rejected.
    pub fn assign_nominal(&mut self, label: Nominal, worlds: &[World]) -> Result<(), LogicError> {
        let distinct: BTreeSet<World> = worlds.iter().copied().collect();
        match distinct.len() {
            0 => {
                self.nominals.remove(&label);
                Ok(())
            }
            1 => {
                let w = *distinct.iter().next().unwrap();
                self.check(w)?;
                self.nominals.insert(label, w);
                Ok(())
            }
            _ => Err(LogicError::InvalidModel(format!(
                "nominal {label} would name {} worlds",
                distinct.len()
            ))),
        }
    }

    pub fn nominal(&self, label: &Nominal) -> Option<World> {
        self.nominals.get(label).copied()
    }

    pub fn holds(&self, p: &Prop, w: World) -> bool {
        self.props.get(p).is_some_and(|s| s.contains(&w))
    }

    pub fn edges(&self, key: &ContextSet) -> impl Iterator<Item = &(World, World)> {
        self.relations.get(key).into_iter().flatten()
    }

    pub fn relation_keys(&self) -> impl Iterator<Item = &ContextSet> {
        self.relations.keys()
    }

    pub fn true_props(&self, w: World) -> Vec<&Prop> {
        self.props
            .iter()
            .filter(|(_, ws)| ws.contains(&w))
            .map(|(p, _)| p)
            .collect()
    }

    /// Stable text listing of worlds, relations and valuation.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "worlds: {}", self.world_count);
        for (key, pairs) in &self.relations {
            let pairs: Vec<String> = pairs.iter().map(|(a, b)| format!("w{a}->w{b}")).collect();
            let _ = writeln!(out, "R[{key}]: {}", pairs.join(" "));
        }
        for w in self.worlds() {
            let mut names: Vec<String> = self.true_props(w).iter().map(|p| p.to_string()).collect();
            for (n, &v) in &self.nominals {
                if v == w {
                    names.push(format!("#{n}"));
                }
            }
            let _ = writeln!(out, "w{w}: {{{}}}", names.join(", "));
        }
        out
    }

    pub fn evaluate(&self, w: World, f: &Formula) -> Result<bool, LogicError> {
        self.check(w)?;
        Ok(self.eval(w, f))
    }

    pub fn validates(&self, f: &Formula) -> bool {
        self.worlds().all(|w| self.eval(w, f))
    }

    fn eval(&self, w: World, f: &Formula) -> bool {
        match f {
            Formula::Top => true,
            Formula::Prop(p) => self.holds(p, w),
            Formula::Nom(n) => self.nominal(n) == Some(w),
            Formula::Not(g) => !self.eval(w, g),
            Formula::And(a, b) => self.eval(w, a) && self.eval(w, b),
            Formula::Or(a, b) => self.eval(w, a) || self.eval(w, b),
            Formula::Implies(a, b) => !self.eval(w, a) || self.eval(w, b),
            Formula::At(n, g) => self.nominal(n).is_some_and(|v| self.eval(v, g)),
            Formula::Diamond(k, g) => self.edges(k).any(|&(a, b)| a == w && self.eval(b, g)),
            Formula::DiamondConv(k, g) => self.edges(k).any(|&(a, b)| b == w && self.eval(a, g)),
            Formula::Box(k, g) => self.edges(k).all(|&(a, b)| a != w || self.eval(b, g)),
            Formula::BoxConv(k, g) => self.edges(k).all(|&(a, b)| b != w || self.eval(a, g)),
            Formula::AlwaysA(g) => self.worlds().all(|v| self.eval(v, g)),
            Formula::ExistsE(g) => self.worlds().any(|v| self.eval(v, g)),
        }
    }
}

/// `M,w ⊩ f`.
pub fn evaluate(m: &KripkeModel, w: World, f: &Formula) -> Result<bool, LogicError> {
    m.evaluate(w, f)
}

/// True iff every world satisfies `f`.
pub fn validates(m: &KripkeModel, f: &Formula) -> bool {
    m.validates(f)
}

/// The members of `fs` validated by `m`, in input order.
pub fn modal_theory<'a>(m: &KripkeModel, fs: impl IntoIterator<Item = &'a Formula>) -> Vec<Formula> {
    fs.into_iter().filter(|f| m.validates(f)).cloned().collect()
}
