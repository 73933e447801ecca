//! Hash-consed negation normal form shared by the two satisfiability back-ends.

use std::collections::HashMap;

use super::formula::{ContextSet, Formula, Nominal, Prop};

pub(crate) type Fid = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Atom {
    Prop(usize),
    Nom(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Node {
    Top,
    Bot,
    Lit(Atom, bool),
    And(Vec<Fid>),
    Or(Vec<Fid>),
    At(usize, Fid),
    Dia { key: usize, conv: bool, body: Fid },
    Boxm { key: usize, conv: bool, body: Fid },
    All(Fid),
    Ex(Fid),
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Arena {
    pub nodes: Vec<Node>,
    index: HashMap<Node, Fid>,
    pub props: Vec<Prop>,
    pub noms: Vec<Nominal>,
    pub keys: Vec<ContextSet>,
    prop_ix: HashMap<Prop, usize>,
    nom_ix: HashMap<Nominal, usize>,
    key_ix: HashMap<ContextSet, usize>,
    negs: HashMap<Fid, Fid>,
}

impl Arena {
    pub fn new() -> Self {
        Arena::default()
    }

    pub fn intern(&mut self, node: Node) -> Fid {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    pub fn node(&self, id: Fid) -> &Node {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    fn prop(&mut self, p: &Prop) -> usize {
        if let Some(&i) = self.prop_ix.get(p) {
            return i;
        }
        self.props.push(p.clone());
        self.prop_ix.insert(p.clone(), self.props.len() - 1);
        self.props.len() - 1
    }

    pub fn nom(&mut self, n: &Nominal) -> usize {
        if let Some(&i) = self.nom_ix.get(n) {
            return i;
        }
        self.noms.push(n.clone());
        self.nom_ix.insert(n.clone(), self.noms.len() - 1);
        self.noms.len() - 1
    }

    fn key(&mut self, k: &ContextSet) -> usize {
        if let Some(&i) = self.key_ix.get(k) {
            return i;
        }
        self.keys.push(k.clone());
        self.key_ix.insert(k.clone(), self.keys.len() - 1);
        self.keys.len() - 1
    }

    fn and(&mut self, parts: Vec<Fid>) -> Fid {
        let mut flat = Vec::new();
        for p in parts {
            match &self.nodes[p] {
                Node::Top => {}
                Node::Bot => return self.intern(Node::Bot),
                Node::And(inner) => flat.extend(inner.iter().copied()),
                _ => flat.push(p),
            }
        }
        flat.sort_unstable();
        flat.dedup();
        match flat.len() {
            0 => self.intern(Node::Top),
            1 => flat[0],
            _ => self.intern(Node::And(flat)),
        }
    }

    fn or(&mut self, parts: Vec<Fid>) -> Fid {
        let mut flat = Vec::new();
        for p in parts {
            match &self.nodes[p] {
                Node::Bot => {}
                Node::Top => return self.intern(Node::Top),
                Node::Or(inner) => flat.extend(inner.iter().copied()),
                _ => flat.push(p),
            }
        }
        flat.sort_unstable();
        flat.dedup();
        match flat.len() {
            0 => self.intern(Node::Bot),
            1 => flat[0],
            _ => self.intern(Node::Or(flat)),
        }
    }

    /// NNF of `f` (when `positive`) or of `¬f`.
    pub fn nnf(&mut self, f: &Formula, positive: bool) -> Fid {
        match f {
            Formula::Top => self.intern(if positive { Node::Top } else { Node::Bot }),
            Formula::Prop(p) => {
                let i = self.prop(p);
                self.intern(Node::Lit(Atom::Prop(i), positive))
            }
            Formula::Nom(n) => {
                let i = self.nom(n);
                self.intern(Node::Lit(Atom::Nom(i), positive))
            }
            Formula::Not(g) => self.nnf(g, !positive),
            Formula::And(a, b) => {
                let (x, y) = (self.nnf(a, positive), self.nnf(b, positive));
                if positive {
                    self.and(vec![x, y])
                } else {
                    self.or(vec![x, y])
                }
            }
            Formula::Or(a, b) => {
                let (x, y) = (self.nnf(a, positive), self.nnf(b, positive));
                if positive {
                    self.or(vec![x, y])
                } else {
                    self.and(vec![x, y])
                }
            }
            Formula::Implies(a, b) => {
                let (x, y) = (self.nnf(a, !positive), self.nnf(b, positive));
                if positive {
                    self.or(vec![x, y])
                } else {
                    self.and(vec![x, y])
                }
            }
            Formula::At(n, g) => {
                let i = self.nom(n);
                let body = self.nnf(g, positive);
                let at = self.intern(Node::At(i, body));
                if positive {
                    at
                } else {
                    // The nominal may name no world at all.
                    let not_n = self.intern(Node::Lit(Atom::Nom(i), false));
                    let nowhere = self.intern(Node::All(not_n));
                    self.or(vec![nowhere, at])
                }
            }
            Formula::Diamond(k, g) | Formula::Box(k, g) => {
                let key = self.key(k);
                let body = self.nnf(g, positive);
                let dia = matches!(f, Formula::Diamond(..)) == positive;
                self.intern(if dia {
                    Node::Dia { key, conv: false, body }
                } else {
                    Node::Boxm { key, conv: false, body }
                })
            }
            Formula::DiamondConv(k, g) | Formula::BoxConv(k, g) => {
                let key = self.key(k);
                let body = self.nnf(g, positive);
                let dia = matches!(f, Formula::DiamondConv(..)) == positive;
                self.intern(if dia {
                    Node::Dia { key, conv: true, body }
                } else {
                    Node::Boxm { key, conv: true, body }
                })
            }
            Formula::AlwaysA(g) | Formula::ExistsE(g) => {
                let body = self.nnf(g, positive);
                let all = matches!(f, Formula::AlwaysA(_)) == positive;
                self.intern(if all { Node::All(body) } else { Node::Ex(body) })
            }
        }
    }

    /// NNF of the negation of an NNF node.
    pub fn negation(&mut self, id: Fid) -> Fid {
        if let Some(&n) = self.negs.get(&id) {
            return n;
        }
        let n = match self.nodes[id].clone() {
            Node::Top => self.intern(Node::Bot),
            Node::Bot => self.intern(Node::Top),
            Node::Lit(a, p) => self.intern(Node::Lit(a, !p)),
            Node::And(parts) => {
                let ps = parts.into_iter().map(|p| self.negation(p)).collect();
                self.or(ps)
            }
            Node::Or(parts) => {
                let ps = parts.into_iter().map(|p| self.negation(p)).collect();
                self.and(ps)
            }
            Node::At(i, body) => {
                let nb = self.negation(body);
                let at = self.intern(Node::At(i, nb));
                let not_n = self.intern(Node::Lit(Atom::Nom(i), false));
                let nowhere = self.intern(Node::All(not_n));
                self.or(vec![nowhere, at])
            }
            Node::Dia { key, conv, body } => {
                let body = self.negation(body);
                self.intern(Node::Boxm { key, conv, body })
            }
            Node::Boxm { key, conv, body } => {
                let body = self.negation(body);
                self.intern(Node::Dia { key, conv, body })
            }
            Node::All(body) => {
                let body = self.negation(body);
                self.intern(Node::Ex(body))
            }
            Node::Ex(body) => {
                let body = self.negation(body);
                self.intern(Node::All(body))
            }
        };
        self.negs.insert(id, n);
        n
    }

    /// Ids reachable from `root`, in discovery order.
    pub fn closure(&self, root: Fid) -> Vec<Fid> {
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::new();
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            if seen[id] {
                continue;
            }
            seen[id] = true;
            out.push(id);
            match &self.nodes[id] {
                Node::And(ps) | Node::Or(ps) => stack.extend(ps.iter().rev().copied()),
                Node::At(_, b)
                | Node::Dia { body: b, .. }
                | Node::Boxm { body: b, .. }
                | Node::All(b)
                | Node::Ex(b) => stack.push(*b),
                _ => {}
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_negation_is_identity() {
        let mut a = Arena::new();
        let f = Formula::atom("p").and(Formula::atom("q").negate()).negate().negate();
        let x = a.nnf(&f, true);
        let y = a.nnf(&Formula::atom("q").negate().and(Formula::atom("p")), true);
        assert_eq!(x, y);
    }

    #[test]
    fn negated_at_allows_missing_nominal() {
        let mut a = Arena::new();
        let f = Formula::at("o", Formula::atom("p")).negate();
        let x = a.nnf(&f, true);
        match a.node(x) {
            Node::Or(parts) => assert_eq!(parts.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negation_round_trips() {
        let mut a = Arena::new();
        let f = Formula::diamond(ContextSet::empty(), Formula::atom("p").or(Formula::nom("n")));
        let x = a.nnf(&f, true);
        let nx = a.negation(x);
        assert_eq!(a.negation(nx), x);
    }
}
