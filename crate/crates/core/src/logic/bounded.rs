//! Bounded model search: ground the formula over `n` worlds for
//! `n = 1, 2, …, max` and hand the result to a SAT solver.

use std::collections::HashMap;

use super::cdcl::{neg, pos, Cdcl, Lit};
use super::formula::Formula;
use super::model::KripkeModel;
use super::nnf::{Arena, Atom, Fid, Node};
use super::LogicError;

/// Largest world count accepted by the oracle.
pub const MAX_BOUND: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    /// Total solver conflicts allowed across all world counts.
    pub max_conflicts: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_conflicts: 5_000_000,
        }
    }
}

/// A model with at most `max_worlds` worlds validating `f`, if one exists.
pub fn sat_bounded(f: &Formula, max_worlds: usize) -> Result<Option<KripkeModel>, LogicError> {
    sat_bounded_with(f, max_worlds, OracleBudget::default())
}

pub fn sat_bounded_with(
    f: &Formula,
    max_worlds: usize,
    budget: OracleBudget,
) -> Result<Option<KripkeModel>, LogicError> {
    if max_worlds == 0 || max_worlds > MAX_BOUND {
        return Err(LogicError::InvalidBound(max_worlds, MAX_BOUND));
    }
    let mut arena = Arena::new();
    let root = arena.nnf(f, true);
    let mut spent = 0u64;
    for n in 1..=max_worlds {
        let mut g = Grounding::new(&arena, n);
        for w in 0..n {
            let t = g.enc(root, w);
            g.solver.add_clause(&[t]);
        }
        let left = budget.max_conflicts.saturating_sub(spent);
        let result = g.solver.solve(left);
        spent += g.solver.conflicts;
        match result {
            Err(_) => {
                return Err(LogicError::BudgetExceeded {
                    what: "oracle conflicts",
                    limit: budget.max_conflicts as usize,
                })
            }
            Ok(false) => continue,
            Ok(true) => {
                let m = g.model()?;
                debug_assert!(m.validates(f));
                return Ok(Some(m));
            }
        }
    }
    Ok(None)
}

struct Grounding<'a> {
    arena: &'a Arena,
    n: usize,
    solver: Cdcl,
    truth: Lit,
    props: Vec<Vec<u32>>,
    noms: Vec<Vec<u32>>,
    edges: Vec<Vec<u32>>,
    memo: HashMap<(Fid, usize), Lit>,
}

impl<'a> Grounding<'a> {
    fn new(arena: &'a Arena, n: usize) -> Self {
        let mut solver = Cdcl::new();
        let t = solver.new_var();
        solver.add_clause(&[pos(t)]);
        let props = (0..arena.props.len())
            .map(|_| (0..n).map(|_| solver.new_var()).collect())
            .collect();
        let noms: Vec<Vec<u32>> = (0..arena.noms.len())
            .map(|_| (0..n).map(|_| solver.new_var()).collect())
            .collect();
        for vars in &noms {
            for a in 0..n {
                for b in a + 1..n {
                    solver.add_clause(&[neg(pos(vars[a])), neg(pos(vars[b]))]);
                }
            }
        }
        let edges = (0..arena.keys.len())
            .map(|_| (0..n * n).map(|_| solver.new_var()).collect())
            .collect();
        Grounding {
            arena,
            n,
            solver,
            truth: pos(t),
            props,
            noms,
            edges,
            memo: HashMap::new(),
        }
    }

    fn edge(&self, key: usize, from: usize, to: usize) -> Lit {
        pos(self.edges[key][from * self.n + to])
    }

    fn fresh(&mut self) -> Lit {
        pos(self.solver.new_var())
    }

    /// A literal implying that `id` holds at world `w`.
    fn enc(&mut self, id: Fid, w: usize) -> Lit {
        if let Some(&l) = self.memo.get(&(id, w)) {
            return l;
        }
        let n = self.n;
        let lit = match self.arena.node(id).clone() {
            Node::Top => self.truth,
            Node::Bot => neg(self.truth),
            Node::Lit(Atom::Prop(p), s) => {
                let l = pos(self.props[p][w]);
                if s {
                    l
                } else {
                    neg(l)
                }
            }
            Node::Lit(Atom::Nom(i), s) => {
                let l = pos(self.noms[i][w]);
                if s {
                    l
                } else {
                    neg(l)
                }
            }
            Node::And(parts) => {
                let t = self.fresh();
                for p in parts {
                    let c = self.enc(p, w);
                    self.solver.add_clause(&[neg(t), c]);
                }
                t
            }
            Node::Or(parts) => {
                let t = self.fresh();
                let mut clause = vec![neg(t)];
                for p in parts {
                    clause.push(self.enc(p, w));
                }
                self.solver.add_clause(&clause);
                t
            }
            Node::At(i, body) => {
                let t = self.fresh();
                let mut somewhere = vec![neg(t)];
                for v in 0..n {
                    let nv = pos(self.noms[i][v]);
                    somewhere.push(nv);
                    let b = self.enc(body, v);
                    self.solver.add_clause(&[neg(t), neg(nv), b]);
                }
                self.solver.add_clause(&somewhere);
                t
            }
            Node::Dia { key, conv, body } => {
                let t = self.fresh();
                let mut some = vec![neg(t)];
                for v in 0..n {
                    let a = self.fresh();
                    some.push(a);
                    let e = if conv { self.edge(key, v, w) } else { self.edge(key, w, v) };
                    let b = self.enc(body, v);
                    self.solver.add_clause(&[neg(a), e]);
                    self.solver.add_clause(&[neg(a), b]);
                }
                self.solver.add_clause(&some);
                t
            }
            Node::Boxm { key, conv, body } => {
                let t = self.fresh();
                for v in 0..n {
                    let e = if conv { self.edge(key, v, w) } else { self.edge(key, w, v) };
                    let b = self.enc(body, v);
                    self.solver.add_clause(&[neg(t), neg(e), b]);
                }
                t
            }
            Node::All(body) => {
                let t = self.fresh();
                for v in 0..n {
                    let b = self.enc(body, v);
                    self.solver.add_clause(&[neg(t), b]);
                }
                t
            }
            Node::Ex(body) => {
                let t = self.fresh();
                let mut some = vec![neg(t)];
                for v in 0..n {
                    some.push(self.enc(body, v));
                }
                self.solver.add_clause(&some);
                t
            }
        };
        self.memo.insert((id, w), lit);
        lit
    }

    fn model(&self) -> Result<KripkeModel, LogicError> {
        let n = self.n;
        let mut m = KripkeModel::new(n)?;
        for (p, vars) in self.props.iter().enumerate() {
            for (w, &v) in vars.iter().enumerate() {
                if self.solver.model_value(v) {
                    m.set_prop(self.arena.props[p].clone(), w)?;
                }
            }
        }
        for (i, vars) in self.noms.iter().enumerate() {
            let ws: Vec<usize> = (0..n).filter(|&w| self.solver.model_value(vars[w])).collect();
            m.assign_nominal(self.arena.noms[i].clone(), &ws)?;
        }
        for (k, vars) in self.edges.iter().enumerate() {
            for a in 0..n {
                for b in 0..n {
                    if self.solver.model_value(vars[a * n + b]) {
                        m.add_edge(self.arena.keys[k].clone(), a, b)?;
                    }
                }
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::formula::ContextSet;

    #[test]
    fn top_has_one_world_model() {
        let m = sat_bounded(&Formula::Top, 1).unwrap().unwrap();
        assert_eq!(m.world_count(), 1);
    }

    #[test]
    fn bound_is_checked() {
        assert!(matches!(sat_bounded(&Formula::Top, 0), Err(LogicError::InvalidBound(0, _))));
        assert!(sat_bounded(&Formula::Top, MAX_BOUND + 1).is_err());
    }

    #[test]
    fn needs_two_worlds() {
        let e = ContextSet::empty();
        let f = Formula::atom("p")
            .implies(Formula::diamond(e.clone(), Formula::atom("p").negate()))
            .and(Formula::atom("p").negate().implies(Formula::diamond(e, Formula::atom("p"))));
        assert!(sat_bounded(&f, 1).unwrap().is_none() || {
            // a one-world model needs a self loop, which cannot satisfy both
            false
        });
        let m = sat_bounded(&f, 2).unwrap().unwrap();
        assert_eq!(m.world_count(), 2);
        assert!(m.validates(&f));
    }

    #[test]
    fn unsat_at_every_bound() {
        let f = Formula::at("n", Formula::atom("g"))
            .and(Formula::atom("g").implies(Formula::atom("g").negate()));
        for k in 1..=MAX_BOUND {
            assert!(sat_bounded(&f, k).unwrap().is_none());
        }
    }
}
