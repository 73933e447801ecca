//! Labelled tableau for hybrid logic with converse, indexed modalities and
//! the global modality. Terminates by ancestor equality blocking; nodes
//! carrying the same nominal are kept in sync and collapse to one world.

use std::collections::VecDeque;
use std::rc::Rc;

use super::formula::Formula;
use super::model::KripkeModel;
use super::nnf::{Arena, Atom, Fid, Node};
use super::LogicError;

/// Work limits for one satisfiability query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableauBudget {
    pub max_nodes: usize,
    pub max_branches: usize,
}

impl Default for TableauBudget {
    fn default() -> Self {
        TableauBudget {
            max_nodes: 50_000,
            max_branches: 2_000_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TableauOutcome {
    pub satisfiable: bool,
    /// A model satisfying the input at world `root_world` when satisfiable.
    pub model: Option<KripkeModel>,
    pub root_world: usize,
    pub nodes_created: usize,
    pub branches: usize,
}

/// Satisfiability of `f` at some world of some model.
pub fn sat_tableau(f: &Formula) -> Result<bool, LogicError> {
    Ok(run_tableau(f, TableauBudget::default())?.satisfiable)
}

pub fn run_tableau(f: &Formula, budget: TableauBudget) -> Result<TableauOutcome, LogicError> {
    let mut arena = Arena::new();
    let root = arena.nnf(f, true);
    let closure = arena.closure(root);
    for &id in &closure {
        if let Node::Or(parts) = arena.node(id).clone() {
            for p in parts {
                arena.negation(p);
            }
        }
        if let Node::Lit(a, p) = arena.node(id).clone() {
            arena.intern(Node::Lit(a, !p));
        }
    }
    for i in 0..arena.noms.len() {
        arena.intern(Node::Lit(Atom::Nom(i), true));
    }
    let mut solver = Solver::new(arena, budget);
    let outcome = solver.solve(root)?;
    if let Some(m) = &outcome.model {
        if !m.evaluate(outcome.root_world, f)? {
            return Err(LogicError::Internal(
                "tableau produced a model that does not satisfy its input".into(),
            ));
        }
    }
    Ok(outcome)
}

// ---------------------------------------------------------------------------
// dependency sets

#[derive(Clone, Debug, Default)]
struct Deps(Option<Rc<Vec<u32>>>);

impl Deps {
    fn level(l: u32) -> Deps {
        Deps(Some(Rc::new(vec![l])))
    }

    fn contains(&self, l: u32) -> bool {
        self.0.as_ref().is_some_and(|v| v.binary_search(&l).is_ok())
    }

    fn union(&self, other: &Deps) -> Deps {
        match (&self.0, &other.0) {
            (None, _) => other.clone(),
            (_, None) => self.clone(),
            (Some(a), Some(b)) => {
                if Rc::ptr_eq(a, b) {
                    return self.clone();
                }
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut j) = (0, 0);
                while i < a.len() && j < b.len() {
                    match a[i].cmp(&b[j]) {
                        std::cmp::Ordering::Less => {
                            out.push(a[i]);
                            i += 1;
                        }
                        std::cmp::Ordering::Greater => {
                            out.push(b[j]);
                            j += 1;
                        }
                        std::cmp::Ordering::Equal => {
                            out.push(a[i]);
                            i += 1;
                            j += 1;
                        }
                    }
                }
                out.extend_from_slice(&a[i..]);
                out.extend_from_slice(&b[j..]);
                Deps(Some(Rc::new(out)))
            }
        }
    }

    fn without(&self, l: u32) -> Deps {
        match &self.0 {
            Some(v) if v.contains(&l) => {
                let rest: Vec<u32> = v.iter().copied().filter(|&x| x != l).collect();
                if rest.is_empty() {
                    Deps(None)
                } else {
                    Deps(Some(Rc::new(rest)))
                }
            }
            _ => self.clone(),
        }
    }
}

// ---------------------------------------------------------------------------
// completion graph

/// Grows on demand: the arena may intern formulas after a node is created.
#[derive(Clone, Debug)]
struct Bits(Vec<u64>);

impl PartialEq for Bits {
    fn eq(&self, other: &Self) -> bool {
        let n = self.0.len().max(other.0.len());
        (0..n).all(|i| self.0.get(i).unwrap_or(&0) == other.0.get(i).unwrap_or(&0))
    }
}

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn get(&self, i: usize) -> bool {
        self.0.get(i / 64).is_some_and(|w| w >> (i % 64) & 1 == 1)
    }
    fn set(&mut self, i: usize) {
        if i / 64 >= self.0.len() {
            self.0.resize(i / 64 + 1, 0);
        }
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + t)
            })
        })
    }
}

#[derive(Clone, Debug)]
struct TNode {
    label: Bits,
    deps: Vec<Option<Deps>>,
    parent: Option<usize>,
    /// Positive nominals in the label.
    noms: Vec<usize>,
    /// (neighbour, key, outgoing?, edge deps)
    adj: Vec<(usize, usize, bool, Deps)>,
    /// Pruned after an ancestor merged into a nominal class.
    dead: bool,
}

impl TNode {
    fn dep(&self, f: usize) -> Deps {
        self.deps.get(f).cloned().flatten().unwrap_or_default()
    }

    fn set_dep(&mut self, f: usize, d: Deps) {
        if f >= self.deps.len() {
            self.deps.resize(f + 1, None);
        }
        self.deps[f] = Some(d);
    }

    fn is_root(&self) -> bool {
        self.parent.is_none()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Active,
    Blocked(usize),
    Indirect,
    Dead,
}

/// Blocking status plus the world each nominal component collapses to.
struct View {
    status: Vec<Status>,
    rep: Vec<usize>,
    members: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
struct State {
    /// Shared between saved states until written.
    nodes: Vec<Rc<TNode>>,
    pending: VecDeque<(usize, Fid, Deps)>,
    global: Vec<(Fid, Deps)>,
    global_seen: Bits,
    ex_done: Bits,
    /// Members of each nominal class, and its canonical (root) node.
    classes: Vec<Vec<usize>>,
    canon: Vec<Option<usize>>,
}

fn node_mut(st: &mut State, x: usize) -> &mut TNode {
    Rc::make_mut(&mut st.nodes[x])
}

enum Step {
    Complete,
    Clash(Deps),
    Branch { choices: Vec<(usize, Fid)>, deps: Deps },
}

struct Frame {
    saved: State,
    choices: Vec<(usize, Fid)>,
    or_deps: Deps,
    next: usize,
    acc: Deps,
    level: u32,
}

struct Solver {
    arena: Arena,
    budget: TableauBudget,
    nodes_created: usize,
    branches: usize,
}

impl Solver {
    fn new(arena: Arena, budget: TableauBudget) -> Self {
        Solver {
            arena,
            budget,
            nodes_created: 0,
            branches: 0,
        }
    }

    fn solve(&mut self, root: Fid) -> Result<TableauOutcome, LogicError> {
        let n = self.arena.len();
        let noms = self.arena.noms.len();
        let mut state = State {
            nodes: Vec::new(),
            pending: VecDeque::new(),
            global: Vec::new(),
            global_seen: Bits::new(n),
            ex_done: Bits::new(n),
            classes: vec![Vec::new(); noms],
            canon: vec![None; noms],
        };
        let r = self.new_node(&mut state, None)?;
        state.pending.push_back((r, root, Deps::default()));

        let mut stack: Vec<Frame> = Vec::new();
        loop {
            match self.expand(&mut state)? {
                Step::Complete => {
                    let (model, root_world) = self.extract(&state)?;
                    return Ok(self.outcome(true, Some(model), root_world));
                }
                Step::Branch { choices, deps } => {
                    self.branches += 1;
                    if self.branches > self.budget.max_branches {
                        return Err(LogicError::BudgetExceeded {
                            what: "tableau branches",
                            limit: self.budget.max_branches,
                        });
                    }
                    let level = stack.len() as u32 + 1;
                    let (x, first) = choices[0];
                    stack.push(Frame {
                        saved: state.clone(),
                        choices,
                        or_deps: deps.clone(),
                        next: 1,
                        acc: Deps::default(),
                        level,
                    });
                    state
                        .pending
                        .push_back((x, first, deps.union(&Deps::level(level))));
                }
                Step::Clash(mut deps) => loop {
                    let Some(frame) = stack.last_mut() else {
                        return Ok(self.outcome(false, None, 0));
                    };
                    if !deps.contains(frame.level) {
                        stack.pop();
                        continue;
                    }
                    frame.acc = frame.acc.union(&deps.without(frame.level));
                    if frame.next < frame.choices.len() {
                        let (x, f) = frame.choices[frame.next];
                        frame.next += 1;
                        state = frame.saved.clone();
                        let d = frame.or_deps.union(&Deps::level(frame.level));
                        state.pending.push_back((x, f, d));
                        break;
                    }
                    deps = frame.acc.union(&frame.or_deps);
                    stack.pop();
                },
            }
        }
    }

    fn outcome(&self, sat: bool, model: Option<KripkeModel>, root_world: usize) -> TableauOutcome {
        TableauOutcome {
            satisfiable: sat,
            model,
            root_world,
            nodes_created: self.nodes_created,
            branches: self.branches,
        }
    }

    fn new_node(&mut self, st: &mut State, parent: Option<usize>) -> Result<usize, LogicError> {
        self.nodes_created += 1;
        if st.nodes.len() >= self.budget.max_nodes {
            return Err(LogicError::BudgetExceeded {
                what: "tableau nodes",
                limit: self.budget.max_nodes,
            });
        }
        let n = self.arena.len();
        st.nodes.push(Rc::new(TNode {
            label: Bits::new(n),
            deps: vec![None; n],
            parent,
            noms: Vec::new(),
            adj: Vec::new(),
            dead: false,
        }));
        let id = st.nodes.len() - 1;
        for (g, d) in st.global.clone() {
            st.pending.push_back((id, g, d));
        }
        Ok(id)
    }

    fn canonical(&mut self, st: &mut State, nom: usize, deps: &Deps) -> Result<usize, LogicError> {
        if let Some(c) = st.canon[nom] {
            return Ok(c);
        }
        let c = self.new_node(st, None)?;
        st.canon[nom] = Some(c);
        let lit = self.arena.intern(Node::Lit(Atom::Nom(nom), true));
        st.pending.push_back((c, lit, deps.clone()));
        Ok(c)
    }

    fn add_edge(&mut self, st: &mut State, from: usize, to: usize, key: usize, deps: Deps) {
        node_mut(st, from).adj.push((to, key, true, deps.clone()));
        node_mut(st, to).adj.push((from, key, false, deps.clone()));
        for (x, y, outgoing) in [(from, to, true), (to, from, false)] {
            let ids: Vec<usize> = st.nodes[x].label.ones().collect();
            for g in ids {
                if let Node::Boxm { key: k, conv, body } = *self.arena.node(g) {
                    // forward boxes travel along outgoing edges, converse ones backwards
                    if k == key && conv != outgoing {
                        let d = st.nodes[x].dep(g).union(&deps);
                        st.pending.push_back((y, body, d));
                    }
                }
            }
        }
    }

    fn saturate(&mut self, st: &mut State) -> Result<Option<Deps>, LogicError> {
        while let Some((x, f, d)) = st.pending.pop_front() {
            if st.nodes[x].dead || st.nodes[x].label.get(f) {
                continue;
            }
            let node = node_mut(st, x);
            node.label.set(f);
            node.set_dep(f, d.clone());

            let node = self.arena.node(f).clone();
            match &node {
                Node::Bot => return Ok(Some(d)),
                Node::Lit(a, p) => {
                    let comp = self.arena.intern(Node::Lit(*a, !p));
                    if st.nodes[x].label.get(comp) {
                        let cd = st.nodes[x].dep(comp);
                        return Ok(Some(d.union(&cd)));
                    }
                }
                _ => {}
            }

            // keep nominal classes in sync
            for nom in st.nodes[x].noms.clone() {
                let lit = self.arena.intern(Node::Lit(Atom::Nom(nom), true));
                let dx = st.nodes[x].dep(lit);
                for &m in &st.classes[nom].clone() {
                    if m != x && !st.nodes[m].label.get(f) {
                        let dm = st.nodes[m].dep(lit);
                        st.pending.push_back((m, f, d.union(&dx).union(&dm)));
                    }
                }
            }

            match node {
                Node::Top | Node::Bot | Node::Or(_) | Node::Dia { .. } => {}
                Node::Lit(Atom::Prop(_), _) | Node::Lit(Atom::Nom(_), false) => {}
                Node::Lit(Atom::Nom(nom), true) => {
                    let first = st.nodes[x].noms.is_empty();
                    node_mut(st, x).noms.push(nom);
                    if st.canon[nom].is_none() {
                        if st.nodes[x].is_root() {
                            st.canon[nom] = Some(x);
                        } else {
                            self.canonical(st, nom, &d)?;
                        }
                    }
                    let members = st.classes[nom].clone();
                    st.classes[nom].push(x);
                    for m in members {
                        let dm = st.nodes[m].dep(f);
                        let link = d.union(&dm);
                        let theirs: Vec<usize> = st.nodes[m].label.ones().collect();
                        for g in theirs {
                            if !st.nodes[x].label.get(g) {
                                let dg = st.nodes[m].dep(g);
                                st.pending.push_back((x, g, dg.union(&link)));
                            }
                        }
                        let mine: Vec<usize> = st.nodes[x].label.ones().collect();
                        for g in mine {
                            if !st.nodes[m].label.get(g) {
                                let dg = st.nodes[x].dep(g);
                                st.pending.push_back((m, g, dg.union(&link)));
                            }
                        }
                    }
                    if first && !st.nodes[x].is_root() {
                        Self::prune_below(st, x);
                    }
                }
                Node::And(parts) => {
                    for p in parts {
                        st.pending.push_back((x, p, d.clone()));
                    }
                }
                Node::At(nom, body) => {
                    let c = self.canonical(st, nom, &d)?;
                    st.pending.push_back((c, body, d));
                }
                Node::Boxm { key, conv, body } => {
                    for (y, k, outgoing, ed) in st.nodes[x].adj.clone() {
                        if k == key && outgoing != conv && !st.nodes[y].dead {
                            st.pending.push_back((y, body, d.union(&ed)));
                        }
                    }
                }
                Node::All(body) => {
                    if !st.global_seen.get(body) {
                        st.global_seen.set(body);
                        st.global.push((body, d.clone()));
                        for y in 0..st.nodes.len() {
                            if !st.nodes[y].dead {
                                st.pending.push_back((y, body, d.clone()));
                            }
                        }
                    }
                }
                Node::Ex(body) => {
                    if !st.ex_done.get(f) {
                        st.ex_done.set(f);
                        let w = self.new_node(st, None)?;
                        st.pending.push_back((w, body, d));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Drops the subtree below `x`; the nominal class now speaks for it.
    fn prune_below(st: &mut State, x: usize) {
        let mut doomed = vec![false; st.nodes.len()];
        for y in x + 1..st.nodes.len() {
            if let Some(p) = st.nodes[y].parent {
                if p == x || doomed[p] {
                    doomed[y] = true;
                    node_mut(st, y).dead = true;
                }
            }
        }
        for class in &mut st.classes {
            class.retain(|&m| !doomed[m]);
        }
    }

    fn view(&self, st: &State) -> View {
        let n = st.nodes.len();
        let mut uf: Vec<usize> = (0..n).collect();
        fn find(uf: &mut [usize], mut a: usize) -> usize {
            while uf[a] != a {
                uf[a] = uf[uf[a]];
                a = uf[a];
            }
            a
        }
        for class in &st.classes {
            for w in class.windows(2) {
                let (a, b) = (find(&mut uf, w[0]), find(&mut uf, w[1]));
                if a != b {
                    uf[a.max(b)] = a.min(b);
                }
            }
        }
        let mut best: Vec<Option<usize>> = vec![None; n];
        for x in 0..n {
            if st.nodes[x].dead {
                continue;
            }
            let r = find(&mut uf, x);
            let better = match best[r] {
                None => true,
                Some(b) => st.nodes[x].is_root() && !st.nodes[b].is_root(),
            };
            if better {
                best[r] = Some(x);
            }
        }
        let mut rep = vec![0; n];
        let mut members = vec![Vec::new(); n];
        for x in 0..n {
            let r = find(&mut uf, x);
            rep[x] = best[r].unwrap_or(x);
            if !st.nodes[x].dead {
                members[rep[x]].push(x);
            }
        }

        let mut status: Vec<Status> = Vec::with_capacity(n);
        for node in &st.nodes {
            let s = match node.parent {
                _ if node.dead => Status::Dead,
                None => Status::Active,
                Some(p) if status[p] != Status::Active => Status::Indirect,
                Some(_) if !node.noms.is_empty() => Status::Active,
                Some(mut a) => {
                    let mut found = None;
                    loop {
                        let anc = &st.nodes[a];
                        if !anc.is_root() && anc.noms.is_empty() && anc.label == node.label {
                            found = Some(a);
                            break;
                        }
                        match anc.parent {
                            Some(p) => a = p,
                            None => break,
                        }
                    }
                    match found {
                        Some(b) => Status::Blocked(b),
                        None => Status::Active,
                    }
                }
            };
            status.push(s);
        }
        View {
            status,
            rep,
            members,
        }
    }

    fn expand(&mut self, st: &mut State) -> Result<Step, LogicError> {
        loop {
            if let Some(d) = self.saturate(st)? {
                return Ok(Step::Clash(d));
            }
            let view = self.view(st);
            let status = &view.status;

            // unit propagation over disjunctions, then pick a branching point
            let mut forced = false;
            let mut best: Option<(Vec<(usize, Fid)>, Deps)> = None;
            for x in 0..st.nodes.len() {
                if matches!(status[x], Status::Indirect | Status::Dead) {
                    continue;
                }
                let ids: Vec<usize> = st.nodes[x].label.ones().collect();
                for f in ids {
                    let Node::Or(parts) = self.arena.node(f).clone() else {
                        continue;
                    };
                    if parts.iter().any(|&p| st.nodes[x].label.get(p)) {
                        continue;
                    }
                    let mut deps = st.nodes[x].dep(f);
                    let mut live = Vec::new();
                    for p in parts {
                        let np = self.arena.negation(p);
                        if st.nodes[x].label.get(np) {
                            deps = deps.union(&st.nodes[x].dep(np));
                        } else {
                            live.push(p);
                        }
                    }
                    match live.len() {
                        0 => return Ok(Step::Clash(deps)),
                        1 => {
                            st.pending.push_back((x, live[0], deps));
                            forced = true;
                        }
                        n => {
                            if best.as_ref().is_none_or(|(c, _)| n < c.len()) {
                                best = Some((live.into_iter().map(|p| (x, p)).collect(), deps));
                            }
                        }
                    }
                }
            }
            if forced {
                continue;
            }
            if let Some((choices, deps)) = best {
                return Ok(Step::Branch { choices, deps });
            }

            // generating rule on the first node with an unwitnessed diamond
            let mut generated = false;
            for x in 0..st.nodes.len() {
                if status[x] != Status::Active || view.rep[x] != x {
                    continue;
                }
                let ids: Vec<usize> = st.nodes[x].label.ones().collect();
                for f in ids {
                    let Node::Dia { key, conv, body } = *self.arena.node(f) else {
                        continue;
                    };
                    if self.witnessed(st, &view, x, key, conv, body) {
                        continue;
                    }
                    let d = st.nodes[x].dep(f);
                    let y = self.new_node(st, Some(x))?;
                    if conv {
                        self.add_edge(st, y, x, key, d.clone());
                    } else {
                        self.add_edge(st, x, y, key, d.clone());
                    }
                    st.pending.push_back((y, body, d));
                    generated = true;
                }
                if generated {
                    break;
                }
            }
            if !generated {
                return Ok(Step::Complete);
            }
        }
    }

    fn witnessed(&self, st: &State, view: &View, x: usize, key: usize, conv: bool, body: Fid) -> bool {
        view.members[view.rep[x]].iter().any(|&s| {
            st.nodes[s].adj.iter().any(|(y, k, outgoing, _)| {
                *k == key && *outgoing != conv && !st.nodes[*y].dead && st.nodes[*y].label.get(body)
            })
        })
    }

    fn extract(&self, st: &State) -> Result<(KripkeModel, usize), LogicError> {
        let view = self.view(st);
        let n = st.nodes.len();
        let mut world_of: Vec<Option<usize>> = vec![None; n];
        let mut reps: Vec<usize> = Vec::new();
        for x in 0..n {
            let s = view.status[x];
            if s == Status::Dead {
                continue;
            }
            let own = if st.nodes[x].noms.is_empty() {
                s == Status::Active
            } else {
                view.rep[x] == x
            };
            if own {
                world_of[x] = Some(reps.len());
                reps.push(x);
            }
        }
        for x in 0..n {
            if world_of[x].is_some() || view.status[x] == Status::Dead {
                continue;
            }
            if !st.nodes[x].noms.is_empty() {
                world_of[x] = world_of[view.rep[x]];
            } else if let Status::Blocked(b) = view.status[x] {
                world_of[x] = world_of[b];
            }
        }
        let mut m = KripkeModel::new(reps.len())?;
        for x in 0..n {
            let Some(wx) = world_of[x] else { continue };
            for (y, key, outgoing, _) in &st.nodes[x].adj {
                if !outgoing {
                    continue;
                }
                if let Some(wy) = world_of[*y] {
                    m.add_edge(self.arena.keys[*key].clone(), wx, wy)?;
                }
            }
        }
        for (w, &x) in reps.iter().enumerate() {
            for f in st.nodes[x].label.ones() {
                match self.arena.node(f) {
                    Node::Lit(Atom::Prop(p), true) => m.set_prop(self.arena.props[*p].clone(), w)?,
                    Node::Lit(Atom::Nom(n), true) => {
                        m.assign_nominal(self.arena.noms[*n].clone(), &[w])?
                    }
                    _ => {}
                }
            }
        }
        let root = world_of[0].ok_or_else(|| LogicError::Internal("root node has no world".into()))?;
        Ok((m, root))
    }
}

/// Check `q ⊨ p` in the global sense: every model validating `q` validates `p`.
pub fn entails(q: &Formula, p: &Formula) -> Result<bool, LogicError> {
    let body = match p {
        Formula::AlwaysA(b) => (**b).clone(),
        other => other.clone(),
    };
    let query = Formula::always(q.clone()).and(Formula::exists(body.negate()));
    Ok(!sat_tableau(&query)?)
}

/// Like [`entails`], returning a model of `q` that falsifies `p` when one exists.
pub fn entailment_counterexample(
    q: &Formula,
    p: &Formula,
    budget: TableauBudget,
) -> Result<Option<KripkeModel>, LogicError> {
    let body = match p {
        Formula::AlwaysA(b) => (**b).clone(),
        other => other.clone(),
    };
    let query = Formula::always(q.clone()).and(Formula::exists(body.negate()));
    let out = run_tableau(&query, budget)?;
    Ok(out.model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::formula::ContextSet;

    fn p(n: &str) -> Formula {
        Formula::atom(n)
    }

    fn sat(f: &Formula) -> bool {
        sat_tableau(f).unwrap()
    }

    #[test]
    fn basics() {
        assert!(sat(&Formula::Top));
        assert!(!sat(&Formula::bottom()));
        assert!(!sat(&p("a").and(p("a").negate())));
        assert!(sat(&p("a").or(p("a").negate())));
    }

    #[test]
    fn modal_contradictions() {
        let k = ContextSet::empty();
        let f = Formula::diamond(k.clone(), p("a"))
            .and(Formula::Box(k.clone(), Box::new(p("a").negate())));
        assert!(!sat(&f));
        let g = Formula::past(k.clone(), p("a"))
            .and(Formula::BoxConv(k.clone(), Box::new(p("a").negate())));
        assert!(!sat(&g));
        // a successor whose predecessors all lack b, while we have b
        let h = p("b").and(Formula::diamond(
            k.clone(),
            Formula::BoxConv(k, Box::new(p("b").negate())),
        ));
        assert!(!sat(&h));
    }

    #[test]
    fn keys_are_independent() {
        let f = Formula::diamond(ContextSet::of(["k"]), p("a"))
            .and(Formula::Box(ContextSet::empty(), Box::new(p("a").negate())));
        assert!(sat(&f));
    }

    #[test]
    fn nominals_name_one_world() {
        let f = Formula::at("n", p("a")).and(Formula::at("n", p("a").negate()));
        assert!(!sat(&f));
        let g = Formula::nom("n")
            .and(p("a"))
            .and(Formula::diamond(ContextSet::empty(), Formula::nom("n").and(p("a").negate())));
        assert!(!sat(&g));
        // a nominal may name nothing
        assert!(sat(&Formula::at("n", Formula::Top).negate()));
    }

    #[test]
    fn global_modality() {
        let f = Formula::always(p("a")).and(Formula::exists(p("a").negate()));
        assert!(!sat(&f));
        // a cycle is needed: every world has a predecessor
        let g = Formula::always(Formula::past(ContextSet::empty(), Formula::Top));
        let out = run_tableau(&g, TableauBudget::default()).unwrap();
        assert!(out.satisfiable);
    }

    #[test]
    fn unobservable_program_formula() {
        // A( g -> (~g & <>-~g) ) & @obs g
        let body = p("g")
            .implies(p("g").negate().and(Formula::past(ContextSet::empty(), p("g").negate())))
            .and(Formula::at("obs", p("g")));
        assert!(!sat(&Formula::always(body)));
    }

    #[test]
    fn entails_reflexive() {
        let f = Formula::always(p("a").implies(Formula::past(ContextSet::empty(), p("b"))));
        assert!(entails(&f, &f).unwrap());
        assert!(entails(&f, &Formula::always(Formula::Top)).unwrap());
        assert!(!entails(&Formula::always(Formula::Top), &f).unwrap());
    }
}
