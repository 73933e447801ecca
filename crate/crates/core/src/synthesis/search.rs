//! Greedy component selection with unification and bounded rewriting, and
//! an exhaustive reference for the smallest cover.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::semantics::{normalize, NormalForm, NormalizedDependence};
use crate::syntax::{render_program, AgentState, DependenceKind, Ident, Program};

use super::derivation::{check_derivation, Derivation, DerivationReport, Rule};
use super::inclusion::check_observability;
use super::library::Library;
use super::shape::DepKey;
use super::substitution::{apply_substitution, Substitution};
use super::SynthesisError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Trans splits allowed per goal dependence.
    pub max_depth: usize,
    /// Candidate plans kept per goal dependence.
    pub max_options: usize,
    /// Subsets examined by the minimality oracle.
    pub max_subsets: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_depth: 3,
            max_options: 10_000,
            max_subsets: 1 << 12,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Synthesis {
    pub assembly: Vec<String>,
    pub sigma: Substitution,
    pub derivation: Derivation,
    /// `assembly[σ]`.
    pub program: Program,
    pub report: DerivationReport,
    pub warnings: Vec<String>,
}

type Binding = BTreeMap<Ident, Ident>;

fn bind(b: &mut Binding, g: &Ident, l: &Ident) -> bool {
    if g.is_constant() {
        return g == l;
    }
    match b.get(g) {
        Some(t) => t == l,
        None => {
            b.insert(g.clone(), l.clone());
            true
        }
    }
}

fn unify_state(g: &AgentState, l: &AgentState, b: &mut Binding) -> bool {
    if g.polarity != l.polarity || g.path.len() != l.path.len() {
        return false;
    }
    let mut trial = b.clone();
    let ok = g.path.iter().zip(&l.path).all(|(x, y)| bind(&mut trial, x, y))
        && bind(&mut trial, &g.agent, &l.agent)
        && match (&g.attribute, &l.attribute) {
            (None, None) => true,
            (Some(x), Some(y)) => x == y,
            _ => false,
        };
    if ok {
        *b = trial;
    }
    ok
}

/// All bindings mapping every goal item onto a library item. With `exact`
/// the mapping is a bijection.
fn match_sets<T>(
    goal: &[&T],
    lib: &[&T],
    exact: bool,
    b: &Binding,
    unify: &dyn Fn(&T, &T, &mut Binding) -> bool,
) -> Vec<Binding> {
    if exact && goal.len() != lib.len() {
        return Vec::new();
    }
    fn go<T>(
        goal: &[&T],
        lib: &[&T],
        exact: bool,
        used: &mut Vec<bool>,
        b: &Binding,
        unify: &dyn Fn(&T, &T, &mut Binding) -> bool,
        out: &mut Vec<Binding>,
    ) {
        let Some((first, rest)) = goal.split_first() else {
            out.push(b.clone());
            return;
        };
        for (i, l) in lib.iter().enumerate() {
            if exact && used[i] {
                continue;
            }
            let mut nb = b.clone();
            if unify(first, l, &mut nb) {
                used[i] = true;
                go(rest, lib, exact, used, &nb, unify, out);
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(goal, lib, exact, &mut vec![false; lib.len()], b, unify, &mut out);
    out.sort();
    out.dedup();
    out
}

/// Rewrites turning a goal kind into a library kind, conclusion first.
fn relaxations(goal: DependenceKind, lib: DependenceKind) -> Option<Vec<Rule>> {
    use DependenceKind::*;
    match (goal, lib) {
        (g, l) if g == l => Some(vec![]),
        (Normal, Persistent) => Some(vec![Rule::N2P]),
        (Remanent, Normal) => Some(vec![Rule::R2N]),
        (Remanent, Persistent) => Some(vec![Rule::R2N, Rule::N2P]),
        _ => None,
    }
}

#[derive(Clone, Debug)]
enum Step {
    Direct {
        component: usize,
        lib: DepKey,
        relax: Vec<Rule>,
    },
    Split {
        fresh: Ident,
        head: Box<Plan>,
        tail: Box<Plan>,
    },
}

#[derive(Clone, Debug)]
struct Plan {
    link: DepKey,
    step: Step,
}

impl Plan {
    fn components(&self, out: &mut BTreeSet<usize>) {
        match &self.step {
            Step::Direct { component, .. } => {
                out.insert(*component);
            }
            Step::Split { head, tail, .. } => {
                head.components(out);
                tail.components(out);
            }
        }
    }

    fn splits(&self) -> usize {
        match &self.step {
            Step::Direct { .. } => 0,
            Step::Split { head, tail, .. } => 1 + head.splits() + tail.splits(),
        }
    }
}

#[derive(Clone, Debug)]
struct Option_ {
    plan: Plan,
    binding: Binding,
    components: BTreeSet<usize>,
}

struct Index {
    deps: Vec<(usize, DepKey)>,
}

impl Index {
    fn new(lib: &Library) -> Index {
        let mut deps = Vec::new();
        for (i, c) in lib.components.iter().enumerate() {
            for d in normalize(&c.program).dependences {
                deps.push((i, DepKey::of(&d)));
            }
        }
        Index { deps }
    }
}

fn fresh_state(v: &Ident) -> AgentState {
    AgentState::new(v.clone())
}

struct Coverer<'a> {
    index: &'a Index,
    goal_no: usize,
    counter: usize,
    limit: usize,
}

impl Coverer<'_> {
    fn fresh(&mut self) -> Ident {
        self.counter += 1;
        Ident::new(format!("v${}${}", self.goal_no, self.counter)).expect("valid name")
    }

    fn direct(&self, link: &DepKey, b: &Binding) -> Vec<(Plan, Binding)> {
        let mut out = Vec::new();
        for (component, l) in &self.index.deps {
            let Some(relax) = relaxations(link.kind, l.kind) else {
                continue;
            };
            let gk: Vec<&Ident> = link.contexts.iter().collect();
            let lk: Vec<&Ident> = l.contexts.iter().collect();
            let id_unify = |x: &Ident, y: &Ident, b: &mut Binding| bind(b, x, y);
            for b1 in match_sets(&gk, &lk, true, b, &id_unify) {
                let ge: Vec<&AgentState> = link.effect.iter().collect();
                let le: Vec<&AgentState> = l.effect.iter().collect();
                for b2 in match_sets(&ge, &le, true, &b1, &unify_state) {
                    let gc: Vec<&AgentState> = link.cause.iter().collect();
                    let lc: Vec<&AgentState> = l.cause.iter().collect();
                    for b3 in match_sets(&gc, &lc, false, &b2, &unify_state) {
                        out.push((
                            Plan {
                                link: link.clone(),
                                step: Step::Direct {
                                    component: *component,
                                    lib: l.clone(),
                                    relax: relax.clone(),
                                },
                            },
                            b3,
                        ));
                    }
                }
            }
        }
        out
    }

    fn cover(&mut self, link: &DepKey, depth: usize, b: &Binding) -> Vec<(Plan, Binding)> {
        let mut out = self.direct(link, b);
        if depth == 0 || link.kind == DependenceKind::Remanent {
            return out;
        }
        let v = self.fresh();
        let mut tail_contexts = vec![BTreeSet::new()];
        if !link.contexts.is_empty() {
            tail_contexts.push(link.contexts.clone());
        }
        for tc in tail_contexts {
            let tail = DepKey {
                contexts: tc.clone(),
                kind: DependenceKind::Persistent,
                cause: BTreeSet::from([fresh_state(&v)]),
                effect: link.effect.clone(),
            };
            let head = DepKey {
                contexts: link.contexts.clone(),
                kind: link.kind,
                cause: link.cause.clone(),
                effect: BTreeSet::from([fresh_state(&v)]),
            };
            for (tp, b1) in self.cover(&tail, depth - 1, b) {
                let left = depth - 1 - tp.splits();
                for (hp, b2) in self.cover(&head, left, &b1) {
                    out.push((
                        Plan {
                            link: link.clone(),
                            step: Step::Split {
                                fresh: v.clone(),
                                head: Box::new(hp),
                                tail: Box::new(tp.clone()),
                            },
                        },
                        b2,
                    ));
                    if out.len() >= self.limit {
                        return out;
                    }
                }
            }
        }
        out
    }
}

/// The goal split into one program per dependence, each carrying the
/// attribute declarations of its agents.
fn goal_parts(nf: &NormalForm) -> Vec<(DepKey, NormalizedDependence)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for d in &nf.dependences {
        let k = DepKey::of(d);
        if seen.insert(k.clone()) {
            out.push((k, d.clone()));
        }
    }
    out
}

fn part_program(d: &NormalizedDependence, link_set: &[DepKey]) -> Program {
    let mut nf = NormalForm {
        attributes: d.attributes.clone(),
        ..Default::default()
    };
    for k in link_set {
        nf.dependences.push(NormalizedDependence {
            path: Vec::new(),
            contexts: k.contexts.clone(),
            kind: k.kind,
            cause: k.cause_collection(),
            effect: k.effect_collection(),
            attributes: BTreeMap::new(),
        });
    }
    nf.to_program()
}

fn options_for(
    goal_no: usize,
    link: &DepKey,
    index: &Index,
    budget: SearchBudget,
) -> Vec<Option_> {
    let mut c = Coverer {
        index,
        goal_no,
        counter: 0,
        limit: budget.max_options,
    };
    let mut out: Vec<Option_> = c
        .cover(link, budget.max_depth, &Binding::new())
        .into_iter()
        .map(|(plan, binding)| {
            let mut components = BTreeSet::new();
            plan.components(&mut components);
            Option_ {
                plan,
                binding,
                components,
            }
        })
        .collect();
    out.truncate(budget.max_options);
    out
}

fn merge(a: &Binding, b: &Binding) -> Option<Binding> {
    let mut out = a.clone();
    for (k, v) in b {
        match out.get(k) {
            Some(w) if w != v => return None,
            _ => {
                out.insert(k.clone(), v.clone());
            }
        }
    }
    Some(out)
}


fn subst_state(s: &AgentState, b: &Binding) -> AgentState {
    let map = |i: &Ident| b.get(i).cloned().unwrap_or_else(|| i.clone());
    AgentState {
        path: s.path.iter().map(map).collect(),
        agent: map(&s.agent),
        attribute: s.attribute.as_ref().map(map),
        polarity: s.polarity,
    }
}

fn replace(links: &mut Vec<DepKey>, old: &DepKey, new: Vec<DepKey>) {
    let pos = links.iter().position(|l| l == old).expect("link present");
    links.splice(pos..=pos, new);
}

/// Unary rewrites from one goal link down to library links. Each entry is a
/// rule and the link set of its premise; the conclusion is the previous set.
fn linearize(root: &Plan, b: &Binding) -> Vec<(Rule, Vec<DepKey>)> {
    let mut links = vec![root.link.clone()];
    let mut steps = Vec::new();
    let mut work = vec![root];
    while let Some(p) = work.pop() {
        match &p.step {
            Step::Split { head, tail, .. } => {
                replace(&mut links, &p.link, vec![head.link.clone(), tail.link.clone()]);
                steps.push((Rule::Trans, links.clone()));
                work.push(tail);
                work.push(head);
            }
            Step::Direct { lib, relax, .. } => {
                let mut cur = p.link.clone();
                let image: BTreeSet<AgentState> =
                    cur.cause.iter().map(|s| subst_state(s, b)).collect();
                let extra: Vec<AgentState> =
                    lib.cause.difference(&image).cloned().collect();
                if !extra.is_empty() {
                    let mut next = cur.clone();
                    next.cause.extend(extra);
                    replace(&mut links, &cur, vec![next.clone()]);
                    steps.push((Rule::Incl, links.clone()));
                    cur = next;
                }
                for r in relax {
                    let next = DepKey {
                        kind: match r {
                            Rule::R2N => DependenceKind::Normal,
                            _ => DependenceKind::Persistent,
                        },
                        ..cur.clone()
                    };
                    replace(&mut links, &cur, vec![next.clone()]);
                    steps.push((*r, links.clone()));
                    cur = next;
                }
            }
        }
    }
    steps
}

impl Plan {
    fn fresh_names_into(&self, out: &mut Vec<Ident>) {
        if let Step::Split {
            fresh, head, tail, ..
        } = &self.step
        {
            out.push(fresh.clone());
            head.fresh_names_into(out);
            tail.fresh_names_into(out);
        }
    }
}

/// Compares gain/cost ratios; a zero cost beats any positive cost.
fn ratio_cmp(a: (usize, usize), b: (usize, usize)) -> Ordering {
    match (a.1, b.1) {
        (0, 0) => a.0.cmp(&b.0),
        (0, _) => Ordering::Greater,
        (_, 0) => Ordering::Less,
        _ => (a.0 * b.1).cmp(&(b.0 * a.1)),
    }
}

/// Gain, cost, chosen (goal, option) pairs, new component names, merged binding.
type Pick<'a> = (usize, usize, Vec<(usize, usize)>, Vec<&'a str>, Binding);

/// Picks one option per goal dependence. Options are scored by goal
/// dependences newly covered per added component; ties go to the larger
/// coverage, then to the alphabetically first new components.
fn greedy(
    options: &[Vec<Option_>],
    lib: &Library,
) -> Result<(Vec<usize>, Binding), SynthesisError> {
    let n = options.len();
    let mut chosen: Vec<Option<usize>> = vec![None; n];
    let mut selected: BTreeSet<usize> = BTreeSet::new();
    let mut binding = Binding::new();
    let names = |cs: &BTreeSet<usize>| -> Vec<&str> {
        let mut v: Vec<&str> = cs.iter().map(|&c| lib.components[c].name.as_str()).collect();
        v.sort();
        v
    };
    while chosen.iter().any(Option::is_none) {
        let mut best: Option<Pick> = None;
        for g in (0..n).filter(|&g| chosen[g].is_none()) {
            for (oi, o) in options[g].iter().enumerate() {
                let Some(b) = merge(&binding, &o.binding) else {
                    continue;
                };
                let pool: BTreeSet<usize> = selected.union(&o.components).copied().collect();
                let new: BTreeSet<usize> = o.components.difference(&selected).copied().collect();
                let mut cover = vec![(g, oi)];
                let mut b2 = b.clone();
                for h in (0..n).filter(|&h| h != g && chosen[h].is_none()) {
                    if let Some((hi, bb)) = options[h].iter().enumerate().find_map(|(hi, ho)| {
                        if ho.components.is_subset(&pool) {
                            merge(&b2, &ho.binding).map(|bb| (hi, bb))
                        } else {
                            None
                        }
                    }) {
                        cover.push((h, hi));
                        b2 = bb;
                    }
                }
                let gain = cover.len();
                let cost = new.len();
                let new_names = names(&new);
                let better = match &best {
                    None => true,
                    Some((bg, bc, _, bn, _)) => match ratio_cmp((gain, cost), (*bg, *bc)) {
                        Ordering::Greater => true,
                        Ordering::Less => false,
                        Ordering::Equal => gain > *bg || (gain == *bg && new_names < *bn),
                    },
                };
                if better {
                    best = Some((gain, cost, cover, new_names, b2));
                }
            }
        }
        let Some((_, _, cover, _, b)) = best else {
            let missing = (0..n).find(|&g| chosen[g].is_none()).unwrap_or(0);
            return Err(SynthesisError::NoCover(format!(
                "goal dependence #{} has no compatible library cover",
                missing + 1
            )));
        };
        for (g, oi) in cover {
            chosen[g] = Some(oi);
            selected.extend(options[g][oi].components.iter().copied());
        }
        binding = b;
    }
    Ok((chosen.into_iter().map(Option::unwrap).collect(), binding))
}

fn links_program(d: &NormalizedDependence, links: &[DepKey], rename: &Substitution) -> String {
    render_program(&apply_substitution(&part_program(d, links), rename))
}

/// Runs the greedy search and returns the assembly, σ and a derivation that
/// has been checked against the library.
pub fn synthesize(
    goal: &Program,
    lib: &Library,
    budget: SearchBudget,
) -> Result<Synthesis, SynthesisError> {
    let mut warnings = Vec::new();
    let nf = normalize(goal);
    if !nf.observations.is_empty() {
        warnings.push(format!(
            "{} observation spot(s) of the goal are not synthesized",
            nf.observations.len()
        ));
    }
    let parts = goal_parts(&nf);
    let index = Index::new(lib);
    let options: Vec<Vec<Option_>> = parts
        .par_iter()
        .enumerate()
        .map(|(i, (k, _))| options_for(i, k, &index, budget))
        .collect();
    let (chosen, binding) = greedy(&options, lib)?;
    // fresh names, renumbered in goal order
    let mut fresh = Vec::new();
    for (g, &oi) in chosen.iter().enumerate() {
        options[g][oi].plan.fresh_names_into(&mut fresh);
    }
    let rename = Substitution::new(
        fresh
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), Ident::new(format!("v${}", i + 1)).expect("valid"))),
    )?;
    let sigma = Substitution::new(
        binding
            .iter()
            .map(|(k, v)| (rename.apply_ident(k), v.clone())),
    )?;
    let mut used: BTreeSet<usize> = BTreeSet::new();
    let mut chains = Vec::new();
    for (g, &oi) in chosen.iter().enumerate() {
        let o = &options[g][oi];
        used.extend(o.components.iter().copied());
        let assembly: Vec<String> =
            o.components.iter().map(|&c| lib.components[c].name.clone()).collect();
        let (_, d) = &parts[g];
        let steps = linearize(&o.plan, &o.binding);
        let mut programs = vec![links_program(d, std::slice::from_ref(&o.plan.link), &rename)];
        programs.extend(steps.iter().map(|(_, ls)| links_program(d, ls, &rename)));
        let mut node = Derivation {
            rule: Rule::Inst,
            assembly: assembly.clone(),
            sigma: sigma.clone(),
            target: programs.last().cloned().expect("non-empty"),
            premises: vec![],
            side_conditions: vec![],
        };
        for (i, (rule, _)) in steps.iter().enumerate().rev() {
            node = Derivation {
                rule: *rule,
                assembly: assembly.clone(),
                sigma: sigma.clone(),
                target: programs[i].clone(),
                premises: vec![node],
                side_conditions: vec![],
            };
        }
        chains.push(node);
    }
    let assembly: Vec<String> = used.iter().map(|&c| lib.components[c].name.clone()).collect();
    let root_target = {
        let mut dep_only = nf.clone();
        dep_only.observations.clear();
        render_program(&dep_only.to_program())
    };
    let mut derivation = match chains.len() {
        0 => Derivation {
            rule: Rule::Inst,
            assembly: vec![],
            sigma: sigma.clone(),
            target: root_target.clone(),
            premises: vec![],
            side_conditions: vec![],
        },
        1 => chains.pop().expect("one chain"),
        _ => Derivation {
            rule: Rule::Asm,
            assembly: assembly.clone(),
            sigma: sigma.clone(),
            target: root_target.clone(),
            premises: chains,
            side_conditions: vec![],
        },
    };
    let program = apply_substitution(&lib.assembly(&assembly)?, &sigma);
    if !check_observability(&program)? {
        return Err(SynthesisError::ObservabilityFailed);
    }
    let stripped = {
        let mut g = nf.clone();
        g.observations.clear();
        g.to_program()
    };
    let report = check_derivation(&derivation, lib, &stripped);
    if !report.ok {
        return Err(SynthesisError::BadDerivation(report.render()));
    }
    attach_evidence(&mut derivation, &report);
    Ok(Synthesis {
        assembly,
        sigma,
        derivation,
        program,
        report,
        warnings,
    })
}

fn attach_evidence(d: &mut Derivation, report: &DerivationReport) {
    for nr in &report.nodes {
        if let Some(node) = d.node_mut(&nr.path) {
            node.side_conditions = nr.detail.clone();
        }
    }
}

/// Size of the smallest library subset covering the goal with one
/// consistent σ and an observable assembly, by exhaustive enumeration.
/// `None` when no subset of at most `max_subset` components works.
pub fn minimality_oracle(
    goal: &Program,
    lib: &Library,
    max_subset: usize,
    budget: SearchBudget,
) -> Result<Option<usize>, SynthesisError> {
    let nf = normalize(goal);
    let parts = goal_parts(&nf);
    let index = Index::new(lib);
    let options: Vec<Vec<Option_>> = parts
        .iter()
        .enumerate()
        .map(|(i, (k, _))| options_for(i, k, &index, budget))
        .collect();
    let m = lib.len();
    let mut examined = 0usize;
    for size in 0..=max_subset.min(m) {
        let mut subsets: Vec<BTreeSet<usize>> = Vec::new();
        combinations(m, size, &mut Vec::new(), 0, &mut subsets);
        for s in subsets {
            examined += 1;
            if examined > budget.max_subsets {
                return Err(crate::logic::LogicError::BudgetExceeded {
                    what: "component subsets",
                    limit: budget.max_subsets,
                }
                .into());
            }
            if feasible(&options, &s, 0, &Binding::new()) {
                let names: Vec<String> =
                    s.iter().map(|&c| lib.components[c].name.clone()).collect();
                let q = lib.assembly(&names)?;
                if check_observability(&q)? {
                    return Ok(Some(size));
                }
            }
        }
    }
    Ok(None)
}

fn combinations(
    m: usize,
    k: usize,
    cur: &mut Vec<usize>,
    from: usize,
    out: &mut Vec<BTreeSet<usize>>,
) {
    if cur.len() == k {
        out.push(cur.iter().copied().collect());
        return;
    }
    for i in from..m {
        cur.push(i);
        combinations(m, k, cur, i + 1, out);
        cur.pop();
    }
}

fn feasible(options: &[Vec<Option_>], s: &BTreeSet<usize>, g: usize, b: &Binding) -> bool {
    if g == options.len() {
        return true;
    }
    options[g].iter().any(|o| {
        o.components.is_subset(s)
            && merge(b, &o.binding).is_some_and(|nb| feasible(options, s, g + 1, &nb))
    })
}
