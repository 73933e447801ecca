//! Derivation trees for `Q ⊢σ P` and their checker.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::syntax::{
    parse_program, AgentState, Behaviour, DependenceKind, Program, StateCollection,
};

use super::inclusion::check_observability;
use super::library::Library;
use super::shape::{DepKey, Shape};
use super::substitution::{apply_substitution, Substitution};
use super::SynthesisError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    Inst,
    Com,
    Cont,
    Asm,
    Trans,
    N2P,
    R2N,
    SCom,
    SCont,
    Incl,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// `assembly ⊢σ target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Judgement {
    pub assembly: Vec<String>,
    pub sigma: Substitution,
    pub target: Program,
}

/// One rule application with its premises. `target` holds GUBS source.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub rule: Rule,
    pub assembly: Vec<String>,
    #[serde(default)]
    pub sigma: Substitution,
    pub target: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub premises: Vec<Derivation>,
    /// Evidence recorded when the derivation was produced.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub side_conditions: Vec<String>,
}

impl Derivation {
    pub fn judgement(&self) -> Result<Judgement, SynthesisError> {
        let target = parse_program(&self.target)
            .map_err(|e| SynthesisError::BadDerivation(format!("target `{}`: {e}", self.target)))?;
        Ok(Judgement {
            assembly: self.assembly.clone(),
            sigma: self.sigma.clone(),
            target,
        })
    }

    pub fn from_json(text: &str) -> Result<Derivation, SynthesisError> {
        serde_json::from_str(text).map_err(|e| SynthesisError::BadDerivation(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    /// Nodes in pre-order with their paths (`root`, `root.0`, `root.0.1`, ...).
    pub fn nodes(&self) -> Vec<(String, &Derivation)> {
        fn walk<'a>(d: &'a Derivation, path: String, out: &mut Vec<(String, &'a Derivation)>) {
            out.push((path.clone(), d));
            for (i, p) in d.premises.iter().enumerate() {
                walk(p, format!("{path}.{i}"), out);
            }
        }
        let mut out = Vec::new();
        walk(self, "root".into(), &mut out);
        out
    }

    pub fn node_mut(&mut self, path: &str) -> Option<&mut Derivation> {
        let mut cur = self;
        for part in path.split('.').skip(1) {
            let i: usize = part.parse().ok()?;
            cur = cur.premises.get_mut(i)?;
        }
        Some(cur)
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }
}

fn fail(rule: Rule, detail: impl Into<String>) -> SynthesisError {
    SynthesisError::SideConditionFailed {
        rule: rule.to_string(),
        detail: detail.into(),
    }
}

fn arity(rule: Rule, premises: &[Judgement]) -> Result<(), SynthesisError> {
    let ok = match rule {
        Rule::Inst => premises.is_empty(),
        Rule::Asm => premises.len() >= 2,
        _ => premises.len() == 1,
    };
    if ok {
        Ok(())
    } else {
        Err(fail(rule, format!("wrong number of premises: {}", premises.len())))
    }
}

fn multiset<T: Ord + Clone>(xs: &[T]) -> BTreeMap<T, usize> {
    let mut m = BTreeMap::new();
    for x in xs {
        *m.entry(x.clone()).or_insert(0) += 1;
    }
    m
}

fn name_set(xs: &[String]) -> BTreeSet<&String> {
    xs.iter().collect()
}

/// Walks two programs in parallel; collections are compared with `same`,
/// everything else must be identical.
fn equal_modulo_collections(
    a: &Program,
    b: &Program,
    same: &dyn Fn(&StateCollection, &StateCollection) -> bool,
) -> bool {
    fn walk(
        a: &[Behaviour],
        b: &[Behaviour],
        same: &dyn Fn(&StateCollection, &StateCollection) -> bool,
    ) -> bool {
        a.len() == b.len()
            && a.iter().zip(b).all(|(x, y)| match (x, y) {
                (Behaviour::Dependence(d), Behaviour::Dependence(e)) => {
                    d.kind == e.kind && same(&d.cause, &e.cause) && same(&d.effect, &e.effect)
                }
                (
                    Behaviour::Compartment { name: n1, body: b1 },
                    Behaviour::Compartment { name: n2, body: b2 },
                ) => n1 == n2 && walk(b1, b2, same),
                (
                    Behaviour::Context {
                        contexts: k1,
                        body: b1,
                    },
                    Behaviour::Context {
                        contexts: k2,
                        body: b2,
                    },
                ) => k1 == k2 && walk(b1, b2, same),
                (
                    Behaviour::Observation {
                        label: l1,
                        states: s1,
                    },
                    Behaviour::Observation {
                        label: l2,
                        states: s2,
                    },
                ) => l1 == l2 && same(s1, s2),
                _ => x == y,
            })
    }
    walk(&a.behaviours, &b.behaviours, same)
}

fn states_multiset(c: &StateCollection) -> BTreeMap<AgentState, usize> {
    multiset(c.states())
}

fn states_set(c: &StateCollection) -> BTreeSet<&AgentState> {
    c.states().iter().collect()
}

/// The one dependence replaced between conclusion and premise.
fn replaced(
    rule: Rule,
    concl: &Shape,
    prem: &Shape,
) -> Result<(DepKey, Vec<DepKey>), SynthesisError> {
    let removed: Vec<&DepKey> = concl.deps.difference(&prem.deps).collect();
    let added: Vec<DepKey> = prem.deps.difference(&concl.deps).cloned().collect();
    if removed.len() != 1 {
        return Err(fail(
            rule,
            format!("expected one rewritten dependence, found {}", removed.len()),
        ));
    }
    Ok((removed[0].clone(), added))
}

fn same_frame(rule: Rule, concl: &Judgement, prem: &Judgement) -> Result<(), SynthesisError> {
    if concl.sigma != prem.sigma {
        return Err(fail(rule, format!("σ changed from {} to {}", prem.sigma, concl.sigma)));
    }
    if multiset(&concl.assembly) != multiset(&prem.assembly) {
        return Err(fail(rule, "assembly changed"));
    }
    Ok(())
}

fn observable(rule: Rule, lib: &Library, j: &Judgement) -> Result<String, SynthesisError> {
    let q = apply_substitution(&lib.assembly(&j.assembly)?, &j.sigma);
    if check_observability(&q)? {
        Ok(format!("obs({}[σ])", j.assembly.join(",")))
    } else {
        Err(fail(rule, format!("assembly {} is not observable under σ", j.assembly.join(","))))
    }
}

/// Checks that `conclusion` follows from `premises` by `rule`. Returns the
/// verified side conditions.
pub fn apply_rule(
    rule: Rule,
    premises: &[Judgement],
    conclusion: &Judgement,
    lib: &Library,
) -> Result<Vec<String>, SynthesisError> {
    arity(rule, premises)?;
    let mut evidence = Vec::new();
    match rule {
        Rule::Inst => {
            let q = apply_substitution(&lib.assembly(&conclusion.assembly)?, &conclusion.sigma);
            let p = apply_substitution(&conclusion.target, &conclusion.sigma);
            Shape::of(&p)
                .contained_in(&Shape::of(&q))
                .map_err(|e| fail(rule, format!("P[σ] ⊄ Q[σ]: {e}")))?;
            evidence.push(format!("P[σ] ⊆ {}[σ]", conclusion.assembly.join(",")));
            evidence.push(observable(rule, lib, conclusion)?);
        }
        Rule::Com => {
            let prem = &premises[0];
            same_sigma(rule, conclusion, prem)?;
            if multiset(&conclusion.assembly) != multiset(&prem.assembly)
                || multiset(&conclusion.target.behaviours) != multiset(&prem.target.behaviours)
            {
                return Err(fail(rule, "conclusion is not a reordering of the premise"));
            }
        }
        Rule::Cont => {
            let prem = &premises[0];
            same_sigma(rule, conclusion, prem)?;
            let cb: BTreeSet<_> = conclusion.target.behaviours.iter().collect();
            let pb: BTreeSet<_> = prem.target.behaviours.iter().collect();
            if name_set(&conclusion.assembly) != name_set(&prem.assembly) || cb != pb {
                return Err(fail(rule, "conclusion is not a contraction of the premise"));
            }
        }
        Rule::Asm => {
            let mut sigma = Substitution::empty();
            let mut names = BTreeSet::new();
            let mut shape = Shape::default();
            for p in premises {
                sigma = sigma.merge(&p.sigma)?;
                names.extend(p.assembly.iter());
                shape = shape.union(&Shape::of(&p.target));
            }
            if sigma != conclusion.sigma {
                return Err(fail(rule, format!("σ should be {sigma}, found {}", conclusion.sigma)));
            }
            if names != name_set(&conclusion.assembly) {
                return Err(fail(rule, "assembly is not the union of the premise assemblies"));
            }
            if shape != Shape::of(&conclusion.target) {
                return Err(fail(rule, "target is not the union of the premise targets"));
            }
            evidence.push(format!("premise substitutions agree; union {sigma}"));
            evidence.push(observable(rule, lib, conclusion)?);
        }
        Rule::SCom | Rule::SCont => {
            let prem = &premises[0];
            same_frame(rule, conclusion, prem)?;
            let ok = if rule == Rule::SCom {
                equal_modulo_collections(&conclusion.target, &prem.target, &|a, b| {
                    states_multiset(a) == states_multiset(b)
                })
            } else {
                equal_modulo_collections(&conclusion.target, &prem.target, &|a, b| {
                    states_set(a) == states_set(b)
                })
            };
            if !ok {
                return Err(fail(rule, "targets differ beyond the state collections"));
            }
        }
        Rule::Trans | Rule::N2P | Rule::R2N | Rule::Incl => {
            let prem = &premises[0];
            same_frame(rule, conclusion, prem)?;
            let c = Shape::of(&conclusion.target);
            let p = Shape::of(&prem.target);
            if c.attributes != p.attributes {
                return Err(fail(rule, "attribute declarations changed"));
            }
            if rule == Rule::Incl && c.deps == p.deps {
                evidence.push(incl_observation(&c, &p)?);
            } else {
                if c.observations != p.observations {
                    return Err(fail(rule, "observations changed"));
                }
                let (d, added) = replaced(rule, &c, &p)?;
                evidence.push(match rule {
                    Rule::Trans => trans(&d, &added, &conclusion.target)?,
                    Rule::N2P => kind_change(rule, &d, &added, DependenceKind::Normal, DependenceKind::Persistent)?,
                    Rule::R2N => kind_change(rule, &d, &added, DependenceKind::Remanent, DependenceKind::Normal)?,
                    _ => incl_cause(&d, &added)?,
                });
            }
        }
    }
    Ok(evidence)
}

fn same_sigma(rule: Rule, concl: &Judgement, prem: &Judgement) -> Result<(), SynthesisError> {
    if concl.sigma != prem.sigma {
        return Err(fail(rule, format!("σ changed from {} to {}", prem.sigma, concl.sigma)));
    }
    Ok(())
}

fn trans(d: &DepKey, added: &[DepKey], concl: &Program) -> Result<String, SynthesisError> {
    let rule = Rule::Trans;
    if d.kind == DependenceKind::Remanent {
        return Err(fail(rule, "a remanent dependence cannot be split"));
    }
    if added.len() != 2 {
        return Err(fail(rule, format!("expected two new links, found {}", added.len())));
    }
    for (head, tail) in [(&added[0], &added[1]), (&added[1], &added[0])] {
        let [v] = head.effect.iter().collect::<Vec<_>>()[..] else {
            continue;
        };
        let bare = v.path.is_empty() && v.attribute.is_none() && v.is_positive();
        let head_ok = head.contexts == d.contexts && head.kind == d.kind && head.cause == d.cause;
        let tail_ok = tail.kind == DependenceKind::Persistent
            && (tail.contexts.is_empty() || tail.contexts == d.contexts)
            && tail.cause.len() == 1
            && tail.cause.contains(v)
            && tail.effect == d.effect;
        if bare && head_ok && tail_ok {
            if !v.agent.is_variable() {
                return Err(fail(rule, format!("intermediate `{}` is not a variable", v.agent)));
            }
            let mut fresh = true;
            concl.for_each_ident(&mut |i| fresh &= i != &v.agent);
            if !fresh {
                return Err(fail(rule, format!("intermediate `{}` is not fresh", v.agent)));
            }
            return Ok(format!("{} split through fresh `{}`", d.render(), v.agent));
        }
    }
    Err(fail(
        rule,
        format!("new links do not split `{}` through a fresh variable", d.render()),
    ))
}

fn kind_change(
    rule: Rule,
    d: &DepKey,
    added: &[DepKey],
    from: DependenceKind,
    to: DependenceKind,
) -> Result<String, SynthesisError> {
    let expected = DepKey {
        kind: to,
        ..d.clone()
    };
    if d.kind != from || added != [expected] {
        return Err(fail(
            rule,
            format!("`{}` is not replaced by its {} form", d.render(), to.arrow()),
        ));
    }
    Ok(format!("{} weakened from {}", d.render(), to.arrow()))
}

fn incl_cause(d: &DepKey, added: &[DepKey]) -> Result<String, SynthesisError> {
    let rule = Rule::Incl;
    match added {
        [s] if s.contexts == d.contexts
            && s.kind == d.kind
            && s.effect == d.effect
            && s.cause.is_superset(&d.cause)
            && s.cause != d.cause =>
        {
            Ok(format!("cause of {} strengthened in the premise", d.render()))
        }
        _ => Err(fail(rule, format!("premise does not strengthen the cause of `{}`", d.render()))),
    }
}

fn incl_observation(c: &Shape, p: &Shape) -> Result<String, SynthesisError> {
    let rule = Rule::Incl;
    let removed: Vec<_> = c.observations.difference(&p.observations).collect();
    let added: Vec<_> = p.observations.difference(&c.observations).collect();
    match (&removed[..], &added[..]) {
        ([(l1, s1)], [(l2, s2)]) if l1 == l2 && s2.is_superset(s1) && s1 != s2 => {
            Ok(format!("observation `{l1}` strengthened in the premise"))
        }
        _ => Err(fail(rule, "premise does not strengthen exactly one observation")),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeReport {
    pub path: String,
    pub rule: Rule,
    pub ok: bool,
    pub detail: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationReport {
    pub nodes: Vec<NodeReport>,
    pub root_matches_goal: bool,
    pub ok: bool,
}

impl DerivationReport {
    pub fn failures(&self) -> impl Iterator<Item = &NodeReport> {
        self.nodes.iter().filter(|n| !n.ok)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for n in &self.nodes {
            out.push_str(&format!(
                "{} {} {}: {}\n",
                if n.ok { "ok  " } else { "FAIL" },
                n.path,
                n.rule,
                n.detail.join("; ")
            ));
        }
        out.push_str(&format!(
            "root {} the goal\n",
            if self.root_matches_goal { "matches" } else { "does NOT match" }
        ));
        out.push_str(if self.ok { "VERIFIED\n" } else { "REJECTED\n" });
        out
    }
}

/// Checks every node and that the root target equals `goal` up to order and
/// repetition.
pub fn check_derivation(d: &Derivation, lib: &Library, goal: &Program) -> DerivationReport {
    let mut nodes = Vec::new();
    for (path, node) in d.nodes() {
        let result = node.judgement().and_then(|concl| {
            let premises = node
                .premises
                .iter()
                .map(Derivation::judgement)
                .collect::<Result<Vec<_>, _>>()?;
            apply_rule(node.rule, &premises, &concl, lib)
        });
        nodes.push(match result {
            Ok(detail) => NodeReport {
                path,
                rule: node.rule,
                ok: true,
                detail,
            },
            Err(e) => NodeReport {
                path,
                rule: node.rule,
                ok: false,
                detail: vec![e.to_string()],
            },
        });
    }
    let root_matches_goal = d
        .judgement()
        .map(|j| Shape::of(&j.target) == Shape::of(goal))
        .unwrap_or(false);
    let ok = root_matches_goal && nodes.iter().all(|n| n.ok);
    DerivationReport {
        nodes,
        root_matches_goal,
        ok,
    }
}
