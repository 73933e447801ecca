//! Generators for programs and corpus pairs.

use std::collections::BTreeMap;

use gubs::synthesis::Substitution;
use gubs::syntax::{
    parse_program, AgentState, AttrRel, Behaviour, Dependence, DependenceKind, Ident, Program,
    StateCollection,
};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn ident(upper: bool) -> impl Strategy<Value = Ident> {
    let re = if upper { "[A-Z][a-z0-9_]{0,3}" } else { "[a-z][A-Za-z0-9_$]{0,3}" };
    re.prop_map(|s| Ident::new(s).unwrap())
}

pub fn any_ident() -> impl Strategy<Value = Ident> {
    prop_oneof![ident(true), ident(false)]
}

pub fn state() -> impl Strategy<Value = AgentState> {
    (
        prop::collection::vec(ident(true), 0..2),
        any_ident(),
        prop::option::of(any_ident()),
        any::<bool>(),
    )
        .prop_map(|(path, agent, attr, neg)| {
            let mut s = AgentState::new(agent).in_compartment(&path);
            s.attribute = attr;
            if neg {
                s = s.negated();
            }
            s
        })
}

pub fn states() -> impl Strategy<Value = StateCollection> {
    prop::collection::vec(state(), 1..4).prop_map(|v| StateCollection::new(v).unwrap())
}

pub fn kind() -> impl Strategy<Value = DependenceKind> {
    prop_oneof![
        Just(DependenceKind::Normal),
        Just(DependenceKind::Persistent),
        Just(DependenceKind::Remanent)
    ]
}

pub fn attr_rel() -> impl Strategy<Value = AttrRel> {
    (0..3u8, ident(false), ident(false)).prop_map(|(k, a, b)| match k {
        0 => AttrRel::Prec(a, b),
        1 => AttrRel::Napprox(a, b),
        _ => AttrRel::Bare(a),
    })
}

pub fn behaviour() -> impl Strategy<Value = Behaviour> {
    let leaf = prop_oneof![
        4 => (kind(), states(), states())
            .prop_map(|(kind, cause, effect)| Behaviour::Dependence(Dependence { kind, cause, effect })),
        1 => (prop::collection::vec(ident(true), 1..3), prop::collection::vec(attr_rel(), 1..3))
            .prop_map(|(agents, relations)| Behaviour::AttrDecl { agents, relations }),
    ];
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            (ident(true), prop::collection::vec(inner.clone(), 0..3))
                .prop_map(|(name, body)| Behaviour::Compartment { name, body }),
            (prop::collection::vec(any_ident(), 1..3), prop::collection::vec(inner, 0..3))
                .prop_map(|(contexts, body)| Behaviour::Context { contexts, body }),
        ]
    })
}

pub fn program() -> impl Strategy<Value = Program> {
    (prop::collection::vec(behaviour(), 0..5), prop::collection::vec(states(), 0..3)).prop_map(
        |(mut behaviours, spots)| {
            for (i, states) in spots.into_iter().enumerate() {
                let label = Ident::new(format!("obs{i}")).unwrap();
                behaviours.push(Behaviour::Observation { label, states });
            }
            Program::new(behaviours)
        },
    )
}

pub fn corpus_programs() -> Vec<(String, Program)> {
    let mut out: Vec<(String, Program)> = [
        "empty.gubs",
        "subnetwork.gubs",
        "network.gubs",
        "low_mid_high_chain.gubs",
        "sender.gubs",
        "sender_final.gubs",
    ]
    .iter()
    .map(|n| (n.to_string(), super::program(n)))
    .collect();
    for c in super::band_library().components {
        out.push((c.name.clone(), c.program.clone()));
    }
    for (name, src) in [
        ("n", "{a -> b}"),
        ("p", "{a => b}"),
        ("r", "{a ~> b}"),
        ("chain", "{a => v, v => b}"),
        ("ctx", "{[K]{a -> b}}"),
        ("two", "{a + c -> b}"),
    ] {
        out.push((name.into(), parse_program(src).unwrap()));
    }
    out
}

pub fn random_sigma(rng: &mut ChaCha8Rng, p: &Program, q: &Program) -> Substitution {
    let pool = ["A", "B", "Tetr", "w"];
    let mut map = BTreeMap::new();
    for v in p.free_variables().union(&q.free_variables()) {
        if rng.gen_bool(0.5) {
            let to = Ident::new(pool[rng.gen_range(0..pool.len())]).unwrap();
            if &to != v {
                map.insert(v.clone(), to);
            }
        }
    }
    Substitution::new(map).unwrap()
}

