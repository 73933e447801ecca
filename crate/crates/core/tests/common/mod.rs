#![allow(dead_code)]

pub mod programs;

use gubs::logic::{run_tableau, sat_bounded, ContextSet, Formula, TableauBudget, MAX_BOUND};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const PROPS: [&str; 3] = ["p", "q", "r"];
pub const NOMS: [&str; 2] = ["i", "j"];

pub fn keys() -> [ContextSet; 2] {
    [ContextSet::empty(), ContextSet::of(["k"])]
}

/// Random formula over three props, two nominals and two relation keys.
pub fn random_formula(rng: &mut ChaCha8Rng, depth: usize, modal: usize) -> Formula {
    let leaf = depth == 0 || rng.gen_bool(0.15);
    if leaf {
        return match rng.gen_range(0..10) {
            0 => Formula::Top,
            1 | 2 => Formula::nom(NOMS[rng.gen_range(0..2)]),
            _ => Formula::atom(PROPS[rng.gen_range(0..3)]),
        };
    }
    let k = keys()[rng.gen_range(0..2)].clone();
    let choice = if modal == 0 { rng.gen_range(0..6) } else { rng.gen_range(0..13) };
    let sub = |rng: &mut ChaCha8Rng, m: usize| random_formula(rng, depth - 1, m);
    match choice {
        0 | 1 => sub(rng, modal).negate(),
        2 => sub(rng, modal).and(sub(rng, modal)),
        3 => sub(rng, modal).or(sub(rng, modal)),
        4 => sub(rng, modal).implies(sub(rng, modal)),
        5 => Formula::at(NOMS[rng.gen_range(0..2)], sub(rng, modal)),
        6 => Formula::diamond(k, sub(rng, modal - 1)),
        7 => Formula::past(k, sub(rng, modal - 1)),
        8 => Formula::Box(k, Box::new(sub(rng, modal - 1))),
        9 => Formula::BoxConv(k, Box::new(sub(rng, modal - 1))),
        10 => Formula::always(sub(rng, modal)),
        11 => Formula::exists(sub(rng, modal)),
        _ => sub(rng, modal).and(sub(rng, modal)),
    }
}

pub fn corpus(name: &str) -> String {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/").to_string() + name;
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn program(name: &str) -> gubs::syntax::Program {
    gubs::syntax::parse_program(&corpus(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn band_library() -> gubs::synthesis::Library {
    gubs::synthesis::Library::from_json(&corpus("band_lib.json")).unwrap()
}

/// `target[σ] ⊑ assembly[σ]` for every node, by tableau and by the k-bounded oracle.
pub fn node_inclusions(
    d: &gubs::synthesis::Derivation,
    lib: &gubs::synthesis::Library,
    k: usize,
) -> Vec<(String, gubs::synthesis::Verdict, gubs::synthesis::Verdict)> {
    use gubs::synthesis::{apply_substitution, check_inclusion, Mode};
    d.nodes()
        .into_iter()
        .map(|(path, n)| {
            let j = n.judgement().unwrap();
            let p = apply_substitution(&j.target, &j.sigma);
            let q = apply_substitution(&lib.assembly(&j.assembly).unwrap(), &j.sigma);
            let t = check_inclusion(&p, &q, Mode::tableau()).unwrap();
            let o = check_inclusion(&p, &q, Mode::oracle(k)).unwrap();
            (path, t, o)
        })
        .collect()
}

/// Random model over the vocabulary of [`random_formula`].
pub fn random_model(rng: &mut ChaCha8Rng, worlds: usize) -> gubs::logic::KripkeModel {
    use gubs::logic::{KripkeModel, Nominal, Prop};
    let mut m = KripkeModel::new(worlds).unwrap();
    for k in keys() {
        for a in 0..worlds {
            for b in 0..worlds {
                if rng.gen_bool(0.3) {
                    m.add_edge(k.clone(), a, b).unwrap();
                }
            }
        }
    }
    for p in PROPS {
        for w in 0..worlds {
            if rng.gen_bool(0.5) {
                m.set_prop(Prop::new(p), w).unwrap();
            }
        }
    }
    for n in NOMS {
        if rng.gen_bool(0.8) {
            m.assign_nominal(Nominal::new(n), &[rng.gen_range(0..worlds)]).unwrap();
        }
    }
    m
}

/// Tableau against oracle on one formula; `Ok` when they agree.
pub fn differential_check(f: &Formula) -> Result<(), String> {
    let tab = run_tableau(f, TableauBudget::default()).map_err(|e| format!("{e}: {f}"))?;
    let oracle = sat_bounded(&Formula::exists(f.clone()), 3).map_err(|e| e.to_string())?;
    if oracle.is_some() && !tab.satisfiable {
        return Err(format!("oracle found a model, tableau says unsat: {f}"));
    }
    if let Some(m) = &tab.model {
        if !m.evaluate(tab.root_world, f).unwrap() {
            return Err(format!("tableau model is wrong: {f}"));
        }
    }
    if !tab.satisfiable {
        for k in 1..=MAX_BOUND {
            if sat_bounded(&Formula::exists(f.clone()), k).unwrap().is_some() {
                return Err(format!("tableau unsat but oracle has a model at {k}: {f}"));
            }
        }
    }
    Ok(())
}

pub fn curated_unsat() -> Vec<Formula> {
    let e = ContextSet::empty();
    let k = ContextSet::of(["k"]);
    let p = || Formula::atom("p");
    let q = || Formula::atom("q");
    let bx = |k: &ContextSet, f: Formula| Formula::Box(k.clone(), Box::new(f));
    let bxc = |k: &ContextSet, f: Formula| Formula::BoxConv(k.clone(), Box::new(f));
    vec![
        Formula::bottom(),
        p().and(p().negate()),
        Formula::diamond(e.clone(), p()).and(bx(&e, p().negate())),
        Formula::past(k.clone(), p()).and(bxc(&k, p().negate())),
        p().and(Formula::diamond(e.clone(), bxc(&e, p().negate()))),
        p().and(Formula::past(k.clone(), bx(&k, p().negate()))),
        Formula::always(p()).and(Formula::exists(p().negate())),
        Formula::always(p()).and(Formula::diamond(e.clone(), p().negate())),
        Formula::at("i", p()).and(Formula::at("i", p().negate())),
        Formula::nom("i").and(p()).and(Formula::at("i", p().negate())),
        Formula::nom("i")
            .and(p())
            .and(Formula::diamond(e.clone(), Formula::nom("i").and(p().negate()))),
        Formula::nom("i")
            .and(Formula::past(k.clone(), Formula::nom("i").and(q())))
            .and(q().negate()),
        Formula::always(p().implies(p().negate()).and(Formula::at("i", p()))),
        Formula::always(
            p().implies(p().negate().and(Formula::past(e.clone(), p().negate()))),
        )
        .and(Formula::at("o", p())),
        Formula::diamond(e.clone(), p().and(q()))
            .and(bx(&e, p().implies(q().negate()))),
        Formula::at("i", Formula::diamond(k.clone(), p()))
            .and(Formula::at("i", bx(&k, p().negate()))),
        Formula::always(Formula::diamond(e.clone(), Formula::Top))
            .and(Formula::always(bx(&e, Formula::bottom()))),
        Formula::exists(Formula::nom("i").and(p()))
            .and(Formula::exists(Formula::nom("i").and(p().negate()))),
        Formula::always(Formula::past(e.clone(), p()).implies(q()))
            .and(Formula::diamond(e.clone(), q().negate()))
            .and(p()),
        Formula::at("i", Formula::nom("j"))
            .and(Formula::at("j", p()))
            .and(Formula::at("i", p().negate())),
    ]
}

pub type Mutation = (&'static str, fn(&mut gubs::synthesis::Derivation));

/// Single-node edits of the Sender derivation, keyed by the node they touch.
pub fn sender_mutations() -> Vec<Mutation> {
    vec![
        ("root.0.0.0", |d| d.sigma = gubs::synthesis::Substitution::parse("{v1/Luxl, v2/Tetr}").unwrap()),
        ("root.1.0.0", |d| d.sigma = gubs::synthesis::Substitution::default()),
        ("root.2.0.0", |d| d.assembly = vec!["Q1".into(), "Q2".into()]),
        ("root.0", |d| d.rule = gubs::synthesis::Rule::N2P),
        ("root.1.0", |d| d.rule = gubs::synthesis::Rule::Inst),
        ("root.2", |d| d.rule = gubs::synthesis::Rule::Incl),
        ("root", |d| d.rule = gubs::synthesis::Rule::Com),
        ("root", |d| {
            d.premises.pop();
        }),
        ("root.0", |d| d.premises.clear()),
        ("root.1.0", |d| {
            d.premises.pop();
        }),
        ("root.2.0.0", |d| {
            d.target = "{AHL: {low >< mid >< high}, [Light]{detect -> v5}, v5 => v6, v6 => AHL(mid)}".into()
        }),
        ("root.0.0.0", |d| d.target = "{[Light]{detect -> v1}, v1 -> v2, v2 => AHL(low)}".into()),
        ("root.1", |d| d.assembly.push("Q8".into())),
    ]
}

/// A conjunction of five random formulas; about a quarter are unsatisfiable.
pub fn random_instance(rng: &mut ChaCha8Rng) -> Formula {
    Formula::conjunction((0..5).map(|_| random_formula(rng, 4, 3)))
}
