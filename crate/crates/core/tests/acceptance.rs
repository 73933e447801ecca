//! One PASS/FAIL line per acceptance criterion. Sub-checks known to fail for
//! the shipped library and corpus are pinned in `KNOWN_FAILURES`; the run
//! fails when the observed failures differ from that list in either
//! direction.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use gubs::logic::{run_tableau, sat_bounded, ContextSet, Formula, TableauBudget};
use gubs::semantics::interpret;
use gubs::synthesis::{
    apply_substitution, check_derivation, check_inclusion, check_observability,
    minimality_oracle, observability, synthesize, Derivation, Mode, Observability,
    SearchBudget, Shape, Verdict,
};
use gubs::syntax::{parse_program, render_program, AgentState, Ident};
use gubs::traces::{
    consistent_histories, history_to_model, ChronologicalDivision, History, Trace,
};
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::programs::{corpus_programs, random_sigma};
use common::{
    band_library, corpus, curated_unsat, differential_check, node_inclusions, program,
    random_formula, random_instance, random_model, sender_mutations,
};

const KNOWN_FAILURES: &[&str] = &[
    "2: negative circuit observable by tableau",
    "2: negative circuit observable by oracle k<=4",
    "5: Receiver assembly is Q4..Q8",
    "5: Receiver program matches the final design",
    "5: Receiver smallest assembly is 5",
    "6: Receiver derivation verifies",
    "7: Receiver rule applications included (tableau)",
];

struct Report {
    checks: Vec<(String, bool)>,
    criterion: usize,
}

impl Report {
    fn new(criterion: usize) -> Self {
        Report {
            checks: Vec::new(),
            criterion,
        }
    }

    fn check(&mut self, name: &str, ok: bool) {
        self.checks.push((format!("{}: {name}", self.criterion), ok));
    }
}

fn criterion(n: usize, title: &str, limit: Duration, body: fn(&mut Report)) -> Vec<(String, bool)> {
    let mut r = Report::new(n);
    let t0 = Instant::now();
    body(&mut r);
    let took = t0.elapsed();
    r.check(&format!("within {}s", limit.as_secs()), took <= limit);
    let failed: Vec<&str> = r
        .checks
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(name, _)| name.split_once(": ").map_or(name.as_str(), |x| x.1))
        .collect();
    if failed.is_empty() {
        println!("PASS {n} {title} ({:.2}s, {} checks)", took.as_secs_f64(), r.checks.len());
    } else {
        println!(
            "FAIL {n} {title} ({:.2}s): {}",
            took.as_secs_f64(),
            failed.join("; ")
        );
    }
    r.checks
}

fn semantics_golden(r: &mut Report) {
    let g1 = || Formula::atom("g1");
    let g2 = || Formula::atom("g2");
    let past = |f: Formula| Formula::past(ContextSet::empty(), f);
    let expected = Formula::always(Formula::conjunction([
        g2().implies(past(g1()).and(g1())),
        g2().negate().implies(past(g1().negate())),
        g1().implies(past(g2().negate()).and(g2().negate())),
        g1().negate().implies(past(g2())),
        Formula::at("obs1", g1().and(g2().negate())),
        Formula::at("obs2", g1().negate().and(g2())),
    ]));
    let got = interpret(&program("negative_circuit.gubs")).unwrap();
    r.check("canonical strings equal", got.canonical() == expected.canonical());
}

fn observability_verdicts(r: &mut Report) {
    let unobs = program("unobservable.gubs");
    r.check("antilogy unobservable by tableau", !check_observability(&unobs).unwrap());
    r.check(
        "antilogy has no model up to k=4",
        (1..=4).all(|k| observability(&unobs, Mode::oracle(k)).unwrap() == Observability::NoModelUpTo(k)),
    );
    let neg = program("negative_circuit.gubs");
    r.check("negative circuit observable by tableau", check_observability(&neg).unwrap());
    r.check(
        "negative circuit observable by oracle k<=4",
        observability(&neg, Mode::oracle(4)).unwrap().is_observable(),
    );
    let lib = band_library();
    r.check(
        "Q1..Q8 observable",
        lib.len() == 8 && lib.components.iter().all(|c| check_observability(&c.program).unwrap()),
    );
}

fn trace_consistency(r: &mut Report) {
    let t = Trace::parse(&corpus("low_mid_high.trace")).unwrap();
    let p = program("low_mid_high_chain.gubs");
    let found: BTreeSet<Vec<usize>> = consistent_histories(&t, &p, "obs")
        .unwrap()
        .into_iter()
        .map(|h| h.division.0)
        .collect();
    r.check("(1,3,6,7) consistent", found.contains(&vec![1, 3, 6, 7]));
    r.check("(1,2,4,7) consistent", found.contains(&vec![1, 2, 4, 7]));
    r.check("(1,3,7) not consistent", !found.contains(&vec![1, 3, 7]));
    r.check("divisions are valid", ChronologicalDivision::new(vec![1, 3, 6, 7]).validate(&t).is_ok());
}

fn dependence_rows(r: &mut Report) {
    let row = |periods: &[&[&str]]| History {
        periods: periods
            .iter()
            .map(|p| p.iter().map(|s| AgentState::new(Ident::new(*s).unwrap())).collect())
            .collect(),
        contexts: vec![BTreeSet::new(); periods.len()],
    };
    let formulas: Vec<Formula> = ["{c -> e}", "{c => e}", "{c ~> e}"]
        .iter()
        .map(|s| interpret(&parse_program(s).unwrap()).unwrap())
        .collect();
    let rows = [
        row(&[&[], &["c"], &["e"], &[]]),
        row(&[&[], &["c"], &["c", "e"], &[]]),
        row(&[&[], &["c"], &["e"], &["e"]]),
    ];
    let table: Vec<[bool; 3]> = rows
        .iter()
        .map(|h| {
            let m = history_to_model(h, &BTreeMap::new());
            [0, 1, 2].map(|i| m.validates(&formulas[i]))
        })
        .collect();
    r.check("each row validates its own dependence", (0..3).all(|i| table[i][i]));
    r.check(
        "verdict table",
        table == [[true, false, true], [true, true, true], [false, false, true]],
    );
    r.check("remanent row not validated as normal", !table[2][0]);
}

fn band_detector(r: &mut Report) {
    let lib = band_library();
    let budget = SearchBudget::default();
    let sender = synthesize(&program("sender.gubs"), &lib, budget);
    let ok = sender.as_ref().is_ok_and(|s| s.assembly == ["Q1", "Q2", "Q3"]);
    r.check("Sender assembly is Q1,Q2,Q3", ok);
    r.check(
        "Sender program matches the final design",
        sender
            .as_ref()
            .is_ok_and(|s| Shape::of(&s.program) == Shape::of(&program("sender_final.gubs"))),
    );
    let sender_min = minimality_oracle(&program("sender.gubs"), &lib, 8, budget).unwrap();
    r.check("Sender smallest assembly is 3", sender_min == Some(3));
    r.check(
        "Sender greedy size equals smallest",
        sender.as_ref().is_ok_and(|s| Some(s.assembly.len()) == sender_min),
    );

    let receiver = synthesize(&program("receiver.gubs"), &lib, budget);
    r.check(
        "Receiver assembly is Q4..Q8",
        receiver.as_ref().is_ok_and(|s| s.assembly == ["Q4", "Q5", "Q6", "Q7", "Q8"]),
    );
    r.check(
        "Receiver program matches the final design",
        receiver
            .as_ref()
            .is_ok_and(|s| Shape::of(&s.program) == Shape::of(&program("receiver_final.gubs"))),
    );
    let receiver_min = minimality_oracle(&program("receiver.gubs"), &lib, 8, budget).unwrap();
    r.check("Receiver smallest assembly is 5", receiver_min == Some(5));
    if let Err(e) = &receiver {
        println!("     Receiver synthesis: {e}");
    }
}

fn derivation_checking(r: &mut Report) {
    let lib = band_library();
    let sender = Derivation::from_json(&corpus("sender_derivation.json")).unwrap();
    let rep = check_derivation(&sender, &lib, &program("sender.gubs"));
    r.check("Sender derivation verifies", rep.ok);
    let receiver = Derivation::from_json(&corpus("receiver_derivation.json")).unwrap();
    let rep = check_derivation(&receiver, &lib, &program("receiver_parts.gubs"));
    r.check("Receiver derivation verifies", rep.ok);
    for n in rep.failures() {
        println!("     Receiver {}: {}", n.path, n.detail.join("; "));
    }

    let muts = sender_mutations();
    let mut localized = 0;
    for (path, m) in &muts {
        let mut d = sender.clone();
        m(d.node_mut(path).unwrap());
        let rep = check_derivation(&d, &lib, &program("sender.gubs"));
        let parent = path.rsplit_once('.').map_or("", |(p, _)| p);
        if !rep.ok && rep.failures().any(|n| n.path == *path || n.path == parent) {
            localized += 1;
        }
    }
    r.check("at least 10 mutations", muts.len() >= 10);
    r.check("every mutation rejected at its node", localized == muts.len());
}

fn soundness(r: &mut Report) {
    let lib = band_library();
    for (name, file) in [("Sender", "sender_derivation.json"), ("Receiver", "receiver_derivation.json")] {
        let d = Derivation::from_json(&corpus(file)).unwrap();
        let rows = node_inclusions(&d, &lib, 3);
        let bad_tableau: Vec<&str> = rows
            .iter()
            .filter(|(_, t, _)| *t != Verdict::Included)
            .map(|(p, _, _)| p.as_str())
            .collect();
        let bad_oracle: Vec<&str> = rows
            .iter()
            .filter(|(_, _, o)| *o != Verdict::Inconclusive)
            .map(|(p, _, _)| p.as_str())
            .collect();
        r.check(&format!("{name} rule applications included (tableau)"), bad_tableau.is_empty());
        // the oracle only looks for counterexamples; where the tableau
        // already found one, k=3 is expected to find one too
        let oracle_agrees = bad_oracle.iter().all(|p| bad_tableau.contains(p));
        r.check(&format!("{name} no k=3 counterexample where tableau says included"), oracle_agrees);
        if !bad_tableau.is_empty() {
            println!("     {name} not included at: {}", bad_tableau.join(", "));
        }
    }
}

fn differential(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6775_6273);
    let mut disagreements = 0;
    let n = 600;
    for _ in 0..n {
        let f = random_instance(&mut rng);
        if differential_check(&f).is_err() {
            disagreements += 1;
        }
    }
    r.check(&format!("{n} random formulas agree"), disagreements == 0);
    let unsat = curated_unsat();
    let both = unsat.iter().all(|f| {
        !run_tableau(f, TableauBudget::default()).unwrap().satisfiable
            && sat_bounded(&Formula::exists(f.clone()), 3).unwrap().is_none()
    });
    r.check("20 curated unsat formulas", unsat.len() == 20 && both);
}

fn included(p: &gubs::syntax::Program, q: &gubs::syntax::Program) -> bool {
    check_inclusion(p, q, Mode::tableau()).unwrap() == Verdict::Included
}

fn properties(r: &mut Report) {
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    });
    let round_trip = runner.run(&common::programs::program(), |p| {
        let back = parse_program(&render_program(&p)).map_err(|e| {
            proptest::test_runner::TestCaseError::fail(e.to_string())
        })?;
        proptest::prop_assert_eq!(back, p);
        Ok(())
    });
    r.check("parser round trip on 1000 programs", round_trip.is_ok());

    let progs = corpus_programs();
    let mut prop1 = true;
    let mut prop2 = true;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (_, p) in &progs {
        for (_, q) in &progs {
            if !included(p, q) {
                continue;
            }
            if check_observability(q).unwrap() {
                prop1 &= check_observability(p).unwrap();
            }
            let s = random_sigma(&mut rng, p, q);
            prop2 &= included(&apply_substitution(p, &s), &apply_substitution(q, &s));
        }
    }
    r.check("included in observable is observable", prop1);
    r.check("substitution preserves inclusion", prop2);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut independent = true;
    for _ in 0..300 {
        let f = Formula::always(random_formula(&mut rng, 4, 3));
        let worlds = rng.gen_range(1..5);
        let m = random_model(&mut rng, worlds);
        let at0 = m.evaluate(0, &f).unwrap();
        independent &= m.worlds().all(|w| m.evaluate(w, &f).unwrap() == at0);
    }
    r.check("A is world independent", independent);

    let mut monotone = true;
    for _ in 0..150 {
        let f = random_formula(&mut rng, 4, 2);
        let found: Vec<bool> = (1..=3).map(|k| sat_bounded(&f, k).unwrap().is_some()).collect();
        monotone &= found.windows(2).all(|w| !w[0] || w[1]);
    }
    r.check("bounded search monotone in k", monotone);
}

fn main() {
    let s = Duration::from_secs;
    let mut all = Vec::new();
    all.extend(criterion(1, "semantics golden", s(1), semantics_golden));
    all.extend(criterion(2, "observability", s(10), observability_verdicts));
    all.extend(criterion(3, "trace consistency", s(5), trace_consistency));
    all.extend(criterion(4, "dependence rows", s(5), dependence_rows));
    all.extend(criterion(5, "band detector synthesis", s(60), band_detector));
    all.extend(criterion(6, "derivation checking", s(30), derivation_checking));
    all.extend(criterion(7, "rule soundness", s(120), soundness));
    all.extend(criterion(8, "logic differential", s(600), differential));
    all.extend(criterion(9, "property suites", s(600), properties));

    let failed: BTreeSet<&str> = all.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str()).collect();
    let known: BTreeSet<&str> = KNOWN_FAILURES.iter().copied().collect();
    let unexpected: Vec<&&str> = failed.difference(&known).collect();
    let fixed: Vec<&&str> = known.difference(&failed).collect();
    println!(
        "{} checks, {} failed ({} known)",
        all.len(),
        failed.len(),
        failed.intersection(&known).count()
    );
    if !unexpected.is_empty() || !fixed.is_empty() {
        for u in &unexpected {
            println!("unexpected failure: {u}");
        }
        for f in &fixed {
            println!("known failure now passes: {f}");
        }
        std::process::exit(1);
    }
}
