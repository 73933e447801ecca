mod common;

use common::{band_library, corpus, node_inclusions, program, sender_mutations};
use gubs::synthesis::{
    check_derivation, check_observability, minimality_oracle, synthesize, Derivation, Rule,
    SearchBudget, Shape, Substitution, SynthesisError, Verdict,
};
use gubs::syntax::Program;

fn sender_derivation() -> Derivation {
    Derivation::from_json(&corpus("sender_derivation.json")).unwrap()
}

#[test]
fn sender_synthesis_matches_final_design() {
    let lib = band_library();
    let s = synthesize(&program("sender.gubs"), &lib, SearchBudget::default()).unwrap();
    assert_eq!(s.assembly, ["Q1", "Q2", "Q3"]);
    assert_eq!(Shape::of(&s.program), Shape::of(&program("sender_final.gubs")));
    assert!(s.report.ok, "{}", s.report.render());
    let again = synthesize(&program("sender.gubs"), &lib, SearchBudget::default()).unwrap();
    assert_eq!(again.sigma, s.sigma);
    assert_eq!(again.derivation, s.derivation);
}

#[test]
fn empty_goal_needs_nothing() {
    let lib = band_library();
    let s = synthesize(&Program::empty(), &lib, SearchBudget::default()).unwrap();
    assert!(s.assembly.is_empty());
    assert_eq!(s.sigma, Substitution::default());
    assert_eq!(minimality_oracle(&Program::empty(), &lib, 8, SearchBudget::default()).unwrap(), Some(0));
}

#[test]
fn greedy_size_matches_exhaustive_for_sender() {
    let lib = band_library();
    let min = minimality_oracle(&program("sender.gubs"), &lib, 8, SearchBudget::default()).unwrap();
    assert_eq!(min, Some(3));
}

#[test]
fn receiver_has_no_cover_in_this_library() {
    let lib = band_library();
    let err = synthesize(&program("receiver.gubs"), &lib, SearchBudget::default()).unwrap_err();
    assert!(matches!(err, SynthesisError::NoCover(_)), "{err}");
    let d = Derivation::from_json(&corpus("receiver_derivation.json")).unwrap();
    let r = check_derivation(&d, &lib, &program("receiver_parts.gubs"));
    assert!(r.root_matches_goal);
    let failing: Vec<_> = r.failures().map(|n| n.path.as_str()).collect();
    assert_eq!(failing, ["root.0.0.0.0.0", "root.1.0.0.0.0", "root.2.0.0.0"]);
    assert!(r.failures().all(|n| n.rule == Rule::Inst));
}

#[test]
fn sender_derivation_verifies() {
    let r = check_derivation(&sender_derivation(), &band_library(), &program("sender.gubs"));
    assert!(r.ok, "{}", r.render());
    assert_eq!(r.nodes.len(), 10);
}

#[test]
fn mutations_are_rejected_where_they_happen() {
    let lib = band_library();
    let goal = program("sender.gubs");
    let muts = sender_mutations();
    assert!(muts.len() >= 10);
    for (path, m) in muts {
        let mut d = sender_derivation();
        m(d.node_mut(path).unwrap());
        let r = check_derivation(&d, &lib, &goal);
        assert!(!r.ok, "mutation at {path} accepted");
        let first = r.failures().next().map(|n| n.path.clone());
        // a changed target also breaks the link to the parent
        let parent = path.rsplit_once('.').map_or("", |(p, _)| p);
        assert!(
            r.failures().any(|n| n.path == path || n.path == parent),
            "mutation at {path} reported at {first:?}\n{}",
            r.render()
        );
    }
}

#[test]
fn rule_applications_are_sound() {
    let lib = band_library();
    for (path, t, o) in node_inclusions(&sender_derivation(), &lib, 3) {
        assert_eq!(t, Verdict::Included, "{path}");
        assert_eq!(o, Verdict::Inconclusive, "{path}");
    }
    for (path, _) in sender_derivation().nodes() {
        let d = sender_derivation();
        let n = d.nodes().into_iter().find(|(p, _)| *p == path).unwrap().1.clone();
        let q = gubs::synthesis::apply_substitution(&lib.assembly(&n.assembly).unwrap(), &n.sigma);
        assert!(check_observability(&q).unwrap(), "{path}");
    }
}

#[test]
fn receiver_leaves_are_not_included() {
    let lib = band_library();
    let d = Derivation::from_json(&corpus("receiver_derivation.json")).unwrap();
    let leaves = ["root.0.0.0.0.0", "root.1.0.0.0.0", "root.2.0.0.0"];
    for (path, t, o) in node_inclusions(&d, &lib, 3) {
        if leaves.contains(&path.as_str()) {
            assert!(matches!(t, Verdict::NotIncluded(_)), "{path}");
            assert!(matches!(o, Verdict::NotIncluded(_)), "{path}");
        }
    }
}

