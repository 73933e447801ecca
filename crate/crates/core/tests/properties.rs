mod common;

use gubs::logic::{sat_bounded, Formula};
use gubs::syntax::{parse_program, render_program};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::programs::program;
use common::{random_formula, random_model};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn parse_inverts_render(p in program()) {
        let text = render_program(&p);
        let back = parse_program(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, p, "{}", text);
    }
}

#[test]
fn always_does_not_depend_on_the_world() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let f = Formula::always(random_formula(&mut rng, 4, 3));
        let n = rng.gen_range(1..5);
        let m = random_model(&mut rng, n);
        let at0 = m.evaluate(0, &f).unwrap();
        for w in m.worlds() {
            assert_eq!(m.evaluate(w, &f).unwrap(), at0, "{f}");
        }
        let e = Formula::exists(random_formula(&mut rng, 4, 3));
        let at0 = m.evaluate(0, &e).unwrap();
        assert!(m.worlds().all(|w| m.evaluate(w, &e).unwrap() == at0), "{e}");
    }
}

#[test]
fn derived_connectives_agree_with_their_definitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..300 {
        let a = random_formula(&mut rng, 3, 2);
        let b = random_formula(&mut rng, 3, 2);
        let k = common::keys()[rng.gen_range(0..2)].clone();
        let n = rng.gen_range(1..5);
        let m = random_model(&mut rng, n);
        let pairs = [
            (a.clone().implies(b.clone()), a.clone().negate().or(b.clone())),
            (
                a.clone().or(b.clone()),
                a.clone().negate().and(b.clone().negate()).negate(),
            ),
            (
                Formula::Box(k.clone(), Box::new(a.clone())),
                Formula::diamond(k.clone(), a.clone().negate()).negate(),
            ),
            (
                Formula::BoxConv(k.clone(), Box::new(a.clone())),
                Formula::past(k.clone(), a.clone().negate()).negate(),
            ),
            (
                Formula::always(a.clone()),
                Formula::exists(a.clone().negate()).negate(),
            ),
        ];
        for w in m.worlds() {
            for (x, y) in &pairs {
                assert_eq!(m.evaluate(w, x).unwrap(), m.evaluate(w, y).unwrap(), "{x} vs {y}");
            }
        }
    }
}

#[test]
fn bounded_search_is_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..150 {
        let f = random_formula(&mut rng, 4, 2);
        let mut found = false;
        for k in 1..=3 {
            let now = sat_bounded(&f, k).unwrap().is_some();
            assert!(now || !found, "model at a smaller bound lost at {k}: {f}");
            found = now;
        }
    }
}
