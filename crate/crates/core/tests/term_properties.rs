use std::collections::BTreeSet;

use proptest::prelude::*;
use semwork_core::gen::TermGen;
use semwork_core::term::*;

fn gen_with_free(seed: u64) -> TermGen {
    let mut g = TermGen::new(seed);
    g.free_rate = 0.25;
    g
}

fn renamed(t: &Term) -> Term {
    let mut avoid = all_names(t);
    rename_apart(t, &mut avoid)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, max_global_rejects: 100_000, ..ProptestConfig::default() })]

    #[test]
    fn alpha_eq_is_an_equivalence(seed in any::<u64>()) {
        let mut g = TermGen::new(seed);
        let t = g.any_term(5);
        let u = g.any_term(5);
        let t1 = renamed(&t);
        let t2 = renamed(&t1);
        prop_assert!(alpha_eq(&t, &t));
        prop_assert!(alpha_eq(&t, &t1) && alpha_eq(&t1, &t));
        prop_assert!(alpha_eq(&t1, &t2) && alpha_eq(&t, &t2));
        prop_assert_eq!(alpha_eq(&t, &u), alpha_eq(&u, &t));
        prop_assert_eq!(alpha_eq(&t, &u), alpha_eq(&t1, &u));
    }

    #[test]
    fn substitution_laws(seed in any::<u64>()) {
        let mut g = gen_with_free(seed);
        let t = g.any_term(5);
        let free: Vec<Var> = free_vars(&t).into_iter().collect();
        prop_assume!(!free.is_empty());
        let x = free[seed as usize % free.len()].clone();
        let u = g.term(&x.ty, 3);
        let s = Substitution::single(x.clone(), u.clone());
        let out = substitute(&t, &s).unwrap();

        // alpha-invariance
        let out2 = substitute(&renamed(&t), &s).unwrap();
        prop_assert!(alpha_eq(&out, &out2), "{} vs {}", out, out2);

        // free-variable law
        let mut expected: BTreeSet<Var> = free_vars(&t);
        expected.remove(&x);
        expected.extend(free_vars(&u));
        prop_assert_eq!(free_vars(&out), expected, "{} [{} := {}] = {}", t, x.name, u, out);

        // type preservation
        prop_assert_eq!(type_of(&out).unwrap(), type_of(&t).unwrap());
    }

    #[test]
    fn canonical_text_round_trips(seed in any::<u64>()) {
        let mut g = gen_with_free(seed);
        let t = g.any_term(5);
        let back = parse_term(&canonical(&t), &Signature::default()).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn compact_text_round_trips_up_to_types(seed in any::<u64>()) {
        let mut g = gen_with_free(seed);
        let t = g.any_term(5);
        let sig = semwork_core::gen::signature();
        let ty = type_of(&t).unwrap();
        let back = parse_term_expecting(&compact(&t), &sig, &ty).unwrap();
        prop_assert_eq!(compact(&back), compact(&t));
    }
}
