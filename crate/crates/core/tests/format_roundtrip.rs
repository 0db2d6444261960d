mod common;

use std::sync::Arc;

use num_rational::Rational64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use orelco::covers::{build_unwrapped_cover, random_exponent_n_quotient};
use orelco::fold::fold;
use orelco::format::*;
use orelco::harness::{random_irreducible_immersion, random_morphism, GeneratorParams};
use orelco::pipeline::{present_subgroup, Budget};
use orelco::stacking::Stacking;
use orelco::words::Word;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn complexes_and_morphisms(seed in any::<u64>(), which in 0usize..2) {
        let b = &common::targets()[which];
        let m = random_morphism(b, &mut ChaCha8Rng::seed_from_u64(seed), 5);
        let text = write_complex(&m.source);
        let back = parse_complex(&text).unwrap();
        prop_assert_eq!(&back, &*m.source);
        prop_assert_eq!(write_complex(&back), text);
        let maps = write_morphism(&m);
        let again = parse_morphism(&maps, Arc::new(back), b.clone()).unwrap();
        prop_assert_eq!(&again, &m);

        let r = fold(&m).unwrap();
        prop_assert_eq!(parse_trace(&write_trace(&r.trace)).unwrap(), r.trace);
    }

    #[test]
    fn labelled_immersions(seed in any::<u64>(), v in 1usize..6) {
        let x = common::orbi("a b a~ b~", 2);
        let params = GeneratorParams { x: x.clone(), vertices: v, edge_density: 0.8, attach_probability: 0.8 };
        let m = random_irreducible_immersion(seed, &params);
        let text = write_complex(&m.source);
        let y = Arc::new(parse_complex(&text).unwrap());
        let maps = write_orbi_morphism(&m);
        prop_assert_eq!(parse_orbi_morphism(&maps, y, x).unwrap(), m);
    }

    #[test]
    fn covers(seed in any::<u64>(), j in 1usize..4) {
        let x = common::orbi("a b", 2);
        if let Some(q) = random_exponent_n_quotient(&x, 2 * j, seed) {
            prop_assert_eq!(&parse_quotient(&write_quotient(&q, x.gamma()), x.gamma()).unwrap(), &q);
            let c = build_unwrapped_cover(&x, &q).unwrap();
            let text = write_cover(&c);
            let back = parse_cover(&text, x).unwrap();
            prop_assert_eq!(write_cover(&back), text);
            prop_assert_eq!(back, c);
        }
    }

    #[test]
    fn stackings(seed in any::<u64>()) {
        let b = &common::targets()[1];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let heights = b
            .cells()
            .iter()
            .map(|c| c.boundary.iter().map(|_| Rational64::new(rng.gen_range(-50..50), rng.gen_range(1..9))).collect())
            .collect();
        let s = Stacking::new(b.clone(), heights).unwrap();
        let text = write_stacking(&s);
        let back = parse_stacking(&text).unwrap();
        prop_assert_eq!(write_stacking(&back), text);
        prop_assert_eq!(back, s);
    }
}

#[test]
fn presentations() {
    let x = common::orbi("a b", 2);
    for gens in [vec!["b", "a a", "a b a~"], vec!["a"], vec!["a b"]] {
        let words: Vec<Word> = gens.iter().map(|s| Word::parse(s, x.gamma()).unwrap()).collect();
        let r = present_subgroup(&words, &x, Budget::default()).unwrap();
        let text = write_presentation(&r.presentation, x.gamma());
        let back = parse_presentation(&text, x.gamma()).unwrap();
        assert_eq!(back, r.presentation);
        assert_eq!(write_presentation(&back, x.gamma()), text);
    }
}

#[test]
fn groups() {
    for (w, n) in [("a b", 2), ("a b a~ b~", 3), ("a", 5)] {
        let x = common::orbi(w, n);
        let text = write_orbicomplex(&x);
        assert_eq!(parse_orbicomplex(&text).unwrap(), *x);
    }
}
