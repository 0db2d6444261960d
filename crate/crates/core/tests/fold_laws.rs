mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use orelco::fold::{canonical_form, fold};
use orelco::harness::{fold_trial, random_morphism};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn folding_never_grows(seed in any::<u64>(), which in 0usize..2) {
        let b = &common::targets()[which];
        let m = random_morphism(b, &mut ChaCha8Rng::seed_from_u64(seed), 5);
        let r = fold(&m).unwrap();
        let (a, c) = (&*m.source, &*r.folded);
        prop_assert!(c.num_vertices() <= a.num_vertices());
        prop_assert!(c.num_edges() <= a.num_edges());
        prop_assert!(c.num_cells() <= a.num_cells());
        prop_assert!(c.graph.cycle_rank() <= a.graph.cycle_rank());
        prop_assert_eq!(c.graph.components().0, a.graph.components().0);
        prop_assert!(r.inclusion.is_immersion());
    }

    #[test]
    fn universal_property(seed in any::<u64>(), which in 0usize..2) {
        let b = &common::targets()[which];
        prop_assert_eq!(fold_trial(b, seed, 5), Ok(()));
    }

    #[test]
    fn immersions_are_fixed(seed in any::<u64>()) {
        let b = &common::targets()[1];
        let m = random_morphism(b, &mut ChaCha8Rng::seed_from_u64(seed), 4);
        let once = fold(&m).unwrap();
        let twice = fold(&once.inclusion).unwrap();
        prop_assert!(twice.trace.is_empty());
        prop_assert_eq!(&*twice.folded, &*once.folded);
        prop_assert_eq!(canonical_form(&twice.inclusion), canonical_form(&once.inclusion));
    }
}
