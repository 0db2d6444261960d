use std::sync::Arc;

use num_rational::Rational64;
use proptest::prelude::*;

use orelco::complex::{Dart, Graph, TwoComplex};
use orelco::stacking::{Stacking, Verdict};

/// Two loops `a`, `b` and up to three cells over them.
fn complex(cells: &[Vec<(usize, bool)>]) -> Arc<TwoComplex> {
    let mut c = TwoComplex::new(Graph::rose(&["a", "b"]));
    for (i, path) in cells.iter().enumerate() {
        c.add_cell(format!("c{i}"), path.iter().map(|&(e, r)| Dart::new(e, r)).collect());
    }
    Arc::new(c)
}

fn cells() -> impl Strategy<Value = Vec<Vec<(usize, bool)>>> {
    prop::collection::vec(prop::collection::vec((0usize..2, any::<bool>()), 1..5), 1..4)
}

fn heights_for(cells: &[Vec<(usize, bool)>], raw: &[i64]) -> Vec<Vec<i64>> {
    let mut k = 0;
    cells
        .iter()
        .map(|c| {
            c.iter()
                .map(|_| {
                    k += 1;
                    raw[k - 1]
                })
                .collect()
        })
        .collect()
}

proptest! {
    #[test]
    fn order_preserving_maps_keep_the_verdict(cells in cells(), raw in prop::collection::vec(-20i64..20, 12)) {
        let c = complex(&cells);
        let hs = heights_for(&cells, &raw);
        let base = Stacking::new(c.clone(), hs.clone()).unwrap().check_good();
        let scaled: Vec<Vec<Rational64>> = hs
            .iter()
            .map(|r| r.iter().map(|&h| Rational64::new(3 * h + 7, 2)).collect())
            .collect();
        let floats: Vec<Vec<f64>> = hs.iter().map(|r| r.iter().map(|&h| (h as f64).exp()).collect()).collect();
        let s = Stacking::new(c.clone(), scaled).unwrap();
        prop_assert_eq!(&s.check_good(), &base);
        prop_assert_eq!(&Stacking::new(c.clone(), floats).unwrap().check_good(), &base);
        prop_assert_eq!(&s.rank_order().check_good(), &base);
    }

    #[test]
    fn single_pass_boundaries_are_good(n in 1usize..6, raw in prop::collection::vec(any::<i32>(), 6)) {
        let mut g = Graph::rose::<&str>(&[]);
        let v = 0;
        let mut path = vec![];
        for i in 0..n {
            path.push(Dart::forward(g.add_edge(format!("e{i}"), v, v, None)));
        }
        let mut c = TwoComplex::new(g);
        c.add_cell("c", path);
        let s = Stacking::new(Arc::new(c), vec![raw[..n].to_vec()]).unwrap();
        prop_assert_eq!(s.check_good(), Ok(Verdict::Good));
    }
}
