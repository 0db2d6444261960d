#![allow(dead_code)]

use std::sync::Arc;

use orelco::complex::{Graph, TwoComplex};
use orelco::covers::{build_unwrapped_cover, find_exponent_n_quotient};
use orelco::orbi::OneRelatorOrbicomplex;
use orelco::words::Word;

pub fn orbi(w: &str, n: usize) -> Arc<OneRelatorOrbicomplex> {
    let g = Graph::rose(&["a", "b"]);
    let w = Word::parse(w, &g).unwrap();
    Arc::new(OneRelatorOrbicomplex::new(g, w, n).unwrap())
}

/// Fold targets: a presentation complex, and a finite cover.
pub fn targets() -> Vec<Arc<TwoComplex>> {
    let x = orbi("a b a~ b~", 2);
    let q = find_exponent_n_quotient(&x, 12, 1).unwrap();
    let c = build_unwrapped_cover(&x, &q).unwrap();
    vec![Arc::new(orbi("a b", 2).presentation_complex()), c.cover.clone()]
}
