use std::fmt;

use thiserror::Error;

use super::{free_reduce, Word};
use crate::complex::{reverse_path, rotate, Dart, Orientation};
use crate::orbi::OneRelatorOrbicomplex;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DehnError {
    #[error("Dehn's algorithm needs torsion (branch index >= 2), got n = {0}")]
    NoTorsion(usize),
    #[error("words are only defined over a rose")]
    NotRose,
}

/// Minimum length of a relator piece that may be replaced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Threshold {
    /// More than half of `|w^n|`: `⌊n|w|/2⌋ + 1`.
    #[default]
    Half,
    /// More than `(n − 1)|w|`.
    Strong,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DehnConfig {
    pub threshold: Threshold,
}

/// One Dehn step: the subword of length `length` at `position` equals the
/// prefix of rotation `rotation` of `(w^n)^{sign}` and is replaced by the
/// inverse of the complementary suffix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Replacement {
    pub position: usize,
    pub length: usize,
    pub rotation: usize,
    pub sign: Orientation,
}

impl fmt::Display for Replacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "replace pos={} len={} rot={} sign={}",
            self.position,
            self.length,
            self.rotation,
            self.sign.symbol()
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DehnOutcome {
    Trivial { trace: Vec<Replacement> },
    Nontrivial { remnant: Word, trace: Vec<Replacement> },
}

impl DehnOutcome {
    pub fn is_trivial(&self) -> bool {
        matches!(self, DehnOutcome::Trivial { .. })
    }

    pub fn trace(&self) -> &[Replacement] {
        match self {
            DehnOutcome::Trivial { trace } | DehnOutcome::Nontrivial { trace, .. } => trace,
        }
    }
}

/// The relator `(w^n)^{±1}` as it is read from each rotation.
pub(crate) struct RelatorTable {
    pub(crate) rotations: Vec<(Orientation, usize, Vec<Dart>)>,
    min_piece: usize,
}

impl RelatorTable {
    pub(crate) fn new(x: &OneRelatorOrbicomplex, cfg: DehnConfig) -> Self {
        let r = x.relator_power().0;
        let len = r.len();
        let inv = reverse_path(&r);
        let mut rotations = Vec::with_capacity(2 * len);
        for k in 0..len {
            rotations.push((Orientation::Positive, k, rotate(&r, k)));
        }
        for k in 0..len {
            rotations.push((Orientation::Negative, k, rotate(&inv, k)));
        }
        // negative sign sorts after positive at equal rotation
        rotations.sort_by_key(|(s, k, _)| (*k, *s));
        let min_piece = match cfg.threshold {
            Threshold::Half => len / 2 + 1,
            Threshold::Strong => (x.branch() - 1) * x.relator_len() + 1,
        };
        RelatorTable {
            rotations,
            min_piece,
        }
    }

    pub(crate) fn rotation(&self, sign: Orientation, rotation: usize) -> &[Dart] {
        &self
            .rotations
            .iter()
            .find(|(s, k, _)| *s == sign && *k == rotation)
            .expect("rotation in range")
            .2
    }

    /// Leftmost position with a long enough piece; longest there; then
    /// lowest rotation, positive before negative.
    fn find(&self, u: &[Dart]) -> Option<Replacement> {
        for position in 0..u.len() {
            let rest = &u[position..];
            if rest.len() < self.min_piece {
                return None;
            }
            let mut best: Option<Replacement> = None;
            for (sign, rotation, r) in &self.rotations {
                let length = rest.iter().zip(r).take_while(|(a, b)| a == b).count();
                if length >= self.min_piece && best.is_none_or(|b| length > b.length) {
                    best = Some(Replacement {
                        position,
                        length,
                        rotation: *rotation,
                        sign: *sign,
                    });
                }
            }
            if best.is_some() {
                return best;
            }
        }
        None
    }

    /// Applies `rep` to `u` without the subsequent free reduction.
    pub(crate) fn apply(&self, u: &[Dart], rep: &Replacement) -> Vec<Dart> {
        let r = self.rotation(rep.sign, rep.rotation);
        let tail_inv = reverse_path(&r[rep.length..]);
        let mut out = u[..rep.position].to_vec();
        out.extend(tail_inv);
        out.extend_from_slice(&u[rep.position + rep.length..]);
        out
    }
}

pub fn dehn_solve(u: &Word, x: &OneRelatorOrbicomplex) -> Result<DehnOutcome, DehnError> {
    dehn_solve_with(u, x, DehnConfig::default())
}

/// Dehn's algorithm: replace long relator pieces by their short complements
/// until none remain. Trivial iff the empty word is reached.
pub fn dehn_solve_with(
    u: &Word,
    x: &OneRelatorOrbicomplex,
    cfg: DehnConfig,
) -> Result<DehnOutcome, DehnError> {
    if x.branch() < 2 {
        return Err(DehnError::NoTorsion(x.branch()));
    }
    if !x.gamma().is_rose() {
        return Err(DehnError::NotRose);
    }
    let table = RelatorTable::new(x, cfg);
    let mut current = free_reduce(u, false);
    let mut trace = Vec::new();
    while let Some(rep) = table.find(current.letters()) {
        let next = free_reduce(&Word(table.apply(current.letters(), &rep)), false);
        debug_assert!(next.len() < current.len());
        trace.push(rep);
        current = next;
    }
    if current.is_empty() {
        Ok(DehnOutcome::Trivial { trace })
    } else {
        Ok(DehnOutcome::Nontrivial {
            remnant: current,
            trace,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Graph;

    fn setup(w: &str, n: usize) -> (Graph, OneRelatorOrbicomplex) {
        let g = Graph::rose(&["a", "b"]);
        let w = Word::parse(w, &g).unwrap();
        (g.clone(), OneRelatorOrbicomplex::new(g, w, n).unwrap())
    }

    #[test]
    fn relator_is_trivial_in_one_step() {
        let (g, x) = setup("a b", 2);
        let out = dehn_solve(&Word::parse("a b a b", &g).unwrap(), &x).unwrap();
        assert!(out.is_trivial());
        assert_eq!(out.trace().len(), 1);
    }

    #[test]
    fn ab_and_ababab_are_nontrivial() {
        let (g, x) = setup("a b", 2);
        let out = dehn_solve(&Word::parse("a b", &g).unwrap(), &x).unwrap();
        assert!(!out.is_trivial());
        let out = dehn_solve(&Word::parse("a b a b a b", &g).unwrap(), &x).unwrap();
        match out {
            DehnOutcome::Nontrivial { remnant, .. } => {
                assert_eq!(remnant, Word::parse("a b", &g).unwrap())
            }
            _ => panic!("expected nontrivial"),
        }
    }

    #[test]
    fn torsion_free_case_is_rejected() {
        let (g, x) = setup("a b", 1);
        assert_eq!(
            dehn_solve(&Word::parse("a", &g).unwrap(), &x),
            Err(DehnError::NoTorsion(1))
        );
    }

    #[test]
    fn steps_strictly_shorten() {
        let (g, x) = setup("a b a b~", 3);
        let u = Word::parse("b a b a~ b a b a~ b a b a~ b~ a~", &g).unwrap();
        let table = RelatorTable::new(&x, DehnConfig::default());
        let mut cur = free_reduce(&u, false);
        while let Some(rep) = table.find(cur.letters()) {
            let next = free_reduce(&Word(table.apply(cur.letters(), &rep)), false);
            assert!(next.len() < cur.len());
            cur = next;
        }
    }

    #[test]
    fn strong_threshold_agrees_on_the_relator_conjugate() {
        let (g, x) = setup("a b", 3);
        let u = Word::parse("b a b a b a b b~", &g).unwrap();
        let cfg = DehnConfig {
            threshold: Threshold::Strong,
        };
        assert!(dehn_solve_with(&u, &x, cfg).unwrap().is_trivial());
    }
}
