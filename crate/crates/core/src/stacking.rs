//! Stackings: heights on the boundary circles of the 2-cells, checked for
//! being an embedding over each edge and for being good.

use std::cmp::Ordering;
use std::sync::Arc;

use num_traits::Num;
use thiserror::Error;

use crate::complex::TwoComplex;
use crate::orbi::OneRelatorOrbicomplex;

/// Scalar usable as a height. Only the order is ever consulted.
pub trait Height: Num + PartialOrd + Clone + std::fmt::Debug {}

impl<T: Num + PartialOrd + Clone + std::fmt::Debug> Height for T {}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StackingError {
    #[error("cell {cell} has {got} heights for a boundary of length {want}")]
    WrongLength { cell: usize, got: usize, want: usize },
    #[error("expected heights for {want} cells, got {got}")]
    WrongCellCount { got: usize, want: usize },
    #[error("not an embedding: ({0}, {1}) and ({2}, {3}) share edge and height")]
    NotEmbedding(usize, usize, usize, usize),
    #[error("heights are not comparable (NaN?) at cell {cell} position {position}")]
    Incomparable { cell: usize, position: usize },
}

/// Which extremum a boundary circle fails to attain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Missing {
    Max,
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Good,
    NotGood { cell: usize, missing: Missing },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stacking<H> {
    pub complex: Arc<TwoComplex>,
    /// `heights[c][p]` lifts position `p` of the boundary of cell `c`.
    pub heights: Vec<Vec<H>>,
}

impl<H: Height> Stacking<H> {
    pub fn new(complex: Arc<TwoComplex>, heights: Vec<Vec<H>>) -> Result<Self, StackingError> {
        if heights.len() != complex.num_cells() {
            return Err(StackingError::WrongCellCount {
                got: heights.len(),
                want: complex.num_cells(),
            });
        }
        for (c, (cell, hs)) in complex.cells().iter().zip(&heights).enumerate() {
            if hs.len() != cell.boundary.len() {
                return Err(StackingError::WrongLength {
                    cell: c,
                    got: hs.len(),
                    want: cell.boundary.len(),
                });
            }
        }
        Ok(Stacking { complex, heights })
    }

    /// Stacking of the 2-cell of `X` attached along `w`.
    pub fn for_orbicomplex(
        x: &OneRelatorOrbicomplex,
        heights: Vec<H>,
    ) -> Result<Self, StackingError> {
        Stacking::new(Arc::new(x.underlying_complex()), vec![heights])
    }

    /// Positions grouped by the edge they cover.
    fn fibres(&self) -> Vec<Vec<(usize, usize)>> {
        self.complex.sides()
    }

    fn cmp(&self, a: (usize, usize), b: (usize, usize)) -> Result<Ordering, StackingError> {
        self.heights[a.0][a.1]
            .partial_cmp(&self.heights[b.0][b.1])
            .ok_or(StackingError::Incomparable {
                cell: a.0,
                position: a.1,
            })
    }

    /// First pair of positions over one edge at equal height.
    pub fn check_embedding(&self) -> Result<(), StackingError> {
        for fibre in self.fibres() {
            for (i, &a) in fibre.iter().enumerate() {
                for &b in &fibre[i + 1..] {
                    if self.cmp(a, b)? == Ordering::Equal {
                        return Err(StackingError::NotEmbedding(a.0, a.1, b.0, b.1));
                    }
                }
            }
        }
        Ok(())
    }

    /// Every boundary circle has a position on top of its fibre and one at
    /// the bottom of its fibre.
    pub fn check_good(&self) -> Result<Verdict, StackingError> {
        self.check_embedding()?;
        let n = self.complex.num_cells();
        let mut top = vec![false; n];
        let mut bottom = vec![false; n];
        for fibre in self.fibres() {
            for &a in &fibre {
                let mut is_top = true;
                let mut is_bottom = true;
                for &b in &fibre {
                    match self.cmp(a, b)? {
                        Ordering::Less => is_top = false,
                        Ordering::Greater => is_bottom = false,
                        Ordering::Equal => {}
                    }
                }
                top[a.0] |= is_top;
                bottom[a.0] |= is_bottom;
            }
        }
        if let Some(cell) = top.iter().position(|t| !t) {
            return Ok(Verdict::NotGood {
                cell,
                missing: Missing::Max,
            });
        }
        if let Some(cell) = bottom.iter().position(|b| !b) {
            return Ok(Verdict::NotGood {
                cell,
                missing: Missing::Min,
            });
        }
        Ok(Verdict::Good)
    }

    /// Heights replaced by their rank among all heights.
    pub fn rank_order(&self) -> Stacking<i64> {
        let mut all: Vec<&H> = self.heights.iter().flatten().collect();
        all.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        all.dedup_by(|a, b| a == b);
        let rank = |h: &H| all.iter().position(|x| *x == h).unwrap_or(0) as i64;
        Stacking {
            complex: self.complex.clone(),
            heights: self
                .heights
                .iter()
                .map(|hs| hs.iter().map(rank).collect())
                .collect(),
        }
    }
}

pub fn check_good_stacking<H: Height>(s: &Stacking<H>) -> Result<Verdict, StackingError> {
    s.check_good()
}

/// Branched good stacking: good, on an orbicomplex whose cone point has
/// index at least 2.
pub fn check_branched_good_stacking<H: Height>(
    x: &OneRelatorOrbicomplex,
    s: &Stacking<H>,
) -> Result<bool, StackingError> {
    Ok(x.branch() >= 2 && s.check_good()? == Verdict::Good)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{Dart, Graph};
    use num_rational::Rational64;

    fn loop_complex(cells: usize) -> Arc<TwoComplex> {
        let mut c = TwoComplex::new(Graph::rose(&["a"]));
        for i in 0..cells {
            c.add_cell(format!("c{i}"), vec![Dart(0)]);
        }
        Arc::new(c)
    }

    #[test]
    fn single_pass_cell_is_good() {
        let mut c = TwoComplex::new(Graph::rose(&["a", "b"]));
        c.add_cell("c", vec![Dart(0), Dart(2), Dart(1), Dart(3)]);
        let s = Stacking::new(Arc::new(c), vec![vec![Rational64::from_integer(0), 3.into(), 1.into(), 2.into()]]);
        // a and a~ share edge a: heights 0 and 1 differ, so it embeds
        assert_eq!(s.unwrap().check_good(), Ok(Verdict::Good));
    }

    #[test]
    fn two_cells_on_one_loop_at_constant_heights() {
        let s = Stacking::new(loop_complex(2), vec![vec![1i64], vec![0]]).unwrap();
        assert_eq!(
            s.check_good(),
            Ok(Verdict::NotGood {
                cell: 1,
                missing: Missing::Max
            })
        );
    }

    #[test]
    fn disjoint_images_are_good() {
        let mut c = TwoComplex::new(Graph::rose(&["a", "b"]));
        c.add_cell("c0", vec![Dart(0)]);
        c.add_cell("c1", vec![Dart(2)]);
        let s = Stacking::new(Arc::new(c), vec![vec![5.0f64], vec![5.0]]).unwrap();
        assert_eq!(s.check_good(), Ok(Verdict::Good));
    }

    #[test]
    fn embedding_failure_is_reported_first() {
        let s = Stacking::new(loop_complex(2), vec![vec![0i64], vec![0]]).unwrap();
        assert_eq!(s.check_good(), Err(StackingError::NotEmbedding(0, 0, 1, 0)));
    }

    #[test]
    fn branched_requires_torsion() {
        let g = Graph::rose(&["a", "b"]);
        let w = crate::words::Word::parse("a b", &g).unwrap();
        let x2 = OneRelatorOrbicomplex::new(g.clone(), w.clone(), 2).unwrap();
        let x1 = OneRelatorOrbicomplex::new(g, w, 1).unwrap();
        let s = Stacking::for_orbicomplex(&x2, vec![0i64, 1]).unwrap();
        assert_eq!(check_branched_good_stacking(&x2, &s), Ok(true));
        assert_eq!(check_branched_good_stacking(&x1, &s), Ok(false));
    }
}
