//! Finite quotients in which `w` has exponent exactly `n`, the Schreier
//! covers they define, and the unwrapped cover `X₀ ↬ X`.

use std::collections::VecDeque;
use std::sync::Arc;

use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::complex::{Dart, Graph, Label, TwoComplex};
use crate::orbi::{OneRelatorOrbicomplex, OrbiMorphism};
use crate::words::Word;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("covers are built over a rose")]
    NotRose,
    #[error("quotient has {got} permutations for {want} generators")]
    WrongGeneratorCount { got: usize, want: usize },
    #[error("permutation for generator {0} is not a bijection of the points")]
    NotPermutation(usize),
    #[error("action is not transitive: point {0} is unreachable")]
    NotTransitive(usize),
    #[error("exponent condition violated: the cycle of w through {point} has length {length}, expected {n}")]
    ExponentCondition { point: usize, length: usize, n: usize },
    #[error("no exponent-{n} quotient of degree <= {max_degree} found")]
    BudgetExhausted { n: usize, max_degree: usize },
    #[error("cover check failed: {0}")]
    Verification(String),
}

/// Transitive permutation action of `F(Γ)` on `{0..k−1}`; `perms[g][p]` is
/// `p · g`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteQuotient {
    pub degree: usize,
    pub perms: Vec<Vec<usize>>,
}

impl FiniteQuotient {
    pub fn trivial(generators: usize) -> Self {
        FiniteQuotient {
            degree: 1,
            perms: vec![vec![0]; generators],
        }
    }

    /// `ℤ/m` with generator `g` acting by `+ shifts[g]`.
    pub fn cyclic(m: usize, shifts: &[usize]) -> Self {
        FiniteQuotient {
            degree: m,
            perms: shifts
                .iter()
                .map(|&s| (0..m).map(|p| (p + s) % m).collect())
                .collect(),
        }
    }

    pub fn inverse_perm(&self, g: usize) -> Vec<usize> {
        let mut inv = vec![0; self.degree];
        for (p, &q) in self.perms[g].iter().enumerate() {
            inv[q] = p;
        }
        inv
    }

    pub fn act(&self, p: usize, d: Dart) -> usize {
        if d.is_reversed() {
            self.perms[d.edge()].iter().position(|&q| q == p).expect("bijection")
        } else {
            self.perms[d.edge()][p]
        }
    }

    pub fn act_word(&self, p: usize, u: &Word) -> usize {
        u.letters().iter().fold(p, |p, &d| self.act(p, d))
    }

    /// The permutation `p ↦ p · u`.
    pub fn word_perm(&self, u: &Word) -> Vec<usize> {
        let inverses: Vec<Vec<usize>> = (0..self.perms.len()).map(|g| self.inverse_perm(g)).collect();
        (0..self.degree)
            .map(|p| {
                u.letters().iter().fold(p, |p, &d| {
                    if d.is_reversed() {
                        inverses[d.edge()][p]
                    } else {
                        self.perms[d.edge()][p]
                    }
                })
            })
            .collect()
    }

    /// Whether `u` acts trivially, i.e. lies in the kernel.
    pub fn is_trivial(&self, u: &Word) -> bool {
        self.word_perm(u).iter().enumerate().all(|(p, &q)| p == q)
    }

    /// Structural checks: bijections, transitivity.
    pub fn validate(&self, generators: usize) -> Result<(), CoverError> {
        if self.perms.len() != generators {
            return Err(CoverError::WrongGeneratorCount {
                got: self.perms.len(),
                want: generators,
            });
        }
        for (g, perm) in self.perms.iter().enumerate() {
            let mut seen = vec![false; self.degree];
            if perm.len() != self.degree {
                return Err(CoverError::NotPermutation(g));
            }
            for &q in perm {
                if q >= self.degree || seen[q] {
                    return Err(CoverError::NotPermutation(g));
                }
                seen[q] = true;
            }
        }
        let orbit = self.orbit(0);
        if let Some(p) = (0..self.degree).find(|p| !orbit.contains(p)) {
            return Err(CoverError::NotTransitive(p));
        }
        Ok(())
    }

    fn orbit(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut out = Vec::new();
        while let Some(p) = queue.pop_front() {
            out.push(p);
            for perm in &self.perms {
                for q in [perm[p], perm.iter().position(|&x| x == p).unwrap()] {
                    if !seen[q] {
                        seen[q] = true;
                        queue.push_back(q);
                    }
                }
            }
        }
        out
    }

    /// Every cycle of `p ↦ p · w` has length exactly `n`.
    pub fn check_exponent(&self, w: &Word, n: usize) -> Result<(), CoverError> {
        let sigma = self.word_perm(w);
        for (point, length) in cycle_lengths(&sigma) {
            if length != n {
                return Err(CoverError::ExponentCondition { point, length, n });
            }
        }
        Ok(())
    }
}

/// `(least point, length)` of each cycle of a permutation.
fn cycle_lengths(sigma: &[usize]) -> Vec<(usize, usize)> {
    let mut seen = vec![false; sigma.len()];
    let mut out = Vec::new();
    for p in 0..sigma.len() {
        if seen[p] {
            continue;
        }
        let mut len = 0;
        let mut q = p;
        while !seen[q] {
            seen[q] = true;
            q = sigma[q];
            len += 1;
        }
        out.push((p, len));
    }
    out
}

const RANDOM_TRIES_PER_DEGREE: usize = 4000;
const CYCLIC_SEARCH_LIMIT: u64 = 1 << 20;

/// Cyclic quotients `ℤ/(n·j)` first, in odometer order with the first
/// generator varying fastest; then seeded random permutations by degree.
pub fn find_exponent_n_quotient(
    x: &OneRelatorOrbicomplex,
    max_degree: usize,
    seed: u64,
) -> Result<FiniteQuotient, CoverError> {
    let gamma = x.gamma();
    if !gamma.is_rose() {
        return Err(CoverError::NotRose);
    }
    let r = gamma.num_edges();
    let n = x.branch();
    if n == 1 {
        return Ok(FiniteQuotient::trivial(r));
    }
    let w = x.relator();
    let mut exps = vec![0i64; r];
    for d in w.letters() {
        exps[d.edge()] += if d.is_reversed() { -1 } else { 1 };
    }
    for j in 1..=max_degree / n {
        let m = n * j;
        if (m as u64).checked_pow(r as u32).is_none_or(|c| c > CYCLIC_SEARCH_LIMIT) {
            break;
        }
        let mut shifts = vec![0usize; r];
        loop {
            let image = shifts
                .iter()
                .zip(&exps)
                .map(|(&s, &e)| s as i64 * e)
                .sum::<i64>()
                .rem_euclid(m as i64) as usize;
            let generates = shifts.iter().fold(m, |acc, &s| num_integer::gcd(acc, s)) == 1;
            if generates && num_integer::gcd(image, m) == m / n {
                return Ok(FiniteQuotient::cyclic(m, &shifts));
            }
            let mut i = 0;
            while i < r {
                shifts[i] += 1;
                if shifts[i] < m {
                    break;
                }
                shifts[i] = 0;
                i += 1;
            }
            if i == r {
                break;
            }
        }
    }
    (n..=max_degree)
        .into_par_iter()
        .find_map_first(|k| random_exponent_n_quotient(x, k, seed))
        .ok_or(CoverError::BudgetExhausted { n, max_degree })
}

/// Seeded search among random transitive actions of degree `k`.
pub fn random_exponent_n_quotient(x: &OneRelatorOrbicomplex, k: usize, seed: u64) -> Option<FiniteQuotient> {
    let n = x.branch();
    if k % n != 0 {
        return None;
    }
    let r = x.gamma().num_edges();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    for _ in 0..RANDOM_TRIES_PER_DEGREE {
        let perms = (0..r)
            .map(|_| {
                let mut p: Vec<usize> = (0..k).collect();
                p.shuffle(&mut rng);
                p
            })
            .collect();
        let q = FiniteQuotient { degree: k, perms };
        if q.check_exponent(x.relator(), n).is_ok() && q.validate(r).is_ok() {
            return Some(q);
        }
    }
    None
}

/// `X₀` with its covering map to `X`. Cell `c` stands for the `n` lifts of
/// `w^n` based at the points of `families[c]`, which share one boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnwrappedCover {
    pub cover: Arc<TwoComplex>,
    pub map: OrbiMorphism,
    pub families: Vec<Vec<usize>>,
    pub quotient: FiniteQuotient,
}

impl UnwrappedCover {
    pub fn degree(&self) -> usize {
        self.quotient.degree
    }

    /// Edge of the Schreier graph for generator `g` at point `p`.
    pub fn edge_of(&self, g: usize, p: usize) -> usize {
        g * self.degree() + p
    }

    /// Lift of `u` starting at point `p`.
    pub fn lift(&self, p: usize, u: &Word) -> Vec<Dart> {
        let mut at = p;
        let mut out = Vec::with_capacity(u.len());
        for &d in u.letters() {
            let next = self.quotient.act(at, d);
            if d.is_reversed() {
                out.push(Dart::new(self.edge_of(d.edge(), next), true));
            } else {
                out.push(Dart::forward(self.edge_of(d.edge(), at)));
            }
            at = next;
        }
        out
    }
}

/// Schreier graph of the quotient with one 2-cell per `⟨w⟩`-orbit, attached
/// along the lift of `w^n` at the orbit's least point.
pub fn build_unwrapped_cover(
    x: &Arc<OneRelatorOrbicomplex>,
    q: &FiniteQuotient,
) -> Result<UnwrappedCover, CoverError> {
    let gamma = x.gamma();
    if !gamma.is_rose() {
        return Err(CoverError::NotRose);
    }
    q.validate(gamma.num_edges())?;
    q.check_exponent(x.relator(), x.branch())?;
    let k = q.degree;
    let mut g = Graph::new();
    for p in 0..k {
        g.add_vertex(p.to_string());
    }
    let mut dart_map = Vec::with_capacity(2 * k * gamma.num_edges());
    for (e, edge) in gamma.edges().iter().enumerate() {
        for p in 0..k {
            g.add_edge(
                format!("{}.{p}", edge.name),
                p,
                q.perms[e][p],
                Some(Label {
                    symbol: edge.name.clone(),
                    inverted: false,
                }),
            );
            dart_map.push(Dart::forward(e));
            dart_map.push(Dart::new(e, true));
        }
    }
    let sigma = q.word_perm(x.relator());
    let mut families = Vec::new();
    let mut seen = vec![false; k];
    for p in 0..k {
        if seen[p] {
            continue;
        }
        let mut fam = Vec::new();
        let mut at = p;
        while !seen[at] {
            seen[at] = true;
            fam.push(at);
            at = sigma[at];
        }
        families.push(fam);
    }
    let mut cover = UnwrappedCover {
        cover: Arc::new(TwoComplex::new(g)),
        map: OrbiMorphism {
            source: Arc::new(TwoComplex::new(Graph::new())),
            target: x.clone(),
            vertex_map: vec![],
            dart_map: vec![],
            cell_map: vec![],
        },
        families,
        quotient: q.clone(),
    };
    let big = x.relator_power();
    let mut complex = (*cover.cover).clone();
    for fam in &cover.families {
        complex.add_cell(format!("D.{}", fam[0]), cover.lift(fam[0], &big));
    }
    let complex = Arc::new(complex);
    cover.map = OrbiMorphism::from_graph_map(complex.clone(), x.clone(), vec![0; k], dart_map)
        .map_err(|w| CoverError::Verification(w.to_string()))?;
    cover.cover = complex;
    Ok(cover)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverReport {
    pub degree: usize,
    pub cells: usize,
    pub chi: Rational64,
    /// `k · (χ(Γ) + 1/n)`.
    pub expected_chi: Rational64,
}

/// Checks local bijectivity over `X`, family sizes, and the exact Euler
/// characteristic identity.
pub fn verify_cover(c: &UnwrappedCover) -> Result<CoverReport, CoverError> {
    let x = &*c.map.target;
    let n = x.branch();
    if let Some(w) = c.map.covering_witness() {
        return Err(CoverError::Verification(w.to_string()));
    }
    if let Some(f) = c.families.iter().find(|f| f.len() != n) {
        return Err(CoverError::Verification(format!(
            "family at point {} has {} members, expected {n}",
            f[0],
            f.len()
        )));
    }
    let members: usize = c.families.iter().map(Vec::len).sum();
    if members != c.degree() || c.families.len() != c.cover.num_cells() {
        return Err(CoverError::Verification("families do not partition the points".into()));
    }
    let k = c.degree() as i64;
    let y = &*c.cover;
    let chi = Rational64::from_integer(y.chi2());
    let gamma_chi = x.gamma().num_vertices() as i64 - x.gamma().num_edges() as i64;
    let expected_chi = Rational64::from_integer(k)
        * (Rational64::from_integer(gamma_chi) + Rational64::new(1, n as i64));
    if chi != expected_chi {
        return Err(CoverError::Verification(format!(
            "chi = {chi}, expected {expected_chi}"
        )));
    }
    Ok(CoverReport {
        degree: c.degree(),
        cells: y.num_cells(),
        chi,
        expected_chi,
    })
}

/// Schreier generators of `H ∩ ker η` from generators of `H`: coset graph on
/// the orbit of point 0, then `t_p · h · t_{p·h}⁻¹` for each point and
/// generator, freely reduced, empty words dropped.
pub fn pull_back_subgroup(generators: &[Word], q: &FiniteQuotient) -> Vec<Word> {
    let perms: Vec<Vec<usize>> = generators.iter().map(|h| q.word_perm(h)).collect();
    let mut transversal: Vec<Option<Word>> = vec![None; q.degree];
    transversal[0] = Some(Word::empty());
    let mut queue = VecDeque::from([0usize]);
    let mut points = Vec::new();
    while let Some(p) = queue.pop_front() {
        points.push(p);
        let tp = transversal[p].clone().unwrap();
        for (h, perm) in generators.iter().zip(&perms) {
            let fwd = perm[p];
            if transversal[fwd].is_none() {
                transversal[fwd] = Some(tp.concat(h).free_reduce(false));
                queue.push_back(fwd);
            }
            let back = perm.iter().position(|&x| x == p).unwrap();
            if transversal[back].is_none() {
                transversal[back] = Some(tp.concat(&h.inverse()).free_reduce(false));
                queue.push_back(back);
            }
        }
    }
    points.sort_unstable();
    let mut out = Vec::new();
    for &p in &points {
        let tp = transversal[p].as_ref().unwrap();
        for (h, perm) in generators.iter().zip(&perms) {
            let tq = transversal[perm[p]].as_ref().unwrap();
            let s = tp.concat(h).concat(&tq.inverse()).free_reduce(false);
            if !s.is_empty() {
                out.push(s);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbi::presentation_morphism;

    fn orbi(w: &str, n: usize) -> (Graph, Arc<OneRelatorOrbicomplex>) {
        let g = Graph::rose(&["a", "b"]);
        let w = Word::parse(w, &g).unwrap();
        (g.clone(), Arc::new(OneRelatorOrbicomplex::new(g, w, n).unwrap()))
    }

    /// Order of the image of `u` computed directly from the cycle structure.
    fn order(q: &FiniteQuotient, u: &Word) -> usize {
        let sigma = q.word_perm(u);
        let mut k = 1;
        let mut cur = sigma.clone();
        while cur.iter().enumerate().any(|(p, &x)| p != x) {
            cur = cur.iter().map(|&x| sigma[x]).collect();
            k += 1;
        }
        k
    }

    #[test]
    fn quotient_for_ab_squared() {
        let (_, x) = orbi("a b", 2);
        let q = find_exponent_n_quotient(&x, 8, 0).unwrap();
        assert_eq!(q, FiniteQuotient::cyclic(2, &[1, 0]));
        assert_eq!(order(&q, x.relator()), 2);
    }

    #[test]
    fn quotient_for_a_cubed() {
        let (_, x) = orbi("a", 3);
        let q = find_exponent_n_quotient(&x, 8, 0).unwrap();
        assert_eq!(q, FiniteQuotient::cyclic(3, &[1, 0]));
        assert_eq!(order(&q, x.relator()), 3);
    }

    #[test]
    fn degree_one_budget_fails() {
        let (_, x) = orbi("a b", 2);
        assert_eq!(
            find_exponent_n_quotient(&x, 1, 0),
            Err(CoverError::BudgetExhausted { n: 2, max_degree: 1 })
        );
    }

    #[test]
    fn commutator_needs_a_permutation_quotient() {
        let (_, x) = orbi("a b a~ b~", 2);
        let q = find_exponent_n_quotient(&x, 8, 7).unwrap();
        assert!(q.degree > 2);
        q.check_exponent(x.relator(), 2).unwrap();
        let cover = build_unwrapped_cover(&x, &q).unwrap();
        verify_cover(&cover).unwrap();
    }

    #[test]
    fn worked_cover() {
        let (_, x) = orbi("a b", 2);
        let q = FiniteQuotient::cyclic(2, &[1, 0]);
        let c = build_unwrapped_cover(&x, &q).unwrap();
        let y = &*c.cover;
        assert_eq!((y.num_vertices(), y.num_edges(), y.num_cells()), (2, 4, 1));
        let names: Vec<String> = y.cell(0).boundary.iter().map(|d| y.graph.edge(d.edge()).name.clone()).collect();
        assert_eq!(names, ["a.0", "b.1", "a.1", "b.0"]);
        assert_eq!(y.chi2(), -1);
        let report = verify_cover(&c).unwrap();
        assert_eq!(report.chi, Rational64::from_integer(-1));
        assert_eq!(report.expected_chi, Rational64::from_integer(2) * Rational64::new(-1, 2));
    }

    #[test]
    fn cover_for_a_cubed() {
        let (_, x) = orbi("a", 3);
        let c = build_unwrapped_cover(&x, &FiniteQuotient::cyclic(3, &[1, 0])).unwrap();
        assert_eq!((c.cover.num_vertices(), c.cover.num_edges(), c.cover.num_cells()), (3, 6, 1));
        assert_eq!(verify_cover(&c).unwrap().chi, Rational64::from_integer(-2));
    }

    #[test]
    fn torsion_free_unwrap_is_the_presentation_complex() {
        let (_, x) = orbi("a b a~ b~", 1);
        let q = find_exponent_n_quotient(&x, 4, 0).unwrap();
        assert_eq!(q.degree, 1);
        let c = build_unwrapped_cover(&x, &q).unwrap();
        assert_eq!(
            (c.cover.num_vertices(), c.cover.num_edges(), c.cover.num_cells()),
            (1, 2, 1)
        );
        assert_eq!(c.cover.cell(0).boundary, x.relator().0);
        verify_cover(&c).unwrap();
    }

    #[test]
    fn presentation_complex_is_not_a_cover() {
        let (_, x) = orbi("a b", 2);
        let map = presentation_morphism(&x);
        let c = UnwrappedCover {
            cover: map.source.clone(),
            map,
            families: vec![vec![0]],
            quotient: FiniteQuotient::trivial(2),
        };
        let err = verify_cover(&c).unwrap_err();
        assert!(err.to_string().contains("side"), "{err}");
    }

    #[test]
    fn disk_over_single_petal_is_its_own_cover() {
        let g = Graph::rose(&["a"]);
        let q = FiniteQuotient::trivial(1);
        let x = Arc::new(OneRelatorOrbicomplex::new(g.clone(), Word::parse("a", &g).unwrap(), 1).unwrap());
        let c = build_unwrapped_cover(&x, &q).unwrap();
        verify_cover(&c).unwrap();
    }

    #[test]
    fn exponent_violation_is_rejected() {
        let (_, x) = orbi("a b", 2);
        // ℤ/4 with a ↦ 1: w has order 4
        let q = FiniteQuotient::cyclic(4, &[1, 0]);
        assert!(matches!(
            build_unwrapped_cover(&x, &q),
            Err(CoverError::ExponentCondition { length: 4, .. })
        ));
    }

    #[test]
    fn pull_back_examples() {
        let g = Graph::rose(&["a", "b"]);
        let w = |s: &str| Word::parse(s, &g).unwrap();
        let q = FiniteQuotient::cyclic(2, &[1, 0]);
        let out = pull_back_subgroup(&[w("a"), w("b")], &q);
        assert_eq!(out, vec![w("b"), w("a a"), w("a b a~")]);
        assert!(out.iter().all(|u| q.is_trivial(u)));
        assert_eq!(pull_back_subgroup(&[w("a b")], &q), vec![w("a b a b")]);
        let inside = vec![w("b"), w("a a")];
        assert_eq!(pull_back_subgroup(&inside, &q), inside);
    }
}
