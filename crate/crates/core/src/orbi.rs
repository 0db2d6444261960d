//! One-relator orbicomplexes `Γ ∪_w D_n`, morphisms into them, degree and the
//! w-cycles audits.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::complex::{
    CellAlignment, Dart, Graph, MapKind, Orientation, TwoComplex, Witness,
};
use crate::words::{is_proper_power, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrbiError {
    #[error("branch index must be at least 1")]
    ZeroBranch,
    #[error("relator is empty")]
    EmptyRelator,
    #[error("relator names a missing edge")]
    RelatorOutOfRange,
    #[error("relator is not a closed path (breaks after position {0})")]
    NotClosed(usize),
    #[error("relator backtracks at position {0}")]
    Backtracking(usize),
    #[error("proper_power: relator is the {exponent}-th power of a shorter word")]
    ProperPower { exponent: usize },
}

/// `X = Γ ∪_w D_n`: a graph with one disk attached along `w` carrying a cone
/// point of order `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneRelatorOrbicomplex {
    gamma: Graph,
    relator: Word,
    branch: usize,
}

impl OneRelatorOrbicomplex {
    pub fn new(gamma: Graph, relator: Word, branch: usize) -> Result<Self, OrbiError> {
        if branch == 0 {
            return Err(OrbiError::ZeroBranch);
        }
        let len = relator.len();
        if len == 0 {
            return Err(OrbiError::EmptyRelator);
        }
        if relator.letters().iter().any(|d| d.edge() >= gamma.num_edges()) {
            return Err(OrbiError::RelatorOutOfRange);
        }
        let w = relator.letters();
        for i in 0..len {
            let (here, next) = (w[i], w[(i + 1) % len]);
            if gamma.terminus(here) != gamma.origin(next) {
                return Err(OrbiError::NotClosed(i));
            }
            if next == here.reverse() {
                return Err(OrbiError::Backtracking(i));
            }
        }
        let power = is_proper_power(&relator).expect("nonempty");
        if power.is_proper_power {
            return Err(OrbiError::ProperPower {
                exponent: power.exponent,
            });
        }
        Ok(OneRelatorOrbicomplex {
            gamma,
            relator,
            branch,
        })
    }

    pub fn gamma(&self) -> &Graph {
        &self.gamma
    }

    pub fn relator(&self) -> &Word {
        &self.relator
    }

    pub fn branch(&self) -> usize {
        self.branch
    }

    pub fn relator_len(&self) -> usize {
        self.relator.len()
    }

    /// `w^n`, the boundary of every 2-cell mapping to `X`.
    pub fn relator_power(&self) -> Word {
        self.relator.pow(self.branch)
    }

    pub fn has_torsion(&self) -> bool {
        self.branch > 1
    }

    /// `X′ = Γ ∪_{w^n} D`, the genuine presentation complex.
    pub fn presentation_complex(&self) -> TwoComplex {
        let mut c = TwoComplex::new(self.gamma.clone());
        c.add_cell("D", self.relator_power().0);
        c
    }

    /// `Γ ∪_w D`, forgetting the cone point; the carrier of the attaching map.
    pub fn underlying_complex(&self) -> TwoComplex {
        let mut c = TwoComplex::new(self.gamma.clone());
        c.add_cell("D", self.relator.0.clone());
        c
    }

    /// Finds the alignment under which `images` spells `w^n`; the rotation is
    /// the least one modulo `n|w|`.
    pub fn align(&self, images: &[Dart]) -> Option<CellAlignment> {
        let big = self.relator_power();
        let len = big.len();
        if images.len() != len {
            return None;
        }
        let q = big.letters();
        for orientation in [Orientation::Positive, Orientation::Negative] {
            for rotation in 0..len {
                let a = CellAlignment::new(0, rotation, orientation);
                if (0..len).all(|i| images[i] == a.image_dart(i, q)) {
                    return Some(a);
                }
            }
        }
        None
    }
}

/// A morphism `Y → X`: graph map into `Γ` plus, per 2-cell, the alignment
/// with `w^n` (target cell index is always 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbiMorphism {
    pub source: Arc<TwoComplex>,
    pub target: Arc<OneRelatorOrbicomplex>,
    pub vertex_map: Vec<usize>,
    pub dart_map: Vec<Dart>,
    pub cell_map: Vec<CellAlignment>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbiCheck {
    /// One of not_morphism, morphism or immersion.
    pub kind: MapKind,
    pub witness: Option<Witness>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AuditError {
    #[error("not an immersion: {0}")]
    NotImmersion(String),
    #[error("source is reducible: edge {edge} is a free face")]
    Reducible { edge: usize },
    #[error("source has a cell-free tree component at vertex {vertex}")]
    TreeComponent { vertex: usize },
}

impl OrbiMorphism {
    /// Builds the morphism from its graph data, deriving every cell
    /// alignment. Fails with the first cell that does not spell `w^n`.
    pub fn from_graph_map(
        source: Arc<TwoComplex>,
        target: Arc<OneRelatorOrbicomplex>,
        vertex_map: Vec<usize>,
        dart_map: Vec<Dart>,
    ) -> Result<Self, Witness> {
        let mut cell_map = Vec::with_capacity(source.num_cells());
        for (c, cell) in source.cells().iter().enumerate() {
            if cell.boundary.iter().any(|d| d.index() >= dart_map.len()) {
                return Err(Witness::WrongTableSize);
            }
            let images: Vec<Dart> = cell.boundary.iter().map(|d| dart_map[d.index()]).collect();
            match target.align(&images) {
                Some(a) => cell_map.push(a),
                None => {
                    return Err(Witness::CellBoundaryMismatch {
                        cell: c,
                        position: 0,
                    })
                }
            }
        }
        Ok(OrbiMorphism {
            source,
            target,
            vertex_map,
            dart_map,
            cell_map,
        })
    }

    /// Labels-driven constructor for a complex whose edges carry `Γ` labels.
    pub fn from_labels(
        source: Arc<TwoComplex>,
        target: Arc<OneRelatorOrbicomplex>,
    ) -> Result<Self, String> {
        let gamma = target.gamma();
        let mut dart_map = Vec::with_capacity(source.graph.num_darts());
        for d in source.graph.darts() {
            let label = source
                .graph
                .dart_label(d)
                .ok_or_else(|| format!("edge {} has no label", source.graph.edge(d.edge()).name))?;
            let e = gamma
                .find_edge(&label.symbol)
                .ok_or_else(|| format!("label {} is not an edge of the group graph", label.symbol))?;
            dart_map.push(Dart::new(e, label.inverted));
        }
        let mut vertex_map = vec![usize::MAX; source.num_vertices()];
        for d in source.graph.darts() {
            vertex_map[source.graph.origin(d)] = gamma.origin(dart_map[d.index()]);
        }
        for v in vertex_map.iter_mut() {
            if *v == usize::MAX {
                if gamma.num_vertices() == 1 {
                    *v = 0;
                } else {
                    return Err("isolated vertex has no image in a non-rose graph".into());
                }
            }
        }
        Self::from_graph_map(source, target, vertex_map, dart_map).map_err(|w| w.to_string())
    }

    pub fn map_dart(&self, d: Dart) -> Dart {
        self.dart_map[d.index()]
    }

    /// Side of `D_n` (a position along `w`) covered by position `p` of `cell`.
    pub fn side(&self, cell: usize, p: usize) -> usize {
        let big = self.target.relator_len() * self.target.branch();
        self.cell_map[cell].target_position(p, big) % self.target.relator_len()
    }

    pub fn structure_witness(&self) -> Option<Witness> {
        let (s, x) = (&*self.source, &*self.target);
        let gamma = x.gamma();
        if self.vertex_map.len() != s.num_vertices()
            || self.dart_map.len() != s.graph.num_darts()
            || self.cell_map.len() != s.num_cells()
        {
            return Some(Witness::WrongTableSize);
        }
        if let Some(v) = self.vertex_map.iter().position(|&v| v >= gamma.num_vertices()) {
            return Some(Witness::VertexOutOfRange { vertex: v });
        }
        for d in s.graph.darts() {
            let img = self.map_dart(d);
            if img.index() >= gamma.num_darts() {
                return Some(Witness::DartOutOfRange { dart: d });
            }
            if self.map_dart(d.reverse()) != img.reverse() {
                return Some(Witness::InvolutionBroken { dart: d });
            }
            if self.vertex_map[s.graph.origin(d)] != gamma.origin(img) {
                return Some(Witness::OriginMismatch { dart: d });
            }
        }
        let big = x.relator_power();
        for (c, a) in self.cell_map.iter().enumerate() {
            let p = &s.cell(c).boundary;
            if a.cell != 0 {
                return Some(Witness::CellOutOfRange { cell: c });
            }
            if p.len() != big.len() {
                return Some(Witness::CellLengthMismatch { cell: c });
            }
            for (i, &d) in p.iter().enumerate() {
                if self.map_dart(d) != a.image_dart(i, big.letters()) {
                    return Some(Witness::CellBoundaryMismatch {
                        cell: c,
                        position: i,
                    });
                }
            }
        }
        None
    }

    /// Immersion iff the graph map is locally injective and, at every edge,
    /// the incident cell sides land on distinct sides of `D_n`.
    pub fn check(&self) -> OrbiCheck {
        if let Some(w) = self.structure_witness() {
            return OrbiCheck {
                kind: MapKind::NotMorphism,
                witness: Some(w),
            };
        }
        let s = &*self.source;
        for (v, link) in s.graph.links().iter().enumerate() {
            for (i, &d1) in link.iter().enumerate() {
                for &d2 in &link[i + 1..] {
                    if self.map_dart(d1) == self.map_dart(d2) {
                        return OrbiCheck {
                            kind: MapKind::Morphism,
                            witness: Some(Witness::LinkCollision {
                                vertex: v,
                                darts: (d1, d2),
                            }),
                        };
                    }
                }
            }
        }
        for (e, sides) in s.sides().iter().enumerate() {
            for (i, &(c1, p1)) in sides.iter().enumerate() {
                for &(c2, p2) in &sides[i + 1..] {
                    if self.side(c1, p1) == self.side(c2, p2) {
                        return OrbiCheck {
                            kind: MapKind::Morphism,
                            witness: Some(Witness::SideCollision {
                                edge: e,
                                sides: ((c1, p1), (c2, p2)),
                            }),
                        };
                    }
                }
            }
        }
        OrbiCheck {
            kind: MapKind::Immersion,
            witness: None,
        }
    }

    pub fn is_immersion(&self) -> bool {
        self.check().kind == MapKind::Immersion
    }

    /// Local bijectivity away from the cone point: every vertex link and
    /// every edge's side set maps onto the corresponding target set.
    pub fn covering_witness(&self) -> Option<Witness> {
        let check = self.check();
        if check.kind != MapKind::Immersion {
            return check.witness;
        }
        let s = &*self.source;
        let gamma = self.target.gamma();
        let target_links = gamma.links();
        for (v, link) in s.graph.links().iter().enumerate() {
            if link.len() != target_links[self.vertex_map[v]].len() {
                return Some(Witness::LinkNotSurjective { vertex: v });
            }
        }
        let w = self.target.relator().letters();
        for (e, sides) in s.sides().iter().enumerate() {
            let image = self.map_dart(Dart::forward(e)).edge();
            let target_sides = w.iter().filter(|d| d.edge() == image).count();
            if sides.len() != target_sides {
                return Some(Witness::SideNotSurjective { edge: e });
            }
        }
        None
    }

    /// `n · |cells|`: every cell covers each generic point of `D_n` `n` times.
    pub fn degree(&self) -> Result<usize, AuditError> {
        let check = self.check();
        if check.kind != MapKind::Immersion {
            return Err(AuditError::NotImmersion(
                check.witness.map(|w| w.to_string()).unwrap_or_default(),
            ));
        }
        Ok(self.target.branch() * self.source.num_cells())
    }

    /// Recomputes every cell alignment from the dart images.
    pub fn realigned(&self) -> Option<OrbiMorphism> {
        OrbiMorphism::from_graph_map(
            self.source.clone(),
            self.target.clone(),
            self.vertex_map.clone(),
            self.dart_map.clone(),
        )
        .ok()
    }
}

/// w-cycles and two-cell bound figures for one immersion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub chi1: i64,
    pub deg: i64,
    pub slack1: i64,
    pub chi2: i64,
    pub cells: i64,
    pub slack2: i64,
    /// Non-tree edge count of the 1-skeleton, bounding the rank of π₁.
    pub generators: i64,
    /// `cells · (n − 1) ≤ generators − 1` (vacuous for `n = 1`).
    pub generator_bound_holds: bool,
    pub pass: bool,
}

impl AuditReport {
    /// Computes the figures for an immersion without checking irreducibility.
    pub fn measure(m: &OrbiMorphism) -> Result<AuditReport, AuditError> {
        let deg = m.degree()? as i64;
        let y = &*m.source;
        let n = m.target.branch() as i64;
        let chi1 = y.chi1();
        let chi2 = y.chi2();
        let cells = y.num_cells() as i64;
        let slack1 = chi1 + deg;
        let slack2 = chi2 + (n - 1) * cells;
        let generators = y.graph.cycle_rank() as i64;
        let generator_bound_holds = n == 1 || y.num_vertices() == 0 || cells * (n - 1) <= generators - 1;
        Ok(AuditReport {
            chi1,
            deg,
            slack1,
            chi2,
            cells,
            slack2,
            generators,
            generator_bound_holds,
            pass: slack1 <= 0 && slack2 <= 0,
        })
    }

    pub fn csv_header() -> &'static str {
        "id,chi1,deg,slack1,chi2,cells,slack2,pass"
    }

    pub fn csv_row(&self, id: &str) -> String {
        format!(
            "{id},{},{},{},{},{},{},{}",
            self.chi1, self.deg, self.slack1, self.chi2, self.cells, self.slack2, self.pass
        )
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "chi1={} deg={} slack1={} chi2={} cells={} slack2={} pass={}",
            self.chi1, self.deg, self.slack1, self.chi2, self.cells, self.slack2, self.pass
        )
    }
}

/// Audits `χ(Y⁽¹⁾) + deg f ≤ 0` and `χ(Y) + (n−1)|cells| ≤ 0`.
///
/// Requires an immersion from an irreducible source. Cell-free tree
/// components are rejected too: a tree has `χ = 1` and no cells, so no
/// inequality of this shape can hold for it.
pub fn wcycles_audit(m: &OrbiMorphism) -> Result<AuditReport, AuditError> {
    let check = m.check();
    if check.kind != MapKind::Immersion {
        return Err(AuditError::NotImmersion(
            check.witness.map(|w| w.to_string()).unwrap_or_default(),
        ));
    }
    let y = &*m.source;
    if let Some(face) = y.free_faces_and_edges().faces.first() {
        return Err(AuditError::Reducible { edge: face.edge });
    }
    if let Some(vertex) = tree_component(y) {
        return Err(AuditError::TreeComponent { vertex });
    }
    AuditReport::measure(m)
}

/// First vertex of a component that is a tree carrying no 2-cells.
pub fn tree_component(y: &TwoComplex) -> Option<usize> {
    let (count, comp) = y.graph.components();
    let mut vertices = vec![0usize; count];
    let mut edges = vec![0usize; count];
    let mut has_cells = vec![false; count];
    for &c in &comp {
        vertices[c] += 1;
    }
    for e in y.graph.edges() {
        edges[comp[e.origin]] += 1;
    }
    for cell in y.cells() {
        if let Some(d) = cell.boundary.first() {
            has_cells[comp[y.graph.origin(*d)]] = true;
        }
    }
    (0..count)
        .find(|&c| !has_cells[c] && edges[c] + 1 == vertices[c])
        .map(|c| comp.iter().position(|&x| x == c).unwrap())
}

/// `X′ → X`: the presentation complex mapped onto the orbicomplex.
pub fn presentation_morphism(x: &Arc<OneRelatorOrbicomplex>) -> OrbiMorphism {
    let xp = Arc::new(x.presentation_complex());
    OrbiMorphism::from_graph_map(
        xp.clone(),
        x.clone(),
        (0..xp.num_vertices()).collect(),
        xp.graph.darts().collect(),
    )
    .expect("presentation complex spells w^n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Graph;

    pub(crate) fn orbi(w: &str, n: usize) -> Arc<OneRelatorOrbicomplex> {
        let g = Graph::rose(&["a", "b"]);
        let w = Word::parse(w, &g).unwrap();
        Arc::new(OneRelatorOrbicomplex::new(g, w, n).unwrap())
    }

    #[test]
    fn build_examples() {
        orbi("a b", 2);
        let g = Graph::rose(&["a", "b"]);
        let aa = Word::parse("a a", &g).unwrap();
        assert_eq!(
            OneRelatorOrbicomplex::new(g.clone(), aa, 2),
            Err(OrbiError::ProperPower { exponent: 2 })
        );
        let x = orbi("a b a b~", 3);
        assert_eq!(x.relator_len(), 4);
        let back = Word::parse("a a~ b", &g).unwrap();
        assert_eq!(
            OneRelatorOrbicomplex::new(g.clone(), back, 2),
            Err(OrbiError::Backtracking(0))
        );
        let seam = Word::parse("a b a~", &g).unwrap();
        assert_eq!(
            OneRelatorOrbicomplex::new(g, seam, 2),
            Err(OrbiError::Backtracking(2))
        );
    }

    #[test]
    fn presentation_complex_is_not_an_immersion() {
        let x = orbi("a b", 2);
        let m = presentation_morphism(&x);
        let check = m.check();
        assert_eq!(check.kind, MapKind::Morphism);
        // positions 0 and 2 both traverse a and both land on side 0
        assert_eq!(
            check.witness,
            Some(Witness::SideCollision {
                edge: 0,
                sides: ((0, 0), (0, 2))
            })
        );
        assert!(matches!(wcycles_audit(&m), Err(AuditError::NotImmersion(_))));
    }

    #[test]
    fn cell_free_rose_audit() {
        let x = orbi("a b", 2);
        let y = Arc::new(TwoComplex::new(Graph::rose(&["a", "b"])));
        let m = OrbiMorphism::from_graph_map(y, x, vec![0], (0..4).map(Dart).collect()).unwrap();
        assert_eq!(m.degree().unwrap(), 0);
        let r = wcycles_audit(&m).unwrap();
        assert_eq!((r.chi1, r.deg, r.slack1, r.pass), (-1, 0, -1, true));
    }

    #[test]
    fn single_vertex_is_rejected_as_tree() {
        let x = orbi("a b", 2);
        let mut g = Graph::new();
        g.add_vertex("p");
        let m = OrbiMorphism::from_graph_map(Arc::new(TwoComplex::new(g)), x, vec![0], vec![])
            .unwrap();
        assert_eq!(wcycles_audit(&m), Err(AuditError::TreeComponent { vertex: 0 }));
    }

    #[test]
    fn non_spelling_cell_is_rejected() {
        let x = orbi("a b", 2);
        let mut y = TwoComplex::new(Graph::rose(&["a", "b"]));
        y.add_cell("c", vec![Dart(0), Dart(0), Dart(2), Dart(2)]);
        let r = OrbiMorphism::from_graph_map(Arc::new(y), x, vec![0], (0..4).map(Dart).collect());
        assert!(matches!(r, Err(Witness::CellBoundaryMismatch { cell: 0, .. })));
    }
}
