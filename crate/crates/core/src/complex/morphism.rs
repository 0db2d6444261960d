use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::{Dart, TwoComplex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    pub fn then(self, other: Orientation) -> Orientation {
        if self == other {
            Orientation::Positive
        } else {
            Orientation::Negative
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Orientation::Positive => '+',
            Orientation::Negative => '-',
        }
    }
}

/// Where a source 2-cell goes: target cell, rotation offset and orientation.
///
/// With orientation `+` source position `i` lands on target position
/// `(i + rotation) mod L`; with `-` it lands on the reversed target boundary,
/// i.e. target position `L - 1 - ((i + rotation) mod L)` traversed backwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellAlignment {
    pub cell: usize,
    pub rotation: usize,
    pub orientation: Orientation,
}

impl CellAlignment {
    pub fn new(cell: usize, rotation: usize, orientation: Orientation) -> Self {
        CellAlignment {
            cell,
            rotation,
            orientation,
        }
    }

    /// Position on the target boundary that source position `i` covers.
    #[inline]
    pub fn target_position(&self, i: usize, len: usize) -> usize {
        let k = (i + self.rotation) % len;
        match self.orientation {
            Orientation::Positive => k,
            Orientation::Negative => len - 1 - k,
        }
    }

    /// Image of the dart at source position `i`, given the target boundary.
    #[inline]
    pub fn image_dart(&self, i: usize, target_boundary: &[Dart]) -> Dart {
        let d = target_boundary[self.target_position(i, target_boundary.len())];
        match self.orientation {
            Orientation::Positive => d,
            Orientation::Negative => d.reverse(),
        }
    }

    fn affine(&self, len: usize) -> (Orientation, usize) {
        match self.orientation {
            Orientation::Positive => (Orientation::Positive, self.rotation % len),
            Orientation::Negative => (
                Orientation::Negative,
                (len - 1 + len - self.rotation % len) % len,
            ),
        }
    }

    fn from_affine(cell: usize, o: Orientation, shift: usize, len: usize) -> Self {
        let rotation = match o {
            Orientation::Positive => shift % len,
            Orientation::Negative => (len - 1 + len - shift % len) % len,
        };
        CellAlignment::new(cell, rotation, o)
    }

    /// `self` followed by `then`, both on cells of boundary length `len`.
    pub fn then(&self, then: &CellAlignment, len: usize) -> CellAlignment {
        let (s1, c1) = self.affine(len);
        let (s2, c2) = then.affine(len);
        let shift = match s2 {
            Orientation::Positive => (c1 + c2) % len,
            Orientation::Negative => (c2 + len - c1) % len,
        };
        CellAlignment::from_affine(then.cell, s1.then(s2), shift, len)
    }

    /// The inverse position map, landing on `source_cell`.
    pub fn inverse(&self, source_cell: usize, len: usize) -> CellAlignment {
        let (s, c) = self.affine(len);
        let shift = match s {
            Orientation::Positive => (len - c) % len,
            Orientation::Negative => c,
        };
        CellAlignment::from_affine(source_cell, s, shift, len)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MapKind {
    NotMorphism,
    Morphism,
    Immersion,
    Covering,
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapKind::NotMorphism => "not_morphism",
            MapKind::Morphism => "morphism",
            MapKind::Immersion => "immersion",
            MapKind::Covering => "covering",
        })
    }
}

/// Why a map failed to reach the next rung of the classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    WrongTableSize,
    VertexOutOfRange { vertex: usize },
    DartOutOfRange { dart: Dart },
    CellOutOfRange { cell: usize },
    InvolutionBroken { dart: Dart },
    OriginMismatch { dart: Dart },
    CellLengthMismatch { cell: usize },
    CellBoundaryMismatch { cell: usize, position: usize },
    LinkCollision { vertex: usize, darts: (Dart, Dart) },
    SideCollision { edge: usize, sides: ((usize, usize), (usize, usize)) },
    LinkNotSurjective { vertex: usize },
    SideNotSurjective { edge: usize },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::WrongTableSize => write!(f, "map tables do not match the source size"),
            Witness::VertexOutOfRange { vertex } => write!(f, "vertex {vertex} maps outside target"),
            Witness::DartOutOfRange { dart } => write!(f, "dart {dart} maps outside target"),
            Witness::CellOutOfRange { cell } => write!(f, "cell {cell} maps outside target"),
            Witness::InvolutionBroken { dart } => {
                write!(f, "dart {dart} and its reverse have non-reverse images")
            }
            Witness::OriginMismatch { dart } => write!(f, "dart {dart} image starts elsewhere"),
            Witness::CellLengthMismatch { cell } => {
                write!(f, "cell {cell} has a different boundary length than its image")
            }
            Witness::CellBoundaryMismatch { cell, position } => {
                write!(f, "cell {cell} boundary disagrees with its image at {position}")
            }
            Witness::LinkCollision { vertex, darts } => write!(
                f,
                "darts {} and {} at vertex {vertex} have equal images",
                darts.0, darts.1
            ),
            Witness::SideCollision { edge, sides } => write!(
                f,
                "sides ({}, {}) and ({}, {}) at edge {edge} have equal images",
                sides.0 .0, sides.0 .1, sides.1 .0, sides.1 .1
            ),
            Witness::LinkNotSurjective { vertex } => {
                write!(f, "link of vertex {vertex} misses target darts")
            }
            Witness::SideNotSurjective { edge } => write!(f, "sides at edge {edge} miss target sides"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub kind: MapKind,
    /// Reason the next rung was not reached (absent for coverings).
    pub witness: Option<Witness>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MorphismError {
    #[error("maps are not composable: target of the first differs from source of the second")]
    NotComposable,
    #[error("not a morphism: {0}")]
    NotMorphism(Witness),
}

/// A combinatorial map of 2-complexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellMorphism {
    pub source: Arc<TwoComplex>,
    pub target: Arc<TwoComplex>,
    pub vertex_map: Vec<usize>,
    /// Image of every source dart (indexed by `Dart::index`).
    pub dart_map: Vec<Dart>,
    pub cell_map: Vec<CellAlignment>,
}

impl CellMorphism {
    pub fn identity(c: Arc<TwoComplex>) -> Self {
        CellMorphism {
            vertex_map: (0..c.num_vertices()).collect(),
            dart_map: c.graph.darts().collect(),
            cell_map: (0..c.num_cells())
                .map(|i| CellAlignment::new(i, 0, Orientation::Positive))
                .collect(),
            source: c.clone(),
            target: c,
        }
    }

    pub fn map_dart(&self, d: Dart) -> Dart {
        self.dart_map[d.index()]
    }

    pub fn map_path(&self, path: &[Dart]) -> Vec<Dart> {
        path.iter().map(|&d| self.map_dart(d)).collect()
    }

    /// Checks every structure-preservation condition; `None` means morphism.
    pub fn structure_witness(&self) -> Option<Witness> {
        let (s, t) = (&*self.source, &*self.target);
        if self.vertex_map.len() != s.num_vertices()
            || self.dart_map.len() != s.graph.num_darts()
            || self.cell_map.len() != s.num_cells()
        {
            return Some(Witness::WrongTableSize);
        }
        if let Some(v) = self.vertex_map.iter().position(|&v| v >= t.num_vertices()) {
            return Some(Witness::VertexOutOfRange { vertex: v });
        }
        for d in s.graph.darts() {
            let img = self.map_dart(d);
            if img.index() >= t.graph.num_darts() {
                return Some(Witness::DartOutOfRange { dart: d });
            }
            if self.map_dart(d.reverse()) != img.reverse() {
                return Some(Witness::InvolutionBroken { dart: d });
            }
            if self.vertex_map[s.graph.origin(d)] != t.graph.origin(img) {
                return Some(Witness::OriginMismatch { dart: d });
            }
        }
        for (c, align) in self.cell_map.iter().enumerate() {
            if align.cell >= t.num_cells() {
                return Some(Witness::CellOutOfRange { cell: c });
            }
            let p = &s.cell(c).boundary;
            let q = &t.cell(align.cell).boundary;
            if p.len() != q.len() {
                return Some(Witness::CellLengthMismatch { cell: c });
            }
            for (i, &d) in p.iter().enumerate() {
                if self.map_dart(d) != align.image_dart(i, q) {
                    return Some(Witness::CellBoundaryMismatch {
                        cell: c,
                        position: i,
                    });
                }
            }
        }
        None
    }

    pub fn classify(&self) -> Classification {
        if let Some(w) = self.structure_witness() {
            return Classification {
                kind: MapKind::NotMorphism,
                witness: Some(w),
            };
        }
        let (s, t) = (&*self.source, &*self.target);
        let links = s.graph.links();
        for (v, link) in links.iter().enumerate() {
            if let Some(w) = first_collision(link.iter().map(|&d| (d, self.map_dart(d)))) {
                return Classification {
                    kind: MapKind::Morphism,
                    witness: Some(Witness::LinkCollision {
                        vertex: v,
                        darts: w,
                    }),
                };
            }
        }
        let sides = s.sides();
        for (e, at_edge) in sides.iter().enumerate() {
            let images = at_edge.iter().map(|&(c, p)| {
                let a = &self.cell_map[c];
                let len = s.cell(c).boundary.len();
                ((c, p), (a.cell, a.target_position(p, len)))
            });
            if let Some(w) = first_collision(images) {
                return Classification {
                    kind: MapKind::Morphism,
                    witness: Some(Witness::SideCollision { edge: e, sides: w }),
                };
            }
        }
        let target_links = t.graph.links();
        for (v, link) in links.iter().enumerate() {
            if link.len() != target_links[self.vertex_map[v]].len() {
                return Classification {
                    kind: MapKind::Immersion,
                    witness: Some(Witness::LinkNotSurjective { vertex: v }),
                };
            }
        }
        let target_sides = t.sides();
        for (e, at_edge) in sides.iter().enumerate() {
            let image = self.map_dart(super::Dart::forward(e)).edge();
            if at_edge.len() != target_sides[image].len() {
                return Classification {
                    kind: MapKind::Immersion,
                    witness: Some(Witness::SideNotSurjective { edge: e }),
                };
            }
        }
        Classification {
            kind: MapKind::Covering,
            witness: None,
        }
    }

    pub fn is_immersion(&self) -> bool {
        self.classify().kind >= MapKind::Immersion
    }

    /// `self` followed by `then`.
    pub fn then(&self, then: &CellMorphism) -> Result<CellMorphism, MorphismError> {
        if !Arc::ptr_eq(&self.target, &then.source) && *self.target != *then.source {
            return Err(MorphismError::NotComposable);
        }
        let vertex_map = self.vertex_map.iter().map(|&v| then.vertex_map[v]).collect();
        let dart_map = self.dart_map.iter().map(|&d| then.map_dart(d)).collect();
        let cell_map = self
            .cell_map
            .iter()
            .enumerate()
            .map(|(c, a)| {
                let len = self.source.cell(c).boundary.len();
                a.then(&then.cell_map[a.cell], len)
            })
            .collect();
        Ok(CellMorphism {
            source: self.source.clone(),
            target: then.target.clone(),
            vertex_map,
            dart_map,
            cell_map,
        })
    }

    /// Minimum number of source cells over any target cell.
    pub fn degree(&self) -> usize {
        let mut counts = vec![0usize; self.target.num_cells()];
        for a in &self.cell_map {
            counts[a.cell] += 1;
        }
        counts.into_iter().min().unwrap_or(0)
    }
}

fn first_collision<K: Copy, V: Eq + std::hash::Hash + Copy>(
    items: impl Iterator<Item = (K, V)>,
) -> Option<(K, K)> {
    let mut seen: Vec<(K, V)> = Vec::new();
    let mut keys = HashSet::new();
    for (k, v) in items {
        if !keys.insert(v) {
            let (first, _) = seen.iter().find(|(_, w)| *w == v).copied().unwrap();
            return Some((first, k));
        }
        seen.push((k, v));
    }
    None
}
