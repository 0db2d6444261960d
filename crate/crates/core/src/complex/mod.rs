//! Graphs, combinatorial 2-complexes and their Euler characteristics.
//!
//! Edges are stored as dart pairs: edge `e` owns darts `2e` (forward) and
//! `2e + 1` (backward), so the involution is `d ^ 1` and is fixed-point free
//! by construction. A 2-cell is a cyclic sequence of darts forming a closed
//! edge path.

mod collapse;
mod morphism;

pub use collapse::{Collapse, CollapseMode, CollapseStep};
pub use morphism::{
    CellAlignment, CellMorphism, Classification, MapKind, MorphismError, Orientation, Witness,
};

use std::collections::VecDeque;
use std::fmt;

/// Half-edge. `Dart(2e)` traverses edge `e` forwards, `Dart(2e + 1)` backwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dart(pub u32);

impl Dart {
    #[inline]
    pub fn new(edge: usize, reversed: bool) -> Self {
        Dart((edge as u32) << 1 | reversed as u32)
    }

    #[inline]
    pub fn forward(edge: usize) -> Self {
        Dart::new(edge, false)
    }

    #[inline]
    pub fn edge(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub fn is_reversed(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn reverse(self) -> Self {
        Dart(self.0 ^ 1)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Dart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.edge(), if self.is_reversed() { "~" } else { "" })
    }
}

/// Label of the forward dart of an edge, naming a petal of a fixed rose.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Label {
    pub symbol: String,
    pub inverted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub origin: usize,
    pub terminus: usize,
    pub label: Option<Label>,
}

/// Finite graph with named vertices and edges.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    vertex_names: Vec<String>,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// The rose with one vertex `v` and one loop per symbol.
    pub fn rose<S: AsRef<str>>(symbols: &[S]) -> Self {
        let mut g = Graph::new();
        let v = g.add_vertex("v");
        for s in symbols {
            g.add_edge(s.as_ref(), v, v, None);
        }
        g
    }

    pub fn add_vertex(&mut self, name: impl Into<String>) -> usize {
        self.vertex_names.push(name.into());
        self.vertex_names.len() - 1
    }

    pub fn add_edge(
        &mut self,
        name: impl Into<String>,
        origin: usize,
        terminus: usize,
        label: Option<Label>,
    ) -> usize {
        self.edges.push(Edge {
            name: name.into(),
            origin,
            terminus,
            label,
        });
        self.edges.len() - 1
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_darts(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn darts(&self) -> impl Iterator<Item = Dart> {
        (0..self.num_darts() as u32).map(Dart)
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertex_names[v]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn set_label(&mut self, e: usize, label: Option<Label>) {
        self.edges[e].label = label;
    }

    #[inline]
    pub fn origin(&self, d: Dart) -> usize {
        let e = &self.edges[d.edge()];
        if d.is_reversed() {
            e.terminus
        } else {
            e.origin
        }
    }

    #[inline]
    pub fn terminus(&self, d: Dart) -> usize {
        self.origin(d.reverse())
    }

    /// Label of a dart; the reverse dart carries the inverse symbol.
    pub fn dart_label(&self, d: Dart) -> Option<Label> {
        self.edges[d.edge()].label.as_ref().map(|l| Label {
            symbol: l.symbol.clone(),
            inverted: l.inverted ^ d.is_reversed(),
        })
    }

    /// Darts originating at each vertex, in dart order.
    pub fn links(&self) -> Vec<Vec<Dart>> {
        let mut links = vec![Vec::new(); self.num_vertices()];
        for d in self.darts() {
            links[self.origin(d)].push(d);
        }
        links
    }

    pub fn find_vertex(&self, name: &str) -> Option<usize> {
        self.vertex_names.iter().position(|n| n == name)
    }

    pub fn find_edge(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.name == name)
    }

    /// Connected component index per vertex, numbered in order of first vertex.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let links = self.links();
        let mut comp = vec![usize::MAX; self.num_vertices()];
        let mut count = 0;
        for start in 0..self.num_vertices() {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = count;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &d in &links[v] {
                    let u = self.terminus(d);
                    if comp[u] == usize::MAX {
                        comp[u] = count;
                        queue.push_back(u);
                    }
                }
            }
            count += 1;
        }
        (count, comp)
    }

    /// Number of edges outside a maximal forest: `|E| - |V| + #components`.
    /// Bounds the rank of the fundamental group of any complex on this graph.
    pub fn cycle_rank(&self) -> usize {
        let (c, _) = self.components();
        self.num_edges() + c - self.num_vertices()
    }

    pub fn is_rose(&self) -> bool {
        self.num_vertices() == 1
    }

    /// Breadth-first spanning tree from `root`: for every reached vertex the
    /// dart by which it was first entered (`None` for the root), plus the set of
    /// tree edges. Exploration follows dart order.
    pub fn spanning_tree(&self, root: usize) -> SpanningTree {
        let links = self.links();
        let mut parent = vec![None; self.num_vertices()];
        let mut reached = vec![false; self.num_vertices()];
        let mut tree_edge = vec![false; self.num_edges()];
        let mut order = vec![root];
        reached[root] = true;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &d in &links[v] {
                let u = self.terminus(d);
                if !reached[u] {
                    reached[u] = true;
                    parent[u] = Some(d);
                    tree_edge[d.edge()] = true;
                    order.push(u);
                }
            }
        }
        SpanningTree {
            root,
            parent,
            reached,
            tree_edge,
        }
    }
}

/// Breadth-first spanning tree of one component.
#[derive(Clone, Debug)]
pub struct SpanningTree {
    pub root: usize,
    pub parent: Vec<Option<Dart>>,
    pub reached: Vec<bool>,
    pub tree_edge: Vec<bool>,
}

impl SpanningTree {
    /// Dart path from the root to `v` inside the tree.
    pub fn path_from_root(&self, graph: &Graph, mut v: usize) -> Vec<Dart> {
        let mut path = Vec::new();
        while let Some(d) = self.parent[v] {
            path.push(d);
            v = graph.origin(d);
        }
        path.reverse();
        path
    }

    /// Non-tree edges of the reached component, in edge order.
    pub fn generators(&self, graph: &Graph) -> Vec<usize> {
        (0..graph.num_edges())
            .filter(|&e| !self.tree_edge[e] && self.reached[graph.edge(e).origin])
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub name: String,
    pub boundary: Vec<Dart>,
}

/// A graph with 2-cells attached along closed dart paths.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TwoComplex {
    pub graph: Graph,
    cells: Vec<Cell>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dim {
    One,
    Two,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EdgeEndpointOutOfRange { edge: usize },
    EmptyCell { cell: usize },
    DartOutOfRange { cell: usize, position: usize },
    NonClosedAttachingPath { cell: usize, position: usize },
    DuplicateName { kind: &'static str, name: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EdgeEndpointOutOfRange { edge } => {
                write!(f, "edge {edge} has an endpoint outside the vertex set")
            }
            Violation::EmptyCell { cell } => write!(f, "cell {cell} has an empty attaching path"),
            Violation::DartOutOfRange { cell, position } => {
                write!(f, "cell {cell} position {position} names a missing edge")
            }
            Violation::NonClosedAttachingPath { cell, position } => write!(
                f,
                "non-closed attaching path: cell {cell} breaks after position {position}"
            ),
            Violation::DuplicateName { kind, name } => write!(f, "duplicate {kind} name {name}"),
        }
    }
}

/// An edge traversed exactly once by the attaching maps, with the traversal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FreeFace {
    pub edge: usize,
    pub cell: usize,
    pub position: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeCells {
    pub faces: Vec<FreeFace>,
    pub edges: Vec<usize>,
}

impl TwoComplex {
    pub fn new(graph: Graph) -> Self {
        TwoComplex {
            graph,
            cells: Vec::new(),
        }
    }

    pub fn add_cell(&mut self, name: impl Into<String>, boundary: Vec<Dart>) -> usize {
        self.cells.push(Cell {
            name: name.into(),
            boundary,
        });
        self.cells.len() - 1
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, c: usize) -> &Cell {
        &self.cells[c]
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn num_edges(&self) -> usize {
        self.graph.num_edges()
    }

    /// Every violated structural invariant; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let nv = self.num_vertices();
        for (i, e) in self.graph.edges.iter().enumerate() {
            if e.origin >= nv || e.terminus >= nv {
                out.push(Violation::EdgeEndpointOutOfRange { edge: i });
            }
        }
        duplicates("vertex", self.graph.vertex_names.iter(), &mut out);
        duplicates("edge", self.graph.edges.iter().map(|e| &e.name), &mut out);
        duplicates("cell", self.cells.iter().map(|c| &c.name), &mut out);
        if !out.is_empty() {
            return out;
        }
        for (c, cell) in self.cells.iter().enumerate() {
            let len = cell.boundary.len();
            if len == 0 {
                out.push(Violation::EmptyCell { cell: c });
                continue;
            }
            if let Some(p) = cell
                .boundary
                .iter()
                .position(|d| d.edge() >= self.num_edges())
            {
                out.push(Violation::DartOutOfRange {
                    cell: c,
                    position: p,
                });
                continue;
            }
            for i in 0..len {
                let here = cell.boundary[i];
                let next = cell.boundary[(i + 1) % len];
                if self.graph.terminus(here) != self.graph.origin(next) {
                    out.push(Violation::NonClosedAttachingPath {
                        cell: c,
                        position: i,
                    });
                    break;
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn euler_characteristic(&self, dim: Dim) -> i64 {
        let chi1 = self.num_vertices() as i64 - self.num_edges() as i64;
        match dim {
            Dim::One => chi1,
            Dim::Two => chi1 + self.num_cells() as i64,
        }
    }

    pub fn chi1(&self) -> i64 {
        self.euler_characteristic(Dim::One)
    }

    pub fn chi2(&self) -> i64 {
        self.euler_characteristic(Dim::Two)
    }

    /// How many times the attaching maps traverse each edge, in either direction.
    pub fn traversal_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_edges()];
        for cell in &self.cells {
            for d in &cell.boundary {
                counts[d.edge()] += 1;
            }
        }
        counts
    }

    /// Sides `(cell, position)` at each edge, ordered by cell then position.
    pub fn sides(&self) -> Vec<Vec<(usize, usize)>> {
        let mut sides = vec![Vec::new(); self.num_edges()];
        for (c, cell) in self.cells.iter().enumerate() {
            for (p, d) in cell.boundary.iter().enumerate() {
                sides[d.edge()].push((c, p));
            }
        }
        sides
    }

    pub fn free_faces_and_edges(&self) -> FreeCells {
        let counts = self.traversal_counts();
        let sides = self.sides();
        let mut out = FreeCells::default();
        for (e, &n) in counts.iter().enumerate() {
            match n {
                0 => out.edges.push(e),
                1 => {
                    let (cell, position) = sides[e][0];
                    out.faces.push(FreeFace {
                        edge: e,
                        cell,
                        position,
                    });
                }
                _ => {}
            }
        }
        out
    }

    pub fn is_irreducible(&self) -> bool {
        self.traversal_counts().iter().all(|&n| n != 1)
    }

    pub fn free_edge_count(&self) -> usize {
        self.traversal_counts().iter().filter(|&&n| n == 0).count()
    }

    pub fn collapse(&self, mode: CollapseMode) -> Collapse {
        collapse::collapse(self, mode)
    }

    /// Subcomplex spanned by the given vertices, edges and cells; returns the
    /// complex and the old-to-new index maps.
    pub fn restrict(
        &self,
        keep_vertex: &[bool],
        keep_edge: &[bool],
        keep_cell: &[bool],
    ) -> (TwoComplex, Vec<Option<usize>>, Vec<Option<usize>>, Vec<Option<usize>>) {
        let mut graph = Graph::new();
        let mut vmap = vec![None; self.num_vertices()];
        for v in 0..self.num_vertices() {
            if keep_vertex[v] {
                vmap[v] = Some(graph.add_vertex(self.graph.vertex_name(v)));
            }
        }
        let mut emap = vec![None; self.num_edges()];
        for (e, edge) in self.graph.edges.iter().enumerate() {
            if keep_edge[e] {
                let o = vmap[edge.origin].expect("kept edge has kept origin");
                let t = vmap[edge.terminus].expect("kept edge has kept terminus");
                emap[e] = Some(graph.add_edge(edge.name.clone(), o, t, edge.label.clone()));
            }
        }
        let mut out = TwoComplex::new(graph);
        let mut cmap = vec![None; self.num_cells()];
        for (c, cell) in self.cells.iter().enumerate() {
            if keep_cell[c] {
                let boundary = cell
                    .boundary
                    .iter()
                    .map(|d| Dart::new(emap[d.edge()].expect("kept cell on kept edge"), d.is_reversed()))
                    .collect();
                cmap[c] = Some(out.add_cell(cell.name.clone(), boundary));
            }
        }
        (out, vmap, emap, cmap)
    }

    /// Disjoint union; the second summand's vertices, edges and cells are
    /// shifted and renamed with `prefix`.
    pub fn disjoint_union(&self, other: &TwoComplex, prefix: &str) -> TwoComplex {
        let mut out = self.clone();
        let nv = self.num_vertices();
        let ne = self.num_edges();
        for v in 0..other.num_vertices() {
            out.graph
                .add_vertex(format!("{prefix}{}", other.graph.vertex_name(v)));
        }
        for e in &other.graph.edges {
            out.graph.add_edge(
                format!("{prefix}{}", e.name),
                e.origin + nv,
                e.terminus + nv,
                e.label.clone(),
            );
        }
        for c in &other.cells {
            let boundary = c
                .boundary
                .iter()
                .map(|d| Dart::new(d.edge() + ne, d.is_reversed()))
                .collect();
            out.add_cell(format!("{prefix}{}", c.name), boundary);
        }
        out
    }
}

fn duplicates<'a>(
    kind: &'static str,
    names: impl Iterator<Item = &'a String>,
    out: &mut Vec<Violation>,
) {
    let mut seen = std::collections::HashSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            out.push(Violation::DuplicateName {
                kind,
                name: n.clone(),
            });
        }
    }
}

/// Cyclic rotation `path[k..] ++ path[..k]`.
pub fn rotate<T: Clone>(path: &[T], k: usize) -> Vec<T> {
    if path.is_empty() {
        return Vec::new();
    }
    let k = k % path.len();
    path[k..].iter().chain(&path[..k]).cloned().collect()
}

/// The same closed path traversed backwards.
pub fn reverse_path(path: &[Dart]) -> Vec<Dart> {
    path.iter().rev().map(|d| d.reverse()).collect()
}
