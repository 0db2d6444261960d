//! Stallings folding of a cellular morphism `A → B` into `A → C ↬ B`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::complex::{
    reverse_path, rotate, CellAlignment, CellMorphism, Dart, Graph, MapKind, Orientation,
    TwoComplex, Witness,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FoldError {
    #[error("input is not a morphism: {0}")]
    NotMorphism(Witness),
    #[error("map to factor through is not an immersion")]
    NotImmersion,
    #[error("square does not commute: {0}")]
    NotCommuting(&'static str),
    #[error("preimages disagree on {0}")]
    Clash(String),
    #[error("folded map is not an immersion: {0:?}")]
    Internal(Option<Witness>),
}

/// One elementary identification, in source (`A`) indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FoldStep {
    Dart(Dart, Dart),
    Cell(usize, usize),
}

impl fmt::Display for FoldStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FoldStep::Dart(a, b) => write!(f, "identify dart {} {}", a.index(), b.index()),
            FoldStep::Cell(a, b) => write!(f, "identify cell {a} {b}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FoldResult {
    pub folded: Arc<TwoComplex>,
    /// `A → C`, surjective on cells of every dimension.
    pub projection: CellMorphism,
    /// `C ↬ B`.
    pub inclusion: CellMorphism,
    pub trace: Vec<FoldStep>,
}

impl FoldResult {
    pub fn trace_text(&self) -> String {
        self.trace.iter().map(|s| format!("{s}\n")).collect()
    }

    /// Projection followed by inclusion; equals the input morphism.
    pub fn composite(&self) -> CellMorphism {
        self.projection
            .then(&self.inclusion)
            .expect("projection lands on the folded complex")
    }
}

struct Work {
    vparent: Vec<usize>,
    eparent: Vec<(usize, bool)>,
}

impl Work {
    fn find_v(&mut self, mut v: usize) -> usize {
        while self.vparent[v] != v {
            self.vparent[v] = self.vparent[self.vparent[v]];
            v = self.vparent[v];
        }
        v
    }

    fn find_e(&mut self, e: usize) -> (usize, bool) {
        let (p, flip) = self.eparent[e];
        if p == e {
            return (e, false);
        }
        let (root, f2) = self.find_e(p);
        self.eparent[e] = (root, flip ^ f2);
        (root, flip ^ f2)
    }

    fn canon(&mut self, d: Dart) -> Dart {
        let (root, flip) = self.find_e(d.edge());
        Dart::new(root, d.is_reversed() ^ flip)
    }

    fn union_v(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find_v(a), self.find_v(b));
        if a != b {
            self.vparent[a.max(b)] = a.min(b);
        }
    }
}

/// Folds `m` until the map to `B` is an immersion, then merges 2-cells with
/// the same image and the same attaching path.
pub fn fold(m: &CellMorphism) -> Result<FoldResult, FoldError> {
    if let Some(w) = m.structure_witness() {
        return Err(FoldError::NotMorphism(w));
    }
    let a = &*m.source;
    let g = &a.graph;
    let mut w = Work {
        vparent: (0..g.num_vertices()).collect(),
        eparent: (0..g.num_edges()).map(|e| (e, false)).collect(),
    };
    let mut trace = Vec::new();

    // two darts from one vertex with one image get glued, lowest ids first
    'restart: loop {
        let mut seen: HashMap<(usize, Dart), Dart> = HashMap::new();
        for d in g.darts() {
            let c = w.canon(d);
            let o = w.find_v(g.origin(c));
            let img = m.map_dart(c);
            match seen.get(&(o, img)) {
                Some(&prev) if prev != c => {
                    let (t1, t2) = (g.terminus(prev), g.terminus(c));
                    w.union_v(t1, t2);
                    let (r1, r2) = (prev.edge().min(c.edge()), prev.edge().max(c.edge()));
                    w.eparent[r2] = (r1, prev.is_reversed() ^ c.is_reversed());
                    trace.push(FoldStep::Dart(prev, c));
                    continue 'restart;
                }
                Some(_) => {}
                None => {
                    seen.insert((o, img), c);
                }
            }
        }
        break;
    }

    // roots are minimum ids, so ascending roots keep the source order
    let mut vindex = vec![usize::MAX; g.num_vertices()];
    let mut cg = Graph::new();
    let mut inc_vertex = Vec::new();
    for v in 0..g.num_vertices() {
        if w.find_v(v) == v {
            vindex[v] = cg.add_vertex(g.vertex_name(v).to_string());
            inc_vertex.push(m.vertex_map[v]);
        }
    }
    let mut eindex = vec![usize::MAX; g.num_edges()];
    let mut inc_dart = Vec::new();
    for e in 0..g.num_edges() {
        if w.find_e(e).0 == e {
            let edge = g.edge(e);
            let o = vindex[w.find_v(edge.origin)];
            let t = vindex[w.find_v(edge.terminus)];
            eindex[e] = cg.add_edge(edge.name.clone(), o, t, edge.label.clone());
            inc_dart.push(m.map_dart(Dart::forward(e)));
            inc_dart.push(m.map_dart(Dart::new(e, true)));
        }
    }
    let mut to_c = |d: Dart| {
        let c = w.canon(d);
        Dart::new(eindex[c.edge()], c.is_reversed())
    };

    let mut c = TwoComplex::new(cg);
    let mut inc_cells = Vec::new();
    let mut proj_cells = Vec::with_capacity(a.num_cells());
    let mut keys: HashMap<(usize, Vec<Dart>), (usize, usize)> = HashMap::new();
    for (ci, cell) in a.cells().iter().enumerate() {
        let al = m.cell_map[ci];
        let len = cell.boundary.len();
        let path: Vec<Dart> = cell.boundary.iter().map(|&d| to_c(d)).collect();
        // rotate so that position 0 covers target position 0, read positively
        let normal = match al.orientation {
            Orientation::Positive => rotate(&path, (len - al.rotation % len) % len),
            Orientation::Negative => rotate(&reverse_path(&path), al.rotation % len),
        };
        let key = (al.cell, normal);
        let k = match keys.get(&key) {
            Some(&(k, first)) => {
                trace.push(FoldStep::Cell(first, ci));
                k
            }
            None => {
                let k = c.add_cell(cell.name.clone(), key.1.clone());
                inc_cells.push(CellAlignment::new(al.cell, 0, Orientation::Positive));
                keys.insert(key, (k, ci));
                k
            }
        };
        proj_cells.push(CellAlignment::new(k, al.rotation % len, al.orientation));
    }
    let c = Arc::new(c);
    let projection = CellMorphism {
        source: m.source.clone(),
        target: c.clone(),
        dart_map: g.darts().map(&mut to_c).collect(),
        vertex_map: (0..g.num_vertices()).map(|v| vindex[w.find_v(v)]).collect(),
        cell_map: proj_cells,
    };
    let inclusion = CellMorphism {
        source: c.clone(),
        target: m.target.clone(),
        vertex_map: inc_vertex,
        dart_map: inc_dart,
        cell_map: inc_cells,
    };
    debug_assert!(projection.structure_witness().is_none());
    let class = inclusion.classify();
    if class.kind < MapKind::Immersion {
        return Err(FoldError::Internal(class.witness));
    }
    Ok(FoldResult {
        folded: c,
        projection,
        inclusion,
        trace,
    })
}

/// The unique `C ↬ D` with `C → D ↬ B` equal to the inclusion and
/// `A → C → D` equal to `lift_of`.
pub fn factor_unique(
    folded: &FoldResult,
    through: &CellMorphism,
    lift_of: &CellMorphism,
) -> Result<CellMorphism, FoldError> {
    if !through.is_immersion() {
        return Err(FoldError::NotImmersion);
    }
    let original = folded.composite();
    let via = lift_of
        .then(through)
        .map_err(|_| FoldError::NotCommuting("lift does not land on the immersion's source"))?;
    if via.vertex_map != original.vertex_map || via.dart_map != original.dart_map {
        return Err(FoldError::NotCommuting("graph maps differ"));
    }
    if via.cell_map != original.cell_map {
        return Err(FoldError::NotCommuting("cell maps differ"));
    }
    let p = &folded.projection;
    let c = &*folded.folded;
    let mut vertex_map = vec![None; c.num_vertices()];
    for (v, &img) in p.vertex_map.iter().enumerate() {
        let want = lift_of.vertex_map[v];
        match vertex_map[img] {
            None => vertex_map[img] = Some(want),
            Some(x) if x != want => return Err(FoldError::Clash(format!("vertex {img}"))),
            _ => {}
        }
    }
    let mut dart_map = vec![None; c.graph.num_darts()];
    for d in p.source.graph.darts() {
        let img = p.map_dart(d);
        let want = lift_of.map_dart(d);
        match dart_map[img.index()] {
            None => dart_map[img.index()] = Some(want),
            Some(x) if x != want => return Err(FoldError::Clash(format!("dart {}", img.index()))),
            _ => {}
        }
    }
    let mut cell_map = vec![None; c.num_cells()];
    for (ci, al) in p.cell_map.iter().enumerate() {
        let len = c.cell(al.cell).boundary.len();
        let want = al.inverse(ci, len).then(&lift_of.cell_map[ci], len);
        match cell_map[al.cell] {
            None => cell_map[al.cell] = Some(want),
            Some(x) if x != want => return Err(FoldError::Clash(format!("cell {}", al.cell))),
            _ => {}
        }
    }
    let out = CellMorphism {
        source: folded.folded.clone(),
        target: through.source.clone(),
        vertex_map: vertex_map.into_iter().map(Option::unwrap).collect(),
        dart_map: dart_map.into_iter().map(Option::unwrap).collect(),
        cell_map: cell_map.into_iter().map(Option::unwrap).collect(),
    };
    if !out.is_immersion() {
        return Err(FoldError::Internal(out.classify().witness));
    }
    Ok(out)
}

/// Isomorphism invariant of an immersion: a breadth-first relabelling from
/// each start vertex, darts visited in the order of their images; minimum
/// over starts, components sorted.
pub fn canonical_form(m: &CellMorphism) -> String {
    let s = &*m.source;
    let g = &s.graph;
    let (count, comp) = g.components();
    let mut parts = Vec::with_capacity(count);
    for k in 0..count {
        let best = (0..g.num_vertices())
            .filter(|&v| comp[v] == k)
            .map(|v| rooted_form(m, v))
            .min()
            .unwrap_or_default();
        parts.push(best);
    }
    parts.sort();
    parts.join("|")
}

/// Canonical form with a fixed base vertex.
pub fn rooted_form(m: &CellMorphism, root: usize) -> String {
    let s = &*m.source;
    let g = &s.graph;
    let links = g.links();
    let mut num = vec![usize::MAX; g.num_vertices()];
    let mut order = Vec::new();
    let mut queue = VecDeque::from([root]);
    num[root] = 0;
    let mut out = String::new();
    while let Some(v) = queue.pop_front() {
        order.push(v);
        let mut darts = links[v].clone();
        darts.sort_by_key(|&d| m.map_dart(d));
        out.push('[');
        for d in darts {
            let t = g.terminus(d);
            if num[t] == usize::MAX {
                num[t] = order.len() + queue.len();
                queue.push_back(t);
            }
            out.push_str(&format!("{}>{},", m.map_dart(d).index(), num[t]));
        }
        out.push(']');
    }
    let mut cells: Vec<String> = Vec::new();
    for (ci, cell) in s.cells().iter().enumerate() {
        if num[g.origin(cell.boundary[0])] == usize::MAX {
            continue;
        }
        let al = m.cell_map[ci];
        let len = cell.boundary.len();
        let mut at = vec![0; len];
        for (i, &d) in cell.boundary.iter().enumerate() {
            let j = al.target_position(i, len);
            at[j] = match al.orientation {
                Orientation::Positive => num[g.origin(d)],
                Orientation::Negative => num[g.terminus(d)],
            };
        }
        cells.push(format!("{}{}{:?}", al.cell, al.orientation.symbol(), at));
    }
    cells.sort();
    format!("{out}{}", cells.join(""))
}
