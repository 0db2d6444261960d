use std::sync::Arc;

use thiserror::Error;

use super::dehn::{dehn_solve, DehnConfig, DehnError, DehnOutcome, RelatorTable};
use super::{free_reduce, Word};
use crate::complex::{Dart, Graph, Label, TwoComplex};
use crate::orbi::{OneRelatorOrbicomplex, OrbiMorphism};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error(transparent)]
    Dehn(#[from] DehnError),
    #[error("word is nontrivial in the group; no diagram exists")]
    Nontrivial,
    #[error("mirror pair at cells {0} and {1} cannot be cancelled")]
    NonCancellable(usize, usize),
    #[error("internal: {0}")]
    Internal(&'static str),
}

/// Disk diagram over `X` whose boundary reads a trivial word.
#[derive(Clone, Debug)]
pub struct VanKampenDiagram {
    pub complex: Arc<TwoComplex>,
    /// Closed boundary path from `base`, spelling `word`.
    pub boundary: Vec<Dart>,
    pub base: usize,
    pub word: Word,
    /// Every 2-cell spells `w^n` under this map.
    pub labeling: OrbiMorphism,
    pub reduced: bool,
}

impl VanKampenDiagram {
    /// Letters read along the boundary path.
    pub fn boundary_word(&self) -> Word {
        Word(self.boundary.iter().map(|&d| self.labeling.map_dart(d)).collect())
    }

    /// A pair of cells meeting across an edge as mirror images, if any.
    pub fn mirror_pair(&self) -> Option<((usize, usize), (usize, usize))> {
        mirror_pair(&self.complex, &self.labeling)
    }
}

fn mirror_pair(c: &TwoComplex, labeling: &OrbiMorphism) -> Option<((usize, usize), (usize, usize))> {
    for sides in c.sides() {
        for (i, &(c1, p1)) in sides.iter().enumerate() {
            for &(c2, p2) in &sides[i + 1..] {
                let d1 = c.cell(c1).boundary[p1];
                let d2 = c.cell(c2).boundary[p2];
                if d1 == d2.reverse()
                    && labeling.cell_map[c1].orientation != labeling.cell_map[c2].orientation
                    && labeling.side(c1, p1) == labeling.side(c2, p2)
                {
                    return Some(((c1, p1), (c2, p2)));
                }
            }
        }
    }
    None
}

/// Union-find scratch complex: vertices and edges are merged in place, edges
/// carry a parity recording whether they were glued reversed.
struct Scratch {
    vparent: Vec<usize>,
    ends: Vec<(usize, usize)>,
    labels: Vec<Dart>,
    eparent: Vec<(usize, bool)>,
    cells: Vec<Option<Vec<Dart>>>,
}

impl Scratch {
    fn new() -> Self {
        Scratch {
            vparent: Vec::new(),
            ends: Vec::new(),
            labels: Vec::new(),
            eparent: Vec::new(),
            cells: Vec::new(),
        }
    }

    fn vertex(&mut self) -> usize {
        self.vparent.push(self.vparent.len());
        self.vparent.len() - 1
    }

    fn edge(&mut self, o: usize, t: usize, label: Dart) -> Dart {
        let e = self.ends.len();
        self.ends.push((o, t));
        self.labels.push(label);
        self.eparent.push((e, false));
        Dart::forward(e)
    }

    fn find_v(&mut self, mut v: usize) -> usize {
        while self.vparent[v] != v {
            self.vparent[v] = self.vparent[self.vparent[v]];
            v = self.vparent[v];
        }
        v
    }

    fn union_v(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find_v(a), self.find_v(b));
        if a != b {
            let (lo, hi) = (a.min(b), a.max(b));
            self.vparent[hi] = lo;
        }
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

    fn label(&self, d: Dart) -> Dart {
        let l = self.labels[d.edge()];
        if d.is_reversed() {
            l.reverse()
        } else {
            l
        }
    }

    fn origin(&mut self, d: Dart) -> usize {
        let (o, t) = self.ends[d.edge()];
        self.find_v(if d.is_reversed() { t } else { o })
    }

    fn terminus(&mut self, d: Dart) -> usize {
        self.origin(d.reverse())
    }

    /// Glues `d1` onto `d2`; both must carry the same label.
    fn identify(&mut self, d1: Dart, d2: Dart) -> Result<(), DiagramError> {
        if self.label(d1) != self.label(d2) {
            return Err(DiagramError::Internal("identified darts with different labels"));
        }
        let (o1, o2) = (self.origin(d1), self.origin(d2));
        let (t1, t2) = (self.terminus(d1), self.terminus(d2));
        self.union_v(o1, o2);
        self.union_v(t1, t2);
        let c1 = self.canon(d1);
        let c2 = self.canon(d2);
        if c1.edge() == c2.edge() {
            return if c1 == c2 {
                Ok(())
            } else {
                Err(DiagramError::Internal("dart glued to its own reverse"))
            };
        }
        let (r1, r2) = (c1.edge().min(c2.edge()), c1.edge().max(c2.edge()));
        let flip = c1.is_reversed() ^ c2.is_reversed();
        self.eparent[r2] = (r1, flip);
        Ok(())
    }

    /// Free reduction of a path by folding each backtrack `d · e` into `d`.
    fn reduce_path(&mut self, path: Vec<Dart>) -> Result<Vec<Dart>, DiagramError> {
        let mut out: Vec<Dart> = Vec::with_capacity(path.len());
        for d in path {
            if let Some(&top) = out.last() {
                if self.label(top) == self.label(d).reverse() {
                    self.identify(top.reverse(), d)?;
                    out.pop();
                    continue;
                }
            }
            out.push(d);
        }
        Ok(out)
    }

    fn live_cells(&mut self) -> Vec<(usize, Vec<Dart>)> {
        let raw: Vec<(usize, Vec<Dart>)> = self
            .cells
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.clone().map(|c| (i, c)))
            .collect();
        raw.into_iter()
            .map(|(i, c)| (i, c.into_iter().map(|d| self.canon(d)).collect()))
            .collect()
    }
}

/// Replays the Dehn reduction of `u` as cell gluings, then cancels mirror
/// pairs until the diagram is reduced. The boundary reads `u` freely reduced.
pub fn build_reduced_diagram(
    u: &Word,
    x: &Arc<OneRelatorOrbicomplex>,
) -> Result<VanKampenDiagram, DiagramError> {
    let reduced_u = free_reduce(u, false);
    let trace = match dehn_solve(&reduced_u, x)? {
        DehnOutcome::Trivial { trace } => trace,
        DehnOutcome::Nontrivial { .. } => return Err(DiagramError::Nontrivial),
    };
    let table = RelatorTable::new(x, DehnConfig::default());
    let mut s = Scratch::new();
    let base = s.vertex();
    let len = reduced_u.len();
    let mut ring = vec![base];
    for _ in 1..len {
        ring.push(s.vertex());
    }
    let boundary: Vec<Dart> = (0..len)
        .map(|i| s.edge(ring[i], ring[(i + 1) % len], reduced_u.0[i]))
        .collect();
    let mut path = boundary.clone();

    for rep in &trace {
        let r = table.rotation(rep.sign, rep.rotation).to_vec();
        let piece = path[rep.position..rep.position + rep.length].to_vec();
        let start = s.origin(piece[0]);
        let end = s.terminus(*piece.last().unwrap());
        // new arc from `end` back to `start` reading the complement of the piece
        let complement = &r[rep.length..];
        let mut arc = Vec::with_capacity(complement.len());
        let mut at = end;
        for (k, &label) in complement.iter().enumerate() {
            let next = if k + 1 == complement.len() {
                start
            } else {
                s.vertex()
            };
            arc.push(s.edge(at, next, label));
            at = next;
        }
        if complement.is_empty() {
            s.union_v(start, end);
        }
        let mut cell = piece;
        cell.extend_from_slice(&arc);
        s.cells.push(Some(cell));
        let mut next_path = path[..rep.position].to_vec();
        next_path.extend(arc.iter().rev().map(|d| d.reverse()));
        next_path.extend_from_slice(&path[rep.position + rep.length..]);
        path = s.reduce_path(next_path)?;
    }
    if !path.is_empty() {
        return Err(DiagramError::Internal("Dehn replay left a nonempty boundary"));
    }

    cancel_mirror_pairs(&mut s, x)?;
    finish(s, x, base, boundary, reduced_u)
}

fn cancel_mirror_pairs(s: &mut Scratch, x: &Arc<OneRelatorOrbicomplex>) -> Result<(), DiagramError> {
    let big = x.relator_len() * x.branch();
    loop {
        let cells = s.live_cells();
        let mut found = None;
        // sides grouped by canonical edge
        let mut by_edge: std::collections::BTreeMap<usize, Vec<(usize, usize, Dart)>> =
            Default::default();
        for (id, boundary) in &cells {
            for (p, &d) in boundary.iter().enumerate() {
                by_edge.entry(d.edge()).or_default().push((*id, p, d));
            }
        }
        let mut aligns = std::collections::HashMap::new();
        for (id, boundary) in &cells {
            let labels: Vec<Dart> = boundary.iter().map(|&d| s.label(d)).collect();
            let a = x
                .align(&labels)
                .ok_or(DiagramError::Internal("diagram cell does not spell w^n"))?;
            aligns.insert(*id, a);
        }
        'search: for sides in by_edge.values() {
            for (i, &(c1, p1, d1)) in sides.iter().enumerate() {
                for &(c2, p2, d2) in &sides[i + 1..] {
                    let (a1, a2) = (aligns[&c1], aligns[&c2]);
                    if d1 == d2.reverse()
                        && a1.orientation != a2.orientation
                        && a1.target_position(p1, big) % x.relator_len()
                            == a2.target_position(p2, big) % x.relator_len()
                    {
                        found = Some((c1, p1, c2, p2));
                        break 'search;
                    }
                }
            }
        }
        let Some((c1, p1, c2, p2)) = found else {
            return Ok(());
        };
        if c1 == c2 {
            return Err(DiagramError::NonCancellable(c1, c2));
        }
        let b1 = s.cells[c1].clone().unwrap();
        let b2 = s.cells[c2].clone().unwrap();
        let n = b1.len();
        for j in 1..n {
            let a = b1[(p1 + n - j) % n];
            let b = b2[(p2 + j) % n];
            if s.label(b) != s.label(a).reverse() {
                return Err(DiagramError::NonCancellable(c1, c2));
            }
            s.identify(b, a.reverse())?;
        }
        s.cells[c1] = None;
        s.cells[c2] = None;
    }
}

fn finish(
    mut s: Scratch,
    x: &Arc<OneRelatorOrbicomplex>,
    base: usize,
    boundary: Vec<Dart>,
    word: Word,
) -> Result<VanKampenDiagram, DiagramError> {
    let gamma = x.gamma();
    let cells = s.live_cells();
    let boundary: Vec<Dart> = boundary.into_iter().map(|d| s.canon(d)).collect();
    // keep edges on the boundary or under a cell
    let mut keep_edge = vec![false; s.ends.len()];
    for d in boundary.iter().chain(cells.iter().flat_map(|(_, c)| c.iter())) {
        keep_edge[d.edge()] = true;
    }
    let base_root = s.find_v(base);
    let mut vindex = vec![usize::MAX; s.vparent.len()];
    let mut graph = Graph::new();
    let touch = |g: &mut Graph, v: usize, vindex: &mut Vec<usize>| {
        if vindex[v] == usize::MAX {
            vindex[v] = g.num_vertices();
            g.add_vertex(format!("v{}", g.num_vertices()));
        }
        vindex[v]
    };
    touch(&mut graph, base_root, &mut vindex);
    let mut eindex = vec![usize::MAX; s.ends.len()];
    let mut dart_map = Vec::new();
    for e in 0..s.ends.len() {
        if !keep_edge[e] {
            continue;
        }
        let d = Dart::forward(e);
        let (o, t) = (s.origin(d), s.terminus(d));
        let (o, t) = (
            touch(&mut graph, o, &mut vindex),
            touch(&mut graph, t, &mut vindex),
        );
        let label = s.label(d);
        eindex[e] = graph.add_edge(
            format!("e{}", graph.num_edges()),
            o,
            t,
            Some(Label {
                symbol: gamma.edge(label.edge()).name.clone(),
                inverted: label.is_reversed(),
            }),
        );
        dart_map.push(label);
        dart_map.push(label.reverse());
    }
    let relabel = |d: Dart| Dart::new(eindex[d.edge()], d.is_reversed());
    let mut complex = TwoComplex::new(graph);
    for (k, (_, c)) in cells.iter().enumerate() {
        complex.add_cell(format!("c{k}"), c.iter().map(|&d| relabel(d)).collect());
    }
    let boundary: Vec<Dart> = boundary.into_iter().map(relabel).collect();
    if !complex.is_valid() {
        return Err(DiagramError::Internal("diagram failed validation"));
    }
    let complex = Arc::new(complex);
    let vertex_map = vec![0; complex.num_vertices()];
    let labeling = OrbiMorphism::from_graph_map(complex.clone(), x.clone(), vertex_map, dart_map)
        .map_err(|_| DiagramError::Internal("diagram cell does not spell w^n"))?;
    let reduced = mirror_pair(&complex, &labeling).is_none();
    let diagram = VanKampenDiagram {
        complex,
        boundary,
        base: 0,
        word,
        labeling,
        reduced,
    };
    if diagram.boundary_word() != diagram.word {
        return Err(DiagramError::Internal("boundary does not read the word"));
    }
    if !diagram.reduced {
        return Err(DiagramError::Internal("mirror pair survived cancellation"));
    }
    Ok(diagram)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Graph, Arc<OneRelatorOrbicomplex>) {
        let g = Graph::rose(&["a", "b"]);
        let w = Word::parse("a b", &g).unwrap();
        (g.clone(), Arc::new(OneRelatorOrbicomplex::new(g, w, 2).unwrap()))
    }

    #[test]
    fn relator_gives_one_cell() {
        let (g, x) = setup();
        let u = Word::parse("a b a b", &g).unwrap();
        let d = build_reduced_diagram(&u, &x).unwrap();
        assert_eq!(d.complex.num_cells(), 1);
        assert!(d.reduced);
        assert_eq!(d.boundary_word(), u);
        assert_eq!(d.complex.chi2(), 1);
    }

    #[test]
    fn two_cell_example() {
        let (g, x) = setup();
        let u = Word::parse("a b a b a b a b a a~", &g).unwrap();
        let d = build_reduced_diagram(&u, &x).unwrap();
        assert_eq!(d.complex.num_cells(), 2);
        assert!(d.mirror_pair().is_none());
        assert_eq!(d.boundary_word(), free_reduce(&u, false));
    }

    #[test]
    fn cancelling_input_gives_a_point() {
        let (g, x) = setup();
        let u = Word::parse("a b a b b~ a~ b~ a~", &g).unwrap();
        let d = build_reduced_diagram(&u, &x).unwrap();
        assert_eq!(d.complex.num_vertices(), 1);
        assert_eq!(d.complex.num_cells(), 0);
        assert!(d.boundary.is_empty());
    }

    #[test]
    fn nontrivial_word_is_rejected() {
        let (g, x) = setup();
        let u = Word::parse("a b", &g).unwrap();
        assert!(matches!(build_reduced_diagram(&u, &x), Err(DiagramError::Nontrivial)));
    }

    #[test]
    fn mirror_pair_from_relator_and_inverse_is_cancelled() {
        // r · b · r⁻¹ · b⁻¹ with r = (ab)^2: Dehn glues two cells that could
        // face each other; the output must be reduced either way
        let (g, x) = setup();
        let u = Word::parse("a b a b b b~ a~ b~ a~ b~", &g).unwrap();
        let d = build_reduced_diagram(&u, &x).unwrap();
        assert!(d.reduced);
        assert_eq!(d.boundary_word(), free_reduce(&u, false));
    }
}
