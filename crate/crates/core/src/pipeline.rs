//! Subgroup presentations by attach-and-fold refinement over `X₀`.
//!
//! Chain stages `Y_i` are folded complexes linked by immersions
//! `Y_i ↬ Y_{i+1}`; each stage also keeps its free-face collapse `irr_i`,
//! which carries the cell bound, the candidate generators and the final
//! presentation.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::complex::{
    CellAlignment, CellMorphism, Collapse, CollapseMode, Dart, Graph, Orientation, SpanningTree,
    TwoComplex,
};
use crate::covers::{
    build_unwrapped_cover, find_exponent_n_quotient, pull_back_subgroup, CoverError, UnwrappedCover,
};
use crate::fold::{fold, rooted_form, FoldError};
use crate::orbi::OneRelatorOrbicomplex;
use crate::words::{build_reduced_diagram, dehn_solve, DehnError, DiagramError, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Certificate level `L`: candidates up to this length are swept.
    pub max_word_len: usize,
    /// Maximum number of sweeps, one per stage.
    pub max_stages: usize,
    /// Degree bound for the quotient search.
    pub max_degree: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_word_len: 12,
            max_stages: 200,
            max_degree: 24,
            seed: 0,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("the pipeline needs torsion (n >= 2), got n = {0}")]
    NoTorsion(usize),
    #[error("no generators")]
    Empty,
    #[error("generator {0} does not close up at the base vertex of X0 (not in the kernel)")]
    NotInKernel(usize),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Dehn(#[from] DehnError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Fold(#[from] FoldError),
    #[error("invariant breach: {check}\n{dump}")]
    Invariant { check: String, dump: String },
}

/// Length-then-lex enumeration of cyclically reduced words over `x1..xk`,
/// one per class up to rotation and inversion. Letter `2j` is `x_{j+1}`,
/// `2j + 1` its inverse.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CandidateCursor {
    word: Vec<usize>,
    /// Candidates handed out since the last reset.
    pub examined: usize,
}

impl CandidateCursor {
    pub fn reset(&mut self) {
        *self = CandidateCursor::default();
    }

    pub fn current(&self) -> &[usize] {
        &self.word
    }

    pub fn next_candidate(&mut self, k: usize, max_len: usize) -> Option<Vec<usize>> {
        if k == 0 {
            return None;
        }
        loop {
            if !self.advance(k) {
                let len = self.word.len() + 1;
                if len > max_len {
                    return None;
                }
                self.word = vec![0; len];
            }
            if is_canonical(&self.word) {
                self.examined += 1;
                return Some(self.word.clone());
            }
        }
    }

    /// Next freely reduced word of the same length in lex order.
    fn advance(&mut self, k: usize) -> bool {
        let w = &mut self.word;
        for i in (0..w.len()).rev() {
            let next = (w[i] + 1..2 * k).find(|&c| i == 0 || c != w[i - 1] ^ 1);
            if let Some(c) = next {
                w[i] = c;
                for j in i + 1..w.len() {
                    w[j] = if w[j - 1] == 1 { 1 } else { 0 };
                }
                return true;
            }
        }
        false
    }
}

/// Cyclically reduced and lex-least among its rotations and inverse rotations.
fn is_canonical(w: &[usize]) -> bool {
    let n = w.len();
    if n == 0 || (n > 1 && w[0] == w[n - 1] ^ 1) {
        return false;
    }
    let inv: Vec<usize> = w.iter().rev().map(|c| c ^ 1).collect();
    for k in 0..n {
        for src in [w, &inv[..]] {
            let smaller = (0..n)
                .map(|i| src[(i + k) % n])
                .cmp(w.iter().copied())
                .is_lt();
            if smaller {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageRow {
    pub stage: usize,
    pub chi1: i64,
    pub chi2: i64,
    pub cells: usize,
    pub free_edges: usize,
    pub cursor: usize,
    pub stable_for: usize,
}

impl StageRow {
    pub fn csv_header() -> &'static str {
        "stage,chi1,chi2,cells,free_edges,cursor,stable_for"
    }

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.stage, self.chi1, self.chi2, self.cells, self.free_edges, self.cursor, self.stable_for
        )
    }
}

/// Outcome of a single refinement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    /// A diagram was glued and the stage advanced.
    Changed,
    Unchanged,
    /// Every candidate up to the certificate level was processed.
    Exhausted,
}

/// Collapse of a stage with the generator data derived from it.
#[derive(Clone, Debug)]
pub struct Irreducible {
    pub collapse: Collapse,
    pub base: usize,
    pub tree: SpanningTree,
    /// Non-tree edges, in edge order; `x_{j+1}` is `generators[j]`.
    pub generators: Vec<usize>,
    /// Preimage in the stage of each edge of the collapse.
    edge_source: Vec<usize>,
}

impl Irreducible {
    fn new(y: &TwoComplex, base: usize) -> Self {
        let collapse = y.collapse(CollapseMode::FreeFaces);
        let base = collapse.vertex_map[base].expect("face collapse keeps vertices");
        let tree = collapse.complex.graph.spanning_tree(base);
        let generators = tree.generators(&collapse.complex.graph);
        let mut edge_source = vec![0; collapse.complex.num_edges()];
        for (e, img) in collapse.edge_map.iter().enumerate() {
            if let Some(i) = img {
                edge_source[*i] = e;
            }
        }
        Irreducible {
            collapse,
            base,
            tree,
            generators,
            edge_source,
        }
    }

    pub fn complex(&self) -> &TwoComplex {
        &self.collapse.complex
    }

    /// Based loop of the collapse reading generator `j`.
    pub fn generator_loop(&self, j: usize) -> Vec<Dart> {
        let g = &self.collapse.complex.graph;
        let e = self.generators[j];
        let d = Dart::forward(e);
        let mut path = self.tree.path_from_root(g, g.origin(d));
        path.push(d);
        path.extend(crate::complex::reverse_path(
            &self.tree.path_from_root(g, g.terminus(d)),
        ));
        path
    }

    /// Loop in the stage spelling a candidate.
    fn stage_path(&self, letters: &[usize]) -> Vec<Dart> {
        let mut path: Vec<Dart> = Vec::new();
        for &c in letters {
            let lp = self.generator_loop(c / 2);
            let lp = if c % 2 == 1 {
                crate::complex::reverse_path(&lp)
            } else {
                lp
            };
            for d in lp {
                if path.last() == Some(&d.reverse()) {
                    path.pop();
                } else {
                    path.push(d);
                }
            }
        }
        path.into_iter()
            .map(|d| Dart::new(self.edge_source[d.edge()], d.is_reversed()))
            .collect()
    }

    /// A closed path of the collapse at the base as a word in `x1..xk`.
    pub fn express(&self, path: &[Dart]) -> Vec<(usize, bool)> {
        path.iter()
            .filter_map(|d| {
                self.generators
                    .iter()
                    .position(|&e| e == d.edge())
                    .map(|j| (j, d.is_reversed()))
            })
            .collect()
    }
}

/// Pipeline state: the current stage `Y_i ↬ X₀`, the chain so far, and the
/// sweep position.
#[derive(Clone, Debug)]
pub struct PipelineState {
    pub x: Arc<OneRelatorOrbicomplex>,
    pub cover: Arc<UnwrappedCover>,
    pub stage: usize,
    /// `Y_i ↬ X₀`.
    pub current: CellMorphism,
    pub base: usize,
    /// `Y_j ↬ Y_{j+1}` for `j < i`.
    pub chain: Vec<CellMorphism>,
    pub irr: Irreducible,
    pub cursor: CandidateCursor,
    pub free_edge_bound: usize,
    /// `⌊(g − 1)/(n − 1)⌋` with `g` the rank of the seed.
    pub cell_bound: usize,
    pub stable_for: usize,
    pub budget: Budget,
    pub sweeps: usize,
    /// Generator loops in `Y₀`.
    pub seed_loops: Vec<Vec<Dart>>,
    pub seed_words: Vec<Word>,
    pub rows: Vec<StageRow>,
    form: String,
}

fn x0_map(cover: &UnwrappedCover, y: Arc<TwoComplex>, vertex_map: Vec<usize>, dart_map: Vec<Dart>, cell_map: Vec<CellAlignment>) -> CellMorphism {
    CellMorphism {
        source: y,
        target: cover.cover.clone(),
        vertex_map,
        dart_map,
        cell_map,
    }
}

/// Folds a wedge of loops spelling `generators` in `X₀` at point 0.
pub fn seed_immersion(
    generators: &[Word],
    cover: Arc<UnwrappedCover>,
    budget: Budget,
) -> Result<PipelineState, PipelineError> {
    if generators.is_empty() {
        return Err(PipelineError::Empty);
    }
    let x = cover.map.target.clone();
    let x0 = cover.cover.clone();
    let mut g = Graph::new();
    g.add_vertex("base");
    let mut dart_map = Vec::new();
    let mut vertex_map = vec![0];
    let mut loops = Vec::new();
    for (i, h) in generators.iter().enumerate() {
        let h = h.free_reduce(false);
        if h.is_empty() || cover.quotient.act_word(0, &h) != 0 {
            return Err(PipelineError::NotInKernel(i));
        }
        let lift = cover.lift(0, &h);
        let mut at = 0;
        let mut lp = Vec::new();
        for (k, &d) in lift.iter().enumerate() {
            let next = if k + 1 == lift.len() {
                0
            } else {
                let v = g.add_vertex(format!("g{i}.{}", k + 1));
                vertex_map.push(x0.graph.terminus(d));
                v
            };
            let e = g.add_edge(format!("g{i}.e{k}"), at, next, None);
            dart_map.push(d);
            dart_map.push(d.reverse());
            lp.push(Dart::forward(e));
            at = next;
        }
        loops.push(lp);
    }
    let wedge = Arc::new(TwoComplex::new(g));
    let m = x0_map(&cover, wedge, vertex_map, dart_map, vec![]);
    let folded = fold(&m)?;
    let y0 = folded.inclusion.clone();
    let base = folded.projection.vertex_map[0];
    let seed_loops = loops.iter().map(|lp| folded.projection.map_path(lp)).collect();
    let n = x.branch();
    let rank = y0.source.graph.cycle_rank();
    let cell_bound = rank.saturating_sub(1) / (n - 1);
    let irr = Irreducible::new(&y0.source, base);
    let form = rooted_form(&y0, base);
    let free_edge_bound = y0.source.free_edge_count();
    Ok(PipelineState {
        x,
        cover,
        stage: 0,
        current: y0,
        base,
        chain: Vec::new(),
        irr,
        cursor: CandidateCursor::default(),
        free_edge_bound,
        cell_bound,
        stable_for: 0,
        budget,
        sweeps: 1,
        seed_loops,
        seed_words: generators.to_vec(),
        rows: Vec::new(),
        form,
    })
}

impl PipelineState {
    pub fn y(&self) -> &TwoComplex {
        &self.current.source
    }

    pub fn row(&self) -> StageRow {
        let y = self.y();
        StageRow {
            stage: self.stage,
            chi1: y.chi1(),
            chi2: y.chi2(),
            cells: y.num_cells(),
            free_edges: y.free_edge_count(),
            cursor: self.cursor.examined,
            stable_for: self.stable_for,
        }
    }

    pub fn stage_table(&self) -> String {
        let mut s = format!("{}\n", StageRow::csv_header());
        for r in &self.rows {
            s.push_str(&r.csv());
            s.push('\n');
        }
        s
    }

    fn dump(&self) -> String {
        let y = self.y();
        format!(
            "stage {} (V={} E={} cells={} base={})\n{}{}",
            self.stage,
            y.num_vertices(),
            y.num_edges(),
            y.num_cells(),
            self.base,
            self.stage_table(),
            self.row().csv()
        )
    }

    fn breach(&self, check: impl Into<String>) -> PipelineError {
        PipelineError::Invariant {
            check: check.into(),
            dump: self.dump(),
        }
    }

    /// The image in `F` of a path in the current stage.
    fn word_of(&self, path: &[Dart]) -> Word {
        Word(
            path.iter()
                .map(|&d| self.cover.map.map_dart(self.current.map_dart(d)))
                .collect(),
        )
    }

    /// Processes the next candidate.
    pub fn refine_step(&mut self) -> Result<Step, PipelineError> {
        let k = self.irr.generators.len();
        let Some(letters) = self.cursor.next_candidate(k, self.budget.max_word_len) else {
            return Ok(Step::Exhausted);
        };
        let path = self.irr.stage_path(&letters);
        let u = self.word_of(&path).free_reduce(false);
        if u.is_empty() || !dehn_solve(&u, &self.x)?.is_trivial() {
            self.stable_for += 1;
            return Ok(Step::Unchanged);
        }
        let diagram = build_reduced_diagram(&u, &self.x)?;
        let (z, zmap) = self.glue(&diagram)?;
        let folded = fold(&zmap)?;
        let next = folded.inclusion.clone();
        let next_base = folded.projection.vertex_map[self.base];
        let form = rooted_form(&next, next_base);
        if form == self.form {
            self.stable_for += 1;
            return Ok(Step::Unchanged);
        }
        // the stage sits first in `Z`, so the chain map is a restriction
        let y = self.y();
        let p = &folded.projection;
        let link = CellMorphism {
            source: self.current.source.clone(),
            target: folded.folded.clone(),
            vertex_map: p.vertex_map[..y.num_vertices()].to_vec(),
            dart_map: p.dart_map[..y.graph.num_darts()].to_vec(),
            cell_map: p.cell_map[..y.num_cells()].to_vec(),
        };
        debug_assert_eq!(z.num_cells(), p.cell_map.len());
        self.check_link(&link, &next)?;
        self.rows.push(self.row());
        self.chain.push(link);
        self.current = next;
        self.base = next_base;
        self.form = form;
        self.stage += 1;
        self.irr = Irreducible::new(&self.current.source, self.base);
        self.cursor.reset();
        self.stable_for = 0;
        self.sweeps += 1;
        self.check_bounds()?;
        Ok(Step::Changed)
    }

    /// `Y_i ∨ E` with `E` lifted to `X₀` from the base.
    fn glue(
        &self,
        diagram: &crate::words::VanKampenDiagram,
    ) -> Result<(Arc<TwoComplex>, CellMorphism), PipelineError> {
        let y = self.y();
        let e = &*diagram.complex;
        let cover = &*self.cover;
        let x0 = &*cover.cover;
        let mut z = y.clone();
        let mut vmap = self.current.vertex_map.clone();
        let mut dmap = self.current.dart_map.clone();
        let mut cmap = self.current.cell_map.clone();
        // lift E's vertices breadth-first from its base
        let mut lift = vec![usize::MAX; e.num_vertices()];
        let mut zv = vec![usize::MAX; e.num_vertices()];
        lift[diagram.base] = self.current.vertex_map[self.base];
        zv[diagram.base] = self.base;
        let links = e.graph.links();
        let mut queue = std::collections::VecDeque::from([diagram.base]);
        let mut edge_lift = vec![None; e.num_edges()];
        while let Some(v) = queue.pop_front() {
            for &d in &links[v] {
                let gd = diagram.labeling.map_dart(d);
                let xd = cover.lift(lift[v], &Word(vec![gd]))[0];
                let t = e.graph.terminus(d);
                let xt = x0.graph.terminus(xd);
                if lift[t] == usize::MAX {
                    lift[t] = xt;
                    zv[t] = z.graph.add_vertex(format!("E{t}"));
                    vmap.push(xt);
                    queue.push_back(t);
                } else if lift[t] != xt {
                    return Err(self.breach("diagram does not lift to X0"));
                }
                let fwd = if d.is_reversed() { xd.reverse() } else { xd };
                match edge_lift[d.edge()] {
                    None => edge_lift[d.edge()] = Some(fwd),
                    Some(prev) if prev != fwd => return Err(self.breach("diagram edge lifts twice")),
                    _ => {}
                }
            }
        }
        let ne = z.num_edges();
        for (i, edge) in e.graph.edges().iter().enumerate() {
            let xd = edge_lift[i].expect("diagram is connected");
            z.graph.add_edge(format!("E{i}"), zv[edge.origin], zv[edge.terminus], None);
            dmap.push(xd);
            dmap.push(xd.reverse());
        }
        for (c, cell) in e.cells().iter().enumerate() {
            let boundary: Vec<Dart> = cell
                .boundary
                .iter()
                .map(|d| Dart::new(d.edge() + ne, d.is_reversed()))
                .collect();
            let images: Vec<Dart> = boundary.iter().map(|d| dmap[d.index()]).collect();
            let al = align_in(x0, &images).ok_or_else(|| self.breach("diagram cell is not a lift of a cell of X0"))?;
            z.add_cell(format!("E.c{c}"), boundary);
            cmap.push(al);
        }
        let z = Arc::new(z);
        let m = x0_map(cover, z.clone(), vmap, dmap, cmap);
        Ok((z, m))
    }

    fn check_link(&self, link: &CellMorphism, next: &CellMorphism) -> Result<(), PipelineError> {
        if !link.is_immersion() {
            return Err(self.breach("chain map is not an immersion"));
        }
        let composite = link
            .then(next)
            .map_err(|_| self.breach("chain map does not compose"))?;
        if composite.vertex_map != self.current.vertex_map
            || composite.dart_map != self.current.dart_map
            || composite.cell_map != self.current.cell_map
        {
            return Err(self.breach("chain square does not commute"));
        }
        if !next.is_immersion() {
            return Err(self.breach("stage does not immerse in X0"));
        }
        if next.source.num_cells() < self.y().num_cells() {
            return Err(self.breach("cell count decreased along the chain"));
        }
        Ok(())
    }

    fn check_bounds(&self) -> Result<(), PipelineError> {
        let cells = self.irr.complex().num_cells();
        if cells > self.cell_bound {
            return Err(self.breach(format!(
                "irreducible stage has {cells} cells, bound is {}",
                self.cell_bound
            )));
        }
        let free = self.y().free_edge_count();
        if free > self.free_edge_bound {
            return Err(self.breach(format!(
                "{free} free edges, seed bound is {}",
                self.free_edge_bound
            )));
        }
        Ok(())
    }

    /// Runs sweeps until one completes without change or the budget ends.
    pub fn run(&mut self) -> Result<bool, PipelineError> {
        if self.budget.max_stages == 0 {
            self.rows.push(self.row());
            return Ok(false);
        }
        loop {
            match self.refine_step()? {
                Step::Exhausted => {
                    self.rows.push(self.row());
                    return Ok(true);
                }
                Step::Changed if self.sweeps > self.budget.max_stages => {
                    self.rows.push(self.row());
                    return Ok(false);
                }
                _ => {}
            }
        }
    }

    /// Seed generator loops carried to the current stage.
    pub fn seed_loops_now(&self) -> Vec<Vec<Dart>> {
        self.seed_loops
            .iter()
            .map(|lp| self.chain.iter().fold(lp.clone(), |p, m| m.map_path(&p)))
            .collect()
    }

    pub fn presentation(&self, stabilized: bool) -> Result<Presentation, PipelineError> {
        let irr = &self.irr;
        let k = irr.generators.len();
        let names: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
        let rose = Graph::rose(&names);
        let to_word = |xs: Vec<(usize, bool)>| Word(xs.into_iter().map(|(j, r)| Dart::new(j, r)).collect());
        let c = irr.complex();
        let relators: Vec<Word> = c
            .cells()
            .iter()
            .map(|cell| to_word(irr.express(&cell.boundary)).free_reduce(true))
            .collect();
        // image in F of each x_j, through the stage
        let gen_words: Vec<Word> = (0..k)
            .map(|j| {
                let lp: Vec<Dart> = irr
                    .generator_loop(j)
                    .iter()
                    .map(|d| Dart::new(irr.edge_source[d.edge()], d.is_reversed()))
                    .collect();
                self.word_of(&lp).free_reduce(false)
            })
            .collect();
        let substitute = |u: &Word| {
            let mut out = Word::empty();
            for d in u.letters() {
                let g = &gen_words[d.edge()];
                out = out.concat(&if d.is_reversed() { g.inverse() } else { g.clone() });
            }
            out.free_reduce(false)
        };
        for (i, r) in relators.iter().enumerate() {
            if !dehn_solve(&substitute(r), &self.x)?.is_trivial() {
                return Err(self.breach(format!("relator {i} is not trivial in G")));
            }
        }
        let mut membership = Vec::new();
        for (i, lp) in self.seed_loops_now().iter().enumerate() {
            let rewritten = irr
                .collapse
                .rewrite_path(lp)
                .ok_or_else(|| self.breach(format!("generator {i} crosses a pruned edge")))?;
            let expr = to_word(irr.express(&rewritten)).free_reduce(false);
            let check = self.seed_words[i].inverse().concat(&substitute(&expr)).free_reduce(false);
            if !check.is_empty() && !dehn_solve(&check, &self.x)?.is_trivial() {
                return Err(self.breach(format!("generator {i} is not expressed by the presentation")));
            }
            membership.push(expr);
        }
        Ok(Presentation {
            rose,
            relators,
            generator_words: gen_words,
            membership,
            stage: self.stage,
            certificate: if stabilized {
                Certificate::Stabilized {
                    level: self.budget.max_word_len,
                }
            } else {
                Certificate::Inconclusive
            },
        })
    }
}

/// Alignment of a closed path of `X₀` with one of its cells, if any.
fn align_in(x0: &TwoComplex, images: &[Dart]) -> Option<CellAlignment> {
    for (c, cell) in x0.cells().iter().enumerate() {
        let q = &cell.boundary;
        if q.len() != images.len() {
            continue;
        }
        for orientation in [Orientation::Positive, Orientation::Negative] {
            for rotation in 0..q.len() {
                let a = CellAlignment::new(c, rotation, orientation);
                if (0..q.len()).all(|i| images[i] == a.image_dart(i, q)) {
                    return Some(a);
                }
            }
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// A full sweep up to this length changed nothing.
    Stabilized { level: usize },
    Inconclusive,
    TrivialSubgroup,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    /// Rose on `x1..xk`.
    pub rose: Graph,
    pub relators: Vec<Word>,
    /// Image of each `x_j` in `F`.
    pub generator_words: Vec<Word>,
    /// Each seed generator as a word in `x1..xk`.
    pub membership: Vec<Word>,
    pub stage: usize,
    pub certificate: Certificate,
}

impl Presentation {
    pub fn trivial() -> Self {
        Presentation {
            rose: Graph::rose::<&str>(&[]),
            relators: vec![],
            generator_words: vec![],
            membership: vec![],
            stage: 0,
            certificate: Certificate::TrivialSubgroup,
        }
    }

    pub fn num_generators(&self) -> usize {
        self.rose.num_edges()
    }

    /// `1 − generators + relators`.
    pub fn euler_characteristic(&self) -> i64 {
        1 - self.num_generators() as i64 + self.relators.len() as i64
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<&str> = self.rose.edges().iter().map(|e| e.name.as_str()).collect();
        let rels: Vec<String> = self.relators.iter().map(|r| r.render(&self.rose)).collect();
        write!(f, "gens:")?;
        for g in gens {
            write!(f, " {g}")?;
        }
        write!(f, " ; rels:")?;
        for (i, r) in rels.iter().enumerate() {
            if i > 0 {
                write!(f, " ;")?;
            }
            write!(f, " {r}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub presentation: Presentation,
    pub rows: Vec<StageRow>,
    pub stabilized: bool,
    pub stages: usize,
    pub sweeps: usize,
    pub quotient_degree: usize,
    /// Index of `H ∩ G₀` in `H` when the input left `G₀`.
    pub finite_index_passage: Option<usize>,
    pub cell_bound: usize,
    pub free_edge_bound: usize,
}

impl PipelineReport {
    pub fn stage_table(&self) -> String {
        let mut s = format!("{}\n", StageRow::csv_header());
        for r in &self.rows {
            s.push_str(&r.csv());
            s.push('\n');
        }
        s
    }

    pub fn summary(&self) -> String {
        let status = match self.presentation.certificate {
            Certificate::Stabilized { level } => format!("stabilized at level {level}"),
            Certificate::Inconclusive => "inconclusive (budget exhausted)".to_string(),
            Certificate::TrivialSubgroup => "trivial subgroup".to_string(),
        };
        let mut s = format!(
            "status: {status}\nstages: {} sweeps: {} quotient degree: {} cell bound: {} free-edge bound: {}\n",
            self.stages, self.sweeps, self.quotient_degree, self.cell_bound, self.free_edge_bound
        );
        if let Some(i) = self.finite_index_passage {
            s.push_str(&format!(
                "note: H is not inside G0; presented H ∩ G0 of index {i} in H (a finite extension of a finitely presented group is finitely presented)\n"
            ));
        }
        s
    }
}

/// Number of cosets of `H ∩ ker η` in `H`.
fn orbit_size(generators: &[Word], cover: &UnwrappedCover) -> usize {
    let q = &cover.quotient;
    let mut seen = vec![false; q.degree];
    seen[0] = true;
    let mut stack = vec![0];
    while let Some(p) = stack.pop() {
        for h in generators {
            for t in [q.act_word(p, h), q.act_word(p, &h.inverse())] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
    }
    seen.iter().filter(|&&s| s).count()
}

/// Quotient, unwrapped cover, pull-back to `G₀`, seed, then sweeps until
/// stabilization or the budget runs out.
pub fn present_subgroup(
    generators: &[Word],
    x: &Arc<OneRelatorOrbicomplex>,
    budget: Budget,
) -> Result<PipelineReport, PipelineError> {
    if x.branch() < 2 {
        return Err(PipelineError::NoTorsion(x.branch()));
    }
    let gens: Vec<Word> = generators
        .iter()
        .map(|h| h.free_reduce(false))
        .filter(|h| !h.is_empty())
        .collect();
    if gens.is_empty() {
        return Ok(PipelineReport {
            presentation: Presentation::trivial(),
            rows: vec![],
            stabilized: true,
            stages: 0,
            sweeps: 0,
            quotient_degree: 1,
            finite_index_passage: None,
            cell_bound: 0,
            free_edge_bound: 0,
        });
    }
    let q = find_exponent_n_quotient(x, budget.max_degree, budget.seed)?;
    let cover = Arc::new(build_unwrapped_cover(x, &q)?);
    let inside = gens.iter().all(|h| q.is_trivial(h));
    let (seed_gens, passage) = if inside {
        (gens, None)
    } else {
        let index = orbit_size(&gens, &cover);
        (pull_back_subgroup(&gens, &q), Some(index))
    };
    let mut state = seed_immersion(&seed_gens, cover, budget)?;
    let stabilized = state.run()?;
    let presentation = state.presentation(stabilized)?;
    Ok(PipelineReport {
        presentation,
        rows: state.rows.clone(),
        stabilized,
        stages: state.stage,
        sweeps: state.sweeps,
        quotient_degree: q.degree,
        finite_index_passage: passage,
        cell_bound: state.cell_bound,
        free_edge_bound: state.free_edge_bound,
    })
}
