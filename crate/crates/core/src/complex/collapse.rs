use super::{reverse_path, rotate, Dart, TwoComplex};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CollapseMode {
    /// Remove free faces with their cells until none remain.
    FreeFaces,
    /// Additionally delete free edges that cut off a tree, keeping the side
    /// that contains `base`.
    FreeFacesAndSeparatingFreeEdges { base: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CollapseStep {
    /// Edge `edge` was a free face of `cell`; both were removed.
    Face { edge: usize, cell: usize },
    /// Free edge deleted together with the tree it separated.
    FreeEdge { edge: usize, pruned_vertices: Vec<usize> },
}

/// Result of collapsing, with index maps from the input complex.
#[derive(Clone, Debug)]
pub struct Collapse {
    pub complex: TwoComplex,
    pub vertex_map: Vec<Option<usize>>,
    pub edge_map: Vec<Option<usize>>,
    pub cell_map: Vec<Option<usize>>,
    pub steps: Vec<CollapseStep>,
    /// Replacement path (in input darts) for the forward dart of each
    /// collapsed face edge.
    replacements: Vec<Option<Vec<Dart>>>,
    /// The input collapsed all the way to a single vertex.
    pub collapsed_to_point: bool,
}

impl Collapse {
    /// Rewrites a path of the input complex into a homotopic path of the
    /// collapsed complex. Fails if the path crosses a pruned edge.
    pub fn rewrite_path(&self, path: &[Dart]) -> Option<Vec<Dart>> {
        let mut out = Vec::with_capacity(path.len());
        let mut stack: Vec<Dart> = path.iter().rev().copied().collect();
        while let Some(d) = stack.pop() {
            if let Some(e) = self.edge_map[d.edge()] {
                let nd = Dart::new(e, d.is_reversed());
                if out.last() == Some(&nd.reverse()) {
                    out.pop();
                } else {
                    out.push(nd);
                }
                continue;
            }
            let rep = self.replacements[d.edge()].as_ref()?;
            let rep = if d.is_reversed() {
                reverse_path(rep)
            } else {
                rep.clone()
            };
            stack.extend(rep.into_iter().rev());
        }
        Some(out)
    }
}

pub(super) fn collapse(c: &TwoComplex, mode: CollapseMode) -> Collapse {
    let ne = c.num_edges();
    let nv = c.num_vertices();
    let mut edge_alive = vec![true; ne];
    let mut cell_alive = vec![true; c.num_cells()];
    let mut vertex_alive = vec![true; nv];
    let mut counts = c.traversal_counts();
    let mut replacements: Vec<Option<Vec<Dart>>> = vec![None; ne];
    let mut steps = Vec::new();

    loop {
        // lowest free-face edge first; its unique cell is then determined
        let face = (0..ne).find(|&e| edge_alive[e] && counts[e] == 1);
        if let Some(e) = face {
            let (cell, pos) = c
                .cells()
                .iter()
                .enumerate()
                .filter(|(i, _)| cell_alive[*i])
                .find_map(|(i, cell)| {
                    cell.boundary
                        .iter()
                        .position(|d| d.edge() == e)
                        .map(|p| (i, p))
                })
                .expect("free face has a cell");
            let boundary = &c.cell(cell).boundary;
            // d · rest is a closed loop, so d is homotopic to rest⁻¹
            let rotated = rotate(boundary, pos);
            let d = rotated[0];
            let rest_inv = reverse_path(&rotated[1..]);
            replacements[e] = Some(if d.is_reversed() {
                reverse_path(&rest_inv)
            } else {
                rest_inv
            });
            for d in boundary {
                counts[d.edge()] -= 1;
            }
            cell_alive[cell] = false;
            edge_alive[e] = false;
            steps.push(CollapseStep::Face { edge: e, cell });
            continue;
        }
        let CollapseMode::FreeFacesAndSeparatingFreeEdges { base } = mode else {
            break;
        };
        match find_separating_free_edge(c, &edge_alive, &vertex_alive, &counts, base) {
            Some((e, pruned)) => {
                edge_alive[e] = false;
                for &v in &pruned {
                    vertex_alive[v] = false;
                }
                for (i, edge) in c.graph.edges().iter().enumerate() {
                    if edge_alive[i] && (!vertex_alive[edge.origin] || !vertex_alive[edge.terminus]) {
                        edge_alive[i] = false;
                    }
                }
                steps.push(CollapseStep::FreeEdge {
                    edge: e,
                    pruned_vertices: pruned,
                });
            }
            None => break,
        }
    }

    let (complex, vertex_map, edge_map, cell_map) =
        c.restrict(&vertex_alive, &edge_alive, &cell_alive);
    let collapsed_to_point = complex.num_vertices() == 1
        && complex.num_edges() == 0
        && complex.num_cells() == 0
        && (nv > 1 || ne > 0 || c.num_cells() > 0);
    Collapse {
        complex,
        vertex_map,
        edge_map,
        cell_map,
        steps,
        replacements,
        collapsed_to_point,
    }
}

/// Lowest live free edge whose removal splits off a tree not containing `base`.
fn find_separating_free_edge(
    c: &TwoComplex,
    edge_alive: &[bool],
    vertex_alive: &[bool],
    counts: &[usize],
    base: usize,
) -> Option<(usize, Vec<usize>)> {
    let g = &c.graph;
    let links = g.links();
    for e in 0..g.num_edges() {
        if !edge_alive[e] || counts[e] != 0 {
            continue;
        }
        let edge = g.edge(e);
        if edge.origin == edge.terminus {
            continue;
        }
        // explore from each endpoint without crossing e
        for start in [edge.origin, edge.terminus] {
            let mut seen = vec![false; g.num_vertices()];
            let mut stack = vec![start];
            seen[start] = true;
            let mut piece_edges = 0usize;
            let mut piece = Vec::new();
            let mut carries_cells = false;
            while let Some(v) = stack.pop() {
                piece.push(v);
                for &d in &links[v] {
                    if d.edge() == e || !edge_alive[d.edge()] {
                        continue;
                    }
                    if !d.is_reversed() {
                        piece_edges += 1;
                        if counts[d.edge()] != 0 {
                            carries_cells = true;
                        }
                    }
                    let u = g.terminus(d);
                    if !vertex_alive[u] {
                        continue;
                    }
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            let other = if start == edge.origin {
                edge.terminus
            } else {
                edge.origin
            };
            if seen[other] {
                break; // not separating
            }
            if seen[base] {
                continue;
            }
            if !carries_cells && piece_edges + 1 == piece.len() {
                piece.sort_unstable();
                return Some((e, piece));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::super::Graph;
    use super::*;

    #[test]
    fn disk_collapses_to_point() {
        let mut c = TwoComplex::new(Graph::rose(&["a"]));
        c.add_cell("d", vec![Dart::forward(0)]);
        let out = c.collapse(CollapseMode::FreeFaces);
        assert!(out.collapsed_to_point);
        assert_eq!(out.complex.num_vertices(), 1);
        assert_eq!(out.complex.chi2(), c.chi2());
    }

    #[test]
    fn annulus_keeps_the_other_loop() {
        // cell a·b·a⁻¹ collapses through its free face b, leaving the loop a
        let mut c = TwoComplex::new(Graph::rose(&["a", "b"]));
        c.add_cell(
            "ann",
            vec![Dart::forward(0), Dart::forward(1), Dart::forward(0).reverse()],
        );
        assert_eq!(c.free_faces_and_edges().faces.len(), 1);
        let out = c.collapse(CollapseMode::FreeFaces);
        assert_eq!(out.complex.num_edges(), 1);
        assert_eq!(out.complex.graph.edge(0).name, "a");
        assert_eq!(out.complex.num_cells(), 0);
        assert_eq!(out.complex.chi2(), c.chi2());
        assert_eq!(out.complex.graph.cycle_rank(), 1);
        // the cell kills b, so b rewrites to the empty path
        assert_eq!(out.rewrite_path(&[Dart::forward(1)]).unwrap(), vec![]);
        assert_eq!(
            out.rewrite_path(&[Dart::forward(0), Dart::forward(1)]).unwrap(),
            vec![Dart::forward(0)]
        );
    }

    #[test]
    fn irreducible_is_fixpoint() {
        let mut c = TwoComplex::new(Graph::rose(&["a"]));
        c.add_cell("d1", vec![Dart::forward(0), Dart::forward(0)]);
        let out = c.collapse(CollapseMode::FreeFaces);
        assert_eq!(out.complex, c);
        assert!(out.steps.is_empty());
    }

    #[test]
    fn hairs_are_pruned_in_extended_mode() {
        let mut g = Graph::rose(&["a"]);
        let w = g.add_vertex("w");
        let x = g.add_vertex("x");
        g.add_edge("h1", 0, w, None);
        g.add_edge("h2", w, x, None);
        let c = TwoComplex::new(g);
        let plain = c.collapse(CollapseMode::FreeFaces);
        assert_eq!(plain.complex.num_edges(), 3);
        let out = c.collapse(CollapseMode::FreeFacesAndSeparatingFreeEdges { base: 0 });
        assert_eq!(out.complex.num_vertices(), 1);
        assert_eq!(out.complex.num_edges(), 1);
    }
}
