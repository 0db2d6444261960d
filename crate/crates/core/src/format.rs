//! Line-oriented text formats. Every emitter is the exact inverse of its
//! parser on emitted text; `#` starts a comment anywhere on a line.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num_rational::Rational64;
use thiserror::Error;

use crate::complex::{CellAlignment, CellMorphism, Dart, Graph, Label, Orientation, TwoComplex};
use crate::covers::{FiniteQuotient, UnwrappedCover};
use crate::fold::FoldStep;
use crate::orbi::{OneRelatorOrbicomplex, OrbiMorphism};
use crate::pipeline::{Certificate, Presentation};
use crate::stacking::Stacking;
use crate::words::Word;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, msg: msg.into() }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        let toks: Vec<&str> = l.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn valid_id(s: &str) -> bool {
    !s.is_empty() && !s.ends_with('~') && !s.contains(['#', ':']) && s != "->"
}

fn dart_token(g: &Graph, d: Dart) -> String {
    let name = &g.edge(d.edge()).name;
    if d.is_reversed() {
        format!("{name}~")
    } else {
        name.clone()
    }
}

fn parse_dart(g: &Graph, tok: &str, line: usize) -> Result<Dart, FormatError> {
    let (name, rev) = match tok.strip_suffix('~') {
        Some(n) => (n, true),
        None => (tok, false),
    };
    let e = g.find_edge(name).ok_or_else(|| syntax(line, format!("unknown edge {name}")))?;
    Ok(Dart::new(e, rev))
}

fn parse_usize(tok: &str, line: usize) -> Result<usize, FormatError> {
    tok.parse().map_err(|_| syntax(line, format!("expected a count, got {tok}")))
}

// ---------------------------------------------------------------- complexes

pub fn write_complex(c: &TwoComplex) -> String {
    let mut s = String::new();
    let g = &c.graph;
    for v in g.vertex_names() {
        let _ = writeln!(s, "vertex {v}");
    }
    for e in g.edges() {
        let _ = write!(s, "edge {} : {} -> {}", e.name, g.vertex_name(e.origin), g.vertex_name(e.terminus));
        if let Some(l) = &e.label {
            let _ = write!(s, " label {}{}", l.symbol, if l.inverted { "~" } else { "" });
        }
        s.push('\n');
    }
    for cell in c.cells() {
        let path: Vec<String> = cell.boundary.iter().map(|&d| dart_token(g, d)).collect();
        let _ = writeln!(s, "cell {} : {}", cell.name, path.join(" "));
    }
    s
}

/// Parses `vertex`, `edge` and `cell` lines; other keywords are handed to
/// `extra` in order, after the complex read so far.
fn parse_complex_with<'a>(
    text: &'a str,
    mut extra: impl FnMut(&TwoComplex, usize, &[&'a str]) -> Result<bool, FormatError>,
) -> Result<TwoComplex, FormatError> {
    let mut c = TwoComplex::new(Graph::new());
    let mut vertices: HashMap<String, usize> = HashMap::new();
    let mut cells: HashMap<String, usize> = HashMap::new();
    for (ln, t) in lines(text) {
        match t[0] {
            "vertex" => {
                if t.len() != 2 || !valid_id(t[1]) {
                    return Err(syntax(ln, "expected `vertex <id>`"));
                }
                if vertices.contains_key(t[1]) {
                    return Err(syntax(ln, format!("duplicate vertex {}", t[1])));
                }
                vertices.insert(t[1].to_string(), c.graph.add_vertex(t[1]));
            }
            "edge" => {
                let ok = (t.len() == 6 || (t.len() == 8 && t[6] == "label")) && t[2] == ":" && t[4] == "->";
                if !ok || !valid_id(t[1]) {
                    return Err(syntax(ln, "expected `edge <id> : <v> -> <v> [label <sym>]`"));
                }
                if c.graph.find_edge(t[1]).is_some() {
                    return Err(syntax(ln, format!("duplicate edge {}", t[1])));
                }
                let v = |name: &str| vertices.get(name).copied().ok_or_else(|| syntax(ln, format!("unknown vertex {name}")));
                let (o, term) = (v(t[3])?, v(t[5])?);
                let label = (t.len() == 8).then(|| match t[7].strip_suffix('~') {
                    Some(sym) => Label { symbol: sym.to_string(), inverted: true },
                    None => Label { symbol: t[7].to_string(), inverted: false },
                });
                c.graph.add_edge(t[1], o, term, label);
            }
            "cell" => {
                if t.len() < 4 || t[2] != ":" || !valid_id(t[1]) {
                    return Err(syntax(ln, "expected `cell <id> : <edge-path>`"));
                }
                if cells.contains_key(t[1]) {
                    return Err(syntax(ln, format!("duplicate cell {}", t[1])));
                }
                let path = t[3..].iter().map(|tok| parse_dart(&c.graph, tok, ln)).collect::<Result<Vec<_>, _>>()?;
                let closed = (0..path.len()).all(|i| c.graph.terminus(path[i]) == c.graph.origin(path[(i + 1) % path.len()]));
                if !closed {
                    return Err(syntax(ln, format!("boundary of {} is not a closed path", t[1])));
                }
                cells.insert(t[1].to_string(), c.add_cell(t[1], path));
            }
            _ => {
                if !extra(&c, ln, &t)? {
                    return Err(syntax(ln, format!("unknown keyword {}", t[0])));
                }
            }
        }
    }
    Ok(c)
}

pub fn parse_complex(text: &str) -> Result<TwoComplex, FormatError> {
    parse_complex_with(text, |_, _, _| Ok(false))
}

// ------------------------------------------------------------ orbicomplexes

pub fn write_orbicomplex(x: &OneRelatorOrbicomplex) -> String {
    let mut s = write_complex(&TwoComplex::new(x.gamma().clone()));
    let _ = writeln!(s, "relator {}", x.relator().render(x.gamma()));
    let _ = writeln!(s, "branch {}", x.branch());
    s
}

pub fn parse_orbicomplex(text: &str) -> Result<OneRelatorOrbicomplex, FormatError> {
    let mut relator: Option<(usize, Vec<String>)> = None;
    let mut branch = None;
    let gamma = parse_complex_with(text, |_, ln, t| match t[0] {
        "relator" => {
            relator = Some((ln, t[1..].iter().map(|s| s.to_string()).collect()));
            Ok(true)
        }
        "branch" if t.len() == 2 => {
            branch = Some(parse_usize(t[1], ln)?);
            Ok(true)
        }
        _ => Ok(false),
    })?;
    if gamma.num_cells() > 0 {
        return Err(FormatError::Invalid("a group graph carries no cells".into()));
    }
    let (ln, toks) = relator.ok_or_else(|| FormatError::Invalid("missing `relator` line".into()))?;
    let branch = branch.ok_or_else(|| FormatError::Invalid("missing `branch` line".into()))?;
    let g = gamma.graph;
    let w = toks.iter().map(|tok| parse_dart(&g, tok, ln)).collect::<Result<Vec<_>, _>>()?;
    OneRelatorOrbicomplex::new(g, Word(w), branch).map_err(|e| FormatError::Invalid(e.to_string()))
}

// ---------------------------------------------------------------- morphisms

/// Map lines only; source and target are stored separately.
pub fn write_morphism(m: &CellMorphism) -> String {
    write_maps(&m.source, &m.target, &m.vertex_map, &m.dart_map, &m.cell_map)
}

fn write_maps(
    source: &TwoComplex,
    target: &TwoComplex,
    vertex_map: &[usize],
    dart_map: &[Dart],
    cell_map: &[CellAlignment],
) -> String {
    let mut s = String::new();
    let (sg, tg) = (&source.graph, &target.graph);
    for (v, &t) in vertex_map.iter().enumerate() {
        let _ = writeln!(s, "vmap {} {}", sg.vertex_name(v), tg.vertex_name(t));
    }
    for e in 0..sg.num_edges() {
        let _ = writeln!(s, "emap {} {}", sg.edge(e).name, dart_token(tg, dart_map[Dart::forward(e).index()]));
    }
    for (c, a) in cell_map.iter().enumerate() {
        let _ = writeln!(
            s,
            "cmap {} {} rot={} orient={}",
            source.cell(c).name,
            target.cell(a.cell).name,
            a.rotation,
            a.orientation.symbol()
        );
    }
    s
}

type Maps = (Vec<usize>, Vec<Dart>, Vec<CellAlignment>);

fn parse_maps(text: &str, source: &TwoComplex, target: &TwoComplex) -> Result<Maps, FormatError> {
    let (sg, tg) = (&source.graph, &target.graph);
    let mut vmap = vec![None; sg.num_vertices()];
    let mut dmap = vec![None; sg.num_darts()];
    let mut cmap = vec![None; source.num_cells()];
    let cell_of = |c: &TwoComplex, name: &str, ln: usize| {
        c.cells().iter().position(|x| x.name == name).ok_or_else(|| syntax(ln, format!("unknown cell {name}")))
    };
    for (ln, t) in lines(text) {
        match (t[0], t.len()) {
            ("vmap", 3) => {
                let a = sg.find_vertex(t[1]).ok_or_else(|| syntax(ln, format!("unknown vertex {}", t[1])))?;
                let b = tg.find_vertex(t[2]).ok_or_else(|| syntax(ln, format!("unknown vertex {}", t[2])))?;
                vmap[a] = Some(b);
            }
            ("emap", 3) => {
                let e = sg.find_edge(t[1]).ok_or_else(|| syntax(ln, format!("unknown edge {}", t[1])))?;
                let d = parse_dart(tg, t[2], ln)?;
                dmap[Dart::forward(e).index()] = Some(d);
                dmap[Dart::new(e, true).index()] = Some(d.reverse());
            }
            ("cmap", 5) => {
                let a = cell_of(source, t[1], ln)?;
                let b = cell_of(target, t[2], ln)?;
                let rot = t[3]
                    .strip_prefix("rot=")
                    .ok_or_else(|| syntax(ln, "expected rot=<k>"))
                    .and_then(|k| parse_usize(k, ln))?;
                let orient = match t[4] {
                    "orient=+" => Orientation::Positive,
                    "orient=-" => Orientation::Negative,
                    _ => return Err(syntax(ln, "expected orient=<+|->")),
                };
                if rot >= target.cell(b).boundary.len().max(1) {
                    return Err(syntax(ln, format!("rotation {rot} out of range")));
                }
                cmap[a] = Some(CellAlignment::new(b, rot, orient));
            }
            _ => return Err(syntax(ln, format!("unexpected `{}`", t.join(" ")))),
        }
    }
    let missing = |what: &str| FormatError::Invalid(format!("incomplete {what} map"));
    Ok((
        vmap.into_iter().collect::<Option<_>>().ok_or_else(|| missing("vertex"))?,
        dmap.into_iter().collect::<Option<_>>().ok_or_else(|| missing("edge"))?,
        cmap.into_iter().collect::<Option<_>>().ok_or_else(|| missing("cell"))?,
    ))
}

pub fn parse_morphism(text: &str, source: Arc<TwoComplex>, target: Arc<TwoComplex>) -> Result<CellMorphism, FormatError> {
    let (vertex_map, dart_map, cell_map) = parse_maps(text, &source, &target)?;
    Ok(CellMorphism { source, target, vertex_map, dart_map, cell_map })
}

/// Maps into `X`; its single cell is named `D`.
pub fn write_orbi_morphism(m: &OrbiMorphism) -> String {
    let mut d = TwoComplex::new(m.target.gamma().clone());
    d.add_cell("D", m.target.relator().letters().to_vec());
    write_maps(&m.source, &d, &m.vertex_map, &m.dart_map, &m.cell_map)
}

pub fn parse_orbi_morphism(
    text: &str,
    source: Arc<TwoComplex>,
    target: Arc<OneRelatorOrbicomplex>,
) -> Result<OrbiMorphism, FormatError> {
    let mut d = TwoComplex::new(target.gamma().clone());
    d.add_cell("D", target.relator().letters().to_vec());
    let (vertex_map, dart_map, cell_map) = parse_maps(text, &source, &d)?;
    Ok(OrbiMorphism { source, target, vertex_map, dart_map, cell_map })
}

// ------------------------------------------------------- quotients, covers

pub fn write_quotient(q: &FiniteQuotient, gamma: &Graph) -> String {
    let mut s = format!("degree {}\n", q.degree);
    for (g, p) in q.perms.iter().enumerate() {
        let images: Vec<String> = p.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(s, "perm {} : {}", gamma.edge(g).name, images.join(" "));
    }
    s
}

fn quotient_line(
    gamma: &Graph,
    degree: &mut Option<usize>,
    perms: &mut [Option<Vec<usize>>],
    ln: usize,
    t: &[&str],
) -> Result<bool, FormatError> {
    match t[0] {
        "degree" if t.len() == 2 => {
            *degree = Some(parse_usize(t[1], ln)?);
            Ok(true)
        }
        "perm" if t.len() >= 3 && t[2] == ":" => {
            let g = gamma.find_edge(t[1]).ok_or_else(|| syntax(ln, format!("unknown generator {}", t[1])))?;
            perms[g] = Some(t[3..].iter().map(|tok| parse_usize(tok, ln)).collect::<Result<_, _>>()?);
            Ok(true)
        }
        _ => Ok(false),
    }
}

fn finish_quotient(degree: Option<usize>, perms: Vec<Option<Vec<usize>>>) -> Result<FiniteQuotient, FormatError> {
    let degree = degree.ok_or_else(|| FormatError::Invalid("missing `degree` line".into()))?;
    let perms: Vec<Vec<usize>> = perms
        .into_iter()
        .collect::<Option<_>>()
        .ok_or_else(|| FormatError::Invalid("missing `perm` line".into()))?;
    let q = FiniteQuotient { degree, perms };
    q.validate(q.perms.len()).map_err(|e| FormatError::Invalid(e.to_string()))?;
    Ok(q)
}

pub fn parse_quotient(text: &str, gamma: &Graph) -> Result<FiniteQuotient, FormatError> {
    let mut degree = None;
    let mut perms = vec![None; gamma.num_edges()];
    for (ln, t) in lines(text) {
        if !quotient_line(gamma, &mut degree, &mut perms, ln, &t)? {
            return Err(syntax(ln, format!("unexpected `{}`", t[0])));
        }
    }
    finish_quotient(degree, perms)
}

/// Quotient, then the cover complex, then one `family` line per cell.
pub fn write_cover(c: &UnwrappedCover) -> String {
    let gamma = c.map.target.gamma();
    let mut s = write_quotient(&c.quotient, gamma);
    s.push_str(&write_complex(&c.cover));
    for (cell, fam) in c.cover.cells().iter().zip(&c.families) {
        let pts: Vec<String> = fam.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(s, "family {} : {}", cell.name, pts.join(" "));
    }
    s
}

pub fn parse_cover(text: &str, x: Arc<OneRelatorOrbicomplex>) -> Result<UnwrappedCover, FormatError> {
    let gamma = x.gamma().clone();
    let mut degree = None;
    let mut perms = vec![None; gamma.num_edges()];
    let mut families: Vec<(usize, String, Vec<usize>)> = Vec::new();
    let complex = parse_complex_with(text, |_, ln, t| {
        if quotient_line(&gamma, &mut degree, &mut perms, ln, t)? {
            return Ok(true);
        }
        if t[0] == "family" && t.len() >= 3 && t[2] == ":" {
            let pts = t[3..].iter().map(|tok| parse_usize(tok, ln)).collect::<Result<_, _>>()?;
            families.push((ln, t[1].to_string(), pts));
            return Ok(true);
        }
        Ok(false)
    })?;
    let quotient = finish_quotient(degree, perms)?;
    let mut fams = vec![None; complex.num_cells()];
    for (ln, name, pts) in families {
        let c = complex
            .cells()
            .iter()
            .position(|x| x.name == name)
            .ok_or_else(|| syntax(ln, format!("unknown cell {name}")))?;
        fams[c] = Some(pts);
    }
    let families = fams
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| FormatError::Invalid("cell without a family".into()))?;
    let cover = Arc::new(complex);
    let map = OrbiMorphism::from_labels(cover.clone(), x).map_err(FormatError::Invalid)?;
    Ok(UnwrappedCover { cover, map, families, quotient })
}

// ---------------------------------------------------------------- stackings

/// The complex followed by one `h <cell> <position> <height>` per position.
pub fn write_stacking(s: &Stacking<Rational64>) -> String {
    let mut out = write_complex(&s.complex);
    for (c, hs) in s.heights.iter().enumerate() {
        for (p, h) in hs.iter().enumerate() {
            let _ = writeln!(out, "h {} {p} {h}", s.complex.cell(c).name);
        }
    }
    out
}

pub fn parse_stacking(text: &str) -> Result<Stacking<Rational64>, FormatError> {
    let mut entries: Vec<(usize, String, usize, Rational64)> = Vec::new();
    let complex = parse_complex_with(text, |_, ln, t| {
        if t[0] != "h" {
            return Ok(false);
        }
        if t.len() != 4 {
            return Err(syntax(ln, "expected `h <cell> <position> <rational>`"));
        }
        let h: Rational64 = t[3].parse().map_err(|_| syntax(ln, format!("bad height {}", t[3])))?;
        entries.push((ln, t[1].to_string(), parse_usize(t[2], ln)?, h));
        Ok(true)
    })?;
    let mut heights: Vec<Vec<Option<Rational64>>> =
        complex.cells().iter().map(|c| vec![None; c.boundary.len()]).collect();
    for (ln, name, p, h) in entries {
        let c = complex
            .cells()
            .iter()
            .position(|x| x.name == name)
            .ok_or_else(|| syntax(ln, format!("unknown cell {name}")))?;
        let slot = heights[c].get_mut(p).ok_or_else(|| syntax(ln, format!("position {p} out of range")))?;
        *slot = Some(h);
    }
    let heights = heights
        .into_iter()
        .map(|hs| hs.into_iter().collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| FormatError::Invalid("a boundary position has no height".into()))?;
    Stacking::new(Arc::new(complex), heights).map_err(|e| FormatError::Invalid(e.to_string()))
}

// ------------------------------------------------------------- fold traces

pub fn write_trace(trace: &[FoldStep]) -> String {
    trace.iter().map(|s| format!("{s}\n")).collect()
}

pub fn parse_trace(text: &str) -> Result<Vec<FoldStep>, FormatError> {
    lines(text)
        .map(|(ln, t)| match t.as_slice() {
            ["identify", "dart", a, b] => {
                let (a, b) = (parse_usize(a, ln)?, parse_usize(b, ln)?);
                Ok(FoldStep::Dart(Dart(a as u32), Dart(b as u32)))
            }
            ["identify", "cell", a, b] => Ok(FoldStep::Cell(parse_usize(a, ln)?, parse_usize(b, ln)?)),
            _ => Err(syntax(ln, "expected `identify dart|cell <i> <j>`")),
        })
        .collect()
}

// ------------------------------------------------------------ presentations

/// Relators over `x1..xk`; generator images and memberships over `Γ` and
/// `x1..xk` respectively.
pub fn write_presentation(p: &Presentation, gamma: &Graph) -> String {
    let mut s = String::from("gens");
    for e in p.rose.edges() {
        let _ = write!(s, " {}", e.name);
    }
    s.push('\n');
    for r in &p.relators {
        let _ = writeln!(s, "rel {}", r.render(&p.rose));
    }
    for (j, w) in p.generator_words.iter().enumerate() {
        let _ = writeln!(s, "image {} ={}", p.rose.edge(j).name, spaced(&w.render(gamma)));
    }
    for (i, w) in p.membership.iter().enumerate() {
        let _ = writeln!(s, "member {i} ={}", spaced(&w.render(&p.rose)));
    }
    let _ = writeln!(s, "stage {}", p.stage);
    let _ = match p.certificate {
        Certificate::Stabilized { level } => writeln!(s, "certificate stabilized {level}"),
        Certificate::Inconclusive => writeln!(s, "certificate inconclusive"),
        Certificate::TrivialSubgroup => writeln!(s, "certificate trivial"),
    };
    s
}

fn spaced(w: &str) -> String {
    if w.is_empty() {
        String::new()
    } else {
        format!(" {w}")
    }
}

pub fn parse_presentation(text: &str, gamma: &Graph) -> Result<Presentation, FormatError> {
    let mut rose = None;
    let mut relators = Vec::new();
    let mut images: Vec<(usize, String, Vec<String>)> = Vec::new();
    let mut membership: Vec<(usize, Vec<String>)> = Vec::new();
    let mut stage = None;
    let mut certificate = None;
    for (ln, t) in lines(text) {
        match t[0] {
            "gens" => {
                if t[1..].iter().any(|g| !valid_id(g)) {
                    return Err(syntax(ln, "bad generator name"));
                }
                rose = Some(Graph::rose(&t[1..]));
            }
            "rel" => {
                let r = rose.as_ref().ok_or_else(|| syntax(ln, "`rel` before `gens`"))?;
                relators.push(Word(t[1..].iter().map(|tok| parse_dart(r, tok, ln)).collect::<Result<_, _>>()?));
            }
            "image" if t.len() >= 3 && t[2] == "=" => {
                images.push((ln, t[1].to_string(), t[3..].iter().map(|s| s.to_string()).collect()));
            }
            "member" if t.len() >= 3 && t[2] == "=" => {
                let i = parse_usize(t[1], ln)?;
                if i != membership.len() {
                    return Err(syntax(ln, "members out of order"));
                }
                membership.push((ln, t[3..].iter().map(|s| s.to_string()).collect()));
            }
            "stage" if t.len() == 2 => stage = Some(parse_usize(t[1], ln)?),
            "certificate" => {
                certificate = Some(match t[1..] {
                    ["stabilized", level] => Certificate::Stabilized { level: parse_usize(level, ln)? },
                    ["inconclusive"] => Certificate::Inconclusive,
                    ["trivial"] => Certificate::TrivialSubgroup,
                    _ => return Err(syntax(ln, "unknown certificate")),
                })
            }
            _ => return Err(syntax(ln, format!("unexpected `{}`", t[0]))),
        }
    }
    let rose = rose.ok_or_else(|| FormatError::Invalid("missing `gens` line".into()))?;
    let mut generator_words = vec![None; rose.num_edges()];
    for (ln, name, toks) in images {
        let j = rose.find_edge(&name).ok_or_else(|| syntax(ln, format!("unknown generator {name}")))?;
        generator_words[j] = Some(Word(toks.iter().map(|tok| parse_dart(gamma, tok, ln)).collect::<Result<_, _>>()?));
    }
    let generator_words = generator_words
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| FormatError::Invalid("generator without an image".into()))?;
    let membership = membership
        .into_iter()
        .map(|(ln, toks)| toks.iter().map(|tok| parse_dart(&rose, tok, ln)).collect::<Result<Vec<_>, _>>().map(Word))
        .collect::<Result<_, _>>()?;
    Ok(Presentation {
        rose,
        relators,
        generator_words,
        membership,
        stage: stage.ok_or_else(|| FormatError::Invalid("missing `stage` line".into()))?,
        certificate: certificate.ok_or_else(|| FormatError::Invalid("missing `certificate` line".into()))?,
    })
}

// --------------------------------------------------------------------- dot

/// 1-skeleton as a DOT digraph; each edge shows its label and how many
/// cell sides run along it, each vertex lists nothing but its name.
pub fn to_dot(c: &TwoComplex) -> String {
    let g = &c.graph;
    let sides = c.traversal_counts();
    let mut s = String::from("digraph complex {\n");
    for v in g.vertex_names() {
        let _ = writeln!(s, "  \"{v}\";");
    }
    for (e, edge) in g.edges().iter().enumerate() {
        let label = match &edge.label {
            Some(l) => format!(" [{}{}]", l.symbol, if l.inverted { "~" } else { "" }),
            None => String::new(),
        };
        let _ = writeln!(
            s,
            "  \"{}\" -> \"{}\" [label=\"{}{} sides={}\"];",
            g.vertex_name(edge.origin),
            g.vertex_name(edge.terminus),
            edge.name,
            label,
            sides[e]
        );
    }
    for cell in c.cells() {
        let path: Vec<String> = cell.boundary.iter().map(|&d| dart_token(g, d)).collect();
        let _ = writeln!(s, "  // cell {} : {}", cell.name, path.join(" "));
    }
    s.push_str("}\n");
    s
}
