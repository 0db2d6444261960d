//! Random irreducible immersions and property campaigns over them.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::complex::{
    CellAlignment, CellMorphism, CollapseMode, Dart, Graph, Label, Orientation, TwoComplex,
};
use crate::covers::{
    build_unwrapped_cover, find_exponent_n_quotient, random_exponent_n_quotient, verify_cover,
};
use crate::fold::{canonical_form, factor_unique, fold};
use crate::orbi::{wcycles_audit, AuditError, OneRelatorOrbicomplex, OrbiMorphism};

/// Seed of trial `index` under `master`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct GeneratorParams {
    pub x: Arc<OneRelatorOrbicomplex>,
    pub vertices: usize,
    /// Chance that a vertex keeps its outgoing edge for a given label.
    pub edge_density: f64,
    /// Chance that a closed lift of `w^n` is offered for attachment.
    pub attach_probability: f64,
}

/// Partial injection per label: `perms[g][v]` is the end of the `g`-edge
/// leaving `v`, if any.
pub type PartialInjections = Vec<Vec<Option<usize>>>;

fn random_injections(rng: &mut ChaCha8Rng, labels: usize, v: usize, density: f64) -> PartialInjections {
    (0..labels)
        .map(|_| {
            let mut perm: Vec<usize> = (0..v).collect();
            perm.shuffle(rng);
            perm.into_iter()
                .map(|t| rng.gen_bool(density).then_some(t))
                .collect()
        })
        .collect()
}

/// Graph of the injections restricted to the component of vertex 0, with
/// closed lifts of `w^n` attached in `order` whenever side-injectivity
/// survives; `offer` filters which lifts are tried.
pub fn attach_lifts(
    x: &Arc<OneRelatorOrbicomplex>,
    injections: &PartialInjections,
    mut offer: impl FnMut(usize) -> bool,
    order: &[usize],
) -> OrbiMorphism {
    let gamma = x.gamma();
    let v = injections.first().map_or(1, Vec::len).max(1);
    let mut g = Graph::new();
    for i in 0..v {
        g.add_vertex(format!("v{i}"));
    }
    for (label, inj) in injections.iter().enumerate() {
        let name = &gamma.edge(label).name;
        for (i, t) in inj.iter().enumerate() {
            if let Some(t) = *t {
                g.add_edge(
                    format!("{name}.{i}"),
                    i,
                    t,
                    Some(Label {
                        symbol: name.clone(),
                        inverted: false,
                    }),
                );
            }
        }
    }
    let (_, comp) = g.components();
    let keep_v: Vec<bool> = comp.iter().map(|&c| c == comp[0]).collect();
    let keep_e: Vec<bool> = g.edges().iter().map(|e| keep_v[e.origin]).collect();
    let (core, _, _, _) = TwoComplex::new(g).restrict(&keep_v, &keep_e, &[]);
    let g = &core.graph;
    // out[v][d] is the dart at v lying over Γ-dart d
    let mut out = vec![vec![None; gamma.num_darts()]; g.num_vertices()];
    for d in g.darts() {
        let e = g.edge(d.edge());
        let label = gamma.find_edge(&e.label.as_ref().unwrap().symbol).unwrap();
        out[g.origin(d)][Dart::new(label, d.is_reversed()).index()] = Some(d);
    }
    let big = x.relator_power();
    let mut lifts = Vec::new();
    for start in 0..g.num_vertices() {
        let mut at = start;
        let mut path = Vec::with_capacity(big.len());
        for &l in big.letters() {
            match out[at][l.index()] {
                Some(d) => {
                    path.push(d);
                    at = g.terminus(d);
                }
                None => break,
            }
        }
        if path.len() == big.len() && at == start {
            lifts.push(path);
        }
    }
    let wl = x.relator_len();
    let mut used: HashSet<(usize, usize)> = HashSet::new();
    let mut complex = core.clone();
    for &i in order.iter().filter(|&&i| i < lifts.len()) {
        if !offer(i) {
            continue;
        }
        let sides: Vec<(usize, usize)> = lifts[i]
            .iter()
            .enumerate()
            .map(|(p, d)| (d.edge(), p % wl))
            .collect();
        let distinct: HashSet<_> = sides.iter().copied().collect();
        if distinct.len() != sides.len() || sides.iter().any(|s| used.contains(s)) {
            continue;
        }
        used.extend(sides);
        complex.add_cell(format!("c{}", complex.num_cells()), lifts[i].clone());
    }
    OrbiMorphism::from_labels(Arc::new(complex), x.clone()).expect("lifts spell w^n")
}

/// Random immersed graph, random closed lifts of `w^n` attached where the
/// immersion survives, then free faces and hanging trees collapsed.
pub fn random_irreducible_immersion(seed: u64, params: &GeneratorParams) -> OrbiMorphism {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = &params.x;
    let labels = x.gamma().num_edges();
    // half the samples thin out an exponent-n action, so cells survive
    let quotient = if rng.gen_bool(0.5) {
        let k = x.branch() * rng.gen_range(1..=params.vertices.div_ceil(x.branch()).clamp(1, 2));
        random_exponent_n_quotient(x, k, rng.gen())
    } else {
        None
    };
    let inj = match quotient {
        Some(q) => q
            .perms
            .iter()
            .map(|p| {
                p.iter()
                    .map(|&t| rng.gen_bool(params.edge_density.max(0.5).sqrt()).then_some(t))
                    .collect()
            })
            .collect(),
        None => random_injections(&mut rng, labels, params.vertices.max(1), params.edge_density),
    };
    let size = inj.first().map_or(1, Vec::len).max(1);
    let mut order: Vec<usize> = (0..size).collect();
    order.shuffle(&mut rng);
    let draws: Vec<bool> = (0..order.len())
        .map(|_| rng.gen_bool(params.attach_probability))
        .collect();
    let m = attach_lifts(x, &inj, |i| draws[i], &order);
    let collapsed = m
        .source
        .collapse(CollapseMode::FreeFacesAndSeparatingFreeEdges { base: 0 });
    OrbiMorphism::from_labels(Arc::new(collapsed.complex), x.clone()).expect("subcomplex of an immersion")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Suites {
    pub wcycles: bool,
    pub folding: bool,
    pub covers: bool,
}

impl Suites {
    pub fn all() -> Self {
        Suites {
            wcycles: true,
            folding: true,
            covers: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CampaignConfig {
    pub seed: u64,
    pub trials: usize,
    pub x: Arc<OneRelatorOrbicomplex>,
    /// Each trial draws `V` uniformly from `1..=max_vertices`.
    pub max_vertices: usize,
    pub edge_density: f64,
    pub attach_probability: f64,
    pub suites: Suites,
}

impl CampaignConfig {
    pub fn new(x: Arc<OneRelatorOrbicomplex>, seed: u64, trials: usize) -> Self {
        CampaignConfig {
            seed,
            trials,
            x,
            max_vertices: 6,
            edge_density: 0.8,
            attach_probability: 0.7,
            suites: Suites::all(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialRow {
    pub trial: usize,
    pub seed: u64,
    pub vertices: usize,
    pub edges: usize,
    pub cells: usize,
    pub chi1: i64,
    pub deg: i64,
    pub slack1: i64,
    pub chi2: i64,
    pub slack2: i64,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CampaignReport {
    pub rows: Vec<TrialRow>,
    pub wcycles_passed: usize,
    pub fold_checks: usize,
    pub cover_checks: usize,
    /// Count of trials per value of `χ(Y⁽¹⁾) + deg`.
    pub slack1_histogram: BTreeMap<i64, usize>,
}

impl CampaignReport {
    pub fn csv_header() -> &'static str {
        "trial,seed,V,E,cells,chi1,deg,slack1,chi2,slack2,pass"
    }

    pub fn csv(&self) -> String {
        let mut s = format!("{}\n", Self::csv_header());
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.trial, r.seed, r.vertices, r.edges, r.cells, r.chi1, r.deg, r.slack1, r.chi2, r.slack2, r.pass
            );
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "wcycles: {}/{} pass\nfold checks: {}\ncover checks: {}\nslack1 histogram:\n",
            self.wcycles_passed,
            self.rows.len(),
            self.fold_checks,
            self.cover_checks
        );
        for (k, v) in &self.slack1_histogram {
            let _ = writeln!(s, "  {k}: {v}");
        }
        s
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{suite} violation in trial {trial} (seed {seed}): {detail}")]
pub struct CampaignError {
    pub suite: &'static str,
    pub trial: usize,
    pub seed: u64,
    pub detail: String,
}

const RESAMPLE_LIMIT: u64 = 256;

fn wcycles_trial(cfg: &CampaignConfig, trial: usize) -> Result<TrialRow, CampaignError> {
    let base = trial_seed(cfg.seed, trial as u64);
    for attempt in 0..RESAMPLE_LIMIT {
        let seed = if attempt == 0 { base } else { trial_seed(base, attempt) };
        let vertices = 1 + (seed % cfg.max_vertices.max(1) as u64) as usize;
        let params = GeneratorParams {
            x: cfg.x.clone(),
            vertices,
            edge_density: cfg.edge_density,
            attach_probability: cfg.attach_probability,
        };
        let m = random_irreducible_immersion(seed, &params);
        let fail = |detail: String| CampaignError {
            suite: "wcycles",
            trial,
            seed,
            detail,
        };
        if !m.is_immersion() {
            return Err(fail(format!("generator emitted a non-immersion: {:?}", m.check().witness)));
        }
        match wcycles_audit(&m) {
            Ok(r) => {
                if !r.pass || !r.generator_bound_holds {
                    return Err(fail(r.to_string()));
                }
                let y = &*m.source;
                return Ok(TrialRow {
                    trial,
                    seed,
                    vertices: y.num_vertices(),
                    edges: y.num_edges(),
                    cells: y.num_cells(),
                    chi1: r.chi1,
                    deg: r.deg,
                    slack1: r.slack1,
                    chi2: r.chi2,
                    slack2: r.slack2,
                    pass: r.pass,
                });
            }
            Err(AuditError::TreeComponent { .. }) => continue,
            Err(e) => return Err(fail(e.to_string())),
        }
    }
    Err(CampaignError {
        suite: "wcycles",
        trial,
        seed: base,
        detail: "every resample was a tree".into(),
    })
}

/// Random cellular morphism into `b`: random edges over random darts, plus
/// fresh loops reading rotated or reversed boundaries of cells of `b`.
pub fn random_morphism(b: &Arc<TwoComplex>, rng: &mut ChaCha8Rng, max_vertices: usize) -> CellMorphism {
    let bg = &b.graph;
    let links = bg.links();
    let mut g = Graph::new();
    let mut vmap = Vec::new();
    let mut dmap = Vec::new();
    let mut cmap = Vec::new();
    let nv = rng.gen_range(1..=max_vertices.max(1));
    for i in 0..nv {
        g.add_vertex(format!("v{i}"));
        vmap.push(rng.gen_range(0..bg.num_vertices()));
    }
    let vertex_over = |g: &mut Graph, vmap: &mut Vec<usize>, rng: &mut ChaCha8Rng, target: usize| {
        let over: Vec<usize> = (0..g.num_vertices()).filter(|&v| vmap[v] == target).collect();
        if !over.is_empty() && rng.gen_bool(0.7) {
            over[rng.gen_range(0..over.len())]
        } else {
            vmap.push(target);
            g.add_vertex(format!("v{}", g.num_vertices()))
        }
    };
    for _ in 0..rng.gen_range(0..=2 * nv) {
        let u = rng.gen_range(0..g.num_vertices());
        if links[vmap[u]].is_empty() {
            continue;
        }
        let d = links[vmap[u]][rng.gen_range(0..links[vmap[u]].len())];
        let t = vertex_over(&mut g, &mut vmap, rng, bg.terminus(d));
        g.add_edge(format!("e{}", g.num_edges()), u, t, None);
        dmap.push(d);
        dmap.push(d.reverse());
    }
    let mut cells = Vec::new();
    if b.num_cells() > 0 {
        for _ in 0..rng.gen_range(0..=2) {
            let c = rng.gen_range(0..b.num_cells());
            let q = &b.cell(c).boundary;
            let al = CellAlignment::new(
                c,
                rng.gen_range(0..q.len()),
                if rng.gen_bool(0.5) { Orientation::Positive } else { Orientation::Negative },
            );
            let images: Vec<Dart> = (0..q.len()).map(|i| al.image_dart(i, q)).collect();
            let start = vertex_over(&mut g, &mut vmap, rng, bg.origin(images[0]));
            let mut at = start;
            let mut path = Vec::new();
            for (i, &d) in images.iter().enumerate() {
                let next = if i + 1 == images.len() {
                    start
                } else {
                    vmap.push(bg.terminus(d));
                    g.add_vertex(format!("v{}", g.num_vertices()))
                };
                let e = g.add_edge(format!("e{}", g.num_edges()), at, next, None);
                dmap.push(d);
                dmap.push(d.reverse());
                path.push(Dart::forward(e));
                at = next;
            }
            cells.push(path);
            cmap.push(al);
        }
    }
    let mut a = TwoComplex::new(g);
    for (i, p) in cells.into_iter().enumerate() {
        a.add_cell(format!("c{i}"), p);
    }
    CellMorphism {
        source: Arc::new(a),
        target: b.clone(),
        vertex_map: vmap,
        dart_map: dmap,
        cell_map: cmap,
    }
}

fn same_maps(a: &CellMorphism, b: &CellMorphism) -> bool {
    a.vertex_map == b.vertex_map && a.dart_map == b.dart_map && a.cell_map == b.cell_map
}

/// Fold laws on one random morphism: immersion, exact factorization,
/// idempotence, and the universal property against a random `A → D ↬ B`.
pub fn fold_trial(b: &Arc<TwoComplex>, seed: u64, max_vertices: usize) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = random_morphism(b, &mut rng, max_vertices);
    let r = fold(&m).map_err(|e| e.to_string())?;
    if !r.inclusion.is_immersion() {
        return Err("folded map is not an immersion".into());
    }
    if !same_maps(&r.composite(), &m) {
        return Err("projection then inclusion differs from the input".into());
    }
    let again = fold(&r.inclusion).map_err(|e| e.to_string())?;
    if !again.trace.is_empty() || canonical_form(&again.inclusion) != canonical_form(&r.inclusion) {
        return Err("fold is not idempotent on its output".into());
    }
    // A ⊔ extra folds to D; A → D is the restricted projection
    let extra = random_morphism(b, &mut rng, max_vertices);
    let a = &*m.source;
    let union = Arc::new(a.disjoint_union(&extra.source, "x"));
    let joint = CellMorphism {
        source: union,
        target: b.clone(),
        vertex_map: [m.vertex_map.clone(), extra.vertex_map.clone()].concat(),
        dart_map: [m.dart_map.clone(), extra.dart_map.clone()].concat(),
        cell_map: [m.cell_map.clone(), extra.cell_map.clone()].concat(),
    };
    let d = fold(&joint).map_err(|e| e.to_string())?;
    let lift_of = CellMorphism {
        source: m.source.clone(),
        target: d.folded.clone(),
        vertex_map: d.projection.vertex_map[..a.num_vertices()].to_vec(),
        dart_map: d.projection.dart_map[..a.graph.num_darts()].to_vec(),
        cell_map: d.projection.cell_map[..a.num_cells()].to_vec(),
    };
    let f = factor_unique(&r, &d.inclusion, &lift_of).map_err(|e| e.to_string())?;
    let down = f.then(&d.inclusion).map_err(|e| e.to_string())?;
    if !same_maps(&down, &r.inclusion) {
        return Err("C → D → B differs from C → B".into());
    }
    let up = r.projection.then(&f).map_err(|e| e.to_string())?;
    if !same_maps(&up, &lift_of) {
        return Err("A → C → D differs from A → D".into());
    }
    Ok(())
}

/// Cover checks for one random exponent-`n` quotient; `None` when none of
/// the drawn degree turned up.
pub fn cover_trial(x: &Arc<OneRelatorOrbicomplex>, seed: u64, max_multiple: usize) -> Result<Option<usize>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = x.branch() * rng.gen_range(1..=max_multiple.max(1));
    let Some(q) = random_exponent_n_quotient(x, k, seed) else {
        return Ok(None);
    };
    let c = build_unwrapped_cover(x, &q).map_err(|e| e.to_string())?;
    verify_cover(&c).map_err(|e| e.to_string())?;
    // every point lies in exactly one family, each of size n
    let mut seen = vec![0usize; q.degree];
    for fam in &c.families {
        if fam.len() != x.branch() {
            return Err(format!("family of size {}", fam.len()));
        }
        for &p in fam {
            seen[p] += 1;
        }
    }
    if seen.iter().any(|&s| s != 1) {
        return Err("families do not partition the lifts".into());
    }
    Ok(Some(k))
}

/// Runs the selected suites; the first violation in trial order aborts.
pub fn run_property_campaign(cfg: &CampaignConfig) -> Result<CampaignReport, CampaignError> {
    let mut report = CampaignReport::default();
    if cfg.trials == 0 {
        return Ok(report);
    }
    if cfg.suites.wcycles {
        let rows: Vec<Result<TrialRow, CampaignError>> =
            (0..cfg.trials).into_par_iter().map(|t| wcycles_trial(cfg, t)).collect();
        for r in rows {
            let row = r?;
            report.wcycles_passed += usize::from(row.pass);
            *report.slack1_histogram.entry(row.slack1).or_default() += 1;
            report.rows.push(row);
        }
    }
    if cfg.suites.folding {
        let target = fold_target(cfg);
        let results: Vec<Result<(), CampaignError>> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let seed = trial_seed(cfg.seed ^ 0xf01d, t as u64);
                fold_trial(&target, seed, cfg.max_vertices).map_err(|detail| CampaignError {
                    suite: "folding",
                    trial: t,
                    seed,
                    detail,
                })
            })
            .collect();
        for r in results {
            r?;
            report.fold_checks += 1;
        }
    }
    if cfg.suites.covers {
        let results: Vec<Result<Option<usize>, CampaignError>> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let seed = trial_seed(cfg.seed ^ 0xc0e5, t as u64);
                cover_trial(&cfg.x, seed, 4).map_err(|detail| CampaignError {
                    suite: "covers",
                    trial: t,
                    seed,
                    detail,
                })
            })
            .collect();
        for r in results {
            if r?.is_some() {
                report.cover_checks += 1;
            }
        }
    }
    Ok(report)
}

/// `X₀` when a small quotient exists, else the presentation complex.
fn fold_target(cfg: &CampaignConfig) -> Arc<TwoComplex> {
    find_exponent_n_quotient(&cfg.x, 12, cfg.seed)
        .ok()
        .and_then(|q| build_unwrapped_cover(&cfg.x, &q).ok())
        .map(|c| c.cover.clone())
        .unwrap_or_else(|| Arc::new(cfg.x.presentation_complex()))
}
