//! End-to-end acceptance criteria. Each prints one PASS/FAIL line; the test
//! fails if any criterion does.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use orelco::complex::Graph;
use orelco::covers::{
    build_unwrapped_cover, find_exponent_n_quotient, pull_back_subgroup, random_exponent_n_quotient, verify_cover,
    FiniteQuotient,
};
use orelco::harness::{run_property_campaign, trial_seed, CampaignConfig, Suites};
use orelco::orbi::{AuditReport, OneRelatorOrbicomplex};
use orelco::pipeline::{present_subgroup, Budget, Certificate, PipelineError};
use orelco::words::{dehn_solve, Word};

fn orbi(gens: &[&str], w: &str, n: usize) -> Arc<OneRelatorOrbicomplex> {
    let g = Graph::rose(gens);
    let w = Word::parse(w, &g).unwrap();
    Arc::new(OneRelatorOrbicomplex::new(g, w, n).unwrap())
}

fn word(x: &OneRelatorOrbicomplex, s: &str) -> Word {
    Word::parse(s, x.gamma()).unwrap()
}

fn within(start: Instant, limit: Duration, what: &str) {
    let t = start.elapsed();
    assert!(t < limit, "{what} took {t:?}, limit {limit:?}");
}

fn only(wcycles: bool, folding: bool, covers: bool) -> Suites {
    Suites { wcycles, folding, covers }
}

fn criterion_1() {
    let start = Instant::now();
    for (w, n, v) in [("a b", 2, 6), ("a b a b~", 2, 6), ("a b", 3, 5)] {
        let mut cfg = CampaignConfig::new(orbi(&["a", "b"], w, n), 1, 1000);
        cfg.max_vertices = v;
        cfg.suites = only(true, false, false);
        let r = run_property_campaign(&cfg).unwrap_or_else(|e| panic!("{w}/{n}: {e}"));
        assert_eq!(r.rows.len(), 1000);
        assert_eq!(r.wcycles_passed, 1000, "{w}/{n}");
        // recompute both inequalities from the raw row figures
        for row in &r.rows {
            assert_eq!(row.slack1, row.chi1 + row.deg);
            assert_eq!(row.slack2, row.chi2 + (n as i64 - 1) * row.cells as i64);
            assert!(row.slack1 <= 0 && row.slack2 <= 0, "{w}/{n} trial {}", row.trial);
        }
    }
    within(start, Duration::from_secs(60), "w-cycles suite");
}

fn criterion_2() {
    let start = Instant::now();
    let x = orbi(&["a", "b"], "a b", 2);
    let q = find_exponent_n_quotient(&x, 8, 7).unwrap();
    assert_eq!(q.degree, 2);
    let c = build_unwrapped_cover(&x, &q).unwrap();
    let y = &*c.cover;
    assert_eq!((y.num_vertices(), y.num_edges(), y.num_cells()), (2, 4, 1));
    assert_eq!(y.cell(0).boundary.len(), 4);
    let r = verify_cover(&c).unwrap();
    // |Q| (χ(Γ) + 1/n) with χ(Γ) = 1 − 2
    let expected = Rational64::from_integer(2) * (Rational64::from_integer(-1) + Rational64::new(1, 2));
    assert_eq!(r.chi, Rational64::from_integer(-1));
    assert_eq!(r.chi, expected);
    assert_eq!(y.chi2(), -1);
    assert_eq!(c.map.degree().unwrap(), 2);
    assert_eq!(c.map.degree().unwrap(), 2 * y.num_cells());
    assert_eq!(AuditReport::measure(&c.map).unwrap().slack1, 0);

    let x3 = orbi(&["a", "b"], "a", 3);
    let q3 = find_exponent_n_quotient(&x3, 8, 7).unwrap();
    assert_eq!(q3.degree, 3);
    let c3 = build_unwrapped_cover(&x3, &q3).unwrap();
    let y3 = &*c3.cover;
    assert_eq!((y3.num_vertices(), y3.num_edges(), y3.num_cells()), (3, 6, 1));
    assert_eq!(y3.chi2(), -2);
    assert_eq!(verify_cover(&c3).unwrap().chi, Rational64::from_integer(-2));
    within(start, Duration::from_secs(1), "worked covers");
}

/// Orbits of `p ↦ p·w`, each sorted, computed straight from the permutations.
fn w_orbits(q: &FiniteQuotient, w: &Word) -> BTreeSet<Vec<usize>> {
    let step = |p: usize| {
        w.letters().iter().fold(p, |p, d| {
            let perm = &q.perms[d.edge()];
            if d.is_reversed() {
                perm.iter().position(|&t| t == p).unwrap()
            } else {
                perm[p]
            }
        })
    };
    let mut seen = vec![false; q.degree];
    let mut out = BTreeSet::new();
    for p in 0..q.degree {
        if seen[p] {
            continue;
        }
        let mut orbit = vec![];
        let mut at = p;
        while !seen[at] {
            seen[at] = true;
            orbit.push(at);
            at = step(at);
        }
        orbit.sort();
        out.insert(orbit);
    }
    out
}

fn criterion_3() {
    let groups = [
        orbi(&["a", "b"], "a b", 2),
        orbi(&["a", "b"], "a b a~ b~", 2),
        orbi(&["a", "b"], "a b", 3),
        orbi(&["a", "b"], "a b a b~", 2),
    ];
    let mut covers = 0;
    let mut seen = BTreeSet::new();
    for (i, x) in groups.iter().enumerate() {
        let n = x.branch();
        for t in 0..40u64 {
            let seed = trial_seed(i as u64, t);
            let k = n * (1 + (t as usize % 4));
            let Some(q) = random_exponent_n_quotient(x, k, seed) else { continue };
            let c = build_unwrapped_cover(x, &q).unwrap();
            verify_cover(&c).unwrap();
            let orbits = w_orbits(&q, x.relator());
            assert!(orbits.iter().all(|o| o.len() == n), "orbit sizes {orbits:?}");
            let fams: BTreeSet<Vec<usize>> = c
                .families
                .iter()
                .map(|f| {
                    let mut f = f.clone();
                    f.sort();
                    f
                })
                .collect();
            assert_eq!(fams, orbits);
            assert_eq!(c.families.iter().map(Vec::len).sum::<usize>(), k);
            assert_eq!(c.cover.num_cells() * n, k);
            seen.insert((i, q.perms.clone()));
            covers += 1;
        }
    }
    assert!(seen.len() >= 50, "only {} distinct quotients ({covers} covers)", seen.len());
}

fn criterion_4() {
    let start = Instant::now();
    for (i, x) in [orbi(&["a", "b"], "a b", 2), orbi(&["a", "b"], "a b a~ b~", 2)].into_iter().enumerate() {
        let mut cfg = CampaignConfig::new(x, 40 + i as u64, 300);
        cfg.suites = only(false, true, false);
        let r = run_property_campaign(&cfg).unwrap_or_else(|e| panic!("{e}"));
        assert_eq!(r.fold_checks, 300);
    }
    within(start, Duration::from_secs(30), "folding laws");
}

fn random_reduced(rng: &mut ChaCha8Rng, len: usize) -> Word {
    let mut letters: Vec<orelco::complex::Dart> = Vec::new();
    while letters.len() < len {
        let d = orelco::complex::Dart::new(rng.gen_range(0..2), rng.gen_bool(0.5));
        if letters.last() != Some(&d.reverse()) {
            letters.push(d);
        }
    }
    Word(letters)
}

fn criterion_5() {
    let start = Instant::now();
    let mut checked = 0;
    for (i, (w, n)) in [("a b", 2), ("a b", 3), ("a b a~ b~", 2), ("a b a b~", 2), ("a a b", 3)].into_iter().enumerate() {
        let x = orbi(&["a", "b"], w, n);
        let q = find_exponent_n_quotient(&x, 24, 3).unwrap();
        let c = build_unwrapped_cover(&x, &q).unwrap();
        verify_cover(&c).unwrap();
        let big = x.relator_power();
        let mut rng = ChaCha8Rng::seed_from_u64(500 + i as u64);
        // products of ≤ 4 conjugates of (w^n)^{±1}
        for _ in 0..250 {
            let mut u = Word::empty();
            for _ in 0..rng.gen_range(1..=4) {
                let len = rng.gen_range(0..=6);
                let conj = random_reduced(&mut rng, len);
                let r = if rng.gen_bool(0.5) { big.clone() } else { big.inverse() };
                u = u.concat(&conj).concat(&r).concat(&conj.inverse());
            }
            let u = u.free_reduce(false);
            assert!(dehn_solve(&u, &x).unwrap().is_trivial(), "{w}/{n}: {}", u.render(x.gamma()));
            checked += 1;
        }
        // words moving the base point of the quotient action
        let mut nontrivial = 0;
        while nontrivial < 250 {
            let len = rng.gen_range(1..=16);
            let u = random_reduced(&mut rng, len);
            if q.is_trivial(&u) {
                continue;
            }
            assert!(!dehn_solve(&u, &x).unwrap().is_trivial(), "{w}/{n}: {}", u.render(x.gamma()));
            nontrivial += 1;
            checked += 1;
        }
    }
    assert!(checked >= 2000);
    within(start, Duration::from_secs(60), "Dehn corpus");
}

fn check_relators(x: &OneRelatorOrbicomplex, p: &orelco::pipeline::Presentation) {
    for r in &p.relators {
        // substitute x_j ↦ its image in F
        let mut img = Word::empty();
        for d in r.letters() {
            let g = &p.generator_words[d.edge()];
            img = img.concat(&if d.is_reversed() { g.inverse() } else { g.clone() });
        }
        assert!(dehn_solve(&img, x).unwrap().is_trivial(), "relator {} is not trivial", r.render(&p.rose));
    }
}

fn criterion_6() {
    let start = Instant::now();
    let x = orbi(&["a", "b"], "a b", 2);
    let q = find_exponent_n_quotient(&x, 24, 0).unwrap();
    let g0 = pull_back_subgroup(&[word(&x, "a"), word(&x, "b")], &q);
    let report = present_subgroup(&g0, &x, Budget::default()).unwrap();
    assert!(report.stabilized);
    assert!(matches!(report.presentation.certificate, Certificate::Stabilized { level: 12 }));
    assert!(report.stages <= 200);
    assert_eq!(report.cell_bound, 2);
    let p = &report.presentation;
    assert!(p.relators.len() <= 2);
    assert_eq!(1 - p.num_generators() as i64 + p.relators.len() as i64, -1);
    check_relators(&x, p);

    let a = present_subgroup(&[word(&x, "a")], &x, Budget::default()).unwrap();
    assert!(a.stabilized);
    assert_eq!(a.finite_index_passage, Some(2));
    assert!(a.presentation.relators.is_empty());
    within(start, Duration::from_secs(120), "pipeline");
}

fn criterion_7() {
    // pipelines over several groups and subgroups; any hard check would
    // surface as PipelineError::Invariant
    let cases: [(&str, usize, &[&str]); 5] = [
        ("a b", 2, &["a", "b"]),
        ("a b", 2, &["a b a~", "b b"]),
        ("a b", 3, &["a"]),
        ("a b a~ b~", 2, &["a", "b a b~"]),
        ("a b a b~", 2, &["a b"]),
    ];
    for (w, n, gens) in cases {
        let x = orbi(&["a", "b"], w, n);
        let gens: Vec<Word> = gens.iter().map(|s| word(&x, s)).collect();
        let budget = Budget { max_word_len: 8, ..Budget::default() };
        match present_subgroup(&gens, &x, budget) {
            Ok(r) => check_relators(&x, &r.presentation),
            Err(PipelineError::Invariant { check, dump }) => panic!("{w}/{n}: {check}\n{dump}"),
            Err(e) => panic!("{w}/{n}: {e}"),
        }
    }
    let mut cfg = CampaignConfig::new(orbi(&["a", "b"], "a b a~ b~", 2), 70, 300);
    cfg.suites = Suites::all();
    run_property_campaign(&cfg).unwrap_or_else(|e| panic!("{e}"));
}

fn criterion_8() {
    let dir = std::env::temp_dir().join(format!("orelco-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let g = dir.join("g.txt");
    std::fs::write(&g, "vertex v\nedge a : v -> v\nedge b : v -> v\nrelator a b\nbranch 2\n").unwrap();
    let g = g.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["word", "solve", "--group", g, "--word", "a b a b a~"],
        vec!["cover", "build", "--group", g, "--max-degree", "8", "--seed", "7"],
        vec!["subgroup", "present", "--group", g, "--gens", "b,a a,a b a~", "--seed", "5"],
        vec!["--format", "csv", "subgroup", "present", "--group", g, "--gens", "a"],
        vec!["--format", "csv", "audit", "wcycles", "--group", g, "--campaign", "--trials", "60", "--seed", "9"],
        vec!["export", "dot", "--group", g],
    ];
    let run = |args: &[&str]| {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = orelco::cli::run(std::iter::once("orelco").chain(args.iter().copied()), &mut out, &mut err);
        let mut h = Sha256::new();
        h.update(code.to_le_bytes());
        h.update(&out);
        h.update(&err);
        (code, h.finalize().to_vec())
    };
    for args in &commands {
        let (c1, h1) = run(args);
        let (c2, h2) = run(args);
        assert_eq!(c1, 0, "{args:?}");
        assert_eq!((c1, h1), (c2, h2), "{args:?}");
    }
    std::fs::remove_dir_all(&dir).ok();
}

fn main() {
    // panics are reported through the FAIL lines
    std::panic::set_hook(Box::new(|info| eprintln!("  {info}")));
    let criteria: [(&str, fn()); 8] = [
        ("1 w-cycles inequality suite", criterion_1),
        ("2 worked unwrapped covers", criterion_2),
        ("3 family structure", criterion_3),
        ("4 folding laws", criterion_4),
        ("5 Dehn solver corpus", criterion_5),
        ("6 pipeline end-to-end", criterion_6),
        ("7 invariant hard-checks stay silent", criterion_7),
        ("8 determinism", criterion_8),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let ok = catch_unwind(AssertUnwindSafe(f)).is_ok();
        println!("[{}] criterion {name} ({:.2?})", if ok { "PASS" } else { "FAIL" }, start.elapsed());
        failed += usize::from(!ok);
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
