use std::path::PathBuf;
use std::process::{Command, Output};

fn workdir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("orelco-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn group(dir: &std::path::Path, w: &str, n: usize) -> String {
    let p = dir.join(format!("g-{}-{n}.txt", w.replace(' ', "")));
    std::fs::write(&p, format!("vertex v\nedge a : v -> v\nedge b : v -> v\nrelator {w}\nbranch {n}\n")).unwrap();
    p.to_str().unwrap().to_string()
}

fn orelco(args: &[&str], env: Option<&str>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_orelco"));
    c.args(args).env_remove("ORELCO_SEED");
    if let Some(s) = env {
        c.env("ORELCO_SEED", s);
    }
    c.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn word_solve_relator() {
    let d = workdir("solve");
    let g = group(&d, "a b", 2);
    let o = orelco(&["word", "solve", "--group", &g, "--word", "a b a b"], None);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let body: Vec<&str> = s.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "trivial");
    assert_eq!(body.iter().filter(|l| l.starts_with("step ")).count(), 1);
}

#[test]
fn cover_build_worked_example() {
    let d = workdir("cover");
    let g = group(&d, "a b", 2);
    let out = d.join("x0.txt");
    let o = orelco(&["cover", "build", "--group", &g, "--max-degree", "8", "--seed", "7", "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    let x = orelco::format::parse_orbicomplex(&std::fs::read_to_string(&g).unwrap()).unwrap();
    let c = orelco::format::parse_cover(&std::fs::read_to_string(&out).unwrap(), std::sync::Arc::new(x)).unwrap();
    let y = &*c.cover;
    assert_eq!((y.num_vertices(), y.num_edges(), y.num_cells()), (2, 4, 1));
    assert!(stdout(&o).contains("vertices=2 edges=4 cells=1 chi=-1"));
}

#[test]
fn insufficient_stages_is_inconclusive() {
    let d = workdir("stages");
    let g = group(&d, "a b", 2);
    let o = orelco(&["subgroup", "present", "--group", &g, "--gens", "a", "--max-stages", "0"], None);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("certificate inconclusive"));
}

#[test]
fn usage_errors() {
    let o = orelco(&["cover", "build", "--frobnicate"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    let o = orelco(&["word", "solve", "--group", "/nonexistent", "--word", "a"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn seed_flag_beats_environment() {
    let d = workdir("seed");
    let g = group(&d, "a b a~ b~", 2);
    let with_env = orelco(&["cover", "build", "--group", &g, "--seed", "4"], Some("99"));
    let plain = orelco(&["cover", "build", "--group", &g, "--seed", "4"], None);
    assert_eq!(with_env.stdout, plain.stdout);
    let env_only = orelco(&["cover", "build", "--group", &g], Some("4"));
    assert_eq!(env_only.stdout, plain.stdout);
    assert!(stdout(&env_only).lines().next().unwrap().ends_with("seed=4"));
    let bad = orelco(&["cover", "build", "--group", &g], Some("not-a-number"));
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn fold_command_round_trips() {
    let d = workdir("fold");
    std::fs::write(d.join("a.txt"), "vertex p\nedge x : p -> p\nedge y : p -> p\n").unwrap();
    std::fs::write(d.join("b.txt"), "vertex v\nedge a : v -> v\n").unwrap();
    std::fs::write(d.join("m.txt"), "vmap p v\nemap x a\nemap y a\n").unwrap();
    let p = |f: &str| d.join(f).to_str().unwrap().to_string();
    let o = orelco(
        &["fold", "--source", &p("a.txt"), "--target", &p("b.txt"), "--map", &p("m.txt"), "--out-complex", &p("c.txt"), "--out-trace", &p("t.txt")],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let c = orelco::format::parse_complex(&std::fs::read_to_string(p("c.txt")).unwrap()).unwrap();
    assert_eq!((c.num_vertices(), c.num_edges()), (1, 1));
    assert_eq!(std::fs::read_to_string(p("t.txt")).unwrap(), "identify dart 0 2\n");
}

#[test]
fn stacking_and_audit_verdicts() {
    let d = workdir("stack");
    let g = group(&d, "a b", 2);
    let s = d.join("s.txt");
    std::fs::write(&s, "vertex v\nedge a : v -> v\nedge b : v -> v\ncell c : a b\nh c 0 0\nh c 1 1/2\n").unwrap();
    let o = orelco(&["stacking", "check", "--stacking", s.to_str().unwrap(), "--group", &g], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("good\nbranched: true"));

    std::fs::write(&s, "vertex v\nedge a : v -> v\ncell c : a\ncell e : a\nh c 0 1\nh e 0 0\n").unwrap();
    let o = orelco(&["stacking", "check", "--stacking", s.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("not good: cell e has no topmost position"));

    // the 1-skeleton of the worked cover after one collapse step
    let y = d.join("y.txt");
    std::fs::write(&y, "vertex 0\nvertex 1\nedge p : 0 -> 1 label a\nedge q : 1 -> 0 label a\nedge r : 0 -> 0 label b\n").unwrap();
    let o = orelco(&["--format", "csv", "audit", "wcycles", "--group", &g, "--complex", y.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("chi1,deg,slack1"));
}

#[test]
fn campaign_persists_csv() {
    let d = workdir("campaign");
    let g = group(&d, "a b", 3);
    let csv = d.join("c.csv");
    let o = orelco(
        &["audit", "wcycles", "--group", &g, "--campaign", "--trials", "30", "--max-vertices", "5", "--seed", "3", "--csv-out", csv.to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("trial,seed,V,E,cells,chi1,deg,slack1,chi2,slack2,pass\n"));
    assert_eq!(text.lines().count(), 31);
}

#[test]
fn dot_export_annotates_edges() {
    let d = workdir("dot");
    let g = group(&d, "a b", 2);
    let o = orelco(&["export", "dot", "--group", &g], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("label=\"a sides=2\""));
}
