//! Command-line driver. Exit status: 0 success, 1 property violation or
//! invariant breach, 2 usage or input error, 3 budget exhausted.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::complex::Graph;
use crate::covers::{build_unwrapped_cover, find_exponent_n_quotient, verify_cover, CoverError};
use crate::fold::fold;
use crate::format;
use crate::harness::{run_property_campaign, CampaignConfig, Suites};
use crate::orbi::{wcycles_audit, AuditReport, OneRelatorOrbicomplex, OrbiMorphism};
use crate::pipeline::{present_subgroup, Budget, Certificate, PipelineError};
use crate::stacking::{check_branched_good_stacking, Missing, Verdict};
use crate::words::{dehn_solve, DehnOutcome, Word};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

pub const SEED_VAR: &str = "ORELCO_SEED";

#[derive(Parser, Debug)]
#[command(name = "orelco", version, about = "Folding, covers and subgroup presentations for one-relator groups with torsion")]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, global = true, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Define or validate a group file.
    Group {
        #[command(subcommand)]
        action: GroupCmd,
    },
    /// Word problem by Dehn's algorithm.
    Word {
        #[command(subcommand)]
        action: WordCmd,
    },
    /// Unwrapped covers.
    Cover {
        #[command(subcommand)]
        action: CoverCmd,
    },
    /// Subgroup presentations.
    Subgroup {
        #[command(subcommand)]
        action: SubgroupCmd,
    },
    /// w-cycles audits.
    Audit {
        #[command(subcommand)]
        action: AuditCmd,
    },
    /// Fold a morphism into an immersion.
    Fold(FoldArgs),
    /// Stacking checks.
    Stacking {
        #[command(subcommand)]
        action: StackingCmd,
    },
    /// Graphviz export.
    Export {
        #[command(subcommand)]
        action: ExportCmd,
    },
}

#[derive(Subcommand, Debug)]
pub enum GroupCmd {
    /// Builds a group file from a rose, or validates `--group`.
    Define {
        #[arg(long, conflicts_with_all = ["rose", "relator", "branch"])]
        group: Option<PathBuf>,
        /// Comma-separated generator names.
        #[arg(long, value_delimiter = ',', required_unless_present = "group")]
        rose: Vec<String>,
        #[arg(long, required_unless_present = "group")]
        relator: Option<String>,
        #[arg(long, required_unless_present = "group")]
        branch: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum WordCmd {
    Solve {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        word: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum CoverCmd {
    Build {
        #[arg(long)]
        group: PathBuf,
        #[arg(long, default_value_t = 24)]
        max_degree: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum SubgroupCmd {
    Present {
        #[arg(long)]
        group: PathBuf,
        /// Generators of H, comma-separated words.
        #[arg(long, value_delimiter = ',', required = true)]
        gens: Vec<String>,
        #[arg(long, default_value_t = 12)]
        max_word_len: usize,
        #[arg(long, default_value_t = 200)]
        max_stages: usize,
        #[arg(long, default_value_t = 24)]
        max_degree: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum AuditCmd {
    /// Audits one labelled complex, or runs a random campaign.
    Wcycles {
        #[arg(long)]
        group: PathBuf,
        /// Complex whose edges carry group labels.
        #[arg(long, required_unless_present = "campaign", conflicts_with = "campaign")]
        complex: Option<PathBuf>,
        #[arg(long)]
        campaign: bool,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 6)]
        max_vertices: usize,
        #[arg(long, default_value_t = 0.8)]
        edge_density: f64,
        #[arg(long, default_value_t = 0.7)]
        attach_probability: f64,
        /// Suites to run: any of wcycles, fold, covers.
        #[arg(long, value_delimiter = ',', default_value = "wcycles,fold,covers")]
        suites: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Where to persist the campaign CSV.
        #[arg(long)]
        csv_out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct FoldArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    target: PathBuf,
    /// `vmap`/`emap`/`cmap` lines.
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    out_complex: Option<PathBuf>,
    #[arg(long)]
    out_map: Option<PathBuf>,
    #[arg(long)]
    out_trace: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum StackingCmd {
    Check {
        /// Complex followed by `h` lines.
        #[arg(long)]
        stacking: PathBuf,
        /// Also decide whether the stacking is branched over this group.
        #[arg(long)]
        group: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum ExportCmd {
    Dot {
        #[arg(long, required_unless_present = "group", conflicts_with = "group")]
        complex: Option<PathBuf>,
        /// Exports the presentation complex of the group instead.
        #[arg(long)]
        group: Option<PathBuf>,
    },
}

/// Failure carrying its exit status.
struct Fail(i32, String);

type Outcome = Result<i32, Fail>;

fn usage(msg: impl Into<String>) -> Fail {
    Fail(EXIT_USAGE, msg.into())
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn load_group(path: &Path) -> Result<Arc<OneRelatorOrbicomplex>, Fail> {
    let x = format::parse_orbicomplex(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok(Arc::new(x))
}

fn load_complex(path: &Path) -> Result<crate::complex::TwoComplex, Fail> {
    format::parse_complex(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_word(text: &str, gamma: &Graph) -> Result<Word, Fail> {
    Word::parse(text, gamma).map_err(|e| usage(format!("word {text:?}: {e}")))
}

/// Flag, else `ORELCO_SEED`, else 0.
fn resolve_seed(flag: Option<u64>) -> Result<u64, Fail> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| usage(format!("{SEED_VAR}={v:?} is not a seed"))),
        Err(_) => Ok(0),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Fail> {
    out.write_all(text.as_bytes()).map_err(|e| Fail(EXIT_USAGE, format!("write failed: {e}")))
}

/// Parses `args` (program name first) and runs; diagnostics go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let first = e.to_string();
            let first = first.lines().next().unwrap_or("").trim_start_matches("error: ");
            let _ = writeln!(err, "error: usage: {first}");
            return EXIT_USAGE;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(Fail(code, msg)) => {
            for line in msg.lines() {
                let _ = writeln!(err, "error: {line}");
            }
            code
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Outcome {
    let csv = cli.format == OutputFormat::Csv;
    match cli.command {
        Command::Group { action: GroupCmd::Define { group, rose, relator, branch, out: path } } => {
            let x = match group {
                Some(p) => load_group(&p)?,
                None => {
                    let gamma = Graph::rose(&rose);
                    let w = parse_word(relator.as_deref().unwrap_or(""), &gamma)?;
                    let x = OneRelatorOrbicomplex::new(gamma, w, branch.unwrap_or(1)).map_err(|e| usage(e.to_string()))?;
                    Arc::new(x)
                }
            };
            emit(out, &format!("# orelco group define relator=\"{}\" branch={}\n", x.relator().render(x.gamma()), x.branch()))?;
            let text = format::write_orbicomplex(&x);
            match path {
                Some(p) => write_file(&p, &text)?,
                None => emit(out, &text)?,
            }
            Ok(EXIT_OK)
        }
        Command::Word { action: WordCmd::Solve { group, word } } => {
            let x = load_group(&group)?;
            let u = parse_word(&word, x.gamma())?;
            emit(out, &format!("# orelco word solve group={} word=\"{}\"\n", group.display(), u.render(x.gamma())))?;
            let res = dehn_solve(&u, &x).map_err(|e| usage(e.to_string()))?;
            let (verdict, remnant) = match &res {
                DehnOutcome::Trivial { .. } => ("trivial", String::new()),
                DehnOutcome::Nontrivial { remnant, .. } => ("nontrivial", remnant.render(x.gamma())),
            };
            if csv {
                emit(out, &format!("word,result,steps,remnant\n{},{verdict},{},{remnant}\n", u.render(x.gamma()), res.trace().len()))?;
            } else {
                let mut s = format!("{verdict}\n");
                if !res.is_trivial() {
                    s.push_str(&format!("remnant: {remnant}\n"));
                }
                for (i, r) in res.trace().iter().enumerate() {
                    s.push_str(&format!("step {i}: {r}\n"));
                }
                emit(out, &s)?;
            }
            Ok(EXIT_OK)
        }
        Command::Cover { action: CoverCmd::Build { group, max_degree, seed, out: path } } => {
            let x = load_group(&group)?;
            let seed = resolve_seed(seed)?;
            emit(out, &format!("# orelco cover build group={} max-degree={max_degree} seed={seed}\n", group.display()))?;
            let q = find_exponent_n_quotient(&x, max_degree, seed).map_err(cover_fail)?;
            let c = build_unwrapped_cover(&x, &q).map_err(cover_fail)?;
            let r = verify_cover(&c).map_err(cover_fail)?;
            let y = &*c.cover;
            let summary = format!(
                "degree={} vertices={} edges={} cells={} chi={} expected_chi={}",
                r.degree,
                y.num_vertices(),
                y.num_edges(),
                y.num_cells(),
                r.chi,
                r.expected_chi
            );
            if csv {
                emit(out, "degree,vertices,edges,cells,chi,expected_chi\n")?;
                emit(out, &format!("{},{},{},{},{},{}\n", r.degree, y.num_vertices(), y.num_edges(), y.num_cells(), r.chi, r.expected_chi))?;
            } else {
                emit(out, &format!("# {summary}\n"))?;
            }
            let text = format::write_cover(&c);
            match path {
                Some(p) => write_file(&p, &text)?,
                None if !csv => emit(out, &text)?,
                None => {}
            }
            Ok(EXIT_OK)
        }
        Command::Subgroup {
            action: SubgroupCmd::Present { group, gens, max_word_len, max_stages, max_degree, seed, out: path },
        } => {
            let x = load_group(&group)?;
            let seed = resolve_seed(seed)?;
            let words = gens.iter().map(|g| parse_word(g, x.gamma())).collect::<Result<Vec<_>, _>>()?;
            let rendered: Vec<String> = words.iter().map(|w| w.render(x.gamma())).collect();
            emit(
                out,
                &format!(
                    "# orelco subgroup present group={} gens=\"{}\" max-word-len={max_word_len} max-stages={max_stages} max-degree={max_degree} seed={seed}\n",
                    group.display(),
                    rendered.join(",")
                ),
            )?;
            let budget = Budget { max_word_len, max_stages, max_degree, seed };
            let report = present_subgroup(&words, &x, budget).map_err(pipeline_fail)?;
            let text = format::write_presentation(&report.presentation, x.gamma());
            if csv {
                emit(out, &report.stage_table())?;
            } else {
                emit(out, &report.summary())?;
                emit(out, &format!("{}\n", report.presentation))?;
                emit(out, &format!("chi: {}\n", report.presentation.euler_characteristic()))?;
            }
            match path {
                Some(p) => write_file(&p, &text)?,
                None if !csv => emit(out, &text)?,
                None => {}
            }
            Ok(match report.presentation.certificate {
                Certificate::Inconclusive => EXIT_INCONCLUSIVE,
                _ => EXIT_OK,
            })
        }
        Command::Audit {
            action:
                AuditCmd::Wcycles {
                    group,
                    complex,
                    campaign,
                    trials,
                    max_vertices,
                    edge_density,
                    attach_probability,
                    suites,
                    seed,
                    csv_out,
                },
        } => {
            let x = load_group(&group)?;
            if !campaign {
                let path = complex.expect("clap requires --complex without --campaign");
                emit(out, &format!("# orelco audit wcycles group={} complex={}\n", group.display(), path.display()))?;
                let y = Arc::new(load_complex(&path)?);
                let m = OrbiMorphism::from_labels(y, x).map_err(usage)?;
                let r = wcycles_audit(&m).map_err(|e| usage(e.to_string()))?;
                if csv {
                    emit(out, &format!("{}\n{}\n", AuditReport::csv_header(), r.csv_row(&path.display().to_string())))?;
                } else {
                    emit(out, &format!("{r}\n"))?;
                }
                return Ok(if r.pass { EXIT_OK } else { EXIT_VIOLATION });
            }
            let seed = resolve_seed(seed)?;
            let mut chosen = Suites { wcycles: false, folding: false, covers: false };
            for s in &suites {
                match s.as_str() {
                    "wcycles" => chosen.wcycles = true,
                    "fold" => chosen.folding = true,
                    "covers" => chosen.covers = true,
                    other => return Err(usage(format!("unknown suite {other}"))),
                }
            }
            if !(0.0..=1.0).contains(&edge_density) || !(0.0..=1.0).contains(&attach_probability) || max_vertices == 0 {
                return Err(usage("densities must lie in [0, 1] and max-vertices must be positive"));
            }
            emit(
                out,
                &format!(
                    "# orelco audit wcycles group={} campaign trials={trials} max-vertices={max_vertices} edge-density={edge_density} attach-probability={attach_probability} suites={} seed={seed}\n",
                    group.display(),
                    suites.join(",")
                ),
            )?;
            let cfg = CampaignConfig {
                seed,
                trials,
                x,
                max_vertices,
                edge_density,
                attach_probability,
                suites: chosen,
            };
            let report = run_property_campaign(&cfg).map_err(|e| Fail(EXIT_VIOLATION, e.to_string()))?;
            if let Some(p) = csv_out {
                write_file(&p, &report.csv())?;
            }
            if csv {
                emit(out, &report.csv())?;
            } else {
                emit(out, &report.summary())?;
            }
            Ok(EXIT_OK)
        }
        Command::Fold(a) => {
            emit(
                out,
                &format!("# orelco fold source={} target={} map={}\n", a.source.display(), a.target.display(), a.map.display()),
            )?;
            let source = Arc::new(load_complex(&a.source)?);
            let target = Arc::new(load_complex(&a.target)?);
            let m = format::parse_morphism(&read(&a.map)?, source, target).map_err(|e| usage(format!("{}: {e}", a.map.display())))?;
            let r = fold(&m).map_err(|e| usage(e.to_string()))?;
            if !r.inclusion.is_immersion() {
                return Err(Fail(EXIT_VIOLATION, "folded map is not an immersion".into()));
            }
            let c = format::write_complex(&r.folded);
            let mp = format::write_morphism(&r.inclusion);
            let t = format::write_trace(&r.trace);
            let y = &*r.folded;
            if csv {
                emit(out, "vertices,edges,cells,steps\n")?;
                emit(out, &format!("{},{},{},{}\n", y.num_vertices(), y.num_edges(), y.num_cells(), r.trace.len()))?;
            } else {
                emit(out, &format!("# folded complex\n{c}# map to target\n{mp}# trace\n{t}"))?;
            }
            for (path, text) in [(&a.out_complex, &c), (&a.out_map, &mp), (&a.out_trace, &t)] {
                if let Some(p) = path {
                    write_file(p, text)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Stacking { action: StackingCmd::Check { stacking, group } } => {
            let s = format::parse_stacking(&read(&stacking)?).map_err(|e| usage(format!("{}: {e}", stacking.display())))?;
            emit(out, &format!("# orelco stacking check stacking={}\n", stacking.display()))?;
            let verdict = match s.check_good() {
                Ok(v) => v,
                Err(e) => {
                    return Err(Fail(EXIT_VIOLATION, e.to_string()));
                }
            };
            let line = match verdict {
                Verdict::Good => "good".to_string(),
                Verdict::NotGood { cell, missing } => format!(
                    "not good: cell {} has no {} position",
                    s.complex.cell(cell).name,
                    match missing {
                        Missing::Max => "topmost",
                        Missing::Min => "bottommost",
                    }
                ),
            };
            emit(out, &format!("{line}\n"))?;
            if let Some(g) = group {
                let x = load_group(&g)?;
                let b = check_branched_good_stacking(&x, &s).map_err(|e| Fail(EXIT_VIOLATION, e.to_string()))?;
                emit(out, &format!("branched: {b}\n"))?;
            }
            Ok(if verdict == Verdict::Good { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::Export { action: ExportCmd::Dot { complex, group } } => {
            let y = match (complex, group) {
                (Some(p), _) => load_complex(&p)?,
                (None, Some(g)) => load_group(&g)?.presentation_complex(),
                (None, None) => unreachable!("clap requires one source"),
            };
            emit(out, &format::to_dot(&y))?;
            Ok(EXIT_OK)
        }
    }
}

fn cover_fail(e: CoverError) -> Fail {
    match e {
        CoverError::BudgetExhausted { .. } => Fail(EXIT_INCONCLUSIVE, e.to_string()),
        CoverError::Verification(_) | CoverError::ExponentCondition { .. } => Fail(EXIT_VIOLATION, e.to_string()),
        _ => usage(e.to_string()),
    }
}

fn pipeline_fail(e: PipelineError) -> Fail {
    match e {
        PipelineError::Cover(c) => cover_fail(c),
        PipelineError::NoTorsion(_) | PipelineError::Empty | PipelineError::NotInKernel(_) => usage(e.to_string()),
        _ => Fail(EXIT_VIOLATION, e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("orelco").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn unknown_flag_is_usage() {
        let (code, _, err) = run_str(&["word", "solve", "--bogus"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.starts_with("error:"));
    }

    #[test]
    fn define_echoes_and_emits() {
        let (code, out, _) = run_str(&["group", "define", "--rose", "a,b", "--relator", "a b", "--branch", "2"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("# orelco group define"));
        assert!(out.contains("relator a b\nbranch 2\n"));
    }

    #[test]
    fn missing_file() {
        let (code, _, err) = run_str(&["word", "solve", "--group", "/nonexistent/g.txt", "--word", "a"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("cannot read"));
    }
}
