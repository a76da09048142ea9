//! Command-line front end: graph construction and export, rule verification
//! against the brute-force counts, eigenfunction solving, cusp-space and
//! toroidal checks, and a golden mode that re-derives the frozen regression
//! tables.
//!
//! Exit codes: 0 on success, 1 on a verification mismatch, 2 on usage or
//! environment errors. Output is byte-identical across reruns of the same
//! invocation.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num::rational::BigRational;
use num::traits::One;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use hecke_core::bundles::ProjectiveType;
use hecke_core::eigenform::{
    format_rational, parse_rational, solve_by_elimination, solve_eigenform,
    verify_hecke_relations, EigenPair, FormTableFile,
};
use hecke_core::extensions::cusp_space_report;
use hecke_core::hecke::{build_graph, HeckeEdge, HeckeGraph};
use hecke_core::oracle::{neighbor_oracle, verify_rules, CountEntry, VerifyReport};
use hecke_core::toroidal::{toroidal_eigen_intersection, toroidal_sum, IntersectionVerdict};

#[derive(Parser)]
#[command(name = "hecke", version, about = "Exact operator graphs, eigenfunctions, and vanishing checks for rank-3 bundle classes on the projective line")]
struct Cli {
    /// Re-derive the frozen regression tables and diff them
    #[arg(long, global = true)]
    golden: bool,

    /// With --golden: rewrite the frozen tables instead of diffing
    #[arg(long, global = true)]
    write: bool,

    /// Output file; stdout when omitted. Relative paths resolve against
    /// $HECKE_OUT_DIR when that variable is set.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format where the command supports a choice
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads for the verification commands
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Seed for randomized batches
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build one operator graph on the truncated class set and export it
    Graph {
        /// Operator index: 1, 2 or 3
        #[arg(long = "r")]
        r: u8,
        /// Truncation bound on the gap vector
        #[arg(long = "D")]
        bound: i64,
    },
    /// Check the closed-form neighbor rules against brute-force counts
    OracleVerify {
        #[arg(long = "D")]
        bound: i64,
        /// Prime to count over
        #[arg(long)]
        q0: u64,
    },
    /// Solve the eigenfunction table for one eigenvalue pair and verify it
    Eigenform {
        #[arg(long)]
        q0: u64,
        #[arg(long = "D")]
        bound: i64,
        /// Eigenvalue pair as two exact rationals, e.g. 3/2,5
        #[arg(long)]
        lambda: String,
        /// Value at the trivial class
        #[arg(long, default_value = "1")]
        f0: String,
    },
    /// Build the cusp-vanishing system and report its solution dimension
    CuspCheck {
        #[arg(long = "D")]
        bound: i64,
        #[arg(long)]
        q0: u64,
    },
    /// Check that no nonzero eigenfunction has vanishing coset sum
    ToroidalCheck {
        #[arg(long)]
        q0: u64,
        #[arg(long = "D")]
        bound: i64,
        /// Single eigenvalue pair, e.g. 1,1
        #[arg(long)]
        lambda: Option<String>,
        /// Number of seeded random eigenvalue pairs instead of --lambda
        #[arg(long)]
        random: Option<usize>,
    },
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Eq)]
struct Meta {
    tool: String,
    version: String,
}

impl Meta {
    fn current() -> Self {
        Meta { tool: "hecke".into(), version: env!("CARGO_PKG_VERSION").into() }
    }
}

#[derive(Serialize)]
struct GraphFile<'a> {
    meta: Meta,
    operator: u8,
    bound: i64,
    vertices: &'a [ProjectiveType],
    edges: &'a [HeckeEdge],
    boundary: &'a BTreeSet<ProjectiveType>,
}

#[derive(Serialize)]
struct VerifyFile<'a> {
    meta: Meta,
    #[serde(flatten)]
    report: &'a VerifyReport,
}

#[derive(Serialize)]
struct EigenFile {
    meta: Meta,
    #[serde(flatten)]
    table: FormTableFile,
}

#[derive(Serialize)]
struct ToroidalRun {
    lambda: Vec<String>,
    sum: String,
    verdict: String,
}

#[derive(Serialize)]
struct ToroidalFile {
    meta: Meta,
    q0: u64,
    bound: i64,
    seed: u64,
    runs: Vec<ToroidalRun>,
    all_trivial: bool,
}

fn resolve_out(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os("HECKE_OUT_DIR") {
        Some(dir) => PathBuf::from(dir).join(path),
        None => path.to_path_buf(),
    }
}

fn emit(cli: &Cli, payload: &str) -> anyhow::Result<()> {
    match &cli.out {
        None => {
            print!("{payload}");
            Ok(())
        }
        Some(path) => {
            let path = resolve_out(path);
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)
                        .with_context(|| format!("creating {}", parent.display()))?;
                }
            }
            std::fs::write(&path, payload).with_context(|| format!("writing {}", path.display()))
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn graph_csv(g: &HeckeGraph) -> String {
    let mut out = String::from("src_g1,src_g2,dst_g1,dst_g2,weight,src_boundary\n");
    for e in &g.edges {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            e.src.gaps()[0],
            e.src.gaps()[1],
            e.dst.gaps()[0],
            e.dst.gaps()[1],
            e.weight,
            !g.is_interior(&e.src),
        ));
    }
    out
}

fn table_csv(file: &FormTableFile) -> String {
    let mut out = String::from("g1,g2,value\n");
    for v in &file.values {
        out.push_str(&format!("{},{},{}\n", v.ty[0], v.ty[1], v.value));
    }
    out
}

fn parse_lambda(s: &str) -> anyhow::Result<EigenPair> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| anyhow!("--lambda expects two comma-separated rationals, e.g. 3/2,5"))?;
    Ok(EigenPair::new(parse_rational(a)?, parse_rational(b)?))
}

fn random_pair(rng: &mut StdRng) -> EigenPair {
    let rat = |rng: &mut StdRng| {
        BigRational::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=9).into())
    };
    EigenPair::new(rat(rng), rat(rng))
}

// ---- golden regression tables ----

const GOLDEN_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/golden");
const GOLDEN_LAMBDA0: &str = "lambda0_q2_D6.json";
const GOLDEN_ORACLE: &str = "oracle_counts_q2_D3.json";

#[derive(Serialize, Deserialize, PartialEq, Eq, Clone)]
struct GoldenOracleEntry {
    vertex: Vec<i64>,
    r: u8,
    counts: Vec<CountEntry>,
}

fn derive_lambda0_table() -> anyhow::Result<FormTableFile> {
    let pair = EigenPair::from_i64(0, 0);
    // derived with the elimination route, independently of the recursion
    let table = solve_by_elimination(&pair, 2, 6, &BigRational::one())?;
    let recursive = solve_eigenform(&pair, 2, 6, &BigRational::one());
    if table != recursive {
        bail!("elimination and recursion disagree on the lambda = 0 table");
    }
    Ok(FormTableFile::from_table(&table, &pair))
}

fn derive_oracle_counts() -> anyhow::Result<Vec<GoldenOracleEntry>> {
    let mut out = Vec::new();
    for vertex in hecke_core::bundles::enumerate_pbun(3, 3) {
        for r in [1u8, 2] {
            let counts = neighbor_oracle(&vertex, r as usize, 2)?;
            out.push(GoldenOracleEntry {
                vertex: vertex.gaps().to_vec(),
                r,
                counts: counts
                    .counts
                    .iter()
                    .map(|(p, &c)| CountEntry { ty: p.gaps().to_vec(), count: c })
                    .collect(),
            });
        }
    }
    Ok(out)
}

fn run_golden(write: bool) -> anyhow::Result<i32> {
    let lambda0_path = PathBuf::from(GOLDEN_DIR).join(GOLDEN_LAMBDA0);
    let oracle_path = PathBuf::from(GOLDEN_DIR).join(GOLDEN_ORACLE);
    let lambda0 = derive_lambda0_table()?;
    let oracle = derive_oracle_counts()?;
    if write {
        std::fs::create_dir_all(GOLDEN_DIR)?;
        std::fs::write(&lambda0_path, to_json(&lambda0)?)?;
        std::fs::write(&oracle_path, to_json(&oracle)?)?;
        println!("golden tables written to {GOLDEN_DIR}");
        return Ok(0);
    }
    let mut ok = true;
    let frozen_lambda0: FormTableFile = serde_json::from_str(
        &std::fs::read_to_string(&lambda0_path)
            .with_context(|| format!("reading {}", lambda0_path.display()))?,
    )?;
    if frozen_lambda0 == lambda0 {
        println!("golden {GOLDEN_LAMBDA0}: OK");
    } else {
        println!("golden {GOLDEN_LAMBDA0}: DIFF");
        ok = false;
    }
    let frozen_oracle: Vec<GoldenOracleEntry> = serde_json::from_str(
        &std::fs::read_to_string(&oracle_path)
            .with_context(|| format!("reading {}", oracle_path.display()))?,
    )?;
    if frozen_oracle == oracle {
        println!("golden {GOLDEN_ORACLE}: OK");
    } else {
        println!("golden {GOLDEN_ORACLE}: DIFF");
        ok = false;
    }
    Ok(if ok { 0 } else { 1 })
}

fn run(cli: &Cli) -> anyhow::Result<i32> {
    if let Some(jobs) = cli.jobs {
        // deterministic output regardless of pool size; ignore double init
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    if cli.golden {
        return run_golden(cli.write);
    }
    let Some(command) = &cli.command else {
        bail!("a subcommand is required unless --golden is given");
    };
    match command {
        Cmd::Graph { r, bound } => {
            if !(1..=3).contains(r) {
                bail!("--r must be 1, 2 or 3");
            }
            if *bound < 1 {
                bail!("--D must be at least 1");
            }
            let g = build_graph(*r, *bound)?;
            let payload = match cli.format {
                Format::Dot => g.to_dot(),
                Format::Csv => graph_csv(&g),
                Format::Json => to_json(&GraphFile {
                    meta: Meta::current(),
                    operator: g.operator,
                    bound: g.bound,
                    vertices: &g.vertices,
                    edges: &g.edges,
                    boundary: &g.boundary,
                })?,
            };
            emit(cli, &payload)?;
            Ok(0)
        }
        Cmd::OracleVerify { bound, q0 } => {
            if cli.format != Format::Json {
                bail!("oracle-verify only emits json");
            }
            let report = verify_rules(*bound, &[*q0])?;
            let payload = to_json(&VerifyFile { meta: Meta::current(), report: &report })?;
            emit(cli, &payload)?;
            eprintln!("checked {} rule rows, {} mismatches", report.checked, report.mismatches.len());
            Ok(if report.is_clean() { 0 } else { 1 })
        }
        Cmd::Eigenform { q0, bound, lambda, f0 } => {
            if cli.format == Format::Dot {
                bail!("eigenform emits json or csv");
            }
            let pair = parse_lambda(lambda)?;
            let f0 = parse_rational(f0)?;
            let table = solve_eigenform(&pair, *q0, *bound, &f0);
            let check = solve_by_elimination(&pair, *q0, *bound, &f0)?;
            if table != check {
                bail!("recursion and elimination disagree; this is a bug");
            }
            let relations = verify_hecke_relations(&table, &pair)?;
            let file = FormTableFile::from_table(&table, &pair);
            let payload = match cli.format {
                Format::Csv => table_csv(&file),
                _ => to_json(&EigenFile { meta: Meta::current(), table: file })?,
            };
            emit(cli, &payload)?;
            eprintln!(
                "verified {} relation rows, {} violations",
                relations.checked,
                relations.violations.len()
            );
            Ok(if relations.is_clean() { 0 } else { 1 })
        }
        Cmd::CuspCheck { bound, q0 } => {
            if cli.format != Format::Json {
                bail!("cusp-check only emits json");
            }
            let report = cusp_space_report(*bound, *q0)?;
            #[derive(Serialize)]
            struct CuspFile {
                meta: Meta,
                #[serde(flatten)]
                report: hecke_core::extensions::CuspReport,
            }
            let dimension = report.dimension;
            let payload = to_json(&CuspFile { meta: Meta::current(), report })?;
            emit(cli, &payload)?;
            Ok(if dimension == 0 { 0 } else { 1 })
        }
        Cmd::ToroidalCheck { q0, bound, lambda, random } => {
            if cli.format != Format::Json {
                bail!("toroidal-check only emits json");
            }
            let pairs: Vec<EigenPair> = match (lambda, random) {
                (Some(l), None) => vec![parse_lambda(l)?],
                (None, Some(n)) => {
                    let mut rng = StdRng::seed_from_u64(cli.seed);
                    (0..*n).map(|_| random_pair(&mut rng)).collect()
                }
                (Some(_), Some(_)) => bail!("--lambda and --random are mutually exclusive"),
                (None, None) => bail!("toroidal-check needs --lambda or --random"),
            };
            let mut runs = Vec::new();
            let mut all_trivial = true;
            for pair in &pairs {
                let table = solve_eigenform(pair, *q0, *bound, &BigRational::one());
                let sum = toroidal_sum(&table)?.sum;
                let verdict = toroidal_eigen_intersection(pair, *q0, *bound)?;
                let trivial = verdict == IntersectionVerdict::TrivialIntersection;
                all_trivial &= trivial;
                runs.push(ToroidalRun {
                    lambda: vec![format_rational(&pair.lambda1), format_rational(&pair.lambda2)],
                    sum: format_rational(&sum),
                    verdict: if trivial { "trivial intersection".into() } else { "nontrivial".into() },
                });
            }
            let payload = to_json(&ToroidalFile {
                meta: Meta::current(),
                q0: *q0,
                bound: *bound,
                seed: cli.seed,
                runs,
                all_trivial,
            })?;
            emit(cli, &payload)?;
            Ok(if all_trivial { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
