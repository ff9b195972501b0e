//! `gprod`: command-line frontend.
//!
//! Exit codes: 0 on success, 1 on a domain error, 2 on a parse or usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gprod::cayley::{self, Ball, GeneratingSets};
use gprod::classify::{self, JOptions};
use gprod::export;
use gprod::qmcheck::{AxiomScope, QuasiMedianGraph};
use gprod::specfile::{self, SpecFile};
use gprod::walls;
use gprod::{Error, NormalWord};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "gprod", version, about = "Graph products of groups: normal forms, quasi-median geometry, cubulation, hyperbolicity")]
struct Cli {
    /// Graph-product spec file.
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct BallArgs {
    #[arg(long)]
    radius: u32,
    /// Largest |k| for syllables of infinite vertex groups.
    #[arg(long, default_value_t = 2)]
    bound: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Print the normal form of a word (`e` is the identity).
    Reduce { word: String },
    /// Distance in X(Γ,𝒢) between two words.
    Dist {
        w1: String,
        w2: String,
        /// Use the weighted metric from the vertex generating sets.
        #[arg(long)]
        weighted: bool,
    },
    /// Enumerate a ball around the identity.
    Ball {
        #[command(flatten)]
        ball: BallArgs,
        /// Write DOT to this path (`-` for stdout).
        #[arg(long, conflicts_with = "json")]
        dot: Option<PathBuf>,
        /// Write JSON to this path (`-` for stdout).
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Axiom report for a ball, with seeded distance spot checks.
    Check {
        #[command(flatten)]
        ball: BallArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random vertex pairs to spot-check.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Hyperbolicity and relative hyperbolicity report.
    Classify {
        /// Enumerate only maximal large joins.
        #[arg(long)]
        maximal_joins: bool,
    },
    /// Sector-wall cubulation of a ball.
    Cubulate {
        #[command(flatten)]
        ball: BallArgs,
    },
    /// Product-of-trees embedding of a ball from an optimal colouring.
    Trees {
        #[command(flatten)]
        ball: BallArgs,
    },
    /// Print the spec in canonical form.
    Canon,
    /// Quasi-median report for an edge-list graph file.
    Qm { graph: PathBuf },
    /// Quasi-cubulation of a wall-system file.
    Walls { file: PathBuf },
}

enum Failure {
    Domain(String),
    Parse(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Parse(_) => 2,
        }
    }
}

fn classify_error(e: Error) -> Failure {
    match e {
        Error::Parse(_) | Error::Io(_) | Error::MalformedWord(_) | Error::UnknownVertex(_) => Failure::Parse(e.to_string()),
        Error::InvalidElement { .. } => Failure::Parse(e.to_string()),
        other => Failure::Domain(other.to_string()),
    }
}

fn domain(e: Error) -> Failure {
    match e {
        Error::Parse(_) | Error::Io(_) => Failure::Parse(e.to_string()),
        other => Failure::Domain(other.to_string()),
    }
}

fn load_spec(path: Option<&Path>) -> Result<SpecFile, Failure> {
    let path = path.ok_or_else(|| Failure::Parse("--spec <file> is required".into()))?;
    specfile::read_spec(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("cannot read {}: {e}", path.display())))
}

/// A named word from the spec, or a word expression.
fn word(file: &SpecFile, text: &str) -> Result<NormalWord, Failure> {
    if let Some(w) = file.word(text) {
        return Ok(w.clone());
    }
    file.spec.word(text).map_err(classify_error)
}

fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    export::to_json(value).map_err(domain)
}

fn write_out(path: &Path, text: &str) -> Result<(), Failure> {
    if path.as_os_str() == "-" {
        print!("{text}");
        Ok(())
    } else {
        std::fs::write(path, text).map_err(|e| Failure::Domain(format!("cannot write {}: {e}", path.display())))
    }
}

fn ball(file: &SpecFile, args: &BallArgs) -> Result<Ball, Failure> {
    Ball::new(&file.spec, args.radius, args.bound).map_err(domain)
}

#[derive(Serialize)]
struct BallSummary {
    schema: u32,
    radius: u32,
    bound: u64,
    vertices: usize,
    edges: usize,
    truncated: usize,
}

#[derive(Serialize)]
struct CheckReport {
    schema: u32,
    radius: u32,
    bound: u64,
    vertices: usize,
    edges: usize,
    quasi_median: bool,
    report: export::QmReport,
    seed: u64,
    sampled_pairs: usize,
    distance_mismatches: Vec<[String; 2]>,
}

#[derive(Serialize)]
struct CubulateReport {
    schema: u32,
    radius: u32,
    bound: u64,
    #[serde(flatten)]
    report: walls::BallCubulationReport,
}

#[derive(Serialize)]
struct TreeFactor {
    colour: usize,
    labels: Vec<String>,
    vertices: usize,
    edges: usize,
    tree: bool,
}

#[derive(Serialize)]
struct TreesReport {
    schema: u32,
    radius: u32,
    bound: u64,
    chromatic_number: usize,
    colouring: Vec<usize>,
    factors: Vec<TreeFactor>,
    acyclic: bool,
    interior_pairs: usize,
    distance_equal: bool,
    distance_sandwich_ok: bool,
}

#[derive(Serialize)]
struct QmFileReport {
    schema: u32,
    vertices: usize,
    edges: usize,
    quasi_median: bool,
    report: export::QmReport,
    maximal_prisms: Option<usize>,
}

#[derive(Serialize)]
struct WallsReport {
    schema: u32,
    #[serde(flatten)]
    summary: walls::CubulationSummary,
    distances_match_walls: bool,
    embedding: Vec<usize>,
}

fn run(cli: Cli) -> Result<String, Failure> {
    let spec_path = cli.spec.as_deref();
    match cli.command {
        Command::Reduce { word: text } => {
            let file = load_spec(spec_path)?;
            let w = word(&file, &text)?;
            Ok(format!("{}\n", file.spec.format(&w)))
        }
        Command::Dist { w1, w2, weighted } => {
            let file = load_spec(spec_path)?;
            let (a, b) = (word(&file, &w1)?, word(&file, &w2)?);
            let d = if weighted {
                let gens = GeneratingSets::with_overrides(&file.spec, &file.gens).map_err(domain)?;
                cayley::weighted_distance(&file.spec, &gens, &a, &b).map_err(domain)?
            } else {
                cayley::distance(&file.spec, &a, &b).map_err(domain)? as u64
            };
            Ok(format!("{d}\n"))
        }
        Command::Ball { ball: args, dot, json: json_out } => {
            let file = load_spec(spec_path)?;
            let b = ball(&file, &args)?;
            if let Some(path) = dot {
                write_out(&path, &export::ball_to_dot(&b))?;
                return Ok(String::new());
            }
            if let Some(path) = json_out {
                let doc = export::ball_to_json(&b, &specfile::print_spec(&file));
                write_out(&path, &(json(&doc)? + "\n"))?;
                return Ok(String::new());
            }
            let summary = BallSummary {
                schema: 1,
                radius: b.radius(),
                bound: b.bound(),
                vertices: b.len(),
                edges: b.edges().len(),
                truncated: b.truncated_flags().iter().filter(|&&t| t).count(),
            };
            Ok(json(&summary)? + "\n")
        }
        Command::Check { ball: args, seed, samples } => {
            let file = load_spec(spec_path)?;
            let b = ball(&file, &args)?;
            let report = export::qm_report(b.graph(), b.axiom_scope());
            let interior = b.interior(1);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut mismatches = Vec::new();
            let mut sampled = 0;
            if !interior.is_empty() {
                for _ in 0..samples {
                    let x = interior[rng.gen_range(0..interior.len())];
                    let y = interior[rng.gen_range(0..interior.len())];
                    let bfs = b.graph().bfs(x)[y] as usize;
                    let alg = cayley::distance(&file.spec, b.word(x), b.word(y)).map_err(domain)?;
                    let sep = cayley::separating_hyperplanes(&file.spec, b.word(x), b.word(y)).map_err(domain)?.len();
                    if bfs != alg || alg != sep {
                        mismatches.push([file.spec.format(b.word(x)), file.spec.format(b.word(y))]);
                    }
                    sampled += 1;
                }
            }
            let out = CheckReport {
                schema: 1,
                radius: b.radius(),
                bound: b.bound(),
                vertices: b.len(),
                edges: b.edges().len(),
                quasi_median: report.axioms.is_quasi_median(),
                report,
                seed,
                sampled_pairs: sampled,
                distance_mismatches: mismatches,
            };
            Ok(json(&out)? + "\n")
        }
        Command::Classify { maximal_joins } => {
            let file = load_spec(spec_path)?;
            let opts = JOptions {
                maximal_only: maximal_joins,
                ..Default::default()
            };
            let report = classify::classify(&file.spec, opts).map_err(domain)?;
            Ok(json(&report)? + "\n")
        }
        Command::Cubulate { ball: args } => {
            let file = load_spec(spec_path)?;
            let b = ball(&file, &args)?;
            let report = walls::cubulate_ball(&b).map_err(domain)?;
            let out = CubulateReport {
                schema: 1,
                radius: b.radius(),
                bound: b.bound(),
                report,
            };
            Ok(json(&out)? + "\n")
        }
        Command::Trees { ball: args } => {
            let file = load_spec(spec_path)?;
            let b = ball(&file, &args)?;
            let (chi, colouring) = file.spec.graph().chromatic_number().map_err(domain)?;
            let emb = walls::tree_embedding(&b, &colouring).map_err(domain)?;
            let interior = b.interior(1);
            let (mut equal, mut sandwich, mut pairs) = (true, true, 0);
            for &x in &interior {
                let d = b.graph().bfs(x);
                let sigma = emb.distances_from(x);
                for &y in &interior {
                    let d = d[y] as usize;
                    equal &= sigma[y] == d;
                    sandwich &= d <= sigma[y] && sigma[y] <= 2 * d;
                    pairs += 1;
                }
            }
            let factors = emb
                .factors
                .iter()
                .enumerate()
                .map(|(k, f)| TreeFactor {
                    colour: k,
                    labels: file
                        .spec
                        .graph()
                        .names()
                        .iter()
                        .zip(&colouring)
                        .filter(|(_, &c)| c == k)
                        .map(|(n, _)| n.clone())
                        .collect(),
                    vertices: f.graph.len(),
                    edges: f.graph.edge_count(),
                    tree: f.graph.is_tree(),
                })
                .collect();
            let out = TreesReport {
                schema: 1,
                radius: b.radius(),
                bound: b.bound(),
                chromatic_number: chi,
                colouring,
                factors,
                acyclic: emb.acyclic,
                interior_pairs: pairs,
                distance_equal: equal,
                distance_sandwich_ok: sandwich,
            };
            Ok(json(&out)? + "\n")
        }
        Command::Canon => {
            let file = load_spec(spec_path)?;
            Ok(specfile::print_spec(&file))
        }
        Command::Qm { graph } => {
            let g = specfile::parse_edge_list(&read_file(&graph)?)
                .map_err(|e| Failure::Parse(format!("{}: {e}", graph.display())))?;
            let report = export::qm_report(&g, AxiomScope::Whole);
            let quasi_median = g.is_connected() && report.axioms.is_quasi_median();
            let maximal_prisms = if quasi_median {
                let qm = QuasiMedianGraph::verify(g.clone()).map_err(domain)?;
                Some(qm.maximal_prisms().map_err(domain)?.len())
            } else {
                None
            };
            let out = QmFileReport {
                schema: 1,
                vertices: g.len(),
                edges: g.edge_count(),
                quasi_median,
                report,
                maximal_prisms,
            };
            Ok(json(&out)? + "\n")
        }
        Command::Walls { file } => {
            let text = read_file(&file)?;
            let space = specfile::parse_walls(&text).map_err(|e| match e {
                Error::Parse(_) => Failure::Parse(format!("{}: {e}", file.display())),
                other => Failure::Domain(format!("{}: {other}", file.display())),
            })?;
            let cub = space.quasi_cubulate().map_err(domain)?;
            let out = WallsReport {
                schema: 1,
                summary: cub.summary(&space),
                distances_match_walls: cub.distances_match_walls(),
                embedding: cub.embedding.clone(),
            };
            Ok(json(&out)? + "\n")
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Reduce { .. } => "reduce",
        Command::Dist { .. } => "dist",
        Command::Ball { .. } => "ball",
        Command::Check { .. } => "check",
        Command::Classify { .. } => "classify",
        Command::Cubulate { .. } => "cubulate",
        Command::Trees { .. } => "trees",
        Command::Canon => "canon",
        Command::Qm { .. } => "qm",
        Command::Walls { .. } => "walls",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = command_name(&cli.command);
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            let (Failure::Domain(msg) | Failure::Parse(msg)) = &f;
            eprintln!("error: {name}: {msg}");
            ExitCode::from(f.code())
        }
    }
}
