use std::fs;
use std::io::Write as _;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use subsum::{
    decompose, for_each_automorphism, group_order, Caps, ExportFormat, FieldParams, SearchOptions, SemilinearAuto,
    SumGraph, VertexPermutation,
};

/// Automorphisms decomposed in full by `verify-theorem`; above this a seeded
/// sample of this size is decomposed instead.
const VERIFY_ALL_UP_TO: u64 = 20_000;

#[derive(Parser)]
#[command(name = "subsum", version, about = "Subspace sum graphs over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Space {
    /// Ambient dimension.
    #[arg(long)]
    n: usize,
    /// Field characteristic.
    #[arg(long)]
    p: u32,
    /// Extension degree, q = p^m.
    #[arg(long, default_value_t = 1)]
    m: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Write the vertex table and the graph.
    Build {
        #[command(flatten)]
        space: Space,
        #[arg(long, default_value = "edge-list")]
        format: ExportFormat,
        /// Directory for vertices.tsv and graph.tsv / graph.dot; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-dimension degree table.
    Degrees {
        #[command(flatten)]
        space: Space,
    },
    /// Count automorphisms by exhaustive search.
    AutCount {
        #[command(flatten)]
        space: Space,
        /// Search-node limit.
        #[arg(long)]
        limit: Option<u64>,
    },
    /// Compare the brute-force count with the group order and decompose
    /// the enumerated automorphisms.
    VerifyTheorem {
        #[command(flatten)]
        space: Space,
        #[arg(long)]
        limit: Option<u64>,
        /// Seed for sampling when there are too many automorphisms to decompose all.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decompose a permutation file into (A, s) and write a certificate.
    Decompose {
        #[command(flatten)]
        space: Space,
        /// Permutation file: `src<TAB>dst` per line, 1-based.
        perm: PathBuf,
        /// Certificate path; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a random (A, s) and write perm.tsv and truth.txt.
    RandomAuto {
        #[command(flatten)]
        space: Space,
        #[arg(long)]
        seed: u64,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

struct Config {
    caps: Caps,
    field: FieldParams,
    n: usize,
}

impl Config {
    fn new(space: Space) -> Result<Self> {
        let caps = Caps::from_env()?;
        if space.n == 0 {
            bail!("n must be at least 1");
        }
        let field = FieldParams::with_caps(space.p, space.m, &caps)?;
        Ok(Config { caps, field, n: space.n })
    }

    fn graph(&self) -> Result<SumGraph> {
        if self.n == 1 {
            bail!("vertex set is empty: F_q^1 has no nontrivial proper subspaces");
        }
        let graph = SumGraph::build(&self.field, self.n, &self.caps)?;
        if graph.is_complete_degenerate() {
            eprintln!("warning: n = 2 gives the complete graph on {} vertices", graph.len());
        }
        Ok(graph)
    }

    fn theorem_graph(&self) -> Result<SumGraph> {
        if self.n < 3 {
            bail!("theorem requires n ≥ 3 (got n = {})", self.n);
        }
        self.graph()
    }

    fn search(&self, limit: Option<u64>) -> SearchOptions {
        SearchOptions { node_limit: limit.unwrap_or(self.caps.search_nodes) }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build { space, format, out } => {
            let graph = Config::new(space)?.graph()?;
            let export = graph.export(format);
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
                    let name = match format {
                        ExportFormat::EdgeList => "graph.tsv",
                        ExportFormat::Dot => "graph.dot",
                    };
                    write_output(Some(&dir.join("vertices.tsv")), &graph.vertex_table())?;
                    write_output(Some(&dir.join(name)), &export)?;
                }
                None => write_output(None, &format!("{}\n{export}", graph.vertex_table()))?,
            }
            eprintln!("{} vertices, {} edges", graph.len(), graph.edge_count());
        }
        Command::Degrees { space } => {
            let graph = Config::new(space)?.graph()?;
            let show = |r: &subsum::Result<_>| match r {
                Ok(t) => format!("{t}"),
                Err(_) => "non-integer".to_string(),
            };
            let mut text = String::from("k\tcount\tdirect\tformula\tcorrected\tmatch\n");
            for row in graph.degree_table() {
                if !row.constant {
                    bail!("degree is not constant on dimension {}", row.k);
                }
                text.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\n",
                    row.k,
                    row.count,
                    row.direct,
                    show(&row.formula),
                    show(&row.corrected),
                    if row.formula_matches() { "match" } else { "MISMATCH" }
                ));
            }
            write_output(None, &text)?;
        }
        Command::AutCount { space, limit } => {
            let config = Config::new(space)?;
            let graph = config.graph()?;
            let stats = for_each_automorphism(&graph, config.search(limit), |_| ControlFlow::Continue(()))?;
            println!("{}", stats.automorphisms);
            eprintln!(
                "{} search nodes, {} initial cells, degrees separate dimensions: {}",
                stats.nodes, stats.cells, stats.degrees_separate_dimensions
            );
        }
        Command::VerifyTheorem { space, limit, seed } => verify_theorem(space, limit, seed)?,
        Command::Decompose { space, perm, out } => {
            let graph = Config::new(space)?.theorem_graph()?;
            let text = fs::read_to_string(&perm).with_context(|| format!("reading {}", perm.display()))?;
            let sigma = VertexPermutation::parse_file(&text, graph.len())
                .with_context(|| format!("in {}", perm.display()))?;
            let cert = decompose(&graph, &sigma)?;
            write_output(out.as_deref(), &format!("{}\n", cert.to_json()))?;
            match (&cert.automorphism(), &cert.rejection) {
                (Some(g), _) => eprintln!("verified: {g}"),
                (None, Some(r)) => eprintln!("{r}"),
                (None, None) => eprintln!("not verified"),
            }
        }
        Command::RandomAuto { space, seed, out } => {
            let config = Config::new(space)?;
            let graph = config.theorem_graph()?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = SemilinearAuto::random(&config.field, config.n, &mut rng);
            let sigma = g.as_vertex_permutation(&graph)?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            write_output(Some(&out.join("perm.tsv")), &sigma.to_file_text())?;
            write_output(Some(&out.join("truth.txt")), &format!("{g}\n"))?;
            println!("{g}");
        }
    }
    Ok(())
}

fn verify_theorem(space: Space, limit: Option<u64>, seed: u64) -> Result<()> {
    let config = Config::new(space)?;
    let graph = config.theorem_graph()?;
    let expected = group_order(config.n, &config.field)?.total;

    let mut autos = Vec::new();
    let stats = for_each_automorphism(&graph, config.search(limit), |images| {
        autos.push(VertexPermutation::new(images.to_vec()).expect("search yields bijections"));
        ControlFlow::Continue(())
    })?;
    let count = stats.automorphisms;
    let counts_agree = expected == count.into();

    let chosen: Vec<&VertexPermutation> = if count <= VERIFY_ALL_UP_TO {
        autos.iter().collect()
    } else {
        autos.sort();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx = sample(&mut rng, autos.len(), VERIFY_ALL_UP_TO as usize).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|i| &autos[i]).collect()
    };
    let mut verified = 0usize;
    for sigma in &chosen {
        let cert = decompose(&graph, sigma)?;
        if cert.automorphism().is_some_and(|g| g.as_vertex_permutation(&graph).ok().as_ref() == Some(*sigma)) {
            verified += 1;
        } else if let Some(r) = &cert.rejection {
            eprintln!("automorphism not decomposed: {r}");
        }
    }
    let pass = counts_agree && verified == chosen.len();
    let sampled = if chosen.len() < autos.len() { " (sampled)" } else { "" };
    println!(
        "brute {count} {} closed-form {expected}; {verified}/{} decomposed{sampled}; {}",
        if counts_agree { "==" } else { "!=" },
        chosen.len(),
        if pass { "PASS" } else { "FAIL" }
    );
    if !pass {
        bail!("verification failed");
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
