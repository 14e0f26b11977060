//! Command-line front end: `learn`, `synth` and `measure`.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use deptree::{
    default_lattice_order, learn_structure, load_dataset, pair_measure, Dataset, DependenceTree,
    Error, LearnOptions, Measure, SynthSpec, TieBreak,
};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "deptree",
    version,
    about = "Copula-based dependence trees for numeric CSV data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Learn the maximum spanning dependence tree of a CSV file.
    Learn {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = MeasureArg::MiCell)]
        measure: MeasureArg,
        /// Lattice order K; 0 picks max(2, floor(sqrt(T))).
        #[arg(long, default_value_t = 0)]
        lattice_order: usize,
        /// Write the tree as JSON here. Without --json or --dot the JSON goes to stdout.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Seed for the tie-breaking shuffle.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate a synthetic dataset from a JSON spec.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        /// CSV destination; stdout if omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Overrides the seed in the spec.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Report one pairwise measure.
    Measure {
        #[arg(long)]
        input: PathBuf,
        /// Two column names, `A,B`.
        #[arg(long)]
        pair: String,
        #[arg(long, value_enum, default_value_t = MeasureArg::MiCell)]
        measure: MeasureArg,
        #[arg(long, default_value_t = 0)]
        lattice_order: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    Rho,
    MiCell,
    MiKde,
}

impl From<MeasureArg> for Measure {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::Rho => Measure::RhoAbs,
            MeasureArg::MiCell => Measure::MiCell,
            MeasureArg::MiKde => Measure::MiKde,
        }
    }
}

/// Failure carrying its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: io::Error) -> Self {
        Failure::usage(format!("{}: {e}", path.display()))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Invariant(_)) {
            2
        } else {
            1
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Serialize)]
struct JsonEdge<'a> {
    u: &'a str,
    v: &'a str,
    weight: f64,
    signed_value: f64,
}

#[derive(Debug, Serialize)]
struct JsonTree<'a> {
    nodes: &'a [String],
    edges: Vec<JsonEdge<'a>>,
    measure: &'static str,
    lattice_order: usize,
    coverage_ratio: f64,
}

pub fn tree_json(tree: &DependenceTree) -> String {
    let doc = JsonTree {
        nodes: &tree.nodes,
        edges: tree
            .edges
            .iter()
            .map(|e| JsonEdge {
                u: &tree.nodes[e.u],
                v: &tree.nodes[e.v],
                weight: e.weight,
                signed_value: e.signed_value,
            })
            .collect(),
        measure: tree.measure.tag(),
        lattice_order: tree.lattice_order,
        coverage_ratio: tree.coverage_ratio,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("tree serializes");
    s.push('\n');
    s
}

fn dot_quote(name: &str) -> String {
    format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn tree_dot(tree: &DependenceTree) -> String {
    let mut s = String::from("graph deptree {\n");
    for node in &tree.nodes {
        let _ = writeln!(s, "  {};", dot_quote(node));
    }
    for e in &tree.edges {
        let _ = writeln!(
            s,
            "  {} -- {} [label=\"{:.4}\"];",
            dot_quote(&tree.nodes[e.u]),
            dot_quote(&tree.nodes[e.v]),
            e.weight
        );
    }
    s.push_str("}\n");
    s
}

fn read_dataset(path: &Path) -> Result<Dataset, Failure> {
    let file = File::open(path).map_err(|e| Failure::io(path, e))?;
    load_dataset(BufReader::new(file))
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::io(path, e))
}

fn lattice_order(flag: usize) -> Option<usize> {
    (flag != 0).then_some(flag)
}

/// Runs one parsed command, writing reports to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Learn {
            input,
            measure,
            lattice_order: k,
            json,
            dot,
            seed,
        } => {
            let data = read_dataset(&input)?;
            let opts = LearnOptions {
                measure: measure.into(),
                lattice_order: lattice_order(k),
                ties: TieBreak::Shuffled { seed },
            };
            let tree = learn_structure(&data, &opts)?;
            let json_text = tree_json(&tree);
            if let Some(path) = &json {
                write_file(path, &json_text)?;
            }
            if let Some(path) = &dot {
                write_file(path, &tree_dot(&tree))?;
            }
            if json.is_none() && dot.is_none() {
                out.write_all(json_text.as_bytes())
                    .map_err(|e| Failure::usage(e.to_string()))?;
            }
            Ok(())
        }
        Command::Synth { spec, output, seed } => {
            let text = std::fs::read_to_string(&spec).map_err(|e| Failure::io(&spec, e))?;
            let spec = SynthSpec::from_json(&text)?;
            let data = spec.generate(seed)?;
            match output {
                Some(path) => {
                    let file = File::create(&path).map_err(|e| Failure::io(&path, e))?;
                    let mut w = BufWriter::new(file);
                    data.write_csv(&mut w)
                        .and_then(|_| w.flush())
                        .map_err(|e| Failure::io(&path, e))
                }
                None => data
                    .write_csv(out)
                    .map_err(|e| Failure::usage(e.to_string())),
            }
        }
        Command::Measure {
            input,
            pair,
            measure,
            lattice_order: k,
            seed,
        } => {
            let data = read_dataset(&input)?;
            let (a, b) = pair
                .split_once(',')
                .map(|(a, b)| (a.trim(), b.trim()))
                .ok_or_else(|| Failure::usage(format!("--pair expects A,B, got {pair:?}")))?;
            let find = |name: &str| {
                data.column_index(name)
                    .ok_or_else(|| Failure::usage(format!("unknown column {name:?}")))
            };
            let (i, j) = (find(a)?, find(b)?);
            if i == j {
                return Err(Failure::usage(format!("column {a:?} paired with itself")));
            }
            let measure: Measure = measure.into();
            let k = lattice_order(k).unwrap_or_else(|| default_lattice_order(data.n_samples()));
            let (_, signed) = pair_measure(&data, i, j, measure, k, TieBreak::Shuffled { seed })?;
            let report = match measure {
                Measure::RhoAbs => format!("rho({a}, {b}) = {signed}\n"),
                _ => format!("{measure}({a}, {b}) = {signed} (K = {k})\n"),
            };
            out.write_all(report.as_bytes())
                .map_err(|e| Failure::usage(e.to_string()))
        }
    }
}
