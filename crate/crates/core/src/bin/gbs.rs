//! `gbs` — command-line front end for the GBS graph calculus.
//!
//! One verb per operation; all output is deterministic given the inputs
//! (sorted orders, no timestamps). Exit status: 0 on success, 1 on domain
//! errors (precondition failures, parse errors in input files), 2 on usage
//! errors (unknown verbs or flags, missing arguments).
//!
//! The global `--porcelain` flag switches every table to header-less
//! tab-separated values for scripting; the default is an aligned,
//! human-readable table. The environment variable `GBS_BALL_CAP` overrides
//! the tree-ball size guard for the `ball` and `fold-type` verbs.

use std::error::Error;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use gbs_core::ball::{expand_ball_capped, fold_type, TreeBall, DEFAULT_BALL_CAP};
use gbs_core::bound::ChainComplex2;
use gbs_core::chains::{verify_family, ChainSpec};
use gbs_core::moves::{
    self, apply_log, essential_vertices, log_text, parse_log, reduce_graph, transport_word,
    MoveRecord,
};
use gbs_core::word::parse_words;
use gbs_core::{GbsGraph, GogWord};

/// Computations with labeled graphs of infinite cyclic groups: elementary
/// deformations, Bass-Serre tree balls, element translation lengths,
/// accessibility bound reports, and segment (chain) families.
#[derive(Debug, Parser)]
#[command(name = "gbs", version)]
struct Cli {
    /// Emit header-less tab-separated values instead of aligned tables.
    #[arg(long, global = true)]
    porcelain: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a graph file and report its basic invariants.
    Validate {
        /// Graph file.
        graph: PathBuf,
    },
    /// Collapse unit-label edges until the graph is reduced.
    Reduce {
        /// Graph file.
        graph: PathBuf,
        /// Write the reduced graph here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Write the move log (replayable via `replay`) to this file.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Collapse one edge.
    Collapse {
        /// Graph file.
        graph: PathBuf,
        /// Oriented edge to collapse, e.g. `e1` or `~e1`; its origin vertex
        /// is removed.
        #[arg(long)]
        edge: String,
        /// Write the resulting graph here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Transport the words in this file through the move.
        #[arg(long)]
        words: Option<PathBuf>,
        /// Write transported words here instead of standard output.
        #[arg(long)]
        words_output: Option<PathBuf>,
    },
    /// Expand a new edge at a vertex, pulling a set of edge ends across it.
    Expand {
        /// Graph file.
        graph: PathBuf,
        /// Vertex to expand at.
        #[arg(long)]
        vertex: String,
        /// Comma-separated oriented edge ends to move (e.g. `e1,~e2`), or
        /// `-` for none.
        #[arg(long)]
        ends: String,
        /// Divisor b: the new edge is labeled 1 at the new vertex and b at
        /// the old one; moved end labels are divided by b.
        #[arg(long)]
        divisor: i64,
        /// Names for the new vertex and edge as `vertex,edge` (default:
        /// fresh `x`, `d`).
        #[arg(long)]
        names: Option<String>,
        /// Write the resulting graph here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Transport the words in this file through the move.
        #[arg(long)]
        words: Option<PathBuf>,
        /// Write transported words here instead of standard output.
        #[arg(long)]
        words_output: Option<PathBuf>,
    },
    /// Subdivide one edge into two through a fresh midpoint.
    Subdivide {
        /// Graph file.
        graph: PathBuf,
        /// Oriented edge to subdivide, e.g. `e1` or `~e1`.
        #[arg(long)]
        edge: String,
        /// Names for the midpoint and the two halves as `vertex,first,second`
        /// (default: fresh `x`, `<e>a`, `<e>b`).
        #[arg(long)]
        names: Option<String>,
        /// Write the resulting graph here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Transport the words in this file through the move.
        #[arg(long)]
        words: Option<PathBuf>,
        /// Write transported words here instead of standard output.
        #[arg(long)]
        words_output: Option<PathBuf>,
    },
    /// List the essential vertices (one per line).
    Essential {
        /// Graph file.
        graph: PathBuf,
    },
    /// Reduce words and report ellipticity and translation length.
    Word {
        /// Graph file.
        graph: PathBuf,
        /// Word file (one `word <base>: ...` per line).
        #[arg(long)]
        words: PathBuf,
    },
    /// Expand a tree ball and print one row per tree vertex.
    Ball {
        /// Graph file.
        graph: PathBuf,
        /// Base vertex of the ball.
        #[arg(long)]
        base: String,
        /// Ball radius (edges).
        #[arg(long)]
        radius: usize,
    },
    /// Classify the fold determined by a vertex and two of its neighbors.
    #[command(name = "fold-type")]
    FoldType {
        /// Graph file.
        graph: PathBuf,
        /// Base vertex of the ball.
        #[arg(long)]
        base: String,
        /// Ball radius (edges).
        #[arg(long)]
        radius: usize,
        /// Ball address of the shared vertex (e.g. `@/e:0`).
        #[arg(long)]
        vertex: String,
        /// Ball address of the first neighbor.
        #[arg(long)]
        u1: String,
        /// Ball address of the second neighbor.
        #[arg(long)]
        u2: String,
    },
    /// Compute δ and the accessibility bound report for a 2-complex.
    Bound {
        /// Complex file (`cell0` / `cell1` / `cell2` lines).
        complex: PathBuf,
        /// First Betti number of the group (caller-supplied).
        #[arg(long, required_unless_present = "beta1_from_complex", conflicts_with = "beta1_from_complex")]
        beta1: Option<u64>,
        /// Use dim H¹(L; Z/2) of the complex as β₁. This is an upper bound
        /// for the group Betti number, not the Betti number itself.
        #[arg(long)]
        beta1_from_complex: bool,
    },
    /// Emit the chain graph for a label spec.
    Chain {
        /// Comma-separated labels q0,...,q(k-1).
        #[arg(long)]
        q: String,
        /// Comma-separated labels r1,...,rk.
        #[arg(long)]
        r: String,
        /// Write the graph here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Decide the 2-generation criterion for a reduced chain spec.
    #[command(name = "check-2gen")]
    Check2Gen {
        /// Comma-separated labels q0,...,q(k-1).
        #[arg(long)]
        q: String,
        /// Comma-separated labels r1,...,rk.
        #[arg(long)]
        r: String,
    },
    /// Verify the distinguished valence-5 chain family up to a length.
    #[command(name = "verify-family")]
    VerifyFamily {
        /// Largest chain length to verify.
        #[arg(long)]
        kmax: usize,
    },
    /// Re-apply a move log to a graph and print the result.
    Replay {
        /// Graph file.
        graph: PathBuf,
        /// Move log file (as written by `reduce --log`).
        #[arg(long)]
        log: PathBuf,
        /// Write the resulting graph here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<(), Box<dyn Error>> {
    let porcelain = cli.porcelain;
    match cli.command {
        Command::Validate { graph } => {
            let g = load_graph(&graph)?;
            let rows = vec![
                kv("vertices", g.vertex_count()),
                kv("edges", g.edge_count()),
                kv("reduced", yes_no(g.is_reduced()?)),
                kv("locally-finite", yes_no(g.is_locally_finite()?)),
                kv("betti", g.first_betti_number()?),
            ];
            print!("{}", render_rows(&rows, porcelain));
        }
        Command::Reduce { graph, output, log } => {
            let g = load_graph(&graph)?;
            let (reduced, records) = reduce_graph(&g)?;
            let cmds: Vec<_> = records.iter().map(MoveRecord::cmd).collect();
            if let Some(path) = log {
                write_output(&path, &log_text(&cmds))?;
            }
            emit(output.as_deref(), &reduced.to_text())?;
        }
        Command::Collapse { graph, edge, output, words, words_output } => {
            let src = load_graph(&graph)?;
            let mut g = src.clone();
            let oe = src.oriented_edge(&edge)?;
            let rec = moves::collapse(&mut g, &oe)?;
            transport_and_emit(&src, &rec, words.as_deref(), words_output.as_deref())?;
            emit(output.as_deref(), &g.to_text())?;
        }
        Command::Expand { graph, vertex, ends, divisor, names, output, words, words_output } => {
            let src = load_graph(&graph)?;
            let mut g = src.clone();
            let v = src.vertex(&vertex)?;
            let moved = parse_ends(&src, &ends)?;
            let rec = match names {
                None => moves::expand(&mut g, &v, &moved, divisor)?,
                Some(names) => {
                    let [x, d] = parse_names::<2>(&names, "vertex,edge")?;
                    moves::expand_named(&mut g, &v, &moved, divisor, &x, &d)?
                }
            };
            transport_and_emit(&src, &rec, words.as_deref(), words_output.as_deref())?;
            emit(output.as_deref(), &g.to_text())?;
        }
        Command::Subdivide { graph, edge, names, output, words, words_output } => {
            let src = load_graph(&graph)?;
            let mut g = src.clone();
            let oe = src.oriented_edge(&edge)?;
            let rec = match names {
                None => moves::subdivide(&mut g, &oe)?,
                Some(names) => {
                    let [x, first, second] = parse_names::<3>(&names, "vertex,first,second")?;
                    moves::subdivide_named(&mut g, &oe, &x, &first, &second)?
                }
            };
            transport_and_emit(&src, &rec, words.as_deref(), words_output.as_deref())?;
            emit(output.as_deref(), &g.to_text())?;
        }
        Command::Essential { graph } => {
            let g = load_graph(&graph)?;
            let mut out = String::new();
            for v in essential_vertices(&g) {
                out.push_str(v.as_str());
                out.push('\n');
            }
            print!("{out}");
        }
        Command::Word { graph, words } => {
            let g = load_graph(&graph)?;
            let list = load_words(&words)?;
            let mut rows = Vec::new();
            for (i, w) in list.iter().enumerate() {
                let reduced = w.reduce(&g)?;
                let length = w.translation_length(&g)?;
                rows.push(vec![
                    (i + 1).to_string(),
                    yes_no(length == 0).to_string(),
                    length.to_string(),
                    reduced.to_string(),
                ]);
            }
            print!("{}", render_table(&["word", "elliptic", "length", "reduced"], &rows, porcelain));
        }
        Command::Ball { graph, base, radius } => {
            let ball = load_ball(&graph, &base, radius)?;
            let mut rows = Vec::new();
            for idx in 0..ball.node_count() {
                let node = ball.node(idx);
                let valence = if ball.is_frontier(idx) {
                    "-".to_string()
                } else {
                    ball.valence(idx).to_string()
                };
                rows.push(vec![
                    ball.address(idx),
                    node.quotient.to_string(),
                    node.depth.to_string(),
                    valence,
                    yes_no(ball.is_inessential(idx)).to_string(),
                ]);
            }
            print!(
                "{}",
                render_table(&["address", "quotient", "depth", "valence", "inessential"], &rows, porcelain)
            );
        }
        Command::FoldType { graph, base, radius, vertex, u1, u2 } => {
            let ball = load_ball(&graph, &base, radius)?;
            let v = ball.resolve(&vertex)?;
            let a = ball.resolve(&u1)?;
            let b = ball.resolve(&u2)?;
            println!("{}", fold_type(&ball, v, a, b)?);
        }
        Command::Bound { complex, beta1, beta1_from_complex } => {
            let c = load_complex(&complex)?;
            let h1 = c.h1_dim_mod2()?;
            let beta1 = if beta1_from_complex { h1 as u64 } else { beta1.expect("clap enforces") };
            let report = c.accessibility_bounds(beta1)?;
            let beta1_note = if beta1_from_complex && !porcelain {
                format!("{beta1} (upper bound: dim H1 of the complex)")
            } else {
                beta1.to_string()
            };
            let rows = vec![
                kv("cells0", c.cell0_count()),
                kv("cells1", c.cell1_count()),
                kv("cells2", c.cell2_count()),
                kv("h1-dim", h1),
                kv("delta", report.delta),
                kv("beta1", beta1_note),
                kv("vertex-bound", report.vertex_bound),
                kv("edge-bound", report.edge_bound),
                kv("total-bound", report.total_bound),
                kv("bf-vertex-bound", report.bf_vertex_bound),
            ];
            print!("{}", render_rows(&rows, porcelain));
        }
        Command::Chain { q, r, output } => {
            let spec = ChainSpec::new(parse_labels(&q)?, parse_labels(&r)?)?;
            emit(output.as_deref(), &spec.make_chain().to_text())?;
        }
        Command::Check2Gen { q, r } => {
            let spec = ChainSpec::new(parse_labels(&q)?, parse_labels(&r)?)?;
            println!("{}", spec.is_two_generated()?);
        }
        Command::VerifyFamily { kmax } => {
            let report = verify_family(kmax)?;
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|row| {
                    vec![
                        row.k.to_string(),
                        row.vertices.to_string(),
                        row.edges.to_string(),
                        row.essential.to_string(),
                        row.valence.to_string(),
                        row.interior_checked.to_string(),
                    ]
                })
                .collect();
            print!(
                "{}",
                render_table(
                    &["k", "vertices", "edges", "essential", "valence", "interior-checked"],
                    &rows,
                    porcelain
                )
            );
        }
        Command::Replay { graph, log, output } => {
            let mut g = load_graph(&graph)?;
            let text = read_file(&log)?;
            let cmds = parse_log(&text).map_err(|e| at_path(&log, e))?;
            apply_log(&mut g, &cmds)?;
            emit(output.as_deref(), &g.to_text())?;
        }
    }
    Ok(())
}

/// Reads a file, prefixing IO errors with the path.
fn read_file(path: &Path) -> Result<String, Box<dyn Error>> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

/// Parses a graph file, prefixing errors with the path.
fn load_graph(path: &Path) -> Result<GbsGraph, Box<dyn Error>> {
    let g = GbsGraph::parse(&read_file(path)?).map_err(|e| at_path(path, e))?;
    g.ensure_valid().map_err(|e| at_path(path, e))?;
    Ok(g)
}

/// Parses a word file, prefixing errors with the path.
fn load_words(path: &Path) -> Result<Vec<GogWord>, Box<dyn Error>> {
    parse_words(&read_file(path)?).map_err(|e| at_path(path, e))
}

/// Parses a complex file, prefixing errors with the path.
fn load_complex(path: &Path) -> Result<ChainComplex2, Box<dyn Error>> {
    ChainComplex2::parse(&read_file(path)?).map_err(|e| at_path(path, e))
}

/// Expands a ball honoring the `GBS_BALL_CAP` override.
fn load_ball(path: &Path, base: &str, radius: usize) -> Result<TreeBall, Box<dyn Error>> {
    let g = load_graph(path)?;
    let base = g.vertex(base)?;
    Ok(expand_ball_capped(&g, &base, radius, ball_cap()?)?)
}

/// The tree-ball size guard, overridable via `GBS_BALL_CAP`.
fn ball_cap() -> Result<u64, Box<dyn Error>> {
    match std::env::var("GBS_BALL_CAP") {
        Err(_) => Ok(DEFAULT_BALL_CAP),
        Ok(raw) => raw
            .trim()
            .parse()
            .map_err(|_| format!("GBS_BALL_CAP must be a nonnegative integer, got {raw:?}").into()),
    }
}

/// Prefixes a domain error with the file it came from.
fn at_path(path: &Path, e: gbs_core::GbsError) -> Box<dyn Error> {
    format!("{}: {e}", path.display()).into()
}

/// Parses `e1,~e2`-style end lists; `-` means the empty list.
fn parse_ends(
    g: &GbsGraph,
    raw: &str,
) -> Result<Vec<gbs_core::OrientedEdge>, Box<dyn Error>> {
    if raw == "-" {
        return Ok(Vec::new());
    }
    raw.split(',')
        .map(|token| g.oriented_edge(token.trim()).map_err(|e| e.into()))
        .collect()
}

/// Splits a `--names` value into exactly N comma-separated identifiers.
fn parse_names<const N: usize>(raw: &str, shape: &str) -> Result<[String; N], Box<dyn Error>> {
    let parts: Vec<String> = raw.split(',').map(|s| s.trim().to_string()).collect();
    parts
        .try_into()
        .map_err(|_| format!("--names takes exactly {N} comma-separated names ({shape})").into())
}

/// Parses a comma-separated integer label list.
fn parse_labels(raw: &str) -> Result<Vec<i64>, Box<dyn Error>> {
    raw.split(',')
        .map(|token| {
            let token = token.trim();
            token.parse().map_err(|_| format!("bad label {token:?} in list {raw:?}").into())
        })
        .collect()
}

/// Transports a word file through a move and emits the results.
fn transport_and_emit(
    src: &GbsGraph,
    rec: &MoveRecord,
    words: Option<&Path>,
    words_output: Option<&Path>,
) -> Result<(), Box<dyn Error>> {
    let Some(path) = words else { return Ok(()) };
    let mut out = String::new();
    for w in load_words(path)? {
        out.push_str(&transport_word(src, rec, &w)?.to_string());
        out.push('\n');
    }
    emit(words_output, &out)
}

/// Writes `text` to the path, or to standard output when absent.
fn emit(path: Option<&Path>, text: &str) -> Result<(), Box<dyn Error>> {
    match path {
        Some(path) => write_output(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Writes a file, prefixing IO errors with the path.
fn write_output(path: &Path, text: &str) -> Result<(), Box<dyn Error>> {
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// A key/value row for the labeled tables.
fn kv(key: &str, value: impl ToString) -> (String, String) {
    (key.to_string(), value.to_string())
}

/// Renders key/value rows: aligned by key width, or TSV under `--porcelain`.
fn render_rows(rows: &[(String, String)], porcelain: bool) -> String {
    if porcelain {
        return rows.iter().map(|(k, v)| format!("{k}\t{v}\n")).collect();
    }
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:width$}  {v}\n")).collect()
}

/// Renders a table: aligned with a header, or header-less TSV under
/// `--porcelain`.
fn render_table(header: &[&str], rows: &[Vec<String>], porcelain: bool) -> String {
    if porcelain {
        return rows.iter().map(|row| format!("{}\n", row.join("\t"))).collect();
    }
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    let push_row = |cells: Vec<&str>, out: &mut String| {
        let mut line = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            line.push_str(&format!("{cell:width$}", width = widths[i]));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    };
    push_row(header.to_vec(), &mut out);
    for row in rows {
        push_row(row.iter().map(String::as_str).collect(), &mut out);
    }
    out
}
