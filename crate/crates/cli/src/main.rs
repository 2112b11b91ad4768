//! raagws: Whitehead calculus for right-angled Artin groups.
//!
//! Graphs, partitions and markings are given either inline as JSON or as a
//! path to a JSON file; words use the text form `a b^-1 c`.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use raagws_core::complex::{
    build_blowup, collapse, min_path_lift, verify_complex, EdgeLabel,
};
use raagws_core::rose::{
    factor, minimal_norm0, norm0_of_images, partitions_of, peak_reduce, rose_from_images,
    Factorization,
};
use raagws_core::spine::{
    complex_dot, complex_json, enumerate_roses, rose_graph_dot, rose_graph_json, star_poset,
    star_poset_dot, star_poset_json, DEFAULT_POSET_CAP,
};
use raagws_core::stargraph::crossing_counts;
use raagws_core::suites::{run_suite, suite_names};
use raagws_core::wire;
use raagws_core::{DefiningGraph, Word};
use serde_json::{json, Value};
use std::fs;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "raagws", version, about = "Whitehead partitions, Salvetti blowups and peak reduction for right-angled Artin groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Crossing counts of a partition against a cyclically reduced word.
    Starcount {
        graph: String,
        partition: String,
        word: String,
    },
    /// Build the blowup of a compatible partition system; optionally
    /// collapse hyperplanes and verify the result.
    Blowup {
        graph: String,
        partitions: String,
        /// Hyperplane labels to collapse: "P0", "P1", ... or generator names.
        #[arg(long)]
        collapse: Option<String>,
        #[arg(long)]
        verify: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Also print the minimal lift of this word through the blowup.
        #[arg(long)]
        lift: Option<String>,
    },
    /// Norm data of a marked rose.
    Norm { graph: String, marking: String },
    /// Peak-reduce a marked rose to the minimal rose.
    Reduce {
        graph: String,
        marking: String,
        #[arg(long)]
        trace: bool,
    },
    /// Factor an automorphism into Whitehead moves and an isometry.
    Factor { graph: String, marking: String },
    /// Enumerate the rose graph below a norm bound.
    Spine {
        graph: String,
        #[arg(long = "max-norm")]
        max_norm: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The star poset of ideal forests at a marked rose.
    Star {
        graph: String,
        marking: String,
        #[arg(long)]
        reductive: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long, default_value_t = DEFAULT_POSET_CAP)]
        cap: usize,
    },
    /// Run the verification suites; exit code 0 iff everything passes.
    Verify {
        graph: String,
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
    },
}

fn load_text(spec: &str) -> Result<String> {
    let trimmed = spec.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        Ok(spec.to_string())
    } else {
        fs::read_to_string(spec).with_context(|| format!("reading {spec}"))
    }
}

fn load_graph(spec: &str) -> Result<DefiningGraph> {
    Ok(DefiningGraph::parse(&load_text(spec)?)?)
}

fn load_json(spec: &str) -> Result<Value> {
    Ok(serde_json::from_str(&load_text(spec)?)?)
}

fn parse_labels(g: &DefiningGraph, text: &str) -> Result<Vec<EdgeLabel>> {
    let value: Value = serde_json::from_str(text)
        .unwrap_or_else(|_| Value::Array(text.split(',').map(|s| json!(s.trim())).collect()));
    let items = value
        .as_array()
        .ok_or_else(|| anyhow!("collapse set must be a list of labels"))?;
    items
        .iter()
        .map(|item| {
            let s = item
                .as_str()
                .ok_or_else(|| anyhow!("label must be a string"))?;
            if let Some(idx) = s.strip_prefix('P') {
                if let Ok(i) = idx.parse::<usize>() {
                    return Ok(EdgeLabel::Part(i));
                }
            }
            g.vertex(s)
                .map(EdgeLabel::Gen)
                .ok_or_else(|| anyhow!("unknown label {s:?}"))
        })
        .collect()
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {path:?}")),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Starcount { graph, partition, word } => {
            let g = load_graph(&graph)?;
            let part = wire::partition_from_json(&g, &load_json(&partition)?)?;
            let w = Word::parse(&g, &word)?;
            let w = raagws_core::word::conj_canonical(&g, &w).rep;
            let (crossings, occ) = crossing_counts(&g, &part, &w)?;
            let mut letters = serde_json::Map::new();
            for v in 0..g.n() {
                letters.insert(g.name(v).to_string(), json!(occ[v]));
            }
            println!(
                "{}",
                json!({
                    "word": w.display(&g),
                    "partition_crossings": crossings,
                    "letter_counts": letters,
                })
            );
        }
        Command::Blowup { graph, partitions, collapse: collapse_set, verify, format, lift } => {
            let g = load_graph(&graph)?;
            let parts = wire::partitions_from_json(&g, &load_json(&partitions)?)?;
            let mut x = build_blowup(&g, &parts)?;
            if let Some(set) = collapse_set {
                let labels = parse_labels(&g, &set)?;
                x = collapse(&x, &labels)?;
            }
            if verify {
                let report = verify_complex(&x);
                if !report.is_ok() {
                    bail!("complex verification failed: {:?}", report.failures);
                }
                eprintln!("verify: ok");
            }
            if let Some(word) = lift {
                let w = Word::parse(&g, &word)?;
                let w = raagws_core::word::conj_canonical(&g, &w).rep;
                let (path, counts) = min_path_lift(&g, &parts, &x, &w)?;
                eprintln!(
                    "lift: {} edges, crossings {:?}",
                    path.len(),
                    counts.into_iter().collect::<Vec<_>>()
                );
            }
            match format {
                Format::Json => println!("{}", complex_json(&x)),
                Format::Dot => println!("{}", complex_dot(&x)),
            }
        }
        Command::Norm { graph, marking } => {
            let g = load_graph(&graph)?;
            let images = wire::images_from_json(&g, &load_json(&marking)?)?;
            let rose = rose_from_images(&g, &images)?;
            println!(
                "{}",
                json!({
                    "norm0": rose.norm0(),
                    "minimal_norm0": minimal_norm0(&g),
                    "short_class_lengths": rose.short_class_lengths(),
                    "marking_inverse": wire::images_json(&g, &rose.rho.images),
                })
            );
        }
        Command::Reduce { graph, marking, trace } => {
            let g = load_graph(&graph)?;
            let images = wire::images_from_json(&g, &load_json(&marking)?)?;
            let rose = rose_from_images(&g, &images)?;
            let (terminal, moves) = peak_reduce(&rose);
            if trace {
                let mut cur = rose.clone();
                for (part, m) in &moves {
                    let next = cur.whitehead_move(part, *m)?.0;
                    eprintln!(
                        "norm0 {} -> {} via P={} m={}",
                        cur.norm0(),
                        next.norm0(),
                        part.p.display(&g),
                        Word(vec![*m]).display(&g)
                    );
                    cur = next;
                }
            }
            let moves_json: Vec<Value> = moves
                .iter()
                .map(|(p, m)| {
                    json!({
                        "P": wire::partition_json(&g, p)["P"],
                        "m": wire::letter_json(&g, *m),
                    })
                })
                .collect();
            println!(
                "{}",
                json!({
                    "start_norm0": rose.norm0(),
                    "terminal_norm0": terminal.norm0(),
                    "minimal_norm0": minimal_norm0(&g),
                    "moves": moves_json,
                })
            );
        }
        Command::Factor { graph, marking } => {
            let g = load_graph(&graph)?;
            let images = wire::images_from_json(&g, &load_json(&marking)?)?;
            match factor(&g, &images)? {
                Factorization::InOutL { moves, isometry, .. } => {
                    let moves_json: Vec<Value> = moves
                        .iter()
                        .map(|(p, m)| {
                            json!({
                                "P": wire::partition_json(&g, p)["P"],
                                "m": wire::letter_json(&g, *m),
                            })
                        })
                        .collect();
                    let (perm, flip) = isometry;
                    let mut iso = serde_json::Map::new();
                    for v in 0..g.n() {
                        let target = if flip[v] {
                            format!("{}^-1", g.name(perm[v]))
                        } else {
                            g.name(perm[v]).to_string()
                        };
                        iso.insert(g.name(v).to_string(), json!(target));
                    }
                    println!(
                        "{}",
                        json!({
                            "recognized": true,
                            "moves": moves_json,
                            "isometry": iso,
                        })
                    );
                }
                Factorization::NotRecognized { terminal } => {
                    println!(
                        "{}",
                        json!({
                            "recognized": false,
                            "terminal_norm0": terminal.norm0(),
                            "terminal_marking_inverse":
                                wire::images_json(&g, &terminal.rho.images),
                        })
                    );
                    std::process::exit(2);
                }
            }
        }
        Command::Spine { graph, max_norm, format, out } => {
            let g = load_graph(&graph)?;
            let rg = enumerate_roses(&g, max_norm)?;
            let text = match format {
                Format::Json => rose_graph_json(&g, &rg).to_string(),
                Format::Dot => rose_graph_dot(&rg),
            };
            emit(&out, &text)?;
        }
        Command::Star { graph, marking, reductive, format, cap } => {
            let g = load_graph(&graph)?;
            let images = wire::images_from_json(&g, &load_json(&marking)?)?;
            let rose = rose_from_images(&g, &images)?;
            let sp = star_poset(&g, &rose, reductive, cap)?;
            match format {
                Format::Json => println!("{}", star_poset_json(&g, &sp)),
                Format::Dot => println!("{}", star_poset_dot(&sp)),
            }
        }
        Command::Verify { graph, suite, seed, trials } => {
            if suite != "all" && suite != "lemmas" {
                bail!("unknown suite group {suite:?}; use \"lemmas\" or \"all\"");
            }
            let g = load_graph(&graph)?;
            // Per-graph sanity first: the identity rose is minimal and every
            // single blowup verifies.
            let id = raagws_core::MarkedRose::identity(&g);
            let mut ok = true;
            for part in partitions_of(&g).iter() {
                if part.is_degenerate() {
                    continue;
                }
                if raagws_core::rose::is_reductive(&id, part)?
                    != raagws_core::rose::Reductivity::Not
                {
                    println!("[FAIL] graph-minimality — identity rose reducible");
                    ok = false;
                }
                let x = build_blowup(&g, std::slice::from_ref(part))?;
                if !verify_complex(&x).is_ok() {
                    println!("[FAIL] graph-blowup — single blowup failed verification");
                    ok = false;
                }
            }
            if norm0_of_images(&g, &id.rho.images) != minimal_norm0(&g) {
                println!("[FAIL] graph-norm — identity norm mismatch");
                ok = false;
            }
            if ok {
                println!(
                    "[PASS] graph-checks — {} partitions on {:?}",
                    partitions_of(&g).len(),
                    g
                );
            }
            for name in suite_names(&suite) {
                let outcome = run_suite(name, seed, trials)
                    .ok_or_else(|| anyhow!("unknown suite {name}"))?;
                println!("{}", outcome.line());
                ok &= outcome.passed;
            }
            if !ok {
                std::process::exit(1);
            }
        }
    }
    Ok(())
}
