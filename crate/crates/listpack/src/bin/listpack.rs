//! Command-line front end: validate covers, build packings, compute exact
//! fractional chromatic numbers, and emit the bundled instances.
//!
//! Exit codes: 0 on success, 1 when an input fails validation (or a
//! requested packing does not exist), 2 on usage errors.

use clap::{Args, Parser, Subcommand};
use listpack::builders::{cartesian_packing, layered_packing, treedepth_packing};
use listpack::caterpillar::caterpillar_packing;
use listpack::compose::{lp_oracle, solve_packing_lp, PackingLpOutcome};
use listpack::cover::{validate_cover, CorrespondenceCover};
use listpack::decomp::{pathwidth_decompose_small, CaterpillarDecomposition, EliminationForest};
use listpack::fcp::{certificate_to_text, fractional_chromatic_number};
use listpack::fixtures;
use listpack::flexibility::flexible_for_degeneracy;
use listpack::graph::{parse_dimacs, Graph, LayerPartition};
use listpack::packing::{validate_packing, PackingDistribution, PackingTarget};
use listpack::{format_rat, format_rat_mixed};
use std::io::Read;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "listpack",
    version,
    about = "Correspondence covers, fractional packings, exact fractional chromatic numbers"
)]
struct Cli {
    /// Seed for randomized test-cover generation (used by `fixture random`).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the structural conditions of a cover file.
    ValidateCover {
        /// Cover file (`cover v1`), `-` for stdin.
        #[arg(long)]
        cover: PathBuf,
    },
    /// Build a fractional packing with one of the constructions.
    Pack {
        #[command(subcommand)]
        method: PackCmd,
    },
    /// Uniform-floor packing for a d-degenerate cover with (d+2)-fold lists.
    Flex {
        #[arg(long)]
        cover: PathBuf,
        /// Degeneracy bound d; every colour then has probability >= 2^-(d+1).
        #[arg(long)]
        degeneracy: usize,
        /// Output packing file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact fractional chromatic number of a graph in DIMACS edge format.
    Chif {
        /// Graph file (stdin when omitted).
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Also write a `chif v1` certificate file.
        #[arg(long)]
        certify: Option<PathBuf>,
    },
    /// Re-validate a packing file against its cover.
    VerifyPacking {
        #[arg(long)]
        cover: PathBuf,
        #[arg(long)]
        packing: PathBuf,
        /// Accept any distribution whose colour probabilities all reach this
        /// floor (e.g. `1/8`) instead of demanding exactly `1/|L(v)|`.
        #[arg(long)]
        floor: Option<String>,
    },
    /// Emit a bundled instance.
    Fixture {
        #[command(subcommand)]
        which: FixtureCmd,
    },
    /// Decompose a graph.
    Decompose {
        #[command(subcommand)]
        what: DecomposeCmd,
    },
}

#[derive(Subcommand)]
enum PackCmd {
    /// Balanced-family packing along a caterpillar decomposition.
    Caterpillar(CaterpillarArgs),
    /// Composition along an elimination forest.
    Treedepth {
        #[arg(long)]
        cover: PathBuf,
        /// Forest file (`forest` header with parent lines).
        #[arg(long)]
        forest: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Composition along a layer partition (`layers v1` file).
    Layered {
        #[arg(long)]
        cover: PathBuf,
        #[arg(long)]
        layers: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Composition over a Cartesian product of two DIMACS graphs.
    Product {
        #[arg(long)]
        cover: PathBuf,
        #[arg(long)]
        g1: PathBuf,
        #[arg(long)]
        g2: PathBuf,
        /// List budget reserved for the first factor.
        #[arg(long)]
        k1: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Direct exact LP over all transversals; reports infeasibility.
    Lp {
        #[arg(long)]
        cover: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CaterpillarArgs {
    #[arg(long)]
    cover: PathBuf,
    /// Caterpillar file (`caterpillar p=.. n=..` with active-set lines).
    #[arg(long)]
    decomp: PathBuf,
    /// Optional DIMACS graph cross-checked against the cover's base.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum FixtureCmd {
    /// 2-fold cube cover with three crossing matchings.
    Q3 {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// 45-vertex benchmark graph in DIMACS edge format.
    AppendixB {
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the list-group metadata, one `group ...` line each.
        #[arg(long)]
        groups: Option<PathBuf>,
    },
    /// q-fold triangle cover with one cyclically shifted matching.
    CyclicShift {
        #[arg(long, default_value_t = 3)]
        fold: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ten-vertex caterpillar instance: writes graph, cover, decomposition.
    Caterpillar {
        /// Files are written as <prefix>.col, <prefix>.cover, <prefix>.cat.
        #[arg(long, default_value = "fig2")]
        out_prefix: String,
    },
    /// Random d-degenerate cover from the seeded generator stream.
    Random {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        degeneracy: usize,
        #[arg(long, default_value_t = 4)]
        fold: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random layered instance: writes a cover and its layer partition.
    Layered {
        #[arg(long, default_value_t = 9)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        fold: usize,
        /// Files are written as <prefix>.cover and <prefix>.layers.
        #[arg(long, default_value = "layered")]
        out_prefix: String,
    },
}

#[derive(Subcommand)]
enum DecomposeCmd {
    /// Exact minimum-width caterpillar decomposition (small graphs).
    Pathwidth {
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(msg) => {
            eprintln!("error: {}", msg);
            std::process::exit(1);
        }
    }
}

fn read_input(path: Option<&Path>) -> Result<String, String> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).map_err(|e| format!("{}: {}", p.display(), e))
        }
        _ => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| format!("stdin: {}", e))?;
            Ok(s)
        }
    }
}

fn write_output(path: Option<&Path>, content: &str) -> Result<(), String> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::write(p, content).map_err(|e| format!("{}: {}", p.display(), e))
        }
        _ => {
            print!("{}", content);
            Ok(())
        }
    }
}

fn load_cover(path: &Path) -> Result<CorrespondenceCover, String> {
    let text = read_input(Some(path))?;
    CorrespondenceCover::from_text(&text).map_err(|e| e.to_string())
}

fn load_graph(path: Option<&Path>) -> Result<Graph, String> {
    let text = read_input(path)?;
    parse_dimacs(&text).map_err(|e| e.to_string())
}

fn layers_to_text(lp: &LayerPartition) -> String {
    let mut s = String::from("layers v1\n");
    for (i, layer) in lp.layers.iter().enumerate() {
        let words: Vec<String> = layer.iter().map(|v| v.to_string()).collect();
        s.push_str(&format!("layer {}: {}\n", i + 1, words.join(" ")));
    }
    s
}

fn layers_from_text(input: &str) -> Result<LayerPartition, String> {
    let mut lines = input.lines().map(str::trim).filter(|l| !l.is_empty());
    match lines.next() {
        Some("layers v1") => {}
        other => return Err(format!("expected 'layers v1' header, found {:?}", other)),
    }
    let mut layers = Vec::new();
    for line in lines {
        let rest = line
            .strip_prefix("layer ")
            .ok_or_else(|| format!("bad line: {}", line))?;
        let (_, verts) = rest
            .split_once(':')
            .ok_or_else(|| format!("bad line: {}", line))?;
        let layer: Vec<usize> = verts
            .split_whitespace()
            .map(|w| w.parse().map_err(|_| format!("bad vertex in: {}", line)))
            .collect::<Result<_, _>>()?;
        if layer.is_empty() {
            return Err(format!("empty layer in: {}", line));
        }
        layers.push(layer);
    }
    if layers.is_empty() {
        return Err("no layer lines".into());
    }
    Ok(LayerPartition::new(layers))
}

fn emit_packing(
    c: &CorrespondenceCover,
    d: &PackingDistribution,
    out: Option<&Path>,
) -> Result<(), String> {
    write_output(out, &d.to_text(&c.sha256()))
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.cmd {
        Cmd::ValidateCover { cover } => {
            let c = load_cover(&cover)?;
            let report = validate_cover(&c);
            if report.is_valid() {
                println!("ok {}", c.sha256());
                Ok(())
            } else {
                for v in &report.violations {
                    eprintln!("violation: {}", v);
                }
                Err(format!("{} violations", report.violations.len()))
            }
        }
        Cmd::Pack { method } => run_pack(method),
        Cmd::Flex {
            cover,
            degeneracy,
            out,
        } => {
            let c = load_cover(&cover)?;
            let d = flexible_for_degeneracy(&c, degeneracy).map_err(|e| e.to_string())?;
            emit_packing(&c, &d, out.as_deref())
        }
        Cmd::Chif { graph, certify } => {
            let g = load_graph(graph.as_deref())?;
            let (value, primal, dual) =
                fractional_chromatic_number(&g).map_err(|e| e.to_string())?;
            println!("{}", format_rat_mixed(&value));
            if let Some(path) = certify {
                write_output(Some(&path), &certificate_to_text(&value, &primal, &dual))?;
            }
            Ok(())
        }
        Cmd::VerifyPacking {
            cover,
            packing,
            floor,
        } => {
            let c = load_cover(&cover)?;
            let text = read_input(Some(&packing))?;
            let (digest, d) = PackingDistribution::from_text(&text).map_err(|e| e.to_string())?;
            if digest != c.sha256() {
                return Err(format!(
                    "packing was built for cover {} but this cover is {}",
                    digest,
                    c.sha256()
                ));
            }
            let target = match &floor {
                Some(word) => {
                    let eps = listpack::parse_rat(word)
                        .ok_or_else(|| format!("bad floor: {}", word))?;
                    PackingTarget::Epsilon(vec![eps; c.base.vertex_count()])
                }
                None => PackingTarget::Fractional,
            };
            let report = validate_packing(&c, &d, &target);
            if report.is_valid() {
                match floor {
                    Some(word) => println!(
                        "ok: packing of cover {} with floor {}",
                        digest, word
                    ),
                    None => println!("ok: exact fractional packing of cover {}", digest),
                }
                Ok(())
            } else {
                for v in &report.violations {
                    eprintln!("violation: {}", v);
                }
                Err(format!("{} violations", report.violations.len()))
            }
        }
        Cmd::Fixture { which } => run_fixture(which, cli.seed),
        Cmd::Decompose { what } => match what {
            DecomposeCmd::Pathwidth { graph, out } => {
                let g = load_graph(graph.as_deref())?;
                let d = pathwidth_decompose_small(&g).map_err(|e| e.to_string())?;
                write_output(out.as_deref(), &d.to_text(g.vertex_count()))
            }
        },
    }
}

fn run_pack(method: PackCmd) -> Result<(), String> {
    match method {
        PackCmd::Caterpillar(args) => {
            let c = load_cover(&args.cover)?;
            if let Some(gpath) = &args.graph {
                let g = load_graph(Some(gpath))?;
                if g != c.base {
                    return Err("graph file does not match the cover's base graph".into());
                }
            }
            let text = read_input(Some(&args.decomp))?;
            let (d, n) = CaterpillarDecomposition::from_text(&text).map_err(|e| e.to_string())?;
            if n != c.base.vertex_count() {
                return Err(format!(
                    "decomposition is for {} vertices, cover has {}",
                    n,
                    c.base.vertex_count()
                ));
            }
            let pack = caterpillar_packing(&c, &d).map_err(|e| e.to_string())?;
            emit_packing(&c, &pack, args.out.as_deref())
        }
        PackCmd::Treedepth { cover, forest, out } => {
            let c = load_cover(&cover)?;
            let text = read_input(Some(&forest))?;
            let f = EliminationForest::from_text(&text).map_err(|e| e.to_string())?;
            let pack = treedepth_packing(&c, &f).map_err(|e| e.to_string())?;
            emit_packing(&c, &pack, out.as_deref())
        }
        PackCmd::Layered { cover, layers, out } => {
            let c = load_cover(&cover)?;
            let text = read_input(Some(&layers))?;
            let lp = layers_from_text(&text)?;
            let pack = layered_packing(&c, &lp, &mut |_, sub| lp_oracle(sub))
                .map_err(|e| e.to_string())?;
            emit_packing(&c, &pack, out.as_deref())
        }
        PackCmd::Product {
            cover,
            g1,
            g2,
            k1,
            out,
        } => {
            let c = load_cover(&cover)?;
            let g1 = load_graph(Some(&g1))?;
            let g2 = load_graph(Some(&g2))?;
            let pack = cartesian_packing(&c, &g1, &g2, k1, &mut lp_oracle)
                .map_err(|e| e.to_string())?;
            emit_packing(&c, &pack, out.as_deref())
        }
        PackCmd::Lp { cover, out } => {
            let c = load_cover(&cover)?;
            match solve_packing_lp(&c).map_err(|e| e.to_string())? {
                PackingLpOutcome::Feasible(d) => emit_packing(&c, &d, out.as_deref()),
                PackingLpOutcome::Infeasible { farkas } => {
                    eprintln!("infeasible: no fractional packing exists for this cover");
                    let row: Vec<String> = farkas.iter().map(|r| format_rat(r)).collect();
                    eprintln!("farkas row: {}", row.join(" "));
                    Err("cover admits no fractional packing".into())
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layer_file_round_trip() {
        let lp = LayerPartition::new(vec![vec![3, 1, 2], vec![4, 5], vec![6]]);
        let text = layers_to_text(&lp);
        assert!(text.starts_with("layers v1\n"));
        let back = layers_from_text(&text).unwrap();
        assert_eq!(back.layers, lp.layers);
    }

    #[test]
    fn layer_parser_rejects_garbage() {
        assert!(layers_from_text("layers v1\n").is_err());
        assert!(layers_from_text("layer 1: 1 2\n").is_err());
        assert!(layers_from_text("layers v1\nlayer 1: one two\n").is_err());
        assert!(layers_from_text("layers v1\nlayer 1:\n").is_err());
    }
}

fn run_fixture(which: FixtureCmd, seed: u64) -> Result<(), String> {
    match which {
        FixtureCmd::Q3 { out } => {
            let c = fixtures::build_q3_cover();
            write_output(out.as_deref(), &c.to_text())
        }
        FixtureCmd::AppendixB { out, groups } => {
            let (g, grps) = fixtures::build_appendix_b();
            write_output(out.as_deref(), &g.to_dimacs())?;
            if let Some(path) = groups {
                let mut s = String::new();
                for grp in grps {
                    let words: Vec<String> = grp.iter().map(|v| v.to_string()).collect();
                    s.push_str(&format!("group {}\n", words.join(" ")));
                }
                write_output(Some(&path), &s)?;
            }
            Ok(())
        }
        FixtureCmd::CyclicShift { fold, out } => {
            if fold < 2 {
                return Err("fold must be at least 2".into());
            }
            let c = fixtures::shifted_triangle_cover(fold);
            write_output(out.as_deref(), &c.to_text())
        }
        FixtureCmd::Caterpillar { out_prefix } => {
            let (c, d) = fixtures::shifted_caterpillar_cover();
            let n = c.base.vertex_count();
            write_output(
                Some(Path::new(&format!("{}.col", out_prefix))),
                &c.base.to_dimacs(),
            )?;
            write_output(Some(Path::new(&format!("{}.cover", out_prefix))), &c.to_text())?;
            write_output(
                Some(Path::new(&format!("{}.cat", out_prefix))),
                &d.to_text(n),
            )?;
            eprintln!(
                "wrote {}.col, {}.cover, {}.cat",
                out_prefix, out_prefix, out_prefix
            );
            Ok(())
        }
        FixtureCmd::Random {
            n,
            degeneracy,
            fold,
            out,
        } => {
            let mut rng = fixtures::seeded_rng(seed);
            let g = fixtures::random_degenerate_graph(n, degeneracy, &mut rng);
            let c = fixtures::random_uniform_cover(&g, fold, &mut rng);
            write_output(out.as_deref(), &c.to_text())
        }
        FixtureCmd::Layered { n, fold, out_prefix } => {
            let mut rng = fixtures::seeded_rng(seed);
            let (g, lp) = fixtures::random_layered_instance(n, &mut rng);
            let c = fixtures::random_uniform_cover(&g, fold, &mut rng);
            write_output(
                Some(Path::new(&format!("{}.cover", out_prefix))),
                &c.to_text(),
            )?;
            write_output(
                Some(Path::new(&format!("{}.layers", out_prefix))),
                &layers_to_text(&lp),
            )?;
            eprintln!("wrote {}.cover, {}.layers", out_prefix, out_prefix);
            Ok(())
        }
    }
}
