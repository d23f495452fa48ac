use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use hyperovals::graph::{
    automorphism_group, canonical_form, collinearity_graph, local_graph, rook_graph, six_clique_census, srg_check,
    to_graph6, GraphJson, SrgParams,
};
use hyperovals::hyperoval::{degree_census, check_skew_order, prop3_check, skew_geometry, verify_hyperoval, HyperbolicForms};
use hyperovals::io::LineSetFile;
use hyperovals::lineset::LineSet;
use hyperovals::projgeom::GeometryTables;
use hyperovals::quadric::{QForm, Quadric};
use hyperovals::search::{enumerate_hyperovals, pencil_pair_of, BranchOrder, SearchConfig, SeedMode};
use hyperovals::spread::SpreadConstruction;

/// Hyperovals of the line Grassmannian of PG(3,4).
#[derive(Parser, Debug)]
#[command(name = "hyperovals", version)]
struct Cli {
    /// Worker threads for parallel stages.
    #[arg(long, global = true, env = "HYPEROVAL_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Point, line, plane and pencil counts of PG(3,q).
    Stats {
        #[arg(long, default_value_t = 4)]
        q: u32,
    },
    /// Writes one of the known hyperovals as a line set file.
    Construct {
        #[arg(value_enum)]
        which: Known,
        /// Orbit A_i used by spread96.
        #[arg(long, default_value_t = 1)]
        orbit: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks that every pencil meets the set in 0 or 2 lines.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Point and plane degrees plus the six-clique classes.
    Census {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Exports the collinearity graph.
    Graph {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = GraphFormat::Graph6)]
        format: GraphFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks that every local graph is the 5×5 rook graph.
    LocalCheck {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Looks for a hyperbolic quadric matching the set around each line.
    Prop3 {
        #[arg(long = "in")]
        input: PathBuf,
        /// Only check this line.
        #[arg(long)]
        line: Option<u32>,
    },
    /// Order of the automorphism group of the collinearity graph.
    Aut {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Budgeted backtracking search for hyperovals.
    Search {
        #[arg(long, default_value_t = 1)]
        min_size: usize,
        #[arg(long, default_value_t = 357)]
        max_size: usize,
        #[arg(long, default_value_t = 10_000_000)]
        budget_nodes: u64,
        #[arg(long, value_enum, default_value_t = Seed::None)]
        seed: Seed,
        /// Line set the seed lines are taken from; defaults to the quadric
        /// example for first-line and the spread example for pencil-pair.
        #[arg(long)]
        seed_from: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Order::Index)]
        order: Order,
        #[arg(long)]
        max_found: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lines skew to the hyperbolic quadric of PG(3,q) and their pencil counts.
    Generalize {
        #[arg(long, default_value_t = 8)]
        q: u32,
        /// Allow q = 16.
        #[arg(long)]
        long_running: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Known {
    Quadric72,
    Spread96,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum GraphFormat {
    Graph6,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Seed {
    None,
    FirstLine,
    PencilPair,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Order {
    Index,
    Pencil,
}

enum Outcome {
    Pass(String),
    Fail(String),
}

fn pretty<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

fn tables(q: u32) -> Result<GeometryTables> {
    let t = GeometryTables::build(q)?;
    log::info!("geometry q={} modulus={:#b} table_hash={}", t.q(), t.field().spec().modulus, t.table_hash());
    Ok(t)
}

fn load(path: &Path) -> Result<(GeometryTables, LineSetFile, LineSet)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: LineSetFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let t = tables(file.q)?;
    let set = file.to_line_set(&t).with_context(|| format!("loading {}", path.display()))?;
    Ok((t, file, set))
}

fn write_or_print(out: Option<&Path>, text: String) -> Result<Outcome> {
    match out {
        Some(p) => {
            fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display()))?;
            Ok(Outcome::Pass(pretty(&json!({"written": p.display().to_string()}))?))
        }
        None => Ok(Outcome::Pass(text)),
    }
}

const ROOK_PARAMS: SrgParams = SrgParams { v: 25, k: 8, lambda: 3, mu: 2 };

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Stats { q } => {
            let t = tables(q)?;
            let v = json!({
                "q": t.q(),
                "modulus": t.field().spec().modulus,
                "table_hash": t.table_hash(),
                "points": t.num_points(),
                "lines": t.num_lines(),
                "planes": t.num_planes(),
                "pencils": t.num_pencils(),
                "lines_per_pencil": t.q() + 1,
                "pencils_per_line": t.line_pencils(0).len(),
            });
            Ok(Outcome::Pass(pretty(&v)?))
        }
        Command::Construct { which, orbit, out } => {
            let t = tables(4)?;
            let (name, set) = match which {
                Known::Quadric72 => ("quadric72".to_string(), Quadric::new(&t, QForm::standard_hyperbolic()).external_lines()?),
                Known::Spread96 => (format!("spread96-orbit{orbit}"), SpreadConstruction::new(&t)?.build_96(orbit)?),
            };
            write_or_print(out.as_deref(), pretty(&LineSetFile::new(&t, &name, &set))?)
        }
        Command::Verify { input } => {
            let (t, file, set) = load(&input)?;
            Ok(match verify_hyperoval(&t, &set) {
                Ok(()) => Outcome::Pass(pretty(&json!({"ok": true, "name": file.name, "size": set.len()}))?),
                Err(v) => Outcome::Fail(pretty(&json!({"ok": false, "name": file.name, "size": set.len(), "violation": v}))?),
            })
        }
        Command::Census { input } => {
            let (t, _, set) = load(&input)?;
            if let Err(v) = verify_hyperoval(&t, &set) {
                return Ok(Outcome::Fail(pretty(&json!({"ok": false, "violation": v}))?));
            }
            let degrees = degree_census(&t, &set);
            let g = collinearity_graph(&t, &set);
            let cliques = match six_clique_census(&t, &g) {
                Ok(c) => c,
                Err(hyperovals::Error::StrayClique(c)) => {
                    return Ok(Outcome::Fail(pretty(&json!({"ok": false, "stray_clique": c}))?))
                }
                Err(e) => return Err(e.into()),
            };
            let v = json!({
                "ok": true,
                "size": set.len(),
                "point_degrees": degrees.point_histogram(),
                "plane_degrees": degrees.plane_histogram(),
                "point_cliques": cliques.point_cliques.len(),
                "plane_cliques": cliques.plane_cliques.len(),
                "other_maximal_cliques": cliques.other_maximal,
            });
            Ok(Outcome::Pass(pretty(&v)?))
        }
        Command::Graph { input, format, out } => {
            let (t, _, set) = load(&input)?;
            let g = collinearity_graph(&t, &set);
            let text = match format {
                GraphFormat::Graph6 => to_graph6(&g),
                GraphFormat::Json => pretty(&GraphJson::from(&g))?,
            };
            write_or_print(out.as_deref(), text)
        }
        Command::LocalCheck { input } => {
            let (t, _, set) = load(&input)?;
            let g = collinearity_graph(&t, &set);
            let rook = canonical_form(&rook_graph(5)?)?.graph6;
            for v in 0..g.n() {
                let local = local_graph(&g, v)?;
                let params = srg_check(&local);
                if params != Some(ROOK_PARAMS) || canonical_form(&local)?.graph6 != rook {
                    let w = json!({"ok": false, "vertex": v, "line": g.label(v), "params": params});
                    return Ok(Outcome::Fail(pretty(&w)?));
                }
            }
            Ok(Outcome::Pass(pretty(&json!({"ok": true, "vertices": g.n(), "params": ROOK_PARAMS}))?))
        }
        Command::Prop3 { input, line } => {
            let (t, _, set) = load(&input)?;
            let lines: Vec<u32> = match line {
                Some(l) if !set.contains(l) => bail!("line {l} is not in the set"),
                Some(l) => vec![l],
                None => set.lines().to_vec(),
            };
            let forms = HyperbolicForms::scan(&t)?;
            log::info!("{} hyperbolic quadrics", forms.len());
            let mut witnesses = Vec::new();
            for l in lines {
                match prop3_check(&t, &forms, &set, l)? {
                    Some(w) => witnesses.push(json!({"line": l, "scan_index": w.scan_index, "form": w.form})),
                    None => return Ok(Outcome::Fail(pretty(&json!({"ok": false, "line": l, "checked": witnesses.len()}))?)),
                }
            }
            Ok(Outcome::Pass(pretty(&json!({"ok": true, "quadrics": forms.len(), "witnesses": witnesses}))?))
        }
        Command::Aut { input } => {
            let (t, _, set) = load(&input)?;
            let a = automorphism_group(&collinearity_graph(&t, &set))?;
            let v = json!({
                "order": a.order.to_string(),
                "generators": a.generators.len(),
                "orbit_sizes": a.orbits.iter().map(Vec::len).collect::<Vec<_>>(),
            });
            Ok(Outcome::Pass(pretty(&v)?))
        }
        Command::Search { min_size, max_size, budget_nodes, seed, seed_from, order, max_found, out } => {
            let t = tables(4)?;
            let source = match &seed_from {
                Some(p) => load(p)?.2,
                None => match seed {
                    Seed::PencilPair => SpreadConstruction::new(&t)?.build_96(1)?,
                    _ => Quadric::new(&t, QForm::standard_hyperbolic()).external_lines()?,
                },
            };
            let seed = match seed {
                Seed::None => SeedMode::None,
                Seed::FirstLine => SeedMode::FirstLine(source.iter().next().context("seed set is empty")?),
                Seed::PencilPair => {
                    let (a, b) = pencil_pair_of(&t, &source).context("seed set has no two meeting lines")?;
                    SeedMode::PencilPair(a, b)
                }
            };
            let order = match order {
                Order::Index => BranchOrder::Index,
                Order::Pencil => BranchOrder::Pencil,
            };
            let cfg = SearchConfig { node_budget: budget_nodes, min_size, max_size, seed, order, max_found, threads: None };
            let r = enumerate_hyperovals(&t, &cfg)?;
            let v = json!({
                "config": r.config,
                "found": r.found.iter().map(|s| s.lines()).collect::<Vec<_>>(),
                "nodes": r.nodes,
                "exhausted": r.exhausted,
                "size_histogram": r.size_histogram,
            });
            write_or_print(out.as_deref(), pretty(&v)?)
        }
        Command::Generalize { q, long_running } => {
            check_skew_order(q, long_running)?;
            let s = skew_geometry(&tables(q)?)?;
            let v = json!({"q": s.q, "lines": s.lines.len(), "histogram": s.histogram});
            Ok(Outcome::Pass(pretty(&v)?))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(Outcome::Pass(s)) => {
            println!("{s}");
            ExitCode::SUCCESS
        }
        Ok(Outcome::Fail(s)) => {
            println!("{s}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
