use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use eppa_core::covers::{build_cover, cover_tower, pullback, CoverDescriptor, TowerStrategy};
use eppa_core::eppa::{eppa_extend, verify_extension, ExtensionOptions, ExtensionResult};
use eppa_core::fiber::{fiber_product, is_l_root_closed, is_malnormal};
use eppa_core::homology::{gersten_check, h1_basis, GerstenInput};
use eppa_core::hypertournament::{Hypertournament, PartialMap};
use eppa_core::separability::{separate_from_cyclic, SearchBudget, SepError};
use eppa_core::verification::{run_property_suite, verify_paper_counterexample, SuiteSizes};
use eppa_core::{
    fold, maximal_root, subgroup_graph, GraphMorphism, LabeledGraph, SubgroupGraph, Word,
};

/// Stallings graphs, covers, separability witnesses and hypertournament extensions.
#[derive(Parser)]
#[command(name = "tool", version)]
struct Cli {
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fold a graph and report the folded graph.
    Fold { graph: PathBuf },
    /// Decide whether a word lies in a subgroup.
    Membership {
        /// Graph JSON, {"n", "generators"} JSON, or comma-separated generators.
        subgroup: String,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Free basis of a subgroup.
    Basis {
        subgroup: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Maximal root of a word.
    Root {
        word: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Fiber product of two subgroup graphs.
    FiberProduct {
        left: String,
        right: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Whether every nontrivial conjugate meets H trivially
    Malnormal {
        subgroup: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Whether w^l in H forces w in H.
    RootClosed {
        subgroup: String,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Basis of the cycle space over Z/p, one row per cycle.
    H1 {
        graph: PathBuf,
        #[arg(long)]
        p: u64,
    },
    /// Injectivity of a lift on H_1 of cyclic covers.
    GerstenCheck { config: PathBuf },
    /// Cyclic cover from a cocycle such as "a=1,b=0".
    Cover {
        graph: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        cocycle: String,
    },
    /// Tower of Z/p covers, optionally with pullbacks of another graph.
    Tower {
        graph: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        pullback: Option<PathBuf>,
        /// Random cocycles from this seed instead of the lexicographic choice.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Separate a word from a cyclic subgroup in a finite quotient of order prime to L.
    Separate {
        #[arg(long)]
        cyclic: String,
        #[arg(long)]
        word: String,
        #[arg(long = "L", value_delimiter = ',', required = true)]
        ls: Vec<u64>,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the hypertournament axioms.
    Validate { structure: PathBuf },
    /// Extend a hypertournament so that partial isomorphisms become automorphisms.
    EppaExtend {
        structure: PathBuf,
        maps: PathBuf,
        /// Expected arities; must match the structure.
        #[arg(long = "L", value_delimiter = ',')]
        ls: Option<Vec<usize>>,
        #[arg(long, default_value_t = eppa_core::eppa::DEFAULT_BOUND)]
        bound: usize,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Recheck an extension produced by eppa-extend.
    VerifyExtension {
        result: PathBuf,
        structure: PathBuf,
        maps: PathBuf,
    },
    /// Golden checks on the subgroup <abABa, b>.
    VerifyCounterexample {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        depth: usize,
    },
    /// Seeded run of every invariant suite.
    Suite {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        tiny: bool,
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
}

/// How a command ended, mapped onto the exit code.
enum Failure {
    /// The thing being checked does not hold.
    Verification(Value),
    Input(anyhow::Error),
    ResourceCap(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

type Outcome = Result<Value, Failure>;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn parse_word(n: usize, s: &str) -> anyhow::Result<Word> {
    Word::parse(n, s).map_err(|e| anyhow!("word {s:?}: {e}"))
}

/// A subgroup given as a graph file, a generator file, or inline generators.
fn load_subgroup(spec: &str, n: usize) -> anyhow::Result<SubgroupGraph> {
    let path = Path::new(spec);
    if path.is_file() {
        let v: Value = read_json(path)?;
        if let Some(gens) = v.get("generators") {
            let n = v.get("n").and_then(Value::as_u64).map_or(n, |x| x as usize);
            let gens: Vec<String> =
                serde_json::from_value(gens.clone()).context("generators must be strings")?;
            let words = gens
                .iter()
                .map(|s| parse_word(n, s))
                .collect::<anyhow::Result<Vec<_>>>()?;
            return Ok(subgroup_graph(n, &words));
        }
        let g: LabeledGraph =
            serde_json::from_value(v).with_context(|| format!("parsing {}", path.display()))?;
        return SubgroupGraph::from_graph(&g).map_err(|e| anyhow!("{e}"));
    }
    let words = spec
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_word(n, s))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(subgroup_graph(n, &words))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Fold { graph } => {
            let g: LabeledGraph = read_json(&graph)?;
            let (folded, map) = fold(&g);
            Ok(json!({ "graph": folded, "vertex_map": map }))
        }
        Command::Membership { subgroup, word, n } => {
            let h = load_subgroup(&subgroup, n)?;
            let w = parse_word(h.alphabet(), &word)?;
            Ok(json!({ "word": w, "member": h.contains(&w) }))
        }
        Command::Basis { subgroup, n } => {
            let h = load_subgroup(&subgroup, n)?;
            Ok(
                json!({ "rank": h.rank(), "basis": h.basis(), "index": h.index(), "graph": h.graph }),
            )
        }
        Command::Root { word, n } => {
            let w = parse_word(n, &word)?;
            let r = maximal_root(&w).map_err(|e| anyhow!("{e}"))?;
            Ok(to_value(&r))
        }
        Command::FiberProduct { left, right, n } => {
            let (a, b) = (load_subgroup(&left, n)?, load_subgroup(&right, n)?);
            let fp = fiber_product(&a.graph, &b.graph).map_err(|e| anyhow!("{e}"))?;
            Ok(
                json!({ "graph": fp.graph, "components": fp.num_components, "component_stats": fp.stats() }),
            )
        }
        Command::Malnormal { subgroup, n } => {
            let h = load_subgroup(&subgroup, n)?;
            let r = is_malnormal(&h).map_err(|e| anyhow!("{e}"))?;
            Ok(
                json!({ "verdict": r.malnormal, "certificate": r.certificate, "component_stats": r.stats }),
            )
        }
        Command::RootClosed { subgroup, l, n } => {
            let h = load_subgroup(&subgroup, n)?;
            let r = is_l_root_closed(&h, l).map_err(|e| anyhow!("{e}"))?;
            Ok(json!({ "verdict": r.closed, "l": l, "witness": r.witness }))
        }
        Command::H1 { graph, p } => {
            let g: LabeledGraph = read_json(&graph)?;
            let h = h1_basis(&g, p).map_err(|e| anyhow!("{e}"))?;
            Ok(json!({ "p": p, "dim": h.dim(), "basis": h.basis.transpose().to_rows() }))
        }
        Command::GerstenCheck { config } => {
            let input: GerstenInput = read_json(&config)?;
            let r = gersten_check(&input).map_err(|e| anyhow!("{e}"))?;
            Ok(to_value(&r))
        }
        Command::Cover { graph, p, cocycle } => {
            let g: LabeledGraph = read_json(&graph)?;
            let d = CoverDescriptor::parse(g, p, &cocycle).map_err(|e| anyhow!("{e}"))?;
            let c = build_cover(&d);
            let (_, components) = c.total.components();
            Ok(json!({
                "graph": c.total,
                "projection": c.projection,
                "connected": components == 1,
                "components": components,
                "rank": c.total.rank(),
            }))
        }
        Command::Tower {
            graph,
            p,
            depth,
            pullback: pb,
            seed,
        } => {
            let x: LabeledGraph = read_json(&graph)?;
            let a = pb
                .map(|path| read_json::<LabeledGraph>(&path))
                .transpose()?;
            let f = a
                .as_ref()
                .map(|a| {
                    GraphMorphism::by_labels(a, &x)
                        .map_err(|e| anyhow!("pullback graph does not map to the base: {e}"))
                })
                .transpose()?;
            let strategy = seed.map_or(TowerStrategy::LexFirst, |seed| TowerStrategy::Random {
                seed,
            });
            let t = cover_tower(&x, p, depth, strategy).map_err(|e| anyhow!("{e}"))?;
            let mut levels = Vec::new();
            for (i, (c, to_base)) in t.levels.iter().zip(&t.to_base).enumerate() {
                let mut row = json!({
                    "depth": i + 1,
                    "vertices": c.total.num_vertices(),
                    "rank": c.total.rank(),
                    "connected": c.total.is_connected(),
                    "cocycle": c.descriptor.cocycle,
                });
                if let (Some(a), Some(f)) = (&a, &f) {
                    let q = pullback(a, f, &c.total, to_base, &x).map_err(|e| anyhow!("{e}"))?;
                    row["pullback"] = json!({ "vertices": q.graph.num_vertices(), "rank": q.graph.rank(), "connected": q.graph.is_connected() });
                }
                levels.push(row);
            }
            Ok(json!({ "p": p, "depth": depth, "levels": levels, "top": t.top() }))
        }
        Command::Separate {
            cyclic,
            word,
            ls,
            n,
            budget,
            seed,
        } => {
            let c = parse_word(n, &cyclic)?;
            let g = parse_word(n, &word)?;
            let budget = SearchBudget {
                max_candidates: budget.unwrap_or(SearchBudget::default().max_candidates),
                seed,
            };
            match separate_from_cyclic(&c, &g, &ls, budget) {
                Ok(w) => Ok(to_value(&w)),
                Err(e @ (SepError::SearchExhausted(_) | SepError::TooLarge(_))) => {
                    Err(Failure::ResourceCap(anyhow!("{e}")))
                }
                Err(e) => Err(Failure::Input(anyhow!("{e}"))),
            }
        }
        Command::Validate { structure } => {
            let m: Hypertournament = read_json(&structure)?;
            match m.validate() {
                Ok(()) => Ok(json!({ "valid": true })),
                Err(v) => Err(Failure::Verification(
                    json!({ "valid": false, "violation": v, "message": v.to_string() }),
                )),
            }
        }
        Command::EppaExtend {
            structure,
            maps,
            ls,
            bound,
            budget,
        } => {
            let m: Hypertournament = read_json(&structure)?;
            let maps: Vec<PartialMap> = read_json(&maps)?;
            if let Some(ls) = ls {
                let given: std::collections::BTreeSet<usize> = ls.into_iter().collect();
                if given != m.ls {
                    return Err(anyhow!(
                        "--L {given:?} does not match the structure's L {:?}",
                        m.ls
                    )
                    .into());
                }
            }
            let mut opts = ExtensionOptions {
                bound,
                ..Default::default()
            };
            if let Some(b) = budget {
                opts.budget.max_candidates = b;
            }
            match eppa_extend(&m, &maps, &opts) {
                Ok(r) => Ok(to_value(&r)),
                Err(e) if e.is_resource_cap() => {
                    Err(Failure::ResourceCap(anyhow!("{}: {e}", e.code())))
                }
                Err(e) => Err(Failure::Input(anyhow!("{}: {e}", e.code()))),
            }
        }
        Command::VerifyExtension {
            result,
            structure,
            maps,
        } => {
            let r: ExtensionResult = read_json(&result)?;
            let m: Hypertournament = read_json(&structure)?;
            let maps: Vec<PartialMap> = read_json(&maps)?;
            match verify_extension(&r, &m, &maps) {
                Ok(()) => Ok(json!({ "verified": true })),
                Err(d) => Err(Failure::Verification(
                    json!({ "verified": false, "defect": d.to_string() }),
                )),
            }
        }
        Command::VerifyCounterexample { p, depth } => {
            let r = verify_paper_counterexample(p, depth).map_err(|e| anyhow!("{e}"))?;
            if r.pass {
                Ok(to_value(&r))
            } else {
                Err(Failure::Verification(to_value(&r)))
            }
        }
        Command::Suite {
            seed,
            tiny,
            fixtures,
        } => {
            let sizes = if tiny {
                SuiteSizes::tiny()
            } else {
                SuiteSizes::default()
            };
            let s =
                run_property_suite(seed, sizes, fixtures.as_deref()).map_err(|e| anyhow!("{e}"))?;
            if s.pass {
                Ok(to_value(&s))
            } else {
                Err(Failure::Verification(to_value(&s)))
            }
        }
    }
}

fn emit(out: Option<&Path>, v: &Value) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    match out {
        Some(path) => {
            fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
        }
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    let (value, code) = match run(cli.command) {
        Ok(v) => (Some(v), 0),
        Err(Failure::Verification(v)) => (Some(v), 1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            (None, 2)
        }
        Err(Failure::ResourceCap(e)) => {
            eprintln!("resource cap: {e:#}");
            (None, 3)
        }
    };
    if let Some(v) = value {
        if let Err(e) = emit(out.as_deref(), &v) {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code)
}
