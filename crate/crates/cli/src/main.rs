use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ccstab::algiso::{self, Verdict};
use ccstab::caps::{self, Caps};
use ccstab::cc::{self, ClosureReport};
use ccstab::coloring::PairColoring;
use ccstab::corpus::{self, SuiteOptions};
use ccstab::graph::Graph;
use ccstab::oracles;
use ccstab::planes::{self, IncidenceStructure, PlaneReportOptions};
use ccstab::stab::{self, TraceStep};
use ccstab::{wlm, Error};

#[derive(Parser)]
#[command(name = "ccstab", version, about = "Coherent configurations, WL closures and depth-1 stabilization")]
struct Cli {
    /// Worker threads for per-point extension work.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coherent closure of a graph or pair coloring.
    Refine {
        input: PathBuf,
        /// Include all nonzero intersection numbers.
        #[arg(long)]
        tensor: bool,
        /// Write the closure coloring as text.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// m-dimensional WL coloring.
    Wlm {
        #[arg(long, default_value_t = 3)]
        m: usize,
        input: PathBuf,
        /// Also check the m-ary axioms.
        #[arg(long)]
        validate: bool,
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Sesquiclosure WLD.
    Wld {
        input: PathBuf,
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Depth-1 stabilization with the chosen operators.
    Deepstab {
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        sigmas: Vec<usize>,
        input: PathBuf,
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// One application of a single operator to the coherent closure.
    Sigma {
        #[arg(long)]
        i: usize,
        input: PathBuf,
    },
    /// Point extension of the coherent closure.
    Extend {
        #[arg(long, value_delimiter = ',', required = true)]
        points: Vec<usize>,
        input: PathBuf,
        #[arg(long)]
        tensor: bool,
    },
    /// Decide equivalence of two inputs; exit code 1 when distinguished.
    Compare {
        #[arg(long, value_enum)]
        method: Method,
        first: PathBuf,
        second: PathBuf,
    },
    /// Projective planes and their schemes.
    Plane(PlaneArgs),
    /// Brute-force references.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Property suite over the built-in corpus; exit code 1 on a failure.
    Corpus {
        #[arg(long, default_value_t = 7)]
        max_n: usize,
        /// Use this many random graphs instead of the enumeration.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        no_named: bool,
        /// Exhaustive bound for the pebble-game check (0 skips it).
        #[arg(long, default_value_t = 4)]
        game_n: usize,
        #[arg(long, default_value_t = 20)]
        game_samples: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Wl,
    Wl3,
    Wl4,
    Wld,
    Deepstab,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["q", "load"])))]
struct PlaneArgs {
    /// Desarguesian plane PG(2, q).
    #[arg(long)]
    q: Option<usize>,
    /// Plane file.
    #[arg(long)]
    load: Option<PathBuf>,
    /// Use the dual plane.
    #[arg(long)]
    dual: bool,
    /// Full report (extensions, block table, checks).
    #[arg(long)]
    report: bool,
    /// Largest order for which the 2-extension is computed.
    #[arg(long, default_value_t = 4)]
    two_extension_max_q: usize,
    /// Write the plane in the text format.
    #[arg(long)]
    emit: Option<PathBuf>,
    /// Write the incidence graph in the graph format.
    #[arg(long)]
    emit_graph: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Automorphism orbits by backtracking.
    Orbits {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        arity: usize,
    },
    /// Winner of the three-pebble game from (x, x′).
    Game {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        y: Vec<usize>,
    },
}

/// Failure with its exit code.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(2, e.to_string())
    }
}

type Outcome = Result<(String, u8), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(2, format!("{}: {e}", path.display())))
}

/// A graph file (`n`, `e`, `c` lines), a pair-coloring dump (`m 2 …`) or
/// a plane file (`plane q`, read as its incidence graph).
fn load(path: &Path) -> Result<PairColoring, Failure> {
    let text = read(path)?;
    let first = text.split_whitespace().next().unwrap_or("");
    let parsed = if first == "m" {
        PairColoring::parse(&text)
    } else if first == "plane" {
        IncidenceStructure::parse(&text).map(|p| planes::incidence_graph(&p).rainbow())
    } else {
        Graph::parse(&text).map(|g| g.rainbow())
    };
    parsed.map_err(|e| Failure(2, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure(2, format!("{}: {e}", path.display())))
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct StabReport {
    #[serde(flatten)]
    closure: ClosureReport,
    trace: Vec<TraceStep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sesquiclosed: Option<algiso::SesquiReport>,
}

#[derive(Serialize)]
struct WlmReport {
    m: usize,
    n: usize,
    rank: usize,
    iterations: usize,
    class_sizes: Vec<usize>,
    pr2_rank: usize,
    pr2_valencies: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    axioms: Option<wlm::MaryReport>,
}

#[derive(Serialize)]
struct SigmaReport {
    i: usize,
    rank_before: usize,
    rank_after: usize,
    classes: Vec<Vec<usize>>,
}

#[derive(Serialize)]
struct ExtendReport {
    points: Vec<usize>,
    #[serde(flatten)]
    closure: ClosureReport,
}

#[derive(Serialize)]
struct PlaneSummary {
    q: usize,
    points: usize,
    lines: usize,
    scheme_rank: usize,
    valencies: Vec<usize>,
}

#[derive(Serialize)]
struct GameReport {
    winner: oracles::Winner,
    x: Vec<usize>,
    y: Vec<usize>,
}

#[derive(Serialize)]
struct OrbitReport {
    #[serde(flatten)]
    summary: oracles::OrbitSummary,
    point_orbits_labels: Vec<u32>,
}

fn run(cli: Cli) -> Outcome {
    let ok = |s: String| Ok((s, 0));
    match cli.command {
        Command::Refine { input, tensor, dump } => {
            let x = load(&input)?;
            let c = cc::wl_closure(&x, &[])?;
            if let Some(p) = dump {
                write(&p, &c.coloring().to_text())?;
            }
            ok(json(&c.report(tensor)?))
        }
        Command::Wlm { m, input, validate, dump } => {
            let x = load(&input)?;
            let run = wlm::wlm_joint(&[&x], m, false)?;
            let f = &run.colorings[0];
            let p = wlm::pr2(f)?;
            if let Some(path) = dump {
                write(&path, &f.to_text())?;
            }
            ok(json(&WlmReport {
                m,
                n: f.n(),
                rank: f.rank(),
                iterations: run.iterations,
                class_sizes: f.sizes(),
                pr2_rank: p.rank(),
                pr2_valencies: p.valencies(),
                axioms: validate.then(|| wlm::validate_mary(f)),
            }))
        }
        Command::Wld { input, dump } => {
            let x = load(&input)?;
            let s = stab::sesquiclosure_traced(&x)?;
            let check = match &s.cache {
                Some(cache) => algiso::sesquiclosed_check_with(&s.cc, cache),
                None => algiso::sesquiclosed_check(&s.cc)?,
            };
            if let Some(p) = dump {
                write(&p, &s.cc.coloring().to_text())?;
            }
            ok(json(&StabReport {
                closure: s.cc.report(false)?,
                trace: s.trace,
                sesquiclosed: Some(check),
            }))
        }
        Command::Deepstab { sigmas, input, dump } => {
            let x = load(&input)?;
            let s = stab::deep_stab_traced(&x, &sigmas)?;
            if let Some(p) = dump {
                write(&p, &s.cc.coloring().to_text())?;
            }
            ok(json(&StabReport {
                closure: s.cc.report(false)?,
                trace: s.trace,
                sesquiclosed: None,
            }))
        }
        Command::Sigma { i, input } => {
            let x = load(&input)?;
            let base = cc::wl_closure(&x, &[])?;
            let sim = stab::sim_classes(&base, i)?;
            let next = stab::sigma_from(&base, &sim);
            ok(json(&SigmaReport {
                i,
                rank_before: base.rank(),
                rank_after: next.rank(),
                classes: sim.classes(),
            }))
        }
        Command::Extend { points, input, tensor } => {
            let x = load(&input)?;
            if points.len() > 2 {
                return Err(Failure(2, "--points takes one or two points".into()));
            }
            let base = cc::wl_closure(&x, &[])?;
            let e = cc::point_extension(&base, &points)?;
            ok(json(&ExtendReport {
                points,
                closure: e.report(tensor)?,
            }))
        }
        Command::Compare { method, first, second } => {
            let (g, h) = (load(&first)?, load(&second)?);
            let v: Verdict = match method {
                Method::Wl => algiso::wl_equivalent(&g, &h)?,
                Method::Wl3 => algiso::wlm_equivalent(&g, &h, 3)?,
                Method::Wl4 => algiso::wlm_equivalent(&g, &h, 4)?,
                Method::Wld => algiso::wld_equivalent(&g, &h)?,
                Method::Deepstab => algiso::deepstab_equivalent(&g, &h)?,
            };
            Ok((json(&v), if v.equivalent() { 0 } else { 1 }))
        }
        Command::Plane(args) => plane(args),
        Command::Oracle(OracleCommand::Orbits { input, arity }) => {
            let x = load(&input)?;
            let o = oracles::brute_orbits(&x, arity)?;
            ok(json(&OrbitReport {
                summary: o.summary(),
                point_orbits_labels: o.points.clone(),
            }))
        }
        Command::Oracle(OracleCommand::Game { first, second, x, y }) => {
            let (g, h) = (load(&first)?, load(&second)?);
            let winner = oracles::pebble_game(&g, &h, 2, &x, &y)?;
            ok(json(&GameReport { winner, x, y }))
        }
        Command::Corpus {
            max_n,
            sample,
            seed,
            no_named,
            game_n,
            game_samples,
        } => {
            let r = corpus::run_suite(&SuiteOptions {
                max_n,
                sample,
                named: !no_named,
                seed,
                game_n,
                game_samples,
            })?;
            Ok((json(&r), if r.passed { 0 } else { 1 }))
        }
    }
}

fn plane(args: PlaneArgs) -> Outcome {
    let mut p: IncidenceStructure = match (&args.q, &args.load) {
        (Some(q), _) => planes::pg2(*q)?,
        (None, Some(path)) => {
            let text = read(path)?;
            IncidenceStructure::parse(&text).map_err(|e| Failure(2, format!("{}: {e}", path.display())))?
        }
        (None, None) => unreachable!("clap enforces the source group"),
    };
    if args.dual {
        p = planes::dual_plane(&p);
    }
    if let Some(path) = &args.emit {
        write(path, &p.to_text())?;
    }
    if let Some(path) = &args.emit_graph {
        write(path, &planes::incidence_graph(&p).to_text())?;
    }
    if args.report {
        let opts = PlaneReportOptions {
            two_extension_max_q: args.two_extension_max_q,
        };
        return Ok((json(&planes::plane_report(&p, &opts)?), 0));
    }
    let c = cc::wl_closure(&planes::incidence_graph(&p).rainbow(), &[])?;
    Ok((
        json(&PlaneSummary {
            q: p.order(),
            points: p.num_points(),
            lines: p.lines().len(),
            scheme_rank: c.rank(),
            valencies: c.valencies(),
        }),
        0,
    ))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match Caps::from_env() {
        Ok(c) => caps::set_caps(c),
        Err(e) => {
            eprintln!("error: CCSTAB_CAP_OVERRIDE: {e}");
            return ExitCode::from(2);
        }
    }
    let threads = cli
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    caps::set_threads(threads);
    let output = cli.output.clone();
    match run(cli) {
        Ok((text, code)) => {
            match output {
                Some(path) => {
                    if let Err(Failure(c, msg)) = write(&path, &text) {
                        eprintln!("error: {msg}");
                        return ExitCode::from(c);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(code)
        }
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
