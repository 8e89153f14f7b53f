//! `morphtile` command line. Data goes to stdout as JSON (or SVG), notes and
//! errors to stderr.
//!
//! Exit codes: 0 ok, 1 a check failed (the report is still printed),
//! 2 usage or input error, 3 search budget exceeded.

use std::io::{self, Read as _, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use morphtile::atlas::vertex_atlas;
use morphtile::builtins;
use morphtile::convexify::{self, BatteryInput, ConvexifyDecl, ConvexifyError, SearchSpace};
use morphtile::geometry::Point;
use morphtile::patch::{analyze, Patch};
use morphtile::protoset::{Protoset, ProtosetError, TileName};
use morphtile::render::{render_patch, render_protoset, RenderError, RenderStyle};
use morphtile::rows::{analyze_rows, RowError};
use morphtile::scalar::{parse_rational, Scalar};
use morphtile::search::{self, Budget, SearchError};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("search budget of {0} exceeded")]
    Budget(usize),
    #[error(transparent)]
    Protoset(#[from] ProtosetError),
    #[error(transparent)]
    Rows(#[from] RowError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Convexify(#[from] ConvexifyError),
    #[error(transparent)]
    Search(SearchError),
    #[error("{0}")]
    Io(#[from] io::Error),
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Budget(n) => CliError::Budget(n),
            e => CliError::Search(e),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Budget(_) => 3,
            _ => 2,
        }
    }
}

#[derive(Parser)]
#[command(name = "morphtile", version, about = "Exact tools for tiles that force a small number of tilings")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a protoset file (`-` reads stdin).
    Validate { file: String },
    /// List every vertex figure the prototiles can form.
    Atlas { file: String },
    /// Enumerate coronas around one prototile.
    Surround {
        file: String,
        #[arg(long)]
        tile: String,
        #[arg(long, default_value_t = 1)]
        levels: usize,
        #[arg(long, env = "MORPHTILE_BUDGET", default_value_t = Budget::default().0)]
        budget: usize,
        /// Close only these vertices (`x,y` in the tile's frame) instead of
        /// a full corona. Repeatable.
        #[arg(long = "vertex", value_parser = parse_point)]
        vertices: Vec<Point>,
    },
    /// All tilings of a polygonal region, up to congruence.
    TileRegion {
        file: String,
        /// Counter-clockwise vertices: "x,y x,y ...".
        #[arg(long)]
        region: String,
        #[arg(long, env = "MORPHTILE_BUDGET", default_value_t = Budget::default().0)]
        budget: usize,
    },
    /// Whether a tile forces its neighbour across an edge to be a translate.
    RowCheck {
        file: String,
        #[arg(long)]
        tile: String,
        #[arg(long)]
        edge: usize,
    },
    /// Row digraph, cardinality verdict and walk families.
    Rows {
        file: String,
        #[arg(long, default_value_t = 12)]
        bound: usize,
    },
    /// Search wedge and plan parameters, then run the battery and forcing checks.
    Convexify {
        file: String,
        /// Plan JSON; defaults to the plan stored in the protoset.
        #[arg(long)]
        plan: Option<PathBuf>,
        /// Candidate order shuffle; 0 keeps the natural order.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Most candidates to try.
        #[arg(long, env = "MORPHTILE_BUDGET")]
        budget: Option<usize>,
    },
    /// Build and check the convex version of the three-row protoset.
    Fig8,
    /// Draw a patch or a protoset as SVG.
    Render {
        /// Patch JSON (needs --protoset) or protoset JSON.
        input: String,
        #[arg(long)]
        protoset: Option<PathBuf>,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        #[arg(long, default_value = "100", value_parser = parse_scalar)]
        scale: Scalar,
        #[arg(long, default_value_t = 1.0)]
        stroke: f64,
        #[arg(long)]
        marks: bool,
        #[arg(long)]
        labels: bool,
        #[arg(long, default_value_t = 9)]
        decimals: usize,
    },
    /// List the shipped protosets, or print one.
    Builtins {
        #[arg(long)]
        emit: Option<String>,
    },
}

fn parse_scalar(s: &str) -> Result<Scalar, String> {
    parse_rational(s).map(|q| Scalar::new(q, num_rational::BigRational::default())).map_err(|e| e.to_string())
}

fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected x,y: `{s}`"))?;
    Ok(Point::new(parse_scalar(x)?, parse_scalar(y)?))
}

fn read_text(file: &str) -> Result<String, CliError> {
    if file == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(file).map_err(|e| CliError::Input(format!("{file}: {e}")))
    }
}

fn load(file: &str) -> Result<Protoset, CliError> {
    let ps = Protoset::from_json(&read_text(file)?).map_err(|e| CliError::Input(format!("{file}: {e}")))?;
    let bad = ps.validate();
    if !bad.is_empty() {
        for v in &bad {
            eprintln!("{v}");
        }
        return Err(CliError::Input(format!("{file}: protoset is not valid")));
    }
    Ok(ps)
}

fn emit<T: Serialize>(v: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).map_err(|e| CliError::Input(e.to_string()))?;
    let mut out = io::stdout().lock();
    writeln!(out, "{text}")?;
    Ok(())
}

fn seed_of(ps: &Protoset, tile: &str) -> Result<Patch, CliError> {
    let name = TileName(tile.to_string());
    ps.tile(&name)?;
    Ok(Patch::single(&name.0))
}

/// Returns whether every check passed.
fn run(cmd: Cmd) -> Result<bool, CliError> {
    match cmd {
        Cmd::Validate { file } => {
            let text = read_text(&file)?;
            let ps = Protoset::from_json(&text).map_err(|e| CliError::Input(format!("{file}: {e}")))?;
            let bad: Vec<String> = ps.validate().iter().map(|v| v.to_string()).collect();
            for v in &bad {
                eprintln!("{v}");
            }
            emit(&json!({ "name": ps.name, "tiles": ps.tiles.len(), "valid": bad.is_empty(), "problems": bad }))?;
            Ok(bad.is_empty())
        }
        Cmd::Atlas { file } => {
            let ps = load(&file)?;
            let atlas = vertex_atlas(&ps);
            eprintln!("{} vertex figures", atlas.len());
            emit(&atlas)?;
            Ok(true)
        }
        Cmd::Surround { file, tile, levels, budget, vertices } => {
            let ps = load(&file)?;
            let seed = seed_of(&ps, &tile)?;
            let r = if vertices.is_empty() {
                search::surround(&ps, &seed, levels, Budget(budget))?
            } else {
                search::surround_vertices(&ps, &seed, &vertices, Budget(budget))?
            };
            eprintln!("{:?}: {} witnesses, {} nodes", r.status, r.witnesses.len(), r.nodes);
            emit(&r)?;
            Ok(true)
        }
        Cmd::TileRegion { file, region, budget } => {
            let ps = load(&file)?;
            let pts: Vec<Point> = region.split_whitespace().map(parse_point).collect::<Result<_, _>>().map_err(CliError::Input)?;
            let tilings = search::tile_region(&ps, &pts, Budget(budget))?;
            eprintln!("{} tilings", tilings.len());
            emit(&json!({ "count": tilings.len(), "tilings": tilings }))?;
            Ok(true)
        }
        Cmd::RowCheck { file, tile, edge } => {
            let ps = load(&file)?;
            let r = search::translation_row_check(&ps, &TileName(tile), edge)?;
            emit(&r)?;
            Ok(r.is_forced_translate())
        }
        Cmd::Rows { file, bound } => {
            let ps = load(&file)?;
            let r = analyze_rows(&ps, bound)?;
            eprintln!("{} rows, {} edges, {}", r.rows.len(), r.edges.len(), r.verdict.class());
            emit(&r)?;
            Ok(r.valid)
        }
        Cmd::Convexify { file, plan, seed, budget } => {
            let ps = load(&file)?;
            let decl: ConvexifyDecl = match plan {
                Some(p) => {
                    let text = std::fs::read_to_string(&p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
                    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?
                }
                None => ps.convexify.clone().ok_or_else(|| CliError::Input(format!("{file}: no convexify plan; pass --plan")))?,
            };
            let cands = SearchSpace::around(&decl).candidates(seed);
            let limit = budget.unwrap_or(cands.len());
            let found = match convexify::search_parameters(&ps, &decl, &cands, limit) {
                Ok(f) => f,
                Err(ConvexifyError::Exhausted(n)) if n < cands.len() => return Err(CliError::Budget(n)),
                Err(e @ ConvexifyError::Exhausted(_)) => {
                    eprintln!("{e}");
                    emit(&json!({ "found": false, "tried": cands.len() }))?;
                    return Ok(false);
                }
                Err(e) => return Err(e.into()),
            };
            let forcing = convexify::verify_forcing(&found.instance);
            let battery = convexify::constraint_battery(&BatteryInput::from_instance(&found.instance, &found.decl)?)?;
            let ok = battery.all_pass() && forcing.all_unique();
            eprintln!("candidate {} of {}; battery {}, forcing {}", found.index, cands.len(), pass(battery.all_pass()), pass(forcing.all_unique()));
            emit(&json!({
                "found": true,
                "index": found.index,
                "tried": found.tried,
                "census": found.instance.census(),
                "decl": found.decl,
                "battery": battery,
                "forcing": forcing,
                "protoset": found.instance.protoset,
            }))?;
            Ok(ok)
        }
        Cmd::Fig8 => {
            let r = convexify::build_fig8_instance()?;
            let ok = r.all_convex && r.centrally_symmetric;
            eprintln!("census {:?}, convex {}, symmetric {}", r.census, r.all_convex, r.centrally_symmetric);
            emit(&json!({ "report": r, "protoset": r.protoset }))?;
            Ok(ok)
        }
        Cmd::Render { input, protoset, output, scale, stroke, marks, labels, decimals } => {
            let style = RenderStyle { scale, stroke_width: stroke, show_marks: marks, show_labels: labels, decimals };
            let text = read_text(&input)?;
            let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{input}: {e}")))?;
            let svg = if value.is_array() {
                let path = protoset.ok_or_else(|| CliError::Input("rendering a patch needs --protoset".into()))?;
                let ps = load(&path.to_string_lossy())?;
                let patch: Patch = serde_json::from_value(value).map_err(|e| CliError::Input(format!("{input}: {e}")))?;
                let a = analyze(&ps, &patch)?;
                for p in &a.problems {
                    eprintln!("warning: {p}");
                }
                render_patch(&ps, &patch, &style)?
            } else {
                render_protoset(&load(&input)?, &style)?
            };
            match output {
                Some(p) => std::fs::write(&p, svg).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?,
                None => io::stdout().lock().write_all(svg.as_bytes())?,
            }
            Ok(true)
        }
        Cmd::Builtins { emit: None } => {
            emit(&builtins::NAMES)?;
            Ok(true)
        }
        Cmd::Builtins { emit: Some(name) } => {
            let ps = builtins::by_name(&name).ok_or_else(|| CliError::Input(format!("no builtin `{name}`")))?;
            let mut out = io::stdout().lock();
            writeln!(out, "{}", ps.to_json())?;
            Ok(true)
        }
    }
}

fn pass(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        // reader went away, e.g. piped into `head`
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
