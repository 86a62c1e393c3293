//! `zcolor`: analyze, reduce and draw palette graphs of Z-colorings.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;
use zcolor_core::coloring::{determinant, find_nontrivial_coloring, is_simple, primitive_normalize};
use zcolor_core::fixtures::{fixture_dir, load_file};
use zcolor_core::{
    classify_five, minimize, palette_graph, par, pretzel, selftest, verify_trace, ColorImage, Diagram, FiveClass,
    ReductionError, Simplicity,
};

const PARSE: u8 = 1;
const INTERNAL: u8 = 2;
const NOT_COLORABLE: u8 = 3;
const SELFTEST: u8 = 4;

#[derive(Parser)]
#[command(name = "zcolor", version, about = "Z-colorings of link diagrams")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Determinant, coloring lattice, simplicity and five-color class.
    Analyze(Input),
    /// Reduce the number of colors with Reidemeister moves.
    Reduce {
        #[command(flatten)]
        input: Input,
        /// Write the verified move trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Palette graph of the found coloring.
    Palette {
        #[command(flatten)]
        input: Input,
        /// Write the graph in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Run the acceptance checks over the fixture directory.
    Selftest,
}

#[derive(Args)]
struct Input {
    /// Pretzel link from signed twist counts, e.g. 2,-2,2,-2.
    #[arg(long, allow_hyphen_values = true)]
    pretzel: Option<String>,
    /// Every .pd file in a directory, in name order.
    #[arg(long)]
    all: Option<PathBuf>,
    /// PD files.
    paths: Vec<PathBuf>,
}

#[derive(Debug)]
struct Fail {
    code: u8,
    msg: String,
}

fn fail(code: u8, msg: impl Into<String>) -> Fail {
    Fail { code, msg: msg.into() }
}

#[derive(Serialize)]
struct Report {
    link_name: String,
    determinant: Value,
    colorable: bool,
    image: Option<ColorImage>,
    simple_d: Option<i64>,
    achieved: Option<usize>,
    lower_bound: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    five_class: Option<FiveClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    initial_image: Option<ColorImage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    moves_applied: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    route: Option<String>,
}

#[derive(Serialize)]
struct PaletteReport {
    link_name: String,
    image: ColorImage,
    vertices: Vec<i64>,
    edges: Vec<(i64, i64, i64)>,
    components: Vec<Vec<i64>>,
}

enum Source {
    File(PathBuf),
    Pretzel(String),
}

impl Source {
    fn name(&self) -> String {
        match self {
            Source::File(p) => p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into()),
            Source::Pretzel(spec) => format!("pretzel({spec})"),
        }
    }

    fn load(&self) -> Result<Diagram, Fail> {
        match self {
            Source::File(p) => load_file(p).map_err(|e| fail(PARSE, e.to_string())),
            Source::Pretzel(spec) => {
                let twists = spec
                    .split(',')
                    .map(|t| t.trim().parse::<i64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| fail(PARSE, format!("bad pretzel spec {spec:?}: {e}")))?;
                pretzel(&twists).map_err(|e| fail(PARSE, format!("bad pretzel spec {spec:?}: {e}")))
            }
        }
    }
}

fn sources(input: &Input) -> Result<Vec<Source>, Fail> {
    let mut out = Vec::new();
    if let Some(spec) = &input.pretzel {
        out.push(Source::Pretzel(spec.clone()));
    }
    if let Some(dir) = &input.all {
        let entries = std::fs::read_dir(dir).map_err(|e| fail(PARSE, format!("cannot read {}: {e}", dir.display())))?;
        let mut files: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "pd"))
            .collect();
        files.sort();
        out.extend(files.into_iter().map(Source::File));
    }
    out.extend(input.paths.iter().cloned().map(Source::File));
    if out.is_empty() {
        return Err(fail(PARSE, "no input: give PD files, --pretzel or --all"));
    }
    Ok(out)
}

fn det_value(d: &Diagram) -> Value {
    let det = determinant(d);
    match u64::try_from(&det) {
        Ok(v) => Value::from(v),
        Err(_) => Value::from(det.to_string()),
    }
}

fn lower_bound(d: &Diagram) -> usize {
    if d.diagram_components() > 1 {
        2
    } else {
        4
    }
}

fn analyze(name: String, d: &Diagram) -> Result<Report, Fail> {
    let found = find_nontrivial_coloring(d).map(|g| primitive_normalize(&g));
    let colorable = found.is_some();
    let simple_d = found.as_ref().and_then(|g| match is_simple(d, g) {
        Simplicity::Simple(k) => Some(k),
        _ => None,
    });
    Ok(Report {
        link_name: name,
        determinant: det_value(d),
        colorable,
        image: found.as_ref().map(|g| g.image()),
        simple_d,
        achieved: found.as_ref().map(|g| g.image().len()),
        lower_bound: colorable.then(|| lower_bound(d)),
        five_class: found.as_ref().filter(|g| g.image().len() == 5).map(classify_five),
        initial_image: None,
        moves_applied: None,
        route: None,
    })
}

fn reduce(name: String, d: &Diagram, trace: Option<&Path>) -> Result<Report, Fail> {
    let r = minimize(d).map_err(|e| match e {
        ReductionError::NotColorable => fail(NOT_COLORABLE, format!("{name}: {e}")),
        e => fail(INTERNAL, format!("{name}: {e}")),
    })?;
    verify_trace(&r.trace).map_err(|e| fail(INTERNAL, format!("{name}: {e}")))?;
    if r.achieved < r.lower_bound && !r.trivial {
        return Err(fail(INTERNAL, format!("{name}: {} colors is below the bound {}", r.achieved, r.lower_bound)));
    }
    if let Some(path) = trace {
        std::fs::write(path, r.trace.to_json())
            .map_err(|e| fail(INTERNAL, format!("cannot write {}: {e}", path.display())))?;
    }
    let simple_d = match is_simple(r.final_diagram(), r.final_coloring()) {
        Simplicity::Simple(k) => Some(k),
        _ => None,
    };
    eprintln!("{name}: {:?} -> {:?} in {} moves ({})", r.initial_image.0, r.final_image.0, r.moves_applied, r.route);
    Ok(Report {
        link_name: name,
        determinant: det_value(d),
        colorable: true,
        image: Some(r.final_image),
        simple_d,
        achieved: Some(r.achieved),
        lower_bound: Some(r.lower_bound),
        five_class: None,
        initial_image: Some(r.initial_image),
        moves_applied: Some(r.moves_applied),
        route: Some(r.route),
    })
}

fn palette(name: String, d: &Diagram, dot: Option<&Path>) -> Result<PaletteReport, Fail> {
    let g = find_nontrivial_coloring(d)
        .map(|g| primitive_normalize(&g))
        .ok_or_else(|| fail(NOT_COLORABLE, format!("{name}: diagram admits no non-trivial coloring")))?;
    let p = palette_graph(d, &g);
    if let Some(path) = dot {
        std::fs::write(path, p.to_dot()).map_err(|e| fail(INTERNAL, format!("cannot write {}: {e}", path.display())))?;
    }
    eprintln!("{name}: {} colors, {} palette components", p.vertices.len(), p.component_count());
    Ok(PaletteReport { link_name: name, image: g.image(), components: p.components(), vertices: p.vertices, edges: p.edges })
}

/// Runs `f` on every input (in parallel for batches) and prints one JSON
/// value, or an array when there are several inputs.
fn each<R: Serialize + Send>(
    input: &Input,
    single_only: bool,
    f: impl Fn(String, &Diagram) -> Result<R, Fail> + Sync + Send,
) -> ExitCode {
    let srcs = match sources(input) {
        Ok(s) => s,
        Err(e) => return finish(vec![Err(e)], false),
    };
    if single_only && srcs.len() > 1 {
        return finish(vec![Err(fail(PARSE, "--trace and --dot take a single input"))], false);
    }
    let many = srcs.len() > 1;
    let results = par::map(&srcs, |s| s.load().and_then(|d| f(s.name(), &d)));
    let named: Vec<Result<Value, (String, Fail)>> = srcs
        .iter()
        .zip(results)
        .map(|(s, r)| match r {
            Ok(v) => Ok(serde_json::to_value(v).expect("report serializes")),
            Err(e) => Err((s.name(), e)),
        })
        .collect();
    print_all(named, many)
}

fn print_all(results: Vec<Result<Value, (String, Fail)>>, many: bool) -> ExitCode {
    let mut code = 0u8;
    let mut values = Vec::new();
    for r in results {
        match r {
            Ok(v) => values.push(v),
            Err((name, e)) => {
                eprintln!("error: {}", e.msg);
                code = if code == 0 { e.code } else { code.min(e.code) };
                values.push(serde_json::json!({ "link_name": name, "error": e.msg, "exit_code": e.code }));
            }
        }
    }
    let out = if many { Value::Array(values) } else { values.pop().unwrap_or(Value::Null) };
    emit(&out);
    ExitCode::from(code)
}

/// One line of JSON on stdout; a closed pipe is not an error.
fn emit(v: &impl Serialize) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{}", serde_json::to_string(v).expect("json"));
}

fn finish(results: Vec<Result<Value, Fail>>, many: bool) -> ExitCode {
    print_all(results.into_iter().map(|r| r.map_err(|e| (String::new(), e))).collect(), many)
}

fn run_selftest() -> ExitCode {
    let dir = fixture_dir();
    let checks = selftest::run(&dir);
    for c in &checks {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        eprintln!("{mark} {} ({} ms): {}", c.name, c.millis, c.detail);
    }
    emit(&checks);
    if checks.iter().all(|c| c.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(SELFTEST)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(PARSE) } else { ExitCode::SUCCESS };
        }
    };
    match cli.cmd {
        Cmd::Analyze(input) => each(&input, false, analyze),
        Cmd::Reduce { input, trace } => {
            each(&input, trace.is_some(), |name, d| reduce(name, d, trace.as_deref()))
        }
        Cmd::Palette { input, dot } => each(&input, dot.is_some(), |name, d| palette(name, d, dot.as_deref())),
        Cmd::Selftest => run_selftest(),
    }
}
