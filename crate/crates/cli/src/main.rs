//! `knotcubes`: command-line front end for the knotcubes library.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use knotcubes::actions::{kappa_axis, kappa_overlap};
use knotcubes::graphing::{
    gr1_loop, litherland_spin, LoopOfKnots, ResolutionFamily, SpunKnotSampled,
};
use knotcubes::knot::{standard_knot, LongKnotPL, STANDARD_NAMES};
use knotcubes::operad::{selfcheck, CubeConfig};
use knotcubes::par::Execution;
use knotcubes::quadrisecant::{family_nu2, v2_oracle, v2_report, EnumerateOptions, RESIDUAL_TOL};
use knotcubes::tube::{tube_from_knot, TubeEmbedding};
use knotcubes::Error;

const THREADS_ENV: &str = "KNOTCUBES_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "knotcubes",
    version,
    about = "Little cubes actions on long knots and quadrisecant counts"
)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads; 1 runs sequentially. Defaults to $KNOTCUBES_THREADS, then all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The standard knot library.
    #[command(subcommand)]
    Knot(KnotCommand),
    /// Act by a cube configuration on a tuple of knots.
    Compose(ComposeArgs),
    /// Spin a loop of knots into a sampled surface.
    Spin(SpinArgs),
    /// The type-2 invariant of a knot in R^3.
    V2(V2Args),
    /// Alternating quadrisecants.
    #[command(subcommand)]
    Quadsec(QuadsecCommand),
    /// Signed count of alternating quadrisecants over the resolution family in R^4.
    #[command(name = "family-nu2")]
    FamilyNu2(FamilyArgs),
    /// The little cubes operad.
    #[command(subcommand)]
    Operad(OperadCommand),
    /// Check a knot file.
    Validate(InputArgs),
}

#[derive(Subcommand, Debug)]
enum KnotCommand {
    List,
    Show(NameArgs),
    Export(ExportArgs),
}

#[derive(Args, Debug)]
struct NameArgs {
    #[arg(long)]
    name: String,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[arg(long)]
    name: String,
    #[arg(long)]
    out: PathBuf,
    /// CSV rows of uniform samples instead of the vertex JSON.
    #[arg(long)]
    csv_samples: Option<usize>,
}

#[derive(Args, Debug)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ComposeMode {
    Axis,
    Overlap,
}

#[derive(Args, Debug)]
struct ComposeArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, num_args = 0..)]
    inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = ComposeMode::Axis)]
    mode: ComposeMode,
    /// Tube radius for knots in overlap mode; defaults to a quarter of the reach.
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SpinMethod {
    Gr1,
    Litherland,
}

#[derive(Args, Debug)]
struct SpinArgs {
    #[arg(long, value_enum)]
    method: SpinMethod,
    #[arg(long = "loop")]
    loop_path: PathBuf,
    #[arg(long, default_value_t = 64)]
    samples: usize,
    /// Output file; `.obj` writes a mesh, anything else JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Injectivity proxy parameter separation; defaults to two grid steps.
    #[arg(long)]
    delta: Option<f64>,
    /// Injectivity proxy image separation; defaults to a tenth of a grid step.
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum V2Method {
    Quadrisecant,
    Gauss,
}

#[derive(Args, Debug)]
struct V2Args {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = V2Method::Quadrisecant)]
    method: V2Method,
}

#[derive(Subcommand, Debug)]
enum QuadsecCommand {
    Enumerate(EnumerateArgs),
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[arg(long)]
    input: PathBuf,
    /// Write `t1,t2,t3,t4,sign,residual` rows here. Degenerate inputs are
    /// perturbed first, as for `v2`.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    /// Immersed knot with two double points; defaults to the library's immersed trefoil.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 16)]
    grid: usize,
    /// Generic-position jitter as a fraction of the resolution height.
    #[arg(long, default_value_t = 0.1)]
    jitter: f64,
    /// Angle samples per axis for the embedding check of the jittered family.
    #[arg(long, default_value_t = 8)]
    samples: usize,
}

#[derive(Subcommand, Debug)]
enum OperadCommand {
    Selfcheck(SelfcheckArgs),
}

#[derive(Args, Debug)]
struct SelfcheckArgs {
    #[arg(long, default_value_t = 200)]
    cases: usize,
}

/// Everything that determines a run's output, echoed into every JSON report.
#[derive(Clone, Debug, Serialize)]
struct RunConfig {
    command: String,
    seed: u64,
    threads: Option<usize>,
    collinearity_tol: f64,
    injectivity_delta: Option<f64>,
    injectivity_eps: Option<f64>,
    samples: Option<usize>,
    grid: Option<usize>,
    json: bool,
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Outcome<()> {
    fs::write(path, contents)
        .map_err(|e| Failure::Compute(format!("cannot write {}: {e}", path.display())))
}

fn read_knot(path: &Path) -> Outcome<LongKnotPL> {
    Ok(LongKnotPL::from_json(&read(path)?)?)
}

fn library_knot(name: &str) -> Outcome<LongKnotPL> {
    standard_knot(name)
        .map_err(|_| Failure::Usage(format!("unknown knot {name:?}; try `knot list`")))
}

struct Context {
    config: RunConfig,
    execution: Execution,
}

impl Context {
    /// Prints the report: JSON envelope with `--json`, else the text summary.
    fn emit<T: Serialize>(&self, payload: &T, text: impl FnOnce() -> String) {
        if self.config.json {
            println!(
                "{}",
                serde_json::to_string_pretty(&self.envelope(payload)).expect("reports serialize")
            );
        } else {
            println!("{}", text());
        }
    }

    fn envelope<T: Serialize>(&self, payload: &T) -> Value {
        let mut v = serde_json::to_value(payload).expect("reports serialize");
        if !v.is_object() {
            v = json!({ "result": v });
        }
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let obj = v.as_object_mut().expect("object");
        obj.insert(
            "config".into(),
            serde_json::to_value(&self.config).expect("config serializes"),
        );
        obj.insert("library_version".into(), json!(env!("CARGO_PKG_VERSION")));
        obj.insert("timestamp".into(), json!(timestamp));
        v
    }
}

fn configure_threads(requested: Option<usize>) -> Outcome<Option<usize>> {
    let threads = match requested {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(s) => Some(
                s.trim()
                    .parse()
                    .map_err(|_| Failure::Usage(format!("{THREADS_ENV}={s:?} is not a count")))?,
            ),
            Err(_) => None,
        },
    };
    if threads == Some(0) {
        return Err(Failure::Usage("thread count must be positive".into()));
    }
    if let Some(n) = threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(threads)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Knot(KnotCommand::List) => "knot list",
        Command::Knot(KnotCommand::Show(_)) => "knot show",
        Command::Knot(KnotCommand::Export(_)) => "knot export",
        Command::Compose(_) => "compose",
        Command::Spin(_) => "spin",
        Command::V2(_) => "v2",
        Command::Quadsec(_) => "quadsec enumerate",
        Command::FamilyNu2(_) => "family-nu2",
        Command::Operad(_) => "operad selfcheck",
        Command::Validate(_) => "validate",
    }
}

fn run(cli: Cli) -> Outcome<()> {
    let threads = configure_threads(cli.threads)?;
    let (samples, grid, delta, eps) = match &cli.command {
        Command::Spin(a) => (Some(a.samples), None, a.delta, a.eps),
        Command::FamilyNu2(a) => (Some(a.samples), Some(a.grid), None, None),
        Command::Operad(OperadCommand::Selfcheck(a)) => (Some(a.cases), None, None, None),
        Command::Knot(KnotCommand::Export(a)) => (a.csv_samples, None, None, None),
        _ => (None, None, None, None),
    };
    for (name, t) in [("delta", delta), ("eps", eps)] {
        if let Some(t) = t {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Failure::Usage(format!("--{name} must be positive")));
            }
        }
    }
    let config = RunConfig {
        command: command_name(&cli.command).into(),
        seed: cli.seed,
        threads,
        collinearity_tol: RESIDUAL_TOL,
        injectivity_delta: delta,
        injectivity_eps: eps,
        samples,
        grid,
        json: cli.json,
    };
    let execution = if threads == Some(1) {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let cx = Context { config, execution };
    match cli.command {
        Command::Knot(k) => knot(&cx, k),
        Command::Compose(a) => compose(&cx, a),
        Command::Spin(a) => spin(&cx, a),
        Command::V2(a) => v2(&cx, a),
        Command::Quadsec(QuadsecCommand::Enumerate(a)) => quadsec(&cx, a),
        Command::FamilyNu2(a) => family(&cx, a),
        Command::Operad(OperadCommand::Selfcheck(a)) => operad(&cx, a),
        Command::Validate(a) => validate(&cx, a),
    }
}

fn knot(cx: &Context, cmd: KnotCommand) -> Outcome<()> {
    match cmd {
        KnotCommand::List => {
            cx.emit(&json!({ "knots": STANDARD_NAMES }), || {
                STANDARD_NAMES.join("\n")
            });
        }
        KnotCommand::Show(a) => {
            let f = library_knot(&a.name)?;
            cx.emit(&json!({ "name": a.name, "knot": f }), || f.to_json());
        }
        KnotCommand::Export(a) => {
            let f = library_knot(&a.name)?;
            let contents = match a.csv_samples {
                Some(n) => f.to_csv(n),
                None => f.to_json(),
            };
            write(&a.out, &contents)?;
            cx.emit(
                &json!({ "name": a.name, "out": a.out, "segments": f.segment_count() }),
                || format!("wrote {} to {}", a.name, a.out.display()),
            );
        }
    }
    Ok(())
}

fn compose(cx: &Context, a: ComposeArgs) -> Outcome<()> {
    let config: CubeConfig =
        serde_json::from_str(&read(&a.config)?).map_err(|e| Failure::Compute(e.to_string()))?;
    let knots = a
        .inputs
        .iter()
        .map(|p| read_knot(p))
        .collect::<Outcome<Vec<_>>>()?;
    let (body, summary) = match a.mode {
        ComposeMode::Axis => {
            let g = kappa_axis(&config, &knots)?;
            let summary = format!("composite with {} segments", g.segment_count());
            (g.to_json(), summary)
        }
        ComposeMode::Overlap => {
            let tubes = knots
                .iter()
                .map(|f| {
                    let r = match a.radius {
                        Some(r) => r,
                        None => f.reach_estimate()?.min(1.0) / 4.0,
                    };
                    tube_from_knot(f, r)
                })
                .collect::<Result<Vec<TubeEmbedding>, Error>>()?;
            let e = kappa_overlap(&config, &tubes)?;
            let body =
                serde_json::to_string_pretty(&e).map_err(|e| Failure::Compute(e.to_string()))?;
            (
                body,
                format!("composite tube embedding of {} inputs", tubes.len()),
            )
        }
    };
    match &a.out {
        Some(p) => write(p, &body)?,
        None if !cx.config.json => println!("{body}"),
        None => {}
    }
    if cx.config.json || a.out.is_some() {
        let result: Value = serde_json::from_str(&body).expect("own output parses");
        cx.emit(
            &json!({ "mode": a.mode, "arity": config.arity(), "composite": result }),
            || summary,
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct SpinReport<'a> {
    method: SpinMethod,
    passes_proxy: bool,
    deviation_outside: f64,
    standard_outside: bool,
    surface: Option<&'a SpunKnotSampled>,
}

fn spin(cx: &Context, a: SpinArgs) -> Outcome<()> {
    if a.samples < 2 {
        return Err(Failure::Usage("--samples must be at least 2".into()));
    }
    let lp = LoopOfKnots::from_json(&read(&a.loop_path)?)?;
    let s = match a.method {
        SpinMethod::Gr1 => gr1_loop(&lp, a.samples)?,
        SpinMethod::Litherland => litherland_spin(&lp, a.samples)?,
    };
    let step = 2.0 * s.extent / s.samples as f64;
    let passes = s.passes_proxy(a.delta.unwrap_or(2.0 * step), a.eps.unwrap_or(0.1 * step));
    let obj = a
        .out
        .as_ref()
        .is_some_and(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("obj")));
    if let Some(p) = &a.out {
        let body = if obj {
            s.to_obj()?
        } else {
            serde_json::to_string(&s).expect("surfaces serialize")
        };
        write(p, &body)?;
    }
    let report = SpinReport {
        method: a.method,
        passes_proxy: passes,
        deviation_outside: s.deviation_outside(),
        standard_outside: s.standard_outside,
        surface: if a.out.is_none() { Some(&s) } else { None },
    };
    cx.emit(&report, || {
        format!(
            "{} samples^{} in R^{}: injectivity proxy {}",
            s.samples,
            s.domain_dim,
            s.ambient_dim,
            if passes { "passed" } else { "FAILED" }
        )
    });
    if !passes {
        return Err(Failure::Compute(
            "sampled surface fails the injectivity proxy".into(),
        ));
    }
    Ok(())
}

fn v2(cx: &Context, a: V2Args) -> Outcome<()> {
    let f = read_knot(&a.input)?;
    match a.method {
        V2Method::Quadrisecant => {
            let opts = EnumerateOptions {
                execution: cx.execution,
                prune: true,
                seed: cx.config.seed,
            };
            let r = v2_report(&f, opts)?;
            let payload = json!({
                "method": a.method,
                "v2": r.v2,
                "quadrisecants": r.quadrisecants,
                "perturbation_seed": r.perturbation.map(|p| p.seed),
                "perturbation_magnitude": r.perturbation.map(|p| p.magnitude),
            });
            cx.emit(&payload, || {
                format!(
                    "v2 = {} ({} alternating quadrisecants)",
                    r.v2,
                    r.quadrisecants.len()
                )
            });
        }
        V2Method::Gauss => {
            let v = v2_oracle(&f)?;
            cx.emit(&json!({ "method": a.method, "v2": v }), || {
                format!("v2 = {v}")
            });
        }
    }
    Ok(())
}

fn quadsec(cx: &Context, a: EnumerateArgs) -> Outcome<()> {
    let f = read_knot(&a.input)?;
    let r = v2_report(
        &f,
        EnumerateOptions {
            execution: cx.execution,
            prune: true,
            seed: cx.config.seed,
        },
    )?;
    let qs = r.quadrisecants;
    if let Some(p) = &a.csv {
        let mut body = String::from("t1,t2,t3,t4,sign,residual\n");
        for q in &qs {
            let [t1, t2, t3, t4] = q.params;
            body.push_str(&format!("{t1},{t2},{t3},{t4},{},{}\n", q.sign, q.residual));
        }
        write(p, &body)?;
    }
    let payload =
        json!({ "quadrisecants": qs, "perturbation_seed": r.perturbation.map(|p| p.seed) });
    cx.emit(&payload, || {
        let mut out = format!("{} alternating quadrisecants", qs.len());
        for q in &qs {
            out.push_str(&format!("\n  {:?} sign {:+}", q.params, q.sign));
        }
        out
    });
    Ok(())
}

fn family(cx: &Context, a: FamilyArgs) -> Outcome<()> {
    if !(a.jitter >= 0.0 && a.jitter < 0.5) {
        return Err(Failure::Usage("--jitter must lie in [0, 0.5)".into()));
    }
    let g = match &a.input {
        Some(p) => read_knot(p)?,
        None => library_knot("immersed_trefoil")?,
    };
    let g = if g.ambient_dim() == 3 {
        g.push_forward(4)?
    } else {
        g
    };
    let base = ResolutionFamily::new(&g)?;
    let h = base.height();
    let fam = if a.jitter > 0.0 {
        base.perturbed(cx.config.seed, a.jitter * h, a.samples)?
    } else {
        base
    };
    let count = family_nu2(&fam, a.grid, cx.execution)?;
    let payload = json!({
        "nu2": count.nu2,
        "stable": count.stable,
        "refined_nu2": count.refined_nu2,
        "grid": count.grid,
        "height": h,
        "jitter_magnitude": a.jitter * h,
        "solutions": count.solutions,
        "rejected_non_transverse": count.rejected_non_transverse,
    });
    cx.emit(&payload, || {
        format!(
            "nu2 = {} on a {}x{} grid ({}), {} transverse solutions, {} rejected",
            count.nu2,
            count.grid,
            count.grid,
            if count.stable {
                "stable"
            } else {
                "UNSTABLE under refinement"
            },
            count.solutions.len(),
            count.rejected_non_transverse
        )
    });
    Ok(())
}

fn operad(cx: &Context, a: SelfcheckArgs) -> Outcome<()> {
    let r = selfcheck(cx.config.seed, a.cases);
    let passed = r.passed();
    cx.emit(&json!({ "passed": passed, "report": r }), || {
        format!(
            "{} cases: {} unit, {} associativity, {} equivariance failures",
            r.cases, r.unit_failures, r.associativity_failures, r.equivariance_failures
        )
    });
    if !passed {
        return Err(Failure::Compute("operad axiom failures".into()));
    }
    Ok(())
}

fn validate(cx: &Context, a: InputArgs) -> Outcome<()> {
    let f = read_knot(&a.input)?;
    let check = f.validate();
    let reach = f.reach_estimate().ok().filter(|r| r.is_finite());
    cx.emit(
        &json!({
            "valid": check.is_ok(),
            "error": check.as_ref().err().map(|e| e.to_string()),
            "kind": f.kind(),
            "ambient_dim": f.ambient_dim(),
            "segments": f.segment_count(),
            "double_points": f.double_points(),
            "reach_estimate": reach,
        }),
        || match &check {
            Ok(()) => format!("valid {:?} knot, {} segments", f.kind(), f.segment_count()),
            Err(e) => format!("invalid: {e}"),
        },
    );
    check?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
