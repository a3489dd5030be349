//! Command-line front end. Reports go to the output stream as JSON lines,
//! grids to files.

mod expr;

pub use expr::Expr;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fixtures::{fixture, fixture_names, AnalyticFunction, FixtureSampler};
use crate::geometry::{abp_check, john_normalize, section_with_rays};
use crate::grid::GridFunction;
use crate::linalg::SymMatrix;
use crate::operators::{ellipticity_probe, Family, OperatorSpec, ProbeConfig, PucciSign};
use crate::polyfit::{BallSampler, FitConstraint};
use crate::regularity::{
    campanato_table, check_viscosity_with, oscillation_profile, CampanatoConfig, Side,
    ViscosityOptions,
};
use crate::solver::{
    solve_linear_cfg, solve_mean_curvature, solve_monge_ampere, solve_pucci, Scheme, SolveConfig,
};

pub const THREADS_ENV: &str = "NELLIPTIC_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "nelliptic",
    version,
    about = "Elliptic operator probes, solvers and regularity reports"
)]
struct Cli {
    /// Worker threads; defaults to $NELLIPTIC_THREADS, then 1.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate structure constants of an operator.
    Probe(ProbeArgs),
    /// Solve a Dirichlet problem on a 2D grid.
    Solve(SolveArgs),
    /// Decay table and Hölder exponent at a point.
    Analyze(AnalyzeArgs),
    /// Discrete viscosity sub/supersolution check.
    Check(CheckArgs),
    /// Compare sup u⁻ with the contact-set norm of f⁺.
    Abp(AbpArgs),
    /// Normalize sections of a convex function.
    Normalize(NormalizeArgs),
    /// Built-in closed-form fixtures.
    Fixtures {
        #[command(subcommand)]
        action: FixturesAction,
    },
}

#[derive(Args, Debug, Serialize)]
struct ProbeArgs {
    #[arg(long, allow_hyphen_values = true)]
    op: String,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long, default_value_t = 512)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dimension of the probed jets.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Equation {
    Linear,
    Pucci,
    Ma,
    Mc,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SignArg {
    Plus,
    Minus,
}

#[derive(Args, Debug, Serialize)]
struct SolveArgs {
    #[arg(long, value_enum)]
    eq: Equation,
    /// Grid file whose layout is used.
    #[arg(long, conflicts_with = "box_")]
    grid: Option<PathBuf>,
    /// Square box "lo,hi".
    #[arg(long = "box", id = "box_", allow_hyphen_values = true, requires = "h")]
    #[serde(rename = "box")]
    box_: Option<String>,
    #[arg(long)]
    h: Option<f64>,
    /// Right-hand side: grid file or expression.
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    f: String,
    /// Boundary data: grid file or expression.
    #[arg(long, allow_hyphen_values = true)]
    g: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long = "Lambda", default_value_t = 1.0)]
    #[serde(rename = "Lambda")]
    big_lambda: f64,
    #[arg(long, value_enum, default_value_t = SignArg::Minus)]
    sign: SignArg,
    /// Coefficient matrix "a11,a12;a21,a22" for the linear equation.
    #[arg(long, allow_hyphen_values = true, default_value = "1,0;0,1")]
    a: String,
    /// Drift "b1,b2" for the linear equation.
    #[arg(long, allow_hyphen_values = true, default_value = "0,0")]
    b: String,
    /// Small-data guard for the mean curvature solver.
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    #[arg(long, default_value_t = 8)]
    directions: usize,
    #[arg(long, default_value_t = 0.5)]
    damping: f64,
}

#[derive(Args, Debug, Serialize)]
struct AnalyzeArgs {
    #[arg(long, conflicts_with = "fixture", required_unless_present = "fixture")]
    input: Option<PathBuf>,
    #[arg(long)]
    fixture: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    #[arg(long)]
    degree: usize,
    #[arg(long, default_value_t = 0.5)]
    eta: f64,
    /// Largest radius; defaults to 0.5 for fixtures and to the distance to
    /// the grid boundary for grid input.
    #[arg(long)]
    r0: Option<f64>,
    #[arg(long, default_value_t = 6)]
    levels: usize,
    /// Enforce the equation at the point: "<op>:<f0>".
    #[arg(long, allow_hyphen_values = true)]
    constrain: Option<String>,
    #[arg(long)]
    norm_bound: Option<f64>,
    /// Fixture samples per ball: 2m+1 lattice points per axis.
    #[arg(long, default_value_t = 8)]
    lattice: usize,
    /// Write (r, E, osc) rows here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct CheckArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    op: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    f: String,
    #[arg(long, default_value = "both")]
    side: String,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Bound on the test functions' size.
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, default_value_t = 32)]
    slopes: usize,
}

#[derive(Args, Debug, Serialize)]
struct AbpArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    f: String,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long = "Lambda", default_value_t = 1.0)]
    #[serde(rename = "Lambda")]
    big_lambda: f64,
    #[arg(long, default_value_t = 0.0)]
    b0: f64,
}

#[derive(Args, Debug, Serialize)]
struct NormalizeArgs {
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    fixture: Option<String>,
    #[arg(long)]
    input: Option<PathBuf>,
    /// Section heights "h1,h2,…".
    #[arg(long)]
    h: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0,0")]
    point: String,
    #[arg(long, default_value_t = 256)]
    rays: usize,
}

#[derive(Subcommand, Debug)]
enum FixturesAction {
    /// Names and parameter ranges.
    List,
    /// Value, gradient, Hessian and right-hand side at a point.
    Eval {
        #[arg(long)]
        fixture: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
}

/// Run the command line `args` (without the program name), writing reports
/// to `out`. Returns the process exit code: 0 success, 2 usage error,
/// 3 numeric failure.
pub fn run(args: &[String], out: &mut dyn Write) -> i32 {
    let argv = std::iter::once("nelliptic".to_string()).chain(args.iter().cloned());
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(out, "{}", e.render());
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    let threads = match resolve_threads(cli.threads) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            return 2;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(out, "error: cannot start {threads} threads: {e}");
            return 3;
        }
    };
    let mut emitter = Emitter {
        out: Vec::new(),
        threads,
    };
    let outcome = pool.install(|| dispatch(&cli.command, &mut emitter));
    let _ = out.write_all(&emitter.out);
    match outcome {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(out, "error: {msg}");
            2
        }
        Err(Failure::Numeric) => 3,
    }
}

fn resolve_threads(flag: Option<usize>) -> Result<usize> {
    let n = match flag {
        Some(n) => n,
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| {
                Error::Parse(format!(
                    "{THREADS_ENV} must be a positive integer, got {v:?}"
                ))
            })?,
            Err(_) => 1,
        },
    };
    if n == 0 {
        return Err(Error::Parse("thread count must be positive".into()));
    }
    Ok(n)
}

enum Failure {
    Usage(String),
    /// Already reported in the stream.
    Numeric,
}

struct Emitter {
    out: Vec<u8>,
    threads: usize,
}

impl Emitter {
    fn record(
        &mut self,
        kind: &str,
        config: Value,
        result: impl Serialize,
    ) -> std::result::Result<(), Failure> {
        let mut config = config;
        if let Value::Object(m) = &mut config {
            m.insert("threads".into(), json!(self.threads));
        }
        let line = json!({ "kind": kind, "config": config, "result": result });
        writeln!(self.out, "{line}").map_err(|e| Failure::Usage(e.to_string()))
    }

    /// Report a module error under `kind`, or turn input problems into usage errors.
    fn fail(&mut self, kind: &str, config: Value, err: Error) -> Failure {
        match err {
            Error::Parse(m) | Error::Io(m) => Failure::Usage(m),
            other => {
                let mut config = config;
                if let Value::Object(m) = &mut config {
                    m.insert("threads".into(), json!(self.threads));
                }
                let line = json!({
                    "kind": kind,
                    "config": config,
                    "error": { "class": error_class(&other), "message": other.to_string() },
                });
                let _ = writeln!(self.out, "{line}");
                Failure::Numeric
            }
        }
    }
}

fn error_class(e: &Error) -> &'static str {
    match e {
        Error::InvalidInput(_) => "invalid_input",
        Error::Parameter(_) => "parameter",
        Error::SingularEvaluation(_) => "singular_evaluation",
        Error::ProbeDomain { .. } => "probe_domain",
        Error::Rank(_) => "rank",
        Error::ConstraintInfeasible(_) => "constraint_infeasible",
        Error::Singularity(_) => "singularity",
        Error::SectionEscape(_) => "section_escape",
        Error::Precondition(_) => "precondition",
        Error::Anisotropy(_) => "anisotropy",
        Error::IterationLimit { .. } => "iteration_limit",
        Error::SmallData(_) => "small_data",
        Error::Admissibility(_) => "admissibility",
        Error::InsufficientData(_) => "insufficient_data",
        Error::Parse(_) => "parse",
        Error::Io(_) => "io",
    }
}

type Outcome = std::result::Result<(), Failure>;

fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

fn dispatch(cmd: &Command, em: &mut Emitter) -> Outcome {
    match cmd {
        Command::Probe(a) => probe(a, em),
        Command::Solve(a) => solve(a, em),
        Command::Analyze(a) => analyze(a, em),
        Command::Check(a) => check(a, em),
        Command::Abp(a) => abp(a, em),
        Command::Normalize(a) => normalize(a, em),
        Command::Fixtures { action } => fixtures_cmd(action, em),
    }
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {s:?} in {what}")))
        })
        .collect()
}

fn parse_matrix(text: &str) -> Result<SymMatrix> {
    let rows: Vec<Vec<f64>> = text
        .split(';')
        .map(|r| parse_list(r, "matrix"))
        .collect::<Result<_>>()?;
    SymMatrix::from_rows(&rows).map_err(|e| Error::Parse(e.to_string()))
}

/// A grid file if `text` names one, otherwise an expression evaluated on
/// the nodes of `layout`.
fn grid_or_expr(text: &str, layout: &GridFunction) -> Result<GridFunction> {
    let path = Path::new(text);
    if path.is_file() {
        let g = GridFunction::read(path)?;
        if !g.same_layout(layout) {
            return Err(Error::Parse(format!(
                "{text} does not match the grid layout"
            )));
        }
        return Ok(g);
    }
    let e = Expr::parse(text).map_err(|err| {
        Error::Parse(format!(
            "{text:?} is neither a grid file nor an expression ({err})"
        ))
    })?;
    if e.max_coord() > layout.dim() {
        return Err(Error::Parse(format!(
            "expression {text:?} uses x{} on a {}-dimensional grid",
            e.max_coord(),
            layout.dim()
        )));
    }
    Ok(layout.with_values(|x| e.eval(x)))
}

fn probe(a: &ProbeArgs, em: &mut Emitter) -> Outcome {
    let op: OperatorSpec = a.op.parse().map_err(usage)?;
    let cfg = ProbeConfig {
        rho: a.rho,
        n: a.n,
        samples: a.samples,
        seed: a.seed,
    };
    let config = json!({ "op": op.to_string(), "probe": cfg });
    let sc = ellipticity_probe(&op, &cfg).map_err(|e| em.fail("probe", config.clone(), e))?;
    let mut notes = Vec::new();
    if matches!(op.family, Family::MeanCurvature) && op.shift.is_none() {
        let quoted = std::f64::consts::SQRT_2 / 2.0;
        if (sc.big_lambda_hat - quoted).abs() > 1e-3 {
            notes.push(json!({
                "flag": "Lambda_hat_differs_from_sqrt2_over_2",
                "measured": sc.big_lambda_hat,
                "quoted": quoted,
                "message": "D_M F has eigenvalues 1/w³ along p and 1/w across it, \
                            so the upper constant is 1 at p = 0, not √2/2",
            }));
        }
    }
    em.record("probe", config, json!({ "constants": sc, "notes": notes }))
}

fn solve_layout(a: &SolveArgs) -> Result<GridFunction> {
    if let Some(p) = &a.grid {
        return GridFunction::read(p);
    }
    let (Some(b), Some(h)) = (&a.box_, a.h) else {
        return Err(Error::Parse("give either --grid or --box with --h".into()));
    };
    let lohi = parse_list(b, "--box")?;
    if lohi.len() != 2 || !(lohi[0] < lohi[1]) {
        return Err(Error::Parse(format!(
            "--box needs \"lo,hi\" with lo < hi, got {b:?}"
        )));
    }
    GridFunction::on_box(2, lohi[0], lohi[1], h, |_| 0.0).map_err(|e| Error::Parse(e.to_string()))
}

fn solve(a: &SolveArgs, em: &mut Emitter) -> Outcome {
    let layout = solve_layout(a).map_err(usage)?;
    let f = grid_or_expr(&a.f, &layout).map_err(usage)?;
    let g = grid_or_expr(&a.g, &layout).map_err(usage)?;
    let scheme = match a.eq {
        Equation::Linear => Scheme::FivePointLinear,
        Equation::Pucci => Scheme::WideStencilPucci,
        Equation::Ma => Scheme::WideStencilMa,
        Equation::Mc => Scheme::FrozenCoefficientMc,
    };
    let cfg = SolveConfig {
        scheme,
        stencil_directions: a.directions,
        tol: a.tol,
        max_iters: a.max_iters,
        damping: a.damping,
    };
    let config = json!({
        "args": a,
        "solver": cfg,
        "grid": { "shape": layout.shape, "origin": layout.origin, "spacing": layout.spacing },
    });
    let result = match a.eq {
        Equation::Linear => {
            let m = parse_matrix(&a.a).map_err(usage)?;
            let b = parse_list(&a.b, "--b").map_err(usage)?;
            solve_linear_cfg(&m, &b, &f, &g, &cfg)
        }
        Equation::Pucci => {
            let sign = match a.sign {
                SignArg::Plus => PucciSign::Plus,
                SignArg::Minus => PucciSign::Minus,
            };
            solve_pucci(a.lambda, a.big_lambda, sign, &f, &g, &cfg)
        }
        Equation::Ma => solve_monge_ampere(&f, &g, &cfg),
        Equation::Mc => solve_mean_curvature(&f, &g, a.delta, &cfg),
    };
    let sol = result.map_err(|e| em.fail("solve", config.clone(), e))?;
    sol.u.write(&a.out).map_err(usage)?;
    em.record(
        "solve",
        config,
        json!({
            "iterations": sol.iterations,
            "residual": sol.residual,
            "history": sol.history,
            "out": a.out,
            "min": sol.u.values.iter().cloned().fold(f64::INFINITY, f64::min),
            "max": sol.u.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        }),
    )
}

fn parse_constraint(text: &str) -> Result<FitConstraint> {
    let (op, f0) = text
        .rsplit_once(':')
        .ok_or_else(|| Error::Parse(format!("--constrain needs \"<op>:<f0>\", got {text:?}")))?;
    let op: OperatorSpec = op.parse()?;
    let f0: f64 = f0
        .parse()
        .map_err(|_| Error::Parse(format!("bad right-hand side {f0:?} in --constrain")))?;
    Ok(FitConstraint::new(op, f0))
}

fn analyze(a: &AnalyzeArgs, em: &mut Emitter) -> Outcome {
    let x0 = parse_list(&a.point, "--point").map_err(usage)?;
    let grid;
    let fx: AnalyticFunction;
    let sampler_fx;
    let mut default_r0 = 0.5;
    let sampler: &dyn BallSampler = match (&a.input, &a.fixture) {
        (Some(p), _) => {
            grid = GridFunction::read(p).map_err(usage)?;
            default_r0 = grid.distance_to_boundary(&x0);
            &grid
        }
        (None, Some(name)) => {
            fx = fixture(name).map_err(usage)?;
            sampler_fx = FixtureSampler {
                fixture: &fx,
                m: a.lattice,
            };
            &sampler_fx
        }
        (None, None) => return Err(Failure::Usage("give --input or --fixture".into())),
    };
    if x0.len() != sampler.dim() {
        return Err(Failure::Usage(format!(
            "--point has {} coordinates, data is {}-dimensional",
            x0.len(),
            sampler.dim()
        )));
    }
    let r0 = a.r0.unwrap_or(default_r0);
    let constraint = a
        .constrain
        .as_deref()
        .map(parse_constraint)
        .transpose()
        .map_err(usage)?;
    let cfg = CampanatoConfig {
        k: a.degree,
        eta: a.eta,
        r0,
        levels: a.levels,
        constraint,
        norm_bound: a.norm_bound,
    };
    let config = json!({ "args": a, "campanato": cfg });
    let report = campanato_table(sampler, &x0, &cfg)
        .map_err(|e| em.fail("regularity", config.clone(), e))?;
    if let Some(path) = &a.csv {
        let radii: Vec<f64> = report.scales.iter().map(|s| s.r).collect();
        let osc = oscillation_profile(sampler, &x0, &radii);
        let mut text = String::from("r,E,osc\n");
        for (s, (_, o)) in report.scales.iter().zip(&osc) {
            text.push_str(&format!("{:?},{:?},{:?}\n", s.r, s.error, o));
        }
        std::fs::write(path, text).map_err(|e| usage(e.into()))?;
    }
    em.record("regularity", config, &report)
}

fn input_grid_and_f(input: &Path, f: &str) -> Result<(GridFunction, GridFunction)> {
    let u = GridFunction::read(input)?;
    let f = grid_or_expr(f, &u)?;
    Ok((u, f))
}

fn check(a: &CheckArgs, em: &mut Emitter) -> Outcome {
    let (u, f) = input_grid_and_f(&a.input, &a.f).map_err(usage)?;
    let op: OperatorSpec = a.op.parse().map_err(usage)?;
    let side: Side = a.side.parse().map_err(usage)?;
    let opts = ViscosityOptions {
        slopes: a.slopes,
        inflation: 0.1,
        rho: a.rho,
    };
    let config = json!({ "args": a, "options": opts });
    let report = check_viscosity_with(&u, &op, &f, side, a.tol, &opts)
        .map_err(|e| em.fail("viscosity", config.clone(), e))?;
    em.record("viscosity", config, &report)
}

fn abp(a: &AbpArgs, em: &mut Emitter) -> Outcome {
    let (u, f) = input_grid_and_f(&a.input, &a.f).map_err(usage)?;
    let config = json!({ "args": a });
    let report = abp_check(&u, &f, a.lambda, a.big_lambda, a.b0)
        .map_err(|e| em.fail("abp", config.clone(), e))?;
    em.record("abp", config, &report)
}

fn normalize(a: &NormalizeArgs, em: &mut Emitter) -> Outcome {
    let heights = parse_list(&a.h, "--h").map_err(usage)?;
    let x0 = parse_list(&a.point, "--point").map_err(usage)?;
    let grid;
    let fx;
    let source: &dyn crate::geometry::SectionSource = match (&a.input, &a.fixture) {
        (Some(p), _) => {
            grid = GridFunction::read(p).map_err(usage)?;
            &grid
        }
        (None, Some(name)) => {
            fx = fixture(name).map_err(usage)?;
            &fx
        }
        (None, None) => return Err(Failure::Usage("give --input or --fixture".into())),
    };
    let n = source.dim();
    if x0.len() != n {
        return Err(Failure::Usage(format!("--point needs {n} coordinates")));
    }
    for h in heights {
        let config = json!({ "args": a, "height": h });
        let result =
            section_with_rays(source, &x0, h, a.rays).and_then(|v| john_normalize(&v, h, n));
        let norm = result.map_err(|e| em.fail("normalize", config.clone(), e))?;
        em.record("normalize", config, &norm)?;
    }
    Ok(())
}

fn fixtures_cmd(action: &FixturesAction, em: &mut Emitter) -> Outcome {
    match action {
        FixturesAction::List => {
            for (name, about) in fixture_names() {
                writeln!(em.out, "{name:<14} {about}")
                    .map_err(|e| Failure::Usage(e.to_string()))?;
            }
            Ok(())
        }
        FixturesAction::Eval {
            fixture: name,
            point,
        } => {
            let fx = fixture(name).map_err(usage)?;
            let x = parse_list(point, "--point").map_err(usage)?;
            if x.len() != fx.dim() {
                return Err(Failure::Usage(format!(
                    "{name} needs {} coordinates",
                    fx.dim()
                )));
            }
            let singular = fx.is_singular(&x);
            let line = json!({
                "kind": "fixture",
                "fixture": fx.name(),
                "point": x,
                "value": fx.eval(&x),
                "grad": (!singular).then(|| fx.grad(&x)),
                "hess": (!singular).then(|| fx.hess(&x)),
                "rhs": fx.rhs(&x),
                "operator": fx.operator().map(|o| o.to_string()),
            });
            writeln!(em.out, "{line}").map_err(|e| Failure::Usage(e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String) {
        let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let mut out = Vec::new();
        let code = run(&args, &mut out);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn unknown_subcommand_is_usage_error() {
        let (code, text) = run_str(&["frobnicate"]);
        assert_eq!(code, 2);
        assert!(text.contains("Usage"));
        let (code, _) = run_str(&["probe", "--op", "mc", "--bogus"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn bad_operator_is_usage_error() {
        let (code, _) = run_str(&["probe", "--op", "nonsense"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn fixture_eval_record() {
        let (code, text) = run_str(&[
            "fixtures",
            "eval",
            "--fixture",
            "slag:0.4",
            "--point",
            "0.5,-0.25",
        ]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(text.trim()).unwrap();
        assert_eq!(v["kind"], "fixture");
        assert!(v["value"].as_f64().is_some());
    }

    #[test]
    fn numeric_failure_reports_error() {
        let (code, text) = run_str(&[
            "analyze",
            "--fixture",
            "slag:0.4",
            "--point",
            "0,0",
            "--degree",
            "1",
            "--eta",
            "0.9",
        ]);
        assert_eq!(code, 3);
        let v: Value = serde_json::from_str(text.trim()).unwrap();
        assert_eq!(v["kind"], "regularity");
        assert_eq!(v["error"]["class"], "parameter");
    }
}
