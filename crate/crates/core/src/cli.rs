//! Command-line front end.
//!
//! Every subcommand writes its artifact (CSV or OBJ) to `--out` when given
//! and a JSON report to stdout. Exit codes: 0 success, 1 usage error,
//! 2 numerical failure, 3 expression syntax error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::chart::{E1Orientation, GraphSurface};
use crate::construct::{
    curve_from_zeta, example_chart, immersion_locus, ruled_surface, zeta_from_curve, GeneratingCurve,
};
use crate::error::Error;
use crate::export::{write_csv, write_obj};
use crate::expr::{parse_expr, Expr};
use crate::fundamental::{integrability_residual, Field2D, Grid, Rect};
use crate::func::YFunction;
use crate::lienard::{eval_alpha, fit_solution, integrate_ivp, phase_field, Tolerances};
use crate::models::{classify, eval_model, metric_rep, normalize, AlphaModel};
use crate::verify::{
    go_through_check, numeric_alpha_on_chart, numeric_h_on_chart, pmge_max, singular_set, FLIP_TOL, NEWTON_TOL,
    RANK_TOL, SINGULAR_EPS,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot parse `{src}`: {msg}")]
    Parse { src: String, msg: String },
    #[error(transparent)]
    Numeric(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Parse { .. } => EXIT_PARSE,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "heismin", version, about = "p-minimal surfaces in the Heisenberg group H1")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a closed-form solution to initial data and integrate the equation.
    SolveLienard(SolveArgs),
    /// Sample the phase-plane vector field.
    PhaseField(PhaseArgs),
    /// Report the surface type of an α-model on a window.
    Classify(ModelArgs),
    /// Tabulate α and the metric pair (a, b) of a model.
    Metric(MetricArgs),
    /// Reduce a model to normal coordinates and sample the invariants.
    Normalize(MetricArgs),
    /// Integrability residuals of a model metric.
    Integrability(MetricArgs),
    /// Ruled surface from a generating curve or from invariants.
    Construct(ConstructArgs),
    /// Mesh one of the standard example surfaces.
    Examples(ExampleArgs),
    /// p-minimal residual and singular set of a graph.
    VerifyGraph(GraphArgs),
    /// Limits of the characteristic angles across a singular curve.
    GoThrough(GoThroughArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha0: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub v0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x0: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub x1: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    /// Constant p-mean curvature.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub c: f64,
    /// CSV trajectory destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PhaseArgs {
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub alpha_min: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub alpha_max: f64,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub v_min: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub v_max: f64,
    #[arg(long, default_value_t = 21)]
    pub nx: usize,
    #[arg(long, default_value_t = 21)]
    pub nv: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Vertical,
    #[value(name = "special1")]
    SpecialI,
    #[value(name = "special2")]
    SpecialII,
    General,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub alpha: Family,
    /// c1 as an expression in y.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub c1: String,
    /// c2 as an expression in y (general family only).
    #[arg(long, allow_hyphen_values = true)]
    pub c2: Option<String>,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub y_min: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub y_max: f64,
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub k: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub h: String,
    #[arg(long, default_value_t = 50)]
    pub nx: usize,
    #[arg(long, default_value_t = 20)]
    pub ny: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// Generating curve `x=...,y=...,z=...` in the variable t.
    #[arg(long, conflicts_with_all = ["zeta1", "zeta2"])]
    pub curve: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub zeta1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub zeta2: Option<String>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta_min: f64,
    #[arg(long, default_value_t = std::f64::consts::TAU, allow_hyphen_values = true)]
    pub theta_max: f64,
    #[arg(long, default_value_t = 1.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 21)]
    pub nr: usize,
    #[arg(long, default_value_t = 64)]
    pub ntheta: usize,
    /// OBJ destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExampleArgs {
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(crate::construct::EXAMPLE_NAMES))]
    pub name: String,
    #[arg(long, default_value_t = 33)]
    pub nu: usize,
    #[arg(long, default_value_t = 33)]
    pub nv: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// u as an expression in x and y.
    #[arg(long, allow_hyphen_values = true)]
    pub u: String,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub y_min: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub y_max: f64,
    #[arg(long, default_value_t = 41)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct GoThroughArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub px: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub py: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub dx: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub dy: f64,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if code == EXIT_OK {
                write!(stdout, "{e}")
            } else {
                write!(stderr, "{e}")
            };
            return code;
        }
    };
    match run(&cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cmd: &Command, stdout: &mut dyn Write) -> CliResult<()> {
    let report = match cmd {
        Command::SolveLienard(a) => solve_lienard(a)?,
        Command::PhaseField(a) => phase(a)?,
        Command::Classify(a) => classify_cmd(a)?,
        Command::Metric(a) => metric_cmd(a)?,
        Command::Normalize(a) => normalize_cmd(a)?,
        Command::Integrability(a) => integrability_cmd(a)?,
        Command::Construct(a) => construct_cmd(a)?,
        Command::Examples(a) => examples_cmd(a)?,
        Command::VerifyGraph(a) => verify_graph(a)?,
        Command::GoThrough(a) => go_through(a)?,
    };
    serde_json::to_writer_pretty(&mut *stdout, &report).map_err(io::Error::from)?;
    writeln!(stdout)?;
    Ok(())
}

fn parse(src: &str) -> CliResult<Expr> {
    parse_expr(src).map_err(|e| CliError::Parse {
        src: src.to_string(),
        msg: e.to_string(),
    })
}

/// A function of one variable; the expression may use `var` or no variable.
fn yfun(src: &str, var: &str) -> CliResult<YFunction> {
    let e = parse(src)?;
    if let Some(other) = e.free_vars().into_iter().find(|v| v != var) {
        return Err(CliError::Usage(format!("`{src}` uses `{other}`; only `{var}` is allowed")));
    }
    Ok(YFunction::from_expr(&e, var))
}

fn out_file(path: &Option<PathBuf>) -> CliResult<Option<BufWriter<File>>> {
    Ok(match path {
        Some(p) => Some(BufWriter::new(File::create(p)?)),
        None => None,
    })
}

fn check_range(lo: f64, hi: f64, what: &str) -> CliResult<()> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{what} range must satisfy min < max")))
    }
}

fn tolerances_json() -> Value {
    let t = Tolerances::default();
    json!({ "denominator": t.den, "fit": t.fit })
}

fn solve_lienard(a: &SolveArgs) -> CliResult<Value> {
    if !(a.step > 0.0) {
        return Err(CliError::Usage("--step must be positive".into()));
    }
    let fit = (a.c == 0.0).then(|| fit_solution(a.alpha0, a.v0, a.x0));
    let traj = integrate_ivp(a.alpha0, a.v0, a.x0, a.x1, a.step, a.c)?;
    let mut max_dev: Option<f64> = None;
    if let Some(s) = &fit {
        let mut m = 0.0f64;
        for (x, st) in &traj.points {
            if let Ok((al, _)) = eval_alpha(s, *x) {
                m = m.max((al - st.alpha).abs());
            }
        }
        max_dev = Some(m);
    }
    if let Some(mut w) = out_file(&a.out)? {
        let rows: Vec<Vec<f64>> = traj.points.iter().map(|(x, s)| vec![*x, s.alpha, s.v]).collect();
        write_csv(&mut w, &["x", "alpha", "v"], &rows)?;
        w.flush()?;
    }
    let last = traj.points.last().map(|p| p.1);
    Ok(json!({
        "fit": fit,
        "points": traj.points.len(),
        "final": last,
        "max_deviation_from_fit": max_dev,
        "step": a.step,
        "c": a.c,
        "tolerances": tolerances_json(),
    }))
}

fn phase(a: &PhaseArgs) -> CliResult<Value> {
    check_range(a.alpha_min, a.alpha_max, "alpha")?;
    check_range(a.v_min, a.v_max, "v")?;
    let samples = phase_field((a.alpha_min, a.alpha_max), (a.v_min, a.v_max), a.nx, a.nv)?;
    if let Some(mut w) = out_file(&a.out)? {
        let rows: Vec<Vec<f64>> = samples
            .iter()
            .map(|s| vec![s.state.alpha, s.state.v, s.direction.0, s.direction.1])
            .collect();
        write_csv(&mut w, &["alpha", "v", "dalpha", "dv"], &rows)?;
        w.flush()?;
    }
    Ok(json!({ "samples": samples.len(), "nx": a.nx, "nv": a.nv }))
}

fn build_model(a: &ModelArgs) -> CliResult<AlphaModel> {
    check_range(a.x_min, a.x_max, "x")?;
    check_range(a.y_min, a.y_max, "y")?;
    let dom = (a.y_min, a.y_max);
    let c1 = yfun(&a.c1, "y")?;
    Ok(match a.alpha {
        Family::Vertical => AlphaModel::vertical(dom),
        Family::SpecialI => AlphaModel::special_one(c1, dom),
        Family::SpecialII => AlphaModel::special_two(c1, dom),
        Family::General => {
            let c2 = a
                .c2
                .as_deref()
                .ok_or_else(|| CliError::Usage("--c2 is required for the general family".into()))?;
            AlphaModel::general(c1, yfun(c2, "y")?, dom)
        }
    })
}

fn classify_cmd(a: &ModelArgs) -> CliResult<Value> {
    let m = build_model(a)?;
    let t = classify(&m, (a.x_min, a.x_max))?;
    Ok(json!({
        "type": t.name(),
        "x_window": [a.x_min, a.x_max],
        "y_domain": [a.y_min, a.y_max],
    }))
}

fn metric_cmd(a: &MetricArgs) -> CliResult<Value> {
    let m = build_model(&a.model)?;
    let rep = metric_rep(&m, &yfun(&a.k, "y")?, &yfun(&a.h, "y")?)?;
    let rect = Rect::new(a.model.x_min, a.model.x_max, a.model.y_min, a.model.y_max);
    let mut rows = Vec::new();
    let mut singular = 0usize;
    for (x, y) in Grid::uniform(rect, a.nx, a.ny).points() {
        match (eval_model(&m, x, y), rep.ab(x, y)) {
            (Ok(al), Ok((aa, bb))) => rows.push(vec![x, y, al, aa, bb]),
            _ => singular += 1,
        }
    }
    if let Some(mut w) = out_file(&a.out)? {
        write_csv(&mut w, &["x", "y", "alpha", "a", "b"], &rows)?;
        w.flush()?;
    }
    Ok(json!({ "rows": rows.len(), "skipped_singular": singular }))
}

fn normalize_cmd(a: &MetricArgs) -> CliResult<Value> {
    let m = build_model(&a.model)?;
    let rep = metric_rep(&m, &yfun(&a.k, "y")?, &yfun(&a.h, "y")?)?;
    let (nf, ch) = normalize(&m, &rep, (a.model.x_min, a.model.x_max))?;
    let n = a.ny.max(2);
    let (lo, hi) = nf.y_domain;
    let samples: Vec<Value> = (0..n)
        .map(|i| {
            let yt = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            json!({
                "y_normal": yt,
                "zeta1": nf.zeta1.eval(yt),
                "zeta2": nf.zeta2.as_ref().map(|z| z.eval(yt)),
            })
        })
        .collect();
    let (c, d) = m.y_domain;
    Ok(json!({
        "type": nf.surface_type.name(),
        "y_domain": [c, d],
        "y_normal_domain": [lo, hi],
        "gamma_at_end": ch.gamma.eval(d),
        "psi_at_end": ch.psi.eval(d),
        "samples": samples,
    }))
}

fn integrability_cmd(a: &MetricArgs) -> CliResult<Value> {
    let m = build_model(&a.model)?;
    let rep = metric_rep(&m, &yfun(&a.k, "y")?, &yfun(&a.h, "y")?)?;
    let rect = Rect::new(a.model.x_min, a.model.x_max, a.model.y_min, a.model.y_max);
    let mm = m.clone();
    let alpha = Field2D::new(move |x, y| eval_model(&mm, x, y).unwrap_or(f64::NAN), rect, a.nx, a.ny);
    let report = integrability_residual(&alpha, &Field2D::constant(0.0, rect), &rep, &alpha.grid())?;
    Ok(json!({
        "r1": report.r1,
        "r2": report.r2,
        "r3": report.r3,
        "max": report.max(),
        "points": report.points,
        "fd_step": report.fd_step,
    }))
}

fn parse_curve(src: &str, interval: (f64, f64)) -> CliResult<GeneratingCurve> {
    let (mut x, mut y, mut z) = (None, None, None);
    for part in src.split(',') {
        let (name, body) = part
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("curve component `{part}` is not of the form name=expr")))?;
        let f = yfun(body, "t")?;
        match name.trim() {
            "x" => x = Some(f),
            "y" => y = Some(f),
            "z" => z = Some(f),
            other => return Err(CliError::Usage(format!("unknown curve component `{other}`"))),
        }
    }
    let zero = || YFunction::constant(0.0);
    Ok(GeneratingCurve::new(
        x.unwrap_or_else(zero),
        y.unwrap_or_else(zero),
        z.unwrap_or_else(zero),
        interval,
    ))
}

#[derive(Serialize)]
struct ZetaSample {
    theta: f64,
    zeta1: f64,
    zeta2: f64,
}

fn construct_cmd(a: &ConstructArgs) -> CliResult<Value> {
    check_range(a.theta_min, a.theta_max, "theta")?;
    let interval = (a.theta_min, a.theta_max);
    let curve = match (&a.curve, &a.zeta1, &a.zeta2) {
        (Some(c), None, None) => parse_curve(c, interval)?,
        (None, Some(z1), Some(z2)) => curve_from_zeta(&yfun(z1, "t")?, &yfun(z2, "t")?, interval)?,
        _ => return Err(CliError::Usage("give either --curve or both --zeta1 and --zeta2".into())),
    };
    let (z1, z2) = zeta_from_curve(&curve)?;
    let (nr, nt) = (a.nr.max(2), a.ntheta.max(2));
    let thetas: Vec<f64> = (0..nt)
        .map(|i| a.theta_min + (a.theta_max - a.theta_min) * i as f64 / (nt - 1) as f64)
        .collect();
    let samples: Vec<ZetaSample> = thetas
        .iter()
        .map(|&t| ZetaSample {
            theta: t,
            zeta1: z1.eval(t),
            zeta2: z2.eval(t),
        })
        .collect();
    let degenerate: Vec<Value> = immersion_locus(&curve, &thetas)
        .into_iter()
        .filter(|(_, s)| *s != crate::construct::Immersion::ImmersedEverywhere)
        .map(|(t, s)| json!({ "theta": t, "status": s }))
        .collect();
    let chart = ruled_surface(&curve, a.r_max).to_chart("ruled");
    let verts = chart.mesh(nr, nt);
    if let Some(mut w) = out_file(&a.out)? {
        write_obj(&mut w, &verts, nr, nt)?;
        w.flush()?;
    }
    let spec = if let Some(c) = &a.curve {
        json!({ "curve": c })
    } else {
        json!({ "zeta1": a.zeta1, "zeta2": a.zeta2 })
    };
    Ok(json!({
        "input": spec,
        "vertices": verts.len(),
        "grid": [nr, nt],
        "invariants": samples,
        "degenerate": degenerate,
    }))
}

fn examples_cmd(a: &ExampleArgs) -> CliResult<Value> {
    let chart = example_chart(&a.name)?;
    let (nu, nv) = (a.nu.max(2), a.nv.max(2));
    let verts = chart.mesh(nu, nv);
    if let Some(mut w) = out_file(&a.out)? {
        write_obj(&mut w, &verts, nu, nv)?;
        w.flush()?;
    }
    let d = chart.domain;
    let (u, v) = (d.x_min + 0.61 * (d.x_max - d.x_min), d.y_min + 0.37 * (d.y_max - d.y_min));
    Ok(json!({
        "name": chart.name,
        "domain": [[d.x_min, d.x_max], [d.y_min, d.y_max]],
        "vertices": verts.len(),
        "grid": [nu, nv],
        "sample": {
            "u": u,
            "v": v,
            "alpha": numeric_alpha_on_chart(&chart, u, v).ok(),
            "h": numeric_h_on_chart(&chart, u, v).ok(),
        },
    }))
}

fn graph_from(a: &GraphArgs) -> CliResult<GraphSurface> {
    check_range(a.x_min, a.x_max, "x")?;
    check_range(a.y_min, a.y_max, "y")?;
    let e = parse(&a.u)?;
    GraphSurface::from_expr(&e, Rect::new(a.x_min, a.x_max, a.y_min, a.y_max))
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn verify_graph(a: &GraphArgs) -> CliResult<Value> {
    let g = graph_from(a)?;
    let chart = g.to_chart("graph", E1Orientation::Canonical);
    let report = singular_set(&g);
    let mut h_max = 0.0f64;
    for (x, y) in Grid::uniform(g.window, 9, 9).points() {
        if let Ok(h) = numeric_h_on_chart(&chart, x, y) {
            h_max = h_max.max(h.abs());
        }
    }
    Ok(json!({
        "u": a.u,
        "pmge_max": pmge_max(&g, a.n, a.n),
        "h_max": h_max,
        "singular": report,
        "tolerances": {
            "singular_eps": SINGULAR_EPS,
            "newton_tol": NEWTON_TOL,
            "rank_tol": RANK_TOL,
        },
    }))
}

fn go_through(a: &GoThroughArgs) -> CliResult<Value> {
    let g = graph_from(&a.graph)?;
    let res = go_through_check(&g, (a.px, a.py), (a.dx, a.dy))?;
    Ok(json!({
        "point": [a.px, a.py],
        "direction": [a.dx, a.dy],
        "limits": res,
        "tolerances": { "flip": FLIP_TOL },
    }))
}
