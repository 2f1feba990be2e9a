use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use planegerm::contour::{
    apparent_contour, stratum_distance, ContourDiagram, ContourError, PlaneMap, Window, DEFAULT_HALF_WIDTH,
    DEFAULT_RESOLUTION,
};
use planegerm::export::{self, ExportError, Metadata};
use planegerm::geometry::{
    characteristic_curves, contact_order, curve_census, lagrange_caustic_section, perestroika_sweep, projection_germ_q,
    BranchPairing, CausticFrame, CrosscapFamily, GeometryError, DEFAULT_SWEEP_STEP, SERIES_ORDER,
};
use planegerm::parse::{parse_germ, ParseError};
use planegerm::recognition::{classify, classify_corank2_2jet, corank, criteria_report, RecognitionError};
use planegerm::scalar::{parse_q, qi, Q};
use planegerm::strata::{
    implicit_residual, implicit_residual_exact, parametrize_exact, parametrize_stratum, section_curves, CurveShape,
    CuspFoldForm, SectionWindow, Sign, StrataError, StratumId, StratumKind, UnfoldingId,
};
use planegerm::validate::{self, Tolerances};
use planegerm::DEFAULT_ORDER;

const ENV_HELP: &str = "\
Environment:
  PLANEGERM_TOL_<NAME>   default for tolerance <name>, e.g. PLANEGERM_TOL_STRATUM_MARGIN=2e-3.
                         Names: witness_residual, stratum_margin, b4_rel, b9_rel,
                         mid_coeff_abs, caustic_cells. --tol name=value takes precedence.

Exit status:
  0  success
  1  validate ran and at least one check failed
  2  input could not be parsed
  3  numerical failure (a JSON diagnostic is printed on stdout)";

#[derive(Parser, Debug)]
#[command(name = "planegerm", version, about = "Plane-to-plane map-germs: classification, strata, contours, caustics")]
#[command(after_help = ENV_HELP)]
struct Cli {
    /// Directory for figure and report files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output formats for figure files (repeatable).
    #[arg(long, global = true, value_enum)]
    format: Vec<Format>,
    /// Worker threads (default: number of cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Tolerance override `name=value` (repeatable).
    #[arg(long = "tol", global = true, value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Svg,
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Classify a germ given as "(f1, f2)".
    Classify {
        #[arg(long)]
        germ: String,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
    },
    /// Evaluate a stratum parametrization.
    Strata {
        #[arg(long)]
        unfolding: String,
        #[arg(long)]
        stratum: String,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        sign: String,
        #[arg(long, allow_hyphen_values = true)]
        y: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        c: Option<String>,
        /// Use the cusp+fold formula without the factor 1/2.
        #[arg(long)]
        verbatim: bool,
    },
    /// Section of the bifurcation diagram by {c = const}.
    Section {
        #[arg(long)]
        unfolding: String,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        c: f64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 512)]
        resolution: usize,
    },
    /// Apparent contour of a germ or an unfolding member.
    Contour {
        #[arg(long, conflicts_with = "unfolding")]
        germ: Option<String>,
        #[arg(long, requires = "params")]
        unfolding: Option<String>,
        /// Unfolding parameters `a,b[,c]`.
        #[arg(long, allow_hyphen_values = true)]
        params: Option<String>,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Parabolic and flecnodal curves of a projected crosscap family.
    Crosscap {
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        c03: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        c12: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        d4: String,
        /// Also run the sign census of the parabolic curve on the window.
        #[arg(long)]
        census: bool,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Planar caustic section, or a sweep along a path of (t1, t2) points.
    Caustic {
        #[arg(long, default_value = "trivial")]
        frame: String,
        #[arg(long, allow_hyphen_values = true)]
        t1: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        t2: Option<f64>,
        /// Sweep path `t1,t2;t1,t2;...`.
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["t1", "t2"])]
        path: Option<String>,
        #[arg(long, default_value_t = DEFAULT_SWEEP_STEP)]
        step: f64,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Run the acceptance checks and print a JSON report.
    Validate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated check numbers (default: all).
        #[arg(long)]
        checks: Option<String>,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct WindowArgs {
    #[arg(long, default_value_t = DEFAULT_HALF_WIDTH)]
    radius: f64,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: usize,
}

impl WindowArgs {
    fn window(&self) -> Window {
        Window::square(self.radius, self.resolution)
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{kind}: {message}")]
    Numeric { kind: &'static str, message: String },
    #[error(transparent)]
    Export(#[from] ExportError),
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<StrataError> for CliError {
    fn from(e: StrataError) -> Self {
        match e {
            StrataError::UnknownName(_)
            | StrataError::InvalidPair { .. }
            | StrataError::Arity { .. }
            | StrataError::Domain { .. }
            | StrataError::EmptyWindow
            | StrataError::Resolution(_) => CliError::Input(e.to_string()),
            other => CliError::Numeric { kind: "strata", message: other.to_string() },
        }
    }
}

impl From<ContourError> for CliError {
    fn from(e: ContourError) -> Self {
        match e {
            ContourError::Window(_) | ContourError::NotPlanar => CliError::Input(e.to_string()),
            ContourError::Strata(s) => s.into(),
            other => CliError::Numeric { kind: "contour", message: other.to_string() },
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::Family(_) | GeometryError::EmptyPath => CliError::Input(e.to_string()),
            GeometryError::Contour(c) => c.into(),
            other => CliError::Numeric { kind: "geometry", message: other.to_string() },
        }
    }
}

impl From<RecognitionError> for CliError {
    fn from(e: RecognitionError) -> Self {
        CliError::Input(e.to_string())
    }
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, v) = s.split_once('=').ok_or("expected name=value")?;
    let v: f64 = v.trim().parse().map_err(|e| format!("{e}"))?;
    if !Tolerances::NAMES.contains(&name.trim()) {
        return Err(format!("unknown tolerance {name:?}"));
    }
    Ok((name.trim().to_string(), v))
}

fn tolerances(overrides: &[(String, f64)]) -> Result<Tolerances, CliError> {
    let mut t = Tolerances::default();
    for name in Tolerances::NAMES {
        let key = format!("PLANEGERM_TOL_{}", name.to_ascii_uppercase());
        if let Ok(v) = std::env::var(&key) {
            let v: f64 = v.trim().parse().map_err(|_| CliError::Input(format!("{key} is not a number")))?;
            t.set(name, v);
        }
    }
    for (name, v) in overrides {
        t.set(name, *v);
    }
    Ok(t)
}

fn rational(name: &str, s: &str) -> Result<Q, CliError> {
    parse_q(s).ok_or_else(|| CliError::Input(format!("--{name}: {s:?} is not a rational number")))
}

fn floats(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| CliError::Input(format!("{v:?} is not a number"))))
        .collect()
}

struct Ctx {
    out: Option<PathBuf>,
    formats: Vec<Format>,
    tol: Tolerances,
}

impl Ctx {
    fn meta(&self) -> Metadata {
        let t = &self.tol;
        Metadata::new()
            .tolerance("stratum_margin", t.stratum_margin)
            .tolerance("witness_residual", t.witness_residual)
            .tolerance("caustic_cells", t.caustic_cells)
    }

    fn dir(&self) -> &Path {
        self.out.as_deref().unwrap_or(Path::new("."))
    }

    fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    fn write(&self, name: &str, contents: &str) -> Result<Option<String>, CliError> {
        Ok(Some(export::write_file(self.dir(), name, contents)?.display().to_string()))
    }

    /// Writes the diagram in each requested format under `stem`.
    fn write_diagram(&self, stem: &str, d: &ContourDiagram, meta: &Metadata) -> Result<Vec<String>, CliError> {
        let mut files = Vec::new();
        if self.wants(Format::Svg) {
            files.extend(self.write(&format!("{stem}.svg"), &export::diagram_svg(d, meta))?);
        }
        if self.wants(Format::Csv) {
            files.extend(self.write(&format!("{stem}.csv"), &export::diagram_csv(d, meta))?);
        }
        if self.wants(Format::Json) {
            files.extend(self.write(&format!("{stem}.json"), &pretty(&export::diagram_json(d, meta)))?);
        }
        Ok(files)
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap_or_default();
    s.push('\n');
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("cannot size the worker pool: {e}");
        }
    }
    let result = tolerances(&cli.tol).and_then(|tol| {
        let ctx = Ctx { out: cli.out.clone(), formats: cli.format.clone(), tol };
        run(&ctx, &cli.verb)
    });
    match result {
        Ok((value, code)) => {
            print!("{}", pretty(&value));
            ExitCode::from(code)
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            let kind = match &e {
                CliError::Numeric { kind, .. } => *kind,
                _ => "io",
            };
            print!("{}", pretty(&json!({ "error": kind, "message": e.to_string() })));
            ExitCode::from(3)
        }
    }
}

fn run(ctx: &Ctx, verb: &Verb) -> Result<(Value, u8), CliError> {
    match verb {
        Verb::Classify { germ, order } => classify_cmd(germ, *order).map(|v| (v, 0)),
        Verb::Strata { unfolding, stratum, sign, y, t, b, c, verbatim } => {
            let internal: Vec<(&str, &String)> = [("y", y), ("t", t), ("b", b), ("c", c)]
                .into_iter()
                .filter_map(|(n, v)| v.as_ref().map(|v| (n, v)))
                .collect();
            strata_cmd(unfolding, stratum, sign, &internal, *verbatim).map(|v| (v, 0))
        }
        Verb::Section { unfolding, c, radius, resolution } => {
            section_cmd(ctx, unfolding, *c, *radius, *resolution).map(|v| (v, 0))
        }
        Verb::Contour { germ, unfolding, params, window } => {
            contour_cmd(ctx, germ.as_deref(), unfolding.as_deref(), params.as_deref(), window.window()).map(|v| (v, 0))
        }
        Verb::Crosscap { t, c03, c12, d4, census, window } => {
            crosscap_cmd(ctx, t, [c03, c12, d4], census.then(|| window.window())).map(|v| (v, 0))
        }
        Verb::Caustic { frame, t1, t2, path, step, window } => {
            caustic_cmd(ctx, frame, (*t1, *t2), path.as_deref(), *step, window.window()).map(|v| (v, 0))
        }
        Verb::Validate { seed, checks } => validate_cmd(ctx, *seed, checks.as_deref()),
    }
}

fn classify_cmd(src: &str, order: usize) -> Result<Value, CliError> {
    let g = parse_germ(src, order)?;
    let class = classify(&g);
    let rank = corank(&g);
    let mut out = json!({ "germ": src, "corank": rank, "class": class.name() });
    if let planegerm::recognition::SingularityClass::Unresolved(reason) = &class {
        out["reason"] = json!(reason);
    }
    match rank {
        1 => out["criteria"] = criteria_report(&g)?.to_json(),
        2 => out["two_jet"] = json!(classify_corank2_2jet(&g)?.name()),
        _ => {}
    }
    Ok(out)
}

fn strata_cmd(
    unfolding: &str,
    stratum: &str,
    sign: &str,
    internal: &[(&str, &String)],
    verbatim: bool,
) -> Result<Value, CliError> {
    let u: UnfoldingId = unfolding.parse()?;
    let kind: StratumKind = stratum.parse()?;
    let sign: Sign = sign.parse()?;
    let id = StratumId::new(kind, sign);
    let exact: Vec<Q> = internal.iter().map(|(n, v)| rational(n, v)).collect::<Result<_, _>>()?;
    let form = if verbatim { CuspFoldForm::Verbatim } else { CuspFoldForm::Corrected };
    let mut out = json!({
        "unfolding": u.name(),
        "stratum": id.to_string(),
        "internal": internal.iter().map(|(n, v)| json!({ *n: v })).collect::<Vec<_>>(),
    });
    match parametrize_exact(u, id, &exact, form) {
        Ok(p) => {
            let params = p.to_f64();
            out["params"] = json!(params);
            let mut ex = vec![json!(p.a.to_string()), json!(p.b.to_string())];
            if let Some(c) = &p.c {
                ex.push(json!(c.to_string()));
            }
            out["exact"] = json!(ex);
            out["residual"] = match implicit_residual_exact(kind, &p) {
                Ok(r) => json!(r.to_string()),
                Err(_) => Value::Null,
            };
        }
        Err(StrataError::NoClosedForm(_)) => {
            let fl: Vec<f64> = exact.iter().map(|v| <Q as planegerm::Scalar>::as_f64(v).unwrap_or(f64::NAN)).collect();
            let sp = parametrize_stratum(u, id, &fl)?;
            out["params"] = json!(sp.params);
            out["residual"] = implicit_residual(kind, &sp.params).map_or(Value::Null, |r| json!(r));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(out)
}

fn section_cmd(ctx: &Ctx, unfolding: &str, c: f64, radius: f64, resolution: usize) -> Result<Value, CliError> {
    let u: UnfoldingId = unfolding.parse()?;
    let w = SectionWindow::square(radius);
    let curves = section_curves(u, c, &w, resolution)?;
    let meta = ctx.meta().window(&w).with("unfolding", u.name()).with("c", c).with("resolution", resolution);
    let mut files = Vec::new();
    if ctx.wants(Format::Svg) {
        files.extend(ctx.write("section.svg", &export::section_svg(&curves, &w, &meta))?);
    }
    if ctx.wants(Format::Csv) {
        files.extend(ctx.write("section.csv", &export::strata_csv(&curves, c, &meta))?);
    }
    let mut points = serde_json::Map::new();
    for cv in curves.iter().filter(|cv| cv.shape == CurveShape::Point) {
        let e = points.entry(cv.stratum.kind.name()).or_insert(json!(0));
        *e = json!(e.as_u64().unwrap_or(0) + cv.points.len() as u64);
    }
    let summary = json!({
        "unfolding": u.name(),
        "c": c,
        "curves": curves.iter().filter(|cv| cv.shape == CurveShape::Polyline).map(|cv| json!({
            "stratum": cv.stratum.to_string(),
            "points": cv.points.len(),
        })).collect::<Vec<_>>(),
        "points": points,
    });
    if ctx.wants(Format::Json) {
        let full = json!({ "metadata": meta, "summary": summary, "curves": curves });
        files.extend(ctx.write("section.json", &pretty(&full))?);
    }
    Ok(json!({ "summary": summary, "files": files }))
}

fn contour_cmd(
    ctx: &Ctx,
    germ: Option<&str>,
    unfolding: Option<&str>,
    params: Option<&str>,
    w: Window,
) -> Result<Value, CliError> {
    let mut meta = ctx.meta().window(&w);
    let mut distance = Value::Null;
    let f = match (germ, unfolding, params) {
        (Some(src), _, _) => {
            meta = meta.with("germ", src);
            PlaneMap::from_germ_q(&parse_germ(src, DEFAULT_ORDER)?)?
        }
        (None, Some(u), Some(p)) => {
            let u: UnfoldingId = u.parse()?;
            let p = floats(p)?;
            if p.len() != u.param_dim() {
                return Err(CliError::Input(format!("{} takes {} parameters", u.name(), u.param_dim())));
            }
            if let Some((d, s)) = stratum_distance(u, &p)? {
                distance = json!({ "distance": d, "stratum": s.to_string(), "clear": d >= ctx.tol.stratum_margin });
            }
            meta = meta.with("unfolding", u.name()).with("params", &p);
            PlaneMap::from_unfolding(u, &p)
        }
        _ => return Err(CliError::Input("give --germ or --unfolding with --params".into())),
    };
    let d = apparent_contour(&f, &w)?;
    let files = ctx.write_diagram("contour", &d, &meta)?;
    Ok(json!({ "counts": d.counts, "collisions": d.collisions.len(), "nearest_stratum": distance, "files": files }))
}

fn crosscap_cmd(ctx: &Ctx, t: &str, coeffs: [&String; 3], census: Option<Window>) -> Result<Value, CliError> {
    let t = rational("t", t)?;
    let [c03, c12, d4] = [rational("c03", coeffs[0])?, rational("c12", coeffs[1])?, rational("d4", coeffs[2])?];
    let cf = CrosscapFamily::with_coeffs(c03, c12, d4);
    let (par, fl) = characteristic_curves(&cf, &t)?;
    let contacts = contact_order(&par, &fl, BranchPairing::NearestTangent, SERIES_ORDER);
    let germ = projection_germ_q(&cf, &qi(0), &qi(0), &t);
    let regime = classify_corank2_2jet(&germ).map(|c| c.name()).unwrap_or("corank_one");
    let mut out = json!({
        "t": t.to_string(),
        "regime": regime,
        "parabolic": export::curve_json(&par),
        "flecnodal": export::curve_json(&fl),
        "contact_orders": contacts,
    });
    if let Some(w) = census {
        let c = curve_census(&par.poly, &w)?;
        out["parabolic_census"] = json!({
            "branches": c.branches.len(),
            "branch_min_gradient": c.branch_min_gradient,
            "isolated_points": c.isolated_points,
        });
    }
    if ctx.wants(Format::Json) {
        let file = json!({ "metadata": ctx.meta(), "curves": out });
        out["files"] = json!(ctx.write("crosscap.json", &pretty(&file))?);
    }
    Ok(out)
}

fn parse_path(s: &str) -> Result<Vec<[f64; 2]>, CliError> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| match floats(p)?.as_slice() {
            [a, b] => Ok([*a, *b]),
            _ => Err(CliError::Input(format!("path point {p:?} needs two coordinates"))),
        })
        .collect()
}

fn caustic_cmd(
    ctx: &Ctx,
    frame: &str,
    t: (Option<f64>, Option<f64>),
    path: Option<&str>,
    step: f64,
    w: Window,
) -> Result<Value, CliError> {
    let fr = CausticFrame::preset(frame).ok_or_else(|| CliError::Input(format!("unknown frame {frame:?}")))?;
    let meta = ctx.meta().window(&w).with("frame", frame);
    match (path, t) {
        (Some(p), _) => {
            let path = parse_path(p)?;
            let sweep = perestroika_sweep(&fr, &path, step, &w)?;
            let meta = meta.with("path", &path).with("step", step);
            let mut files = Vec::new();
            if ctx.wants(Format::Svg) {
                let svgs: Vec<Result<String, GeometryError>> = sweep
                    .frames
                    .par_iter()
                    .map(|f| {
                        let s = lagrange_caustic_section(&fr, f.t[0], f.t[1], &w)?;
                        Ok(export::diagram_svg(&s.diagram, &meta.clone().with("t", f.t)))
                    })
                    .collect();
                for (k, svg) in svgs.into_iter().enumerate() {
                    files.extend(ctx.write(&export::frame_file_name(k), &svg?)?);
                }
            }
            let log = export::sweep_json(&sweep, &meta);
            if ctx.wants(Format::Json) {
                files.extend(ctx.write("sweep.json", &pretty(&log))?);
            }
            Ok(json!({
                "frames": sweep.frames.len(),
                "spacing": sweep.spacing,
                "crossings": sweep.crossings,
                "reference": sweep.reference,
                "files": files,
            }))
        }
        (None, (Some(t1), Some(t2))) => {
            let s = lagrange_caustic_section(&fr, t1, t2, &w)?;
            let files = ctx.write_diagram("caustic", &s.diagram, &meta.with("t", [t1, t2]))?;
            Ok(json!({ "t": [t1, t2], "counts": s.diagram.counts, "files": files }))
        }
        _ => Err(CliError::Input("give --t1 and --t2, or --path".into())),
    }
}

fn validate_cmd(ctx: &Ctx, seed: u64, checks: Option<&str>) -> Result<(Value, u8), CliError> {
    let checks = match checks {
        Some(s) => s
            .split(',')
            .map(|v| match v.trim().parse::<u8>() {
                Ok(n) if (1..=9).contains(&n) => Ok(n),
                _ => Err(CliError::Input(format!("check {v:?} is not in 1..=9"))),
            })
            .collect::<Result<Vec<_>, _>>()?,
        None => Vec::new(),
    };
    let opts = validate::Options { seed, tolerances: ctx.tol, checks };
    let reports = validate::run(&opts);
    let passed = reports.iter().all(|r| r.passed);
    let out = json!({ "seed": seed, "tolerances": ctx.tol, "passed": passed, "checks": reports });
    if ctx.out.is_some() {
        ctx.write("validate.json", &pretty(&out))?;
    }
    Ok((out, if passed { 0 } else { 1 }))
}
