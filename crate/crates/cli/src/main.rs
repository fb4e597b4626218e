//! `ias` — improper affine spheres from Lagrangian germs.
//!
//! Subcommands: `build` (families / builtin summaries), `caustic` (CSV and
//! optional SVG), `classify` (singularity class report), `versal`
//! (versality verdicts), `verify` (identity checks), `plot` (SVG only),
//! `selftest` (seeded random property suite).
//!
//! Exit codes: 0 success, 1 a check or verdict failed, 2 usage/input error.
//! All output is deterministic for a fixed command line and seed.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use ias_core::caustic::{
    caustic_points, parametric_caustic, samples_to_csv, singular_locus, CausticConfig,
    CausticSample, Window,
};
use ias_core::classify::{classify_at, classify_at_float, ClassLabel, Classification,
    FloatOutcome, DEFAULT_FLOAT_TOL};
use ias_core::construct::{
    center_chord_maps, gen_family, special_maps, Builtin, IasMap, Kind,
};
use ias_core::germ::LagrangianGerm;
use ias_core::random::{random_germ, rng_from_seed};
use ias_core::svg::{render_svg, Curve};
use ias_core::verify::{
    check_family_consistency, check_hamiltonian, check_monge_ampere, check_shell,
    CheckReport,
};
use ias_core::versal::{
    is_versal, standard_catalog, stability_check, verdict_to_json, Mode, Verdict,
    DEFAULT_CUTOFF,
};
use ias_core::Rat;

#[derive(Parser)]
#[command(
    name = "ias",
    version,
    about = "Improper affine spheres from Lagrangian germs: construction, caustics, classification"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build generating families (germs) or echo closed forms (builtins)
    Build(BuildArgs),
    /// Sample a caustic to CSV (and optionally SVG)
    Caustic(CausticArgs),
    /// Classify the shell singularity of a germ
    Classify(ClassifyArgs),
    /// Versality verdicts for a germ's families or the standard catalog
    Versal(VersalArgs),
    /// Run identity checks and emit a JSON report
    Verify(VerifyArgs),
    /// Render a caustic figure as SVG
    Plot(PlotArgs),
    /// Seeded random property suite over the exact identities
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindSel {
    Cc,
    Sp,
    Both,
}

impl KindSel {
    fn kinds(self) -> Vec<Kind> {
        match self {
            KindSel::Cc => vec![Kind::CenterChord],
            KindSel::Sp => vec![Kind::Special],
            KindSel::Both => vec![Kind::CenterChord, Kind::Special],
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindOne {
    Cc,
    Sp,
}

impl KindOne {
    fn kind(self) -> Kind {
        match self {
            KindOne::Cc => Kind::CenterChord,
            KindOne::Sp => Kind::Special,
        }
    }
}

#[derive(Args)]
struct BuildArgs {
    /// Germ JSON file
    #[arg(long)]
    germ: Option<PathBuf>,
    /// Builtin surface ("circle" or "torus:N")
    #[arg(long)]
    builtin: Option<String>,
    #[arg(long, value_enum, default_value = "both")]
    kind: KindSel,
    /// Output path for the JSON document (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CausticArgs {
    #[arg(long)]
    germ: Option<PathBuf>,
    #[arg(long)]
    builtin: Option<String>,
    #[arg(long, value_enum, default_value = "cc")]
    kind: KindOne,
    /// Axis bounds "lo1,hi1,lo2,hi2,..." over the 2n domain axes
    #[arg(long)]
    window: String,
    /// Grid resolution per axis
    #[arg(long, default_value_t = 128)]
    res: usize,
    /// Residual tolerance for polished samples
    #[arg(long)]
    tol: Option<f64>,
    /// CSV output path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also render branch-colored SVG here (2-dimensional ambients only)
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    germ: PathBuf,
    /// Point on L: rationals "1/2,0" take the exact path, decimals "0.5,0"
    /// the float-jet path (germ basepoint when absent)
    #[arg(long)]
    point: Option<String>,
    #[arg(long, value_enum, default_value = "both")]
    kind: KindSel,
    /// Zero-tolerance of the float path
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VersalArgs {
    #[arg(long)]
    germ: Option<PathBuf>,
    /// Check every standard normal form instead of a germ
    #[arg(long)]
    catalog: bool,
    #[arg(long, value_enum, default_value = "both")]
    kind: KindSel,
    /// Jet-space truncation order (odd, at least 3)
    #[arg(long, default_value_t = DEFAULT_CUTOFF)]
    cutoff: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    germ: Option<PathBuf>,
    #[arg(long)]
    builtin: Option<String>,
    #[arg(long, value_enum, default_value = "both")]
    kind: KindSel,
    /// Comma list from: hamiltonian, ma, shell, family (default: all)
    #[arg(long)]
    checks: Option<String>,
    /// Axis bounds for the numeric grids (sensible default per source)
    #[arg(long)]
    window: Option<String>,
    #[arg(long, default_value_t = 16)]
    res: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    germ: Option<PathBuf>,
    #[arg(long)]
    builtin: Option<String>,
    #[arg(long, value_enum, default_value = "cc")]
    kind: KindOne,
    #[arg(long)]
    window: String,
    #[arg(long, default_value_t = 128)]
    res: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 20260814)]
    seed: u64,
    /// Number of random germs
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Cmd) -> Result<bool> {
    match cmd {
        Cmd::Build(a) => cmd_build(a),
        Cmd::Caustic(a) => cmd_caustic(a),
        Cmd::Classify(a) => cmd_classify(a),
        Cmd::Versal(a) => cmd_versal(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Plot(a) => cmd_plot(a),
        Cmd::Selftest(a) => cmd_selftest(a),
    }
}

// ---------------------------------------------------------------------------
// shared plumbing
// ---------------------------------------------------------------------------

enum Source {
    Germ(LagrangianGerm),
    Builtin(Builtin),
}

fn pick_source(germ: &Option<PathBuf>, builtin: &Option<String>) -> Result<Source> {
    match (germ, builtin) {
        (Some(path), None) => Ok(Source::Germ(read_germ(path)?)),
        (None, Some(name)) => Ok(Source::Builtin(Builtin::parse(name)?)),
        (Some(_), Some(_)) => bail!("--germ and --builtin are mutually exclusive"),
        (None, None) => bail!("one of --germ or --builtin is required"),
    }
}

fn read_germ(path: &Path) -> Result<LagrangianGerm> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read germ file {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| {
        anyhow!(
            "{}:{}:{}: {e}",
            path.display(),
            e.line(),
            e.column()
        )
    })
}

/// Move the germ's study point to its recorded basepoint.
fn at_basepoint(germ: &LagrangianGerm) -> Result<LagrangianGerm> {
    let bp = germ.basepoint().to_vec();
    Ok(germ.recenter(&bp)?)
}

fn germ_map(germ: &LagrangianGerm, kind: Kind) -> Result<IasMap> {
    Ok(match kind {
        Kind::CenterChord => center_chord_maps(germ)?,
        Kind::Special => special_maps(germ)?,
    })
}

fn parse_window(spec: &str, dim: usize) -> Result<Window> {
    let values: Vec<f64> = spec
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("bad window entry {tok:?}"))
        })
        .collect::<Result<_>>()?;
    if values.len() != 2 * dim {
        bail!(
            "window {spec:?} has {} numbers, expected {} (lo,hi per domain axis)",
            values.len(),
            2 * dim
        );
    }
    let lo: Vec<f64> = values.iter().step_by(2).copied().collect();
    let hi: Vec<f64> = values.iter().skip(1).step_by(2).copied().collect();
    Ok(Window::new(lo, hi)?)
}

enum PointArg {
    Exact(Vec<Rat>),
    Float(Vec<f64>),
}

fn parse_point(spec: &str, n: usize) -> Result<PointArg> {
    let toks: Vec<&str> = spec.split(',').map(str::trim).collect();
    if toks.len() != n {
        bail!("point {spec:?} has {} coordinates, expected {n}", toks.len());
    }
    let float_syntax = toks
        .iter()
        .any(|t| t.contains('.') || t.contains('e') || t.contains('E'));
    if float_syntax {
        let coords = toks
            .iter()
            .map(|t| t.parse::<f64>().map_err(|_| anyhow!("bad coordinate {t:?}")))
            .collect::<Result<Vec<_>>>()?;
        Ok(PointArg::Float(coords))
    } else {
        let coords = toks
            .iter()
            .map(|t| {
                t.parse::<Rat>()
                    .map_err(|e| anyhow!("bad rational coordinate {t:?}: {e}"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PointArg::Exact(coords))
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(out: &Option<PathBuf>, doc: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    emit(out, &text)
}

/// Points of `L` inside `[lo, hi]` via the shell sweep of the map
/// (`x(a, a)` center-chord, `x(a, 0)` special); 2-dimensional ambients only.
fn shell_sweep(map: &IasMap, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let samples = 256;
    (0..=samples)
        .map(|k| {
            let a = lo + (hi - lo) * (k as f64) / (samples as f64);
            let param = match map.kind() {
                Kind::CenterChord => vec![a, a],
                Kind::Special => vec![a, 0.0],
            };
            let x = map.eval_x(&param);
            (x[0], x[1])
        })
        .collect()
}

fn branch_curves(samples: &[CausticSample]) -> Vec<Curve> {
    let mut branches: Vec<usize> = samples.iter().map(|s| s.branch).collect();
    branches.sort_unstable();
    branches.dedup();
    branches
        .into_iter()
        .map(|b| Curve {
            label: format!("branch {b}"),
            points: samples
                .iter()
                .filter(|s| s.branch == b)
                .map(|s| (s.x[0], s.x[1]))
                .collect(),
            ordered: false,
        })
        .collect()
}

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

fn cmd_build(a: BuildArgs) -> Result<bool> {
    let doc = match pick_source(&a.germ, &a.builtin)? {
        Source::Germ(raw) => {
            let germ = at_basepoint(&raw)?;
            let (normalized, shear) = germ.normalize_cubic();
            let mut families = Vec::new();
            for kind in a.kind.kinds() {
                families.push(serde_json::to_value(gen_family(&germ, kind))?);
            }
            let mut doc = Map::new();
            doc.insert("germ".into(), serde_json::to_value(&raw)?);
            doc.insert("families".into(), Value::Array(families));
            doc.insert(
                "shear".into(),
                json!(shear
                    .iter()
                    .map(|row| row.iter().map(Rat::to_string).collect::<Vec<_>>())
                    .collect::<Vec<_>>()),
            );
            if normalized.potential().is_zero() {
                doc.insert(
                    "warning".into(),
                    json!("degenerate: no cubic-or-higher terms; the family reduces to -p.beta"),
                );
            }
            eprintln!("{}", germ_summary(&raw, &germ));
            Value::Object(doc)
        }
        Source::Builtin(b) => {
            let mut per_kind = Vec::new();
            for kind in a.kind.kinds() {
                per_kind.push(builtin_summary(b, kind));
                eprintln!(
                    "{} ({}): f = {}",
                    b.name(),
                    kind.as_str(),
                    builtin_f_formula(kind)
                );
            }
            json!({ "builtin": b.name(), "n": b.n(), "maps": per_kind })
        }
    };
    emit_json(&a.out, &doc)?;
    Ok(true)
}

fn germ_summary(raw: &LagrangianGerm, recentered: &LagrangianGerm) -> String {
    let n = raw.n();
    let mut out = String::new();
    let bp: Vec<String> = raw.basepoint().iter().map(Rat::to_string).collect();
    let _ = writeln!(out, "germ: n = {n}, basepoint ({})", bp.join(", "));
    let (normalized, shear) = recentered.normalize_cubic();
    let rows: Vec<String> = shear
        .iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(Rat::to_string).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    let _ = writeln!(out, "quadratic shear A = [{}]", rows.join(", "));
    let jets = normalized.jets(7);
    let mut any = false;
    if n == 1 {
        for k in 3..=7 {
            let v = jets.d1(k);
            if !num_traits_is_zero(&v) {
                let _ = writeln!(out, "  S^({k})(0) = {v}");
                any = true;
            }
        }
    } else if n == 2 {
        for total in 3..=7u32 {
            for i in 0..=total {
                let v = jets.d2(i, total - i);
                if !num_traits_is_zero(&v) {
                    let _ = writeln!(out, "  S_{{{},{}}} = {v}", i, total - i);
                    any = true;
                }
            }
        }
    }
    if !any {
        let _ = writeln!(out, "  all jets through order 7 vanish");
    }
    out.trim_end().to_string()
}

fn num_traits_is_zero(r: &Rat) -> bool {
    *r == ias_core::rint(0)
}

fn builtin_f_formula(kind: Kind) -> &'static str {
    match kind {
        Kind::CenterChord => "(v - u + sin(u - v))/4",
        Kind::Special => "(sinh(2t) - 2t)/4",
    }
}

fn builtin_summary(b: Builtin, kind: Kind) -> Value {
    let (x, y) = match kind {
        Kind::CenterChord => (
            "cos((u-v)/2) (cos((u+v)/2), sin((u+v)/2))",
            "sin((u-v)/2) (-sin((u+v)/2), cos((u+v)/2))",
        ),
        Kind::Special => ("cosh t (cos s, sin s)", "sinh t (-sin s, cos s)"),
    };
    let mut doc = Map::new();
    doc.insert("kind".into(), json!(kind.as_str()));
    doc.insert("x".into(), json!(x));
    doc.insert("y".into(), json!(y));
    doc.insert("f".into(), json!(builtin_f_formula(kind)));
    if b.n() > 1 {
        doc.insert(
            "note".into(),
            json!(format!(
                "coordinate-wise product over {} circle blocks; f sums over blocks",
                b.n()
            )),
        );
    }
    Value::Object(doc)
}

// ---------------------------------------------------------------------------
// caustic / plot
// ---------------------------------------------------------------------------

struct CausticRun {
    samples: Vec<CausticSample>,
    n: usize,
    degenerate: bool,
    dropped: usize,
    map: IasMap,
    window: Window,
    caption: String,
}

fn run_caustic(
    germ: &Option<PathBuf>,
    builtin: &Option<String>,
    kind: Kind,
    window_spec: &str,
    res: usize,
    tol: Option<f64>,
) -> Result<CausticRun> {
    let mut cfg = CausticConfig::default();
    if let Some(t) = tol {
        if !(t.is_finite() && t > 0.0) {
            bail!("tolerance must be positive, got {t}");
        }
        cfg.tol_polish = t;
    }
    match pick_source(germ, builtin)? {
        Source::Germ(raw) => {
            // The family window covers the n shell axes q then the n fiber
            // axes beta.
            let g = at_basepoint(&raw)?;
            let window = parse_window(window_spec, 2 * g.n())?;
            let fam = gen_family(&g, kind);
            let locus = singular_locus(&fam, &window, res, &cfg)?;
            let samples = caustic_points(&fam, &locus, &cfg)?;
            Ok(CausticRun {
                samples,
                n: g.n(),
                degenerate: locus.degenerate,
                dropped: locus.dropped,
                map: germ_map(&g, kind)?,
                window,
                caption: format!(
                    "caustic of germ ({}), window {}",
                    kind.as_str(),
                    window_spec
                ),
            })
        }
        Source::Builtin(b) => {
            let map = IasMap::builtin_map(b, kind);
            let window = parse_window(window_spec, map.domain_dim())?;
            let samples = parametric_caustic(&map, &window, res, &cfg)?;
            Ok(CausticRun {
                samples,
                n: map.n(),
                degenerate: false,
                dropped: 0,
                map,
                window,
                caption: format!(
                    "caustic of {} ({}), window {}",
                    b.name(),
                    kind.as_str(),
                    window_spec
                ),
            })
        }
    }
}

fn caustic_svg(run: &CausticRun) -> Result<String> {
    if run.n != 1 {
        bail!("SVG rendering needs a 2-dimensional ambient (n = 1), got n = {}", run.n);
    }
    // L overlay swept across the first window axis.
    let mut curves = branch_curves(&run.samples);
    curves.push(Curve {
        label: "L".into(),
        points: shell_sweep(&run.map, run.window.lo()[0], run.window.hi()[0]),
        ordered: true,
    });
    Ok(render_svg(&curves, &run.caption))
}

fn cmd_caustic(a: CausticArgs) -> Result<bool> {
    let run = run_caustic(&a.germ, &a.builtin, a.kind.kind(), &a.window, a.res, a.tol)?;
    if run.degenerate {
        eprintln!("warning: the singular locus is the whole window (degenerate); no samples");
    }
    let branches: std::collections::BTreeSet<usize> =
        run.samples.iter().map(|s| s.branch).collect();
    eprintln!(
        "{} samples on {} branches ({} seeds dropped)",
        run.samples.len(),
        branches.len(),
        run.dropped
    );
    emit(&a.out, &samples_to_csv(&run.samples, run.n))?;
    if let Some(svg_path) = &a.svg {
        let svg = caustic_svg(&run)?;
        fs::write(svg_path, svg)
            .with_context(|| format!("cannot write {}", svg_path.display()))?;
    }
    Ok(true)
}

fn cmd_plot(a: PlotArgs) -> Result<bool> {
    let run = run_caustic(&a.germ, &a.builtin, a.kind.kind(), &a.window, a.res, None)?;
    let svg = caustic_svg(&run)?;
    emit(&a.out, &svg)?;
    Ok(true)
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

fn classification_json(kind: Kind, c: &Classification<Rat>) -> Value {
    let mut doc = Map::new();
    doc.insert("kind".into(), json!(kind.as_str()));
    doc.insert("class".into(), json!(c.label.as_str()));
    doc.insert("fired".into(), json!(c.fired));
    let mut inv = Map::new();
    for (name, value) in c.invariants.entries() {
        inv.insert(name.into(), json!(value));
    }
    doc.insert("invariants".into(), Value::Object(inv));
    if c.label == ClassLabel::NonSimple {
        doc.insert(
            "note".into(),
            json!("germs with n >= 3 are outside the simple-classification range"),
        );
    }
    Value::Object(doc)
}

fn cmd_classify(a: ClassifyArgs) -> Result<bool> {
    let germ = read_germ(&a.germ)?;
    let point = match &a.point {
        Some(spec) => parse_point(spec, germ.n())?,
        None => PointArg::Exact(germ.basepoint().to_vec()),
    };
    let tol = a.tol.unwrap_or(DEFAULT_FLOAT_TOL);
    let mut reports = Vec::new();
    for kind in a.kind.kinds() {
        let report = match &point {
            PointArg::Exact(coords) => {
                let c = classify_at(&germ, coords, kind)?;
                classification_json(kind, &c)
            }
            PointArg::Float(coords) => match classify_at_float(&germ, coords, kind, tol)? {
                FloatOutcome::Decided(c) => {
                    let mut doc = Map::new();
                    doc.insert("kind".into(), json!(kind.as_str()));
                    doc.insert("outcome".into(), json!("decided"));
                    doc.insert("class".into(), json!(c.label.as_str()));
                    doc.insert("fired".into(), json!(c.fired));
                    let mut inv = Map::new();
                    for (name, value) in c.invariants.entries() {
                        inv.insert(name.into(), json!(value));
                    }
                    doc.insert("invariants".into(), Value::Object(inv));
                    doc.insert("tolerance".into(), json!(tol));
                    Value::Object(doc)
                }
                FloatOutcome::SignUncertain { quantity, invariants } => {
                    let mut inv = Map::new();
                    for (name, value) in invariants.entries() {
                        inv.insert(name.into(), json!(value));
                    }
                    json!({
                        "kind": kind.as_str(),
                        "outcome": "sign-uncertain",
                        "quantity": quantity,
                        "invariants": Value::Object(inv),
                        "tolerance": tol,
                    })
                }
            },
        };
        reports.push(report);
    }
    emit_json(&a.out, &Value::Array(reports))?;
    Ok(true)
}

// ---------------------------------------------------------------------------
// versal
// ---------------------------------------------------------------------------

fn cmd_versal(a: VersalArgs) -> Result<bool> {
    if a.catalog && a.germ.is_some() {
        bail!("--catalog and --germ are mutually exclusive");
    }
    if a.catalog {
        let mut reports = Vec::new();
        let mut all_ok = true;
        for entry in standard_catalog() {
            let d = entry.deformation(a.cutoff)?;
            let verdict = is_versal(&d, Mode::Full)?;
            all_ok &= verdict == Verdict::Versal;
            let mut doc = verdict_to_json(&verdict, a.cutoff);
            doc.as_object_mut()
                .expect("verdict JSON is an object")
                .insert("label".into(), json!(entry.label));
            reports.push(doc);
        }
        emit_json(&a.out, &Value::Array(reports))?;
        return Ok(all_ok);
    }
    let Some(path) = &a.germ else {
        bail!("one of --germ or --catalog is required");
    };
    let germ = at_basepoint(&read_germ(path)?)?;
    let mut reports = Vec::new();
    let mut all_ok = true;
    for kind in a.kind.kinds() {
        let fam = gen_family(&germ, kind);
        let verdict = stability_check(&fam, a.cutoff)?;
        all_ok &= verdict.is_versal();
        let mut doc = verdict_to_json(&verdict, a.cutoff);
        doc.as_object_mut()
            .expect("verdict JSON is an object")
            .insert("kind".into(), json!(kind.as_str()));
        reports.push(doc);
    }
    emit_json(&a.out, &Value::Array(reports))?;
    Ok(all_ok)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq)]
enum CheckSel {
    Hamiltonian,
    MongeAmpere,
    Shell,
    Family,
}

fn parse_checks(spec: &Option<String>) -> Result<Vec<CheckSel>> {
    let Some(spec) = spec else {
        return Ok(vec![
            CheckSel::Hamiltonian,
            CheckSel::MongeAmpere,
            CheckSel::Shell,
            CheckSel::Family,
        ]);
    };
    spec.split(',')
        .map(|tok| match tok.trim() {
            "hamiltonian" | "ham" => Ok(CheckSel::Hamiltonian),
            "ma" | "monge-ampere" | "monge_ampere" => Ok(CheckSel::MongeAmpere),
            "shell" => Ok(CheckSel::Shell),
            "family" => Ok(CheckSel::Family),
            other => Err(anyhow!(
                "unknown check {other:?}; expected hamiltonian, ma, shell, or family"
            )),
        })
        .collect()
}

fn tagged_report(kind: Option<Kind>, report: &CheckReport) -> Value {
    let mut doc = report.to_json();
    let obj = doc.as_object_mut().expect("report JSON is an object");
    match kind {
        Some(k) => obj.insert("kind".into(), json!(k.as_str())),
        None => obj.insert("kind".into(), Value::Null),
    };
    doc
}

fn cmd_verify(a: VerifyArgs) -> Result<bool> {
    let checks = parse_checks(&a.checks)?;
    let source = pick_source(&a.germ, &a.builtin)?;
    let fd_step = 1e-4;

    let (maps, germ): (Vec<(Kind, IasMap)>, Option<LagrangianGerm>) = match source {
        Source::Germ(raw) => {
            let g = at_basepoint(&raw)?;
            let maps = a
                .kind
                .kinds()
                .into_iter()
                .map(|k| Ok((k, germ_map(&g, k)?)))
                .collect::<Result<_>>()?;
            (maps, Some(g))
        }
        Source::Builtin(b) => (
            a.kind
                .kinds()
                .into_iter()
                .map(|k| (k, IasMap::builtin_map(b, k)))
                .collect(),
            None,
        ),
    };

    let mut reports = Vec::new();
    let mut all_passed = true;
    for (kind, map) in &maps {
        let dim = map.domain_dim();
        let window = match &a.window {
            Some(spec) => parse_window(spec, dim)?,
            None => Window::centered(if map.builtin().is_some() { 3.0 } else { 1.0 }, dim)?,
        };
        for check in &checks {
            let report = match check {
                CheckSel::Hamiltonian => {
                    Some(check_hamiltonian(map, &window, a.res, fd_step)?)
                }
                CheckSel::MongeAmpere => Some(check_monge_ampere(map, &window, a.res)?),
                CheckSel::Shell => Some(check_shell(map, &window, a.res)?),
                CheckSel::Family => None,
            };
            if let Some(report) = report {
                all_passed &= report.passed;
                reports.push(tagged_report(Some(*kind), &report));
            }
        }
    }
    if checks.contains(&CheckSel::Family) {
        if let Some(g) = &germ {
            let report = check_family_consistency(g)?;
            all_passed &= report.passed;
            reports.push(tagged_report(None, &report));
        } else if a.checks.is_some() {
            // explicitly requested on a builtin: that check needs a germ
            bail!("the family check needs --germ (builtins have no generating family)");
        }
    }
    emit_json(&a.out, &Value::Array(reports))?;
    Ok(all_passed)
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

fn cmd_selftest(a: SelftestArgs) -> Result<bool> {
    let mut rng = rng_from_seed(a.seed);
    let mut failures: Vec<String> = Vec::new();
    let mut germs = Vec::new();
    for i in 0..a.count {
        let n = 1 + i % 2;
        germs.push(random_germ(&mut rng, n, 7));
    }

    // Exact structural identities on every germ.
    for (i, g) in germs.iter().enumerate() {
        let rep = check_family_consistency(g)?;
        if !rep.passed {
            failures.push(format!("germ {i}: family consistency: {:?}", rep.residual));
        }
    }

    // Exact map identities (and a small numeric grid) on a subset.
    let window1 = Window::new(vec![0.2, 0.3], vec![0.9, 1.0])?;
    let window2 = Window::new(vec![0.2, 0.3, 0.25, 0.35], vec![0.9, 1.0, 0.95, 1.05])?;
    for (i, g) in germs.iter().take(12).enumerate() {
        for kind in [Kind::CenterChord, Kind::Special] {
            let map = germ_map(g, kind)?;
            let window = if g.n() == 1 { &window1 } else { &window2 };
            let ham = check_hamiltonian(&map, window, 4, 1e-4)?;
            if !ham.passed {
                failures.push(format!("germ {i} {}: hamiltonian", kind.as_str()));
            }
            let shell = check_shell(&map, window, 4)?;
            if !shell.passed {
                failures.push(format!("germ {i} {}: shell", kind.as_str()));
            }
            match check_monge_ampere(&map, window, 4) {
                Ok(rep) => {
                    if !rep.passed {
                        failures.push(format!(
                            "germ {i} {}: monge-ampere: {:?}",
                            kind.as_str(),
                            rep.residual
                        ));
                    }
                }
                Err(ias_core::Error::NoRegularPoints) => {} // window too singular: skip
                Err(e) => return Err(e.into()),
            }
        }
    }

    let doc = json!({
        "seed": a.seed,
        "count": a.count,
        "failures": failures,
    });
    emit_json(&a.out, &doc)?;
    Ok(failures.is_empty())
}
