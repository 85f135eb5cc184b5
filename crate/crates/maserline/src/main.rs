//! Command-line surface: photon distributions, inversion records,
//! lineshape scans, Husimi grids, squeeze optimization, and the
//! verification suite, emitted as CSV or JSON.

use clap::{Args, Parser, Subcommand, ValueEnum};
use maserline::dynamics::{inversion_excited, inversion_ground, ModelParams};
use maserline::husimi::{grid, integrate, Window};
use maserline::lineshape::{optimize_r, scan, OptimizeFlag, Prep};
use maserline::states::{photon_dist, FieldKind, FieldSpec, DEFAULT_TOL};
use maserline::{verify, C64};
use serde_json::{json, Map, Value};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

fn main() {
    init_thread_pool();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("{}", err.record());
            std::process::exit(err.exit_code);
        }
    }
}

/// Worker threads come from MASERLINE_THREADS when set; the library default
/// otherwise.
fn init_thread_pool() {
    if let Ok(v) = std::env::var("MASERLINE_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

#[derive(Debug)]
struct CliError {
    exit_code: i32,
    kind: String,
    message: String,
}

impl CliError {
    fn validation(message: impl Into<String>) -> CliError {
        CliError {
            exit_code: 2,
            kind: "validation".into(),
            message: message.into(),
        }
    }

    fn record(&self) -> String {
        json!({"error": self.kind, "message": self.message, "exit_code": self.exit_code})
            .to_string()
    }
}

impl From<maserline::Error> for CliError {
    fn from(e: maserline::Error) -> CliError {
        let kind = match &e {
            maserline::Error::Validation(_) => "validation",
            maserline::Error::Domain(_) => "domain",
            maserline::Error::Degenerate(_) => "degenerate",
            maserline::Error::Resource(_) => "resource",
            maserline::Error::Truncation { .. } => "truncation",
            maserline::Error::Integration(_) => "integration",
            maserline::Error::NoInteriorMinimum(_) => "no-interior-minimum",
        };
        CliError {
            exit_code: e.exit_code(),
            kind: kind.into(),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError {
            exit_code: 2,
            kind: "io".into(),
            message: e.to_string(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "maserline",
    version,
    about = "Two-level atom in a squeezed field: dynamics, lineshapes, Husimi grids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Photon-number distribution P_n of the prepared field
    PhotonDist(PhotonDistArgs),
    /// Atomic inversion W(t) on a uniform time grid
    Inversion(InversionArgs),
    /// Time-averaged inversion across a detuning window
    Lineshape(LineshapeArgs),
    /// Husimi Q function sampled on a phase-space grid
    Husimi(HusimiArgs),
    /// Squeeze parameter with the deepest lineshape feature
    OptimizeR(OptimizeArgs),
    /// Run every closed-form-vs-oracle verification check
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Key=value defaults file; command-line flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (stdout when omitted); written atomically
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct PhotonDistArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Field displacement, e.g. "3.5" or "1+2i"
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    alpha: Option<C64>,
    /// Squeeze parameter
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    /// Field preparation
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    /// Certified tail-mass tolerance
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
}

#[derive(Args)]
struct InversionArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    alpha: Option<C64>,
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    /// Atom-field detuning
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// AC Stark shift strength
    #[arg(long, allow_negative_numbers = true)]
    chi: Option<f64>,
    /// Coupling constant
    #[arg(long, allow_negative_numbers = true)]
    g: Option<f64>,
    /// Initial atomic state
    #[arg(long, value_enum)]
    prep: Option<PrepArg>,
    /// End of the time grid (units of 1/g)
    #[arg(long, allow_negative_numbers = true)]
    tmax: Option<f64>,
    /// Number of grid points including both ends
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Args)]
struct LineshapeArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    alpha: Option<C64>,
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    #[arg(long, allow_negative_numbers = true)]
    chi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    g: Option<f64>,
    #[arg(long, value_enum)]
    prep: Option<PrepArg>,
    /// Lower end of the detuning window
    #[arg(long, allow_negative_numbers = true)]
    delta_min: Option<f64>,
    /// Upper end of the detuning window
    #[arg(long, allow_negative_numbers = true)]
    delta_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Args)]
struct HusimiArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    alpha: Option<C64>,
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    /// Window edges; any omitted edge falls back to the default window
    #[arg(long, allow_negative_numbers = true)]
    re_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    re_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    im_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    im_max: Option<f64>,
    /// Grid resolution per axis
    #[arg(long)]
    resolution: Option<usize>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    alpha: Option<C64>,
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    #[arg(long, value_enum)]
    prep: Option<PrepArg>,
    #[arg(long, allow_negative_numbers = true)]
    chi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    g: Option<f64>,
    /// Lower end of the squeeze bracket
    #[arg(long, allow_negative_numbers = true)]
    r_min: Option<f64>,
    /// Upper end of the squeeze bracket
    #[arg(long, allow_negative_numbers = true)]
    r_max: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum KindArg {
    Single,
    Plus,
    Minus,
}

impl KindArg {
    fn to_kind(self) -> FieldKind {
        match self {
            KindArg::Single => FieldKind::Single,
            KindArg::Plus => FieldKind::SuperpositionPlus,
            KindArg::Minus => FieldKind::SuperpositionMinus,
        }
    }

    fn label(self) -> &'static str {
        match self {
            KindArg::Single => "single",
            KindArg::Plus => "plus",
            KindArg::Minus => "minus",
        }
    }
}

impl FromStr for KindArg {
    type Err = String;
    fn from_str(s: &str) -> Result<KindArg, String> {
        match s.to_ascii_lowercase().as_str() {
            "single" => Ok(KindArg::Single),
            "plus" => Ok(KindArg::Plus),
            "minus" => Ok(KindArg::Minus),
            other => Err(format!("unknown field kind '{other}' (single|plus|minus)")),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum PrepArg {
    Excited,
    Ground,
}

impl PrepArg {
    fn to_prep(self) -> Prep {
        match self {
            PrepArg::Excited => Prep::Excited,
            PrepArg::Ground => Prep::Ground,
        }
    }

    fn label(self) -> &'static str {
        match self {
            PrepArg::Excited => "excited",
            PrepArg::Ground => "ground",
        }
    }
}

impl FromStr for PrepArg {
    type Err = String;
    fn from_str(s: &str) -> Result<PrepArg, String> {
        match s.to_ascii_lowercase().as_str() {
            "excited" => Ok(PrepArg::Excited),
            "ground" => Ok(PrepArg::Ground),
            other => Err(format!("unknown preparation '{other}' (excited|ground)")),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl FromStr for FormatArg {
    type Err = String;
    fn from_str(s: &str) -> Result<FormatArg, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(FormatArg::Csv),
            "json" => Ok(FormatArg::Json),
            other => Err(format!("unknown format '{other}' (csv|json)")),
        }
    }
}

/// "a", "a+bi", "bi", or "i" with optional exponents, e.g. "3.5e-1+2i".
fn parse_complex(s: &str) -> Result<C64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t
            .parse::<f64>()
            .map(|re| C64::new(re, 0.0))
            .map_err(|e| format!("bad complex literal '{s}': {e}"));
    };
    let bytes = body.as_bytes();
    let mut split = None;
    for idx in (1..bytes.len()).rev() {
        let c = bytes[idx] as char;
        if (c == '+' || c == '-') && !matches!(bytes[idx - 1] as char, 'e' | 'E') {
            split = Some(idx);
            break;
        }
    }
    let unit = |part: &str| -> Result<f64, String> {
        match part {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            other => other
                .parse::<f64>()
                .map_err(|e| format!("bad complex literal '{s}': {e}")),
        }
    };
    match split {
        Some(idx) => {
            let re = body[..idx]
                .parse::<f64>()
                .map_err(|e| format!("bad complex literal '{s}': {e}"))?;
            Ok(C64::new(re, unit(&body[idx..])?))
        }
        None => Ok(C64::new(0.0, unit(body)?)),
    }
}

/// Key=value defaults; flags override these. Lines may be blank or start
/// with '#'.
struct FileConfig(HashMap<String, String>);

const KNOWN_KEYS: &[&str] = &[
    "alpha", "r", "kind", "prep", "delta", "chi", "g", "tol", "tmax", "steps", "delta-min",
    "delta-max", "re-min", "re-max", "im-min", "im-max", "resolution", "r-min", "r-max", "format",
    "output",
];

impl FileConfig {
    fn load(path: Option<&Path>) -> Result<FileConfig, CliError> {
        let mut map = HashMap::new();
        let Some(path) = path else {
            return Ok(FileConfig(map));
        };
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::validation(format!(
                    "config line {} is not key=value: '{raw}'",
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::validation(format!(
                    "unknown config key '{key}' on line {}",
                    lineno + 1
                )));
            }
            map.insert(key, value.trim().to_string());
        }
        Ok(FileConfig(map))
    }

    fn get<T>(&self, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, CliError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => parse(raw)
                .map(Some)
                .map_err(|e| CliError::validation(format!("config key '{key}': {e}"))),
        }
    }
}

fn parse_plain<T: FromStr>(raw: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    raw.parse::<T>().map_err(|e| e.to_string())
}

/// Flag value, then config file value, then the built-in default.
fn resolve<T>(flag: Option<T>, file: Result<Option<T>, CliError>, default: T) -> Result<T, CliError> {
    Ok(flag.or(file?).unwrap_or(default))
}

fn resolve_required<T>(
    flag: Option<T>,
    file: Result<Option<T>, CliError>,
    name: &str,
) -> Result<T, CliError> {
    flag.or(file?)
        .ok_or_else(|| CliError::validation(format!("missing required parameter --{name}")))
}

enum Cell {
    Int(u64),
    Num(f64),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // 17 significant digits: round-trip safe for f64.
            Cell::Num(v) => format!("{v:.16e}"),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Num(v) => Value::from(*v),
        }
    }
}

struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    meta: Map<String, Value>,
}

impl Table {
    fn render(&self, format: FormatArg) -> String {
        match format {
            FormatArg::Csv => {
                let mut out = String::new();
                let _ = writeln!(out, "{}", self.columns.join(","));
                for row in &self.rows {
                    let fields: Vec<String> = row.iter().map(Cell::csv).collect();
                    let _ = writeln!(out, "{}", fields.join(","));
                }
                out
            }
            FormatArg::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| Value::from(row.iter().map(Cell::json).collect::<Vec<_>>()))
                    .collect();
                let doc = json!({
                    "meta": Value::Object(self.meta.clone()),
                    "columns": self.columns,
                    "rows": rows,
                });
                let mut out = serde_json::to_string_pretty(&doc).expect("static document");
                out.push('\n');
                out
            }
        }
    }
}

fn base_meta(command: &str) -> Map<String, Value> {
    let mut meta = Map::new();
    meta.insert("command".into(), Value::from(command));
    meta.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
    meta
}

fn meta_field(meta: &mut Map<String, Value>, spec: &FieldSpec, kind: KindArg) {
    meta.insert("alpha_re".into(), Value::from(spec.alpha.re));
    meta.insert("alpha_im".into(), Value::from(spec.alpha.im));
    meta.insert("r".into(), Value::from(spec.r));
    meta.insert("kind".into(), Value::from(kind.label()));
}

fn meta_params(meta: &mut Map<String, Value>, p: &ModelParams) {
    meta.insert("delta".into(), Value::from(p.delta));
    meta.insert("chi".into(), Value::from(p.chi));
    meta.insert("g".into(), Value::from(p.g));
}

/// Writes to --output atomically (temp file in the same directory, then
/// rename), or to stdout when no path was given.
fn emit(common: &CommonArgs, file: &FileConfig, content: &str) -> Result<(), CliError> {
    let output = match &common.output {
        Some(p) => Some(p.clone()),
        None => file.get("output", |raw| Ok::<_, String>(PathBuf::from(raw)))?,
    };
    match output {
        None => {
            print!("{content}");
            std::io::stdout().flush()?;
            Ok(())
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(content.as_bytes())?;
            tmp.persist(&path)
                .map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display())))?;
            Ok(())
        }
    }
}

fn resolve_format(common: &CommonArgs, file: &FileConfig) -> Result<FormatArg, CliError> {
    resolve(
        common.format,
        file.get("format", parse_plain::<FormatArg>),
        FormatArg::Csv,
    )
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::PhotonDist(args) => cmd_photon_dist(args),
        Command::Inversion(args) => cmd_inversion(args),
        Command::Lineshape(args) => cmd_lineshape(args),
        Command::Husimi(args) => cmd_husimi(args),
        Command::OptimizeR(args) => cmd_optimize(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn cmd_photon_dist(args: PhotonDistArgs) -> Result<i32, CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let alpha = resolve_required(args.alpha, file.get("alpha", |r| parse_complex(r)), "alpha")?;
    let r = resolve_required(args.r, file.get("r", parse_plain::<f64>), "r")?;
    let kind = resolve(args.kind, file.get("kind", parse_plain::<KindArg>), KindArg::Single)?;
    let tol = resolve(args.tol, file.get("tol", parse_plain::<f64>), DEFAULT_TOL)?;
    let format = resolve_format(&args.common, &file)?;

    let spec = FieldSpec::new(alpha, r, kind.to_kind())?;
    let dist = photon_dist(&spec, tol)?;

    let mut meta = base_meta("photon-dist");
    meta_field(&mut meta, &spec, kind);
    meta.insert("tol".into(), Value::from(tol));
    meta.insert("truncation".into(), Value::from(dist.truncation as u64));
    meta.insert("tail_mass_bound".into(), Value::from(dist.tail_mass_bound));

    let rows = dist
        .probs
        .iter()
        .enumerate()
        .map(|(n, &p)| vec![Cell::Int(n as u64), Cell::Num(p)])
        .collect();
    let table = Table {
        columns: vec!["n", "p"],
        rows,
        meta,
    };
    emit(&args.common, &file, &table.render(format))?;
    Ok(0)
}

fn cmd_inversion(args: InversionArgs) -> Result<i32, CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let alpha = resolve_required(args.alpha, file.get("alpha", |r| parse_complex(r)), "alpha")?;
    let r = resolve_required(args.r, file.get("r", parse_plain::<f64>), "r")?;
    let kind = resolve(args.kind, file.get("kind", parse_plain::<KindArg>), KindArg::Single)?;
    let delta = resolve(args.delta, file.get("delta", parse_plain::<f64>), 0.0)?;
    let chi = resolve(args.chi, file.get("chi", parse_plain::<f64>), 0.0)?;
    let g = resolve(args.g, file.get("g", parse_plain::<f64>), 1.0)?;
    let prep = resolve(args.prep, file.get("prep", parse_plain::<PrepArg>), PrepArg::Excited)?;
    let tmax = resolve(args.tmax, file.get("tmax", parse_plain::<f64>), 25.0)?;
    let steps = resolve(args.steps, file.get("steps", parse_plain::<usize>), 501)?;
    let format = resolve_format(&args.common, &file)?;

    if !(tmax.is_finite() && tmax > 0.0) {
        return Err(CliError::validation(format!(
            "tmax must be positive, got {tmax}"
        )));
    }
    if steps < 2 {
        return Err(CliError::validation(format!(
            "need at least 2 time points, got {steps}"
        )));
    }

    let spec = FieldSpec::new(alpha, r, kind.to_kind())?;
    let p = ModelParams::new(delta, chi, g)?;
    let dist = photon_dist(&spec, DEFAULT_TOL)?;

    let rows = (0..steps)
        .map(|k| {
            let t = tmax * k as f64 / (steps - 1) as f64;
            let w = match prep {
                PrepArg::Excited => inversion_excited(&dist, t, &p),
                PrepArg::Ground => inversion_ground(&dist, t, &p),
            };
            vec![Cell::Num(t), Cell::Num(w)]
        })
        .collect();

    let mut meta = base_meta("inversion");
    meta_field(&mut meta, &spec, kind);
    meta_params(&mut meta, &p);
    meta.insert("prep".into(), Value::from(prep.label()));
    meta.insert("tmax".into(), Value::from(tmax));
    meta.insert("steps".into(), Value::from(steps as u64));
    meta.insert("truncation".into(), Value::from(dist.truncation as u64));

    let table = Table {
        columns: vec!["t", "w"],
        rows,
        meta,
    };
    emit(&args.common, &file, &table.render(format))?;
    Ok(0)
}

fn cmd_lineshape(args: LineshapeArgs) -> Result<i32, CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let alpha = resolve_required(args.alpha, file.get("alpha", |r| parse_complex(r)), "alpha")?;
    let r = resolve_required(args.r, file.get("r", parse_plain::<f64>), "r")?;
    let kind = resolve(args.kind, file.get("kind", parse_plain::<KindArg>), KindArg::Single)?;
    let chi = resolve(args.chi, file.get("chi", parse_plain::<f64>), 0.0)?;
    let g = resolve(args.g, file.get("g", parse_plain::<f64>), 1.0)?;
    let prep = resolve(args.prep, file.get("prep", parse_plain::<PrepArg>), PrepArg::Excited)?;
    let delta_min = resolve(args.delta_min, file.get("delta-min", parse_plain::<f64>), -30.0)?;
    let delta_max = resolve(args.delta_max, file.get("delta-max", parse_plain::<f64>), 10.0)?;
    let steps = resolve(args.steps, file.get("steps", parse_plain::<usize>), 801)?;
    let format = resolve_format(&args.common, &file)?;

    let spec = FieldSpec::new(alpha, r, kind.to_kind())?;
    // Scans are detuning sweeps; the delta field of ModelParams is the swept
    // variable, so only chi and g enter here.
    let p = ModelParams::new(0.0, chi, g)?;
    let result = scan(&spec, prep.to_prep(), &p, delta_min, delta_max, steps)?;

    let rows = result
        .deltas
        .iter()
        .zip(&result.values)
        .map(|(&d, &w)| vec![Cell::Num(d), Cell::Num(w)])
        .collect();

    let mut meta = base_meta("lineshape");
    meta_field(&mut meta, &spec, kind);
    meta.insert("chi".into(), Value::from(chi));
    meta.insert("g".into(), Value::from(g));
    meta.insert("prep".into(), Value::from(prep.label()));
    meta.insert("delta_min".into(), Value::from(delta_min));
    meta.insert("delta_max".into(), Value::from(delta_max));
    meta.insert("steps".into(), Value::from(steps as u64));

    let table = Table {
        columns: vec!["delta", "w_avg"],
        rows,
        meta,
    };
    emit(&args.common, &file, &table.render(format))?;
    Ok(0)
}

fn cmd_husimi(args: HusimiArgs) -> Result<i32, CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let alpha = resolve_required(args.alpha, file.get("alpha", |r| parse_complex(r)), "alpha")?;
    let r = resolve_required(args.r, file.get("r", parse_plain::<f64>), "r")?;
    let kind = resolve(args.kind, file.get("kind", parse_plain::<KindArg>), KindArg::Single)?;
    let resolution = resolve(
        args.resolution,
        file.get("resolution", parse_plain::<usize>),
        256,
    )?;
    let format = resolve_format(&args.common, &file)?;

    let spec = FieldSpec::new(alpha, r, kind.to_kind())?;
    let default_window = Window::default_for(&spec);
    let re_min = resolve(args.re_min, file.get("re-min", parse_plain::<f64>), default_window.re_lo)?;
    let re_max = resolve(args.re_max, file.get("re-max", parse_plain::<f64>), default_window.re_hi)?;
    let im_min = resolve(args.im_min, file.get("im-min", parse_plain::<f64>), default_window.im_lo)?;
    let im_max = resolve(args.im_max, file.get("im-max", parse_plain::<f64>), default_window.im_hi)?;
    let window = Window::new(re_min, re_max, im_min, im_max)?;

    let grid = grid(&spec, Some(window), resolution, resolution)?;
    let total = integrate(&grid);
    if grid.boundary_ratio() >= 1e-8 {
        eprintln!(
            "warning: window clips phase-space mass (edge/max ratio {:.2e}); \
             the grid integral {total:.6} may fall short of 1",
            grid.boundary_ratio()
        );
    }

    let mut rows = Vec::with_capacity(resolution * resolution);
    for i_im in 0..resolution {
        for i_re in 0..resolution {
            let beta = grid.cell_center(i_re, i_im);
            let q = grid.values[i_im * resolution + i_re];
            rows.push(vec![Cell::Num(beta.re), Cell::Num(beta.im), Cell::Num(q)]);
        }
    }

    let mut meta = base_meta("husimi");
    meta_field(&mut meta, &spec, kind);
    meta.insert("re_min".into(), Value::from(re_min));
    meta.insert("re_max".into(), Value::from(re_max));
    meta.insert("im_min".into(), Value::from(im_min));
    meta.insert("im_max".into(), Value::from(im_max));
    meta.insert("resolution".into(), Value::from(resolution as u64));
    meta.insert("integral".into(), Value::from(total));
    meta.insert("boundary_ratio".into(), Value::from(grid.boundary_ratio()));

    let table = Table {
        columns: vec!["re_beta", "im_beta", "q"],
        rows,
        meta,
    };
    emit(&args.common, &file, &table.render(format))?;
    Ok(0)
}

fn cmd_optimize(args: OptimizeArgs) -> Result<i32, CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let alpha = resolve_required(args.alpha, file.get("alpha", |r| parse_complex(r)), "alpha")?;
    let kind = resolve(args.kind, file.get("kind", parse_plain::<KindArg>), KindArg::Single)?;
    let prep = resolve(args.prep, file.get("prep", parse_plain::<PrepArg>), PrepArg::Excited)?;
    let chi = resolve(args.chi, file.get("chi", parse_plain::<f64>), 0.0)?;
    let g = resolve(args.g, file.get("g", parse_plain::<f64>), 1.0)?;
    let r_min = resolve(args.r_min, file.get("r-min", parse_plain::<f64>), 0.05)?;
    let r_max = resolve(args.r_max, file.get("r-max", parse_plain::<f64>), 1.5)?;

    if let Some(fmt) = args.common.format {
        if fmt == FormatArg::Csv {
            return Err(CliError::validation(
                "optimize-r emits a single JSON record; csv format is not available",
            ));
        }
    }

    let p = ModelParams::new(0.0, chi, g)?;
    let outcome = optimize_r(alpha, kind.to_kind(), prep.to_prep(), &p, r_min, r_max)?;
    if !matches!(outcome.flag, OptimizeFlag::Converged) {
        eprintln!(
            "warning: optimizer flag {:?}; result is the best value found, not a certified optimum",
            outcome.flag
        );
    }

    let record = json!({
        "r_star": outcome.r_star,
        "depth": outcome.depth,
        "delta_star": outcome.delta_star,
    });
    let mut content = serde_json::to_string_pretty(&record).expect("static record");
    content.push('\n');
    emit(&args.common, &file, &content)?;
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<i32, CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let reports = verify::run_all();
    let mut content = String::new();
    let mut failed = 0usize;
    for report in &reports {
        let status = if report.passed { "PASS" } else { "FAIL" };
        if !report.passed {
            failed += 1;
        }
        let _ = writeln!(
            content,
            "[{status}] {}: {} ({:.2}s)",
            report.name,
            report.detail,
            report.elapsed.as_secs_f64()
        );
    }
    let _ = writeln!(
        content,
        "{}/{} checks passed",
        reports.len() - failed,
        reports.len()
    );
    emit(&args.common, &file, &content)?;
    Ok(if failed == 0 { 0 } else { 1 })
}
