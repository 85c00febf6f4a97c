//! `noma-lab` command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when `validate`
//! finds a failing check.

pub mod config;
pub mod csv;
pub mod presets;
pub mod svg;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::constellation::Constellation;
use crate::detection::Detector;
use crate::montecarlo::{run_sweep_with_workers, SweepConfig, DEFAULT_MAX_SYMBOLS, DEFAULT_TARGET_ERRORS};
use crate::superposition::{
    compose, dmin_16qam, dmin_general, dmin_qpsk, optimal_alpha, optimal_alpha_numeric, PowerSplit,
};
use crate::validation::{run_all, ValidationOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;

/// Environment variable consulted when no seed is given.
pub const SEED_ENV: &str = "NOMA_LAB_SEED";
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(name = "noma-lab", version, about = "Two-user power-domain NOMA link simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a BER sweep and write it as CSV (and optionally SVG).
    Sweep(SweepArgs),
    /// Tabulate composite minimum distance against α and report the optimum.
    Analyze(AnalyzeArgs),
    /// Run the statistical self-checks.
    Validate(ValidateArgs),
    /// Render an SVG plot from a sweep CSV.
    Plot(PlotArgs),
    /// List the built-in figure presets.
    Presets,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Built-in scenario (fig2 … fig7).
    #[arg(long)]
    preset: Option<String>,
    /// key = value configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also render the CSV to this SVG file.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    detector: Option<Detector>,
    #[arg(long = "target-errors")]
    target_errors: Option<u64>,
    #[arg(long = "max-symbols")]
    max_symbols: Option<u64>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[arg(long, default_value = "qpsk")]
    constellation: String,
    #[arg(long = "alpha-step", default_value_t = 0.01)]
    alpha_step: f64,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Channel draws per γ.
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[arg(long)]
    csv: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    title: Option<String>,
}

/// Entry point used by the binary: reads the seed fallback from the environment.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let env_seed = std::env::var(SEED_ENV).ok();
    run_with_env(args, env_seed.as_deref(), out, err)
}

/// As [`run`] with an explicit value for the seed environment variable.
pub fn run_with_env<I, T>(args: I, env_seed: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Sweep(args) => cmd_sweep(&args, env_seed, out, err),
        Command::Analyze(args) => cmd_analyze(&args, out),
        Command::Validate(args) => cmd_validate(&args, env_seed, out),
        Command::Plot(args) => cmd_plot(&args),
        Command::Presets => cmd_presets(out),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn parse_seed(s: &str, source: &str) -> Result<u64, String> {
    s.trim().parse().map_err(|_| format!("invalid seed '{s}' from {source}"))
}

fn parse_count<T: std::str::FromStr>(s: &str, key: &str) -> Result<T, String> {
    s.trim().parse().map_err(|_| format!("invalid value '{s}' for {key}"))
}

struct SweepPlan {
    cfg: SweepConfig,
    workers: usize,
    out: Option<PathBuf>,
    svg: Option<PathBuf>,
}

fn plan_sweep(args: &SweepArgs, env_seed: Option<&str>) -> Result<SweepPlan, String> {
    let file: BTreeMap<String, String> = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            config::parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => BTreeMap::new(),
    };

    let preset_name = args.preset.clone().or_else(|| file.get("preset").cloned());
    let preset = match &preset_name {
        Some(name) => Some(
            presets::preset(name)
                .ok_or_else(|| format!("unknown preset '{name}' (available: {})", presets::PRESET_NAMES.join(", ")))?,
        ),
        None => None,
    };

    let constellation = match (file.get("constellation"), &preset) {
        (Some(c), _) => c.to_ascii_lowercase(),
        (None, Some(p)) => p.constellation.to_string(),
        (None, None) => return Err("either --preset or a config defining constellation is required".into()),
    };
    let grid = |key: &str, fallback: Option<Vec<f64>>, parse: fn(&str) -> Result<Vec<f64>, String>| match file.get(key)
    {
        Some(v) => parse(v).map_err(|e| format!("{key}: {e}")),
        None => fallback.ok_or_else(|| format!("config is missing '{key}'")),
    };
    let gammas = grid("gammas", preset.as_ref().map(|p| vec![p.gamma]), config::parse_list)?;
    let alphas = grid("alphas", preset.as_ref().map(|p| p.alphas.clone()), config::parse_list)?;
    let snr_db = grid("snr-db", preset.as_ref().map(|p| p.snr_db.clone()), config::parse_grid)?;

    let detector = match (args.detector, file.get("detector")) {
        (Some(d), _) => d,
        (None, Some(d)) => d.parse()?,
        (None, None) => preset.as_ref().map_or(Detector::Ml, |p| p.detector),
    };
    let seed = match (args.seed, file.get("seed"), env_seed) {
        (Some(s), _, _) => s,
        (None, Some(s), _) => parse_seed(s, "config")?,
        (None, None, Some(s)) => parse_seed(s, SEED_ENV)?,
        (None, None, None) => DEFAULT_SEED,
    };
    let target = match (args.target_errors, file.get("target-errors")) {
        (Some(v), _) => v,
        (None, Some(v)) => parse_count(v, "target-errors")?,
        (None, None) => DEFAULT_TARGET_ERRORS,
    };
    let max_symbols = match (args.max_symbols, file.get("max-symbols")) {
        (Some(v), _) => v,
        (None, Some(v)) => parse_count(v, "max-symbols")?,
        (None, None) => DEFAULT_MAX_SYMBOLS,
    };
    let workers = match (args.workers, file.get("workers")) {
        (Some(v), _) => v,
        (None, Some(v)) => parse_count(v, "workers")?,
        (None, None) => std::thread::available_parallelism().map_or(1, usize::from),
    };
    if workers == 0 {
        return Err("workers must be at least 1".into());
    }
    let out = args.out.clone().or_else(|| file.get("out").map(PathBuf::from));
    let svg = args.svg.clone().or_else(|| file.get("svg").map(PathBuf::from));

    let cfg = SweepConfig::new(&constellation, &gammas, &alphas, &snr_db, detector, seed)
        .and_then(|c| c.with_limits(max_symbols, target))
        .map_err(|e| e.to_string())?;
    Ok(SweepPlan { cfg, workers, out, svg })
}

/// Writes `contents` next to `path` and renames it into place.
fn write_atomic(path: &Path, contents: &str) -> Result<(), String> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    tmp.persist(path).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    Ok(())
}

fn cmd_sweep(
    args: &SweepArgs,
    env_seed: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, String> {
    let plan = plan_sweep(args, env_seed)?;
    let started = Instant::now();
    let curves = run_sweep_with_workers(&plan.cfg, plan.workers).map_err(|e| e.to_string())?;
    let table = csv::to_csv(&curves);
    let rows: usize = curves.iter().map(|c| c.points.len()).sum();

    let csv_text = match &plan.out {
        Some(path) => {
            write_atomic(path, &table)?;
            let _ = writeln!(err, "wrote {rows} rows to {} in {:.1}s", path.display(), started.elapsed().as_secs_f64());
            std::fs::read_to_string(path).map_err(|e| format!("cannot read back {}: {e}", path.display()))?
        }
        None => {
            out.write_all(table.as_bytes()).map_err(|e| e.to_string())?;
            table
        }
    };
    if let Some(svg_path) = &plan.svg {
        let title = args.preset.clone().unwrap_or_else(|| plan.cfg.constellation_name.clone());
        render_svg(&csv_text, &title, svg_path)?;
    }
    Ok(EXIT_OK)
}

fn render_svg(csv_text: &str, title: &str, path: &Path) -> Result<(), String> {
    let rows = csv::parse_csv(csv_text)?;
    write_atomic(path, &svg::render(&rows, title))
}

fn cmd_plot(args: &PlotArgs) -> Result<i32, String> {
    let text = std::fs::read_to_string(&args.csv).map_err(|e| format!("cannot read {}: {e}", args.csv.display()))?;
    let title = args.title.clone().unwrap_or_else(|| args.csv.display().to_string());
    render_svg(&text, &title, &args.out)?;
    Ok(EXIT_OK)
}

fn cmd_presets(out: &mut dyn Write) -> Result<i32, String> {
    for name in presets::PRESET_NAMES {
        let p = presets::preset(name).expect("listed preset");
        let alphas: Vec<String> = p.alphas.iter().map(|&a| csv::format_g10(a)).collect();
        let _ = writeln!(
            out,
            "{name}: {} gamma={} (coefficient correlation {}) alphas=[{}] snr={}..{} dB",
            p.constellation,
            p.gamma,
            csv::format_g10(2.0 * p.gamma / (1.0 + p.gamma * p.gamma)),
            alphas.join(", "),
            p.snr_db[0],
            p.snr_db[p.snr_db.len() - 1]
        );
    }
    Ok(EXIT_OK)
}

/// One line of the `analyze` table, on the raw integer-grid alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisRow {
    pub alpha: f64,
    pub dmin_closed_form: f64,
    pub dmin_enumerated: f64,
    pub coincident_pairs: usize,
    pub distinct_points: usize,
}

impl AnalysisRow {
    pub fn agrees(&self, tol: f64) -> bool {
        (self.dmin_closed_form - self.dmin_enumerated).abs() <= tol
    }
}

/// α grid `0.5, 0.5 + step, …` below 1, each value rounded to 1e−12.
pub fn alpha_grid(step: f64) -> Vec<f64> {
    (0..).map(|k| ((0.5 + k as f64 * step) * 1e12).round() / 1e12).take_while(|&a| a < 1.0 - 1e-12).collect()
}

pub fn analysis_rows(name: &str, step: f64) -> Result<Vec<AnalysisRow>, String> {
    let (raw, closed_form): (Constellation, fn(f64) -> crate::Result<f64>) = match name {
        "qpsk" => (Constellation::qpsk_unnormalized(), dmin_qpsk),
        "16qam" => (Constellation::qam16_unnormalized(), dmin_16qam),
        other => return Err(crate::Error::UnknownConstellation(other.to_string()).to_string()),
    };
    if !(step > 0.0 && step < 0.5) {
        return Err(format!("alpha-step must be in (0, 0.5), got {step}"));
    }
    alpha_grid(step)
        .into_iter()
        .map(|alpha| {
            let split = PowerSplit::new(alpha).map_err(|e| e.to_string())?;
            let s = compose(&raw, split);
            Ok(AnalysisRow {
                alpha,
                dmin_closed_form: closed_form(alpha).map_err(|e| e.to_string())?,
                dmin_enumerated: dmin_general(&raw, alpha).map_err(|e| e.to_string())?,
                coincident_pairs: s.coincident_pairs(),
                distinct_points: s.distinct_points(),
            })
        })
        .collect()
}

fn cmd_analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<i32, String> {
    let name = args.constellation.to_ascii_lowercase();
    let rows = analysis_rows(&name, args.alpha_step)?;
    let base = Constellation::by_name(&name).map_err(|e| e.to_string())?;
    let _ = writeln!(out, "# {name}: composite minimum distance on the raw integer grid");
    let _ = writeln!(out, "alpha,dmin_closed_form,dmin_enumerated,agree,coincident_pairs,distinct_points");
    for r in &rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            csv::format_g10(r.alpha),
            csv::format_g10(r.dmin_closed_form),
            csv::format_g10(r.dmin_enumerated),
            if r.agrees(1e-9) { "yes" } else { "no" },
            r.coincident_pairs,
            r.distinct_points
        );
    }
    let optimum = optimal_alpha(&base);
    let numeric = optimal_alpha_numeric(&base);
    let raw_dmin = dmin_general(&raw_of(&name), optimum).map_err(|e| e.to_string())?;
    let _ = writeln!(out, "optimal_alpha,{}", csv::format_g10(optimum));
    let _ = writeln!(out, "optimal_alpha_numeric,{numeric:.9}");
    let _ = writeln!(out, "dmin_at_optimum,{}", csv::format_g10(raw_dmin));
    Ok(EXIT_OK)
}

fn raw_of(name: &str) -> Constellation {
    match name {
        "qpsk" => Constellation::qpsk_unnormalized(),
        _ => Constellation::qam16_unnormalized(),
    }
}

fn cmd_validate(args: &ValidateArgs, env_seed: Option<&str>, out: &mut dyn Write) -> Result<i32, String> {
    if args.samples < 1000 {
        return Err("samples must be at least 1000".into());
    }
    let seed = match (args.seed, env_seed) {
        (Some(s), _) => s,
        (None, Some(s)) => parse_seed(s, SEED_ENV)?,
        (None, None) => DEFAULT_SEED,
    };
    let opts = ValidationOptions { samples: args.samples, seed, ..Default::default() };
    let checks = run_all(&opts);
    for c in &checks {
        let _ = writeln!(out, "[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(out, "{} checks, {failed} failed", checks.len());
    Ok(if failed == 0 { EXIT_OK } else { EXIT_VALIDATION })
}
