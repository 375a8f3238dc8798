//! `somqe` command-line driver.
//!
//! Parameter precedence is: command-line flags, then the JSON file given with
//! `--config`, then built-in defaults. The seed additionally falls back to
//! the `SOMQE_SEED` environment variable before the built-in default.
//!
//! Every command writes a `run-manifest.json` into its output directory. The
//! manifest can be passed back with `--config` to repeat the run.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analysis::{emit_report, run_series, ReportFormat, SeriesResult, TrainingMode};
use crate::error::{Error, Result};
use crate::features::ExtractionStrategy;
use crate::imaging::{generate_series, ImageFormat, SeriesKind, SeriesManifest, SeriesSpec};
use crate::som::{LatticeUnits, SomConfig};

pub const SEED_ENV: &str = "SOMQE_SEED";
pub const RUN_MANIFEST_FILE: &str = "run-manifest.json";

/// Upper bound on the bench command's training plus scoring time.
pub const BENCH_BUDGET_MS: f64 = 60_000.0;

pub const EXIT_OK: i32 = 0;
pub const EXIT_BENCH_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_FORMAT: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "somqe",
    version,
    about = "Quantization error of a self-organizing map as a change indicator for image series",
    after_help = "Exit codes: 0 success, 1 bench over budget, 2 input or configuration error, \
                  3 I/O error, 4 malformed file.\n\
                  Seed precedence: --seed, then the config file, then $SOMQE_SEED, then 1."
)]
pub struct Cli {
    /// JSON config file (or a previous run-manifest.json) supplying defaults
    /// for any flag not given on the command line.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate one synthetic image series and its manifest.
    Generate(GenerateArgs),
    /// Score a generated series and write CSV/JSON/SVG reports.
    Analyze(AnalyzeArgs),
    /// Generate, analyze and report all five series, plus an r² summary.
    Replicate(ReplicateArgs),
    /// Time training and scoring on a random-contrast series.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeriesArgs {
    /// Series kind.
    #[arg(long, value_enum)]
    pub kind: Option<SeriesKind>,
    /// Image width in pixels [default: 792].
    #[arg(long)]
    pub width: Option<usize>,
    /// Image height in pixels [default: 777].
    #[arg(long)]
    pub height: Option<usize>,
    /// Comma-separated change per image, in percentage points of image area
    /// [default per kind: random-white 0,10,22.5,35,47.5,60; random-black 0,20,30;
    /// checker-count 8,16,..,72; checker-size 2,4,..,18; central-square 1,2,4,8,16,32].
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub deltas: Option<Vec<f64>>,
    /// Foreground percentage of the reference image for random kinds [default: 20].
    #[arg(long)]
    pub baseline: Option<f64>,
    /// Cells per side for checker kinds [default: 5 for checker-count, 3 for checker-size].
    #[arg(long)]
    pub cells: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SomArgs {
    /// Map rows [default: 4].
    #[arg(long)]
    pub rows: Option<usize>,
    /// Map columns [default: 4].
    #[arg(long)]
    pub cols: Option<usize>,
    /// Initial neighborhood radius in lattice units [default: 1.2].
    #[arg(long)]
    pub radius: Option<f64>,
    /// Initial learning rate, in (0, 1] [default: 0.2].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Training iterations [default: 10000].
    #[arg(long)]
    pub iters: Option<u64>,
    /// Lattice coordinates for the neighborhood radius [default: normalized].
    #[arg(long, value_enum)]
    pub lattice: Option<LatticeUnits>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyName {
    Patch,
    PixelScalar,
    PixelPosition,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisArgs {
    /// Feature extraction strategy [default: patch].
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyName>,
    /// Patch side for the patch strategy [default: 4].
    #[arg(long)]
    pub patch: Option<usize>,
    /// Training mode [default: reference-trained].
    #[arg(long, value_enum)]
    pub mode: Option<TrainingMode>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    /// Seed for pixel placement.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "series")]
    pub out: PathBuf,
    /// Image file format.
    #[arg(long, value_enum, default_value = "pgm")]
    pub format: ImageFormat,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Series directory or its series.json manifest.
    pub series: PathBuf,
    #[command(flatten)]
    pub som: SomArgs,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    /// Seed for map initialization and sampling.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for reports.
    #[arg(long, default_value = "reports")]
    pub out: PathBuf,
    /// Comma-separated report formats.
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "csv,json,svg"
    )]
    pub format: Vec<ReportFormat>,
    /// Leave wall times out of the CSV and JSON reports.
    #[arg(long)]
    pub no_timings: bool,
}

#[derive(Debug, Args)]
pub struct ReplicateArgs {
    // Applied to all five series; per-kind defaults fill the rest.
    #[command(flatten)]
    pub series: SeriesArgs,
    #[command(flatten)]
    pub som: SomArgs,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    /// Seed for both pixel placement and map training.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "replicate")]
    pub out: PathBuf,
    /// Comma-separated report formats.
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "csv,json,svg"
    )]
    pub format: Vec<ReportFormat>,
    /// Image file format for the generated series.
    #[arg(long, value_enum, default_value = "pgm")]
    pub image_format: ImageFormat,
    /// Do not write the generated images to disk.
    #[arg(long)]
    pub skip_images: bool,
    /// Include wall times in the CSV and JSON reports (makes them
    /// run-dependent).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Number of images.
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    /// Image width in pixels [default: 792].
    #[arg(long)]
    pub width: Option<usize>,
    /// Image height in pixels [default: 777].
    #[arg(long)]
    pub height: Option<usize>,
    #[command(flatten)]
    pub som: SomArgs,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for the timing report and run manifest.
    #[arg(long, default_value = "bench")]
    pub out: PathBuf,
}

/// Shape of the `--config` JSON file. Every field is optional.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub series: SeriesArgs,
    pub som: SomArgs,
    pub analysis: AnalysisArgs,
}

impl ConfigFile {
    /// Reads a config file, or the `resolved` block of a run manifest.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        let value = match value.get("resolved") {
            Some(resolved) => resolved.clone(),
            None => value,
        };
        serde_json::from_value(value).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// Record of one invocation, written as `run-manifest.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<PathBuf>,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub timestamp_unix: u64,
    pub version: String,
    /// Fully resolved parameters; loadable with `--config`.
    pub resolved: ConfigFile,
    /// Command-specific outcome (timings, r² table, files written).
    pub outcome: serde_json::Value,
}

impl RunManifest {
    fn new(command: &str, ctx: &Context, seed: u64, out: &Path, resolved: ConfigFile) -> Self {
        RunManifest {
            command: command.to_string(),
            config_path: ctx.config_path.clone(),
            seed,
            output_dir: out.to_path_buf(),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            version: env!("CARGO_PKG_VERSION").to_string(),
            resolved,
            outcome: serde_json::Value::Null,
        }
    }

    fn write(&self) -> Result<PathBuf> {
        write_json(&self.output_dir.join(RUN_MANIFEST_FILE), self)
    }
}

struct Context {
    config_path: Option<PathBuf>,
    file: ConfigFile,
}

impl Context {
    fn seed(&self, flag: Option<u64>) -> Result<u64> {
        if let Some(seed) = flag.or(self.file.seed) {
            return Ok(seed);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
            Err(_) => Ok(SomConfig::DEFAULT_SEED),
        }
    }

    fn series(&self, flags: &SeriesArgs) -> SeriesArgs {
        let f = &self.file.series;
        SeriesArgs {
            kind: flags.kind.or(f.kind),
            width: flags.width.or(f.width),
            height: flags.height.or(f.height),
            deltas: flags.deltas.clone().or_else(|| f.deltas.clone()),
            baseline: flags.baseline.or(f.baseline),
            cells: flags.cells.or(f.cells),
        }
    }

    fn som(&self, flags: &SomArgs) -> SomArgs {
        let f = &self.file.som;
        SomArgs {
            rows: Some(flags.rows.or(f.rows).unwrap_or(SomConfig::DEFAULT_ROWS)),
            cols: Some(flags.cols.or(f.cols).unwrap_or(SomConfig::DEFAULT_COLS)),
            radius: Some(
                flags
                    .radius
                    .or(f.radius)
                    .unwrap_or(SomConfig::DEFAULT_RADIUS),
            ),
            alpha: Some(
                flags
                    .alpha
                    .or(f.alpha)
                    .unwrap_or(SomConfig::DEFAULT_LEARNING_RATE),
            ),
            iters: Some(
                flags
                    .iters
                    .or(f.iters)
                    .unwrap_or(SomConfig::DEFAULT_ITERATIONS),
            ),
            lattice: Some(flags.lattice.or(f.lattice).unwrap_or_default()),
        }
    }

    fn analysis(&self, flags: &AnalysisArgs) -> AnalysisArgs {
        let f = &self.file.analysis;
        AnalysisArgs {
            strategy: Some(flags.strategy.or(f.strategy).unwrap_or(StrategyName::Patch)),
            patch: Some(
                flags
                    .patch
                    .or(f.patch)
                    .unwrap_or(ExtractionStrategy::DEFAULT_PATCH),
            ),
            mode: Some(flags.mode.or(f.mode).unwrap_or_default()),
        }
    }
}

fn som_config(args: &SomArgs, seed: u64, dim: usize) -> SomConfig {
    let d = SomConfig::with_dim(dim);
    SomConfig {
        rows: args.rows.unwrap_or(d.rows),
        cols: args.cols.unwrap_or(d.cols),
        initial_radius: args.radius.unwrap_or(d.initial_radius),
        initial_learning_rate: args.alpha.unwrap_or(d.initial_learning_rate),
        iterations: args.iters.unwrap_or(d.iterations),
        lattice: args.lattice.unwrap_or(d.lattice),
        seed,
        dim,
    }
}

fn strategy(args: &AnalysisArgs) -> ExtractionStrategy {
    match args.strategy.unwrap_or(StrategyName::Patch) {
        StrategyName::Patch => ExtractionStrategy::Patch {
            k: args.patch.unwrap_or(ExtractionStrategy::DEFAULT_PATCH),
        },
        StrategyName::PixelScalar => ExtractionStrategy::PixelScalar,
        StrategyName::PixelPosition => ExtractionStrategy::PixelPosition,
    }
}

/// Builds a spec for `kind`, overriding defaults with whatever `args` sets.
fn series_spec(kind: SeriesKind, args: &SeriesArgs, seed: u64) -> SeriesSpec {
    let d = SeriesSpec::new(kind);
    SeriesSpec {
        kind,
        width: args.width.unwrap_or(d.width),
        height: args.height.unwrap_or(d.height),
        deltas: args.deltas.clone().unwrap_or(d.deltas),
        baseline_density: args.baseline.unwrap_or(d.baseline_density),
        cells: args.cells.unwrap_or(d.cells),
        seed,
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<PathBuf> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let text = serde_json::to_string_pretty(value).expect("serializable") + "\n";
    fs::write(path, text).map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("somqe: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Input(_) => EXIT_INPUT,
        Error::Io { .. } => EXIT_IO,
        Error::Format(_) => EXIT_FORMAT,
    }
}

pub fn run(cli: Cli) -> Result<i32> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let ctx = Context {
        config_path: cli.config.clone(),
        file,
    };
    match cli.command {
        Command::Generate(args) => cmd_generate(&ctx, args),
        Command::Analyze(args) => cmd_analyze(&ctx, args),
        Command::Replicate(args) => cmd_replicate(&ctx, args),
        Command::Bench(args) => cmd_bench(&ctx, args),
    }
}

fn cmd_generate(ctx: &Context, args: GenerateArgs) -> Result<i32> {
    let seed = ctx.seed(args.seed)?;
    let series = ctx.series(&args.series);
    let kind = series
        .kind
        .ok_or_else(|| Error::Config("generate needs --kind".into()))?;
    let spec = series_spec(kind, &series, seed);
    let generated = generate_series(&spec)?;
    let manifest = generated.write(&args.out, args.format)?;

    let mut run = RunManifest::new(
        "generate",
        ctx,
        seed,
        &args.out,
        ConfigFile {
            seed: Some(seed),
            series: SeriesArgs {
                kind: Some(kind),
                width: Some(spec.width),
                height: Some(spec.height),
                deltas: Some(spec.deltas.clone()),
                baseline: Some(spec.baseline_density),
                cells: Some(spec.cells),
            },
            ..Default::default()
        },
    );
    run.outcome = serde_json::json!({
        "format": args.format,
        "files": manifest.images.iter().filter_map(|e| e.file.clone()).collect::<Vec<_>>(),
    });
    run.write()?;
    println!(
        "wrote {} {} images to {}",
        manifest.count,
        kind,
        args.out.display()
    );
    Ok(EXIT_OK)
}

fn cmd_analyze(ctx: &Context, args: AnalyzeArgs) -> Result<i32> {
    let seed = ctx.seed(args.seed)?;
    let som_args = ctx.som(&args.som);
    let analysis = ctx.analysis(&args.analysis);
    let strategy = strategy(&analysis);
    let som = som_config(&som_args, seed, strategy.dim());

    let manifest_path = SeriesManifest::locate(&args.series);
    if !manifest_path.is_file() {
        return Err(Error::Input(format!(
            "no series manifest at {}",
            manifest_path.display()
        )));
    }
    let manifest = SeriesManifest::load(&manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let images = manifest.load_images(dir)?;
    let mode = analysis.mode.unwrap_or_default();
    let mut result =
        run_series(&images, &manifest.deltas(), som, strategy, mode)?.with_spec(&manifest.spec);
    result.series_id = format!("{}-{}", manifest.kind, mode.name());
    let total_ms = result.total_ms;
    if args.no_timings {
        result = result.without_timings();
    }
    let files = emit_report(&result, &args.out, &args.format)?;

    let mut run = RunManifest::new(
        "analyze",
        ctx,
        seed,
        &args.out,
        ConfigFile {
            seed: Some(seed),
            series: SeriesArgs::default(),
            som: som_args,
            analysis,
        },
    );
    run.outcome = serde_json::json!({
        "series": manifest_path,
        "fit": result.fit,
        "total_ms": total_ms,
        "files": files,
    });
    run.write()?;
    print_result(&result);
    Ok(EXIT_OK)
}

fn print_result(result: &SeriesResult) {
    println!(
        "{} ({}, {})",
        result.series_id,
        result.mode.name(),
        result.strategy.label()
    );
    for r in &result.records {
        println!(
            "  image {:>2}  delta {:>6}%  qe {:.6}",
            r.index, r.delta_pct, r.qe
        );
    }
    let fit = &result.fit;
    println!(
        "  fit: qe = {:.6} + {:.6} * delta, r2 = {:.4}{}",
        fit.intercept,
        fit.slope,
        fit.r2,
        if fit.degenerate { " (degenerate)" } else { "" }
    );
}

/// One row of the replicate summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub series_id: String,
    pub images: usize,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub degenerate: bool,
    pub strictly_increasing: bool,
}

impl SummaryRow {
    pub fn from_result(result: &SeriesResult) -> Self {
        SummaryRow {
            series_id: result.series_id.clone(),
            images: result.records.len(),
            slope: result.fit.slope,
            intercept: result.fit.intercept,
            r2: result.fit.r2,
            degenerate: result.fit.degenerate,
            strictly_increasing: result.is_strictly_increasing(),
        }
    }
}

pub fn render_summary_csv(rows: &[SummaryRow]) -> String {
    let mut out =
        String::from("series_id,images,slope,intercept,r2,degenerate,strictly_increasing\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.series_id, r.images, r.slope, r.intercept, r.r2, r.degenerate, r.strictly_increasing
        ));
    }
    out
}

/// Settings shared by all five series of a replicate run.
#[derive(Debug, Clone)]
pub struct ReplicateOptions {
    /// Overrides applied to every kind; `kind` is ignored.
    pub series: SeriesArgs,
    pub som: SomConfig,
    pub strategy: ExtractionStrategy,
    pub mode: TrainingMode,
    pub formats: Vec<ReportFormat>,
    /// Where to write images, if at all.
    pub image_format: Option<ImageFormat>,
    /// Keep wall times in the CSV and JSON reports.
    pub timings: bool,
}

/// Generates, analyzes and reports the five default series into `out`,
/// then writes `summary.csv` and `summary.json`. Reports are written as each
/// series finishes, so a failure keeps the earlier outputs.
pub fn replicate(out: &Path, opts: &ReplicateOptions) -> Result<Vec<SeriesResult>> {
    create_dir(out)?;
    let reports = out.join("reports");
    let mut results = Vec::new();
    for kind in SeriesKind::ALL {
        let spec = series_spec(kind, &opts.series, opts.som.seed);
        let generated = generate_series(&spec)?;
        if let Some(format) = opts.image_format {
            generated.write(out.join("series").join(kind.name()), format)?;
        }
        let result = run_series(
            &generated.images,
            generated.deltas(),
            opts.som,
            opts.strategy,
            opts.mode,
        )?
        .with_spec(&spec);
        let reported = if opts.timings {
            result.clone()
        } else {
            result.clone().without_timings()
        };
        emit_report(&reported, &reports, &opts.formats)?;
        results.push(result);
    }
    let rows: Vec<SummaryRow> = results.iter().map(SummaryRow::from_result).collect();
    let summary_csv = out.join("summary.csv");
    fs::write(&summary_csv, render_summary_csv(&rows)).map_err(|e| Error::io(&summary_csv, e))?;
    write_json(&out.join("summary.json"), &rows)?;
    Ok(results)
}

fn cmd_replicate(ctx: &Context, args: ReplicateArgs) -> Result<i32> {
    let seed = ctx.seed(args.seed)?;
    let mut series = ctx.series(&args.series);
    if series.kind.is_some() {
        eprintln!("somqe: replicate runs every kind; ignoring --kind");
        series.kind = None;
    }
    let som_args = ctx.som(&args.som);
    let analysis = ctx.analysis(&args.analysis);
    let strategy = strategy(&analysis);
    let opts = ReplicateOptions {
        series: series.clone(),
        som: som_config(&som_args, seed, strategy.dim()),
        strategy,
        mode: analysis.mode.unwrap_or_default(),
        formats: args.format.clone(),
        image_format: (!args.skip_images).then_some(args.image_format),
        timings: args.timings,
    };
    let results = replicate(&args.out, &opts)?;

    for result in &results {
        print_result(result);
    }
    let rows: Vec<SummaryRow> = results.iter().map(SummaryRow::from_result).collect();
    println!(
        "\n{:<16} {:>6} {:>10} {:>8}",
        "series", "images", "r2", "rising"
    );
    for r in &rows {
        println!(
            "{:<16} {:>6} {:>10.4} {:>8}",
            r.series_id, r.images, r.r2, r.strictly_increasing
        );
    }

    let timings: serde_json::Map<String, serde_json::Value> = results
        .iter()
        .map(|r| (r.series_id.clone(), serde_json::json!(r.total_ms)))
        .collect();
    let mut run = RunManifest::new(
        "replicate",
        ctx,
        seed,
        &args.out,
        ConfigFile {
            seed: Some(seed),
            series,
            som: som_args,
            analysis,
        },
    );
    run.outcome = serde_json::json!({ "summary": rows, "total_ms": timings });
    run.write()?;
    Ok(EXIT_OK)
}

/// Timing of one bench run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    pub count: usize,
    pub width: usize,
    pub height: usize,
    pub generation_ms: f64,
    pub per_image_ms: Vec<f64>,
    /// Training plus scoring of every image.
    pub total_ms: f64,
    pub budget_ms: f64,
    pub pass: bool,
}

/// Generates `count` random-white images (evenly spaced deltas from 0 to
/// 60) and times a reference-trained run over them.
pub fn bench(
    count: usize,
    width: usize,
    height: usize,
    som: SomConfig,
    strategy: ExtractionStrategy,
    mode: TrainingMode,
) -> Result<BenchReport> {
    if count == 0 {
        return Err(Error::Config("bench needs at least one image".into()));
    }
    let deltas: Vec<f64> = if count == 1 {
        vec![0.0]
    } else {
        (0..count)
            .map(|i| 60.0 * i as f64 / (count - 1) as f64)
            .collect()
    };
    let spec = SeriesSpec {
        width,
        height,
        deltas,
        seed: som.seed,
        ..SeriesSpec::new(SeriesKind::RandomWhite)
    };
    let gen_start = Instant::now();
    let generated = generate_series(&spec)?;
    let generation_ms = gen_start.elapsed().as_secs_f64() * 1e3;

    let start = Instant::now();
    let result = run_series(&generated.images, generated.deltas(), som, strategy, mode)?;
    let total_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(BenchReport {
        count,
        width,
        height,
        generation_ms,
        per_image_ms: result.records.iter().map(|r| r.ms.unwrap_or(0.0)).collect(),
        total_ms,
        budget_ms: BENCH_BUDGET_MS,
        pass: total_ms < BENCH_BUDGET_MS,
    })
}

fn cmd_bench(ctx: &Context, args: BenchArgs) -> Result<i32> {
    let seed = ctx.seed(args.seed)?;
    let series = ctx.series(&SeriesArgs {
        width: args.width,
        height: args.height,
        ..Default::default()
    });
    let width = series.width.unwrap_or(SeriesSpec::DEFAULT_WIDTH);
    let height = series.height.unwrap_or(SeriesSpec::DEFAULT_HEIGHT);
    let som_args = ctx.som(&args.som);
    let analysis = ctx.analysis(&args.analysis);
    let strategy = strategy(&analysis);
    let som = som_config(&som_args, seed, strategy.dim());
    let mode = analysis.mode.unwrap_or_default();

    let report = bench(args.count, width, height, som, strategy, mode)?;
    for (i, ms) in report.per_image_ms.iter().enumerate() {
        println!("image {:>3}: {:>9.2} ms", i + 1, ms);
    }
    println!(
        "{} images at {}x{}: generation {:.1} ms, training + scoring {:.1} ms (budget {:.0} ms): {}",
        report.count,
        width,
        height,
        report.generation_ms,
        report.total_ms,
        report.budget_ms,
        if report.pass { "PASS" } else { "FAIL" }
    );

    create_dir(&args.out)?;
    write_json(&args.out.join("bench.json"), &report)?;
    let mut run = RunManifest::new(
        "bench",
        ctx,
        seed,
        &args.out,
        ConfigFile {
            seed: Some(seed),
            series: SeriesArgs {
                width: Some(width),
                height: Some(height),
                ..Default::default()
            },
            som: som_args,
            analysis,
        },
    );
    run.outcome = serde_json::to_value(&report).expect("serializable");
    run.write()?;
    Ok(if report.pass {
        EXIT_OK
    } else {
        EXIT_BENCH_FAILED
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn help_lists_defaults() {
        let help = Cli::command()
            .find_subcommand_mut("replicate")
            .unwrap()
            .render_long_help()
            .to_string();
        for needle in ["792", "777", "1.2", "0.2", "10000", "[default: 4]"] {
            assert!(help.contains(needle), "missing {needle} in\n{help}");
        }
    }

    #[test]
    fn flags_override_config() {
        let ctx = Context {
            config_path: None,
            file: ConfigFile {
                seed: Some(9),
                som: SomArgs {
                    rows: Some(3),
                    iters: Some(50),
                    ..Default::default()
                },
                ..Default::default()
            },
        };
        let merged = ctx.som(&SomArgs {
            rows: Some(5),
            ..Default::default()
        });
        assert_eq!(merged.rows, Some(5));
        assert_eq!(merged.iters, Some(50));
        assert_eq!(merged.radius, Some(1.2));
        assert_eq!(ctx.seed(Some(3)).unwrap(), 3);
        assert_eq!(ctx.seed(None).unwrap(), 9);
    }

    #[test]
    fn config_rejects_unknown_fields() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"som": {"rowz": 3}}"#).unwrap();
        assert!(matches!(ConfigFile::load(&path), Err(Error::Config(_))));
    }
}
