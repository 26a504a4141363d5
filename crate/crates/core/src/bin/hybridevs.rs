use std::{
    fs,
    path::{Path, PathBuf},
    process::ExitCode,
};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use hybridevs::{
    harness::{self, NamedConfig, RunOptions},
    metrics,
    raw_io::{self, Manifest},
    restore::{restore, DemosaicMode, DpcMode, RestoreConfig, DEFAULT_RADIUS, DEFAULT_THRESHOLD},
    simulator::{self, DatasetOptions, DefectMode, DefectModel},
    Error, PatternSpec,
};
use rayon::prelude::*;

#[derive(Parser)]
#[command(
    name = "hybridevs",
    version,
    about = "HybridEVS raw simulation, restoration and scoring"
)]
struct Cli {
    /// Pattern file (4 lines of R/G/B/E); built-in default otherwise.
    #[arg(long, global = true)]
    pattern: Option<PathBuf>,

    /// Base seed for everything random.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Write the command's JSON result here.
    #[arg(long, global = true)]
    json: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate raw inputs, labels and masks from a directory of RGB PNGs.
    Simulate(SimulateArgs),
    /// Restore raw frames to RGB PNGs.
    Restore(RestoreArgs),
    /// Score result PNGs against labels.
    Score(ScoreArgs),
    /// Time restoration of a synthetic 1080x1920 frame.
    Bench(BenchArgs),
    /// Restore, score, time and rank a set of configs on a dataset.
    Run(RunArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.001)]
    density: f64,
    /// stuck-low, stuck-high or uniform-random
    #[arg(long, default_value = "uniform-random")]
    mode: DefectMode,
    /// Random rotation/flip of each label before sampling.
    #[arg(long)]
    augment: bool,
}

#[derive(Args, Clone)]
struct PipelineArgs {
    /// none, zero-mask, median or both
    #[arg(long, default_value = "both")]
    dpc: DpcMode,
    /// bilinear or gradient-corrected
    #[arg(long, default_value = "gradient-corrected")]
    demosaic: DemosaicMode,
    /// Median-deviation threshold in 10-bit units.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: u16,
    /// Neighborhood radius for DPC and inpainting.
    #[arg(long, default_value_t = DEFAULT_RADIUS)]
    radius: usize,
    /// Skip event inpainting.
    #[arg(long)]
    no_inpaint: bool,
}

impl PipelineArgs {
    fn config(&self, spec: PatternSpec) -> anyhow::Result<RestoreConfig> {
        let config = RestoreConfig {
            spec,
            dpc: self.dpc,
            threshold: self.threshold,
            demosaic: self.demosaic,
            radius: self.radius,
            inpaint: !self.no_inpaint,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
struct RestoreArgs {
    /// A .bin file or a directory of .bin files.
    #[arg(long, required_unless_present = "manifest")]
    input: Option<PathBuf>,
    /// Dataset manifest supplying files and dimensions instead of --input.
    #[arg(long, conflicts_with = "input")]
    manifest: Option<PathBuf>,
    #[arg(long, required_unless_present = "manifest")]
    width: Option<usize>,
    #[arg(long, required_unless_present = "manifest")]
    height: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    results: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    /// JSON report path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV mirror of the report.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = harness::BENCH_SIZE.0)]
    width: usize,
    #[arg(long, default_value_t = harness::BENCH_SIZE.1)]
    height: usize,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// JSON list of named restore configs; bilinear vs gradient-corrected by default.
    #[arg(long)]
    configs: Option<PathBuf>,
    /// Directory for report.json and run_record.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Timed repeats per config on a 1080x1920 frame (0 = no timing).
    #[arg(long, default_value_t = 0)]
    bench_repeats: usize,
    /// Re-execute a previous run record instead.
    #[arg(long, conflicts_with_all = ["configs"])]
    replay: Option<PathBuf>,
}

fn load_spec(path: Option<&Path>) -> anyhow::Result<PatternSpec> {
    Ok(match path {
        Some(p) => PatternSpec::load(p)?,
        None => PatternSpec::default(),
    })
}

fn write_json_opt<T: serde::Serialize>(value: &T, path: Option<&Path>) -> anyhow::Result<()> {
    if let Some(p) = path {
        harness::write_json(value, p)?;
    }
    Ok(())
}

fn ensure_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("{}: cannot create directory", dir.display()))
}

fn cmd_simulate(cli: &Cli, args: &SimulateArgs) -> anyhow::Result<()> {
    let spec = load_spec(cli.pattern.as_deref())?;
    let model = DefectModel::new(args.density, args.mode, cli.seed)?;
    let manifest = simulator::generate_dataset(
        &args.labels,
        &args.out,
        &DatasetOptions {
            spec,
            model,
            augment: args.augment,
        },
    )?;
    println!(
        "simulated {} scenes into {}",
        manifest.scenes.len(),
        args.out.display()
    );
    write_json_opt(&manifest, cli.json.as_deref())
}

fn cmd_restore(cli: &Cli, args: &RestoreArgs) -> anyhow::Result<()> {
    let spec = load_spec(cli.pattern.as_deref())?;
    let config = args.pipeline.config(spec)?;
    ensure_dir(&args.out)?;

    // (name, path, width, height)
    let jobs: Vec<(String, PathBuf, usize, usize)> = if let Some(m) = &args.manifest {
        let manifest = Manifest::load(m)?;
        let root = m.parent().unwrap_or(Path::new("."));
        manifest
            .scenes
            .into_iter()
            .map(|s| (s.name, root.join(s.raw), s.width, s.height))
            .collect()
    } else {
        let input = args.input.as_ref().expect("required by clap");
        let (w, h) = (args.width.unwrap(), args.height.unwrap());
        let files = if input.is_dir() {
            list_bins(input)?
        } else {
            vec![input.clone()]
        };
        files
            .into_iter()
            .map(|p| {
                let name = p
                    .file_stem()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .into_owned();
                (name, p, w, h)
            })
            .collect()
    };

    let written = jobs
        .par_iter()
        .map(|(name, path, w, h)| -> hybridevs::Result<PathBuf> {
            let raw = raw_io::load_raw(path, *w, *h)?;
            let rgb = restore(&raw, &config).map_err(|e| e.in_file(path))?;
            let out = args.out.join(format!("{name}.png"));
            raw_io::save_rgb(&out, &rgb)?;
            Ok(out)
        })
        .collect::<hybridevs::Result<Vec<_>>>()?;
    println!(
        "restored {} frames into {}",
        written.len(),
        args.out.display()
    );
    write_json_opt(&written, cli.json.as_deref())
}

fn list_bins(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("{}", dir.display()))? {
        let p = entry?.path();
        if p.is_file() && p.extension().is_some_and(|e| e.eq_ignore_ascii_case("bin")) {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

fn cmd_score(cli: &Cli, args: &ScoreArgs) -> anyhow::Result<()> {
    let report = metrics::score_set(&args.results, &args.labels)?;
    println!(
        "{} images  PSNR {:.4} dB  SSIM {:.4}  (PSNR capped at {} dB for identical images)",
        report.images.len(),
        report.psnr,
        report.ssim,
        metrics::PSNR_CAP
    );
    for p in [args.out.as_deref(), cli.json.as_deref()]
        .into_iter()
        .flatten()
    {
        report.write_json(p)?;
    }
    if let Some(p) = &args.csv {
        let f = fs::File::create(p).with_context(|| format!("{}", p.display()))?;
        report.write_csv(std::io::BufWriter::new(f))?;
    }
    Ok(())
}

fn cmd_bench(cli: &Cli, args: &BenchArgs) -> anyhow::Result<()> {
    if args.repeats == 0 {
        bail!("InvalidConfig: --repeats must be at least 1");
    }
    let spec = load_spec(cli.pattern.as_deref())?;
    let config = args.pipeline.config(spec)?;
    let result = harness::bench_time(&config, args.width, args.height, args.repeats, cli.seed)?;
    let env = harness::Environment::capture();
    println!("# {}", harness::TIMING_NOTE);
    println!(
        "{}x{}  median {:.4} s over {} repeats  ({} threads, {} {})",
        args.height, args.width, result.median_seconds, args.repeats, env.threads, env.os, env.arch
    );
    #[derive(serde::Serialize)]
    struct BenchRecord<'a> {
        width: usize,
        height: usize,
        config_hash: String,
        config: &'a RestoreConfig,
        result: &'a harness::BenchResult,
        environment: harness::Environment,
    }
    write_json_opt(
        &BenchRecord {
            width: args.width,
            height: args.height,
            config_hash: harness::config_hash(&config),
            config: &config,
            result: &result,
            environment: env,
        },
        cli.json.as_deref(),
    )
}

fn cmd_run(cli: &Cli, args: &RunArgs) -> anyhow::Result<()> {
    let record = if let Some(path) = &args.replay {
        harness::replay(&harness::RunRecord::load(path)?)?
    } else {
        let mut configs: Vec<NamedConfig> = match &args.configs {
            Some(p) => harness::load_configs(p)?,
            None => harness::default_configs(),
        };
        if let Some(p) = &cli.pattern {
            let spec = PatternSpec::load(p)?;
            configs
                .iter_mut()
                .for_each(|c| c.config.spec = spec.clone());
        }
        let options = RunOptions {
            bench_repeats: args.bench_repeats,
            bench_seed: cli.seed,
        };
        harness::run_experiment(&args.manifest, &configs, &options)?
    };

    print!("{}", harness::format_table(&record.report.leaderboard));
    if let Some(dir) = &args.out {
        ensure_dir(dir)?;
        harness::write_json(&record.report, &dir.join("report.json"))?;
        harness::write_json(&record, &dir.join("run_record.json"))?;
    }
    write_json_opt(&record.report, cli.json.as_deref())
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .context("thread pool")?;
    }
    match &cli.command {
        Command::Simulate(a) => cmd_simulate(cli, a),
        Command::Restore(a) => cmd_restore(cli, a),
        Command::Score(a) => cmd_score(cli, a),
        Command::Bench(a) => cmd_bench(cli, a),
        Command::Run(a) => cmd_run(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (kind, msg) = match e.downcast_ref::<Error>() {
                Some(err) => (err.kind(), err.to_string()),
                None => ("Error", format!("{e:#}")),
            };
            let msg = msg.replace('\n', " ");
            eprintln!("error[{kind}]: {msg}");
            ExitCode::FAILURE
        }
    }
}
