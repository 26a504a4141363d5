//! Experiment harness: timing, ranked leaderboards and reproducible runs.
//!
//! Timing follows a fixed protocol. Input is generated and held in memory
//! before the clock starts, one warm-up restoration is discarded, and the
//! reported figure is the median of the timed repeats. Timings are CPU
//! figures for this classical pipeline; they are not comparable to GPU
//! timings of learned models.

use std::{
    cmp::Ordering,
    fmt::Write as _,
    path::{Path, PathBuf},
    time::Instant,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{
    error::{Error, Result},
    metrics::{score_images, MetricReport},
    raw_io::{load_raw, load_rgb, Manifest, RawImage},
    restore::{restore, DemosaicMode, RestoreConfig},
    simulator::{simulate, smooth_scene, DefectModel},
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Frame size of the timing benchmark (width, height).
pub const BENCH_SIZE: (usize, usize) = (1920, 1080);

/// Header printed above every timing table.
pub const TIMING_NOTE: &str =
    "timings: median wall-clock seconds per 1080x1920 frame on this CPU; not comparable to GPU timings";

// ---------------------------------------------------------------------------
// leaderboard

/// One method's scores, as fed to [`leaderboard`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Submission {
    pub name: String,
    pub psnr: f64,
    pub ssim: f64,
    pub time_seconds: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardEntry {
    pub rank: usize,
    pub name: String,
    pub psnr: f64,
    pub ssim: f64,
    pub time_seconds: Option<f64>,
}

/// PSNR descending, then SSIM descending, then time ascending (untimed
/// last), then name.
fn rank_order(a: &Submission, b: &Submission) -> Ordering {
    b.psnr
        .total_cmp(&a.psnr)
        .then_with(|| b.ssim.total_cmp(&a.ssim))
        .then_with(|| match (a.time_seconds, b.time_seconds) {
            (Some(x), Some(y)) => x.total_cmp(&y),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => Ordering::Equal,
        })
        .then_with(|| a.name.cmp(&b.name))
}

/// Sorts submissions and assigns ranks 1..=N.
pub fn leaderboard(mut entries: Vec<Submission>) -> Vec<LeaderboardEntry> {
    entries.sort_by(rank_order);
    entries
        .into_iter()
        .enumerate()
        .map(|(i, s)| LeaderboardEntry {
            rank: i + 1,
            name: s.name,
            psnr: s.psnr,
            ssim: s.ssim,
            time_seconds: s.time_seconds,
        })
        .collect()
}

/// Plain-text table with columns rank, name, PSNR, SSIM, Time (s).
pub fn format_table(entries: &[LeaderboardEntry]) -> String {
    let name_w = entries
        .iter()
        .map(|e| e.name.len())
        .chain(std::iter::once(4))
        .max()
        .unwrap_or(4);
    let mut out = String::new();
    if entries.iter().any(|e| e.time_seconds.is_some()) {
        let _ = writeln!(out, "# {TIMING_NOTE}");
    }
    let _ = writeln!(
        out,
        "{:>4}  {:<name_w$}  {:>9}  {:>7}  {:>9}",
        "rank", "name", "PSNR", "SSIM", "Time (s)"
    );
    for e in entries {
        let time = e
            .time_seconds
            .map(|t| format!("{t:.3}"))
            .unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "{:>4}  {:<name_w$}  {:>9.4}  {:>7.4}  {:>9}",
            e.rank, e.name, e.psnr, e.ssim, time
        );
    }
    out
}

// ---------------------------------------------------------------------------
// timing

/// Source of timestamps in seconds; swapped out in tests.
pub trait Clock {
    fn now(&mut self) -> f64;
}

pub struct WallClock {
    origin: Instant,
}

impl Default for WallClock {
    fn default() -> Self {
        Self {
            origin: Instant::now(),
        }
    }
}

impl Clock for WallClock {
    fn now(&mut self) -> f64 {
        self.origin.elapsed().as_secs_f64()
    }
}

/// Median; the mean of the two middle values for even counts.
pub fn median(samples: &[f64]) -> f64 {
    assert!(!samples.is_empty(), "median of no samples");
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub median_seconds: f64,
    pub samples: Vec<f64>,
}

/// Runs `work` once untimed, then `repeats` timed runs.
pub fn bench_with(clock: &mut impl Clock, repeats: usize, mut work: impl FnMut()) -> BenchResult {
    assert!(repeats >= 1, "at least one timed repeat");
    work();
    let samples: Vec<f64> = (0..repeats)
        .map(|_| {
            let start = clock.now();
            work();
            clock.now() - start
        })
        .collect();
    BenchResult {
        median_seconds: median(&samples),
        samples,
    }
}

/// Seeded synthetic raw frame used for timing.
pub fn bench_input(
    config: &RestoreConfig,
    width: usize,
    height: usize,
    seed: u64,
) -> Result<RawImage> {
    let label = smooth_scene(width, height, seed);
    let model = DefectModel {
        seed,
        ..DefectModel::default()
    };
    Ok(simulate(&label, &config.spec, &model)?.input)
}

/// Times [`restore`] on a pre-built frame.
pub fn bench_restore(
    clock: &mut impl Clock,
    raw: &RawImage,
    config: &RestoreConfig,
    repeats: usize,
) -> Result<BenchResult> {
    config.validate()?;
    let mut failure = None;
    let result = bench_with(clock, repeats, || {
        if let Err(e) = restore(raw, config) {
            failure.get_or_insert(e);
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(result),
    }
}

/// Median seconds of `repeats` restorations of a seeded `width`×`height`
/// frame after one warm-up run.
pub fn bench_time(
    config: &RestoreConfig,
    width: usize,
    height: usize,
    repeats: usize,
    seed: u64,
) -> Result<BenchResult> {
    let raw = bench_input(config, width, height, seed)?;
    bench_restore(&mut WallClock::default(), &raw, config, repeats)
}

// ---------------------------------------------------------------------------
// experiments

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedConfig {
    pub name: String,
    #[serde(flatten)]
    pub config: RestoreConfig,
}

impl NamedConfig {
    /// Short stable digest of the configuration (not the name).
    pub fn hash(&self) -> String {
        config_hash(&self.config)
    }
}

pub fn config_hash(config: &RestoreConfig) -> String {
    let json = serde_json::to_vec(config).expect("config serialises");
    Sha256::digest(&json)
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Bilinear and gradient-corrected demosaic with otherwise default settings.
pub fn default_configs() -> Vec<NamedConfig> {
    [
        ("bilinear", DemosaicMode::Bilinear),
        ("gradient-corrected", DemosaicMode::GradientCorrected),
    ]
    .into_iter()
    .map(|(name, demosaic)| NamedConfig {
        name: name.into(),
        config: RestoreConfig {
            demosaic,
            ..RestoreConfig::default()
        },
    })
    .collect()
}

pub fn load_configs(path: &Path) -> Result<Vec<NamedConfig>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let configs: Vec<NamedConfig> =
        serde_json::from_str(&text).map_err(|e| Error::from(e).in_file(path))?;
    if configs.is_empty() {
        return Err(Error::InvalidConfig("no restore configs given".into()));
    }
    for c in &configs {
        c.config.validate()?;
    }
    Ok(configs)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Timed repeats per config on a 1080×1920 frame; 0 disables timing.
    pub bench_repeats: usize,
    /// Seed of the timing input.
    pub bench_seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigResult {
    pub name: String,
    pub config_hash: String,
    pub config: RestoreConfig,
    pub metrics: MetricReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing: Option<BenchResult>,
}

/// Deterministic outcome of an experiment: equal inputs give byte-equal JSON
/// as long as timing is disabled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub tool_version: String,
    pub dataset_seed: Option<u64>,
    pub scenes: usize,
    pub leaderboard: Vec<LeaderboardEntry>,
    pub results: Vec<ConfigResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub os: String,
    pub arch: String,
    pub available_cpus: usize,
    pub threads: usize,
}

impl Environment {
    pub fn capture() -> Self {
        Self {
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            available_cpus: std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1),
            threads: rayon::current_num_threads(),
        }
    }
}

/// Everything needed to re-run an experiment, plus the run's environment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub tool_version: String,
    pub manifest: PathBuf,
    pub configs: Vec<NamedConfig>,
    pub config_hashes: Vec<String>,
    pub options: RunOptions,
    pub dataset_seed: Option<u64>,
    pub environment: Environment,
    pub report: ExperimentReport,
}

impl RunRecord {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::from(e).in_file(path))
    }
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Restores every scene of the manifest under each config, scores against
/// the labels, optionally times each config, and ranks the configs.
pub fn run_experiment(
    manifest_path: &Path,
    configs: &[NamedConfig],
    options: &RunOptions,
) -> Result<RunRecord> {
    if configs.is_empty() {
        return Err(Error::InvalidConfig("no restore configs given".into()));
    }
    for c in configs {
        c.config.validate()?;
    }
    let manifest = Manifest::load(manifest_path)?;
    let root = manifest_path.parent().unwrap_or(Path::new("."));

    let scenes = manifest
        .scenes
        .par_iter()
        .map(|s| {
            let raw = load_raw(root.join(&s.raw), s.width, s.height);
            let label = load_rgb(root.join(&s.label));
            raw.and_then(|r| label.map(|l| (s.name.clone(), r, l)))
                .map_err(|e| Error::Scene {
                    scene: s.name.clone(),
                    source: Box::new(e),
                })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut results = Vec::with_capacity(configs.len());
    for named in configs {
        let images = scenes
            .par_iter()
            .map(|(name, raw, label)| {
                restore(raw, &named.config)
                    .and_then(|out| score_images(name, &out, label))
                    .map_err(|e| Error::Scene {
                        scene: name.clone(),
                        source: Box::new(e),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        let timing = if options.bench_repeats > 0 {
            // serialised on the calling thread, after the scoring pass
            let (w, h) = BENCH_SIZE;
            Some(bench_time(
                &named.config,
                w,
                h,
                options.bench_repeats,
                options.bench_seed,
            )?)
        } else {
            None
        };
        results.push(ConfigResult {
            name: named.name.clone(),
            config_hash: named.hash(),
            config: named.config.clone(),
            metrics: MetricReport::from_images(images),
            timing,
        });
    }

    let board = leaderboard(
        results
            .iter()
            .map(|r| Submission {
                name: r.name.clone(),
                psnr: r.metrics.psnr,
                ssim: r.metrics.ssim,
                time_seconds: r.timing.as_ref().map(|t| t.median_seconds),
            })
            .collect(),
    );

    let report = ExperimentReport {
        tool_version: TOOL_VERSION.into(),
        dataset_seed: manifest.seed,
        scenes: scenes.len(),
        leaderboard: board,
        results,
    };
    Ok(RunRecord {
        tool_version: TOOL_VERSION.into(),
        manifest: manifest_path.to_path_buf(),
        config_hashes: configs.iter().map(NamedConfig::hash).collect(),
        configs: configs.to_vec(),
        options: options.clone(),
        dataset_seed: manifest.seed,
        environment: Environment::capture(),
        report,
    })
}

/// Re-executes the experiment described by a record.
pub fn replay(record: &RunRecord) -> Result<RunRecord> {
    run_experiment(&record.manifest, &record.configs, &record.options)
}
