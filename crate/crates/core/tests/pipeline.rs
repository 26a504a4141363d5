mod common;

use std::{fs, path::Path};

use common::*;
use hybridevs::{
    harness::{self, NamedConfig, RunOptions},
    metrics, raw_io,
    restore::{self, restore_stages, DemosaicMode, DpcMode},
    simulator::{self, DatasetOptions, DefectMode, DefectModel},
    Error, PatternSpec, RawImage, RestoreConfig,
};
use rand::Rng;

fn write_labels(dir: &Path, n: usize, w: usize, h: usize) {
    fs::create_dir_all(dir).unwrap();
    for i in 0..n {
        let scene = simulator::smooth_scene(w, h, 300 + i as u64);
        raw_io::save_rgb(dir.join(format!("img{i}.png")), &scene).unwrap();
    }
}

fn tree_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for sub in ["inputs", "labels", "masks"] {
        let mut names: Vec<_> = fs::read_dir(dir.join(sub))
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        names.sort();
        for p in names {
            out.push((
                p.strip_prefix(dir).unwrap().display().to_string(),
                fs::read(&p).unwrap(),
            ));
        }
    }
    out.push((
        "manifest.json".into(),
        fs::read(dir.join("manifest.json")).unwrap(),
    ));
    out
}

#[test]
fn dataset_generation_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let labels = tmp.path().join("labels");
    write_labels(&labels, 3, 40, 28);
    let opts = DatasetOptions {
        spec: PatternSpec::default(),
        model: DefectModel::new(0.01, DefectMode::UniformRandom, 99).unwrap(),
        augment: true,
    };
    let a = simulator::generate_dataset(&labels, &tmp.path().join("a"), &opts).unwrap();
    let b = simulator::generate_dataset(&labels, &tmp.path().join("b"), &opts).unwrap();
    assert_eq!(a.scenes.len(), 3);
    assert_eq!(a, b);
    let files = tree_bytes(&tmp.path().join("a"));
    assert_eq!(files.iter().filter(|(n, _)| n.ends_with(".bin")).count(), 3);
    assert_eq!(files, tree_bytes(&tmp.path().join("b")));

    // masks and inputs agree with the in-memory simulation
    for s in &a.scenes {
        let root = tmp.path().join("a");
        let raw = raw_io::load_raw(root.join(&s.raw), s.width, s.height).unwrap();
        let events = raw_io::load_mask(root.join(s.events.as_ref().unwrap())).unwrap();
        let defects = raw_io::load_mask(root.join(s.defects.as_ref().unwrap())).unwrap();
        assert_eq!(events, opts.spec.event_mask(s.width, s.height));
        let label = raw_io::load_rgb(root.join(&s.label)).unwrap();
        let clean = simulator::mosaic(&label, &opts.spec);
        for y in 0..s.height {
            for x in 0..s.width {
                if !defects.get(x, y) {
                    assert_eq!(raw.get(x, y), clean.get(x, y));
                }
            }
        }
    }

    let empty = tmp.path().join("empty");
    fs::create_dir_all(&empty).unwrap();
    let m = simulator::generate_dataset(&empty, &tmp.path().join("c"), &opts).unwrap();
    assert!(m.scenes.is_empty());
}

#[test]
fn defect_count_formula() {
    let spec = PatternSpec::default();
    let raw = RawImage::filled(100, 100, 500).unwrap();
    let events = spec.event_mask(100, 100);
    assert_eq!(events.count(), 1250);
    for mode in [
        DefectMode::StuckLow,
        DefectMode::StuckHigh,
        DefectMode::UniformRandom,
    ] {
        let model = DefectModel::new(0.01, mode, 3).unwrap();
        let (out, mask) = simulator::inject_defects(&raw, &events, &model).unwrap();
        assert_eq!(mask.count(), 88);
        for y in 0..100 {
            for x in 0..100 {
                if events.get(x, y) {
                    assert!(!mask.get(x, y));
                }
                if !mask.get(x, y) {
                    assert_eq!(out.get(x, y), 500);
                }
            }
        }
    }
}

#[test]
fn median_detector_example() {
    let spec = PatternSpec::default();
    let mut raw = RawImage::from_fn(16, 16, |x, y| if spec.is_event(x, y) { 0 } else { 100 });
    raw.set(8, 8, 1023);
    let events = spec.event_mask(16, 16);
    let (out, flagged) = restore::dpc_median_deviation(&raw, &events, &spec, 64, 4).unwrap();
    assert!(flagged.get(8, 8));
    assert_eq!(flagged.count(), 1);
    assert_eq!(out.get(8, 8), 100);
}

#[test]
fn restore_output_is_local() {
    let spec = PatternSpec::default();
    let mut rng = rng(21);
    let (w, h) = (64, 64);
    let base = RawImage::from_fn(w, h, |x, y| {
        if spec.is_event(x, y) {
            0
        } else {
            (300 + (x * 5 + y * 3) % 200) as u16
        }
    });
    for config in [
        RestoreConfig::default(),
        RestoreConfig {
            demosaic: DemosaicMode::Bilinear,
            dpc: DpcMode::ZeroMask,
            radius: 2,
            ..Default::default()
        },
    ] {
        let reach = config.influence_radius();
        let before = restore::restore(&base, &config).unwrap();
        for _ in 0..10 {
            let (px, py) = (rng.gen_range(0..w), rng.gen_range(0..h));
            if spec.is_event(px, py) {
                continue;
            }
            let mut raw = base.clone();
            raw.set(px, py, rng.gen_range(0..=1023));
            let after = restore::restore(&raw, &config).unwrap();
            for y in 0..h {
                for x in 0..w {
                    if x.abs_diff(px).max(y.abs_diff(py)) > reach {
                        assert_eq!(
                            before.pixel(x, y),
                            after.pixel(x, y),
                            "({x},{y}) from ({px},{py})"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn parallel_matches_serial() {
    let mut rng = rng(22);
    let raw = random_raw(&mut rng, 75, 53);
    let config = RestoreConfig::default();
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let wide = rayon::ThreadPoolBuilder::new()
        .num_threads(8)
        .build()
        .unwrap();
    let a = serial.install(|| restore_stages(&raw, &config).unwrap());
    let b = wide.install(|| restore_stages(&raw, &config).unwrap());
    assert_eq!(a.corrected, b.corrected);
    assert_eq!(a.inpainted, b.inpainted);
    assert_eq!(a.bayer, b.bayer);
    assert_eq!(a.rgb, b.rgb);
}

#[test]
fn event_positions_never_read() {
    // whatever sits at event positions, the output is the same
    let spec = PatternSpec::default();
    let mut rng = rng(23);
    let raw = random_raw(&mut rng, 32, 24);
    let mut other = raw.clone();
    for y in 0..24 {
        for x in 0..32 {
            if spec.is_event(x, y) {
                other.set(x, y, rng.gen_range(0..=1023));
            }
        }
    }
    let config = RestoreConfig::default();
    assert_eq!(
        restore::restore(&raw, &config).unwrap(),
        restore::restore(&other, &config).unwrap()
    );
}

#[test]
fn score_set_contract() {
    let tmp = tempfile::tempdir().unwrap();
    let labels = tmp.path().join("labels");
    write_labels(&labels, 3, 24, 20);
    let report = metrics::score_set(&labels, &labels).unwrap();
    assert_eq!(report.psnr, 100.0);
    assert_eq!(report.ssim, 1.0);
    assert_eq!(report.images.len(), 3);

    let results = tmp.path().join("results");
    fs::create_dir_all(&results).unwrap();
    for i in 0..2 {
        fs::copy(
            labels.join(format!("img{i}.png")),
            results.join(format!("img{i}.png")),
        )
        .unwrap();
    }
    match metrics::score_set(&results, &labels) {
        Err(Error::MissingResult(stem)) => assert_eq!(stem, "img2"),
        other => panic!("{other:?}"),
    }
    fs::copy(labels.join("img2.png"), results.join("img2.png")).unwrap();
    fs::copy(labels.join("img2.png"), results.join("stray.png")).unwrap();
    assert!(
        matches!(metrics::score_set(&results, &labels), Err(Error::ExtraResult(s)) if s == "stray")
    );
    fs::remove_file(results.join("stray.png")).unwrap();

    let small = simulator::smooth_scene(30, 20, 1);
    raw_io::save_rgb(results.join("img1.png"), &small).unwrap();
    let err = metrics::score_set(&results, &labels).unwrap_err();
    assert_eq!(err.kind(), "DimensionMismatch");
    assert!(err.to_string().contains("img1.png"), "{err}");

    // aggregate is the mean of per-image values
    let scene = simulator::smooth_scene(24, 20, 300);
    let mut noisy = scene.clone();
    noisy.set_pixel(3, 3, [0, 0, 0]);
    raw_io::save_rgb(results.join("img0.png"), &noisy).unwrap();
    raw_io::save_rgb(
        results.join("img1.png"),
        &simulator::smooth_scene(24, 20, 301),
    )
    .unwrap();
    let report = metrics::score_set(&results, &labels).unwrap();
    let mean = report.images.iter().map(|s| s.psnr).sum::<f64>() / 3.0;
    assert!((report.psnr - mean).abs() < 1e-12);
    assert!(report.images[0].psnr < 100.0);
}

#[test]
fn experiment_ranks_and_replays() {
    let tmp = tempfile::tempdir().unwrap();
    let labels = tmp.path().join("labels");
    write_labels(&labels, 4, 64, 48);
    let data = tmp.path().join("data");
    let opts = DatasetOptions {
        spec: PatternSpec::default(),
        model: DefectModel::default(),
        augment: false,
    };
    simulator::generate_dataset(&labels, &data, &opts).unwrap();
    let manifest = data.join("manifest.json");
    let record = harness::run_experiment(
        &manifest,
        &harness::default_configs(),
        &RunOptions::default(),
    )
    .unwrap();
    let board = &record.report.leaderboard;
    assert_eq!(board.len(), 2);
    assert_eq!(board.iter().map(|e| e.rank).collect::<Vec<_>>(), vec![1, 2]);

    for r in &record.report.results {
        assert!(
            r.metrics.psnr > 30.0 && r.metrics.psnr < 100.0,
            "{}: {}",
            r.name,
            r.metrics.psnr
        );
        eprintln!(
            "{}: {:.4} dB / {:.4}",
            r.name, r.metrics.psnr, r.metrics.ssim
        );
    }

    let again = harness::replay(&record).unwrap();
    assert_eq!(again.report, record.report);

    // per-scene failures name the scene
    fs::write(data.join("inputs/img2.bin"), [0u8; 10]).unwrap();
    let err = harness::run_experiment(
        &manifest,
        &harness::default_configs(),
        &RunOptions::default(),
    )
    .unwrap_err();
    assert!(err.to_string().contains("img2"), "{err}");
    assert_eq!(err.kind(), "LengthMismatch");

    let bad = vec![NamedConfig {
        name: "bad".into(),
        config: RestoreConfig {
            threshold: 0,
            ..Default::default()
        },
    }];
    assert!(matches!(
        harness::run_experiment(&manifest, &bad, &RunOptions::default()),
        Err(Error::InvalidConfig(_))
    ));
}
