mod common;

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use wwr_core::mask::{BinaryMask, ClassConfig, LabelMap};
use wwr_core::preprocess::resize_nearest;
use wwr_core::stats::{dataset_stats, parse_stats_csv, stats_csv, wwr_bin, BINS};
use wwr_core::{compute_iou, compute_wwr, wwr_error, Error, ErrorMode, WwrRecord};

fn random_map(rng: &mut impl Rng, max: usize) -> LabelMap {
    let (w, h) = (rng.random_range(1..=max), rng.random_range(1..=max));
    let palette = [0u8, 1, 2, 2, 3, 9, 9, 150, 255];
    LabelMap::from_fn(w, h, |_, _| palette[rng.random_range(0..palette.len())])
}

#[test]
fn wwr_matches_pixel_tally() {
    let mut rng = common::rng(21);
    let cfg = ClassConfig::default();
    for i in 0..200 {
        let map = random_map(&mut rng, 64);
        let mut tally: HashMap<u8, u64> = HashMap::new();
        for y in 0..map.height() {
            for x in 0..map.width() {
                *tally.entry(map.get(x, y)).or_default() += 1;
            }
        }
        let (w, f) = (tally.get(&9).copied().unwrap_or(0), tally.get(&2).copied().unwrap_or(0));
        let r = compute_wwr(format!("m{i}"), &map, &cfg);
        assert_eq!((r.window_pixels, r.facade_pixels), (w, f));
        assert_eq!(r.wwr, (w + f > 0).then(|| w as f64 / (w + f) as f64));
    }
}

#[test]
fn wwr_is_invariant_under_integer_upscaling() {
    let mut rng = common::rng(22);
    let cfg = ClassConfig::default();
    for _ in 0..30 {
        let map = random_map(&mut rng, 30);
        let k = rng.random_range(2..5);
        let up = resize_nearest(&map, map.width() * k, map.height() * k).unwrap();
        assert_eq!(compute_wwr("a", &map, &cfg).wwr, compute_wwr("a", &up, &cfg).wwr);
    }
}

#[test]
fn iou_symmetry_and_monotonicity() {
    let mut rng = common::rng(23);
    for _ in 0..100 {
        let (w, h) = (rng.random_range(1..30), rng.random_range(1..30));
        let a = BinaryMask::from_fn(w, h, |_, _| rng.random_bool(0.4));
        let b = BinaryMask::from_fn(w, h, |_, _| rng.random_bool(0.4));
        let ab = compute_iou(&a, &b).unwrap();
        assert_eq!(ab, compute_iou(&b, &a).unwrap());
        assert!((0.0..=1.0).contains(&ab.iou));
        assert_eq!(compute_iou(&a, &a).unwrap().iou, 1.0);

        // Adding a pixel of `b` to the prediction cannot lower the score.
        if let Some(i) = (0..w * h).find(|&i| b.bits()[i] && !a.bits()[i]) {
            let grown = BinaryMask::from_fn(w, h, |x, y| a.get(x, y) || y * w + x == i);
            assert!(compute_iou(&grown, &b).unwrap().iou >= ab.iou);
        }
    }
}

#[test]
fn iou_one_third() {
    let a = BinaryMask::from_fn(4, 1, |x, _| x < 2);
    let b = BinaryMask::from_fn(4, 1, |x, _| (1..3).contains(&x));
    let r = compute_iou(&a, &b).unwrap();
    assert_eq!((r.intersection, r.union), (1, 3));
    assert_eq!(r.iou, 1.0 / 3.0);
    assert!(matches!(
        compute_iou(&a, &BinaryMask::empty(4, 2)),
        Err(Error::Shape { .. })
    ));
}

#[test]
fn error_summary_matches_recomputation() {
    let mut rng = common::rng(24);
    let mut pred = Vec::new();
    let mut truth = Vec::new();
    for i in 0..50 {
        let t = (rng.random_range(0..100u64), rng.random_range(0..100u64));
        let p = (rng.random_range(0..100u64), rng.random_range(0..100u64));
        truth.push(WwrRecord::from_counts(format!("img{i:02}"), t.0, t.1));
        pred.push(WwrRecord::from_counts(format!("img{i:02}"), p.0, p.1));
    }
    pred.push(WwrRecord::from_counts("empty", 0, 0));
    truth.push(WwrRecord::from_counts("empty", 3, 4));
    pred.shuffle(&mut rng);

    for mode in [ErrorMode::Absolute, ErrorMode::Relative] {
        let s = wwr_error(&pred, &truth, 0.1, mode).unwrap();
        let by_id: HashMap<_, _> = pred.iter().map(|r| (r.id.clone(), r.wwr)).collect();
        let errs: Vec<(f64, f64)> = truth
            .iter()
            .filter_map(|t| Some((by_id[&t.id]?, t.wwr?)))
            .map(|(p, t)| {
                let abs = (p - t).abs();
                let e = match mode {
                    ErrorMode::Absolute => abs,
                    ErrorMode::Relative if t == 0.0 => if abs == 0.0 { 0.0 } else { f64::INFINITY },
                    ErrorMode::Relative => abs / t,
                };
                (abs, e)
            })
            .collect();
        assert_eq!((s.n, s.n_excluded), (errs.len(), 1));
        let mean = errs.iter().map(|e| e.0).sum::<f64>() / errs.len() as f64;
        assert!((s.mean_abs_error - mean).abs() < 1e-12);
        let within = errs.iter().filter(|e| e.1 <= 0.1 + 1e-12).count() as f64 / errs.len() as f64;
        assert_eq!(s.fraction_within, within);
    }
}

#[test]
fn error_pairing_names_the_id() {
    let pred = [WwrRecord::from_counts("a", 1, 1), WwrRecord::from_counts("b", 1, 1)];
    let truth = [WwrRecord::from_counts("a", 1, 1), WwrRecord::from_counts("c", 1, 1)];
    let err = wwr_error(&pred, &truth, 0.1, ErrorMode::Absolute).unwrap_err();
    assert!(err.to_string().contains('b') || err.to_string().contains('c'), "{err}");
}

/// Bin by counting how many 0.01 steps fit under the ratio, in integers.
fn oracle_bin(w: u64, f: u64) -> usize {
    let total = w + f;
    (1..=BINS as u64).take_while(|k| 100 * w >= k * total).count().min(BINS - 1)
}

fn synthetic_corpus(seed: u64, n: usize) -> Vec<(WwrRecord, u64)> {
    let mut rng = common::rng(seed);
    (0..n)
        .map(|i| {
            let total = rng.random_range(100..5000u64);
            let facade = rng.random_range(0..=total / 2);
            let window = if i % 17 == 0 { 0 } else { rng.random_range(0..=total - facade) };
            let (window, facade) = if i % 41 == 0 { (0, 0) } else { (window, facade) };
            (WwrRecord::from_counts(format!("s{i:03}"), window, facade), total)
        })
        .collect()
}

#[test]
fn dataset_stats_match_recomputation() {
    let corpus = synthetic_corpus(25, 200);
    let stats = dataset_stats(&corpus).unwrap();

    let defined: Vec<(u64, u64)> = corpus
        .iter()
        .filter(|(r, _)| r.window_pixels + r.facade_pixels > 0)
        .map(|(r, _)| (r.window_pixels, r.facade_pixels))
        .collect();
    let mut hist = [0u64; BINS];
    for &(w, f) in &defined {
        hist[oracle_bin(w, f)] += 1;
        assert_eq!(wwr_bin(w, f), Some(oracle_bin(w, f)));
    }
    assert_eq!(stats.histogram, hist);
    assert_eq!(stats.n, 200);
    assert_eq!(stats.n_defined(), defined.len() as u64);

    let mut ratios: Vec<f64> = defined.iter().map(|&(w, f)| w as f64 / (w + f) as f64).collect();
    ratios.sort_by(f64::total_cmp);
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    assert!((stats.mean_wwr.unwrap() - mean).abs() < 1e-12);

    let peak = *hist.iter().max().unwrap();
    let mode_bin = hist.iter().position(|&c| c == peak).unwrap();
    assert!((stats.mode_wwr.unwrap() - (mode_bin as f64 + 0.5) / 100.0).abs() < 1e-12);

    for (s, (r, total)) in stats.per_image.iter().zip(&corpus) {
        assert_eq!(s.id, r.id);
        assert!((s.window_pct - 100.0 * r.window_pixels as f64 / *total as f64).abs() < 1e-12);
    }
}

#[test]
fn dataset_stats_ignore_order() {
    let corpus = synthetic_corpus(26, 200);
    let a = dataset_stats(&corpus).unwrap();
    let mut shuffled = corpus.clone();
    shuffled.shuffle(&mut common::rng(27));
    let b = dataset_stats(&shuffled).unwrap();
    assert_eq!(a.histogram, b.histogram);
    assert_eq!(a.mode_wwr, b.mode_wwr);
    assert!((a.mean_wwr.unwrap() - b.mean_wwr.unwrap()).abs() < 1e-12);
}

#[test]
fn stats_csv_golden_and_reparse() {
    let corpus = vec![
        (WwrRecord::from_counts("a", 1, 3), 10),
        (WwrRecord::from_counts("b,c", 2, 3), 8),
        (WwrRecord::from_counts("blank", 0, 0), 4),
        (WwrRecord::from_counts("d", 1, 2), 3),
    ];
    let stats = dataset_stats(&corpus).unwrap();
    let csv = stats_csv(&stats);
    let golden = include_str!("golden/stats.csv");
    assert_eq!(csv, golden);
    assert_eq!(parse_stats_csv(&csv).unwrap(), stats.per_image);
}
