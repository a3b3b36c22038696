//! End-to-end acceptance checks. Runs as a plain binary so every criterion
//! prints one PASS/FAIL line even under captured test output.

use std::collections::{BTreeMap, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wwr_core::mask::{fuse_labels, mask_from_label, rasterize_polygons, BinaryMask, ClassConfig, LabelMap};
use wwr_core::perspective::*;
use wwr_core::preprocess::{normalize, NormalizationParams};
use wwr_core::stats::{dataset_stats, BINS};
use wwr_core::synth::{facade_scene, SceneParams};
use wwr_core::{compute_iou, compute_wwr, Point, RasterImage, WwrRecord};

type Outcome = Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || {
        format!("took {:.2}s, limit {limit_s}s", elapsed.as_secs_f64())
    })
}

fn wwr_formula() -> Outcome {
    let mut r = rng(1);
    let cfg = ClassConfig::default();
    let palette = [0u8, 1, 2, 3, 5, 9, 42, 150, 255];
    let maps: Vec<LabelMap> = (0..1000)
        .map(|_| {
            let (w, h) = (r.random_range(1..=128), r.random_range(1..=128));
            let bias = r.random_range(0..palette.len());
            LabelMap::from_fn(w, h, |_, _| palette[if r.random_bool(0.3) { bias } else { r.random_range(0..palette.len()) }])
        })
        .collect();
    let start = Instant::now();
    for (i, map) in maps.iter().enumerate() {
        let got = compute_wwr(i.to_string(), map, &cfg);
        let mut tally = [0u64; 256];
        for y in 0..map.height() {
            for x in 0..map.width() {
                tally[map.get(x, y) as usize] += 1;
            }
        }
        let (w, f) = (tally[9], tally[2]);
        let want = if w + f == 0 { None } else { Some(w as f64 / (w + f) as f64) };
        ensure(got.window_pixels == w && got.facade_pixels == f && got.wwr == want, || {
            format!("map {i}: got {got:?}, tally {w}/{f}")
        })?;
    }
    within(start.elapsed(), 5.0)?;
    Ok(format!("1000 maps exact in {:.2}s", start.elapsed().as_secs_f64()))
}

fn iou_formula() -> Outcome {
    let mut r = rng(2);
    let pairs: Vec<(BinaryMask, BinaryMask)> = (0..1000)
        .map(|i| {
            let (w, h) = (r.random_range(1..=96), r.random_range(1..=96));
            if i % 50 == 0 {
                return (BinaryMask::empty(w, h), BinaryMask::empty(w, h));
            }
            let (pa, pb) = (r.random_range(0.0..0.6), r.random_range(0.0..0.6));
            let a = BinaryMask::from_fn(w, h, |_, _| r.random_bool(pa));
            let b = BinaryMask::from_fn(w, h, |_, _| r.random_bool(pb));
            (a, b)
        })
        .collect();
    let start = Instant::now();
    let mut empties = 0;
    for (i, (a, b)) in pairs.iter().enumerate() {
        let set = |m: &BinaryMask| -> HashSet<usize> { (0..m.bits().len()).filter(|&k| m.bits()[k]).collect() };
        let (sa, sb) = (set(a), set(b));
        let inter = sa.intersection(&sb).count() as u64;
        let union = sa.union(&sb).count() as u64;
        let want = if union == 0 { 1.0 } else { inter as f64 / union as f64 };
        empties += usize::from(union == 0);
        let got = compute_iou(a, b).map_err(|e| e.to_string())?;
        ensure(got.intersection == inter && got.union == union && got.iou == want, || {
            format!("pair {i}: got {got:?}, want {inter}/{union}")
        })?;
    }
    within(start.elapsed(), 5.0)?;
    Ok(format!("1000 pairs exact ({empties} empty/empty = 1) in {:.2}s", start.elapsed().as_secs_f64()))
}

/// Even-odd ray casting at a single point, half-open in y.
fn ray_cast(pts: &[Point], px: f64, py: f64) -> bool {
    let mut inside = false;
    let mut j = pts.len() - 1;
    for i in 0..pts.len() {
        let (lo, hi) = if pts[i].y <= pts[j].y { (pts[i], pts[j]) } else { (pts[j], pts[i]) };
        if lo.y <= py && py < hi.y && px < lo.x + (py - lo.y) * (hi.x - lo.x) / (hi.y - lo.y) {
            inside = !inside;
        }
        j = i;
    }
    inside
}

fn rasterizer_oracle() -> Outcome {
    let mut r = rng(3);
    let mut mismatches = 0usize;
    for k in 0..100 {
        let n = r.random_range(3..=12);
        let poly: Vec<Point> = (0..n)
            .map(|_| {
                let (x, y): (f64, f64) = (r.random_range(-6.0..70.0), r.random_range(-6.0..70.0));
                if k % 3 == 0 {
                    Point::new((2.0 * x).round() / 2.0, (2.0 * y).round() / 2.0)
                } else {
                    Point::new(x, y)
                }
            })
            .collect();
        let got = rasterize_polygons(std::slice::from_ref(&poly), 64, 64);
        for y in 0..64 {
            for x in 0..64 {
                mismatches += usize::from(got.get(x, y) != ray_cast(&poly, x as f64 + 0.5, y as f64 + 0.5));
            }
        }
    }
    ensure(mismatches == 0, || format!("{mismatches} mismatching pixels"))?;
    Ok("100 polygons, 0 mismatching pixels".into())
}

fn random_quad(r: &mut impl Rng) -> Quad {
    let scale = [1.0, 10.0, 100.0][r.random_range(0..3)];
    let (x0, y0) = (r.random_range(0.0..30.0) * scale, r.random_range(0.0..30.0) * scale);
    let (w, h): (f64, f64) = (r.random_range(2.0..40.0) * scale, r.random_range(2.0..40.0) * scale);
    let j = 0.2 * w.min(h);
    let mut jit = |x: f64, y: f64| Point::new(x + r.random_range(-j..j), y + r.random_range(-j..j));
    Quad::new([jit(x0, y0), jit(x0 + w, y0), jit(x0 + w, y0 + h), jit(x0, y0 + h)]).expect("valid quad")
}

fn homography_exactness() -> Outcome {
    let mut r = rng(4);
    let (mut worst_px, mut worst_id) = (0.0f64, 0.0f64);
    for _ in 0..500 {
        let (src, dst) = (random_quad(&mut r), random_quad(&mut r));
        let h = estimate_homography(&src, &dst).map_err(|e| e.to_string())?;
        for (s, d) in src.corners().iter().zip(dst.corners()) {
            let p = h.project(*s).ok_or("corner mapped to infinity")?;
            worst_px = worst_px.max(p.distance(d));
        }
        let prod = mat_mul(&h.matrix(), &h.inverse_matrix());
        for (i, row) in prod.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                worst_id = worst_id.max((v - f64::from(u8::from(i == j))).abs());
            }
        }
    }
    ensure(worst_px < 1e-6, || format!("corner error {worst_px:e} px"))?;
    ensure(worst_id < 1e-9, || format!("H*H^-1 deviates by {worst_id:e}"))?;
    Ok(format!("500 pairs: max corner error {worst_px:.1e} px, max |H*H^-1 - I| {worst_id:.1e}"))
}

fn mat_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    m
}

fn gradient(n: usize) -> RasterImage {
    let mut data = Vec::with_capacity(n * n * 3);
    for y in 0..n {
        for x in 0..n {
            let (fx, fy) = (x as f64 / (n - 1) as f64, y as f64 / (n - 1) as f64);
            data.extend([20.0 + 200.0 * fx, 30.0 + 180.0 * fy, 40.0 + 100.0 * (fx + fy)].map(|v| v.round() as u8));
        }
    }
    RasterImage::new(n, n, 3, data).unwrap()
}

fn mild_homography(r: &mut impl Rng, n: f64) -> Homography {
    let src = Quad::new([(0.0, 0.0), (n, 0.0), (n, n), (0.0, n)].map(Point::from)).unwrap();
    let j = 0.08 * n;
    let mut jit = |x: f64, y: f64| Point::new(x + r.random_range(-j..j), y + r.random_range(-j..j));
    let dst = Quad::new([jit(0.0, 0.0), jit(n, 0.0), jit(n, n), jit(0.0, n)]).unwrap();
    estimate_homography(&src, &dst).unwrap()
}

fn warp_round_trip() -> Outcome {
    let mut r = rng(5);
    let img = gradient(256);
    let h = mild_homography(&mut r, 256.0);
    let there = warp_image(&img, &h, 256, 256).map_err(|e| e.to_string())?;
    let back = warp_image(&there, &h.inverse().map_err(|e| e.to_string())?, 256, 256).map_err(|e| e.to_string())?;
    // Interior: pixels whose forward image lies at least 2 px inside the canvas.
    let (mut sum, mut n) = (0u64, 0u64);
    for y in 0..256 {
        for x in 0..256 {
            let p = h.project(Point::pixel_center(x, y)).unwrap();
            if (2.0..=254.0).contains(&p.x) && (2.0..=254.0).contains(&p.y) {
                for c in 0..3 {
                    sum += u64::from(img.pixel(x, y)[c].abs_diff(back.pixel(x, y)[c]));
                    n += 1;
                }
            }
        }
    }
    let mae = sum as f64 / n as f64;
    ensure(mae < 2.0, || format!("interior MAE {mae:.3}"))?;

    let mut violations = 0;
    for _ in 0..100 {
        let (w, hh) = (r.random_range(16..64), r.random_range(16..64));
        let classes: Vec<u8> = (0..r.random_range(1..5)).map(|_| r.random_range(0..=150)).collect();
        let (bw, bh) = (r.random_range(2..9), r.random_range(2..9));
        let map = LabelMap::from_fn(w, hh, |x, y| classes[(x / bw + 3 * (y / bh)) % classes.len()]);
        let hm = mild_homography(&mut r, w.min(hh) as f64);
        let out = warp_labels(&map, &hm, w, hh).map_err(|e| e.to_string())?;
        let allowed = map.class_set();
        // 255 is the out-of-view fill (ignore index), not a class.
        violations += out.class_set().iter().filter(|c| **c != 255 && !allowed.contains(c)).count();
    }
    ensure(violations == 0, || format!("{violations} new class values"))?;
    Ok(format!("interior MAE {mae:.3} over {} samples; 0 label violations in 100 cases", n))
}

fn normalization_constants() -> Outcome {
    let params = NormalizationParams::default();
    let red = normalize(&RasterImage::filled(8, 8, &[255, 0, 0]).unwrap(), &params).map_err(|e| e.to_string())?;
    let want = (1.0f64 - 0.485) / 0.229;
    let worst = red.plane(0).iter().map(|&v| (v as f64 - want).abs()).fold(0.0, f64::max);
    ensure(worst < 1e-5, || format!("red plane off by {worst:e}"))?;
    let mean_px = [0.485f64, 0.456, 0.406].map(|m| (m * 255.0).round() as u8);
    let flat = normalize(&RasterImage::filled(8, 8, &mean_px).unwrap(), &params).map_err(|e| e.to_string())?;
    let peak = flat.data().iter().map(|v| v.abs()).fold(0.0f32, f32::max);
    ensure(peak < 0.01, || format!("mean-colored image normalizes to {peak}"))?;
    Ok(format!("red R-plane error {worst:.1e}; mean-color |v| <= {peak:.4}"))
}

fn fusion_semantics() -> Outcome {
    let mut r = rng(7);
    let cfg = ClassConfig::default();
    for i in 0..100 {
        let (w, h) = (r.random_range(1..48), r.random_range(1..48));
        // Base maps carry every class except the window class.
        let base = LabelMap::from_fn(w, h, |_, _| loop {
            let c = if r.random_bool(0.1) { 255 } else { r.random_range(0..=150) };
            if c != cfg.window_class() {
                break c;
            }
        });
        let mask = BinaryMask::from_fn(w, h, |_, _| r.random_bool(0.3));
        let fused = fuse_labels(&base, &mask, &cfg).map_err(|e| e.to_string())?;
        ensure(mask_from_label(&fused, cfg.window_class()) == mask, || format!("case {i}: round trip differs"))?;
        ensure(fuse_labels(&fused, &mask, &cfg).map_err(|e| e.to_string())? == fused, || {
            format!("case {i}: second fusion differs")
        })?;
    }
    Ok("100 cases: exact round trip, idempotent".into())
}

fn dataset_statistics() -> Outcome {
    let mut r = rng(8);
    let corpus: Vec<(WwrRecord, u64)> = (0..200)
        .map(|i| {
            let total = r.random_range(500..20_000u64);
            let facade = r.random_range(0..=total / 2);
            let window = r.random_range(0..=(total - facade) / 2);
            let (window, facade) = if i % 37 == 5 { (0, 0) } else { (window, facade) };
            (WwrRecord::from_counts(format!("img{i:03}"), window, facade), total)
        })
        .collect();
    let stats = dataset_stats(&corpus).map_err(|e| e.to_string())?;

    let mut hist = [0u64; BINS];
    let mut ratios = Vec::new();
    for (rec, _) in &corpus {
        let (w, f) = (rec.window_pixels, rec.facade_pixels);
        if w + f == 0 {
            continue;
        }
        // Largest k with k/100 <= w/(w+f), by cross-multiplication.
        let k = (0..BINS as u64).rev().find(|k| k * (w + f) <= 100 * w).unwrap() as usize;
        hist[k] += 1;
        ratios.push(w as f64 / (w + f) as f64);
    }
    let mean = ratios.iter().rev().sum::<f64>() / ratios.len() as f64;
    let peak = *hist.iter().max().unwrap();
    let mode = (hist.iter().position(|&c| c == peak).unwrap() as f64 + 0.5) / 100.0;

    ensure(stats.histogram == hist, || "histogram differs".into())?;
    let dm = (stats.mean_wwr.unwrap() - mean).abs();
    ensure(dm <= 1e-12, || format!("mean off by {dm:e}"))?;
    let dmode = (stats.mode_wwr.unwrap() - mode).abs();
    ensure(dmode <= 1e-12, || format!("mode off by {dmode:e}"))?;
    Ok(format!(
        "200 images ({} defined): mean {:.4}, mode {:.3}, histogram exact",
        ratios.len(),
        mean,
        mode
    ))
}

fn run_wwr(args: &[&str]) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_wwr")).args(args).output().map_err(|e| e.to_string())?;
    ensure(o.status.success(), || format!("wwr {args:?}: {}", String::from_utf8_lossy(&o.stderr)))
}

fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                files.insert(path.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&path).unwrap());
            }
        }
    }
    files
}

fn pipeline(jobs: &str) -> Result<BTreeMap<PathBuf, Vec<u8>>, String> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/dataset");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = tmp.path();
    let s = |p: &Path| p.to_str().unwrap().to_owned();
    let (masks, fused, report) = (out.join("masks"), out.join("fused"), out.join("report"));
    run_wwr(&["--jobs", jobs, "rasterize", &s(&fixtures), "--out", &s(&masks)])?;
    run_wwr(&["--jobs", jobs, "fuse", &s(&fixtures), &s(&masks), "--out", &s(&fused)])?;
    run_wwr(&["--jobs", jobs, "wwr", &s(&fused), "--out", &s(&out.join("wwr.csv"))])?;
    run_wwr(&["--jobs", jobs, "stats", &s(&fused), "--out", &s(&report)])?;
    Ok(snapshot(out))
}

fn determinism() -> Outcome {
    let reference = pipeline("1")?;
    ensure(reference.len() >= 12, || format!("only {} output files", reference.len()))?;
    ensure(pipeline("1")? == reference, || "second --jobs 1 run differs".into())?;
    for jobs in ["2", "8"] {
        let run = pipeline(jobs)?;
        ensure(run == reference, || format!("--jobs {jobs} output differs"))?;
    }
    Ok(format!("{} files byte-identical across runs and --jobs 1/2/8", reference.len()))
}

fn render(w: usize, h: usize, corners: &[Point; 4]) -> RasterImage {
    let mask = rasterize_polygons(&[corners.to_vec()], w, h);
    let data = mask.bits().iter().flat_map(|&b| if b { [205, 185, 160] } else { [35, 45, 60] }).collect();
    RasterImage::new(w, h, 3, data).unwrap()
}

fn detection_fixtures() -> Outcome {
    let mut r = rng(10);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for k in 0..25 {
        let (x0, y0) = (r.random_range(30.0..70.0), r.random_range(30.0..70.0));
        let (w, h): (f64, f64) = (r.random_range(90.0..170.0), r.random_range(90.0..170.0));
        let j = 0.18 * w.min(h);
        let mut jit = |x: f64, y: f64| Point::new(x + r.random_range(-j..j), y + r.random_range(-j..j));
        let truth = [jit(x0, y0), jit(x0 + w, y0), jit(x0 + w, y0 + h), jit(x0, y0 + h)];
        let edges = detect_edges(&render(300, 300, &truth), 50.0, 150.0).map_err(|e| e.to_string())?;
        let q = quad_from_edges(&edges, &HoughParams::default()).map_err(|e| format!("case {k}: {e}"))?;
        for (g, t) in q.corners().iter().zip(truth) {
            worst = worst.max(g.distance(t));
        }
    }
    let edge_time = start.elapsed();
    ensure(worst <= 2.0, || format!("edge corners off by up to {worst:.2} px"))?;
    within(edge_time, 10.0)?;

    let start = Instant::now();
    let cfg = ClassConfig::default();
    for k in 0..100 {
        let (x0, y0) = (r.random_range(0..60), r.random_range(0..60));
        let (x1, y1) = (x0 + r.random_range(1..80), y0 + r.random_range(1..80));
        let map = LabelMap::from_fn(150, 150, |x, y| if (x0..=x1).contains(&x) && (y0..=y1).contains(&y) { 2 } else { 3 });
        let q = corners_from_mask(&map, &cfg).map_err(|e| format!("rectangle {k}: {e}"))?;
        let c = Point::pixel_center;
        ensure(q.corners() == [c(x0, y0), c(x1, y0), c(x1, y1), c(x0, y1)], || {
            format!("rectangle {k}: {:?}", q.corners())
        })?;
    }
    let mask_time = start.elapsed();
    within(mask_time, 10.0)?;
    Ok(format!(
        "25 quads within {worst:.2} px ({:.2}s); 100 rectangles pixel-exact ({:.2}s)",
        edge_time.as_secs_f64(),
        mask_time.as_secs_f64()
    ))
}

fn end_to_end() -> Outcome {
    let scene = facade_scene(&SceneParams::default()).map_err(|e| e.to_string())?;
    let cfg = ClassConfig::default();
    ensure(scene.true_wwr() == 0.25, || format!("scene true WWR {}", scene.true_wwr()))?;
    let raw = compute_wwr("raw", &scene.oblique_labels, &cfg).wwr.unwrap();

    let quad = corners_from_mask(&scene.oblique_labels, &cfg).map_err(|e| e.to_string())?;
    let (_, labels) = rectify(&scene.oblique_image, Some(&scene.oblique_labels), &quad).map_err(|e| e.to_string())?;
    let corrected = compute_wwr("rectified", &labels.unwrap(), &cfg).wwr.unwrap();
    ensure((corrected - 0.25).abs() <= 0.02, || format!("corrected WWR {corrected:.4} (uncorrected {raw:.4})"))?;

    let edges = detect_edges(&scene.oblique_image, 50.0, 150.0).map_err(|e| e.to_string())?;
    let quad = quad_from_edges(&edges, &HoughParams::default()).map_err(|e| e.to_string())?;
    let (_, labels) = rectify(&scene.oblique_image, Some(&scene.oblique_labels), &quad).map_err(|e| e.to_string())?;
    let via_edges = compute_wwr("edges", &labels.unwrap(), &cfg).wwr.unwrap();
    ensure((via_edges - 0.25).abs() <= 0.02, || format!("edge-route WWR {via_edges:.4}"))?;
    Ok(format!("true 0.25; oblique {raw:.4}; corrected {corrected:.4} (mask corners), {via_edges:.4} (edge corners)"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("WWR formula correctness", wwr_formula),
        ("IoU formula correctness", iou_formula),
        ("rasterizer oracle equivalence", rasterizer_oracle),
        ("homography exactness", homography_exactness),
        ("warp round trip", warp_round_trip),
        ("normalization constants", normalization_constants),
        ("fusion semantics", fusion_semantics),
        ("dataset statistics", dataset_statistics),
        ("determinism", determinism),
        ("edge/corner detection fixtures", detection_fixtures),
        ("end-to-end scenario", end_to_end),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
