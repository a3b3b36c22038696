use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use wwr_core::dataset::window_polygons;
use wwr_core::mask::{decode_label_png, decode_mask_png, encode_label_png_bytes, encode_mask_png_bytes};
use wwr_core::metrics::write_wwr_csv;
use wwr_core::perspective::rectify;
use wwr_core::preprocess::{CropOptions, FCN_SIZE, SEGFORMER_SIZE};
use wwr_core::raster::encode_png_bytes;
use wwr_core::{
    compute_iou, compute_wwr, corners_from_mask, crop_pad_resize, dataset_stats, decode_image, detect_edges,
    emit_report, export_tensor, fuse_labels, normalize, parse_annotations, quad_from_edges, rasterize_polygons,
    resize_bilinear, resize_nearest, scan_dataset, wwr_error, ClassConfig, Error, ErrorMode, HoughParams,
    LabelMap, NormalizationParams, Quad, Result, ScanOptions, WwrRecord, IGNORE_INDEX,
};

use crate::args::*;
use crate::batch::{default_jobs, ordered_map};

pub fn run(cli: Cli) -> Result<()> {
    let ctx = Ctx {
        classes: cli.classes,
        jobs: cli.jobs.unwrap_or_else(default_jobs),
        scan: ScanOptions {
            label_suffix: cli.label_suffix,
        },
    };
    log::debug!("classes {:?}, {} job(s)", ctx.classes, ctx.jobs);
    match cli.command {
        Command::Rasterize(a) => rasterize(&ctx, a),
        Command::Fuse(a) => fuse(&ctx, a),
        Command::Preprocess(a) => preprocess(a),
        Command::Wwr(a) => wwr(&ctx, a),
        Command::Iou(a) => iou(a),
        Command::Eval(a) => eval(&ctx, a),
        Command::Warp(a) => warp(&ctx, a),
        Command::DetectCorners(a) => detect(&ctx, a),
        Command::Stats(a) => stats(&ctx, a),
    }
}

struct Ctx {
    classes: ClassConfig,
    jobs: usize,
    scan: ScanOptions,
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn print(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))
}

/// Collects `(id, path)` for every PNG in `dir`, sorted by id. A trailing
/// label suffix is dropped from the id so dataset label maps pair with masks.
fn label_maps_in(dir: &Path, suffix: &str) -> Result<Vec<(String, PathBuf)>> {
    let mut found: Vec<(String, PathBuf)> = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let is_png = path.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("png"));
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        if !is_png || !path.is_file() {
            continue;
        }
        let id = stem.strip_suffix(suffix).filter(|_| !suffix.is_empty()).unwrap_or(stem).to_owned();
        found.push((id, path));
    }
    found.sort();
    for pair in found.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(Error::Ambiguous {
                stem: pair[0].0.clone(),
                first: pair[0].1.display().to_string(),
                second: pair[1].1.display().to_string(),
            });
        }
    }
    Ok(found)
}

/// Label maps named on the command line, expanding directories.
fn label_inputs(inputs: &[PathBuf], suffix: &str) -> Result<Vec<(String, PathBuf)>> {
    let mut all = Vec::new();
    for input in inputs {
        if input.is_dir() {
            all.extend(label_maps_in(input, suffix)?);
        } else {
            let id = input.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_owned();
            all.push((id, input.clone()));
        }
    }
    Ok(all)
}

fn companion_image(json: &Path) -> Option<PathBuf> {
    ["png", "jpg", "jpeg", "PNG", "JPG", "JPEG"]
        .iter()
        .map(|ext| json.with_extension(ext))
        .find(|p| p.is_file())
}

fn mask_from_annotations(json: &Path, size: (usize, usize), labels: &[String]) -> Result<Vec<u8>> {
    let anns = parse_annotations(json)?;
    let windows = window_polygons(&anns, labels);
    log::debug!("{}: {} of {} polygons are windows", json.display(), windows.len(), anns.len());
    encode_mask_png_bytes(&rasterize_polygons(&windows, size.0, size.1))
}

fn image_size(path: &Path) -> Result<(usize, usize)> {
    let img = decode_image(path)?;
    Ok((img.width(), img.height()))
}

fn rasterize(ctx: &Ctx, a: RasterizeArgs) -> Result<()> {
    if !a.input.is_dir() {
        let size = match a.size {
            Some(s) => s,
            None => {
                let img = companion_image(&a.input).ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "no image next to {} to take the size from; pass --size WxH",
                        a.input.display()
                    ))
                })?;
                image_size(&img)?
            }
        };
        return write_file(&a.out, &mask_from_annotations(&a.input, size, &a.window_labels)?);
    }
    let items: Vec<_> = scan_dataset(&a.input, &ctx.scan)?
        .into_iter()
        .filter_map(|item| item.annotation_path.clone().map(|json| (item, json)))
        .collect();
    let encoded = ordered_map(ctx.jobs, &items, |(item, json)| {
        let size = match a.size {
            Some(s) => s,
            None => image_size(&item.image_path)?,
        };
        mask_from_annotations(json, size, &a.window_labels)
    });
    create_dir(&a.out)?;
    for ((item, _), bytes) in items.iter().zip(encoded) {
        write_file(&a.out.join(format!("{}.png", item.id)), &bytes?)?;
    }
    log::info!("rasterized {} annotation file(s)", items.len());
    Ok(())
}

fn fuse_one(base: &Path, mask: &Path, cfg: &ClassConfig) -> Result<Vec<u8>> {
    let fused = fuse_labels(&decode_label_png(base)?, &decode_mask_png(mask)?, cfg)?;
    encode_label_png_bytes(&fused)
}

fn fuse(ctx: &Ctx, a: FuseArgs) -> Result<()> {
    if !a.base.is_dir() {
        return write_file(&a.out, &fuse_one(&a.base, &a.mask, &ctx.classes)?);
    }
    let pairs: Vec<(String, PathBuf, PathBuf)> = scan_dataset(&a.base, &ctx.scan)?
        .into_iter()
        .filter_map(|item| {
            let base = item.label_map_path?;
            let mask = a.mask.join(format!("{}.png", item.id));
            Some((item.id, base, mask))
        })
        .collect();
    let fused = ordered_map(ctx.jobs, &pairs, |(_, base, mask)| fuse_one(base, mask, &ctx.classes));
    create_dir(&a.out)?;
    for ((id, _, _), bytes) in pairs.iter().zip(fused) {
        write_file(&a.out.join(format!("{id}.png")), &bytes?)?;
    }
    log::info!("fused {} label map(s)", pairs.len());
    Ok(())
}

fn preprocess(a: PreprocessArgs) -> Result<()> {
    let defaults = NormalizationParams::default();
    let params = NormalizationParams::new(a.mean.unwrap_or(defaults.mean()), a.std.unwrap_or(defaults.std()))?;
    let img = decode_image(&a.image)?;
    let labels = a.label.as_deref().map(decode_label_png).transpose()?;
    let size = a.size.map(|s| s as usize);

    let (tensor, labels) = if a.fcn {
        let n = size.unwrap_or(FCN_SIZE);
        let tensor = normalize(&resize_bilinear(&img, n, n)?, &params)?;
        (tensor, labels.map(|m| resize_nearest(&m, n, n)).transpose()?)
    } else {
        let opts = CropOptions {
            out: size.unwrap_or(SEGFORMER_SIZE),
            seed: a.seed,
            scale: None,
        };
        let map = match &labels {
            Some(m) => m.clone(),
            None => LabelMap::filled(img.width(), img.height(), IGNORE_INDEX)?,
        };
        let (tensor, map, g) = crop_pad_resize(&normalize(&img, &params)?, &map, &opts)?;
        log::info!("crop {}x{} at ({}, {}) of padded {}x{}", g.size, g.size, g.x, g.y, g.padded_w, g.padded_h);
        (tensor, labels.map(|_| map))
    };
    export_tensor(&tensor, &a.out)?;
    if let (Some(path), Some(map)) = (&a.label_out, &labels) {
        write_file(path, &encode_label_png_bytes(map)?)?;
    }
    Ok(())
}

fn wwr_records(ctx: &Ctx, maps: &[(String, PathBuf)]) -> Result<Vec<(WwrRecord, u64)>> {
    ordered_map(ctx.jobs, maps, |(id, path)| {
        let map = decode_label_png(path)?;
        Ok((compute_wwr(id.clone(), &map, &ctx.classes), (map.width() * map.height()) as u64))
    })
    .into_iter()
    .collect()
}

fn wwr(ctx: &Ctx, a: WwrArgs) -> Result<()> {
    let maps = label_inputs(&a.inputs, &ctx.scan.label_suffix)?;
    let records: Vec<WwrRecord> = wwr_records(ctx, &maps)?.into_iter().map(|(r, _)| r).collect();
    let single = a.inputs.len() == 1 && !a.inputs[0].is_dir();
    match (&a.out, single) {
        (None, true) => {
            let r = &records[0];
            let value = r.wwr.map_or_else(|| "undefined".to_owned(), |v| v.to_string());
            print(&format!("wwr={value}\n"))
        }
        (out, _) => {
            let mut csv = Vec::new();
            write_wwr_csv(&records, &mut csv).expect("writing to memory");
            match out {
                Some(path) => write_file(path, &csv),
                None => print(std::str::from_utf8(&csv).expect("CSV is UTF-8")),
            }
        }
    }
}

fn iou(a: IouArgs) -> Result<()> {
    let r = compute_iou(&decode_mask_png(&a.pred)?, &decode_mask_png(&a.truth)?)?;
    if a.json {
        print(&format!("{}\n", serde_json::to_string(&r).expect("result serializes")))
    } else {
        print(&format!("intersection={} union={} iou={}\n", r.intersection, r.union, r.iou))
    }
}

fn eval(ctx: &Ctx, a: EvalArgs) -> Result<()> {
    let pred = wwr_records(ctx, &label_maps_in(&a.pred, &ctx.scan.label_suffix)?)?;
    let truth = wwr_records(ctx, &label_maps_in(&a.truth, &ctx.scan.label_suffix)?)?;
    let strip = |v: Vec<(WwrRecord, u64)>| v.into_iter().map(|(r, _)| r).collect::<Vec<_>>();
    let mode = if a.relative { ErrorMode::Relative } else { ErrorMode::Absolute };
    let summary = wwr_error(&strip(pred), &strip(truth), a.threshold, mode)?;
    let json = summary.to_json();
    if let Some(path) = &a.out {
        write_file(path, format!("{json}\n").as_bytes())?;
    }
    if a.json {
        print(&format!("{json}\n"))
    } else {
        print(&format!("{summary}\n"))
    }
}

fn find_quad(image: &Path, mask: Option<&Path>, canny: CannyArgs, cfg: &ClassConfig) -> Result<Quad> {
    match mask {
        Some(path) => corners_from_mask(&decode_label_png(path)?, cfg),
        None => {
            let edges = detect_edges(&decode_image(image)?, canny.canny_low, canny.canny_high)?;
            log::debug!("{} edge pixels", edges.edge_count());
            quad_from_edges(&edges, &HoughParams::default())
        }
    }
}

fn warp(ctx: &Ctx, a: WarpArgs) -> Result<()> {
    let img = decode_image(&a.image)?;
    let quad = match a.corners {
        Some(c) => Quad::from_unordered(c)?,
        None => find_quad(&a.image, a.auto_mask.as_deref(), a.canny, &ctx.classes)?,
    };
    log::info!("facade corners {}", quad.to_json());
    let labels = a.labels.as_deref().map(decode_label_png).transpose()?;
    let (out, labels) = rectify(&img, labels.as_ref(), &quad)?;
    write_file(&a.out, &encode_png_bytes(&out)?)?;
    if let (Some(path), Some(map)) = (&a.labels_out, &labels) {
        write_file(path, &encode_label_png_bytes(map)?)?;
    }
    Ok(())
}

fn detect(ctx: &Ctx, a: DetectArgs) -> Result<()> {
    let quad = find_quad(&a.image, a.mask.as_deref(), a.canny, &ctx.classes)?;
    let json = format!("{}\n", quad.to_json());
    match &a.out {
        Some(path) => write_file(path, json.as_bytes()),
        None => print(&json),
    }
}

fn stats(ctx: &Ctx, a: StatsArgs) -> Result<()> {
    let records = wwr_records(ctx, &label_maps_in(&a.input, &ctx.scan.label_suffix)?)?;
    let stats = dataset_stats(&records)?;
    emit_report(&stats, &a.out)?;
    let fmt = |v: Option<f64>| v.map_or_else(|| "undefined".to_owned(), |v| format!("{v:.4}"));
    print(&format!(
        "images={} defined={} mean_wwr={} mode_wwr={}\n",
        stats.n,
        stats.n_defined(),
        fmt(stats.mean_wwr),
        fmt(stats.mode_wwr)
    ))
}
